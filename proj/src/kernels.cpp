#include "nhtp/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>

namespace nhtp::kernels {

namespace serial {

void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out) {
    const std::size_t n = v.size();
    const std::size_t rows = in.size() / n;
    assert(out.size() >= rows);
    for (std::size_t p = 0; p < rows; ++p) {
        const double* row = in.data() + p * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
        out[p] = acc;
    }
}

double sum_of_squares(std::span<const double> values) {
    double acc = 0.0;
    for (double a : values) acc += a * a;
    return acc;
}

}  // namespace serial

namespace parallel {

void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out) {
    const std::size_t n = v.size();
    const auto rows = static_cast<std::int64_t>(in.size() / n);
    assert(out.size() >= static_cast<std::size_t>(rows));
    const double* src = in.data();
    const double* vec = v.data();
    double* dst = out.data();
#pragma omp parallel for schedule(static) if (rows >= static_cast<std::int64_t>(kParallelRowThreshold))
    for (std::int64_t p = 0; p < rows; ++p) {
        const double* row = src + static_cast<std::size_t>(p) * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * vec[j];
        dst[p] = acc;
    }
}

// Per-block partial sums combined in block order, so the result does not
// depend on the thread count.
double sum_of_squares(std::span<const double> values) {
    constexpr std::size_t block = 4096;
    const std::size_t nblocks = (values.size() + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
    const auto nb = static_cast<std::int64_t>(nblocks);
#pragma omp parallel for schedule(static) if (nb > 1)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = std::min(values.size(), lo + block);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += values[i] * values[i];
        partial[static_cast<std::size_t>(b)] = acc;
    }
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace parallel

void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out, Policy policy) {
    if (policy == Policy::parallel)
        parallel::contract_last_mode(in, v, out);
    else
        serial::contract_last_mode(in, v, out);
}

double sum_of_squares(std::span<const double> values, Policy policy) {
    return policy == Policy::parallel ? parallel::sum_of_squares(values)
                                      : serial::sum_of_squares(values);
}

std::vector<double> contract_repeated(std::span<const double> values,
                                      std::span<const double> v, int times,
                                      Policy policy) {
    if (times <= 0) return {values.begin(), values.end()};
    const std::size_t n = v.size();
    std::vector<double> current(values.size() / n);
    contract_last_mode(values, v, current, policy);
    for (int t = 1; t < times; ++t) {
        std::vector<double> next(current.size() / n);
        contract_last_mode(current, v, next, policy);
        current = std::move(next);
    }
    return current;
}

}  // namespace nhtp::kernels
