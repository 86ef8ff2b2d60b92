#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Inner loops of the dense tensor contractions. Every kernel has a serial
// reference and an OpenMP variant. The contraction variants accumulate each
// output entry in the same order and are bit-identical; sum_of_squares agrees
// to rounding.
namespace nhtp::kernels {

enum class Policy { serial, parallel };

/// Rows below this count run serially even under Policy::parallel.
inline constexpr std::size_t kParallelRowThreshold = 2048;

namespace serial {

/// out[p] = sum_j in[p*n + j] * v[j] with n = v.size(), p < in.size() / n.
void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out);

double sum_of_squares(std::span<const double> values);

}  // namespace serial

namespace parallel {

void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out);

double sum_of_squares(std::span<const double> values);

}  // namespace parallel

void contract_last_mode(std::span<const double> in, std::span<const double> v,
                        std::span<double> out, Policy policy);

double sum_of_squares(std::span<const double> values, Policy policy);

/// Contracts the trailing `times` modes of a row-major n^order array with v.
/// Returns an array of n^(order - times) entries.
std::vector<double> contract_repeated(std::span<const double> values,
                                      std::span<const double> v, int times,
                                      Policy policy);

}  // namespace nhtp::kernels
