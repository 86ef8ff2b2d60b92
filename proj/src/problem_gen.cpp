#include "nhtp/problem_gen.hpp"

#include <algorithm>
#include <cmath>

#include "nhtp/errors.hpp"
#include "nhtp/random.hpp"

namespace nhtp {

namespace {

struct GroundTruth {
    Vector x_star;
    Vector x0;
};

GroundTruth draw_ground_truth(Rng& rng, int n, int s, double noise_scale) {
    const std::vector<int> perm = rng.permutation(n);
    GroundTruth out{Vector::Zero(n), Vector::Zero(n)};
    for (int j = 0; j < s; ++j) {
        double v = 0.0;
        while (v == 0.0) v = rng.uniform();
        out.x_star[perm[static_cast<std::size_t>(j)]] = v;
    }
    out.x0 = out.x_star;
    for (int j = 0; j < s; ++j) out.x0[perm[static_cast<std::size_t>(j)]] += noise_scale * rng.uniform();
    return out;
}

bool is_nondecreasing_index(std::size_t flat, int order, int dim) {
    int prev = dim;
    for (int k = 0; k < order; ++k) {
        const int digit = static_cast<int>(flat % static_cast<std::size_t>(dim));
        if (digit > prev) return false;
        prev = digit;
        flat /= static_cast<std::size_t>(dim);
    }
    return true;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::cp_random: return "cp";
        case GeneratorKind::m_tensor_random: return "mtensor";
        case GeneratorKind::analytic: return "analytic";
    }
    return "unknown";
}

std::optional<GeneratorKind> parse_generator_kind(const std::string& text) {
    if (text == "cp" || text == "cp-random") return GeneratorKind::cp_random;
    if (text == "mtensor" || text == "m-tensor-random") return GeneratorKind::m_tensor_random;
    if (text == "analytic") return GeneratorKind::analytic;
    return std::nullopt;
}

void GeneratorSpec::validate() const {
    if (order < 2) throw InputError("generator order must be >= 2");
    if (kind == GeneratorKind::analytic && order <= 2)
        throw InputError("the analytic fixture needs order > 2");
    if (dim < 2) throw InputError("generator dimension must be >= 2");
    if (kind != GeneratorKind::analytic && (sparsity < 1 || sparsity >= dim))
        throw InputError("sparsity must lie in [1, n)");
    if (!(noise_scale >= 0.0)) throw InputError("noise_scale must be non-negative");
}

std::vector<int> default_sparsities(int dim) {
    std::vector<int> out;
    for (double fraction : {0.01, 0.05}) {
        const int s = static_cast<int>(std::ceil(fraction * dim));
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    return out;
}

ProblemInstance gen_cp_instance(const GeneratorSpec& spec) {
    if (spec.kind != GeneratorKind::cp_random) throw InputError("gen_cp_instance: wrong kind");
    spec.validate();
    const int n = spec.dim;
    Rng rng(spec.seed);
    Matrix U(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) U(i, k) = rng.uniform();
    MultilinearOperator A{CpTensor(spec.order, std::move(U))};
    GroundTruth gt = draw_ground_truth(rng, n, spec.sparsity, spec.noise_scale);
    Vector b = contract_to_vector(A, gt.x_star);
    ProblemInstance P(std::move(A), std::move(b), spec.sparsity, std::move(gt.x_star),
                      std::move(gt.x0));
    P.seed = spec.seed;
    return P;
}

ProblemInstance gen_mtensor_instance(const GeneratorSpec& spec) {
    if (spec.kind != GeneratorKind::m_tensor_random)
        throw InputError("gen_mtensor_instance: wrong kind");
    spec.validate();
    const int m = spec.order;
    const int n = spec.dim;
    const std::size_t count = checked_entry_count(m, n);
    Rng rng(spec.seed);
    std::vector<double> raw(count, 0.0);
    for (std::size_t f = 0; f < count; ++f)
        if (is_nondecreasing_index(f, m, n)) raw[f] = rng.uniform();
    const DenseSymmetricTensor B = symmetrize(raw, m, n);
    const DenseSymmetricTensor I = identity_tensor(m, n);
    const double shift = ipow(static_cast<double>(n), m - 1);
    std::vector<double> values(count);
    const auto bv = B.values();
    const auto iv = I.values();
    for (std::size_t f = 0; f < count; ++f) values[f] = shift * iv[f] - bv[f];
    MultilinearOperator A{DenseSymmetricTensor(m, n, std::move(values))};

    GroundTruth gt = draw_ground_truth(rng, n, spec.sparsity, spec.noise_scale);
    Vector b = contract_to_vector(A, gt.x_star);
    ProblemInstance P(std::move(A), std::move(b), spec.sparsity, std::move(gt.x_star),
                      std::move(gt.x0));
    P.seed = spec.seed;
    return P;
}

ProblemInstance analytic_example(int order, int dim, double start_scale) {
    if (order <= 2) throw InputError("analytic_example needs order > 2");
    if (dim < 2) throw InputError("analytic_example needs dimension >= 2");
    const double sign_m = order % 2 == 0 ? 1.0 : -1.0;  // (-1)^m
    Matrix U = Matrix::Ones(dim, 2);
    U(0, 0) = sign_m;
    U(0, 1) = -sign_m;
    Vector b = U.col(0) + (-sign_m) * U.col(1);
    Vector x_star = Vector::Zero(dim);
    x_star[0] = 1.0;
    Vector x0 = start_scale * x_star;
    return {MultilinearOperator{CpTensor(order, std::move(U))}, std::move(b), 1, std::move(x_star),
            std::move(x0)};
}

ProblemInstance generate(const GeneratorSpec& spec) {
    switch (spec.kind) {
        case GeneratorKind::cp_random: return gen_cp_instance(spec);
        case GeneratorKind::m_tensor_random: return gen_mtensor_instance(spec);
        case GeneratorKind::analytic:
            spec.validate();
            return analytic_example(spec.order, spec.dim, spec.analytic_start_scale);
    }
    throw InputError("unknown generator kind");
}

}  // namespace nhtp
