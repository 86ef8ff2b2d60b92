#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhtp/objective.hpp"

namespace nhtp {

enum class GeneratorKind { cp_random, m_tensor_random, analytic };

std::string to_string(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator_kind(const std::string& text);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::cp_random;
    int order = 3;
    int dim = 10;
    int sparsity = 1;
    std::uint64_t seed = 0;
    /// Start-point perturbation e has entries noise_scale * U[0, 1) on supp(x*).
    double noise_scale = 0.1;
    /// Start point of the analytic fixture is analytic_start_scale * e1.
    double analytic_start_scale = 1.05;

    void validate() const;
};

/// {ceil(0.01 n), ceil(0.05 n)} with duplicates removed.
std::vector<int> default_sparsities(int dim);

/// Random CP tensor with n uniform [0,1) factors, random s-sparse ground truth.
///
/// Draw order from Rng(seed): the n x n factor matrix column by column, then a
/// permutation of [n] whose first s entries form the support, then the s
/// support values (zeros redrawn), then the s start-point offsets.
ProblemInstance gen_cp_instance(const GeneratorSpec& spec);

/// A = n^{m-1} I - B with B symmetric, one U[0,1) draw per index multiset
/// taken in row-major order of the nondecreasing multi-indices. Ground truth
/// and start point are drawn afterwards exactly as in gen_cp_instance.
ProblemInstance gen_mtensor_instance(const GeneratorSpec& spec);

/// Rank-two CP fixture with u1 = ((-1)^m, 1, ..., 1), u2 = ((-1)^{m-1}, 1, ..., 1),
/// b = u1 + (-1)^{m-1} u2, s = 1, x* = e1 and x0 = start_scale * e1.
ProblemInstance analytic_example(int order, int dim, double start_scale = 1.05);

ProblemInstance generate(const GeneratorSpec& spec);

}  // namespace nhtp
