#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nhtp/tensor.hpp"

namespace nhtp {

/// Zero-based, ascending index set.
using IndexSet = std::vector<int>;

/// min f(x) = 1/2 ||A x^{m-1} - b||^2  s.t. ||x||_0 <= s.
struct ProblemInstance {
    ProblemInstance(MultilinearOperator op, Vector b, int sparsity,
                    std::optional<Vector> ground_truth = std::nullopt,
                    std::optional<Vector> start = std::nullopt);

    int order() const { return op.order(); }
    int dim() const { return op.dim(); }

    MultilinearOperator op;
    Vector b;
    int s;
    std::optional<Vector> x_star;
    std::optional<Vector> x0;
    std::optional<std::uint64_t> seed;
};

/// Quantities shared by f, its gradient and its Hessian at one point.
struct Evaluation {
    double f = 0.0;
    Vector residual;    // A x^{m-1} - b
    Matrix contracted;  // A x^{m-2}
    Vector gradient;
};

Evaluation evaluate(const ProblemInstance& P, const Vector& x);

double objective_value(const ProblemInstance& P, const Vector& x);

/// (m-1) A x^{m-2} (A x^{m-1} - b)
Vector gradient(const ProblemInstance& P, const Vector& x);

/// Full n x n Hessian (m-1)(m-2) A x^{m-3} r + (m-1)^2 (A x^{m-2})^2.
Matrix hessian(const ProblemInstance& P, const Vector& x);
Matrix hessian(const ProblemInstance& P, const Vector& x, const Evaluation& at_x);

/// The (rows, cols) sub-block of the Hessian.
Matrix hessian_block(const ProblemInstance& P, const Vector& x, const IndexSet& rows,
                     const IndexSet& cols);

IndexSet support(const Vector& x);
IndexSet complement(const IndexSet& T, int n);
int count_nonzeros(const Vector& x);

/// |x|_(k): the k-th largest absolute entry (1-based k); 0 when k > n.
double kth_largest_magnitude(const Vector& x, int k);

/// Tol_eta(x; T) = ||[grad_T f(x); x_{T^c}]|| + max_{i in T^c} max(|grad_i f(x)| - |x|_(s)/eta, 0).
double tolerance_measure(const ProblemInstance& P, const Vector& x, const IndexSet& T, double eta);
double tolerance_measure(const ProblemInstance& P, const Vector& x, const Vector& grad,
                         const IndexSet& T, double eta);

enum class SparsityCase { strict_sparse, full_sparse };

std::string to_string(SparsityCase c);

struct StationarityReport {
    bool is_stationary = false;
    SparsityCase sparsity_case = SparsityCase::strict_sparse;
    double max_support_gradient = 0.0;
    double max_offsupport_gradient = 0.0;
    double threshold = 0.0;  // |x|_(s) / eta
};

/// eta-stationarity tested on the full gradient. "= 0" means |.| <= zero_tol.
/// Note that the off-support bound is applied to grad f itself, which carries
/// the factor (m-1) that the restricted-tensor form of the condition omits.
StationarityReport eta_stationarity_check(const ProblemInstance& P, const Vector& x, double eta,
                                          double zero_tol = 1e-10);

// Local regularity constants around a reference point x_ref with radius
// ||x_ref|| + delta. Terms whose integer coefficient vanishes are dropped,
// which keeps m = 2 and m = 3 finite for any radius.

/// Restricted Hessian Lipschitz constant L_f.
double lipschitz_constant(int order, double frobenius, double rhs_norm, double radius);
double lipschitz_constant(const ProblemInstance& P, const Vector& x_ref, double delta0);

/// Restricted strong smoothness constant M_2s.
double smoothness_constant(int order, double frobenius, double rhs_norm, double radius);
double smoothness_constant(const ProblemInstance& P, const Vector& x_ref, double delta1);

struct Assumption1Result {
    double min_eigenvalue = 0.0;
    IndexSet witness_support;
    std::size_t subsets_checked = 0;
    bool holds() const { return min_eigenvalue > 0.0; }
};

/// Smallest eigenvalue of the restricted Hessian at x_star over every T with
/// supp(x_star) subset of T and |T| <= 2s. Throws ResourceError when the
/// number of such T exceeds max_subsets.
Assumption1Result verify_assumption1(const ProblemInstance& P, const Vector& x_star, int s,
                                     std::size_t max_subsets = 1'000'000);

struct RecommendedParameters {
    double alpha_bar = 0.0;
    double eta_bar = 0.0;
};

/// alpha_bar = min{(1-2 sigma)/(M/gamma - sigma), 1},
/// eta_bar = min{gamma alpha_bar beta / M^2, alpha_bar beta, 1/(4M)}.
/// Requires 0 < gamma <= min{1, 2M}, 0 < sigma < 1/2, 0 < beta < 1.
RecommendedParameters recommended_parameters(double gamma, double sigma, double beta,
                                             double smoothness);

struct DerivativeCheck {
    double gradient_rel_error = 0.0;
    double hessian_rel_error = 0.0;
};

/// Central finite-difference check of gradient() and hessian() at x.
DerivativeCheck check_derivatives(const ProblemInstance& P, const Vector& x, double step = 1e-5);

}  // namespace nhtp
