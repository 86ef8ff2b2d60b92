#include "nhtp/objective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "nhtp/errors.hpp"

namespace nhtp {

namespace {

void require_length(const ProblemInstance& P, const Vector& x, const char* what) {
    if (x.size() != P.dim())
        throw InputError(std::string(what) + ": vector length " + std::to_string(x.size()) +
                         " does not match problem dimension " + std::to_string(P.dim()));
}

void require_indices(const IndexSet& T, int n, const char* what) {
    for (int i : T)
        if (i < 0 || i >= n)
            throw InputError(std::string(what) + ": index " + std::to_string(i) +
                             " out of range [0, " + std::to_string(n) + ")");
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

ProblemInstance::ProblemInstance(MultilinearOperator op_, Vector b_, int sparsity,
                                 std::optional<Vector> ground_truth, std::optional<Vector> start)
    : op(std::move(op_)), b(std::move(b_)), s(sparsity), x_star(std::move(ground_truth)),
      x0(std::move(start)) {
    const int n = op.dim();
    if (b.size() != n) throw InputError("rhs length does not match tensor dimension");
    if (s < 1 || s >= n)
        throw InputError("sparsity s=" + std::to_string(s) + " must lie in [1, " +
                         std::to_string(n) + ")");
    if (x_star) {
        if (x_star->size() != n) throw InputError("ground truth length does not match dimension");
        if (count_nonzeros(*x_star) > s) throw InputError("ground truth is not s-sparse");
    }
    if (x0 && x0->size() != n) throw InputError("start point length does not match dimension");
}

Evaluation evaluate(const ProblemInstance& P, const Vector& x) {
    require_length(P, x, "evaluate");
    Evaluation e;
    e.contracted = contract_to_matrix(P.op, x);
    e.residual = e.contracted * x - P.b;
    e.f = 0.5 * e.residual.squaredNorm();
    e.gradient = (P.order() - 1) * (e.contracted * e.residual);
    return e;
}

double objective_value(const ProblemInstance& P, const Vector& x) {
    require_length(P, x, "objective_value");
    return 0.5 * (contract_to_vector(P.op, x) - P.b).squaredNorm();
}

Vector gradient(const ProblemInstance& P, const Vector& x) { return evaluate(P, x).gradient; }

Matrix hessian(const ProblemInstance& P, const Vector& x, const Evaluation& at_x) {
    const int m = P.order();
    const double c2 = static_cast<double>(m - 1) * (m - 1);
    Matrix H = c2 * (at_x.contracted * at_x.contracted);
    if (m >= 3) {
        const double c1 = static_cast<double>(m - 1) * (m - 2);
        H += c1 * contract_order3_with(P.op, x, at_x.residual);
    }
    return 0.5 * (H + H.transpose());
}

Matrix hessian(const ProblemInstance& P, const Vector& x) { return hessian(P, x, evaluate(P, x)); }

Matrix hessian_block(const ProblemInstance& P, const Vector& x, const IndexSet& rows,
                     const IndexSet& cols) {
    require_length(P, x, "hessian_block");
    require_indices(rows, P.dim(), "hessian_block");
    require_indices(cols, P.dim(), "hessian_block");
    return hessian(P, x)(rows, cols);
}

IndexSet support(const Vector& x) {
    IndexSet out;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) out.push_back(static_cast<int>(i));
    return out;
}

IndexSet complement(const IndexSet& T, int n) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int i : T) in[static_cast<std::size_t>(i)] = true;
    IndexSet out;
    for (int i = 0; i < n; ++i)
        if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

int count_nonzeros(const Vector& x) {
    return static_cast<int>((x.array() != 0.0).count());
}

double kth_largest_magnitude(const Vector& x, int k) {
    if (k < 1 || k > x.size()) return 0.0;
    std::vector<double> mags(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
    auto kth = mags.begin() + (k - 1);
    std::nth_element(mags.begin(), kth, mags.end(), std::greater<>());
    return *kth;
}

double tolerance_measure(const ProblemInstance& P, const Vector& x, const Vector& grad,
                         const IndexSet& T, double eta) {
    require_length(P, x, "tolerance_measure");
    require_indices(T, P.dim(), "tolerance_measure");
    if (static_cast<int>(T.size()) != P.s)
        throw InputError("tolerance_measure: |T| = " + std::to_string(T.size()) +
                         " but s = " + std::to_string(P.s));
    if (!(eta > 0.0)) throw ConfigError("tolerance_measure: eta must be positive");
    const IndexSet Tc = complement(T, P.dim());
    const double stacked = std::sqrt(grad(T).squaredNorm() + x(Tc).squaredNorm());
    const double threshold = kth_largest_magnitude(x, P.s) / eta;
    double excess = 0.0;
    for (int i : Tc) excess = std::max(excess, std::abs(grad[i]) - threshold);
    return stacked + excess;
}

double tolerance_measure(const ProblemInstance& P, const Vector& x, const IndexSet& T, double eta) {
    return tolerance_measure(P, x, gradient(P, x), T, eta);
}

std::string to_string(SparsityCase c) {
    return c == SparsityCase::strict_sparse ? "strict-sparse" : "full-sparse";
}

StationarityReport eta_stationarity_check(const ProblemInstance& P, const Vector& x, double eta,
                                          double zero_tol) {
    require_length(P, x, "eta_stationarity_check");
    if (!(eta > 0.0)) throw ConfigError("eta_stationarity_check: eta must be positive");
    const int nnz = count_nonzeros(x);
    if (nnz > P.s)
        throw InputError("eta_stationarity_check: x has " + std::to_string(nnz) +
                         " nonzeros, more than s = " + std::to_string(P.s));
    const Vector g = gradient(P, x);
    StationarityReport report;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double& slot = x[i] != 0.0 ? report.max_support_gradient : report.max_offsupport_gradient;
        slot = std::max(slot, std::abs(g[i]));
    }
    report.threshold = kth_largest_magnitude(x, P.s) / eta;
    if (nnz < P.s) {
        report.sparsity_case = SparsityCase::strict_sparse;
        report.is_stationary = std::max(report.max_support_gradient,
                                        report.max_offsupport_gradient) <= zero_tol;
    } else {
        report.sparsity_case = SparsityCase::full_sparse;
        report.is_stationary = report.max_support_gradient <= zero_tol &&
                               report.max_offsupport_gradient <= report.threshold;
    }
    return report;
}

double lipschitz_constant(int order, double frobenius, double rhs_norm, double radius) {
    const double m = order;
    const double a2 = frobenius * frobenius;
    double value = 0.0;
    if (order != 2)
        value += 2.0 * (m - 1) * (m - 2) * (2 * m - 3) * a2 * std::pow(radius, 2 * m - 5);
    if (order != 2 && order != 3)
        value += (m - 1) * (m - 2) * (m - 3) * rhs_norm * a2 * std::pow(radius, m - 4);
    return value;
}

double lipschitz_constant(const ProblemInstance& P, const Vector& x_ref, double delta0) {
    require_length(P, x_ref, "lipschitz_constant");
    return lipschitz_constant(P.order(), frobenius_norm(P.op), P.b.norm(), x_ref.norm() + delta0);
}

double smoothness_constant(int order, double frobenius, double rhs_norm, double radius) {
    const double m = order;
    double value = (m - 1) * (2 * m - 3) * frobenius * frobenius * std::pow(radius, 2 * m - 4);
    if (order != 2) value += (m - 1) * (m - 2) * rhs_norm * frobenius * std::pow(radius, m - 3);
    return value;
}

double smoothness_constant(const ProblemInstance& P, const Vector& x_ref, double delta1) {
    require_length(P, x_ref, "smoothness_constant");
    return smoothness_constant(P.order(), frobenius_norm(P.op), P.b.norm(), x_ref.norm() + delta1);
}

Assumption1Result verify_assumption1(const ProblemInstance& P, const Vector& x_star, int s,
                                     std::size_t max_subsets) {
    require_length(P, x_star, "verify_assumption1");
    const int n = P.dim();
    const IndexSet gamma = support(x_star);
    const int base = static_cast<int>(gamma.size());
    if (base > 2 * s) throw InputError("verify_assumption1: |supp(x*)| exceeds 2s");
    const IndexSet free = complement(gamma, n);
    const int extra_max = std::min(2 * s - base, static_cast<int>(free.size()));

    double total = 0.0;
    for (int k = 0; k <= extra_max; ++k) total += binomial(static_cast<int>(free.size()), k);
    if (base == 0) total -= 1.0;
    if (total > static_cast<double>(max_subsets))
        throw ResourceError("verify_assumption1: " + std::to_string(static_cast<long long>(total)) +
                            " index sets exceed the enumeration cap of " +
                            std::to_string(max_subsets));

    const Matrix H = hessian(P, x_star);
    Assumption1Result result;
    result.min_eigenvalue = std::numeric_limits<double>::infinity();

    auto visit = [&](const IndexSet& T) {
        if (T.empty()) return;
        const Matrix block = H(T, T);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(block, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        ++result.subsets_checked;
        if (lo < result.min_eigenvalue) {
            result.min_eigenvalue = lo;
            result.witness_support = T;
        }
    };

    // Enumerate subsets of `free` of size 0..extra_max in lexicographic order.
    std::vector<int> chosen;
    std::function<void(std::size_t)> recurse = [&](std::size_t start) {
        IndexSet T = gamma;
        for (int c : chosen) T.push_back(free[static_cast<std::size_t>(c)]);
        std::sort(T.begin(), T.end());
        visit(T);
        if (static_cast<int>(chosen.size()) == extra_max) return;
        for (std::size_t j = start; j < free.size(); ++j) {
            chosen.push_back(static_cast<int>(j));
            recurse(j + 1);
            chosen.pop_back();
        }
    };
    recurse(0);
    return result;
}

RecommendedParameters recommended_parameters(double gamma, double sigma, double beta,
                                             double smoothness) {
    if (!(smoothness > 0.0)) throw ConfigError("smoothness constant must be positive");
    if (!(gamma > 0.0 && gamma <= std::min(1.0, 2.0 * smoothness)))
        throw ConfigError("gamma must satisfy 0 < gamma <= min{1, 2 M_2s}");
    if (!(sigma > 0.0 && sigma < 0.5)) throw ConfigError("sigma must lie in (0, 1/2)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
    RecommendedParameters p;
    p.alpha_bar = std::min((1.0 - 2.0 * sigma) / (smoothness / gamma - sigma), 1.0);
    p.eta_bar = std::min({gamma * (p.alpha_bar * beta) / (smoothness * smoothness),
                          p.alpha_bar * beta, 1.0 / (4.0 * smoothness)});
    return p;
}

DerivativeCheck check_derivatives(const ProblemInstance& P, const Vector& x, double step) {
    require_length(P, x, "check_derivatives");
    const Evaluation at_x = evaluate(P, x);
    const Matrix H = hessian(P, x, at_x);
    const int n = P.dim();
    Vector fd_grad(n);
    Matrix fd_hess(n, n);
    for (int i = 0; i < n; ++i) {
        Vector xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        fd_grad[i] = (objective_value(P, xp) - objective_value(P, xm)) / (2 * step);
        fd_hess.col(i) = (gradient(P, xp) - gradient(P, xm)) / (2 * step);
    }
    DerivativeCheck out;
    out.gradient_rel_error = (fd_grad - at_x.gradient).norm() / std::max(at_x.gradient.norm(), 1.0);
    out.hessian_rel_error = (fd_hess - H).norm() / std::max(H.norm(), 1.0);
    return out;
}

}  // namespace nhtp
