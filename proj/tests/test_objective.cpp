#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nhtp/errors.hpp"
#include "nhtp/objective.hpp"
#include "nhtp/problem_gen.hpp"
#include "nhtp/solver.hpp"
#include "oracles.hpp"

namespace {

using nhtp::CpTensor;
using nhtp::DenseSymmetricTensor;
using nhtp::IndexSet;
using nhtp::Matrix;
using nhtp::MultilinearOperator;
using nhtp::ProblemInstance;
using nhtp::Vector;

Vector unit(int n, int i, double scale = 1.0) {
    Vector v = Vector::Zero(n);
    v[i] = scale;
    return v;
}

ProblemInstance random_instance(oracle::Random& rng, int m, int n, int s, bool cp) {
    MultilinearOperator A = cp ? MultilinearOperator(CpTensor(m, rng.matrix(n, 3)))
                               : MultilinearOperator(rng.symmetric_tensor(m, n));
    return ProblemInstance(std::move(A), rng.vector(n), s);
}

/// Hessian from oracle contractions: (m-1)(m-2) W(x, r) + (m-1)^2 M M.
Matrix oracle_hessian(const ProblemInstance& P, const Vector& x) {
    const int m = P.order();
    const Matrix M = oracle::contract_matrix(P.op, x);
    Matrix H = (m - 1.0) * (m - 1.0) * M * M;
    if (m >= 3) {
        const Vector r = oracle::contract_vector(P.op, x) - P.b;
        H += (m - 1.0) * (m - 2.0) * oracle::contract_order3(P.op, x, r);
    }
    return H;
}

// Tol by its definition, evaluated from an oracle gradient.
double oracle_tolerance(const Vector& x, const Vector& g, const IndexSet& T, int s, double eta) {
    const int n = static_cast<int>(x.size());
    std::vector<bool> in_T(static_cast<std::size_t>(n), false);
    for (int i : T) in_T[static_cast<std::size_t>(i)] = true;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) sq += in_T[i] ? g[i] * g[i] : x[i] * x[i];
    std::vector<double> mags(x.data(), x.data() + n);
    for (double& v : mags) v = std::abs(v);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    const double thr = mags[static_cast<std::size_t>(s - 1)] / eta;
    double excess = 0.0;
    for (int i = 0; i < n; ++i)
        if (!in_T[i]) excess = std::max(excess, std::abs(g[i]) - thr);
    return std::sqrt(sq) + excess;
}

TEST(ProblemInstance, ValidatesShapes) {
    const MultilinearOperator I = nhtp::identity_tensor(3, 3);
    EXPECT_THROW(ProblemInstance(I, Vector::Ones(2), 1), nhtp::InputError);
    EXPECT_THROW(ProblemInstance(I, Vector::Ones(3), 0), nhtp::InputError);
    EXPECT_THROW(ProblemInstance(I, Vector::Ones(3), 3), nhtp::InputError);
    EXPECT_THROW(ProblemInstance(I, Vector::Ones(3), 1, Vector::Ones(3)), nhtp::InputError);
    EXPECT_THROW(ProblemInstance(I, Vector::Ones(3), 1, std::nullopt, Vector::Ones(4)), nhtp::InputError);
    EXPECT_NO_THROW(ProblemInstance(I, Vector::Ones(3), 2, unit(3, 1)));
}

TEST(ObjectiveValue, FixtureOptimumIsZero) {
    for (int m : {3, 4, 5}) {
        const auto P = nhtp::analytic_example(m, 4);
        EXPECT_NEAR(nhtp::objective_value(P, unit(4, 0)), 0.0, 1e-28) << "m=" << m;
    }
}

TEST(ObjectiveValue, OriginGivesHalfRhsNorm) {
    const auto P = nhtp::analytic_example(4, 3);
    EXPECT_DOUBLE_EQ(nhtp::objective_value(P, Vector::Zero(3)), 0.5 * P.b.squaredNorm());
}

TEST(ObjectiveValue, MatchesBruteForce) {
    oracle::Random rng(2);
    const auto P = random_instance(rng, 3, 4, 1, false);
    const Vector x = rng.vector(4);
    const double expected = oracle::objective(P.op, P.b, x);
    EXPECT_NEAR(nhtp::objective_value(P, x), expected, 1e-12 * std::max(1.0, expected));
}

TEST(Gradient, FixtureOptimumIsZero) {
    const auto P = nhtp::analytic_example(4, 3);
    EXPECT_LE(nhtp::gradient(P, unit(3, 0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gradient, OrderTwoIsMatrixLeastSquares) {
    const Matrix A{{2.0, -1.0, 0.5}, {-1.0, 3.0, 0.0}, {0.5, 0.0, 1.0}};
    const ProblemInstance P(DenseSymmetricTensor(2, 3, {2, -1, 0.5, -1, 3, 0, 0.5, 0, 1}),
                            Vector{{1.0, 2.0, 3.0}}, 1);
    const Vector x{{0.3, -0.7, 1.1}};
    const Vector expected = A * (A * x - P.b);
    EXPECT_LE(oracle::rel_diff(nhtp::gradient(P, x), expected), 1e-14);
}

TEST(Gradient, MatchesFiniteDifferences) {
    oracle::Random rng(9);
    const auto P = random_instance(rng, 4, 5, 2, false);
    const Vector x = rng.vector(5);
    const Vector fd = oracle::fd_gradient(
        [&](const Vector& z) { return oracle::objective(P.op, P.b, z); }, x, 1e-5);
    EXPECT_LE((nhtp::gradient(P, x) - fd).norm() / std::max(1.0, fd.norm()), 1e-6);
}

TEST(HessianBlock, FixtureEvenOrder) {
    for (int n : {3, 10}) {
        const auto P = nhtp::analytic_example(4, n);
        const Matrix H = nhtp::hessian_block(P, unit(n, 0), {0}, {0});
        ASSERT_EQ(H.rows(), 1);
        EXPECT_NEAR(H(0, 0), 36.0, 36.0 * 1e-12);
    }
}

TEST(HessianBlock, FixtureOddOrder) {
    for (int m : {3, 5}) {
        for (int n : {3, 10}) {
            const auto P = nhtp::analytic_example(m, n);
            const double expected = 4.0 * (n - 1) * (m - 1) * (m - 1);
            EXPECT_NEAR(nhtp::hessian_block(P, unit(n, 0), {0}, {0})(0, 0), expected, expected * 1e-12)
                << "m=" << m << " n=" << n;
        }
    }
}

TEST(HessianBlock, MatchesFiniteDifferencesOfGradient) {
    oracle::Random rng(4);
    const auto P = random_instance(rng, 3, 4, 1, false);
    const Vector x = rng.vector(4);
    const Matrix fd = oracle::fd_jacobian([&](const Vector& z) { return nhtp::gradient(P, z); }, x, 1e-5);
    const Matrix H = nhtp::hessian_block(P, x, {0, 1, 2, 3}, {0, 1, 2, 3});
    EXPECT_LE(oracle::rel_diff(H, fd), 1e-5);
    EXPECT_LE(oracle::rel_diff(H, oracle_hessian(P, x)), 1e-12);
}

TEST(HessianBlock, ExtractsRectangularBlock) {
    oracle::Random rng(6);
    const auto P = random_instance(rng, 3, 5, 2, true);
    const Vector x = rng.vector(5);
    const Matrix H = nhtp::hessian(P, x);
    const Matrix B = nhtp::hessian_block(P, x, {1, 4}, {0, 2, 3});
    ASSERT_EQ(B.rows(), 2);
    ASSERT_EQ(B.cols(), 3);
    EXPECT_EQ(B(1, 2), H(4, 3));
    EXPECT_THROW(nhtp::hessian_block(P, x, {5}, {0}), nhtp::InputError);
    EXPECT_THROW(nhtp::hessian_block(P, x, {0}, {-1}), nhtp::InputError);
}

TEST(ToleranceMeasure, FixtureOptimumIsZero) {
    const auto P = nhtp::analytic_example(4, 3);
    for (double eta : {1e-3, 0.1, 10.0}) EXPECT_NEAR(nhtp::tolerance_measure(P, unit(3, 0), {0}, eta), 0.0, 1e-14);
}

TEST(ToleranceMeasure, OriginIsSpuriouslyStationary) {
    const auto P = nhtp::analytic_example(3, 4);
    EXPECT_EQ(nhtp::tolerance_measure(P, Vector::Zero(4), {2}, 0.5), 0.0);
}

TEST(ToleranceMeasure, MatchesDefinition) {
    oracle::Random rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto P = random_instance(rng, 3, 6, 2, trial % 2 == 0);
        Vector x = Vector::Zero(6);
        x[1] = rng.uniform(0.5, 1.0);
        x[4] = rng.uniform(0.5, 1.0);
        x[trial % 6] += 1e-3;
        const Vector g = oracle::fd_gradient([&](const Vector& z) { return oracle::objective(P.op, P.b, z); },
                                             x, 1e-6);
        const IndexSet T{1, 4};
        const double eta = rng.uniform(0.01, 1.0);
        const double expected = oracle_tolerance(x, g, T, 2, eta);
        EXPECT_NEAR(nhtp::tolerance_measure(P, x, T, eta), expected, 1e-6 * std::max(1.0, expected));
    }
}

TEST(ToleranceMeasure, RejectsWrongSupportSize) {
    const auto P = nhtp::analytic_example(4, 3);
    EXPECT_THROW(nhtp::tolerance_measure(P, unit(3, 0), {0, 1}, 0.1), nhtp::InputError);
}

TEST(Stationarity, FixtureOptimumIsFullSparse) {
    const auto P = nhtp::analytic_example(4, 3);
    for (double eta : {1e-3, 0.1, 10.0}) {
        const auto r = nhtp::eta_stationarity_check(P, unit(3, 0), eta);
        EXPECT_TRUE(r.is_stationary);
        EXPECT_EQ(r.sparsity_case, nhtp::SparsityCase::full_sparse);
        EXPECT_EQ(nhtp::to_string(r.sparsity_case), "full-sparse");
        EXPECT_DOUBLE_EQ(r.threshold, 1.0 / eta);
    }
}

TEST(Stationarity, OriginIsStrictSparseStationary) {
    const auto P = nhtp::analytic_example(3, 4);
    const auto r = nhtp::eta_stationarity_check(P, Vector::Zero(4), 0.1);
    EXPECT_TRUE(r.is_stationary);
    EXPECT_EQ(nhtp::to_string(r.sparsity_case), "strict-sparse");
}

TEST(Stationarity, PerturbedOptimumIsNot) {
    const auto P = nhtp::analytic_example(4, 3);
    const auto r = nhtp::eta_stationarity_check(P, unit(3, 0, 1.1), 0.1);
    EXPECT_FALSE(r.is_stationary);
    EXPECT_GT(r.max_support_gradient, 1.0);
}

TEST(Stationarity, RejectsDenseX) {
    const auto P = nhtp::analytic_example(4, 3);
    EXPECT_THROW(nhtp::eta_stationarity_check(P, Vector::Ones(3), 0.1), nhtp::InputError);
}

// Stationary iff Tol <= 1e-10 for every admissible T containing supp(x).
TEST(Stationarity, AgreesWithToleranceMeasure) {
    oracle::Random rng(41);
    std::vector<std::pair<ProblemInstance, Vector>> cases;
    for (int m : {3, 4}) {
        auto P = nhtp::analytic_example(m, 5);
        cases.emplace_back(P, unit(5, 0));
        cases.emplace_back(P, unit(5, 0, 1.01));
        cases.emplace_back(P, Vector::Zero(5));
    }
    for (int t = 0; t < 6; ++t) {
        auto P = random_instance(rng, 3, 5, 2, true);
        Vector x = Vector::Zero(5);
        x[t % 5] = rng.uniform(-1.0, 1.0);
        cases.emplace_back(P, x);
    }
    for (const auto& [P, x] : cases) {
        for (double eta : {1e-3, 0.05, 1.0}) {
            const bool stationary = nhtp::eta_stationarity_check(P, x, eta).is_stationary;
            const Vector g = nhtp::gradient(P, x);
            const Vector u = (x - eta * g).cwiseAbs();
            const IndexSet supp = nhtp::support(x);
            int admissible = 0;
            for (const auto& T : oracle::subsets(P.dim(), P.s)) {
                if (!std::includes(T.begin(), T.end(), supp.begin(), supp.end())) continue;
                double min_in = std::numeric_limits<double>::infinity(), max_out = 0.0;
                for (int i = 0; i < P.dim(); ++i) {
                    const bool in = std::find(T.begin(), T.end(), i) != T.end();
                    if (in) min_in = std::min(min_in, u[i]);
                    else max_out = std::max(max_out, u[i]);
                }
                if (min_in < max_out) continue;
                ++admissible;
                EXPECT_EQ(stationary, nhtp::tolerance_measure(P, x, T, eta) <= 1e-10);
            }
            if (stationary) EXPECT_GT(admissible, 0);
        }
    }
}

TEST(LipschitzConstant, HandSubstitutedValues) {
    EXPECT_EQ(nhtp::lipschitz_constant(3, 1.0, 1.0, 1.0), 12.0);
    EXPECT_EQ(nhtp::lipschitz_constant(2, 3.0, 5.0, 7.0), 0.0);
    EXPECT_EQ(nhtp::lipschitz_constant(4, 2.0, 1.0, 1.0), 264.0);
}

TEST(LipschitzConstant, InstanceOverloadUsesRadius) {
    const auto P = nhtp::analytic_example(4, 3);
    const double frob = oracle::frobenius(P.op);
    const double radius = 1.0 + 0.25;
    const double expected = 2.0 * 3 * 2 * 5 * frob * frob * std::pow(radius, 3) +
                            3.0 * 2 * 1 * P.b.norm() * frob * frob;
    EXPECT_NEAR(nhtp::lipschitz_constant(P, unit(3, 0), 0.25), expected, 1e-12 * expected);
}

TEST(SmoothnessConstant, HandSubstitutedValues) {
    EXPECT_EQ(nhtp::smoothness_constant(3, 1.0, 1.0, 1.0), 8.0);
    EXPECT_EQ(nhtp::smoothness_constant(2, 3.0, 5.0, 7.0), 9.0);
    EXPECT_EQ(nhtp::smoothness_constant(4, 1.0, 1.0, 2.0), 252.0);
}

TEST(SmoothnessConstant, InstanceOverloadUsesRadius) {
    const auto P = nhtp::analytic_example(3, 4);
    const double frob = oracle::frobenius(P.op);
    const double radius = 1.0 + 0.5;
    const double expected = 2.0 * 3 * frob * frob * radius * radius + 2.0 * 1 * P.b.norm() * frob;
    EXPECT_NEAR(nhtp::smoothness_constant(P, unit(4, 0), 0.5), expected, 1e-12 * expected);
}

TEST(Assumption1, FixtureEvenOrder) {
    for (int m : {4, 6}) {
        const auto P = nhtp::analytic_example(m, 3);
        const auto r = nhtp::verify_assumption1(P, unit(3, 0), 1);
        const double expected = 4.0 * (m - 1) * (m - 1);
        EXPECT_NEAR(r.min_eigenvalue, expected, 1e-10 * expected);
        EXPECT_TRUE(r.holds());
        EXPECT_EQ(r.subsets_checked, 3u);  // {1}, {1,2}, {1,3}
    }
}

TEST(Assumption1, IdentityMatrixCase) {
    const ProblemInstance P(nhtp::identity_tensor(2, 4), Vector::Ones(4), 1);
    const auto r = nhtp::verify_assumption1(P, unit(4, 2, 0.3), 1);
    EXPECT_NEAR(r.min_eigenvalue, 1.0, 1e-14);
}

TEST(Assumption1, MatchesExhaustiveOracle) {
    oracle::Random rng(8);
    const Matrix U = rng.matrix(6, 6, 0.0, 1.0);
    Vector x_star = Vector::Zero(6);
    x_star[1] = 0.6;
    x_star[4] = 0.3;
    const CpTensor cp(3, U);
    const ProblemInstance P(cp, oracle::contract_vector(cp, x_star), 2, x_star);
    const auto r = nhtp::verify_assumption1(P, x_star, 2);

    const Matrix H = oracle_hessian(P, x_star);
    double best = std::numeric_limits<double>::infinity();
    std::size_t count = 0;
    for (int size = 2; size <= 4; ++size) {
        for (const auto& T : oracle::subsets(6, size)) {
            if (std::find(T.begin(), T.end(), 1) == T.end() || std::find(T.begin(), T.end(), 4) == T.end())
                continue;
            ++count;
            best = std::min(best, oracle::jacobi_eigenvalues(H(T, T)).front());
        }
    }
    EXPECT_EQ(r.subsets_checked, count);
    EXPECT_NEAR(r.min_eigenvalue, best, 1e-9 * std::max(1.0, std::abs(best)));
    const auto witness_eig = oracle::jacobi_eigenvalues(H(r.witness_support, r.witness_support));
    EXPECT_NEAR(witness_eig.front(), best, 1e-9 * std::max(1.0, std::abs(best)));
}

TEST(Assumption1, EnumerationGuard) {
    const ProblemInstance P(nhtp::identity_tensor(2, 40), Vector::Ones(40), 10);
    EXPECT_THROW(nhtp::verify_assumption1(P, unit(40, 0), 10, 1000), nhtp::ResourceError);
}

TEST(RecommendedParameters, HandSubstitutedValues) {
    const auto p = nhtp::recommended_parameters(1.0, 0.25, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(p.alpha_bar, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(p.eta_bar, 0.25);
}

TEST(RecommendedParameters, AlphaCapsAtOne) {
    EXPECT_EQ(nhtp::recommended_parameters(0.5, 1e-300, 0.5, 0.5).alpha_bar, 1.0);
}

TEST(RecommendedParameters, PaperDefaultsAgainstDirectEvaluation) {
    const double gamma = 1e-4, sigma = 5e-5, beta = 0.5, M = 8.0;
    const double alpha = std::min((1 - 2 * sigma) / (M / gamma - sigma), 1.0);
    const double eta = std::min({gamma * alpha * beta / (M * M), alpha * beta, 1 / (4 * M)});
    const auto p = nhtp::recommended_parameters(gamma, sigma, beta, M);
    EXPECT_DOUBLE_EQ(p.alpha_bar, alpha);
    EXPECT_DOUBLE_EQ(p.eta_bar, eta);
}

TEST(RecommendedParameters, RejectsInadmissibleInputs) {
    EXPECT_THROW(nhtp::recommended_parameters(2.0, 0.25, 0.5, 4.0), nhtp::ConfigError);
    EXPECT_THROW(nhtp::recommended_parameters(1.0, 0.25, 0.5, 0.4), nhtp::ConfigError);
    EXPECT_THROW(nhtp::recommended_parameters(1.0, 0.5, 0.5, 1.0), nhtp::ConfigError);
    EXPECT_THROW(nhtp::recommended_parameters(1.0, 0.25, 1.0, 1.0), nhtp::ConfigError);
    EXPECT_THROW(nhtp::recommended_parameters(0.0, 0.25, 0.5, 1.0), nhtp::ConfigError);
}

// Property: derivatives agree with finite differences on a random corpus.
TEST(ObjectiveProperties, DerivativesMatchFiniteDifferences) {
    oracle::Random rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + trial % 3;
        const int n = rng.integer(2, 8);
        const auto P = random_instance(rng, m, n, 1, trial % 2 == 0);
        const Vector x = rng.vector(n);
        const Vector g = nhtp::gradient(P, x);
        const Vector fd_g = oracle::fd_gradient(
            [&](const Vector& z) { return nhtp::objective_value(P, z); }, x, 1e-5);
        EXPECT_LE((g - fd_g).norm() / std::max(1.0, fd_g.norm()), 1e-6) << "trial " << trial;
        const Matrix H = nhtp::hessian(P, x);
        const Matrix fd_h = oracle::fd_jacobian([&](const Vector& z) { return nhtp::gradient(P, z); }, x, 1e-5);
        EXPECT_LE(oracle::rel_diff(H, fd_h), 1e-5) << "trial " << trial;
        EXPECT_LE((H - H.transpose()).norm(), 1e-10 * std::max(1.0, H.norm()));
    }
}

TEST(ObjectiveProperties, CheckDerivativesReportsSmallErrors) {
    oracle::Random rng(78);
    const auto P = random_instance(rng, 4, 5, 2, true);
    const auto c = nhtp::check_derivatives(P, rng.vector(5));
    EXPECT_LE(c.gradient_rel_error, 1e-6);
    EXPECT_LE(c.hessian_rel_error, 1e-5);
}

TEST(ObjectiveProperties, EvaluateIsConsistent) {
    oracle::Random rng(79);
    const auto P = random_instance(rng, 3, 6, 2, false);
    const Vector x = rng.vector(6);
    const auto ev = nhtp::evaluate(P, x);
    EXPECT_DOUBLE_EQ(ev.f, nhtp::objective_value(P, x));
    EXPECT_LE(oracle::rel_diff(ev.gradient, nhtp::gradient(P, x)), 1e-15);
    EXPECT_LE(oracle::rel_diff(ev.residual, Vector(oracle::contract_vector(P.op, x) - P.b)), 1e-12);
}

// Empirical bounds: sampled restricted-Hessian quantities stay below L_f and M_2s.
TEST(ObjectiveProperties, ConstantsBoundSampledQuantities) {
    oracle::Random rng(80);
    const auto P = nhtp::analytic_example(4, 5);
    const Vector x_star = unit(5, 0);
    const double delta = 0.2;
    const double lf = nhtp::lipschitz_constant(P, x_star, delta);
    const double m2s = nhtp::smoothness_constant(P, x_star, delta);
    for (int k = 0; k < 200; ++k) {
        // Common support of size s = 1 containing supp(x*).
        const double a = 1.0 + rng.uniform(-delta, delta);
        const double c = 1.0 + rng.uniform(-delta, delta);
        const Vector x = unit(5, 0, a), y = unit(5, 0, c);
        const double lhs = std::abs(nhtp::hessian_block(P, x, {0}, {0})(0, 0) -
                                    nhtp::hessian_block(P, y, {0}, {0})(0, 0));
        EXPECT_LE(lhs, lf * std::abs(a - c) + 1e-12);
        // Any |T| <= 2s at a point in the radius ball.
        const int j = rng.integer(1, 4);
        Vector z = Vector::Zero(5);
        z[0] = rng.uniform(-1.0, 1.0);
        z[j] = rng.uniform(-1.0, 1.0);
        z *= rng.uniform(0.0, 1.0 + delta) / z.norm();
        const auto eig = oracle::jacobi_eigenvalues(nhtp::hessian_block(P, z, {0, j}, {0, j}));
        EXPECT_LE(std::max(std::abs(eig.front()), std::abs(eig.back())), m2s);
    }
}

}  // namespace
