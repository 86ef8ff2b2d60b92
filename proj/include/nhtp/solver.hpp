#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhtp/objective.hpp"

namespace nhtp {

enum class DirectionKind { newton, gradient, none };
enum class SolveStatus { converged, max_iters, linesearch_failed, degenerate_start };

/// How gamma_k is chosen. `restricted_subvector` reads the rule's "x_{T_i}^k = 0"
/// as "x^k restricted to the current support T_k is zero".
enum class GammaMode { restricted_subvector, constant_normal };

std::string to_string(DirectionKind kind);
std::string to_string(SolveStatus status);
std::optional<SolveStatus> parse_status(const std::string& text);

struct NhtpConfig {
    std::optional<double> eta;  // nullopt: computed by default_eta()
    double sigma = 5e-5;
    double beta = 0.5;
    double gamma_small = 1e-10;
    double gamma_normal = 1e-4;
    double tol = 1e-7;
    int max_iter = 2000;
    int max_backtracks = 40;
    GammaMode gamma_mode = GammaMode::restricted_subvector;
    /// Newton systems whose condition estimate exceeds this fall back to the gradient.
    double max_condition = 1e12;
    /// Keep a copy of every iterate in the history (for convergence studies).
    bool record_iterates = false;

    /// Throws ConfigError when a parameter is outside its admissible range.
    void validate() const;
};

struct IterationRecord {
    double f = 0.0;
    double tol = 0.0;
    double step = 0.0;  // step length used to leave this iterate; 0 for the last one
    DirectionKind kind = DirectionKind::none;
    Vector x;           // empty unless NhtpConfig::record_iterates
};

struct SolveReport {
    std::string solver;
    Vector x_final;
    IndexSet support;
    SolveStatus status = SolveStatus::max_iters;
    int iterations = 0;
    double eta = 0.0;
    std::vector<IterationRecord> history;
    double wall_time = 0.0;  // seconds
};

/// Keeps the s largest-magnitude entries; ties go to the smaller index.
Vector hard_threshold(const Vector& x, int s);

/// Indices of the s largest |x_i - eta g_i|, ties to the smaller index; ascending.
IndexSet select_support(const Vector& x, const Vector& g, double eta, int s);

double gamma_rule(const Vector& x, const IndexSet& T, const NhtpConfig& config);

/// min_{i in T} |x0_i| / (10 (1 + max_{j in T^c} |grad_j f(x0)|)), T = supp(P_s(x0)).
double default_eta(const ProblemInstance& P, const Vector& x0);

struct Direction {
    Vector d;
    DirectionKind kind = DirectionKind::newton;
};

/// Restricted Newton direction on T, or the safeguarded gradient direction
/// (d_T = -grad_T f, d_{T^c} = -x_{T^c}) when the s x s system is singular,
/// ill-conditioned, or the Newton step fails the descent test. config.eta must be set.
Direction newton_direction(const ProblemInstance& P, const Vector& x, const IndexSet& T,
                           const NhtpConfig& config);
Direction newton_direction(const ProblemInstance& P, const Vector& x, const Evaluation& at_x,
                           const IndexSet& T, const NhtpConfig& config);

struct LineSearchResult {
    bool accepted = false;
    double alpha = 0.0;
    Vector x_next;
    double f_next = 0.0;
};

/// Armijo backtracking over alpha = beta^l, l = 0..max_backtracks, on the
/// trial point [x_T + alpha d_T; 0].
LineSearchResult armijo_search(const ProblemInstance& P, const Vector& x, const Vector& d,
                               const IndexSet& T, const NhtpConfig& config);
LineSearchResult armijo_search(const ProblemInstance& P, const Vector& x, const Evaluation& at_x,
                               const Vector& d, const IndexSet& T, const NhtpConfig& config);

/// Newton hard-thresholding pursuit from x0 (projected to s-sparsity first).
SolveReport solve(const ProblemInstance& P, const Vector& x0, const NhtpConfig& config = {});

/// Iterative hard thresholding baseline: x <- P_s(x - step grad f(x)).
/// Stops when ||x_{k+1} - x_k|| <= tol; a non-finite iterate ends the run
/// with status max_iters. History `tol` holds ||x_{k+1} - x_k||.
SolveReport iht_solve(const ProblemInstance& P, const Vector& x0, double step, double tol = 1e-7,
                      int max_iter = 2000);

/// 1 / ||Hessian(x0)||_2, the IHT step used by the benchmark harness.
double iht_default_step(const ProblemInstance& P, const Vector& x0);

}  // namespace nhtp
