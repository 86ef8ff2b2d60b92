#include "nhtp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "nhtp/errors.hpp"

namespace nhtp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Indices of the s largest |values|; ties go to the smaller index. Ascending.
IndexSet top_magnitudes(const Vector& values, int s) {
    const int n = static_cast<int>(values.size());
    if (s < 1 || s > n)
        throw InputError("sparsity level " + std::to_string(s) + " outside [1, " +
                         std::to_string(n) + "]");
    IndexSet idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto before = [&](int a, int b) {
        const double ma = std::abs(values[a]);
        const double mb = std::abs(values[b]);
        return ma > mb || (ma == mb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + s, idx.end(), before);
    idx.resize(static_cast<std::size_t>(s));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

std::string to_string(DirectionKind kind) {
    switch (kind) {
        case DirectionKind::newton: return "newton";
        case DirectionKind::gradient: return "gradient";
        case DirectionKind::none: break;
    }
    return "none";
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max-iters";
        case SolveStatus::linesearch_failed: return "linesearch-failed";
        case SolveStatus::degenerate_start: return "degenerate-start";
    }
    return "unknown";
}

std::optional<SolveStatus> parse_status(const std::string& text) {
    for (auto s : {SolveStatus::converged, SolveStatus::max_iters, SolveStatus::linesearch_failed,
                   SolveStatus::degenerate_start})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

void NhtpConfig::validate() const {
    if (eta && !(*eta > 0.0)) throw ConfigError("eta must be positive");
    if (!(sigma > 0.0 && sigma < 0.5)) throw ConfigError("sigma must lie in (0, 1/2)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
    if (!(gamma_small > 0.0) || !(gamma_normal > 0.0)) throw ConfigError("gamma must be positive");
    if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
    if (max_iter < 0) throw ConfigError("max_iter must be non-negative");
    if (max_backtracks < 0) throw ConfigError("max_backtracks must be non-negative");
    if (!(max_condition >= 1.0)) throw ConfigError("max_condition must be >= 1");
}

Vector hard_threshold(const Vector& x, int s) {
    Vector out = Vector::Zero(x.size());
    for (int i : top_magnitudes(x, s)) out[i] = x[i];
    return out;
}

IndexSet select_support(const Vector& x, const Vector& g, double eta, int s) {
    if (x.size() != g.size()) throw InputError("select_support: x and g lengths differ");
    return top_magnitudes(x - eta * g, s);
}

double gamma_rule(const Vector& x, const IndexSet& T, const NhtpConfig& config) {
    if (config.gamma_mode == GammaMode::constant_normal) return config.gamma_normal;
    const bool zero = std::all_of(T.begin(), T.end(), [&](int i) { return x[i] == 0.0; });
    return zero ? config.gamma_small : config.gamma_normal;
}

double default_eta(const ProblemInstance& P, const Vector& x0) {
    if (x0.size() != P.dim()) throw InputError("default_eta: x0 length does not match dimension");
    if (count_nonzeros(x0) == 0) throw DegenerateStartError("default_eta: x0 is the zero vector");
    const IndexSet T = support(hard_threshold(x0, P.s));
    const Vector g = gradient(P, x0);
    double min_on = std::numeric_limits<double>::infinity();
    for (int i : T) min_on = std::min(min_on, std::abs(x0[i]));
    double max_off = 0.0;
    for (int j : complement(T, P.dim())) max_off = std::max(max_off, std::abs(g[j]));
    return min_on / (10.0 * (1.0 + max_off));
}

Direction newton_direction(const ProblemInstance& P, const Vector& x, const Evaluation& at_x,
                           const IndexSet& T, const NhtpConfig& config) {
    if (static_cast<int>(T.size()) != P.s)
        throw InputError("newton_direction: |T| = " + std::to_string(T.size()) +
                         " but s = " + std::to_string(P.s));
    if (!config.eta) throw ConfigError("newton_direction: eta must be resolved before use");
    const double eta = *config.eta;
    const IndexSet Tc = complement(T, P.dim());
    const Vector& g = at_x.gradient;

    Direction dir;
    dir.d = Vector::Zero(P.dim());
    dir.d(Tc) = -x(Tc);

    const Matrix H = hessian(P, x, at_x);
    const Matrix H_TT = H(T, T);
    const Vector rhs = H(T, Tc) * x(Tc) - g(T);
    Eigen::LDLT<Matrix> ldlt(H_TT);
    bool usable = ldlt.info() == Eigen::Success && ldlt.rcond() * config.max_condition >= 1.0;
    if (usable) {
        const Vector d_T = ldlt.solve(rhs);
        usable = d_T.allFinite();
        if (usable) {
            dir.d(T) = d_T;
            const double gamma = gamma_rule(x, T, config);
            usable = g.dot(dir.d) <= -gamma * dir.d.squaredNorm() + x(Tc).squaredNorm() / (4 * eta);
        }
    }
    if (usable) {
        dir.kind = DirectionKind::newton;
    } else {
        dir.d(T) = -g(T);
        dir.kind = DirectionKind::gradient;
    }
    return dir;
}

Direction newton_direction(const ProblemInstance& P, const Vector& x, const IndexSet& T,
                           const NhtpConfig& config) {
    return newton_direction(P, x, evaluate(P, x), T, config);
}

LineSearchResult armijo_search(const ProblemInstance& P, const Vector& x, const Evaluation& at_x,
                               const Vector& d, const IndexSet& T, const NhtpConfig& config) {
    const double slope = at_x.gradient.dot(d);
    LineSearchResult out;
    Vector trial = Vector::Zero(P.dim());
    double alpha = 1.0;
    for (int l = 0; l <= config.max_backtracks; ++l, alpha *= config.beta) {
        trial(T) = x(T) + alpha * d(T);
        const double f_trial = objective_value(P, trial);
        if (f_trial <= at_x.f + config.sigma * alpha * slope) {
            out.accepted = true;
            out.alpha = alpha;
            out.x_next = trial;
            out.f_next = f_trial;
            return out;
        }
    }
    return out;
}

LineSearchResult armijo_search(const ProblemInstance& P, const Vector& x, const Vector& d,
                               const IndexSet& T, const NhtpConfig& config) {
    if (d.size() != P.dim()) throw InputError("armijo_search: direction length mismatch");
    return armijo_search(P, x, evaluate(P, x), d, T, config);
}

SolveReport solve(const ProblemInstance& P, const Vector& x0, const NhtpConfig& config) {
    const auto start = Clock::now();
    config.validate();
    if (x0.size() != P.dim()) throw InputError("solve: x0 length does not match dimension");

    SolveReport report;
    report.solver = "nhtp";
    const bool zero_start = count_nonzeros(x0) == 0;
    if (zero_start && ((P.order() >= 3 && P.b.norm() > 0.0) || !config.eta)) {
        report.x_final = x0;
        report.status = SolveStatus::degenerate_start;
        report.wall_time = seconds_since(start);
        return report;
    }

    NhtpConfig cfg = config;
    if (!cfg.eta) cfg.eta = default_eta(P, x0);
    const double eta = *cfg.eta;
    report.eta = eta;

    Vector x = hard_threshold(x0, P.s);
    for (int k = 0;; ++k) {
        const Evaluation ev = evaluate(P, x);
        const IndexSet T = select_support(x, ev.gradient, eta, P.s);
        IterationRecord record;
        record.f = ev.f;
        record.tol = tolerance_measure(P, x, ev.gradient, T, eta);
        if (cfg.record_iterates) record.x = x;

        if (record.tol <= cfg.tol) {
            report.status = SolveStatus::converged;
            report.history.push_back(std::move(record));
            break;
        }
        if (k >= cfg.max_iter) {
            report.status = SolveStatus::max_iters;
            report.history.push_back(std::move(record));
            break;
        }
        const Direction dir = newton_direction(P, x, ev, T, cfg);
        record.kind = dir.kind;
        LineSearchResult ls = armijo_search(P, x, ev, dir.d, T, cfg);
        if (!ls.accepted) {
            report.status = SolveStatus::linesearch_failed;
            report.history.push_back(std::move(record));
            break;
        }
        record.step = ls.alpha;
        report.history.push_back(std::move(record));
        x = std::move(ls.x_next);
        ++report.iterations;
    }
    report.x_final = x;
    report.support = support(x);
    report.wall_time = seconds_since(start);
    return report;
}

SolveReport iht_solve(const ProblemInstance& P, const Vector& x0, double step, double tol,
                      int max_iter) {
    const auto start = Clock::now();
    if (!(step > 0.0)) throw ConfigError("iht_solve: step must be positive");
    if (x0.size() != P.dim()) throw InputError("iht_solve: x0 length does not match dimension");

    SolveReport report;
    report.solver = "iht";
    report.eta = step;
    report.status = SolveStatus::max_iters;
    Vector x = hard_threshold(x0, P.s);
    for (int k = 0; k < max_iter; ++k) {
        const Evaluation ev = evaluate(P, x);
        const Vector moved = x - step * ev.gradient;
        if (!moved.allFinite()) break;
        Vector next = hard_threshold(moved, P.s);
        const double change = (next - x).norm();
        report.history.push_back({ev.f, change, step, DirectionKind::gradient, Vector()});
        x = std::move(next);
        ++report.iterations;
        if (change <= tol) {
            report.status = SolveStatus::converged;
            break;
        }
    }
    report.x_final = x;
    report.support = support(x);
    report.wall_time = seconds_since(start);
    return report;
}

double iht_default_step(const ProblemInstance& P, const Vector& x0) {
    const Matrix H = hessian(P, x0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
    const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
    return spectral > 0.0 ? 1.0 / spectral : 1.0;
}

}  // namespace nhtp
