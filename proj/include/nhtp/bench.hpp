#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhtp/problem_gen.hpp"
#include "nhtp/solver.hpp"

namespace nhtp {

enum class SolverKind { nhtp, iht };

std::string to_string(SolverKind kind);
std::optional<SolverKind> parse_solver_kind(const std::string& text);

struct TrialResult {
    std::uint64_t seed = 0;
    SolverKind solver = SolverKind::nhtp;
    double relative_error = 0.0;
    double wall_time = 0.0;
    int iterations = 0;
    int nnz = 0;
    std::string status;  // solve status, or "error: <message>" when the trial threw
};

/// One output row: the means for one solver over one (m, n, s) cell.
struct SummaryRow {
    int m = 0;
    int n = 0;
    int s = 0;
    std::string solver;
    int trials = 0;
    double mean_nnz = 0.0;
    double mean_re = 0.0;
    double mean_time_s = 0.0;
    double mean_iter = 0.0;
    double success_rate = 0.0;

    bool operator==(const SummaryRow&) const = default;
};

struct TrialSummary {
    int m = 0;
    int n = 0;
    int s = 0;
    int trial_count = 0;
    std::vector<SummaryRow> rows;       // one per solver, in request order
    std::vector<TrialResult> records;   // trial-major, solver-minor
};

struct BenchOptions {
    int trials = 50;
    std::vector<SolverKind> solvers{SolverKind::nhtp};
    NhtpConfig nhtp;
    std::optional<double> iht_step;  // default: iht_default_step at x0
    double iht_tol = 1e-7;
    int iht_max_iter = 2000;
    double success_threshold = 1e-4;  // a trial succeeds when Re <= threshold
};

/// min{t : sum of the t largest |x_i| >= 0.999 ||x||_1}; 0 for the zero vector.
int nnz_measure(const Vector& x);

/// ||x_hat - x_star|| / max(1e-30, ||x_star||).
double relative_error(const Vector& x_hat, const Vector& x_star);

/// Trial t solves generate(spec with seed derive_seed(spec.seed, t)). Trials
/// run in parallel; the summary is independent of scheduling.
TrialSummary run_trials(const GeneratorSpec& spec, const BenchOptions& options);

/// Means over the given records for one solver.
SummaryRow summarize(int m, int n, int s, SolverKind solver,
                     std::span<const TrialResult> records, double success_threshold);

enum class ResultFormat { csv, json };

void emit_results(std::span<const SummaryRow> rows, ResultFormat format, std::ostream& out);
void emit_results(std::span<const SummaryRow> rows, ResultFormat format,
                  const std::filesystem::path& path);

std::vector<SummaryRow> parse_results(std::istream& in, ResultFormat format);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace nhtp
