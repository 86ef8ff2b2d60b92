#include "nhtp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "nhtp/errors.hpp"
#include "nhtp/io.hpp"
#include "nhtp/random.hpp"

namespace nhtp {

namespace {

constexpr const char* kCsvHeader =
    "m,n,s,solver,trials,mean_nnz,mean_re,mean_time_s,mean_iter,success_rate";

TrialResult run_one(const ProblemInstance& P, SolverKind solver, const BenchOptions& options) {
    TrialResult r;
    r.solver = solver;
    const Vector& x0 = *P.x0;
    SolveReport report;
    if (solver == SolverKind::nhtp) {
        report = solve(P, x0, options.nhtp);
    } else {
        const double step = options.iht_step ? *options.iht_step : iht_default_step(P, x0);
        report = iht_solve(P, x0, step, options.iht_tol, options.iht_max_iter);
    }
    r.relative_error = relative_error(report.x_final, *P.x_star);
    r.wall_time = report.wall_time;
    r.iterations = report.iterations;
    r.nnz = nnz_measure(report.x_final);
    r.status = to_string(report.status);
    return r;
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw InputError("not a number: '" + text + "'");
    return value;
}

json row_to_json(const SummaryRow& r) {
    return json{{"m", r.m},
                {"n", r.n},
                {"s", r.s},
                {"solver", r.solver},
                {"trials", r.trials},
                {"mean_nnz", r.mean_nnz},
                {"mean_re", r.mean_re},
                {"mean_time_s", r.mean_time_s},
                {"mean_iter", r.mean_iter},
                {"success_rate", r.success_rate}};
}

}  // namespace

std::string to_string(SolverKind kind) { return kind == SolverKind::nhtp ? "nhtp" : "iht"; }

std::optional<SolverKind> parse_solver_kind(const std::string& text) {
    if (text == "nhtp") return SolverKind::nhtp;
    if (text == "iht") return SolverKind::iht;
    return std::nullopt;
}

int nnz_measure(const Vector& x) {
    const double total = x.cwiseAbs().sum();
    if (total == 0.0) return 0;
    std::vector<double> mags(x.data(), x.data() + x.size());
    for (double& v : mags) v = std::abs(v);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    const double target = 0.999 * total;
    double acc = 0.0;
    for (std::size_t t = 0; t < mags.size(); ++t) {
        acc += mags[t];
        if (acc >= target) return static_cast<int>(t + 1);
    }
    return static_cast<int>(mags.size());
}

double relative_error(const Vector& x_hat, const Vector& x_star) {
    if (x_hat.size() != x_star.size()) throw InputError("relative_error: length mismatch");
    return (x_hat - x_star).norm() / std::max(1e-30, x_star.norm());
}

SummaryRow summarize(int m, int n, int s, SolverKind solver, std::span<const TrialResult> records,
                     double success_threshold) {
    SummaryRow row;
    row.m = m;
    row.n = n;
    row.s = s;
    row.solver = to_string(solver);
    double nnz = 0, re = 0, time = 0, iter = 0, ok = 0;
    for (const auto& r : records) {
        if (r.solver != solver) continue;
        ++row.trials;
        nnz += r.nnz;
        re += r.relative_error;
        time += r.wall_time;
        iter += r.iterations;
        if (r.relative_error <= success_threshold) ok += 1;
    }
    if (row.trials > 0) {
        row.mean_nnz = nnz / row.trials;
        row.mean_re = re / row.trials;
        row.mean_time_s = time / row.trials;
        row.mean_iter = iter / row.trials;
        row.success_rate = ok / row.trials;
    }
    return row;
}

TrialSummary run_trials(const GeneratorSpec& spec, const BenchOptions& options) {
    if (options.trials < 1) throw InputError("run_trials: trials must be >= 1");
    if (options.solvers.empty()) throw InputError("run_trials: no solvers requested");
    spec.validate();
    options.nhtp.validate();

    TrialSummary summary;
    summary.m = spec.order;
    summary.n = spec.dim;
    summary.s = spec.kind == GeneratorKind::analytic ? 1 : spec.sparsity;
    summary.trial_count = options.trials;

    const auto nsolvers = options.solvers.size();
    std::vector<TrialResult> records(static_cast<std::size_t>(options.trials) * nsolvers);
    const auto trials = static_cast<std::int64_t>(options.trials);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < trials; ++t) {
        GeneratorSpec trial_spec = spec;
        trial_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));
        const std::size_t base = static_cast<std::size_t>(t) * nsolvers;
        std::optional<ProblemInstance> P;
        std::string failure;
        try {
            P.emplace(generate(trial_spec));
        } catch (const std::exception& e) {
            failure = e.what();
        }
        for (std::size_t k = 0; k < nsolvers; ++k) {
            TrialResult& r = records[base + k];
            try {
                if (!P) throw std::runtime_error(failure);
                r = run_one(*P, options.solvers[k], options);
            } catch (const std::exception& e) {
                r = TrialResult{};
                r.solver = options.solvers[k];
                r.relative_error = std::numeric_limits<double>::infinity();
                r.status = std::string("error: ") + e.what();
            }
            r.seed = trial_spec.seed;
        }
    }

    for (SolverKind solver : options.solvers)
        summary.rows.push_back(summarize(summary.m, summary.n, summary.s, solver, records,
                                         options.success_threshold));
    summary.records = std::move(records);
    return summary;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void emit_results(std::span<const SummaryRow> rows, ResultFormat format, std::ostream& out) {
    if (format == ResultFormat::json) {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(row_to_json(r));
        out << arr.dump(2) << '\n';
        return;
    }
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.m << ',' << r.n << ',' << r.s << ',' << r.solver << ',' << r.trials << ','
            << format_number(r.mean_nnz) << ',' << format_number(r.mean_re) << ','
            << format_number(r.mean_time_s) << ',' << format_number(r.mean_iter) << ','
            << format_number(r.success_rate) << '\n';
    }
}

void emit_results(std::span<const SummaryRow> rows, ResultFormat format,
                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    emit_results(rows, format, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<SummaryRow> parse_results(std::istream& in, ResultFormat format) {
    std::vector<SummaryRow> rows;
    if (format == ResultFormat::json) {
        const json arr = json::parse(in);
        for (const auto& j : arr) {
            SummaryRow r;
            r.m = j.at("m").get<int>();
            r.n = j.at("n").get<int>();
            r.s = j.at("s").get<int>();
            r.solver = j.at("solver").get<std::string>();
            r.trials = j.at("trials").get<int>();
            r.mean_nnz = j.at("mean_nnz").get<double>();
            r.mean_re = j.at("mean_re").get<double>();
            r.mean_time_s = j.at("mean_time_s").get<double>();
            r.mean_iter = j.at("mean_iter").get<double>();
            r.success_rate = j.at("success_rate").get<double>();
            rows.push_back(std::move(r));
        }
        return rows;
    }
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw InputError("unexpected CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 10) throw InputError("CSV row must have 10 columns: " + line);
        SummaryRow r;
        r.m = std::stoi(cells[0]);
        r.n = std::stoi(cells[1]);
        r.s = std::stoi(cells[2]);
        r.solver = cells[3];
        r.trials = std::stoi(cells[4]);
        r.mean_nnz = parse_double(cells[5]);
        r.mean_re = parse_double(cells[6]);
        r.mean_time_s = parse_double(cells[7]);
        r.mean_iter = parse_double(cells[8]);
        r.success_rate = parse_double(cells[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace nhtp
