// nhtp: generate problem instances, solve them, run seeded benchmarks and
// check derivative/regularity diagnostics.
//
// Exit codes: 0 success, 1 solver did not converge, 2 invalid input.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nhtp/bench.hpp"
#include "nhtp/errors.hpp"
#include "nhtp/io.hpp"
#include "nhtp/problem_gen.hpp"
#include "nhtp/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInvalid = 2;

std::optional<double> parse_auto_or_number(const std::string& text, const char* flag) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw nhtp::InputError(std::string(flag) + " expects 'auto' or a number, got '" + text + "'");
    }
}

nhtp::GeneratorKind require_kind(const std::string& text) {
    auto kind = nhtp::parse_generator_kind(text);
    if (!kind) throw nhtp::InputError("unknown --kind '" + text + "' (cp, mtensor, analytic)");
    return *kind;
}

void write_json(const nhtp::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

struct GenerateArgs {
    std::string kind = "cp";
    int order = 3;
    int dim = 10;
    int sparsity = 1;
    std::uint64_t seed = 0;
    double noise = 0.1;
    std::string out;
};

int run_generate(const GenerateArgs& a) {
    nhtp::GeneratorSpec spec;
    spec.kind = require_kind(a.kind);
    spec.order = a.order;
    spec.dim = a.dim;
    spec.sparsity = a.sparsity;
    spec.seed = a.seed;
    spec.noise_scale = a.noise;
    const nhtp::ProblemInstance P = nhtp::generate(spec);
    if (a.out.empty() || a.out == "-")
        std::cout << nhtp::instance_to_json(P).dump(1) << '\n';
    else
        nhtp::save_instance(P, a.out);
    return kExitOk;
}

struct SolveArgs {
    std::string instance;
    std::string solver = "nhtp";
    std::string eta = "auto";
    std::string step = "auto";
    double sigma = 5e-5;
    double beta = 0.5;
    double tol = 1e-7;
    int max_iter = 2000;
    std::string report;
};

int run_solve(const SolveArgs& a) {
    const nhtp::ProblemInstance P = nhtp::load_instance(a.instance);
    if (!P.x0) throw nhtp::InputError("instance has no start point 'x0'");
    const auto solver = nhtp::parse_solver_kind(a.solver);
    if (!solver) throw nhtp::InputError("unknown --solver '" + a.solver + "' (nhtp, iht)");

    nhtp::SolveReport report;
    if (*solver == nhtp::SolverKind::nhtp) {
        nhtp::NhtpConfig cfg;
        cfg.eta = parse_auto_or_number(a.eta, "--eta");
        cfg.sigma = a.sigma;
        cfg.beta = a.beta;
        cfg.tol = a.tol;
        cfg.max_iter = a.max_iter;
        report = nhtp::solve(P, *P.x0, cfg);
    } else {
        const auto step = parse_auto_or_number(a.step, "--step");
        report = nhtp::iht_solve(P, *P.x0, step ? *step : nhtp::iht_default_step(P, *P.x0), a.tol,
                                 a.max_iter);
    }
    nhtp::json out = nhtp::report_to_json(report);
    out["f_final"] = nhtp::objective_value(P, report.x_final);
    if (P.x_star) out["relative_error"] = nhtp::relative_error(report.x_final, *P.x_star);
    write_json(out, a.report);
    if (report.status == nhtp::SolveStatus::degenerate_start) return kExitInvalid;
    return report.status == nhtp::SolveStatus::converged ? kExitOk : kExitNotConverged;
}

struct BenchArgs {
    std::string kind = "cp";
    int order = 3;
    int dim = 10;
    std::string sparsity = "auto";
    int trials = 50;
    std::uint64_t seed = 0;
    std::vector<std::string> solvers{"nhtp", "iht"};
    std::string format = "csv";
    std::string out;
};

int run_bench(const BenchArgs& a) {
    nhtp::GeneratorSpec base;
    base.kind = require_kind(a.kind);
    base.order = a.order;
    base.dim = a.dim;
    base.seed = a.seed;

    std::vector<int> levels;
    if (a.sparsity == "auto") {
        levels = nhtp::default_sparsities(a.dim);
    } else {
        try {
            levels.push_back(std::stoi(a.sparsity));
        } catch (const std::exception&) {
            throw nhtp::InputError("--sparsity expects an integer or 'auto'");
        }
    }
    if (base.kind == nhtp::GeneratorKind::analytic) levels = {1};

    nhtp::BenchOptions options;
    options.trials = a.trials;
    options.solvers.clear();
    for (const auto& s : a.solvers) {
        auto kind = nhtp::parse_solver_kind(s);
        if (!kind) throw nhtp::InputError("unknown solver '" + s + "' (nhtp, iht)");
        options.solvers.push_back(*kind);
    }

    nhtp::ResultFormat format;
    if (a.format == "csv")
        format = nhtp::ResultFormat::csv;
    else if (a.format == "json")
        format = nhtp::ResultFormat::json;
    else
        throw nhtp::InputError("--format must be csv or json");

    std::vector<nhtp::SummaryRow> rows;
    for (int s : levels) {
        nhtp::GeneratorSpec spec = base;
        spec.sparsity = s;
        const auto summary = nhtp::run_trials(spec, options);
        rows.insert(rows.end(), summary.rows.begin(), summary.rows.end());
    }
    if (a.out.empty() || a.out == "-")
        nhtp::emit_results(rows, format, std::cout);
    else
        nhtp::emit_results(rows, format, std::filesystem::path(a.out));
    return kExitOk;
}

struct VerifyArgs {
    std::string instance;
    bool assumption1 = false;
    bool constants = false;
    double delta0 = 0.1;
    double delta1 = 0.1;
    double fd_step = 1e-5;
    std::string out;
};

int run_verify(const VerifyArgs& a) {
    const nhtp::ProblemInstance P = nhtp::load_instance(a.instance);
    nhtp::json out;
    out["order"] = P.order();
    out["dim"] = P.dim();
    out["s"] = P.s;

    nhtp::json checks = nhtp::json::array();
    auto add_check = [&](const char* name, const nhtp::Vector& x) {
        const auto c = nhtp::check_derivatives(P, x, a.fd_step);
        checks.push_back({{"point", name},
                          {"gradient_rel_error", c.gradient_rel_error},
                          {"hessian_rel_error", c.hessian_rel_error}});
    };
    if (P.x0) add_check("x0", *P.x0);
    if (P.x_star) add_check("x_star", *P.x_star);
    out["derivative_checks"] = checks;

    const nhtp::Vector* ref = P.x_star ? &*P.x_star : (P.x0 ? &*P.x0 : nullptr);
    if (a.assumption1) {
        if (!P.x_star) throw nhtp::InputError("--assumption1 needs 'x_star' in the instance");
        const auto r = nhtp::verify_assumption1(P, *P.x_star, P.s);
        out["assumption1"] = {{"min_eigenvalue", r.min_eigenvalue},
                              {"witness_support", r.witness_support},
                              {"subsets_checked", r.subsets_checked},
                              {"holds", r.holds()}};
    }
    if (a.constants) {
        if (!ref) throw nhtp::InputError("--constants needs 'x_star' or 'x0' in the instance");
        const double lf = nhtp::lipschitz_constant(P, *ref, a.delta0);
        const double m2s = nhtp::smoothness_constant(P, *ref, a.delta1);
        out["constants"] = {{"frobenius_norm", nhtp::frobenius_norm(P.op)},
                            {"delta0", a.delta0},
                            {"delta1", a.delta1},
                            {"lipschitz_constant", lf},
                            {"smoothness_constant", m2s}};
    }
    write_json(out, a.out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse least-squares solutions of symmetric multilinear equations"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a seeded problem instance");
    generate->add_option("--kind", gen.kind, "cp | mtensor | analytic")->capture_default_str();
    generate->add_option("--order", gen.order, "Tensor order m")->capture_default_str();
    generate->add_option("--dim", gen.dim, "Dimension n")->capture_default_str();
    generate->add_option("--sparsity", gen.sparsity, "Sparsity s")->capture_default_str();
    generate->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    generate->add_option("--noise", gen.noise, "Start-point noise scale")->capture_default_str();
    generate->add_option("--out", gen.out, "Output file (default stdout)");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Solve an instance file");
    solve->add_option("--instance", sol.instance, "Problem JSON")->required();
    solve->add_option("--solver", sol.solver, "nhtp | iht")->capture_default_str();
    solve->add_option("--eta", sol.eta, "auto or a positive number")->capture_default_str();
    solve->add_option("--step", sol.step, "IHT step: auto or a positive number")->capture_default_str();
    solve->add_option("--sigma", sol.sigma)->capture_default_str();
    solve->add_option("--beta", sol.beta)->capture_default_str();
    solve->add_option("--tol", sol.tol)->capture_default_str();
    solve->add_option("--max-iter", sol.max_iter)->capture_default_str();
    solve->add_option("--report", sol.report, "Report JSON (default stdout)");

    BenchArgs ben;
    auto* bench = app.add_subcommand("bench", "Run seeded trials and summarize");
    bench->add_option("--kind", ben.kind, "cp | mtensor | analytic")->capture_default_str();
    bench->add_option("--order", ben.order)->capture_default_str();
    bench->add_option("--dim", ben.dim)->capture_default_str();
    bench->add_option("--sparsity", ben.sparsity, "integer or auto (ceil(0.01n), ceil(0.05n))")
        ->capture_default_str();
    bench->add_option("--trials", ben.trials)->capture_default_str();
    bench->add_option("--seed", ben.seed)->capture_default_str();
    bench->add_option("--solvers", ben.solvers, "Comma-separated: nhtp,iht")->delimiter(',');
    bench->add_option("--format", ben.format, "csv | json")->capture_default_str();
    bench->add_option("--out", ben.out, "Output file (default stdout)");

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "Derivative checks, restricted positive definiteness, constants");
    verify->add_option("--instance", ver.instance, "Problem JSON")->required();
    verify->add_flag("--assumption1", ver.assumption1, "Enumerate restricted Hessians at x_star");
    verify->add_flag("--constants", ver.constants, "Evaluate L_f and M_2s");
    verify->add_option("--delta0", ver.delta0)->capture_default_str();
    verify->add_option("--delta1", ver.delta1)->capture_default_str();
    verify->add_option("--fd-step", ver.fd_step)->capture_default_str();
    verify->add_option("--out", ver.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*generate) return run_generate(gen);
        if (*solve) return run_solve(sol);
        if (*bench) return run_bench(ben);
        if (*verify) return run_verify(ver);
    } catch (const nhtp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const nhtp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const nhtp::ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
