#include "nhtp/io.hpp"

#include <cmath>
#include <fstream>

#include "nhtp/errors.hpp"

namespace nhtp {

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from_json(const json& j, const char* field) {
    if (!j.is_array()) throw InputError(std::string("field '") + field + "' must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw InputError(std::string("field '") + field + "' must contain numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

namespace {

const json& require(const json& j, const char* field) {
    if (!j.is_object() || !j.contains(field))
        throw InputError(std::string("missing field '") + field + "'");
    return j.at(field);
}

int require_int(const json& j, const char* field) {
    const json& v = require(j, field);
    if (!v.is_number_integer()) throw InputError(std::string("field '") + field + "' must be an integer");
    return v.get<int>();
}

}  // namespace

json tensor_to_json(const MultilinearOperator& A) {
    json out;
    out["order"] = A.order();
    out["dim"] = A.dim();
    if (A.is_cp()) {
        const CpTensor& cp = A.cp();
        out["kind"] = "cp";
        json factors = json::array();
        for (int k = 0; k < cp.rank(); ++k) factors.push_back(vector_to_json(cp.factors().col(k)));
        out["factors"] = std::move(factors);
        out["weights"] = vector_to_json(cp.weights());
    } else {
        out["kind"] = "dense";
        const auto values = A.dense().values();
        out["values"] = json(std::vector<double>(values.begin(), values.end()));
    }
    return out;
}

MultilinearOperator tensor_from_json(const json& j) {
    const int m = require_int(j, "order");
    const int n = require_int(j, "dim");
    const json& kind = require(j, "kind");
    if (kind == "cp") {
        const json& factors = require(j, "factors");
        if (!factors.is_array() || factors.empty())
            throw InputError("field 'factors' must be a non-empty array");
        Matrix U(n, static_cast<Eigen::Index>(factors.size()));
        for (std::size_t k = 0; k < factors.size(); ++k) {
            const Vector u = vector_from_json(factors[k], "factors");
            if (u.size() != n) throw InputError("CP factor length does not match 'dim'");
            U.col(static_cast<Eigen::Index>(k)) = u;
        }
        Vector w;
        if (j.contains("weights")) w = vector_from_json(j.at("weights"), "weights");
        return CpTensor(m, std::move(U), std::move(w));
    }
    if (kind == "dense") {
        const Vector v = vector_from_json(require(j, "values"), "values");
        DenseSymmetricTensor A(m, n, std::vector<double>(v.data(), v.data() + v.size()));
        const double scale = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
        if (!is_symmetric(A, 1e-12 * std::max(scale, 1.0)))
            throw InputError("dense tensor values are not symmetric");
        return A;
    }
    throw InputError("field 'kind' must be \"cp\" or \"dense\"");
}

json instance_to_json(const ProblemInstance& P) {
    json out = tensor_to_json(P.op);
    out["b"] = vector_to_json(P.b);
    out["s"] = P.s;
    if (P.x_star) out["x_star"] = vector_to_json(*P.x_star);
    if (P.x0) out["x0"] = vector_to_json(*P.x0);
    if (P.seed) out["seed"] = *P.seed;
    return out;
}

ProblemInstance instance_from_json(const json& j) {
    MultilinearOperator A = tensor_from_json(j);
    Vector b = vector_from_json(require(j, "b"), "b");
    const int s = require_int(j, "s");
    std::optional<Vector> x_star;
    std::optional<Vector> x0;
    if (j.contains("x_star")) x_star = vector_from_json(j.at("x_star"), "x_star");
    if (j.contains("x0")) x0 = vector_from_json(j.at("x0"), "x0");
    ProblemInstance P(std::move(A), std::move(b), s, std::move(x_star), std::move(x0));
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw InputError("field 'seed' must be unsigned");
        P.seed = j.at("seed").get<std::uint64_t>();
    }
    return P;
}

void save_instance(const ProblemInstance& P, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << instance_to_json(P).dump(1) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ProblemInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return instance_from_json(j);
}

json report_to_json(const SolveReport& report) {
    json out;
    out["solver"] = report.solver;
    out["status"] = to_string(report.status);
    out["iterations"] = report.iterations;
    out["eta"] = report.eta;
    out["wall_time"] = report.wall_time;
    out["x_final"] = vector_to_json(report.x_final);
    out["support"] = report.support;
    json history = json::array();
    for (const auto& rec : report.history) {
        json h{{"f", rec.f}, {"tol", rec.tol}, {"step", rec.step}, {"kind", to_string(rec.kind)}};
        if (rec.x.size() > 0) h["x"] = vector_to_json(rec.x);
        history.push_back(std::move(h));
    }
    out["history"] = std::move(history);
    return out;
}

}  // namespace nhtp
