#pragma once

#include <filesystem>
#include <json.hpp>

#include "nhtp/objective.hpp"
#include "nhtp/solver.hpp"

namespace nhtp {

using json = nlohmann::json;

// Tensor schema:
//   { "order": m, "dim": n, "kind": "cp" | "dense",
//     "factors": [[...], ...], "weights": [...]      (cp; r factors of length n)
//     "values": [...]                                 (dense; n^m, row-major) }
// Problem files extend it with "b", "s" and optional "x_star", "x0", "seed".

json tensor_to_json(const MultilinearOperator& A);

/// Dense tensors must be symmetric to 1e-12 relative to their largest entry.
MultilinearOperator tensor_from_json(const json& j);

json instance_to_json(const ProblemInstance& P);
ProblemInstance instance_from_json(const json& j);

void save_instance(const ProblemInstance& P, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

json report_to_json(const SolveReport& report);

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const char* field);

}  // namespace nhtp
