#pragma once

#include <string>

#include <json.hpp>

#include "homog/dirichlet.hpp"
#include "homog/error.hpp"
#include "homog/gallery.hpp"
#include "homog/homogenize.hpp"
#include "homog/rate_lab.hpp"

namespace homog {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// {"variant": ..., "dim": n, "params": {...}}; matrices are n x n arrays of
/// expression strings, numbers are accepted wherever an expression is.
Json spec_to_json(const CoefficientSpec& spec);
CoefficientSpec spec_from_json(const Json& j);

Json to_json(const Eigen::MatrixXd& m);
Json to_json(const ObstructionTensor& c);
Json to_json(const Verdict& v);
Json to_json(const HomogenizationResult& r);
Json to_json(const RateStudy& s);
Json to_json(const AsymptoticStudy& s);
Json summary_json(const DirichletSolution& s);
Json error_json(const Error& e);

/// Deterministic text: sorted keys, doubles as %.17g (non-finite as null).
/// indent < 0 gives a single line.
std::string dump(const Json& j, int indent = 2);

}  // namespace homog
