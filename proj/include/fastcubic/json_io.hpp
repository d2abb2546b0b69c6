#pragma once

#include <json.hpp>

#include "fastcubic/cubic_model.hpp"
#include "fastcubic/cubic_solver.hpp"
#include "fastcubic/diagnostics.hpp"
#include "fastcubic/optimizer.hpp"

namespace fastcubic {

using Json = nlohmann::json;

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const char* what);
Matrix matrix_from_json(const Json& j, const char* what);

/// {"g": [...], "H": [[...], ...], "L": x, "L2": y}; H defaults to zero.
/// Unknown keys and ragged or non-square H raise ConfigError.
DenseInstance instance_from_json(const Json& j);
Json instance_to_json(const DenseInstance& inst);

Json to_json(const Certificate& c);
Json to_json(const CubicSolution& s);
Json to_json(const ExactSolution& e);
Json to_json(const RunReport& r);

}  // namespace fastcubic
