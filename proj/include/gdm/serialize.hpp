#pragma once

#include <string>

#include <json.hpp>

#include "gdm/eval.hpp"
#include "gdm/gdm.hpp"
#include "gdm/synth.hpp"

namespace gdm {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json config_to_json(const GdmConfig& config);
GdmConfig config_from_json(const Json& j);

/// {beta, center, centroids, extensions, radii, objective, penalty, config}. Document
/// assignments are not stored.
Json model_to_json(const GdmModel& model);
GdmModel model_from_json(const Json& j);

Json params_to_json(const LdaParams& params);
LdaParams params_from_json(const Json& j);

/// {beta, theta, params}
Json truth_to_json(const GroundTruth& truth);
/// Reads beta, theta and params; p is recomputed as theta * beta.
GroundTruth truth_from_json(const Json& j);

Json report_to_json(const PerplexityReport& report);
Json report_to_json(const BoundReport& report);

Json read_json_file(const std::string& path);
/// Two-space indented, trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace gdm
