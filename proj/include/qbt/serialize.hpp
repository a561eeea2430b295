#pragma once

#include "qbt/extensions.hpp"

#include <json.hpp>

#include <filesystem>

namespace qbt {

// Versioned model document:
//   {version, kind, dims {n, m, dD, dDt}, gram_H, gram_G, embed, embed_t,
//    T, Tt, G0, G1, G0t, G1t, metadata {green_defect, lambda0, symmetric}}
// Matrices are nested row-major arrays of [re, im] pairs.
inline constexpr int kModelSchemaVersion = 1;

nlohmann::ordered_json model_to_json(const TripleModel& model);
TripleModel model_from_json(const nlohmann::json& doc);

void save_model(const TripleModel& model, const std::filesystem::path& path);
TripleModel load_model(const std::filesystem::path& path);

nlohmann::ordered_json report_to_json(const VerificationReport& report,
                                      bool with_timestamp);

nlohmann::ordered_json matrix_to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace qbt
