#pragma once

#include <filesystem>

#include "json.hpp"
#include "mixclust/mixture_models.hpp"

namespace mixclust {

// Model document:
//
//   {
//     "K": 2, "F": 3,
//     "weights": [0.5, 0.5],
//     "means": [[0, 0, 0], [1, 1, 1]]          // K arrays of length F
//        or   {"hypercube_uniform": {"seed": 7}},
//     "components": [
//       {"family": "spherical_gaussian", "params": {"variance": 1.0}},
//       {"family": "diagonal_gaussian",  "params": {"variances": [..F..]}},
//       {"family": "laplace",            "params": {"scales": [..F..]}},   // or "scale": b
//       {"family": "uniform_box",        "params": {"half_widths": [..F..]}} // or "half_width": h
//     ]
//   }
//
// A single component object may be given instead of an array; it is then
// shared by all K components.

/// Throws ValidationError on schema or model-invariant violations.
MixtureModel model_from_json(const nlohmann::json& doc);
MixtureModel load_model(const std::filesystem::path& path);
nlohmann::json model_to_json(const MixtureModel& model);

nlohmann::json to_json(const SeparabilityReport& report);
nlohmann::json to_json(const NonDegeneracy& nd);

/// Reads and parses a JSON file; throws IoError / ValidationError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace mixclust
