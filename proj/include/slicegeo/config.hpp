#pragma once

#include <string>

#include <json.hpp>

#include "slicegeo/spacetime.hpp"

namespace slicegeo {

struct LoadedModel {
  SpacetimeModel model;
  int grid_n = 256;
};

/// Parses a model configuration object:
///   {"model": "static"|"de_sitter"|"flrw_toy"|"tabulated",
///    "grid_n": int, "t_domain": [lo, hi], "params": {...}}
/// Bounds accept numbers or the strings "inf"/"-inf"; infinite bounds are
/// only valid for the analytic built-ins. Unknown keys are rejected.
LoadedModel load_model(const nlohmann::json& config);
LoadedModel load_model_file(const std::string& path);

/// Serializes a model as a tabulated configuration by sampling lapse and
/// metric on an (x,t) lattice inside the given window. The result loads back
/// through load_model.
nlohmann::ordered_json to_tabulated_config(const SpacetimeModel& model, int grid_n, int x_n,
                                           int t_n, double t_lo, double t_hi);

/// JSON descriptor of a model (kind, domain, derivative provenance) used in
/// every CLI output record.
nlohmann::ordered_json describe_model(const SpacetimeModel& model, int grid_n);

}  // namespace slicegeo
