#pragma once

#include <cstdint>

#include <json.hpp>

#include "detaudit/baselines.hpp"
#include "detaudit/dataset.hpp"
#include "detaudit/injector.hpp"
#include "detaudit/objectlab.hpp"
#include "detaudit/synthetic.hpp"

namespace detaudit {

inline constexpr const char* kToolName = "detaudit";
inline constexpr const char* kToolVersion = "0.1.0";

/// Every tunable of every pipeline stage. One `seed` drives all seeded stages.
/// The worker count is deliberately absent: it never changes outputs.
struct RunConfig {
  IngestConfig ingest;
  ScoringConfig scoring;
  MapConfig map;
  TileConfig tile;
  ClodConfig clod;
  InjectionSpec inject;
  OracleSpec oracle;
  SyntheticSpec synthetic;
  std::uint64_t seed = 0;

  /// Pushes `seed` into the per-stage specs.
  void apply_seed();

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  nlohmann::json to_json() const;
  /// Inverse of to_json. Keys absent from `j` keep their current values;
  /// throws ConfigError on a value of the wrong type.
  void update_from_json(const nlohmann::json& j);
};

/// Provenance header written into every output artifact.
nlohmann::json provenance_header(const std::string& command, const RunConfig& cfg);

}  // namespace detaudit
