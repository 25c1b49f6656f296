#pragma once

#include <string>

#include "lagflow/flow.hpp"
#include "lagflow/generators.hpp"

namespace lagflow {

/// One run = geometry + generator + flow settings + output policy.
/// Parsed from a JSON document; see README for the schema.
struct RunConfig {
  enum class Geometry { Torus, Sphere };
  Geometry geometry = Geometry::Torus;
  GeneratorSpec generator;
  FlowConfig flow;
  bool emit_snapshots = false;
  int snapshot_stride = 1;  // in recorded observations
};

RunConfig parse_run_config_file(const std::string& path);
RunConfig parse_run_config_text(const std::string& text);

/// Geometry/generator consistency plus the flow invariants.
void validate_run_config(const RunConfig& config);

}  // namespace lagflow
