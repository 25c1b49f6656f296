#include "lagflow/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lagflow/errors.hpp"

namespace lagflow {

namespace {

using nlohmann::json;

GeneratorSpec::Kind parse_kind(const std::string& s) {
  if (s == "shear") return GeneratorSpec::Kind::Shear;
  if (s == "double_shear") return GeneratorSpec::Kind::DoubleShear;
  if (s == "hamiltonian") return GeneratorSpec::Kind::Hamiltonian;
  if (s == "sphere_twist") return GeneratorSpec::Kind::SphereTwist;
  if (s == "compose") return GeneratorSpec::Kind::Compose;
  throw ConfigError("unknown generator kind: " + s);
}

GeneratorSpec parse_generator(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("generator must be an object with a kind");
  GeneratorSpec spec;
  spec.kind = parse_kind(j.at("kind").get<std::string>());
  spec.amplitude = j.value("amplitude", 0.0);
  spec.wavenumber = j.value("wavenumber", 1);
  spec.amplitude2 = j.value("amplitude2", 0.0);
  spec.wavenumber2 = j.value("wavenumber2", 1);
  spec.substeps = j.value("substeps", 64);
  if (j.contains("psi")) {
    for (const auto& m : j.at("psi")) {
      GeneratorSpec::PsiMode mode;
      mode.kx = m.value("kx", 1);
      mode.ky = m.value("ky", 1);
      const std::string basis = m.value("basis", std::string("coscos"));
      if (basis == "coscos") mode.basis = 0;
      else if (basis == "cossin") mode.basis = 1;
      else if (basis == "sincos") mode.basis = 2;
      else if (basis == "sinsin") mode.basis = 3;
      else throw ConfigError("unknown psi basis: " + basis);
      mode.amp = m.value("amp", 0.0);
      spec.psi.push_back(mode);
    }
  }
  if (j.contains("twist_modes")) {
    for (const auto& m : j.at("twist_modes")) {
      GeneratorSpec::TwistMode mode;
      mode.amp = m.value("amp", 0.0);
      mode.k = m.value("k", 1);
      spec.twist_modes.push_back(mode);
    }
  }
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) spec.children.push_back(parse_generator(c));
  }
  return spec;
}

FlowConfig parse_flow(const json& j) {
  FlowConfig flow;
  flow.t_end = j.value("t_end", 1.0);
  flow.cfl = j.value("cfl", 0.2);
  flow.observe_every = j.value("observe_every", 100);
  flow.stop_h_sup = j.value("stop_h_sup", 0.0);
  flow.n = j.value("n", 64);
  flow.order = j.value("order", 2);
  flow.max_steps = j.value("max_steps", static_cast<long>(20000000));
  flow.checkpoint_every = j.value("checkpoint_every", 0);
  const std::string projection = j.value("projection_mode", std::string("off"));
  if (projection == "off") flow.projection = Projection::Off;
  else if (projection == "gradient") flow.projection = Projection::Gradient;
  else throw ConfigError("projection_mode must be off or gradient");
  return flow;
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig config;
  const std::string geometry = j.value("geometry", std::string("torus"));
  if (geometry == "torus") config.geometry = RunConfig::Geometry::Torus;
  else if (geometry == "sphere") config.geometry = RunConfig::Geometry::Sphere;
  else throw ConfigError("geometry must be torus or sphere");
  if (!j.contains("generator")) throw ConfigError("config needs a generator");
  config.generator = parse_generator(j.at("generator"));
  if (j.contains("flow")) config.flow = parse_flow(j.at("flow"));
  config.emit_snapshots = j.value("emit_snapshots", false);
  config.snapshot_stride = j.value("snapshot_stride", 1);
  validate_run_config(config);
  return config;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str());
}

void validate_run_config(const RunConfig& config) {
  validate_generator_spec(config.generator);
  validate_flow_config(config.flow);
  const bool sphere = config.geometry == RunConfig::Geometry::Sphere;
  if (sphere != config.generator.is_sphere())
    throw ConfigError("geometry does not match the generator kind");
  if (sphere) {
    if (config.flow.n < 32) throw ConfigError("sphere runs need n >= 32");
  } else {
    if (config.flow.n < 8) throw ConfigError("torus runs need n >= 8");
  }
  if (config.snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
}

}  // namespace lagflow
