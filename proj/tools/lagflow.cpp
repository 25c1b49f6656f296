// lagflow: generate area-preserving initial maps, run the graphical mean
// curvature flow on torus/sphere geometry, and post-process run histories.
//
// Exit codes: 0 success, 1 runtime geometric failure, 2 configuration error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lagflow/config.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/flow.hpp"
#include "lagflow/generators.hpp"
#include "lagflow/observables.hpp"
#include "lagflow/sphere.hpp"

namespace fs = std::filesystem;
using namespace lagflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct DiagnoseArgs {
  std::string history;
  std::string out;
  double t0 = -1.0;  // < 0 means "latest snapshot time"
  std::vector<int> center_node;
  std::vector<double> center_point;
  double lambda = 1.0;
  int sample_stride = 1;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
}

std::string summary_text(const RunSummary& s, double h) {
  std::ostringstream out;
  out << "termination " << to_string(s.termination) << "\n"
      << "message " << s.message << "\n"
      << "steps " << s.steps << "\n"
      << "t_final " << format_g17(s.t_final) << "\n"
      << "area_initial " << format_g17(s.area_initial) << "\n"
      << "area_final " << format_g17(s.area_final) << "\n"
      << "h2_time_integral " << format_g17(s.h2_time_integral) << "\n"
      << "dissipation_residual "
      << format_g17(s.area_initial - s.area_final - s.h2_time_integral) << "\n"
      << "eta0_min " << format_g17(s.eta0_min) << "\n"
      << "max_lag_defect_sup " << format_g17(s.max_defect_sup) << "\n"
      << "defect_over_h2 " << format_g17(s.max_defect_sup / (h * h)) << "\n"
      << "drift_final " << format_g17(s.drift_final) << "\n";
  return out.str();
}

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
  const RunConfig config = parse_run_config_file(config_path);
  fs::create_directories(out_dir);
  GeneratorReport report;
  if (config.geometry == RunConfig::Geometry::Sphere) {
    const TwistProfile profile = generate_sphere(config.generator, config.flow.n);
    report = validate(profile);
    write_twist_snapshot(out_dir + "/initial.snapshot", profile);
  } else {
    const GeneratedMap generated = generate_torus_validated(config.generator, config.flow.n);
    report = generated.report;
    write_map_snapshot(out_dir + "/initial.snapshot", generated.map);
  }
  write_text(out_dir + "/generate_report.txt", report_text(report));
  std::cout << report_text(report);
  if (!report.is_diffeo) {
    std::cerr << "lagflow: generated map is not a diffeomorphism\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct SnapshotWriter {
  std::string dir;
  int stride = 1;
  long row_count = 0;
  long written = 0;

  template <class State, class WriteFn>
  void maybe_write(const State& state, double t, const WriteFn& write_fn) {
    if (row_count++ % stride == 0) {
      std::ostringstream name;
      name << dir << "/snap_" << written++;
      write_fn(name.str(), state);
      std::ofstream meta(name.str() + ".meta");
      meta << "# t=" << format_g17(t) << " step=" << row_count - 1 << "\n";
    }
  }
};

int run_common(const RunConfig& config, const std::string& out_dir,
               const MapGrid* resume_map, const TwistProfile* resume_profile,
               double t_start, long step_start) {
  fs::create_directories(out_dir);
  FlowConfig flow = config.flow;
  if (flow.checkpoint_every > 0) {
    flow.checkpoint_dir = out_dir + "/checkpoints";
    fs::create_directories(flow.checkpoint_dir);
  }

  SnapshotWriter snapshots{out_dir + "/snapshots", config.snapshot_stride};
  if (config.emit_snapshots) fs::create_directories(snapshots.dir);

  RunSummary summary;
  if (config.geometry == RunConfig::Geometry::Sphere) {
    TwistProfile initial =
        resume_profile ? *resume_profile : generate_sphere(config.generator, flow.n);
    SphereObserver observer;
    if (config.emit_snapshots) {
      observer = [&](const TwistProfile& p, const ObservableRow& row) {
        snapshots.maybe_write(p, row.t, [](const std::string& path, const TwistProfile& s) {
          write_twist_snapshot(path + ".snapshot", s);
        });
      };
    }
    SphereRunResult result = run_sphere(flow, initial, t_start, step_start, observer);
    summary = result.summary;
    write_twist_snapshot(out_dir + "/final.snapshot", result.final_profile);
    {
      std::ofstream meta(out_dir + "/final.meta");
      meta << "# t=" << format_g17(summary.t_final) << " step="
           << step_start + summary.steps << "\n";
    }
    write_observables_csv(out_dir + "/observables.csv", summary.history);
    write_text(out_dir + "/report.txt",
               summary_text(summary, initial.dtheta()));
  } else {
    MapGrid initial =
        resume_map ? *resume_map : generate_torus(config.generator, flow.n);
    TorusObserver observer;
    if (config.emit_snapshots) {
      observer = [&](const MapGrid& m, const ObservableRow& row) {
        snapshots.maybe_write(m, row.t, [](const std::string& path, const MapGrid& s) {
          write_map_snapshot(path + ".snapshot", s);
        });
      };
    }
    TorusRunResult result = run(flow, initial, t_start, step_start, observer);
    summary = result.summary;
    write_map_snapshot(out_dir + "/final.snapshot", result.final_map);
    {
      std::ofstream meta(out_dir + "/final.meta");
      meta << "# t=" << format_g17(summary.t_final) << " step="
           << step_start + summary.steps << "\n";
    }
    write_observables_csv(out_dir + "/observables.csv", summary.history);
    write_text(out_dir + "/report.txt", summary_text(summary, initial.h()));
  }

  std::cout << "termination: " << to_string(summary.termination) << " ("
            << summary.message << ") after " << summary.steps << " steps, t="
            << format_g17(summary.t_final) << "\n";
  const bool clean = summary.termination == Termination::ReachedTEnd ||
                     summary.termination == Termination::ReachedStopHSup ||
                     summary.termination == Termination::StepGuard;
  return clean ? kExitOk : kExitRuntime;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const RunConfig config = parse_run_config_file(config_path);
  return run_common(config, out_dir, nullptr, nullptr, 0.0, 0);
}

int cmd_resume(const std::string& config_path, const std::string& snapshot_path,
               const std::string& out_dir) {
  const RunConfig config = parse_run_config_file(config_path);
  std::string meta_path = snapshot_path;
  const std::string suffix = ".snapshot";
  if (meta_path.size() > suffix.size() &&
      meta_path.compare(meta_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    meta_path = meta_path.substr(0, meta_path.size() - suffix.size());
  const CheckpointMeta meta = read_checkpoint_meta(meta_path + ".meta");

  if (snapshot_kind(snapshot_path) == "twist") {
    if (config.geometry != RunConfig::Geometry::Sphere)
      throw ConfigError("twist checkpoint with a torus config");
    TwistProfile profile = read_twist_snapshot(snapshot_path);
    if (profile.m != config.flow.n)
      throw ConfigError("checkpoint resolution does not match the config");
    return run_common(config, out_dir, nullptr, &profile, meta.t, meta.step);
  }
  if (config.geometry != RunConfig::Geometry::Torus)
    throw ConfigError("map checkpoint with a sphere config");
  MapGrid map = read_map_snapshot(snapshot_path);
  if (map.n != config.flow.n)
    throw ConfigError("checkpoint resolution does not match the config");
  return run_common(config, out_dir, &map, nullptr, meta.t, meta.step);
}

SnapshotSeries load_history(const std::string& history_dir) {
  SnapshotSeries series;
  const std::string dir = history_dir + "/snapshots";
  if (!fs::is_directory(dir))
    throw IoError("no snapshots/ directory under " + history_dir);
  std::vector<std::pair<double, std::string>> entries;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string path = entry.path().string();
    if (path.size() < 9 || path.substr(path.size() - 9) != ".snapshot") continue;
    const CheckpointMeta meta =
        read_checkpoint_meta(path.substr(0, path.size() - 9) + ".meta");
    entries.emplace_back(meta.t, path);
  }
  std::sort(entries.begin(), entries.end());
  for (const auto& [t, path] : entries) {
    series.times.push_back(t);
    series.maps.push_back(read_map_snapshot(path));
  }
  if (series.maps.empty()) throw IoError("history has no snapshots");
  return series;
}

RescaleSpec resolve_center(const SnapshotSeries& series, const DiagnoseArgs& args) {
  RescaleSpec spec;
  spec.t0 = args.t0 >= 0 ? args.t0 : series.times.back();
  spec.lambda = args.lambda;
  if (!args.center_point.empty()) {
    if (args.center_point.size() != 4)
      throw ConfigError("--center-point needs four coordinates");
    for (int k = 0; k < 4; ++k) spec.center[k] = args.center_point[k];
    return spec;
  }
  // default: lift a node of the last snapshot not later than t0
  size_t ref = 0;
  for (size_t k = 0; k < series.times.size(); ++k)
    if (series.times[k] <= spec.t0) ref = k;
  const MapGrid& map = series.maps[ref];
  int ci = 0, cj = 0;
  if (!args.center_node.empty()) {
    if (args.center_node.size() != 2) throw ConfigError("--center needs i,j");
    ci = args.center_node[0];
    cj = args.center_node[1];
    if (ci < 0 || ci >= map.n || cj < 0 || cj >= map.n)
      throw ConfigError("--center node out of range");
  }
  const size_t p = map.idx(ci, cj);
  spec.center = {map.x(ci), map.y(cj), map.x(ci) + map.u[p], map.y(cj) + map.v[p]};
  return spec;
}

int cmd_diagnose_density(const DiagnoseArgs& args) {
  const SnapshotSeries series = load_history(args.history);
  const RescaleSpec spec = resolve_center(series, args);
  const auto trace = density_trace(series, spec);
  if (trace.empty()) throw ConfigError("no snapshots earlier than t0");
  std::ostringstream out;
  out << "t,density\n";
  for (const auto& [t, d] : trace)
    out << format_g17(t) << "," << format_g17(d) << "\n";
  const std::string path =
      args.out.empty() ? args.history + "/density.csv" : args.out;
  write_text(path, out.str());
  std::cout << "density trace (" << trace.size() << " rows) -> " << path << "\n";
  return kExitOk;
}

int cmd_diagnose_rescale(const DiagnoseArgs& args) {
  const SnapshotSeries series = load_history(args.history);
  const RescaleSpec spec = resolve_center(series, args);
  std::vector<SpacetimePoint> points;
  for (size_t k = 0; k < series.maps.size(); ++k) {
    const auto samples = sample_surface(series.maps[k], series.times[k]);
    for (size_t s = 0; s < samples.size();
         s += static_cast<size_t>(args.sample_stride))
      points.push_back(samples[s]);
  }
  const auto rescaled = parabolic_rescale(points, spec);
  const std::string path =
      args.out.empty() ? args.history + "/rescaled.points" : args.out;
  write_point_set(path, rescaled);
  std::cout << "rescaled " << rescaled.size() << " samples -> " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean curvature flow of area-preserving surface maps"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", resume_path;

  auto* generate = app.add_subcommand("generate", "construct and validate an initial map");
  generate->add_option("--config", config_path, "run configuration (JSON)")->required();
  generate->add_option("--out", out_dir, "output directory");

  auto* run_cmd = app.add_subcommand("run", "run the flow described by a config");
  run_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "output directory");

  auto* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
  resume->add_option("--config", config_path, "run configuration (JSON)")->required();
  resume->add_option("--resume", resume_path, "checkpoint .snapshot path")->required();
  resume->add_option("--out", out_dir, "output directory");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "post-process a run history");
  diagnose->require_subcommand(1);
  auto* density = diagnose->add_subcommand("density", "backward heat kernel density trace");
  density->add_option("--history", diag.history, "run output directory")->required();
  density->add_option("--t0", diag.t0, "density reference time (default: last snapshot)");
  density->add_option("--center", diag.center_node, "node i,j used as the on-surface centre")
      ->delimiter(',');
  density->add_option("--center-point", diag.center_point, "explicit centre x,y,z,w")
      ->delimiter(',');
  density->add_option("--out", diag.out, "output CSV path");

  auto* rescale = diagnose->add_subcommand("rescale", "parabolic rescaling of surface samples");
  rescale->add_option("--history", diag.history, "run output directory")->required();
  rescale->add_option("--lambda", diag.lambda, "rescale factor")->required();
  rescale->add_option("--t0", diag.t0, "centre time (default: last snapshot)");
  rescale->add_option("--center", diag.center_node, "node i,j used as the centre")
      ->delimiter(',');
  rescale->add_option("--center-point", diag.center_point, "explicit centre x,y,z,w")
      ->delimiter(',');
  rescale->add_option("--sample-stride", diag.sample_stride, "keep every k-th node sample");
  rescale->add_option("--out", diag.out, "output point-set path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir);
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (resume->parsed()) return cmd_resume(config_path, resume_path, out_dir);
    if (density->parsed()) return cmd_diagnose_density(diag);
    if (rescale->parsed()) return cmd_diagnose_rescale(diag);
  } catch (const ConfigError& e) {
    std::cerr << "lagflow: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "lagflow: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateGraphError& e) {
    std::cerr << "lagflow: geometric failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const NumericError& e) {
    std::cerr << "lagflow: numeric failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const GeneratorError& e) {
    std::cerr << "lagflow: generator failure: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const IoError& e) {
    std::cerr << "lagflow: io error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
