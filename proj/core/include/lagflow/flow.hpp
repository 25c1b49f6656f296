#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lagflow/geometry.hpp"
#include "lagflow/grid.hpp"
#include "lagflow/observables.hpp"

namespace lagflow {

enum class Projection { Off, Gradient };

enum class Termination {
  ReachedTEnd,
  ReachedStopHSup,
  StepGuard,
  DegeneracyAbort,
  NumericAbort,
};

std::string to_string(Termination t);

struct FlowConfig {
  double t_end = 1.0;
  double cfl = 0.2;        // in (0, 1/2]
  int observe_every = 100; // steps between recorded rows
  double stop_h_sup = 0.0; // stop once sup|H| drops below this (0 = never)
  int n = 64;              // nodes per side (torus) / colatitude nodes (sphere)
  int order = 2;           // derivative order, 2 or 4
  Projection projection = Projection::Off;
  int checkpoint_every = 0;
  long max_steps = 20000000;
  std::string checkpoint_dir;  // required when checkpoint_every > 0
};

void validate_flow_config(const FlowConfig& config);

struct FlowState {
  double t = 0;
  MapGrid map;
  double dt = 0;  // last step size taken
  long step_index = 0;
  std::vector<ObservableRow> history;
};

struct RunSummary {
  Termination termination = Termination::ReachedTEnd;
  std::string message;
  long steps = 0;
  double t_final = 0;
  double dt_final = 0;
  double area_initial = 0;
  double area_final = 0;
  double h2_time_integral = 0;  // per-step accumulation of int |H|^2 dmu dt
  double eta0_min = 0;
  double max_defect_sup = 0;  // largest Lagrangian sup defect seen over the run
  double drift_final = 0;     // sphere runs: final sup |h - mean h|
  std::vector<ObservableRow> history;
};

struct TorusRunResult {
  RunSummary summary;
  MapGrid final_map;
};

/// Largest stable explicit step for the graphical flow:
///   dt = cfl h^2 / (2 max_nodes lambda_max(g^{ij})).
double cfl_dt(const MapGrid& map, int order, double cfl);

/// One forward-Euler update of the height functions by g^{ij} d_ij (u, v).
/// Requires dt <= cfl_dt; throws DegenerateGraphError if the Jacobian stops
/// being positive after the update.
FlowState step(const FlowState& state, const FlowConfig& config, double dt);

/// Called at every recorded observation (including the initial and final
/// rows). Receives the current map; must not mutate anything.
using TorusObserver = std::function<void(const MapGrid&, const ObservableRow&)>;

/// Runs the flow from t_start until t_end / stop_h_sup / guard. Geometric
/// failures terminate with a diagnostic result instead of throwing so the
/// final state stays available for inspection.
TorusRunResult run(const FlowConfig& config, const MapGrid& initial,
                   double t_start = 0.0, long step_start = 0,
                   const TorusObserver& observer = {});

/// Explicit gradient descent on int (Jac - 1)^2 dx dy with step h^2/4;
/// never returns a map with increased defect (internal step halving, error
/// after 10 failed halvings).
MapGrid project_area_preserving(const MapGrid& map, int iterations, int order = 2);

/// Checkpoint pair: <prefix>.snapshot (grid format) + <prefix>.meta
/// ("# t=<t> step=<k>").
struct CheckpointMeta {
  double t = 0;
  long step = 0;
};
void write_checkpoint(const std::string& prefix, const MapGrid& map, double t,
                      long step);
CheckpointMeta read_checkpoint_meta(const std::string& path);

/// Assembles a monitor row from one reduction sweep of the current map.
ObservableRow assemble_torus_row(const MapGrid& map, int order, double t,
                                 double dt, double eta0_min);

}  // namespace lagflow
