#include "lagflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "lagflow/detail/sweep.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/parallel.hpp"

namespace lagflow {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd: return "reached_t_end";
    case Termination::ReachedStopHSup: return "reached_stop_h_sup";
    case Termination::StepGuard: return "step_guard";
    case Termination::DegeneracyAbort: return "degeneracy_abort";
    case Termination::NumericAbort: return "numeric_abort";
  }
  return "unknown";
}

void validate_flow_config(const FlowConfig& config) {
  if (!(config.cfl > 0.0) || config.cfl > 0.5)
    throw ConfigError("cfl must lie in (0, 0.5]");
  if (!(config.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  if (config.stop_h_sup < 0.0) throw ConfigError("stop_h_sup must be >= 0");
  if (config.observe_every < 1) throw ConfigError("observe_every must be >= 1");
  if (config.order != 2 && config.order != 4)
    throw ConfigError("derivative order must be 2 or 4");
  if (config.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (config.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (config.checkpoint_every > 0 && config.checkpoint_dir.empty())
    throw ConfigError("checkpoint_every set but no checkpoint directory");
}

namespace {

/// Fused per-step sweep: one pass computes the graphical velocity fields and
/// all scalar reductions of the pre-step state.
GeometryReduction velocity_sweep(const MapGrid& map, int order,
                                 std::vector<double>& wu, std::vector<double>& wv) {
  GeometryAccumulator acc(map.n, map.h() * map.h());
  const int n = map.n;
  detail::geometry_sweep(map, order, [&](int i, int j, const TorusNodeGeometry& g) {
    acc.visit(i, j, g);
    if (g.metric_ok) {
      const size_t p = static_cast<size_t>(i) * n + j;
      wu[p] = g.wu;
      wv[p] = g.wv;
    }
  });
  return acc.finish();
}

void axpy_update(MapGrid& map, double dt, const std::vector<double>& wu,
                 const std::vector<double>& wv) {
  const int n = map.n;
  parallel_rows(n, [&](int i) {
    const size_t base = static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      map.u[base + j] += dt * wu[base + j];
      map.v[base + j] += dt * wv[base + j];
    }
  });
}

}  // namespace

double cfl_dt(const MapGrid& map, int order, double cfl) {
  const GeometryReduction r = reduce_geometry(map, order);
  if (!r.metric_ok)
    throw DegenerateGraphError("induced metric not positive definite", r.bad_i,
                               r.bad_j);
  const double h = map.h();
  return cfl * h * h / (2.0 * r.gi_eig_max);
}

FlowState step(const FlowState& state, const FlowConfig& config, double dt) {
  validate_flow_config(config);
  const double limit = cfl_dt(state.map, config.order, config.cfl);
  if (dt > limit * (1.0 + 1e-12))
    throw ArgumentError("step size exceeds the CFL bound");

  FlowState next = state;
  const size_t nn = state.map.u.size();
  std::vector<double> wu(nn, 0.0), wv(nn, 0.0);
  const GeometryReduction r = velocity_sweep(state.map, config.order, wu, wv);
  if (!r.finite) throw NumericError("NaN/Inf in flow velocity");
  axpy_update(next.map, dt, wu, wv);
  next.t = state.t + dt;
  next.dt = dt;
  next.step_index = state.step_index + 1;

  const GeometryReduction after = reduce_geometry(next.map, config.order);
  if (after.min_jac <= 0.0)
    throw DegenerateGraphError(
        "Jacobian lost positivity after step (resolution failure)", 0, 0);
  return next;
}

ObservableRow assemble_torus_row(const MapGrid& map, int order, double t,
                                 double dt, double eta0_min) {
  const GeometryReduction r = reduce_geometry(map, order);
  ObservableRow row;
  row.t = t;
  row.dt = dt;
  row.area = r.area;
  row.min_eta = r.min_eta;
  row.max_eta = r.max_eta;
  row.eta_bound = comparison_bound(t, std::min(eta0_min, 1.0), 0);
  row.sup_H2 = r.sup_h2;
  row.int_H2 = r.int_h2;
  row.sup_A2 = r.sup_a2;
  row.int_A2 = r.int_a2;
  row.lag_defect_sup = r.defect_sup;
  row.lag_defect_l2 = r.defect_l2;
  row.max_rho = max_rho(map);
  row.willmore = willmore_from_integral(r.int_h2, 0);
  row.sigma_ratio_max = r.sigma_ratio_max;
  row.twist_residual_sup = 0.0;
  return row;
}

TorusRunResult run(const FlowConfig& config, const MapGrid& initial, double t_start,
                   long step_start, const TorusObserver& observer) {
  validate_flow_config(config);

  TorusRunResult result;
  result.final_map = initial;
  MapGrid& map = result.final_map;
  RunSummary& sum = result.summary;

  const double h = map.h();
  const size_t nn = map.u.size();
  std::vector<double> wu(nn, 0.0), wv(nn, 0.0);

  double t = t_start;
  long step_index = step_start;
  double dt = 0.0;
  long last_recorded = -1;

  GeometryReduction r = velocity_sweep(map, config.order, wu, wv);
  sum.eta0_min = r.min_eta;
  sum.area_initial = r.area;

  auto record = [&](double row_dt) {
    ObservableRow row = assemble_torus_row(map, config.order, t, row_dt, sum.eta0_min);
    sum.history.push_back(row);
    last_recorded = step_index;
    if (observer) observer(map, row);
  };

  auto finish = [&](Termination why, const std::string& msg) {
    sum.termination = why;
    sum.message = msg;
    sum.steps = step_index - step_start;
    sum.t_final = t;
    sum.dt_final = dt;
    sum.area_final = r.area;
    if (why != Termination::NumericAbort && last_recorded != step_index) record(dt);
    result.summary.history.shrink_to_fit();
    return result;
  };

  // A NaN-free positive-Jacobian start is required; geometric failures end
  // the run with a diagnostic result rather than an exception.
  if (!r.finite || !r.metric_ok)
    return finish(Termination::NumericAbort, "initial map yields NaN/Inf geometry");
  if (r.min_jac <= 0.0)
    return finish(Termination::DegeneracyAbort, "initial map is not a diffeomorphism");

  record(0.0);
  sum.max_defect_sup = r.defect_sup;

  for (;;) {
    if (config.stop_h_sup > 0.0 && std::sqrt(r.sup_h2) < config.stop_h_sup)
      return finish(Termination::ReachedStopHSup, "sup |H| below threshold");
    if (t >= config.t_end - 1e-15 * std::max(1.0, config.t_end))
      return finish(Termination::ReachedTEnd, "reached t_end");
    if (step_index - step_start >= config.max_steps)
      return finish(Termination::StepGuard, "max_steps guard tripped");

    dt = std::min(config.cfl * h * h / (2.0 * r.gi_eig_max), config.t_end - t);
    sum.h2_time_integral += r.int_h2 * dt;

    axpy_update(map, dt, wu, wv);
    if (config.projection == Projection::Gradient) {
      map = project_area_preserving(map, 1, config.order);
    }
    t += dt;
    ++step_index;

    r = velocity_sweep(map, config.order, wu, wv);
    sum.max_defect_sup = std::max(sum.max_defect_sup, r.defect_sup);

    if (!r.finite)
      return finish(Termination::NumericAbort, "NaN/Inf detected during flow");
    if (r.min_jac <= 0.0)
      return finish(Termination::DegeneracyAbort,
                    "Jacobian lost positivity (resolution failure)");
    if (r.sup_a2 * h * h > 1.0)
      return finish(Termination::DegeneracyAbort,
                    "curvature no longer resolved: max |A|^2 h^2 > 1");

    if ((step_index - step_start) % config.observe_every == 0) record(dt);
    if (config.checkpoint_every > 0 &&
        (step_index - step_start) % config.checkpoint_every == 0) {
      write_checkpoint(config.checkpoint_dir + "/checkpoint_" +
                           std::to_string(step_index),
                       map, t, step_index);
    }
  }
}

MapGrid project_area_preserving(const MapGrid& map, int iterations, int order) {
  if (iterations < 0) throw ArgumentError("iterations must be >= 0");
  MapGrid current = map;
  if (iterations == 0) return current;

  const int n = map.n;
  const double h = map.h();
  const size_t nn = map.u.size();

  // E[u, v] = sum (Jac - 1)^2 h^2; its discrete L2 gradient uses the adjoint
  // of the centred differences, which is their negation on a periodic grid.
  std::vector<double> p1(nn), p2(nn), p3(nn), p4(nn), gu(nn), gv(nn);

  auto defect_l2 = [&](const MapGrid& m) { return reduce_geometry(m, order).defect_l2; };

  double before = defect_l2(current);
  for (int it = 0; it < iterations; ++it) {
    parallel_rows(n, [&](int i) {
      for (int j = 0; j < n; ++j) {
        const size_t p = static_cast<size_t>(i) * n + j;
        const TorusJet jet = torus_jet_at(current, order, i, j);
        const double q = (1.0 + jet.ux) * (1.0 + jet.vy) - jet.uy * jet.vx - 1.0;
        p1[p] = q * (1.0 + jet.vy);
        p2[p] = q * jet.vx;
        p3[p] = q * (1.0 + jet.ux);
        p4[p] = q * jet.uy;
      }
    });

    // plain centred first derivatives of the product fields (not displacement
    // fields, no period reduction)
    auto dx = [&](const std::vector<double>& f, int i, int j) {
      if (order == 2) {
        return (f[static_cast<size_t>(wrap_index(i + 1, n)) * n + j] -
                f[static_cast<size_t>(wrap_index(i - 1, n)) * n + j]) /
               (2.0 * h);
      }
      return (8.0 * (f[static_cast<size_t>(wrap_index(i + 1, n)) * n + j] -
                     f[static_cast<size_t>(wrap_index(i - 1, n)) * n + j]) -
              (f[static_cast<size_t>(wrap_index(i + 2, n)) * n + j] -
               f[static_cast<size_t>(wrap_index(i - 2, n)) * n + j])) /
             (12.0 * h);
    };
    auto dy = [&](const std::vector<double>& f, size_t base, int j) {
      if (order == 2) {
        return (f[base + wrap_index(j + 1, n)] - f[base + wrap_index(j - 1, n)]) /
               (2.0 * h);
      }
      return (8.0 * (f[base + wrap_index(j + 1, n)] - f[base + wrap_index(j - 1, n)]) -
              (f[base + wrap_index(j + 2, n)] - f[base + wrap_index(j - 2, n)])) /
             (12.0 * h);
    };

    parallel_rows(n, [&](int i) {
      const size_t base = static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        const size_t p = base + j;
        gu[p] = -2.0 * (dx(p1, i, j) - dy(p2, base, j));
        gv[p] = -2.0 * (dy(p3, base, j) - dx(p4, i, j));
      }
    });

    double tau = h * h / 4.0;
    bool accepted = false;
    for (int halving = 0; halving < 10; ++halving) {
      MapGrid trial = current;
      for (size_t p = 0; p < nn; ++p) {
        trial.u[p] -= tau * gu[p];
        trial.v[p] -= tau * gv[p];
      }
      const double after = defect_l2(trial);
      if (after <= before) {
        current = std::move(trial);
        before = after;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted)
      throw NumericError("projection failed to decrease the defect after 10 halvings");
  }
  return current;
}

void write_checkpoint(const std::string& prefix, const MapGrid& map, double t,
                      long step) {
  write_map_snapshot(prefix + ".snapshot", map);
  std::ofstream meta(prefix + ".meta");
  if (!meta) throw IoError("cannot open for writing: " + prefix + ".meta");
  meta << "# t=" << format_g17(t) << " step=" << step << "\n";
  if (!meta) throw IoError("write failed: " + prefix + ".meta");
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  CheckpointMeta meta;
  if (std::sscanf(header.c_str(), "# t=%lf step=%ld", &meta.t, &meta.step) != 2)
    throw IoError("bad checkpoint sidecar in " + path);
  return meta;
}

}  // namespace lagflow
