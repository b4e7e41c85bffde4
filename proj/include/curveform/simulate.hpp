#pragma once

// Closed-loop simulation: integrates all agents and their disturbance
// observers as one coupled system, swaps curve coefficients at schedule
// boundaries, and logs poses, controls, the stacked error norm and the
// Lyapunov value at every step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "curveform/control.hpp"
#include "curveform/curve.hpp"
#include "curveform/dynamics.hpp"
#include "curveform/errors.hpp"
#include "curveform/rng.hpp"
#include "curveform/scenario.hpp"
#include "curveform/topology.hpp"

namespace curveform {

/// Per-step time series of the whole system. Per-agent columns are indexed
/// step * n + agent.
struct TrajectoryLog {
  int n = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;

  std::vector<double> t;
  std::vector<double> x, y, theta_wrapped, xbar, ybar, v, omega, dhat1, dhat2;
  std::vector<double> err_norm;  // || xbar - G_bar xi || (stacked 2n)
  std::vector<double> lyapunov;  // V(x_e, delta_tilde)
  std::vector<std::size_t> switch_steps;  // first step of stage 2, 3, ...

  // Summary
  double terminal_err_norm = 0.0;
  std::vector<double> terminal_theta;     // wrapped, per agent
  std::vector<double> terminal_distance;  // || xbar_i - G_i xi ||, per agent
  std::vector<double> settling_time;      // per stage; NaN if never settled
  std::vector<double> settling_threshold; // per stage (1% of bbox diagonal)

  std::size_t steps() const { return t.size(); }

  double agent_value(const std::vector<double>& column, std::size_t step,
                     int agent) const {
    return column[step * static_cast<std::size_t>(n) +
                  static_cast<std::size_t>(agent)];
  }
};

namespace detail {

struct CompiledStage {
  double start_time = 0.0;
  std::size_t first_step = 0;
  BasisFamily family = BasisFamily::Fourier(1);
  VectorXd xi;
  StackedBasis basis;
  MatrixXd pinv;
  VectorXd targets;  // G_bar xi
  double bbox_diagonal = 0.0;
};

struct StepEvaluation {
  VectorXd x_bar;    // 2n
  VectorXd x_e;      // 2n
  VectorXd deriv;    // 5n, layout per agent [x, y, theta, dhat1, dhat2]
  std::vector<ControlInput> controls;
};

// State layout: per agent [x, y, theta, dhat1, dhat2].
inline void evaluate_closed_loop(const Scenario& sc, const CompiledStage& stage,
                                 const VectorXd& state, StepEvaluation& out) {
  const int n = sc.n;
  const Offset offset(sc.ell);
  out.x_bar.resize(2 * n);
  out.deriv.resize(5 * n);
  out.controls.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const double theta = state(5 * i + 2);
    out.x_bar(2 * i) = state(5 * i) + sc.ell * std::cos(theta);
    out.x_bar(2 * i + 1) = state(5 * i + 1) + sc.ell * std::sin(theta);
  }
  out.x_e = out.x_bar - stage.targets;
  VectorXd xi_e;
  if (sc.follower_form == FollowerForm::kCoefficient) {
    xi_e = stage.pinv * out.x_bar - stage.xi;
  }

  for (int i = 0; i < n; ++i) {
    const double theta = state(5 * i + 2);
    const Matrix2d r_i = input_matrix(theta, offset);
    const Vector2d delta_hat_i(state(5 * i + 3), state(5 * i + 4));
    const Vector2d u_bar =
        agent_control(i, out.x_bar.segment<2>(2 * i), stage.basis, stage.xi,
                      xi_e, out.x_e, sc.topology.weights, delta_hat_i, r_i,
                      sc.gains, sc.follower_form);
    ControlInput u = inverse_input_map(theta, offset, u_bar);
    if (sc.saturation) {
      u.v = std::clamp(u.v, -*sc.saturation, *sc.saturation);
    }
    out.controls[static_cast<std::size_t>(i)] = u;

    const Disturbance& d = sc.disturbances[static_cast<std::size_t>(i)];
    const double speed = u.v + d.d1;
    out.deriv(5 * i) = std::cos(theta) * speed;
    out.deriv(5 * i + 1) = std::sin(theta) * speed;
    out.deriv(5 * i + 2) = u.omega + d.d2;
    const Vector2d observer_rate =
        sc.gains.k2 * (r_i.transpose() * out.x_e.segment<2>(2 * i));
    out.deriv(5 * i + 3) = observer_rate.x();
    out.deriv(5 * i + 4) = observer_rate.y();
  }
}

inline std::vector<CompiledStage> compile_stages(const Scenario& sc) {
  const std::vector<double> s = sc.agent_parameters();
  std::vector<CompiledStage> stages;
  stages.reserve(sc.curves.size());
  for (const CurveSpec& spec : sc.curves) {
    CompiledStage stage;
    const CurveStage resolved = resolve_curve(spec);
    stage.start_time = resolved.start_time;
    stage.first_step = static_cast<std::size_t>(
        std::ceil(resolved.start_time / sc.dt - 1e-9));
    stage.family = resolved.family;
    stage.xi = resolved.xi;
    stage.basis = stack_basis(stage.family, s);
    stage.pinv = pseudoinverse(stage.basis.G);
    stage.targets = stage.basis.G * stage.xi;
    stage.bbox_diagonal =
        curve_bounds(stage.family, stage.xi).diagonal();
    stages.push_back(std::move(stage));
  }
  return stages;
}

inline VectorXd initial_state(const Scenario& sc, const CompiledStage& first) {
  const int n = sc.n;
  VectorXd state = VectorXd::Zero(5 * n);
  Rng rng(sc.seed);
  const double two_pi = 2.0 * std::numbers::pi;

  if (sc.initial.mode == InitialMode::kExplicit) {
    for (int i = 0; i < n; ++i) {
      const AgentState& a = sc.initial.states[static_cast<std::size_t>(i)];
      state(5 * i) = a.x;
      state(5 * i + 1) = a.y;
      state(5 * i + 2) = a.theta;
    }
  } else if (sc.initial.mode == InitialMode::kOnCurve) {
    for (int i = 0; i < n; ++i) {
      const double theta =
          sc.initial.theta ? *sc.initial.theta : rng.uniform(0.0, two_pi);
      state(5 * i) = first.targets(2 * i) - sc.ell * std::cos(theta);
      state(5 * i + 1) = first.targets(2 * i + 1) - sc.ell * std::sin(theta);
      state(5 * i + 2) = theta;
    }
  } else {
    std::array<double, 4> box;
    if (sc.initial.box) {
      box = *sc.initial.box;
    } else {
      const CurveBounds b = curve_bounds(first.family, first.xi);
      const double cx = 0.5 * (b.x_min + b.x_max);
      const double cy = 0.5 * (b.y_min + b.y_max);
      const double hx = 0.625 * (b.x_max - b.x_min);  // bbox inflated by 25%
      const double hy = 0.625 * (b.y_max - b.y_min);
      box = {cx - hx, cx + hx, cy - hy, cy + hy};
    }
    for (int i = 0; i < n; ++i) {
      state(5 * i) = rng.uniform(box[0], box[1]);
      state(5 * i + 1) = rng.uniform(box[2], box[3]);
      state(5 * i + 2) =
          sc.initial.theta ? *sc.initial.theta : rng.uniform(0.0, two_pi);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!sc.initial.delta_hat0.empty()) {
      state(5 * i + 3) = sc.initial.delta_hat0[static_cast<std::size_t>(i)].x();
      state(5 * i + 4) = sc.initial.delta_hat0[static_cast<std::size_t>(i)].y();
    }
  }
  return state;
}

}  // namespace detail

inline TrajectoryLog run_scenario(const Scenario& sc) {
  const ValidationReport report = validate_scenario(sc);
  if (!report.ok()) {
    throw ValidationError(report);
  }

  const std::vector<detail::CompiledStage> stages = detail::compile_stages(sc);
  const MatrixXd laplacian = build_laplacian(sc.topology);
  const LyapunovCertificate lyap =
      lyapunov_certificate(laplacian, leader_selector(sc.n));

  const int n = sc.n;
  const std::size_t total_steps =
      static_cast<std::size_t>(std::floor(sc.duration / sc.dt + 1e-9));

  TrajectoryLog log;
  log.n = n;
  log.dt = sc.dt;
  log.seed = sc.seed;
  const std::size_t records = total_steps + 1;
  log.t.reserve(records);
  log.err_norm.reserve(records);
  log.lyapunov.reserve(records);
  for (auto* column : {&log.x, &log.y, &log.theta_wrapped, &log.xbar, &log.ybar,
                       &log.v, &log.omega, &log.dhat1, &log.dhat2}) {
    column->reserve(records * static_cast<std::size_t>(n));
  }

  VectorXd delta_true(2 * n);  // (1/k2) d, for the monitor only
  for (int i = 0; i < n; ++i) {
    delta_true(2 * i) = sc.disturbances[static_cast<std::size_t>(i)].d1 / sc.gains.k2;
    delta_true(2 * i + 1) = sc.disturbances[static_cast<std::size_t>(i)].d2 / sc.gains.k2;
  }

  VectorXd state = detail::initial_state(sc, stages.front());
  detail::StepEvaluation eval, eval2, eval3, eval4;
  VectorXd mid(5 * n);
  std::size_t stage_idx = 0;

  for (std::size_t k = 0; k <= total_steps; ++k) {
    while (stage_idx + 1 < stages.size() &&
           k >= stages[stage_idx + 1].first_step) {
      ++stage_idx;
      log.switch_steps.push_back(stages[stage_idx].first_step);
    }
    const detail::CompiledStage& stage = stages[stage_idx];

    detail::evaluate_closed_loop(sc, stage, state, eval);

    const double t_k = static_cast<double>(k) * sc.dt;
    log.t.push_back(t_k);
    for (int i = 0; i < n; ++i) {
      log.x.push_back(state(5 * i));
      log.y.push_back(state(5 * i + 1));
      log.theta_wrapped.push_back(wrap_angle(state(5 * i + 2)));
      log.xbar.push_back(eval.x_bar(2 * i));
      log.ybar.push_back(eval.x_bar(2 * i + 1));
      log.v.push_back(eval.controls[static_cast<std::size_t>(i)].v);
      log.omega.push_back(eval.controls[static_cast<std::size_t>(i)].omega);
      log.dhat1.push_back(state(5 * i + 3));
      log.dhat2.push_back(state(5 * i + 4));
    }
    log.err_norm.push_back(eval.x_e.norm());
    VectorXd delta_hat(2 * n);
    for (int i = 0; i < n; ++i) {
      delta_hat(2 * i) = state(5 * i + 3);
      delta_hat(2 * i + 1) = state(5 * i + 4);
    }
    log.lyapunov.push_back(
        lyapunov_value(eval.x_e, delta_hat - delta_true, lyap.P));

    if (k == total_steps) {
      break;
    }

    if (sc.integrator == Integrator::kEuler) {
      state += sc.dt * eval.deriv;
    } else {
      mid = state + 0.5 * sc.dt * eval.deriv;
      detail::evaluate_closed_loop(sc, stage, mid, eval2);
      mid = state + 0.5 * sc.dt * eval2.deriv;
      detail::evaluate_closed_loop(sc, stage, mid, eval3);
      mid = state + sc.dt * eval3.deriv;
      detail::evaluate_closed_loop(sc, stage, mid, eval4);
      state += sc.dt / 6.0 *
               (eval.deriv + 2.0 * eval2.deriv + 2.0 * eval3.deriv + eval4.deriv);
    }
    if (!state.allFinite()) {
      throw NumericalAbortError(
          "run_scenario: non-finite state at step " + std::to_string(k + 1) +
              " (t = " + std::to_string((k + 1) * sc.dt) + ")",
          k + 1);
    }
  }

  // Summary metrics.
  log.terminal_err_norm = log.err_norm.back();
  log.terminal_theta.resize(static_cast<std::size_t>(n));
  log.terminal_distance.resize(static_cast<std::size_t>(n));
  const std::size_t last = log.steps() - 1;
  const detail::CompiledStage& final_stage = stages.back();
  for (int i = 0; i < n; ++i) {
    log.terminal_theta[static_cast<std::size_t>(i)] =
        log.agent_value(log.theta_wrapped, last, i);
    const Vector2d xb(log.agent_value(log.xbar, last, i),
                      log.agent_value(log.ybar, last, i));
    log.terminal_distance[static_cast<std::size_t>(i)] =
        (xb - Vector2d(final_stage.targets.segment<2>(2 * i))).norm();
  }
  log.settling_time.assign(stages.size(),
                           std::numeric_limits<double>::quiet_NaN());
  log.settling_threshold.resize(stages.size());
  for (std::size_t si = 0; si < stages.size(); ++si) {
    const double threshold = 0.01 * stages[si].bbox_diagonal;
    log.settling_threshold[si] = threshold;
    const std::size_t begin = stages[si].first_step;
    const std::size_t end =
        si + 1 < stages.size() ? stages[si + 1].first_step : log.steps();
    std::size_t settle = end;
    for (std::size_t k = end; k-- > begin;) {
      if (log.err_norm[k] < threshold) {
        settle = k;
      } else {
        break;
      }
    }
    if (settle < end) {
      log.settling_time[si] = log.t[settle];
    }
  }
  return log;
}

/// Terminal distance of each agent to its assigned curve point.
struct UniformityReport {
  std::vector<double> distances;
  double max_distance = 0.0;
  double tolerance = 0.0;
  bool completed = false;  // all distances finite
  bool pass = false;       // completed and max < tolerance
};

inline UniformityReport uniform_distribution_check(
    const TrajectoryLog& log, const BasisFamily& family, const VectorXd& xi,
    std::span<const double> s, double tolerance = 1e-2) {
  UniformityReport report;
  report.tolerance = tolerance;
  const std::size_t last = log.steps() - 1;
  report.completed = true;
  for (int i = 0; i < log.n; ++i) {
    const Vector2d target =
        evaluate_curve(family, xi, s[static_cast<std::size_t>(i)]);
    const Vector2d xb(log.agent_value(log.xbar, last, i),
                      log.agent_value(log.ybar, last, i));
    const double dist = (xb - target).norm();
    report.distances.push_back(dist);
    if (!std::isfinite(dist)) {
      report.completed = false;
    }
    report.max_distance = std::max(report.max_distance, dist);
  }
  report.pass = report.completed && report.max_distance < tolerance;
  return report;
}

/// One grid point of a parameter sweep.
struct SweepResult {
  std::map<std::string, double> params;
  bool ok = false;
  std::string error;
  double terminal_err_norm = std::numeric_limits<double>::quiet_NaN();
  double first_settling_time = std::numeric_limits<double>::quiet_NaN();
  double terminal_lyapunov = std::numeric_limits<double>::quiet_NaN();
};

inline void apply_sweep_parameter(Scenario& sc, const std::string& key,
                                  double value) {
  if (key == "k1") {
    sc.gains.k1 = value;
  } else if (key == "k2") {
    sc.gains.k2 = value;
  } else if (key == "ell") {
    sc.ell = value;
  } else if (key == "dt") {
    sc.dt = value;
  } else if (key == "duration") {
    sc.duration = value;
  } else if (key == "seed") {
    sc.seed = static_cast<std::uint64_t>(value);
  } else if (key == "saturation") {
    sc.saturation = value;
  } else {
    throw std::invalid_argument("sweep: unknown parameter '" + key + "'");
  }
}

/// Run the scenario once per grid point (cross product, grid order).
/// Individual failures are recorded and the sweep continues.
inline std::vector<SweepResult> sweep(
    const Scenario& base, const std::vector<std::string>& keys,
    const std::vector<std::vector<double>>& values) {
  if (keys.size() != values.size()) {
    throw std::invalid_argument("sweep: one value list per key required");
  }
  if (keys.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  for (const auto& v : values) {
    if (v.empty()) {
      throw std::invalid_argument("sweep: empty value list");
    }
  }
  std::vector<std::size_t> index(keys.size(), 0);
  std::vector<SweepResult> results;
  bool done = false;
  while (!done) {
    SweepResult result;
    Scenario sc = base;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      result.params[keys[k]] = values[k][index[k]];
      apply_sweep_parameter(sc, keys[k], values[k][index[k]]);
    }
    try {
      const TrajectoryLog log = run_scenario(sc);
      result.ok = true;
      result.terminal_err_norm = log.terminal_err_norm;
      result.first_settling_time = log.settling_time.front();
      result.terminal_lyapunov = log.lyapunov.back();
    } catch (const std::exception& e) {
      result.ok = false;
      result.error = e.what();
    }
    results.push_back(std::move(result));
    // Advance the last key fastest.
    for (std::size_t k = keys.size(); k-- > 0;) {
      if (++index[k] < values[k].size()) {
        break;
      }
      index[k] = 0;
      if (k == 0) {
        done = true;
      }
    }
  }
  return results;
}

}  // namespace curveform
