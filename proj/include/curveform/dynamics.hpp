#pragma once

// Unicycle kinematics with constant input disturbance, and the offset
// virtual point whose dynamics reduce to a disturbed single integrator:
//   x_dot = cos(theta) (v + d1), y_dot = sin(theta) (v + d1),
//   theta_dot = omega + d2,
//   xbar = (x + l cos(theta), y + l sin(theta)).

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "curveform/linalg.hpp"

namespace curveform {

struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, unwrapped; wrap only when reporting
};

/// Constant input disturbance on (v, omega).
struct Disturbance {
  double d1 = 0.0;  // m/s
  double d2 = 0.0;  // rad/s
};

struct ControlInput {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

/// Offset of the virtual control point along the heading; must be nonzero
/// for the input matrix R to be invertible.
class Offset {
 public:
  explicit Offset(double ell) : ell_(ell) {
    if (ell == 0.0) {
      throw std::invalid_argument("Offset: ell must be nonzero");
    }
  }

  double value() const { return ell_; }

 private:
  double ell_;
};

enum class Integrator { kEuler, kRk4 };

/// Wrap an angle to [0, 2*pi) for reporting.
inline double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) {
    w += two_pi;
  }
  return w;
}

/// Virtual control point xbar = x + l [cos(theta), sin(theta)].
inline Vector2d virtual_point(const AgentState& state, const Offset& offset) {
  const double l = offset.value();
  return {state.x + l * std::cos(state.theta),
          state.y + l * std::sin(state.theta)};
}

/// R(theta) = [[cos, -l sin], [sin, l cos]]; det R = l.
inline Matrix2d input_matrix(double theta, const Offset& offset) {
  const double l = offset.value();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix2d r;
  r << c, -l * s, s, l * c;
  return r;
}

/// u = R(theta)^{-1} ubar, using the closed-form inverse
/// [[cos, sin], [-sin/l, cos/l]].
inline ControlInput inverse_input_map(double theta, const Offset& offset,
                                      const Vector2d& u_bar) {
  const double l = offset.value();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * u_bar.x() + s * u_bar.y(),
          (-s * u_bar.x() + c * u_bar.y()) / l};
}

namespace detail {

struct StateDerivative {
  double dx, dy, dtheta;
};

inline StateDerivative unicycle_rhs(const AgentState& state,
                                    const ControlInput& u,
                                    const Disturbance& d) {
  const double speed = u.v + d.d1;
  return {std::cos(state.theta) * speed, std::sin(state.theta) * speed,
          u.omega + d.d2};
}

}  // namespace detail

/// Advance the unicycle one step with u and d held constant over the step.
inline AgentState step_state(const AgentState& state, const ControlInput& u,
                             const Disturbance& d, double dt,
                             Integrator method = Integrator::kEuler) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_state: dt must be positive");
  }
  const auto rhs = [&](const AgentState& at) {
    return detail::unicycle_rhs(at, u, d);
  };
  if (method == Integrator::kEuler) {
    const auto k1 = rhs(state);
    return {state.x + dt * k1.dx, state.y + dt * k1.dy,
            state.theta + dt * k1.dtheta};
  }
  const auto k1 = rhs(state);
  const auto at2 = AgentState{state.x + 0.5 * dt * k1.dx,
                              state.y + 0.5 * dt * k1.dy,
                              state.theta + 0.5 * dt * k1.dtheta};
  const auto k2 = rhs(at2);
  const auto at3 = AgentState{state.x + 0.5 * dt * k2.dx,
                              state.y + 0.5 * dt * k2.dy,
                              state.theta + 0.5 * dt * k2.dtheta};
  const auto k3 = rhs(at3);
  const auto at4 = AgentState{state.x + dt * k3.dx, state.y + dt * k3.dy,
                              state.theta + dt * k3.dtheta};
  const auto k4 = rhs(at4);
  return {state.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
          state.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
          state.theta + dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta +
                                    2.0 * k3.dtheta + k4.dtheta)};
}

}  // namespace curveform
