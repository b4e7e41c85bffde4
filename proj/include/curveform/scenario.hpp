#pragma once

// Scenario description: which curve(s) to form and when, the interaction
// topology, gains, disturbances, integration settings, and initial states.
// Curves can be given as explicit coefficients, as samples to fit, or
// through one of two analytic generators (radial Fourier rings and cubic
// Bezier segments).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curveform/control.hpp"
#include "curveform/curve.hpp"
#include "curveform/dynamics.hpp"
#include "curveform/topology.hpp"

namespace curveform {

/// One term amplitude * trig(2*pi*harmonic*s) of a radial profile.
struct RadialTerm {
  int harmonic = 1;
  double amplitude = 0.0;
};

/**
 * @brief Closed-curve generator of the form
 *   c_x(s) = gx(s) * cos(2*pi*s) + center_x
 *   c_y(s) = gy(s) * sin(2*pi*s) + center_y
 * where gx, gy are constants plus short sin/cos series in s.
 */
struct RadialFourierGenerator {
  double x_const = 0.0;
  double y_const = 0.0;
  std::vector<RadialTerm> x_cos, x_sin, y_cos, y_sin;
  Vector2d center = Vector2d::Zero();

  Vector2d operator()(double s) const {
    const double two_pi = 2.0 * std::numbers::pi;
    double gx = x_const;
    for (const auto& t : x_cos) gx += t.amplitude * std::cos(two_pi * t.harmonic * s);
    for (const auto& t : x_sin) gx += t.amplitude * std::sin(two_pi * t.harmonic * s);
    double gy = y_const;
    for (const auto& t : y_cos) gy += t.amplitude * std::cos(two_pi * t.harmonic * s);
    for (const auto& t : y_sin) gy += t.amplitude * std::sin(two_pi * t.harmonic * s);
    return {gx * std::cos(two_pi * s) + center.x(),
            gy * std::sin(two_pi * s) + center.y()};
  }
};

struct BezierGenerator {
  std::array<Vector2d, 4> control;
};

/// One stage of the curve schedule, before coefficient resolution. Exactly
/// one of coefficients / radial / bezier / samples must be set.
struct CurveSpec {
  double start_time = 0.0;
  BasisFamily family = BasisFamily::Fourier(1);
  std::optional<VectorXd> coefficients;
  std::optional<RadialFourierGenerator> radial;
  std::optional<BezierGenerator> bezier;
  std::optional<SampleSet> samples;
  int fit_samples = 200;  // sample count when fitting a generator
};

/// A resolved stage: the coefficients the controller tracks from start_time.
struct CurveStage {
  double start_time = 0.0;
  BasisFamily family = BasisFamily::Fourier(1);
  VectorXd xi;
};

/// Turn a CurveSpec into tracked coefficients, fitting where needed.
inline CurveStage resolve_curve(const CurveSpec& spec) {
  CurveStage stage;
  stage.start_time = spec.start_time;
  stage.family = spec.family;
  const int sources = (spec.coefficients ? 1 : 0) + (spec.radial ? 1 : 0) +
                      (spec.bezier ? 1 : 0) + (spec.samples ? 1 : 0);
  if (sources != 1) {
    throw std::invalid_argument(
        "resolve_curve: exactly one curve source required, got " +
        std::to_string(sources));
  }
  if (spec.coefficients) {
    if (spec.coefficients->size() != spec.family.coefficient_count()) {
      throw std::invalid_argument(
          "resolve_curve: coefficient vector length " +
          std::to_string(spec.coefficients->size()) + " does not match 2H = " +
          std::to_string(spec.family.coefficient_count()));
    }
    stage.xi = *spec.coefficients;
  } else if (spec.bezier) {
    if (spec.family.kind != BasisKind::kPolynomial) {
      throw std::invalid_argument(
          "resolve_curve: bezier generator requires a polynomial family");
    }
    stage.xi = bezier_to_polynomial(spec.bezier->control, spec.family.order);
  } else {
    SampleSet samples;
    if (spec.samples) {
      samples = *spec.samples;
    } else {
      const int count = spec.fit_samples;
      if (count <= spec.family.coefficient_count()) {
        throw std::invalid_argument(
            "resolve_curve: fit_samples must exceed 2H");
      }
      samples.s.reserve(static_cast<std::size_t>(count));
      samples.points.reserve(static_cast<std::size_t>(count));
      for (int k = 0; k < count; ++k) {
        const double s = static_cast<double>(k) / count;
        samples.s.push_back(s);
        samples.points.push_back((*spec.radial)(s));
      }
    }
    stage.xi = fit_coefficients(samples, spec.family);
  }
  return stage;
}

/// Axis-aligned bounding box of a resolved curve, sampled densely.
struct CurveBounds {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;

  double diagonal() const {
    return std::hypot(x_max - x_min, y_max - y_min);
  }
};

inline CurveBounds curve_bounds(const BasisFamily& family, const VectorXd& xi,
                                int samples = 512) {
  CurveBounds b;
  for (int k = 0; k <= samples; ++k) {
    const Vector2d c =
        evaluate_curve(family, xi, static_cast<double>(k) / samples);
    if (k == 0) {
      b = {c.x(), c.x(), c.y(), c.y()};
    } else {
      b.x_min = std::min(b.x_min, c.x());
      b.x_max = std::max(b.x_max, c.x());
      b.y_min = std::min(b.y_min, c.y());
      b.y_max = std::max(b.y_max, c.y());
    }
  }
  return b;
}

enum class InitialMode { kRandomBox, kExplicit, kOnCurve };

struct InitialSpec {
  InitialMode mode = InitialMode::kRandomBox;
  std::optional<std::array<double, 4>> box;  // xmin xmax ymin ymax
  std::optional<double> theta;               // fixed heading; random if unset
  std::vector<AgentState> states;            // explicit mode
  std::vector<Vector2d> delta_hat0;          // observer init; zeros if empty
};

struct Scenario {
  std::string name = "scenario";
  int n = 0;
  DirectedTopology topology;
  Gains gains;
  double ell = 0.01;
  std::vector<Disturbance> disturbances;  // size n
  std::vector<CurveSpec> curves;
  double dt = 1e-3;
  double duration = 100.0;
  Integrator integrator = Integrator::kEuler;
  std::optional<double> saturation;  // |v| clamp, m/s
  std::uint64_t seed = 0;
  FollowerForm follower_form = FollowerForm::kCoefficient;
  bool endpoint_inclusive = false;
  InitialSpec initial;

  std::vector<double> agent_parameters() const {
    return endpoint_inclusive ? assign_parameters_endpoint_inclusive(n)
                              : assign_parameters(n);
  }
};

/// Full diagnostic list from scenario validation, not just the first failure.
struct ValidationReport {
  std::vector<std::string> failures;
  std::vector<AssumptionReport> curve_assumptions;  // one per resolvable stage

  bool ok() const { return failures.empty(); }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& f : failures) {
      os << "  - " << f << "\n";
    }
    return os.str();
  }
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const ValidationReport& report)
      : std::runtime_error("scenario validation failed:\n" +
                           report.to_string()),
        report_(report) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

inline void validate_scenario(const Scenario& sc, ValidationReport& report) {
  auto fail = [&](const std::string& msg) { report.failures.push_back(msg); };

  if (sc.n < 1) {
    fail("agent count must be >= 1, got " + std::to_string(sc.n));
    return;  // nothing else is meaningful
  }
  if (sc.topology.n != sc.n || sc.topology.weights.rows() != sc.n ||
      sc.topology.weights.cols() != sc.n) {
    fail("topology size does not match agent count");
    return;
  }
  if (sc.topology.weights.minCoeff() < 0.0) {
    fail("topology has negative weights");
  }
  if (sc.topology.weights.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    fail("topology has self-loops");
  }
  if (sc.topology.weights.row(0).cwiseAbs().maxCoeff() > 0.0) {
    fail("leader (agent 1) must not receive from anyone");
  }
  if (!has_rooted_spanning_tree(sc.topology, 1)) {
    fail("no spanning tree rooted at agent 1");
  }
  if (!(sc.gains.k1 > 0.0)) {
    fail("k1 must be positive, got " + std::to_string(sc.gains.k1));
  }
  if (!(sc.gains.k2 > 0.0)) {
    fail("k2 must be positive, got " + std::to_string(sc.gains.k2));
  }
  if (sc.ell == 0.0) {
    fail("ell must be nonzero");
  }
  if (!(sc.dt > 0.0)) {
    fail("dt must be positive, got " + std::to_string(sc.dt));
  }
  if (!(sc.duration > 0.0)) {
    fail("duration must be positive, got " + std::to_string(sc.duration));
  }
  if (sc.saturation && !(*sc.saturation > 0.0)) {
    fail("saturation limit must be positive when set");
  }
  if (static_cast<int>(sc.disturbances.size()) != sc.n) {
    fail("need one disturbance entry per agent");
  }
  if (sc.curves.empty()) {
    fail("curve schedule is empty");
  } else {
    if (sc.curves.front().start_time != 0.0) {
      fail("first curve must start at t = 0");
    }
    for (std::size_t i = 1; i < sc.curves.size(); ++i) {
      if (!(sc.curves[i].start_time > sc.curves[i - 1].start_time)) {
        fail("curve start times must be strictly increasing");
      }
    }
    if (sc.curves.back().start_time >= sc.duration) {
      fail("last curve starts at or after the scenario end");
    }
  }
  if (sc.initial.mode == InitialMode::kExplicit &&
      static_cast<int>(sc.initial.states.size()) != sc.n) {
    fail("explicit initial states must list all agents");
  }
  if (sc.initial.box) {
    const auto& b = *sc.initial.box;
    if (!(b[0] < b[1]) || !(b[2] < b[3])) {
      fail("initial box must satisfy xmin < xmax and ymin < ymax");
    }
  }
  if (!sc.initial.delta_hat0.empty() &&
      static_cast<int>(sc.initial.delta_hat0.size()) != sc.n) {
    fail("observer initialization must list all agents (or none)");
  }

  // Per-curve assumption checks need the resolved coefficients.
  std::vector<double> s;
  try {
    s = sc.agent_parameters();
  } catch (const std::exception& e) {
    fail(std::string("parameter assignment failed: ") + e.what());
    return;
  }
  for (std::size_t i = 0; i < sc.curves.size(); ++i) {
    const std::string label = "curve " + std::to_string(i + 1);
    CurveStage stage;
    try {
      stage = resolve_curve(sc.curves[i]);
    } catch (const std::exception& e) {
      fail(label + ": " + e.what());
      continue;
    }
    const StackedBasis stacked = stack_basis(stage.family, s);
    const AssumptionReport assumptions =
        validate_assumptions(stacked.G, sc.n, stage.family.basis_count());
    report.curve_assumptions.push_back(assumptions);
    if (!assumptions.agent_count_ok) {
      fail(label + ": n = " + std::to_string(sc.n) + " exceeds H = " +
           std::to_string(stage.family.basis_count()));
    }
    if (!assumptions.rank_ok) {
      fail(label + ": stacked basis rank " + std::to_string(assumptions.rank) +
           " < " + std::to_string(assumptions.required_rank) +
           " (sigma_min = " + std::to_string(assumptions.sigma_min) + ")");
    }
  }
}

inline ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport report;
  validate_scenario(sc, report);
  return report;
}

}  // namespace curveform
