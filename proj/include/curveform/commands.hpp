#pragma once

// Command implementations behind the CLI subcommands (fit, check-graph,
// simulate, eval-curve, sweep), plus the run-artifact writers. Kept as
// library functions so they can be exercised directly in tests; the binary
// in tools/ is a thin argument-parsing wrapper.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "curveform/csv.hpp"
#include "curveform/scenario_file.hpp"
#include "curveform/simulate.hpp"

namespace curveform {

/// Log verbosity from the CURVEFORM_LOG environment variable:
/// 0 = quiet, 1 = info (default), 2 = debug.
inline int log_verbosity() {
  static const int level = [] {
    const char* env = std::getenv("CURVEFORM_LOG");
    if (env == nullptr || *env == '\0') {
      return 1;
    }
    return std::atoi(env);
  }();
  return level;
}

inline void log_info(const std::string& message) {
  if (log_verbosity() >= 1) {
    std::cerr << "curveform: " << message << "\n";
  }
}

namespace detail {

inline void append_double(std::string& buf, double value) {
  char tmp[32];
  const auto res = std::to_chars(tmp, tmp + sizeof(tmp), value);
  buf.append(tmp, res.ptr);
}

}  // namespace detail

struct RunArtifacts {
  std::string trajectory_csv;
  std::string summary_path;
  std::optional<std::string> metrics_csv;
};

inline void write_trajectory_csv(const std::string& path,
                                 const TrajectoryLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot write trajectory file: " + path);
  }
  out << "t,agent,x,y,theta_wrapped,xbar,ybar,v,omega,dhat1,dhat2\n";
  std::string row;
  row.reserve(256);
  for (std::size_t k = 0; k < log.steps(); ++k) {
    for (int i = 0; i < log.n; ++i) {
      row.clear();
      detail::append_double(row, log.t[k]);
      row += ',';
      row += std::to_string(i + 1);
      for (const auto* column : {&log.x, &log.y, &log.theta_wrapped, &log.xbar,
                                 &log.ybar, &log.v, &log.omega, &log.dhat1,
                                 &log.dhat2}) {
        row += ',';
        detail::append_double(row, log.agent_value(*column, k, i));
      }
      row += '\n';
      out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
  }
}

inline void write_metrics_csv(const std::string& path,
                              const TrajectoryLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot write metrics file: " + path);
  }
  out << "t,err_norm,V\n";
  std::string row;
  for (std::size_t k = 0; k < log.steps(); ++k) {
    row.clear();
    detail::append_double(row, log.t[k]);
    row += ',';
    detail::append_double(row, log.err_norm[k]);
    row += ',';
    detail::append_double(row, log.lyapunov[k]);
    row += '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

inline void write_summary(const std::string& path, const Scenario& sc,
                          const TrajectoryLog& log) {
  std::ofstream out(path);
  if (!out) {
    throw std::ios_base::failure("cannot write summary file: " + path);
  }
  out << "# curveform summary v1\n";
  out << "scenario = " << sc.name << "\n";
  out << "agents = " << sc.n << "\n";
  out << "seed = " << sc.seed << "\n";
  out << "k1 = " << format_double(sc.gains.k1) << "\n";
  out << "k2 = " << format_double(sc.gains.k2) << "\n";
  out << "ell = " << format_double(sc.ell) << "\n";
  out << "dt = " << format_double(sc.dt) << "\n";
  out << "duration = " << format_double(sc.duration) << "\n";
  out << "integrator = "
      << (sc.integrator == Integrator::kEuler ? "euler" : "rk4") << "\n";
  out << "follower_form = "
      << (sc.follower_form == FollowerForm::kCoefficient ? "coefficient"
                                                         : "difference")
      << "\n";
  if (sc.saturation) {
    out << "saturation = " << format_double(*sc.saturation) << "\n";
  }
  for (int i = 0; i < sc.n; ++i) {
    const auto& d = sc.disturbances[static_cast<std::size_t>(i)];
    out << "d_" << (i + 1) << " = " << format_double(d.d1) << ' '
        << format_double(d.d2) << "\n";
  }
  out << "steps = " << log.steps() << "\n";
  out << "terminal_err_norm = " << format_double(log.terminal_err_norm)
      << "\n";
  out << "terminal_theta =";
  for (const double th : log.terminal_theta) {
    out << ' ' << format_double(th);
  }
  out << "\n";
  out << "terminal_distance =";
  for (const double dist : log.terminal_distance) {
    out << ' ' << format_double(dist);
  }
  out << "\n";
  for (std::size_t si = 0; si < log.settling_time.size(); ++si) {
    out << "settling_time_" << (si + 1) << " = "
        << format_double(log.settling_time[si]) << "\n";
    out << "settling_threshold_" << (si + 1) << " = "
        << format_double(log.settling_threshold[si]) << "\n";
  }
  for (std::size_t k = 0; k < log.switch_steps.size(); ++k) {
    out << "switch_time_" << (k + 1) << " = "
        << format_double(static_cast<double>(log.switch_steps[k]) * log.dt)
        << "\n";
  }
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string samples_csv;
  std::string family = "fourier";  // fourier | polynomial
  int order = 6;                   // harmonics or degree
  std::string out_path;
};

inline int cmd_fit(const FitOptions& opt, std::ostream& out) {
  if (opt.family != "fourier" && opt.family != "polynomial") {
    throw std::invalid_argument("fit: unknown family '" + opt.family + "'");
  }
  const SampleSet samples = read_samples_csv(opt.samples_csv);
  const BasisFamily family = opt.family == "polynomial"
                                 ? BasisFamily::Polynomial(opt.order)
                                 : BasisFamily::Fourier(opt.order);
  const VectorXd xi = fit_coefficients(samples, family);
  double sq_sum = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double r =
        (evaluate_curve(family, xi, samples.s[k]) - samples.points[k]).norm();
    worst = std::max(worst, r);
    sq_sum += r * r;
  }
  const double rms = std::sqrt(sq_sum / static_cast<double>(samples.size()));
  write_curve_file(opt.out_path, family, xi, worst, rms);
  out << "fitted " << xi.size() << " coefficients from " << samples.size()
      << " samples\n";
  out << "residual_max = " << format_double(worst) << "\n";
  out << "residual_rms = " << format_double(rms) << "\n";
  log_info("wrote " + opt.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// check-graph

struct CheckGraphOptions {
  std::string topology_path;
};

inline int cmd_check_graph(const CheckGraphOptions& opt, std::ostream& out) {
  const DirectedTopology topology = read_topology_file(opt.topology_path);
  const bool rooted = has_rooted_spanning_tree(topology, 1);
  out << "agents = " << topology.n << "\n";
  out << "spanning_tree_rooted_at_1 = " << (rooted ? "yes" : "no") << "\n";
  if (!rooted) {
    out << "error: no rooted spanning tree\n";
    return 2;
  }
  const MatrixXd laplacian = build_laplacian(topology);
  const LyapunovCertificate t1 =
      lyapunov_certificate(laplacian, leader_selector(topology.n));
  auto print_vector = [&](const char* name, const VectorXd& v) {
    out << name << " =";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out << ' ' << format_double(v(i));
    }
    out << "\n";
  };
  print_vector("q", t1.q);
  print_vector("p", t1.p);
  print_vector("P_diag", t1.P.diagonal());
  out << "min_eigenvalue_P = " << format_double(t1.min_eigenvalue_P) << "\n";
  out << "min_eigenvalue_Q = " << format_double(t1.min_eigenvalue_Q) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
};

inline RunArtifacts cmd_simulate(const SimulateOptions& opt,
                                 std::ostream& out) {
  namespace fs = std::filesystem;
  Scenario sc = read_scenario_file(opt.scenario_path);
  if (opt.seed) {
    sc.seed = *opt.seed;
  }
  if (opt.dt) {
    sc.dt = *opt.dt;
  }
  if (opt.duration) {
    sc.duration = *opt.duration;
  }
  fs::create_directories(opt.out_dir);
  log_info("running scenario '" + sc.name + "' (" + std::to_string(sc.n) +
           " agents, duration " + format_double(sc.duration) + " s)");
  const TrajectoryLog log = run_scenario(sc);

  RunArtifacts artifacts;
  artifacts.trajectory_csv = (fs::path(opt.out_dir) / "trajectory.csv").string();
  artifacts.metrics_csv = (fs::path(opt.out_dir) / "metrics.csv").string();
  artifacts.summary_path = (fs::path(opt.out_dir) / "summary.txt").string();
  write_trajectory_csv(artifacts.trajectory_csv, log);
  write_metrics_csv(*artifacts.metrics_csv, log);
  write_summary(artifacts.summary_path, sc, log);
  out << "terminal_err_norm = " << format_double(log.terminal_err_norm)
      << "\n";
  out << "wrote " << artifacts.trajectory_csv << "\n";
  out << "wrote " << *artifacts.metrics_csv << "\n";
  out << "wrote " << artifacts.summary_path << "\n";
  return artifacts;
}

// ---------------------------------------------------------------------------
// eval-curve

struct EvalCurveOptions {
  std::string coeff_path;
  std::vector<double> s_values;  // explicit list; wins over count
  int count = 0;                 // uniform count including both endpoints
  std::string out_path;
};

inline int cmd_eval_curve(const EvalCurveOptions& opt, std::ostream& out) {
  const CurveFile curve = read_curve_file(opt.coeff_path);
  std::vector<double> s = opt.s_values;
  if (s.empty()) {
    if (opt.count < 1) {
      throw std::invalid_argument("eval-curve: need --s or --count >= 1");
    }
    if (opt.count == 1) {
      s.push_back(0.0);
    } else {
      for (int k = 0; k < opt.count; ++k) {
        s.push_back(static_cast<double>(k) / (opt.count - 1));
      }
    }
  }
  for (const double si : s) {
    if (si < 0.0 || si > 1.0) {
      throw std::invalid_argument("eval-curve: s outside [0, 1]: " +
                                  format_double(si));
    }
  }
  std::ofstream file(opt.out_path);
  if (!file) {
    throw std::ios_base::failure("cannot write points file: " + opt.out_path);
  }
  file << "s,x,y\n";
  for (const double si : s) {
    const Vector2d c = evaluate_curve(curve.family, curve.xi, si);
    file << format_double(si) << ',' << format_double(c.x()) << ','
         << format_double(c.y()) << '\n';
  }
  out << "wrote " << s.size() << " points to " << opt.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string scenario_path;
  std::string out_dir = ".";
  std::vector<std::string> grid;  // "key=v1,v2,..." entries
};

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out) {
  namespace fs = std::filesystem;
  const Scenario base = read_scenario_file(opt.scenario_path);
  std::vector<std::string> keys;
  std::vector<std::vector<double>> values;
  for (const std::string& spec : opt.grid) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("sweep: grid entry must be key=v1,v2,...");
    }
    keys.push_back(trim(spec.substr(0, eq)));
    std::vector<double> list;
    std::istringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      list.push_back(parse_double(trim(item), 0));
    }
    if (list.empty()) {
      throw std::invalid_argument("sweep: empty value list for " + keys.back());
    }
    values.push_back(std::move(list));
  }
  const auto results = sweep(base, keys, values);
  fs::create_directories(opt.out_dir);
  const std::string path = (fs::path(opt.out_dir) / "sweep.csv").string();
  std::ofstream file(path);
  if (!file) {
    throw std::ios_base::failure("cannot write sweep file: " + path);
  }
  for (const std::string& key : keys) {
    file << key << ',';
  }
  file << "status,terminal_err_norm,settling_time,terminal_V,error\n";
  int failures = 0;
  for (const auto& r : results) {
    for (const std::string& key : keys) {
      file << format_double(r.params.at(key)) << ',';
    }
    if (r.ok) {
      file << "ok," << format_double(r.terminal_err_norm) << ','
           << format_double(r.first_settling_time) << ','
           << format_double(r.terminal_lyapunov) << ",\n";
    } else {
      std::string message = r.error;
      for (char& c : message) {
        if (c == ',' || c == '\n') {
          c = ';';
        }
      }
      file << "failed,nan,nan,nan," << message << "\n";
      ++failures;
    }
  }
  out << "ran " << results.size() << " grid points (" << failures
      << " failed), wrote " << path << "\n";
  return 0;
}

}  // namespace curveform
