#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "curveform/commands.hpp"
#include "helpers.hpp"

using namespace curveform;
using testutil::TempDir;
using testutil::read_text;
using testutil::write_text;

namespace {

int run_binary(const std::string& args) {
  const std::string cmd =
      std::string(CURVEFORM_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string shipped(const std::string& name) {
  return (std::filesystem::path(CURVEFORM_SCENARIO_DIR) / name).string();
}

}  // namespace

TEST_CASE("fit command writes an exact, re-readable curve file", "[cli]") {
  TempDir dir("fit");
  const std::string samples = dir.file("ring.csv");
  write_samples_csv(samples, testutil::sample_curve(testutil::wobble_ring, 200));

  FitOptions opt;
  opt.samples_csv = samples;
  opt.family = "fourier";
  opt.order = 6;
  opt.out_path = dir.file("ring.curve");
  std::ostringstream out;
  REQUIRE(cmd_fit(opt, out) == 0);
  REQUIRE(out.str().find("residual_max") != std::string::npos);

  const CurveFile fitted = read_curve_file(opt.out_path);
  REQUIRE(fitted.family == BasisFamily::Fourier(6));
  REQUIRE(*fitted.residual_max < 1e-6);

  // Re-fitting from the file's own coefficients reproduces them bit-exactly.
  const VectorXd direct = fit_coefficients(
      testutil::sample_curve(testutil::wobble_ring, 200), fitted.family);
  for (Eigen::Index i = 0; i < direct.size(); ++i) {
    REQUIRE(fitted.xi(i) == direct(i));
  }
}

TEST_CASE("fit command rejects bad sample files", "[cli]") {
  TempDir dir("fit_bad");
  SECTION("header-only file has too few samples") {
    const std::string samples = dir.file("empty.csv");
    write_text(samples, "s,x,y\n");
    FitOptions opt{samples, "fourier", 2, dir.file("out.curve")};
    std::ostringstream out;
    REQUIRE_THROWS_AS(cmd_fit(opt, out), std::invalid_argument);
  }
  SECTION("NaN sample names the offending row") {
    const std::string samples = dir.file("nan.csv");
    write_text(samples, "s,x,y\n0,1,2\n0.1,nan,2\n");
    FitOptions opt{samples, "fourier", 2, dir.file("out.curve")};
    std::ostringstream out;
    try {
      cmd_fit(opt, out);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line() == 3);
    }
  }
  SECTION("wrong header") {
    const std::string samples = dir.file("hdr.csv");
    write_text(samples, "x,y,s\n0,1,2\n");
    FitOptions opt{samples, "fourier", 2, dir.file("out.curve")};
    std::ostringstream out;
    REQUIRE_THROWS_AS(cmd_fit(opt, out), ParseError);
  }
}

TEST_CASE("check-graph prints the lyapunov construction", "[cli]") {
  TempDir dir("graph");
  SECTION("two-node chain") {
    const std::string topo = dir.file("chain2.topo");
    write_text(topo, "# curveform topology v1\nagents = 2\nedges = 2 1 1\n");
    std::ostringstream out;
    REQUIRE(cmd_check_graph({topo}, out) == 0);
    const std::string text = out.str();
    REQUIRE(text.find("spanning_tree_rooted_at_1 = yes") != std::string::npos);
    REQUIRE(text.find("q = 1 2") != std::string::npos);
    REQUIRE(text.find("p = 2 1") != std::string::npos);
    REQUIRE(text.find("P_diag = 2 0.5") != std::string::npos);
  }
  SECTION("disconnected graph exits nonzero") {
    const std::string topo = dir.file("dis.topo");
    write_text(topo, "# curveform topology v1\nagents = 3\nedges = 2 1 1\n");
    std::ostringstream out;
    REQUIRE(cmd_check_graph({topo}, out) == 2);
    REQUIRE(out.str().find("no rooted spanning tree") != std::string::npos);
  }
}

TEST_CASE("eval-curve tabulates points", "[cli]") {
  TempDir dir("eval");
  const std::string coeffs = dir.file("bezier.curve");
  const std::array<Vector2d, 4> control = {
      Vector2d{3.5, 3.0}, Vector2d{-0.5, -4.0}, Vector2d{-2.0, 6.0},
      Vector2d{-2.0, -1.0}};
  write_curve_file(coeffs, BasisFamily::Polynomial(6),
                   bezier_to_polynomial(control, 6));

  SECTION("endpoints match the control points") {
    EvalCurveOptions opt;
    opt.coeff_path = coeffs;
    opt.s_values = {0.0, 1.0};
    opt.out_path = dir.file("pts.csv");
    std::ostringstream out;
    REQUIRE(cmd_eval_curve(opt, out) == 0);
    const std::string text = read_text(opt.out_path);
    REQUIRE(text.find("s,x,y\n0,3.5,3\n") != std::string::npos);
    REQUIRE(text.find("\n1,-2,-1\n") != std::string::npos);
  }
  SECTION("count = 1 emits the single point s = 0") {
    EvalCurveOptions opt;
    opt.coeff_path = coeffs;
    opt.count = 1;
    opt.out_path = dir.file("one.csv");
    std::ostringstream out;
    REQUIRE(cmd_eval_curve(opt, out) == 0);
    REQUIRE(read_text(opt.out_path) == "s,x,y\n0,3.5,3\n");
  }
  SECTION("zero coefficients evaluate to the origin") {
    const std::string zero = dir.file("zero.curve");
    write_curve_file(zero, BasisFamily::Polynomial(3), VectorXd::Zero(8));
    EvalCurveOptions opt;
    opt.coeff_path = zero;
    opt.count = 3;
    opt.out_path = dir.file("zero.csv");
    std::ostringstream out;
    REQUIRE(cmd_eval_curve(opt, out) == 0);
    REQUIRE(read_text(opt.out_path) == "s,x,y\n0,0,0\n0.5,0,0\n1,0,0\n");
  }
  SECTION("s outside the unit interval is rejected") {
    EvalCurveOptions opt;
    opt.coeff_path = coeffs;
    opt.s_values = {1.5};
    opt.out_path = dir.file("bad.csv");
    std::ostringstream out;
    REQUIRE_THROWS_AS(cmd_eval_curve(opt, out), std::invalid_argument);
  }
  SECTION("emitted points feed back through the sample reader and refit") {
    EvalCurveOptions opt;
    opt.coeff_path = coeffs;
    opt.count = 60;
    opt.out_path = dir.file("loop.csv");
    std::ostringstream out;
    REQUIRE(cmd_eval_curve(opt, out) == 0);
    const SampleSet samples = read_samples_csv(opt.out_path);
    REQUIRE(samples.size() == 60);
    const VectorXd refit =
        fit_coefficients(samples, BasisFamily::Polynomial(6));
    const CurveFile original = read_curve_file(coeffs);
    REQUIRE((refit - original.xi).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("simulate command writes the documented artifacts", "[cli]") {
  TempDir dir("simulate");
  TempDir out_dir("simulate_out");
  const std::string scn = dir.file("tiny.scn");
  write_text(scn,
             "# curveform scenario v1\n"
             "[topology]\nagents = 3\npreset = chain\n"
             "[gains]\nk1 = 1\nk2 = 1\nell = 0.5\n"
             "[disturbance]\nd = 0.2 0.1\n"
             "[integration]\ndt = 0.001\nduration = 0.5\nmethod = euler\n"
             "[initial]\nmode = random_box\nseed = 7\n"
             "[curve]\nstart = 0\nfamily = fourier\nharmonics = 3\n"
             "generator = radial\nfit_samples = 50\nx_const = 2\ny_const = 2\n"
             "center = 0 0\n");

  SimulateOptions opt;
  opt.scenario_path = scn;
  opt.out_dir = out_dir.file("run1");
  std::ostringstream out;
  const RunArtifacts artifacts = cmd_simulate(opt, out);
  REQUIRE(std::filesystem::exists(artifacts.trajectory_csv));
  REQUIRE(std::filesystem::exists(artifacts.summary_path));
  REQUIRE(artifacts.metrics_csv.has_value());
  REQUIRE(std::filesystem::exists(*artifacts.metrics_csv));

  const std::string traj = read_text(artifacts.trajectory_csv);
  REQUIRE(traj.rfind("t,agent,x,y,theta_wrapped,xbar,ybar,v,omega,dhat1,dhat2\n",
                     0) == 0);
  const std::string metrics = read_text(*artifacts.metrics_csv);
  REQUIRE(metrics.rfind("t,err_norm,V\n", 0) == 0);
  const std::string summary = read_text(artifacts.summary_path);
  REQUIRE(summary.rfind("# curveform summary v1\n", 0) == 0);
  REQUIRE(summary.find("terminal_err_norm = ") != std::string::npos);
  REQUIRE(summary.find("seed = 7") != std::string::npos);

  SECTION("same seed gives byte-identical artifacts") {
    SimulateOptions again = opt;
    again.out_dir = out_dir.file("run2");
    std::ostringstream out2;
    const RunArtifacts second = cmd_simulate(again, out2);
    REQUIRE(read_text(second.trajectory_csv) == traj);
    REQUIRE(read_text(*second.metrics_csv) == metrics);
  }
  SECTION("duration override of zero fails validation") {
    SimulateOptions bad = opt;
    bad.out_dir = out_dir.file("run3");
    bad.duration = 0.0;
    std::ostringstream out3;
    REQUIRE_THROWS_AS(cmd_simulate(bad, out3), ValidationError);
  }
}

TEST_CASE("sweep command writes one row per grid point", "[cli]") {
  TempDir dir("sweep");
  TempDir out_dir("sweep_out");
  const std::string scn = dir.file("tiny.scn");
  write_text(scn,
             "# curveform scenario v1\n"
             "[topology]\nagents = 2\npreset = chain\n"
             "[gains]\nk1 = 1\nk2 = 1\nell = 0.5\n"
             "[disturbance]\nd = 0.1 0.1\n"
             "[integration]\ndt = 0.001\nduration = 0.2\nmethod = euler\n"
             "[initial]\nmode = random_box\nseed = 3\n"
             "[curve]\nstart = 0\nfamily = fourier\nharmonics = 2\n"
             "generator = radial\nfit_samples = 30\nx_const = 1\ny_const = 1\n"
             "center = 0 0\n");
  SweepOptions opt;
  opt.scenario_path = scn;
  opt.out_dir = out_dir.file("grid");
  opt.grid = {"k1=0.5,1", "k2=1,2"};
  std::ostringstream out;
  REQUIRE(cmd_sweep(opt, out) == 0);
  const std::string csv =
      read_text((std::filesystem::path(opt.out_dir) / "sweep.csv").string());
  REQUIRE(csv.rfind("k1,k2,status,", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows
}

TEST_CASE("binary exit codes distinguish failure classes", "[cli]") {
  TempDir dir("exit_codes");
  SECTION("usage error") {
    REQUIRE(run_binary("") != 0);
  }
  SECTION("missing input file is an i/o error") {
    REQUIRE(run_binary("check-graph --topology " + dir.file("nope.topo")) == 3);
  }
  SECTION("disconnected graph is a validation failure") {
    const std::string topo = dir.file("dis.topo");
    write_text(topo, "# curveform topology v1\nagents = 3\nedges = 2 1 1\n");
    REQUIRE(run_binary("check-graph --topology " + topo) == 2);
  }
  SECTION("malformed scenario is a validation failure") {
    const std::string scn = dir.file("bad.scn");
    write_text(scn, "# curveform scenario v1\n[gains]\nwhat = 1\n");
    REQUIRE(run_binary("simulate --scenario " + scn + " --out " +
                       dir.file("out")) == 2);
  }
  SECTION("shipped scenarios pass check-graph end to end") {
    REQUIRE(run_binary("check-graph --topology " + shipped("chain6.topo")) ==
            0);
  }
}
