// curveform command-line tool: fit curves, check interaction graphs, run
// formation simulations and parameter sweeps, and evaluate curves for
// plotting.
//
// Exit codes: 0 success, 2 validation/parse failure, 3 I/O failure,
// 4 numerical abort. Command-line usage errors follow CLI11 defaults.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curveform/commands.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent formation control along parametric curves"};
  app.require_subcommand(1);

  curveform::FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "fit curve coefficients from samples");
  fit->add_option("--samples", fit_opt.samples_csv, "CSV with columns s,x,y")
      ->required();
  fit->add_option("--family", fit_opt.family, "fourier | polynomial")
      ->default_val("fourier");
  fit->add_option("--order", fit_opt.order, "harmonic count or degree")
      ->required();
  fit->add_option("--out", fit_opt.out_path, "output curve file")->required();

  curveform::CheckGraphOptions graph_opt;
  auto* graph =
      app.add_subcommand("check-graph", "validate an interaction topology");
  graph->add_option("--topology", graph_opt.topology_path, "topology file")
      ->required();

  curveform::SimulateOptions sim_opt;
  std::uint64_t seed_override = 0;
  double dt_override = 0.0;
  double duration_override = 0.0;
  auto* sim = app.add_subcommand("simulate", "run a scenario");
  sim->add_option("--scenario", sim_opt.scenario_path, "scenario file")
      ->required();
  sim->add_option("--out", sim_opt.out_dir, "output directory")->required();
  auto* seed_flag = sim->add_option("--seed", seed_override, "override seed");
  auto* dt_flag = sim->add_option("--dt", dt_override, "override dt [s]");
  auto* duration_flag =
      sim->add_option("--duration", duration_override, "override duration [s]");

  curveform::EvalCurveOptions eval_opt;
  auto* eval = app.add_subcommand("eval-curve", "tabulate curve points");
  eval->add_option("--coeffs", eval_opt.coeff_path, "curve file")->required();
  eval->add_option("--s", eval_opt.s_values, "explicit s values");
  eval->add_option("--count", eval_opt.count, "uniform point count");
  eval->add_option("--out", eval_opt.out_path, "output CSV")->required();

  curveform::SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("--scenario", sweep_opt.scenario_path, "scenario file")
      ->required();
  sweep->add_option("--out", sweep_opt.out_dir, "output directory")
      ->required();
  sweep->add_option("--grid", sweep_opt.grid, "grid entries key=v1,v2,...")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      return curveform::cmd_fit(fit_opt, std::cout);
    }
    if (graph->parsed()) {
      return curveform::cmd_check_graph(graph_opt, std::cout);
    }
    if (sim->parsed()) {
      if (*seed_flag) {
        sim_opt.seed = seed_override;
      }
      if (*dt_flag) {
        sim_opt.dt = dt_override;
      }
      if (*duration_flag) {
        sim_opt.duration = duration_override;
      }
      curveform::cmd_simulate(sim_opt, std::cout);
      return 0;
    }
    if (eval->parsed()) {
      return curveform::cmd_eval_curve(eval_opt, std::cout);
    }
    if (sweep->parsed()) {
      return curveform::cmd_sweep(sweep_opt, std::cout);
    }
  } catch (const curveform::NumericalAbortError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const curveform::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const curveform::ValidationError& e) {
    std::cerr << "error: " << e.what();
    return kExitValidation;
  } catch (const curveform::SingularSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const curveform::NoSpanningTreeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
