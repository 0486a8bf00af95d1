// sketchopt: desk-scale experiments for sketched least-squares solvers.
//
//   sketchopt density  --n 8192 --d 1640 --m 1720,3280,4915 --seed 42 --out density.csv
//   sketchopt converge --n 4096 --d 800 --m 2000 --methods gaussian-opt,srht-opt \
//                      --trials 20 --iters 30 --delta 0.01 --seed 42 --out conv.csv
//   sketchopt rates    --n 8192 --d 500,1250,2000 --m-grid 12 --trials 20 --seed 42 \
//                      --out rates.csv
//
// SKETCHOPT_THREADS caps the worker pool.

#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sketchopt/harness.hpp"

namespace h = sketchopt::harness;

namespace {

struct Common {
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
  bool timings = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base RNG seed")->capture_default_str();
  cmd->add_option("--out", c.out, "Output path; companion files share its stem")->required();
  cmd->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_flag("--timings", c.timings, "Print per-phase wall-clock times on stderr");
}

void add_synthetic(CLI::App* cmd, h::SyntheticSpec& s) {
  cmd->add_option("--decay", s.singular_decay, "Singular value decay of A")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--max-condition", s.max_condition,
                  "Cap on the condition number of A (0 keeps the raw decay)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketched least-squares experiments: spectra, convergence, and rates"};
  app.require_subcommand(1);

  Common dc;
  h::DensityConfig dcfg;
  auto* density = app.add_subcommand("density", "Empirical vs. limiting SRHT spectral density");
  density->add_option("--n", dcfg.n, "Rows (padded to a power of two)")->capture_default_str();
  density->add_option("--d", dcfg.d, "Columns")->capture_default_str();
  density->add_option("--m", dcfg.m_list, "Sketch sizes")->delimiter(',')->capture_default_str();
  density->add_flag("--haar", dcfg.haar, "Also compare a Haar embedding (slow)");
  density->add_option("--grid-step", dcfg.grid_step, "Step of the theoretical curve grid")
      ->capture_default_str();
  density->add_option("--bins", dcfg.histogram_bins, "Histogram bins for empirical spectra")
      ->capture_default_str();
  density->add_flag("--nominal-m", dcfg.nominal_m,
                    "Rescale and compare at the nominal m, not the realized SRHT row count");
  add_common(density, dc);

  Common cc;
  h::ConvergeConfig ccfg;
  bool full = false;
  std::optional<std::size_t> conv_n;
  std::optional<double> conv_delta;
  auto* converge = app.add_subcommand("converge", "Error versus iteration for each method");
  converge->add_option("--n", conv_n, "Rows (default 4096, or 8192 with --full)");
  converge->add_option("--d", ccfg.d, "Columns")->capture_default_str();
  converge->add_option("--m", ccfg.m_list, "Sketch sizes")->delimiter(',')->capture_default_str();
  converge->add_option("--methods", ccfg.methods,
                       "gaussian-opt, srht-opt, hb-fixed, hb-refreshed")
      ->delimiter(',')
      ->capture_default_str();
  converge->add_option("--trials", ccfg.trials, "Trials per method")->capture_default_str();
  converge->add_option("--iters", ccfg.iters, "Iterations per run")->capture_default_str();
  converge->add_option("--delta", conv_delta, "Schedule and edge perturbation (default 0.01)")
      ->check(CLI::Range(0.0, 0.1));
  converge->add_option("--refreshed-mu", ccfg.refreshed_mu, "Step size for hb-refreshed");
  converge->add_option("--refreshed-beta", ccfg.refreshed_beta, "Momentum for hb-refreshed");
  converge->add_flag("--full", full, "Use the full n = 8192 problem size");
  converge->add_flag("--nominal-m", ccfg.nominal_m,
                     "Build SRHT schedules from the nominal m, not the realized row count");
  add_synthetic(converge, ccfg.synthetic);
  add_common(converge, cc);

  Common rc;
  h::RatesConfig rcfg;
  std::optional<double> rate_delta;
  auto* rates = app.add_subcommand("rates", "Fitted convergence rate versus sketch size");
  rates->add_option("--n", rcfg.n, "Rows")->capture_default_str();
  rates->add_option("--d", rcfg.d_list, "Column counts")->delimiter(',')->capture_default_str();
  rates->add_option("--m-grid", rcfg.m_grid, "Number of sketch sizes per d")
      ->capture_default_str();
  rates->add_option("--m", rcfg.m_list, "Explicit sketch sizes (overrides --m-grid)")
      ->delimiter(',');
  rates->add_option("--trials", rcfg.trials, "Trials per (d, m)")->capture_default_str();
  rates->add_option("--iters", rcfg.iters, "Iterations per run")->capture_default_str();
  rates->add_option("--method", rcfg.method, "Solver method")->capture_default_str();
  rates->add_option("--delta", rate_delta, "Schedule perturbation (default 0.01)")
      ->check(CLI::Range(0.0, 0.1));
  rates->add_flag("--nominal-m", rcfg.nominal_m,
                  "Build SRHT schedules from the nominal m, not the realized row count");
  rates->add_option("--fit-min", rcfg.fit_min, "First iteration of the fit window")
      ->capture_default_str();
  rates->add_option("--fit-max", rcfg.fit_max, "Last iteration of the fit window")
      ->capture_default_str();
  add_synthetic(rates, rcfg.synthetic);
  add_common(rates, rc);

  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  try {
    if (density->parsed()) {
      dcfg.seed = dc.seed;
      dcfg.out_path = dc.out;
      dcfg.format = h::parse_format(dc.format);
      dcfg.log_timings = dc.timings;
      const auto res = h::run_density_experiment(dcfg);
      for (std::size_t r = 0; r < res.summary.rows.size(); ++r) {
        std::cerr << "m=" << res.summary.number(r, "m")
                  << " ks_srht=" << res.summary.number(r, "ks_srht")
                  << " eig=[" << res.summary.number(r, "min_eig") << ", "
                  << res.summary.number(r, "max_eig") << "] theory=["
                  << res.summary.number(r, "edge_lo_theory") << ", "
                  << res.summary.number(r, "edge_hi_theory") << "]\n";
      }
    } else if (converge->parsed()) {
      ccfg.n = conv_n.value_or(full ? 8192 : 4096);
      ccfg.delta = conv_delta;
      ccfg.seed = cc.seed;
      ccfg.out_path = cc.out;
      ccfg.format = h::parse_format(cc.format);
      ccfg.log_timings = cc.timings;
      const auto res = h::run_convergence_experiment(ccfg);
      for (const auto& run : res.runs) {
        const auto ratio = h::mean_ratio(run.traces);
        std::cerr << run.method << " m=" << run.m << " final mean ratio "
                  << (ratio.empty() ? 0.0 : ratio.back()) << "\n";
      }
    } else if (rates->parsed()) {
      rcfg.delta = rate_delta;
      rcfg.seed = rc.seed;
      rcfg.out_path = rc.out;
      rcfg.format = h::parse_format(rc.format);
      rcfg.log_timings = rc.timings;
      const auto res = h::run_rates_experiment(rcfg);
      for (std::size_t r = 0; r < res.table.rows.size(); ++r) {
        std::cerr << "d=" << res.table.number(r, "d") << " m=" << res.table.number(r, "m")
                  << " rate_emp=" << res.table.number(r, "rate_emp")
                  << " rho_h=" << res.table.number(r, "rate_theory_srht") << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sketchopt: " << e.what() << "\n";
    return 1;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "done in " << elapsed << " s\n";
  return 0;
}
