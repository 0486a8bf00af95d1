#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sketchopt/linalg.hpp"
#include "sketchopt/rng.hpp"
#include "sketchopt/solvers.hpp"

namespace sketchopt::harness {

// ---------------------------------------------------------------------------
// Synthetic data

struct SyntheticSpec {
  double singular_decay = 0.98;
  /// Defaults to 1/sqrt(n) and 1/sqrt(d).
  std::optional<double> noise_scale;
  std::optional<double> planted_scale;
  /// Upper bound on sigma_1 / sigma_d. When decay^(1-d) would exceed it, the
  /// decay is raised to max_condition^(-1/(d-1)). 0 disables the cap.
  double max_condition = 1e4;

  double effective_decay(std::size_t d) const;
};

struct SyntheticProblem {
  linalg::LsProblem problem;
  DenseMatrix U;        // n x d, orthonormal columns spanning range(A)
  Vector singular_values;
  Vector x_planted;
};

/// A = U diag(decay^j) V^T with U, V Haar-distributed orthonormal factors and
/// b = A x_pl + noise_scale * N(0, I_n), x_pl ~ planted_scale * N(0, I_d).
SyntheticProblem gen_synthetic_full(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                                    RngStream rng);
linalg::LsProblem gen_synthetic(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                                RngStream rng);

/// Orthonormal n x d factor of an i.i.d. Gaussian draw, with column signs
/// fixed so the distribution is exactly Haar.
DenseMatrix haar_orthonormal(std::size_t n, std::size_t d, RngStream& rng);

// ---------------------------------------------------------------------------
// Rate fitting

struct RateFit {
  double rate = 0.0;
  double log_slope = 0.0;
  std::size_t t_min = 0;
  std::size_t t_max = 0;
};

inline constexpr std::size_t kDefaultFitMin = 2;
inline constexpr std::size_t kDefaultFitMax = 15;

/// exp of the least-squares slope of log(errors_sq[t]) for t in [t_min, t_max].
/// The window is truncated at the last finite entry and before the first
/// entry that is non-positive or below 1e-22 * errors_sq[0] (machine-precision
/// floor). Throws InvalidParameter when fewer than 4 points remain.
RateFit fit_rate_window(const std::vector<double>& errors_sq, std::size_t t_min = kDefaultFitMin,
                        std::size_t t_max = kDefaultFitMax);
double fit_rate(const std::vector<double>& errors_sq, std::size_t t_min = kDefaultFitMin,
                std::size_t t_max = kDefaultFitMax);
double fit_rate(const solvers::SolverTrace& trace, std::size_t t_min = kDefaultFitMin,
                std::size_t t_max = kDefaultFitMax);

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::string, std::int64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;
};

enum class Format { Csv, Json };
Format parse_format(const std::string& name);

/// Shortest decimal string that parses back to the same double; "nan",
/// "inf", "-inf" for non-finite values.
std::string format_double(double v);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);
void write_table(const Table& table, const std::string& path, Format format);

/// Parses CSV written by to_csv. Cells come back as strings.
Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);

/// `density.csv` -> `density_summary.csv` (extension swapped for json).
std::string sibling_path(const std::string& path, const std::string& suffix, Format format);

// ---------------------------------------------------------------------------
// Parallel trials

/// Worker count: SKETCHOPT_THREADS if set and positive, else the hardware
/// concurrency, never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Calls fn(i) for i in [0, jobs) on a worker pool. The first exception thrown
/// by any job is rethrown after all workers stop.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Experiments

struct DensityConfig {
  std::size_t n = 8192;
  std::size_t d = 1640;
  std::vector<std::size_t> m_list{1720, 3280, 4915};
  std::uint64_t seed = 42;
  bool haar = false;
  double grid_step = 1e-5;
  std::size_t histogram_bins = 100;
  /// SRHT theory and rescaling use m_effective unless set.
  bool nominal_m = false;
  SyntheticSpec synthetic;
  std::string out_path;
  Format format = Format::Csv;
  /// Per-phase wall-clock lines on stderr. Never written to output files.
  bool log_timings = false;
};

struct DensityResult {
  Table curves;
  Table summary;
  std::string metadata_json;
};

DensityResult run_density_experiment(const DensityConfig& cfg);

struct ConvergeConfig {
  std::size_t n = 4096;
  std::size_t d = 800;
  std::vector<std::size_t> m_list{2000};
  std::vector<std::string> methods{"gaussian-opt", "srht-opt", "hb-fixed", "hb-refreshed"};
  std::size_t trials = 20;
  std::size_t iters = 30;
  std::optional<double> delta;
  std::optional<double> refreshed_mu;
  std::optional<double> refreshed_beta;
  /// Build SRHT schedules from the nominal m instead of the realized row count.
  bool nominal_m = false;
  std::uint64_t seed = 42;
  SyntheticSpec synthetic;
  std::string out_path;
  Format format = Format::Csv;
  /// Per-phase wall-clock lines on stderr. Never written to output files.
  bool log_timings = false;
};

struct MethodRun {
  std::string method;
  std::size_t m = 0;
  /// errors_sq per trial; a diverged trial keeps its partial trace.
  std::vector<std::vector<double>> traces;
  std::vector<bool> diverged;
};

struct ConvergeResult {
  Table table;
  std::vector<MethodRun> runs;
  std::string metadata_json;
};

/// Builds the solver method for a harness method name at the given sizes.
/// srht-opt and hb-fixed take their ratios from the realized sketch row count
/// unless nominal_m is set; hb-refreshed always uses the nominal m.
solvers::Method make_method(const std::string& name, std::size_t n_padded, std::size_t d,
                            std::size_t m, double delta, bool nominal_m = false,
                            std::optional<double> refreshed_mu = std::nullopt,
                            std::optional<double> refreshed_beta = std::nullopt);

/// Stream index used for (trial, method) solver randomness; the data draw
/// uses stream 0.
std::uint64_t trial_stream(std::size_t trial, std::size_t method_index);

/// mean_t errors_sq / mean_0 errors_sq over the given traces, skipping traces
/// that are shorter than t + 1.
std::vector<double> mean_ratio(const std::vector<std::vector<double>>& traces);

ConvergeResult run_convergence_experiment(const ConvergeConfig& cfg);

struct RatesConfig {
  std::size_t n = 8192;
  std::vector<std::size_t> d_list{500, 1250, 2000};
  std::size_t m_grid = 12;
  /// When non-empty, used for every d instead of the generated grid.
  std::vector<std::size_t> m_list;
  std::size_t trials = 20;
  std::size_t iters = 15;
  std::string method = "srht-opt";
  std::optional<double> delta;
  bool nominal_m = false;
  std::uint64_t seed = 42;
  std::size_t fit_min = kDefaultFitMin;
  std::size_t fit_max = kDefaultFitMax;
  SyntheticSpec synthetic;
  std::string out_path;
  Format format = Format::Csv;
  /// Per-phase wall-clock lines on stderr. Never written to output files.
  bool log_timings = false;
};

/// K sketch sizes evenly spaced from ceil(1.25 d) to floor(0.7 n).
std::vector<std::size_t> default_m_grid(std::size_t n, std::size_t d, std::size_t K);

struct RatesResult {
  Table table;
  std::string metadata_json;
};

RatesResult run_rates_experiment(const RatesConfig& cfg);

}  // namespace sketchopt::harness
