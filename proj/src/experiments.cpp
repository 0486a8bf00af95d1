#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>

#include "json.hpp"

#include "sketchopt/errors.hpp"
#include "sketchopt/harness.hpp"
#include "sketchopt/orthopoly.hpp"
#include "sketchopt/sketching.hpp"
#include "sketchopt/spectral.hpp"

namespace sketchopt::harness {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kMethodSlots = 16;
constexpr std::uint64_t kHaarStreamOffset = 1u << 20;

const char* const kRngScheme =
    "Counter-based SplitMix64 streams keyed by (seed, stream). The data draw (A, b or U) "
    "uses stream 0 and is shared by every trial and method. Solver randomness for trial i "
    "and method slot k uses stream 1 + 16 i + k, offset by (m index) << 32, so paired "
    "trials share data but not sketches. x0 is zero for every run.";

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::size_t padded_rows(std::size_t n) { return sketch::next_power_of_two(n); }

void write_outputs(const std::string& out_path, Format format,
                   const std::vector<std::pair<std::string, const Table*>>& tables,
                   const std::string& metadata) {
  if (out_path.empty()) return;
  for (const auto& [suffix, table] : tables) {
    const std::string path = suffix.empty() ? out_path : sibling_path(out_path, suffix, format);
    write_table(*table, path, format);
  }
  const std::string meta_path = sibling_path(out_path, ".meta", Format::Json);
  std::ofstream meta(meta_path, std::ios::binary);
  meta << metadata;
  if (!meta) throw std::runtime_error("cannot write '" + meta_path + "'");
}

Table histogram_rows(const std::string& family, std::size_t n, std::size_t d, std::size_t m,
                     const Vector& eig, std::size_t bins) {
  Table t;
  const double lo = eig.minCoeff();
  const double hi = eig.maxCoeff();
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    auto k = static_cast<std::size_t>((eig(i) - lo) / width);
    counts[std::min(k, bins - 1)] += 1;
  }
  const double total = static_cast<double>(eig.size());
  std::size_t seen = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    seen += counts[k];
    const double x = lo + (static_cast<double>(k) + 0.5) * width;
    t.rows.push_back({family, as_int(n), as_int(d), as_int(m), x,
                      static_cast<double>(counts[k]) / (total * width),
                      static_cast<double>(seen) / total});
  }
  return t;
}

}  // namespace

std::size_t worker_count(std::size_t jobs) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SKETCHOPT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) workers = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// density

DensityResult run_density_experiment(const DensityConfig& cfg) {
  if (cfg.m_list.empty()) throw InvalidParameter("density: empty m list");
  if (!(cfg.grid_step > 0.0)) throw InvalidParameter("density: grid step must be positive");
  const std::size_t n = padded_rows(cfg.n);
  for (std::size_t m : cfg.m_list) {
    const auto r = sketch::AspectRatios::from_dims(n, cfg.d, m, true);
    if (!(r.gamma + r.xi < 1.0)) {
      throw InvalidParameter("density: gamma + xi = " + std::to_string(r.gamma + r.xi) +
                             " >= 1 has no absolutely continuous SRHT limit");
    }
  }

  auto t0 = Clock::now();
  RngStream data_rng(cfg.seed, kDataStream);
  DenseMatrix U = haar_orthonormal(cfg.n, cfg.d, data_rng);
  if (cfg.log_timings) std::cerr << "density: basis " << seconds_since(t0) << " s\n";
  const Vector zero_b = Vector::Zero(U.rows());

  struct PerM {
    Vector srht_eig;
    Vector haar_eig;
    std::size_t m_effective = 0;
    double xi_theory = 0.0;
    double ks_srht = 0.0;
    double ks_haar = std::nan("");
  };
  std::vector<PerM> per(cfg.m_list.size());
  const double gamma = static_cast<double>(cfg.d) / static_cast<double>(n);

  parallel_for(cfg.m_list.size(), [&](std::size_t k) {
    const std::size_t m = cfg.m_list[k];
    const double xi = static_cast<double>(m) / static_cast<double>(n);

    auto start = Clock::now();
    const auto s = sketch::apply_sketch(sketch::SketchKind::Srht, U, zero_b, m,
                                        RngStream(cfg.seed, 1 + k));
    per[k].m_effective = s.result.m_effective;
    const std::size_t rows = cfg.nominal_m ? m : s.result.m_effective;
    per[k].xi_theory = static_cast<double>(rows) / static_cast<double>(n);
    if (!(gamma + per[k].xi_theory < 1.0)) {
      throw InvalidParameter("density: realized m = " + std::to_string(rows) +
                             " puts gamma + xi at or above 1");
    }
    const spectral::CdfTable cdf(spectral::DensitySpec::srht_rescaled(gamma, per[k].xi_theory));
    const auto es = spectral::empirical_spectrum(linalg::gram(s.result.SA), 1.0 / per[k].xi_theory);
    per[k].srht_eig = es.eigenvalues;
    per[k].ks_srht = spectral::ks_distance(es, cdf);
    if (cfg.log_timings) {
      std::cerr << "density: m=" << m << " srht sketch+spectrum " << seconds_since(start)
                << " s\n";
    }
    if (cfg.haar) {
      start = Clock::now();
      const spectral::CdfTable haar_cdf(spectral::DensitySpec::srht_rescaled(gamma, xi));
      const auto h = sketch::apply_sketch(sketch::SketchKind::Haar, U, zero_b, m,
                                          RngStream(cfg.seed, kHaarStreamOffset + k));
      const auto hs = spectral::empirical_spectrum(linalg::gram(h.result.SA), 1.0 / xi);
      per[k].haar_eig = hs.eigenvalues;
      per[k].ks_haar = spectral::ks_distance(hs, haar_cdf);
      if (cfg.log_timings) {
        std::cerr << "density: m=" << m << " haar sketch+spectrum " << seconds_since(start)
                  << " s\n";
      }
    }
  });

  DensityResult out;
  out.curves.columns = {"family", "n", "d", "m", "x", "density", "cdf"};
  out.summary.columns = {"n",       "d",       "m",       "m_effective",    "ks_srht",
                         "ks_haar", "min_eig", "max_eig", "edge_lo_theory", "edge_hi_theory"};

  for (std::size_t k = 0; k < cfg.m_list.size(); ++k) {
    const std::size_t m = cfg.m_list[k];
    const double xi = per[k].xi_theory;
    const auto mp = spectral::DensitySpec::marchenko_pastur(gamma / xi);
    const auto sr = spectral::DensitySpec::srht_rescaled(gamma, xi);
    const spectral::CdfTable mp_cdf(mp);
    const spectral::CdfTable sr_cdf(sr);
    const double lo = std::min(mp.support_lo(), sr.support_lo());
    const double hi = std::max(mp.support_hi(), sr.support_hi());
    const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / cfg.grid_step));

    for (const auto* family : {"mp", "srht_theory"}) {
      const bool is_mp = std::string(family) == "mp";
      const auto& spec = is_mp ? mp : sr;
      const auto& cdf = is_mp ? mp_cdf : sr_cdf;
      auto emit = [&](double x) {
        out.curves.rows.push_back({std::string(family), as_int(cfg.n), as_int(cfg.d), as_int(m),
                                   x, spectral::density_eval(spec, x), cdf(x)});
      };
      for (std::size_t i = 0; i <= steps; ++i) emit(lo + static_cast<double>(i) * cfg.grid_step);
      if (lo + static_cast<double>(steps) * cfg.grid_step < hi) emit(hi);
    }
    auto emp = histogram_rows("srht_empirical", cfg.n, cfg.d, m, per[k].srht_eig,
                              cfg.histogram_bins);
    for (auto& r : emp.rows) out.curves.rows.push_back(std::move(r));
    if (cfg.haar) {
      auto hr = histogram_rows("haar_empirical", cfg.n, cfg.d, m, per[k].haar_eig,
                               cfg.histogram_bins);
      for (auto& r : hr.rows) out.curves.rows.push_back(std::move(r));
    }

    out.summary.rows.push_back({as_int(cfg.n), as_int(cfg.d), as_int(m),
                                as_int(per[k].m_effective), per[k].ks_srht, per[k].ks_haar,
                                per[k].srht_eig.minCoeff(), per[k].srht_eig.maxCoeff(),
                                sr.support_lo(), sr.support_hi()});
  }

  json meta = {
      {"experiment", "density"},
      {"n", cfg.n},
      {"n_padded", n},
      {"d", cfg.d},
      {"m_list", cfg.m_list},
      {"seed", cfg.seed},
      {"haar", cfg.haar},
      {"grid_step", cfg.grid_step},
      {"histogram_bins", cfg.histogram_bins},
      {"spectrum", "eigenvalues of (n/m) (SU)^T (SU), U a Haar n x d orthonormal basis"},
      {"ratios", cfg.nominal_m
                     ? "gamma = d/n and xi = m/n use the padded n and the nominal m"
                     : "gamma = d/n uses the padded n; for SRHT, m and xi = m/n are the rows "
                       "actually kept (m_effective), for Haar the nominal m"},
      {"nominal_m", cfg.nominal_m},
      {"ks_threshold_note",
       "A KS distance of 0.05 at n = 8192 is a Monte-Carlo calibration of this artifact, "
       "not a constant from the underlying theory."},
      {"rng", kRngScheme},
  };
  out.metadata_json = meta.dump(1) + "\n";
  write_outputs(cfg.out_path, cfg.format,
                {{"", &out.curves}, {"_summary", &out.summary}}, out.metadata_json);
  return out;
}

// ---------------------------------------------------------------------------
// converge

solvers::Method make_method(const std::string& name, std::size_t n_padded, std::size_t d,
                            std::size_t m, double delta, bool nominal_m,
                            std::optional<double> refreshed_mu,
                            std::optional<double> refreshed_beta) {
  if (name == "gaussian-opt") return solvers::GaussianOpt{};
  if (name == "srht-opt") return solvers::SrhtOpt{sketch::SketchKind::Srht, !nominal_m};
  if (name != "hb-fixed" && name != "hb-refreshed") {
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected gaussian-opt, srht-opt, hb-fixed, hb-refreshed)");
  }
  const double gamma = static_cast<double>(d) / static_cast<double>(n_padded);
  const double xi = static_cast<double>(m) / static_cast<double>(n_padded);
  const auto [lo, hi] = spectral::srht_edges(gamma, xi);
  const auto hb = solvers::heavy_ball_from_edges((1.0 - delta) * lo, (1.0 + delta) * hi);
  if (name == "hb-fixed") {
    if (nominal_m) return solvers::HeavyBallFixed{hb.mu, hb.beta, sketch::SketchKind::Srht, std::nullopt};
    return solvers::HeavyBallFixed{0.0, 0.0, sketch::SketchKind::Srht, delta};
  }
  return solvers::HeavyBallRefreshed{refreshed_mu.value_or(hb.mu),
                                     refreshed_beta.value_or(hb.beta)};
}

std::uint64_t trial_stream(std::size_t trial, std::size_t method_index) {
  return 1 + kMethodSlots * static_cast<std::uint64_t>(trial) +
         static_cast<std::uint64_t>(method_index);
}

std::vector<double> mean_ratio(const std::vector<std::vector<double>>& traces) {
  std::size_t len = 0;
  for (const auto& tr : traces) len = std::max(len, tr.size());
  std::vector<double> mean(len, std::nan(""));
  if (len == 0) return mean;
  double base = 0.0;
  std::size_t base_count = 0;
  for (const auto& tr : traces) {
    if (!tr.empty()) {
      base += tr[0];
      ++base_count;
    }
  }
  base /= static_cast<double>(base_count);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tr : traces) {
      if (tr.size() > t) {
        sum += tr[t];
        ++count;
      }
    }
    if (count) mean[t] = (sum / static_cast<double>(count)) / base;
  }
  return mean;
}

namespace {

double theory_rate(const std::string& method, std::size_t n_padded, std::size_t d,
                   std::size_t m) {
  const double gamma = static_cast<double>(d) / static_cast<double>(n_padded);
  const double xi = static_cast<double>(m) / static_cast<double>(n_padded);
  if (method == "gaussian-opt") return static_cast<double>(d) / static_cast<double>(m);
  const auto r = orthopoly::rate_report(gamma, xi);
  return method == "hb-refreshed" ? r.rho_h_ref : r.rho_h;
}

double method_delta(const std::string& method, std::optional<double> delta) {
  if (method == "gaussian-opt") return 0.0;
  return delta.value_or(0.01);
}

}  // namespace

ConvergeResult run_convergence_experiment(const ConvergeConfig& cfg) {
  if (cfg.methods.empty() || cfg.m_list.empty() || cfg.trials == 0 || cfg.iters == 0) {
    throw InvalidParameter("converge: methods, m list, trials and iters must be non-empty");
  }
  const std::size_t n_pad = padded_rows(cfg.n);
  for (std::size_t m : cfg.m_list) sketch::AspectRatios::from_dims(n_pad, cfg.d, m);

  auto t0 = Clock::now();
  const linalg::LsProblem problem =
      gen_synthetic(cfg.n, cfg.d, cfg.synthetic, RngStream(cfg.seed, kDataStream));
  if (cfg.log_timings) std::cerr << "converge: data " << seconds_since(t0) << " s\n";

  ConvergeResult out;
  for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi) {
    for (const auto& name : cfg.methods) {
      MethodRun run;
      run.method = name;
      run.m = cfg.m_list[mi];
      run.traces.resize(cfg.trials);
      run.diverged.assign(cfg.trials, false);
      out.runs.push_back(std::move(run));
    }
  }
  const std::size_t per_m = cfg.methods.size();
  const std::size_t jobs = out.runs.size() * cfg.trials;
  std::vector<solvers::PhaseTimings> timings(jobs);

  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t run_index = job / cfg.trials;
    const std::size_t trial = job % cfg.trials;
    const std::size_t mi = run_index / per_m;
    const std::size_t k = run_index % per_m;
    MethodRun& run = out.runs[run_index];
    const double delta = method_delta(run.method, cfg.delta);

    solvers::SolverConfig sc;
    sc.method = make_method(run.method, n_pad, cfg.d, run.m, delta, cfg.nominal_m,
                            cfg.refreshed_mu, cfg.refreshed_beta);
    sc.m = run.m;
    sc.T = cfg.iters;
    sc.delta = run.method == "srht-opt" ? delta : 0.0;
    sc.seed = cfg.seed;
    sc.stream = trial_stream(trial, k) + (static_cast<std::uint64_t>(mi) << 32);
    try {
      auto trace = solvers::solve(problem, sc);
      timings[job] = trace.wall_clock;
      run.traces[trial] = std::move(trace.errors_sq);
    } catch (const solvers::Diverged& e) {
      run.traces[trial] = e.partial().errors_sq;
      run.diverged[trial] = true;
    }
  });

  if (cfg.log_timings) {
    for (std::size_t r = 0; r < out.runs.size(); ++r) {
      solvers::PhaseTimings sum;
      for (std::size_t tr = 0; tr < cfg.trials; ++tr) {
        const auto& w = timings[r * cfg.trials + tr];
        sum.sketch_s += w.sketch_s;
        sum.factor_s += w.factor_s;
        sum.iterate_s += w.iterate_s;
      }
      std::cerr << "converge: " << out.runs[r].method << " m=" << out.runs[r].m
                << " sketch " << sum.sketch_s << " s, factor " << sum.factor_s
                << " s, iterate " << sum.iterate_s << " s over " << cfg.trials << " trials\n";
    }
  }

  out.table.columns = {"method",     "n",         "d",            "m",
                       "t",          "mean_ratio", "std_ratio",   "theory_ratio",
                       "diverged_trials"};
  for (const auto& run : out.runs) {
    const std::size_t diverged =
        static_cast<std::size_t>(std::count(run.diverged.begin(), run.diverged.end(), true));
    const auto mean = mean_ratio(run.traces);
    double base = 0.0;
    for (const auto& tr : run.traces) base += tr.empty() ? 0.0 : tr[0];
    base /= static_cast<double>(run.traces.size());
    const double rate = theory_rate(run.method, n_pad, cfg.d, run.m);
    for (std::size_t t = 0; t <= cfg.iters; ++t) {
      double sum = 0.0;
      double sum_sq = 0.0;
      std::size_t count = 0;
      for (const auto& tr : run.traces) {
        if (tr.size() > t) {
          const double r = tr[t] / base;
          sum += r;
          sum_sq += r * r;
          ++count;
        }
      }
      double sd = std::nan("");
      if (count > 1) {
        const double mu = sum / static_cast<double>(count);
        sd = std::sqrt(std::max(0.0, (sum_sq - static_cast<double>(count) * mu * mu) /
                                         static_cast<double>(count - 1)));
      }
      const double mr = t == 0 ? 1.0 : (t < mean.size() ? mean[t] : std::nan(""));
      out.table.rows.push_back({run.method, as_int(cfg.n), as_int(cfg.d), as_int(run.m),
                                as_int(t), mr, sd, std::pow(rate, static_cast<double>(t)),
                                as_int(diverged)});
    }
  }

  json meta = {
      {"experiment", "converge"},
      {"n", cfg.n},
      {"n_padded", n_pad},
      {"d", cfg.d},
      {"m_list", cfg.m_list},
      {"methods", cfg.methods},
      {"trials", cfg.trials},
      {"iters", cfg.iters},
      {"seed", cfg.seed},
      {"delta", cfg.delta ? json(*cfg.delta) : json(0.01)},
      {"singular_decay", cfg.synthetic.singular_decay},
      {"effective_singular_decay", cfg.synthetic.effective_decay(cfg.d)},
      {"max_condition", cfg.synthetic.max_condition},
      {"aggregation", "mean over trials of errors_sq[t], divided by the mean of errors_sq[0]"},
      {"theory_ratio",
       "gaussian-opt: (d/m)^t; srht-opt and hb-fixed: rho_h^t; hb-refreshed: rho_h_ref^t"},
      {"heavy_ball",
       "hb-fixed and hb-refreshed use the edge tuning from (1-delta) lambda_h and "
       "(1+delta) Lambda_h unless refreshed parameters are given"},
      {"sketch_rows",
       cfg.nominal_m ? "srht-opt and hb-fixed use xi = m / n"
                     : "srht-opt and hb-fixed use xi = m_effective / n (realized SRHT rows); "
                       "hb-refreshed and theory_ratio use the nominal m"},
      {"rng", kRngScheme},
  };
  out.metadata_json = meta.dump(1) + "\n";
  write_outputs(cfg.out_path, cfg.format, {{"", &out.table}}, out.metadata_json);
  return out;
}

// ---------------------------------------------------------------------------
// rates

std::vector<std::size_t> default_m_grid(std::size_t n, std::size_t d, std::size_t K) {
  if (K == 0) throw InvalidParameter("m grid needs at least one point");
  const auto lo = static_cast<std::size_t>(std::ceil(1.25 * static_cast<double>(d)));
  const auto hi = static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(n)));
  if (lo >= hi) {
    throw InvalidParameter("m grid: ceil(1.25 d) >= floor(0.7 n) for n=" + std::to_string(n) +
                           " d=" + std::to_string(d));
  }
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i < K; ++i) {
    const double f = K == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(K - 1);
    const auto m = static_cast<std::size_t>(
        std::llround(static_cast<double>(lo) + f * static_cast<double>(hi - lo)));
    if (grid.empty() || grid.back() != m) grid.push_back(m);
  }
  return grid;
}

RatesResult run_rates_experiment(const RatesConfig& cfg) {
  if (cfg.d_list.empty() || cfg.trials == 0) {
    throw InvalidParameter("rates: d list and trials must be non-empty");
  }
  if (cfg.iters < cfg.fit_min + 3) {
    throw InvalidParameter("rates: iters must cover at least 4 fit points");
  }
  const std::size_t n_pad = padded_rows(cfg.n);
  RatesResult out;
  out.table.columns = {"method",          "n",         "d",         "m", "rate_emp",
                       "rate_theory_gaussian", "rate_theory_srht", "fit_t_max",
                       "diverged_trials"};

  for (std::size_t di = 0; di < cfg.d_list.size(); ++di) {
    const std::size_t d = cfg.d_list[di];
    const auto grid = cfg.m_list.empty() ? default_m_grid(n_pad, d, cfg.m_grid) : cfg.m_list;
    for (std::size_t m : grid) sketch::AspectRatios::from_dims(n_pad, d, m);

    auto t0 = Clock::now();
    const linalg::LsProblem problem =
        gen_synthetic(cfg.n, d, cfg.synthetic, RngStream(cfg.seed, kDataStream).substream(di));
    if (cfg.log_timings) std::cerr << "rates: d=" << d << " data " << seconds_since(t0) << " s\n";

    const std::size_t jobs = grid.size() * cfg.trials;
    std::vector<std::vector<double>> traces(jobs);
    std::vector<char> diverged(jobs, 0);
    t0 = Clock::now();
    parallel_for(jobs, [&](std::size_t job) {
      const std::size_t mi = job / cfg.trials;
      const std::size_t trial = job % cfg.trials;
      const std::size_t m = grid[mi];
      const double delta = method_delta(cfg.method, cfg.delta);
      solvers::SolverConfig sc;
      sc.method = make_method(cfg.method, n_pad, d, m, delta, cfg.nominal_m);
      sc.m = m;
      sc.T = cfg.iters;
      sc.delta = cfg.method == "srht-opt" ? delta : 0.0;
      sc.seed = cfg.seed;
      sc.stream = trial_stream(trial, 0) + ((static_cast<std::uint64_t>(di) << 48) |
                                            (static_cast<std::uint64_t>(mi) << 32));
      try {
        traces[job] = solvers::solve(problem, sc).errors_sq;
      } catch (const solvers::Diverged& e) {
        traces[job] = e.partial().errors_sq;
        diverged[job] = 1;
      }
    });
    if (cfg.log_timings) {
      std::cerr << "rates: d=" << d << " solves " << seconds_since(t0) << " s\n";
    }

    for (std::size_t mi = 0; mi < grid.size(); ++mi) {
      const std::size_t m = grid[mi];
      std::vector<std::vector<double>> group(traces.begin() + static_cast<long>(mi * cfg.trials),
                                             traces.begin() +
                                                 static_cast<long>((mi + 1) * cfg.trials));
      std::size_t div = 0;
      for (std::size_t tr = 0; tr < cfg.trials; ++tr) div += diverged[mi * cfg.trials + tr];
      const auto fit = fit_rate_window(mean_ratio(group), cfg.fit_min, cfg.fit_max);
      const auto rr = orthopoly::rate_report(static_cast<double>(d) / static_cast<double>(n_pad),
                                             static_cast<double>(m) / static_cast<double>(n_pad));
      out.table.rows.push_back({cfg.method, as_int(cfg.n), as_int(d), as_int(m), fit.rate,
                                static_cast<double>(d) / static_cast<double>(m), rr.rho_h,
                                as_int(fit.t_max), as_int(div)});
    }
  }

  json meta = {
      {"experiment", "rates"},
      {"n", cfg.n},
      {"n_padded", n_pad},
      {"d_list", cfg.d_list},
      {"method", cfg.method},
      {"trials", cfg.trials},
      {"iters", cfg.iters},
      {"fit_window", {cfg.fit_min, cfg.fit_max}},
      {"seed", cfg.seed},
      {"m_grid",
       cfg.m_list.empty() ? json("evenly spaced from ceil(1.25 d) to floor(0.7 n)")
                          : json(cfg.m_list)},
      {"rate_emp",
       "exp of the least-squares slope of log mean errors_sq over the fit window; the window "
       "stops early once errors fall below 1e-22 of the start"},
      {"rate_theory", "gaussian: d/m; srht: rho_h with gamma = d/n, xi = m/n (padded n)"},
      {"sketch_rows", cfg.nominal_m ? "schedules use xi = m / n"
                                    : "schedules use xi = m_effective / n (realized SRHT rows)"},
      {"singular_decay", cfg.synthetic.singular_decay},
      {"max_condition", cfg.synthetic.max_condition},
      {"rng", "Data for the i-th d uses substream i of stream 0. Solver randomness for trial t "
              "uses stream 1 + 16 t offset by (d index) << 48 | (m index) << 32."},
  };
  out.metadata_json = meta.dump(1) + "\n";
  write_outputs(cfg.out_path, cfg.format, {{"", &out.table}}, out.metadata_json);
  return out;
}

}  // namespace sketchopt::harness
