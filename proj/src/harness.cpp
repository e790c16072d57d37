#include "algcon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "algcon/control.hpp"
#include "algcon/distributed.hpp"
#include "algcon/errors.hpp"
#include "algcon/power_iteration.hpp"
#include "algcon/random.hpp"
#include "algcon/spectral.hpp"
#include "algcon/topology_io.hpp"

#ifndef ALGCON_VERSION
#define ALGCON_VERSION "0.0.0"
#endif
#ifndef ALGCON_GIT_DESCRIBE
#define ALGCON_GIT_DESCRIBE "unknown"
#endif

namespace algcon {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version_string() { return std::string("algcon ") + ALGCON_VERSION + " (" + ALGCON_GIT_DESCRIBE + ")"; }

namespace {

constexpr std::uint64_t kDeploymentStream = 0;
constexpr std::uint64_t kRunStream = 1;

// Shortest round-trip text, used in labels and file names.
std::string short_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Mean of a column over the last `fraction` of the rows.
double tail_mean(const TraceRecord& trace, const std::string& column, double fraction) {
  const auto col = trace.column(column);
  if (col.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * col.size())));
  return mean_of(std::vector<double>(col.end() - static_cast<std::ptrdiff_t>(keep), col.end()));
}

class Context {
 public:
  explicit Context(const ExperimentConfig& cfg) : cfg_(cfg) {
    if (!cfg.topology.file.empty()) file_topo_ = load_topology(cfg.topology.file);
  }

  std::vector<Point> positions(std::uint64_t seed) const {
    if (file_topo_) return file_topo_->positions();
    RandomStream rng(cfg_.topology.seed.value_or(seed), kDeploymentStream);
    return uniform_positions(cfg_.topology.n, cfg_.topology.width, cfg_.topology.height, rng);
  }

  Topology graph(std::uint64_t seed) const {
    if (file_topo_) return *file_topo_;
    return build_rgg(positions(seed), *cfg_.topology.radius);
  }

  static RandomStream run_stream(std::uint64_t seed, std::size_t variant) {
    return RandomStream(seed, kRunStream).split(variant);
  }

 private:
  const ExperimentConfig& cfg_;
  std::optional<Topology> file_topo_;
};

void check_eps_bar(const ExperimentConfig& cfg, const LaplacianMatrix& expected) {
  if (expected.diagonal().maxCoeff() <= 0.0) return;
  const double bound = eps_bar_bound(expected);
  if (!(cfg.schedule.eps_bar < bound)) {
    throw ConfigError("schedule.eps_bar", "must be below 2 / lambda_max(expected Laplacian) = " + short_real(bound));
  }
}

json spectrum_stats(const LaplacianSpectrum& spec) {
  return {{"lambda2", spec.lambda2},
          {"lambda3", real_or_null(spec.lambda3)},
          {"lambda_max", spec.lambda_max},
          {"connected", spec.connected},
          {"degenerate", !spec.connected || spec.degenerate_gap}};
}

// ---------------------------------------------------------------------------
// Per-job scenario bodies. Each fills trace and stats of one SeedResult.

void run_estimate(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const double p_c = cfg.p_c[out.variant];
  const Topology topo = ctx.graph(out.seed);
  const auto fm = LinkFailureModel::uniform(p_c, cfg.symmetry);
  const LaplacianMatrix expected = expected_laplacian(topo, fm);
  check_eps_bar(cfg, expected);
  const auto spec = laplacian_spectrum(expected);
  const OracleInfo oracle{spec.lambda2, spec.lambda3, spec.fiedler};

  RunOptions opts;
  opts.mode = cfg.mode;
  opts.record_every = cfg.record_every;
  opts.timing = cfg.timing;
  opts.stop_on_convergence = cfg.stop_on_convergence;
  opts.delta3 = cfg.delta3;
  opts.sustain = cfg.sustain;
  RandomStream rng = Context::run_stream(out.seed, out.variant);
  auto run = run_estimator(topo, fm, cfg.schedule, cfg.iters, rng, opts, oracle);

  out.stats = spectrum_stats(spec);
  out.stats["p_c"] = p_c;
  out.stats["z_final"] = run.state.z;
  out.stats["y_final"] = run.state.y;
  out.stats["iterations"] = run.state.k;
  out.stats["abs_error"] = std::abs(run.state.z - spec.lambda2);
  out.stats["rel_error"] = spec.lambda2 > 0.0 ? json(std::abs(run.state.z - spec.lambda2) / spec.lambda2) : json(nullptr);
  out.stats["alignment"] = spec.connected && !spec.degenerate_gap ? json(fiedler_alignment(run.state.x, spec.fiedler))
                                                                  : json(nullptr);
  out.stats["converged_at"] = run.converged_at ? json(*run.converged_at) : json(nullptr);
  out.trace = std::move(run.trace);
}

void run_track(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const auto positions = ctx.positions(out.seed);
  const Topology base = ctx.graph(out.seed);
  std::vector<Segment> segments;
  json seg_stats = json::array();
  for (const auto& sp : cfg.segments) {
    Topology topo = sp.radius ? build_rgg(positions, *sp.radius) : base;
    auto fm = LinkFailureModel::uniform(sp.p_c, cfg.symmetry);
    const LaplacianMatrix expected = expected_laplacian(topo, fm);
    check_eps_bar(cfg, expected);
    const auto spec = laplacian_spectrum(expected);
    json s = spectrum_stats(spec);
    s["length"] = sp.length;
    s["p_c"] = sp.p_c;
    seg_stats.push_back(s);
    segments.push_back({std::move(topo), fm, sp.length, OracleInfo{spec.lambda2, spec.lambda3, spec.fiedler}});
  }
  RunOptions opts;
  opts.mode = cfg.mode;
  opts.record_every = cfg.record_every;
  opts.timing = cfg.timing;
  RandomStream rng = Context::run_stream(out.seed, out.variant);
  auto run = run_tracking(segments, cfg.schedule, rng, opts);

  // Estimate at the last recorded row of each segment.
  const auto seg_col = run.trace.column("segment");
  const auto z_col = run.trace.column("z");
  for (std::size_t s = 0; s < seg_stats.size(); ++s) {
    double z_end = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t r = 0; r < seg_col.size(); ++r) {
      if (seg_col[r] == static_cast<double>(s)) z_end = z_col[r];
    }
    seg_stats[s]["z_end"] = real_or_null(z_end);
    seg_stats[s]["abs_error_end"] = real_or_null(std::abs(z_end - seg_stats[s]["lambda2"].get<double>()));
  }
  out.stats["segments"] = seg_stats;
  out.stats["z_final"] = run.state.z;
  out.trace = std::move(run.trace);
}

void run_distributed_job(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const double p_c = cfg.p_c[out.variant];
  const Topology topo = ctx.graph(out.seed);
  const auto fm = LinkFailureModel::uniform(p_c, cfg.symmetry);
  const LaplacianMatrix expected = expected_laplacian(topo, fm);
  check_eps_bar(cfg, expected);
  const auto spec = laplacian_spectrum(expected);

  DistributedOptions opts;
  opts.record_every = cfg.record_every;
  opts.stop_on_convergence = cfg.stop_on_convergence;
  opts.sustain = cfg.sustain;
  RandomStream rng = Context::run_stream(out.seed, out.variant);
  auto run = run_distributed(topo, fm, effective_schedule(cfg.schedule, cfg.mode), cfg.consensus, cfg.iters, rng, opts);

  Vector x(static_cast<Eigen::Index>(run.state.nodes.size()));
  for (std::size_t i = 0; i < run.state.nodes.size(); ++i) x(static_cast<Eigen::Index>(i)) = run.state.nodes[i].x;
  const double z0 = run.state.nodes.front().z;
  out.stats = spectrum_stats(spec);
  out.stats["p_c"] = p_c;
  out.stats["z_final"] = z0;
  out.stats["z_dispersion"] = z_dispersion(run.state);
  out.stats["abs_error"] = std::abs(z0 - spec.lambda2);
  out.stats["alignment"] =
      spec.connected && !spec.degenerate_gap ? json(fiedler_alignment(x, spec.fiedler)) : json(nullptr);
  out.stats["outer_iterations"] = run.state.k;
  out.stats["sum_n1"] = run.state.sum_n1;
  out.stats["sum_n2"] = run.state.sum_n2;
  out.stats["comm_cost"] = run.cost.total;
  out.stats["converged_at"] = run.converged_at ? json(*run.converged_at) : json(nullptr);
  out.trace = std::move(run.trace);
}

void run_control_job(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const auto positions = ctx.positions(out.seed);
  const RadioParams radio = cfg.resolved_radio();
  LinkProbability link = 1.0;
  if (cfg.control.use_mac) {
    MacModel mac;
    mac.m_channels = cfg.control.m_channels;
    mac.radio = radio;
    link = mac;
  } else {
    link = cfg.p_c[out.variant];
  }
  ControlOptions opts;
  opts.record_every = cfg.record_every;
  opts.distributed = cfg.control.distributed;
  opts.consensus = cfg.consensus;
  RandomStream rng = Context::run_stream(out.seed, out.variant);
  auto run = run_connectivity_control(positions, radio, link, effective_schedule(cfg.schedule, cfg.mode),
                                      cfg.control.cfg, cfg.control.p0, cfg.iters, rng, opts);
  out.stats["final_power"] = run.final_power;
  out.stats["z_final"] = run.trace.column("z").back();
  out.stats["steady_lambda2"] = tail_mean(run.trace, "lambda2_true", 0.2);
  out.stats["steady_power"] = tail_mean(run.trace, "p_tx", 0.2);
  out.stats["lambda_star"] = cfg.control.cfg.lambda_star;
  out.trace = std::move(run.trace);
}

void run_mac_sweep_job(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const auto positions = ctx.positions(out.seed);
  const auto grid = cfg.mac_sweep.grid();
  const RadioParams radio = cfg.resolved_radio();
  const auto geom = geometric_connectivity(positions, radio, grid);

  std::vector<std::string> cols{"p_tx", "radius", "lambda2_geom"};
  for (int m : cfg.mac_sweep.m_channels) {
    cols.push_back("p_c_M" + std::to_string(m));
    cols.push_back("lambda2_M" + std::to_string(m));
  }
  std::vector<std::vector<ConnectivityPoint>> curves;
  json per_m = json::array();
  double max_factorization = 0.0;
  for (int m : cfg.mac_sweep.m_channels) {
    MacModel mac;
    mac.m_channels = m;
    mac.radio = radio;
    curves.push_back(connectivity_vs_power(positions, mac, grid, geom));
    const auto& c = curves.back();
    std::size_t best = 0;
    for (std::size_t g = 0; g < c.size(); ++g) {
      max_factorization = std::max(max_factorization, c[g].factorization_error);
      if (c[g].lambda2_expected > c[best].lambda2_expected) best = g;
    }
    const double peak = c[best].lambda2_expected;
    per_m.push_back({{"m_channels", m},
                     {"argmax_p_tx", c[best].p_tx},
                     {"max_lambda2", peak},
                     {"interior_max", peak > c.front().lambda2_expected && peak > c.back().lambda2_expected}});
  }
  TraceRecord trace(cols);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> row{grid[g], curves.front()[g].radius, geom[g]};
    for (const auto& c : curves) {
      row.push_back(c[g].p_c);
      row.push_back(c[g].lambda2_expected);
    }
    trace.append(std::move(row));
  }
  out.stats["curves"] = per_m;
  out.stats["max_factorization_error"] = max_factorization;
  out.trace = std::move(trace);
}

void run_kw_job(const ExperimentConfig& cfg, const Context& ctx, SeedResult& out) {
  const auto positions = ctx.positions(out.seed);
  MacModel mac;
  mac.m_channels = cfg.kw.m_channels;
  mac.radio = cfg.resolved_radio();
  RandomStream rng = Context::run_stream(out.seed, out.variant);
  auto run = kw_maximize(positions, mac, cfg.kw.kw, cfg.kw.p0, rng);

  double grid_best = 0.0;
  double grid_arg = std::numeric_limits<double>::quiet_NaN();
  for (double p : cfg.mac_sweep.grid()) {
    const double v = expected_connectivity(positions, mac, p);
    if (std::isnan(grid_arg) || v > grid_best) {
      grid_best = v;
      grid_arg = p;
    }
  }
  const double achieved = expected_connectivity(positions, mac, run.p_final);
  out.stats["p_final"] = run.p_final;
  out.stats["lambda2_final"] = achieved;
  out.stats["grid_max_lambda2"] = grid_best;
  out.stats["grid_argmax_p_tx"] = real_or_null(grid_arg);
  out.stats["ratio_to_grid_max"] = grid_best > 0.0 ? json(achieved / grid_best) : json(nullptr);
  out.trace = std::move(run.trace);
}

using JobBody = void (*)(const ExperimentConfig&, const Context&, SeedResult&);

JobBody body_for(Scenario s) {
  switch (s) {
    case Scenario::estimate: return run_estimate;
    case Scenario::track: return run_track;
    case Scenario::distributed: return run_distributed_job;
    case Scenario::control: return run_control_job;
    case Scenario::mac_sweep: return run_mac_sweep_job;
    case Scenario::kw: return run_kw_job;
  }
  return run_estimate;
}

// ---------------------------------------------------------------------------
// Aggregation over the seeds of one variant.

// Mean over seeds of (column - reference)^2 on the common row prefix.
json mse_curve(const std::vector<const SeedResult*>& runs, const std::string& index_col, const std::string& value_col,
               const std::function<double(const SeedResult&, std::size_t)>& reference) {
  json curve = json::array();
  if (runs.empty()) return curve;
  std::size_t rows = std::numeric_limits<std::size_t>::max();
  for (const auto* r : runs) rows = std::min(rows, r->trace.size());
  const std::size_t ic = runs.front()->trace.column_index(index_col);
  for (std::size_t row = 0; row < rows; ++row) {
    double acc = 0.0;
    for (const auto* r : runs) {
      const std::size_t vc = r->trace.column_index(value_col);
      const double e = r->trace.rows()[row][vc] - reference(*r, row);
      acc += e * e;
    }
    curve.push_back({runs.front()->trace.rows()[row][ic], acc / static_cast<double>(runs.size())});
  }
  return curve;
}

std::vector<double> stat_values(const std::vector<const SeedResult*>& runs, const std::string& key) {
  std::vector<double> out;
  for (const auto* r : runs) {
    if (r->stats.contains(key) && r->stats[key].is_number()) out.push_back(r->stats[key].get<double>());
  }
  return out;
}

json aggregate(const ExperimentConfig& cfg, const std::vector<const SeedResult*>& ok) {
  json agg;
  agg["seeds_ok"] = ok.size();
  if (ok.empty()) return agg;
  auto lambda2_of = [](const SeedResult& r, std::size_t) { return r.stats["lambda2"].get<double>(); };
  switch (cfg.scenario) {
    case Scenario::estimate:
      agg["mean_z_final"] = mean_of(stat_values(ok, "z_final"));
      agg["mean_lambda2"] = mean_of(stat_values(ok, "lambda2"));
      agg["median_abs_error"] = median_of(stat_values(ok, "abs_error"));
      agg["median_alignment"] = real_or_null(median_of(stat_values(ok, "alignment")));
      agg["mse"] = mse_curve(ok, "k", "z", lambda2_of);
      break;
    case Scenario::distributed:
      agg["mean_z_final"] = mean_of(stat_values(ok, "z_final"));
      agg["mean_lambda2"] = mean_of(stat_values(ok, "lambda2"));
      agg["median_abs_error"] = median_of(stat_values(ok, "abs_error"));
      agg["mean_comm_cost"] = mean_of(stat_values(ok, "comm_cost"));
      agg["mse"] = mse_curve(ok, "outer_k", "z_node0", lambda2_of);
      break;
    case Scenario::track:
      agg["mse"] = mse_curve(ok, "k", "z", [](const SeedResult& r, std::size_t row) {
        return r.trace.rows()[row][r.trace.column_index("lambda2")];
      });
      break;
    case Scenario::control:
      agg["mean_steady_lambda2"] = mean_of(stat_values(ok, "steady_lambda2"));
      agg["mean_steady_power"] = mean_of(stat_values(ok, "steady_power"));
      agg["mean_final_power"] = mean_of(stat_values(ok, "final_power"));
      break;
    case Scenario::mac_sweep: {
      json means = json::object();
      const auto& cols = ok.front()->trace.columns();
      for (std::size_t c = 2; c < cols.size(); ++c) {
        std::vector<double> mean(ok.front()->trace.size(), 0.0);
        for (const auto* r : ok) {
          for (std::size_t g = 0; g < mean.size(); ++g) mean[g] += r->trace.rows()[g][c] / static_cast<double>(ok.size());
        }
        means[cols[c]] = mean;
      }
      agg["p_grid"] = ok.front()->trace.column("p_tx");
      agg["mean_curves"] = means;
      const auto errs = stat_values(ok, "max_factorization_error");
      agg["max_factorization_error"] = *std::max_element(errs.begin(), errs.end());
      break;
    }
    case Scenario::kw:
      agg["median_p_final"] = median_of(stat_values(ok, "p_final"));
      agg["median_lambda2_final"] = median_of(stat_values(ok, "lambda2_final"));
      agg["median_ratio_to_grid_max"] = real_or_null(median_of(stat_values(ok, "ratio_to_grid_max")));
      break;
  }
  return agg;
}

std::string csv_name(const ExperimentConfig& cfg, const std::string& label, std::uint64_t seed) {
  std::string name = to_string(cfg.scenario);
  if (!label.empty()) name += "_" + label;
  return name + "_seed" + std::to_string(seed) + ".csv";
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << doc.dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> variant_labels(const ExperimentConfig& cfg) {
  const bool per_pc = cfg.scenario == Scenario::estimate || cfg.scenario == Scenario::distributed ||
                      (cfg.scenario == Scenario::control && !cfg.control.use_mac);
  if (per_pc) {
    std::vector<std::string> out;
    for (double p : cfg.p_c) out.push_back("pc" + short_real(p));
    return out;
  }
  if (cfg.scenario == Scenario::control) return {"mac" + std::to_string(cfg.control.m_channels)};
  return {""};
}

ScenarioResult run_scenario(const ExperimentConfig& cfg, const RunControls& controls) {
  validate_config(cfg);
  const Context ctx(cfg);
  const auto labels = variant_labels(cfg);
  const std::string hash = config_hash(cfg);
  const std::string version = version_string();
  const fs::path out_dir(cfg.out_dir);
  if (controls.write_files) fs::create_directories(out_dir);

  ScenarioResult result;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    for (std::uint64_t seed : cfg.seeds) {
      SeedResult r;
      r.variant = v;
      r.seed = seed;
      r.csv = csv_name(cfg, labels[v], seed);
      result.runs.push_back(std::move(r));
    }
  }

  const JobBody body = body_for(cfg.scenario);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < result.runs.size(); i = next.fetch_add(1)) {
      SeedResult& r = result.runs[i];
      try {
        body(cfg, ctx, r);
        r.trace.metadata()["seed"] = std::to_string(r.seed);
        r.trace.metadata()["config_hash"] = hash;
        r.trace.metadata()["version"] = version;
        if (controls.write_files) r.trace.write_csv((out_dir / r.csv).string());
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(controls.jobs, 1, std::max<std::size_t>(1, result.runs.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  json summary;
  summary["scenario"] = to_string(cfg.scenario);
  summary["version"] = version;
  summary["config_hash"] = hash;
  summary["config"] = config_to_json(cfg);
  json variants = json::array();
  for (std::size_t v = 0; v < labels.size(); ++v) {
    json var;
    var["label"] = labels[v];
    json seeds = json::array();
    std::vector<const SeedResult*> ok;
    for (const auto& r : result.runs) {
      if (r.variant != v) continue;
      json s{{"seed", r.seed}, {"ok", r.ok}};
      if (r.ok) {
        s["csv"] = r.csv;
        s["stats"] = r.stats;
        ok.push_back(&r);
      } else {
        s["error"] = r.error;
        ++result.failures;
      }
      seeds.push_back(s);
    }
    var["seeds"] = seeds;
    var["aggregate"] = aggregate(cfg, ok);
    variants.push_back(var);
  }
  summary["variants"] = variants;
  summary["failures"] = result.failures;
  result.summary = summary;
  if (controls.write_files) write_json(out_dir / "summary.json", summary);
  return result;
}

json compare_oracle(const ExperimentConfig& cfg, const RunControls& controls) {
  if (cfg.scenario != Scenario::estimate && cfg.scenario != Scenario::track &&
      cfg.scenario != Scenario::distributed) {
    throw ConfigError("scenario", "oracle comparison needs an estimate, track or distributed scenario");
  }
  const ScenarioResult res = run_scenario(cfg, controls);
  const auto labels = variant_labels(cfg);
  json report;
  report["scenario"] = to_string(cfg.scenario);
  report["config_hash"] = res.summary["config_hash"];
  json rows = json::array();
  for (const auto& r : res.runs) {
    json row{{"variant", labels[r.variant]}, {"seed", r.seed}, {"ok", r.ok}};
    if (!r.ok) {
      row["error"] = r.error;
    } else if (cfg.scenario == Scenario::track) {
      row["segments"] = r.stats["segments"];
    } else {
      for (const char* key : {"lambda2", "lambda3", "connected", "degenerate", "z_final", "abs_error", "alignment"}) {
        row[key] = r.stats[key];
      }
      // Error-versus-bound columns (fiedler_err, bound) live in the CSV.
      row["csv"] = r.csv;
    }
    rows.push_back(row);
  }
  report["runs"] = rows;
  if (controls.write_files) write_json(fs::path(cfg.out_dir) / "oracle.json", report);
  return report;
}

}  // namespace algcon
