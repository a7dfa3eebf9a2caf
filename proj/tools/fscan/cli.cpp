#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fscan/error.hpp"
#include "fscan/io.hpp"
#include "fscan/presets.hpp"
#include "fscan/random.hpp"

namespace fscan::cli {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Method> expand_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& name : names) {
    if (name == "all") {
      out.insert(out.end(), {Method::pfss, Method::dffss, Method::npfss});
    } else {
      out.push_back(parse_method(name));
    }
  }
  std::vector<Method> unique;
  for (Method m : out) {
    if (std::find(unique.begin(), unique.end(), m) == unique.end()) unique.push_back(m);
  }
  if (unique.empty()) throw ValidationError("no method requested");
  return unique;
}

std::string join_methods(const std::vector<Method>& methods, char sep) {
  std::string s;
  for (Method m : methods) {
    if (!s.empty()) s += sep;
    s += to_string(m);
  }
  return s;
}

std::vector<std::size_t> resolve_cluster(const SiteGrid& grid,
                                         const std::vector<std::string>& ids) {
  if (ids.empty()) return paris_region_cluster(grid);
  std::vector<std::size_t> out;
  for (const auto& id : ids) {
    const auto idx = grid.index_of(id);
    if (!idx) throw ValidationError("cluster site '" + id + "' is not in the site file");
    out.push_back(*idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SiteGrid load_sites_or_preset(const std::filesystem::path& path) {
  return path.empty() ? france94_sites() : read_sites_csv(path);
}

Json window_json(const CandidateCluster& w, const SiteGrid& grid) {
  Json members = Json::array();
  for (std::size_t s : w.members) members.push_back(grid.site(s).id);
  Json j;
  j["center"] = grid.site(w.center).id;
  j["radius"] = w.radius;
  j["size"] = w.size();
  j["members"] = std::move(members);
  return j;
}

Json summary_json(const Summary& s) {
  return Json{{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

std::string csv_number(double v) {
  return std::isnan(v) ? std::string("NA") : format_double(v);
}

void emit(const std::filesystem::path& path, const std::string& text,
          std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_atomically(path, text);
  }
}

}  // namespace

Summary summarize(const std::vector<double>& samples) {
  Summary s;
  if (samples.empty()) return s;
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << text;
    f.close();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string scan_json(const ScanManifest& m, const std::vector<ScanResult>& results,
                      const FunctionalDataset& ds, const SiteGrid& grid) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "scan";
  doc["manifest"] = {
      {"sites", m.sites.string()},
      {"curves", m.curves.string()},
      {"methods", join_methods(m.methods, ',')},
      {"permutations", m.permutations},
      {"seed", m.seed},
      {"level", m.level},
      {"max_fraction", m.max_fraction},
      {"overlap", std::string(to_string(m.overlap))},
      {"all_secondaries", m.all_secondaries},
  };
  doc["data"] = {{"sites", ds.size()}, {"times", ds.num_times()}};

  Json list = Json::array();
  for (const auto& r : results) {
    Json j;
    j["method"] = std::string(to_string(r.method));
    j["lambda"] = r.lambda;
    j["p_value"] = r.p_value;
    j["significant"] = r.p_value < m.level;
    j["mlc"] = window_json(r.mlc, grid);
    if (r.argmax_time) j["argmax_time"] = *r.argmax_time;
    if (r.method == Method::dffss) {
      j["perfect_separation"] = r.perfect_separation;
      j["perfect_separation_windows"] = r.perfect_separation_windows;
    }
    j["permutations"] = r.permutations;
    j["master_seed"] = r.master_seed;
    j["degenerate_permutations"] = r.degenerate_permutations;
    Json secondaries = Json::array();
    for (const auto& s : r.secondaries) {
      Json sj = window_json(s.cluster, grid);
      sj["value"] = s.value;
      sj["p_value"] = s.p_value;
      secondaries.push_back(std::move(sj));
    }
    j["secondaries"] = std::move(secondaries);
    if (m.emit_timings) {
      j["timings"] = {
          {"prepare_seconds", r.timings.prepare_seconds},
          {"observed_seconds", r.timings.observed_seconds},
          {"permutation_seconds", r.timings.permutation_seconds},
          {"secondary_seconds", r.timings.secondary_seconds},
      };
    }
    list.push_back(std::move(j));
  }
  doc["results"] = std::move(list);
  return doc.dump(2);
}

int cmd_scan(const ScanManifest& m, std::ostream& out, std::ostream& err) {
  if (!(m.level > 0.0 && m.level < 1.0)) throw ValidationError("level must lie in (0, 1)");
  if (m.permutations == 0) throw ValidationError("at least one permutation is required");
  if (m.threads == 0) throw ValidationError("threads must be positive");
  const SiteGrid grid = read_sites_csv(m.sites);
  const FunctionalDataset ds = align_to_sites(read_curves_csv(m.curves), grid);
  const auto candidates = enumerate_candidates(grid, m.max_fraction);
  err << "fscan scan: " << ds.size() << " sites, " << ds.num_times() << " times, "
      << candidates.size() << " candidate windows\n";

  ScanOptions options;
  options.permutations = m.permutations;
  options.master_seed = m.seed;
  options.threads = m.threads;
  options.secondary.overlap = m.overlap;
  options.secondary.level = m.level;
  options.secondary.include_nonsignificant = m.all_secondaries;

  std::vector<ScanResult> results;
  for (Method method : m.methods) {
    results.push_back(monte_carlo(ds, candidates, method, options));
    const auto& r = results.back();
    err << "  " << to_string(method) << ": lambda " << r.lambda << ", p " << r.p_value
        << ", " << r.secondaries.size() << " secondaries";
    if (r.degenerate_permutations > 0) {
      err << ", " << r.degenerate_permutations << " degenerate permutations";
    }
    err << " (" << r.timings.prepare_seconds + r.timings.observed_seconds +
                       r.timings.permutation_seconds + r.timings.secondary_seconds
        << " s)\n";
  }
  emit(m.out, scan_json(m, results, ds, grid) + "\n", out);
  return kOk;
}

int cmd_simulate(const SimulateManifest& m, std::ostream& out, std::ostream& err) {
  SimulationConfig base;
  base.sites = load_sites_or_preset(m.sites);
  base.true_cluster = resolve_cluster(base.sites, m.cluster_ids);
  if (m.grid_points < 2) throw ValidationError("grid_points must be at least 2");
  base.time_grid = equally_spaced_grid(0.0, 1.0, m.grid_points);
  base.replicates = m.replicates;
  base.permutations = m.permutations;
  base.master_seed = m.seed;
  base.level = m.level;
  base.max_fraction = m.max_fraction;
  base.threads = m.threads;
  validate(base);
  for (double a : m.alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("alpha values must be finite and >= 0");
  }

  std::ostringstream csv;
  csv << "# fscan simulate sites=" << (m.sites.empty() ? "france94" : m.sites.string())
      << " cluster=";
  for (std::size_t i = 0; i < base.true_cluster.size(); ++i) {
    csv << (i ? ";" : "") << base.sites.site(base.true_cluster[i]).id;
  }
  csv << " grid_points=" << m.grid_points << " level=" << format_double(m.level)
      << " max_fraction=" << format_double(m.max_fraction)
      << " full_scale=" << (m.full_scale ? "true" : "false") << "\n";
  csv << "schema_version,method,distribution,shift,alpha,power,tpr,fpr,f_measure,"
         "rejected,replicates,M,seed\n";

  for (Method method : m.methods) {
    for (Distribution dist : m.distributions) {
      for (ShiftFamily shift : m.shifts) {
        const auto alphas = m.alphas.empty() ? default_alpha_grid(shift) : m.alphas;
        for (double alpha : alphas) {
          SimulationConfig cfg = base;
          cfg.method = method;
          cfg.distribution = dist;
          cfg.shift = shift;
          cfg.alpha = alpha;
          const auto start = Clock::now();
          const StudyMetrics r = run_power_study(cfg);
          err << "fscan simulate: " << to_string(method) << " " << to_string(dist)
              << " " << to_string(shift) << " alpha=" << alpha << " power=" << r.power
              << " (" << seconds_since(start) << " s)\n";
          csv << kSchemaVersion << ',' << to_string(method) << ',' << to_string(dist)
              << ',' << to_string(shift) << ',' << format_double(alpha) << ','
              << csv_number(r.power) << ',' << csv_number(r.tpr) << ','
              << csv_number(r.fpr) << ',' << csv_number(r.f_measure) << ','
              << r.rejected_count << ',' << r.replicates << ',' << cfg.permutations
              << ',' << cfg.master_seed << '\n';
        }
      }
    }
  }
  emit(m.out, csv.str(), out);
  return kOk;
}

int cmd_generate(const GenerateManifest& m, std::ostream& err) {
  if (m.sites_out.empty() || m.curves_out.empty()) {
    throw ValidationError("generate needs --sites-out and --curves-out");
  }
  SimulationConfig cfg;
  cfg.sites = load_sites_or_preset(m.sites);
  cfg.true_cluster = resolve_cluster(cfg.sites, m.cluster_ids);
  if (m.grid_points < 2) throw ValidationError("grid_points must be at least 2");
  cfg.time_grid = equally_spaced_grid(0.0, 1.0, m.grid_points);
  cfg.distribution = m.distribution;
  cfg.shift = m.shift;
  cfg.alpha = m.alpha;
  cfg.master_seed = m.seed;
  validate(cfg);
  const FunctionalDataset ds = generate_dataset(cfg, m.replicate);

  std::ostringstream sites, curves;
  write_sites_csv(sites, cfg.sites);
  write_curves_csv(curves, ds);
  write_atomically(m.sites_out, sites.str());
  write_atomically(m.curves_out, curves.str());
  err << "fscan generate: " << ds.size() << " sites, " << ds.num_times()
      << " times, cluster of " << cfg.true_cluster.size() << " sites\n";
  return kOk;
}

FunctionalDataset bench_dataset(std::size_t n, std::size_t t, std::uint64_t seed,
                                SiteGrid* grid_out) {
  if (n < 2 || t < 2) throw ValidationError("bench needs at least 2 sites and 2 times");
  Rng rng(derive_seed(seed, {2}));
  std::vector<Site> records;
  for (std::size_t i = 0; i < n; ++i) {
    records.push_back({"s" + std::to_string(i), 100.0 * rng.uniform(),
                       100.0 * rng.uniform()});
  }
  SimulationConfig cfg;
  cfg.sites = build_site_grid(std::move(records));
  cfg.true_cluster = {0};
  cfg.time_grid = equally_spaced_grid(0.0, 1.0, t);
  cfg.master_seed = seed;
  auto ds = generate_dataset(cfg, 0);
  if (grid_out) *grid_out = cfg.sites;
  return ds;
}

double npfss_max_difference(std::size_t n, std::size_t t, std::uint64_t seed) {
  SiteGrid grid;
  const auto ds = bench_dataset(n, t, seed, &grid);
  const auto candidates = enumerate_candidates(grid);
  const auto sm = build_sign_matrix(ds);
  const auto scanned = WindowScanner(ds, candidates, Method::npfss).evaluate();
  double worst = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double naive = npfss_index_naive(ds, candidates[c]);
    worst = std::max(worst, std::abs(npfss_index(sm, candidates[c]).value - naive));
    worst = std::max(worst, std::abs(scanned.values[c] - naive));
  }
  return worst;
}

BenchReport run_bench(const BenchManifest& m) {
  if (m.repetitions == 0) throw ValidationError("repetitions must be positive");
  BenchReport report;
  report.check_max_abs_diff = npfss_max_difference(10, m.times, m.seed);
  if (!(report.check_max_abs_diff <= 1e-10)) {
    throw std::runtime_error("fast and naive NPFSS disagree on the n = 10 check");
  }

  SiteGrid grid;
  const auto ds = bench_dataset(m.sites, m.times, m.seed, &grid);
  const auto candidates = enumerate_candidates(grid);
  report.sites = ds.size();
  report.times = ds.num_times();
  report.candidates = candidates.size();
  report.repetitions = m.repetitions;

  volatile double sink = 0.0;
  auto naive_pass = [&] {
    double acc = 0.0;
    for (const auto& w : candidates) acc += npfss_index_naive(ds, w);
    sink = sink + acc;
  };
  auto fast_pass = [&](double& build, double& windows) {
    const auto start = Clock::now();
    const auto sm = build_sign_matrix(ds);
    build = seconds_since(start);
    const auto mid = Clock::now();
    double acc = 0.0;
    for (const auto& w : candidates) acc += npfss_index(sm, w).value;
    windows = seconds_since(mid);
    sink = sink + acc;
  };
  auto scanner_pass = [&] {
    const WindowScanner scanner(ds, candidates, Method::npfss);
    sink = sink + scanner.evaluate().values[0];
  };

  double b = 0.0, w = 0.0;
  naive_pass();
  fast_pass(b, w);
  scanner_pass();

  std::vector<double> naive, fast, build, windows, scanner;
  for (std::size_t r = 0; r < m.repetitions; ++r) {
    auto start = Clock::now();
    naive_pass();
    naive.push_back(seconds_since(start));
    start = Clock::now();
    fast_pass(b, w);
    fast.push_back(seconds_since(start));
    build.push_back(b);
    windows.push_back(w);
    start = Clock::now();
    scanner_pass();
    scanner.push_back(seconds_since(start));
  }
  report.naive = summarize(naive);
  report.fast = summarize(fast);
  report.fast_build = summarize(build);
  report.fast_windows = summarize(windows);
  report.scanner = summarize(scanner);
  report.speedup = report.naive.mean / report.fast.mean;
  return report;
}

int cmd_bench(const BenchManifest& m, std::ostream& out, std::ostream& err) {
  err << "fscan bench: checking n = 10, then timing n = " << m.sites
      << ", T = " << m.times << " over " << m.repetitions << " repetitions\n";
  const BenchReport r = run_bench(m);
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "bench";
  doc["manifest"] = {{"sites", m.sites},
                     {"times", m.times},
                     {"repetitions", m.repetitions},
                     {"seed", m.seed}};
  doc["candidates"] = r.candidates;
  doc["check_max_abs_diff"] = r.check_max_abs_diff;
  doc["naive_seconds"] = summary_json(r.naive);
  doc["sign_matrix_seconds"] = summary_json(r.fast);
  doc["phases"] = {{"matrix_build_seconds", summary_json(r.fast_build)},
                   {"window_sums_seconds", summary_json(r.fast_windows)}};
  doc["scanner_seconds"] = summary_json(r.scanner);
  doc["speedup"] = r.speedup;
  err << "  naive " << r.naive.mean << " s, sign matrix " << r.fast.mean
      << " s, speedup " << r.speedup << "x\n";
  emit(m.out, doc.dump(2) + "\n", out);
  return kOk;
}

namespace {

// Flat `key = value` lines become `--key value` arguments unless the key was
// already given on the command line. Blank lines and `#` comments are skipped.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> out;
  std::vector<std::string> injected;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) == 0) given.insert(args[i].substr(2, args[i].find('=') - 2));
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      std::string key = trim(line.substr(0, eq));
      std::replace(key.begin(), key.end(), '_', '-');
      const std::string value = trim(line.substr(eq + 1));
      if (given.count(key)) continue;
      given.insert(key);
      if (value == "true") {
        injected.push_back("--" + key);
      } else if (value != "false") {
        injected.push_back("--" + key);
        injected.push_back(value);
      }
    }
  }
  out.insert(out.end(), injected.begin(), injected.end());
  return out;
}

void add_method_option(CLI::App& cmd, std::vector<std::string>& names,
                       const std::string& help) {
  cmd.add_option("--method", names, help)
      ->delimiter(',')
      ->check(CLI::IsMember({"pfss", "dffss", "npfss", "all"}))
      ->envname("FSCAN_METHOD");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial scan statistics for functional data"};
  app.name("fscan");
  app.require_subcommand(1);
  app.set_version_flag("--version", "fscan 0.1.0");
  app.add_option("--config", "Flat key = value file supplying defaults for flags");

  ScanManifest scan;
  std::vector<std::string> scan_methods{"all"};
  std::string scan_overlap = "none";
  auto* s = app.add_subcommand("scan", "Detect clusters in a sites + curves dataset");
  s->add_option("--sites", scan.sites, "Sites CSV (id,x,y)")->required()->envname("FSCAN_SITES");
  s->add_option("--curves", scan.curves, "Curves CSV (id,t_1,...,t_T)")->required()->envname("FSCAN_CURVES");
  add_method_option(*s, scan_methods, "pfss, dffss, npfss or all");
  s->add_option("--perms", scan.permutations, "Monte-Carlo permutations M")
      ->capture_default_str()->check(CLI::PositiveNumber)->envname("FSCAN_PERMS");
  s->add_option("--seed", scan.seed, "Master seed")->capture_default_str()->envname("FSCAN_SEED");
  s->add_option("--level", scan.level, "Significance level")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0))->envname("FSCAN_LEVEL");
  s->add_option("--max-fraction", scan.max_fraction, "Largest window as a fraction of the sites")
      ->capture_default_str()->envname("FSCAN_MAX_FRACTION");
  s->add_option("--overlap", scan_overlap, "Secondary cluster overlap policy")
      ->capture_default_str()->check(CLI::IsMember({"none", "partial"}))->envname("FSCAN_OVERLAP");
  s->add_flag("--all-secondaries", scan.all_secondaries, "Report non-significant secondaries too");
  s->add_option("--threads", scan.threads, "Worker threads")
      ->capture_default_str()->check(CLI::PositiveNumber)->envname("FSCAN_THREADS");
  s->add_flag("--emit-timings", scan.emit_timings, "Include wall-clock timings in the JSON");
  s->add_option("--out", scan.out, "Output JSON path (default: standard output)")->envname("FSCAN_OUT");

  SimulateManifest sim;
  std::vector<std::string> sim_methods{"dffss"};
  std::vector<std::string> sim_dists{"gaussian"};
  std::vector<std::string> sim_shifts{"delta1"};
  auto* m = app.add_subcommand("simulate", "Power study over a grid of settings");
  add_method_option(*m, sim_methods, "Comma list of pfss, dffss, npfss or all");
  m->add_option("--distribution", sim_dists, "Comma list of gaussian, student4, chisq4")
      ->delimiter(',')->check(CLI::IsMember({"gaussian", "student4", "chisq4"}));
  m->add_option("--shift", sim_shifts, "Comma list of delta1, delta2, delta3")
      ->delimiter(',')->check(CLI::IsMember({"delta1", "delta2", "delta3"}));
  m->add_option("--alpha", sim.alphas, "Comma list of intensities (default: five-point grid per shift)")
      ->delimiter(',');
  m->add_option("--sites", sim.sites, "Sites CSV (default: France94 surrogate)")->envname("FSCAN_SITES");
  m->add_option("--cluster", sim.cluster_ids, "Comma list of true cluster ids (default: Paris region)")
      ->delimiter(',');
  m->add_option("--grid-points", sim.grid_points, "Equally spaced times on [0, 1]")->capture_default_str();
  m->add_option("--replicates", sim.replicates, "Datasets per setting")
      ->capture_default_str()->check(CLI::PositiveNumber);
  m->add_option("--perms", sim.permutations, "Monte-Carlo permutations per dataset")
      ->capture_default_str()->check(CLI::PositiveNumber)->envname("FSCAN_PERMS");
  m->add_option("--seed", sim.seed, "Master seed")->capture_default_str()->envname("FSCAN_SEED");
  m->add_option("--level", sim.level, "Significance level")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0))->envname("FSCAN_LEVEL");
  m->add_option("--max-fraction", sim.max_fraction, "Largest window as a fraction of the sites")
      ->capture_default_str()->envname("FSCAN_MAX_FRACTION");
  m->add_option("--threads", sim.threads, "Worker threads")
      ->capture_default_str()->check(CLI::PositiveNumber)->envname("FSCAN_THREADS");
  m->add_flag("--full-scale", sim.full_scale,
              "Full study: every method, law and shift, 1000 replicates, M = 999");
  m->add_option("--out", sim.out, "Output CSV path (default: standard output)")->envname("FSCAN_OUT");

  GenerateManifest gen;
  std::string gen_dist = "gaussian";
  std::string gen_shift = "delta1";
  auto* g = app.add_subcommand("generate", "Write one simulated dataset as CSV files");
  g->add_option("--distribution", gen_dist)->capture_default_str()
      ->check(CLI::IsMember({"gaussian", "student4", "chisq4"}));
  g->add_option("--shift", gen_shift)->capture_default_str()
      ->check(CLI::IsMember({"delta1", "delta2", "delta3"}));
  g->add_option("--alpha", gen.alpha, "Shift intensity")->capture_default_str();
  g->add_option("--sites", gen.sites, "Sites CSV (default: France94 surrogate)");
  g->add_option("--cluster", gen.cluster_ids, "Comma list of cluster ids")->delimiter(',');
  g->add_option("--grid-points", gen.grid_points)->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str()->envname("FSCAN_SEED");
  g->add_option("--replicate", gen.replicate, "Replicate index")->capture_default_str();
  g->add_option("--sites-out", gen.sites_out)->required();
  g->add_option("--curves-out", gen.curves_out)->required();

  BenchManifest bench;
  auto* b = app.add_subcommand("bench", "Time naive against sign-matrix NPFSS");
  b->add_option("--sites", bench.sites, "Number of sites")->capture_default_str();
  b->add_option("--times", bench.times, "Number of grid times")->capture_default_str();
  b->add_option("--repetitions", bench.repetitions, "Timed repetitions")
      ->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed)->capture_default_str()->envname("FSCAN_SEED");
  b->add_option("--out", bench.out, "Output JSON path (default: standard output)")->envname("FSCAN_OUT");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kValidation;
    }

    if (s->parsed()) {
      scan.methods = expand_methods(scan_methods);
      scan.overlap = parse_overlap(scan_overlap);
      return cmd_scan(scan, out, err);
    }
    if (m->parsed()) {
      if (sim.full_scale) {
        if (!m->count("--method")) sim_methods = {"all"};
        if (!m->count("--distribution")) sim_dists = {"gaussian", "student4", "chisq4"};
        if (!m->count("--shift")) sim_shifts = {"delta1", "delta2", "delta3"};
        if (!m->count("--replicates")) sim.replicates = 1000;
        if (!m->count("--perms")) sim.permutations = 999;
      }
      sim.methods = expand_methods(sim_methods);
      sim.distributions.clear();
      for (const auto& d : sim_dists) sim.distributions.push_back(parse_distribution(d));
      sim.shifts.clear();
      for (const auto& sh : sim_shifts) sim.shifts.push_back(parse_shift(sh));
      return cmd_simulate(sim, out, err);
    }
    if (g->parsed()) {
      gen.distribution = parse_distribution(gen_dist);
      gen.shift = parse_shift(gen_shift);
      return cmd_generate(gen, err);
    }
    return cmd_bench(bench, out, err);
  } catch (const ValidationError& e) {
    err << "fscan: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const DegenerateDataError& e) {
    err << "fscan: degenerate data: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "fscan: error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace fscan::cli
