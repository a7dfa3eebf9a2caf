#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fscan/indices.hpp"
#include "fscan/scan.hpp"
#include "fscan/simulate.hpp"

namespace fscan::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kDegenerate = 3,
};

struct ScanManifest {
  std::filesystem::path sites;
  std::filesystem::path curves;
  std::vector<Method> methods{Method::pfss, Method::dffss, Method::npfss};
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  double level = 0.05;
  double max_fraction = 0.5;
  OverlapPolicy overlap = OverlapPolicy::none;
  bool all_secondaries = false;
  std::size_t threads = 1;
  bool emit_timings = false;
  std::filesystem::path out;  // empty: standard output
};

struct SimulateManifest {
  std::vector<Method> methods{Method::dffss};
  std::vector<Distribution> distributions{Distribution::gaussian};
  std::vector<ShiftFamily> shifts{ShiftFamily::delta1};
  std::vector<double> alphas;  // empty: default grid of each shift
  std::filesystem::path sites;  // empty: the France94 surrogate layout
  std::vector<std::string> cluster_ids;  // empty: Paris region
  std::size_t grid_points = 101;
  std::size_t replicates = 100;
  std::size_t permutations = 199;
  std::uint64_t seed = 1;
  double level = 0.05;
  double max_fraction = 0.5;
  std::size_t threads = 1;
  bool full_scale = false;
  std::filesystem::path out;
};

struct GenerateManifest {
  Distribution distribution = Distribution::gaussian;
  ShiftFamily shift = ShiftFamily::delta1;
  double alpha = 0.0;
  std::filesystem::path sites;
  std::vector<std::string> cluster_ids;
  std::size_t grid_points = 101;
  std::uint64_t seed = 1;
  std::size_t replicate = 0;
  std::filesystem::path sites_out;
  std::filesystem::path curves_out;
};

struct BenchManifest {
  std::size_t sites = 94;
  std::size_t times = 101;
  std::size_t repetitions = 5;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& samples);

struct BenchReport {
  std::size_t sites = 0;
  std::size_t times = 0;
  std::size_t candidates = 0;
  std::size_t repetitions = 0;
  double check_max_abs_diff = 0.0;  // n = 10 equality check
  Summary naive;
  Summary fast;
  Summary fast_build;
  Summary fast_windows;
  Summary scanner;  // WindowScanner over all windows, sign matrix included
  double speedup = 0.0;  // mean naive / mean fast
};

/// Sites scattered on a square plus null curves from the Gaussian generator.
FunctionalDataset bench_dataset(std::size_t n, std::size_t t,
                                std::uint64_t seed, SiteGrid* grid_out = nullptr);

/// Largest |fast - naive| NPFSS difference over all candidate windows.
double npfss_max_difference(std::size_t n, std::size_t t, std::uint64_t seed);

BenchReport run_bench(const BenchManifest& m);

/// Each command writes its output to m.out (atomically) or to `out`, and
/// progress and diagnostics to `err`. Library errors propagate.
int cmd_scan(const ScanManifest& m, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateManifest& m, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateManifest& m, std::ostream& err);
int cmd_bench(const BenchManifest& m, std::ostream& out, std::ostream& err);

/// Scan result document (without the trailing newline).
std::string scan_json(const ScanManifest& m,
                      const std::vector<ScanResult>& results,
                      const FunctionalDataset& ds, const SiteGrid& grid);

/// Writes `text` to `path` through a temporary file in the same directory.
void write_atomically(const std::filesystem::path& path, const std::string& text);

/// Parses argv, runs the command and maps errors to exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fscan::cli
