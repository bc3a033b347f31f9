#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decsim/algorithms.hpp"

namespace decsim {

// One experiment = one algorithm on one topology, swept over zeta^2 and
// sigma^2 (cross product) with `reps` repetitions per point.
struct ExperimentConfig {
  std::string algorithm;  // dpsgd | ecl | gecl | gt
  std::string topology;   // ring | torus:RxC | complete
  std::string mixing;     // metropolis | alpha:<alpha_total> (where applicable)
  int d = 50;
  int n = 25;
  std::int64_t rounds = 10000;
  std::vector<double> zeta_sq{0.0};
  std::vector<double> sigma_sq{0.0};
  std::optional<double> eta;
  std::optional<double> eta_prime;
  std::optional<double> theta;
  std::optional<double> alpha_total;
  std::string ecl_z_init = "zero";  // zero | coupled
  double x0 = 0.0;
  std::uint64_t seed = 42;
  int reps = 1;
  std::string label;  // optional tag echoed into filenames/metadata

  // Throws std::invalid_argument listing every offending or missing key.
  void validate() const;
};

// key=value lines; '#' starts a comment; zeta_sq/sigma_sq accept
// comma-separated sweep lists.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

Graph build_topology(const std::string& spec, int n);

// Seed for one sweep point, a pure function of (master seed, point
// parameters, rep) so reordering sweep lists never changes a record.
std::uint64_t point_seed(std::uint64_t master, double zeta_sq, double sigma_sq, int rep);

// Expands the sweep cross product and runs every point. Points execute in
// a small work pool; each worker owns its state and derived seed.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

// CSV with '# key=value' metadata rows, then a header row and one row per
// round. Doubles are printed with 17 significant digits so a parsed record
// reproduces the in-memory one exactly.
void write_record_csv(const std::filesystem::path& path, const RunRecord& rec);
RunRecord read_record_csv(const std::filesystem::path& path);

// Writes all records plus an index.csv; returns the written file names.
std::vector<std::string> write_records(const std::filesystem::path& dir,
                                       const std::vector<RunRecord>& records);

struct SummaryRow {
  std::string algorithm;
  std::string topology;
  double zeta_sq = 0.0;
  double sigma_sq = 0.0;
  int reps = 0;
  double final_error = 0.0;  // mean over reps
};

// Final-round error per (algorithm, topology, zeta^2, sigma^2), averaged
// over repetitions. Records must share the same round count.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);

// Canned experiment grids (heterogeneity and noise sweeps over the three
// topologies); `name` is fig2..fig6. Each returns several ExperimentConfigs
// sharing seed/reps.
std::vector<ExperimentConfig> preset(const std::string& name, std::uint64_t seed,
                                     int reps);
std::vector<std::string> preset_names();

}  // namespace decsim
