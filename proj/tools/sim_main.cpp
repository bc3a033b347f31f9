// Command-line front end: `sim run` executes a config file, `sim preset`
// runs one of the canned experiment grids, `sim verify` machine-checks the
// structural identities and exits nonzero if any check fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decsim/harness.hpp"
#include "decsim/verification.hpp"

namespace fs = std::filesystem;
using namespace decsim;

namespace {

void print_run_header(const RunRecord& rec) {
  auto get = [&](const char* k) {
    const std::string* v = rec.find_meta(k);
    return v ? *v : std::string("-");
  };
  std::printf("%-6s %-10s zeta_sq=%-4s sigma_sq=%-4s rep=%s p=%s b=%s b'=%s final_error=%.6g\n",
              get("algorithm").c_str(), get("topology").c_str(), get("zeta_sq").c_str(),
              get("sigma_sq").c_str(), get("rep").c_str(), get("spectral_gap_p").c_str(),
              get("frobenius_b").c_str(), get("frobenius_b_prime").c_str(),
              rec.final_error());
}

int run_configs(const std::vector<ExperimentConfig>& cfgs, const std::string& out_dir) {
  std::vector<RunRecord> all;
  for (const auto& cfg : cfgs) {
    auto records = run_experiment(cfg);
    for (auto& rec : records) {
      print_run_header(rec);
      all.push_back(std::move(rec));
    }
  }
  write_records(out_dir, all);
  write_summary_csv(fs::path(out_dir) / "summary.csv", summarize(all));
  std::printf("wrote %zu records to %s\n", all.size(), out_dir.c_str());
  return 0;
}

void write_series_csv(const fs::path& path, const char* col,
                      const std::vector<double>& series) {
  std::ofstream out(path);
  out << "round," << col << "\n";
  char buf[64];
  for (size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, series[i]);
    out << buf;
  }
}

struct VerifyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<VerifyResult> verify_theorem1(std::uint64_t seed, const std::string& out_dir) {
  std::vector<VerifyResult> results;
  const struct {
    const char* name;
    Graph g;
  } topos[] = {{"ring", build_ring(25)}, {"torus:5x5", build_torus(5, 5)},
               {"complete", build_complete(25)}};
  for (const auto& t : topos) {
    const QuadraticProblem problem =
        generate_quadratic(50, 25, std::sqrt(10.0), std::sqrt(10.0), seed);
    const AlphaWeights a = example1_alpha(t.g, 1e3);
    const EquivalenceReport rep = check_theorem1(problem, t.g, a, 0.5, 10000);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max deviation %.3g (tol 1e-9)",
                  rep.max_x_deviation);
    results.push_back({std::string("theorem1/") + t.name, rep.passed(), detail});
    if (!out_dir.empty())
      write_series_csv(fs::path(out_dir) / ("theorem1_" + std::string(t.name == topos[1].name ? "torus5x5" : t.name) + "_deviation.csv"),
                       "x_deviation", rep.per_round);
  }
  // Control: a wrong relaxation parameter must break the equivalence.
  {
    const Graph g = build_ring(25);
    const QuadraticProblem problem =
        generate_quadratic(50, 25, std::sqrt(10.0), std::sqrt(10.0), seed);
    const EquivalenceReport rep =
        check_theorem1(problem, g, example1_alpha(g, 1e3), 0.5, 200,
                       Theorem1Options{.theta = 0.9, .enforce_premise = false});
    char detail[128];
    std::snprintf(detail, sizeof(detail), "deviation with theta=0.9 is %.3g (must exceed 1e-9)",
                  rep.max_x_deviation);
    results.push_back({"theorem1/negative-control", !rep.passed(), detail});
  }
  return results;
}

std::vector<VerifyResult> verify_lemma1(std::uint64_t seed, const std::string& out_dir) {
  std::vector<VerifyResult> results;
  const Graph g = build_ring(25);
  const QuadraticProblem problem =
      generate_quadratic(50, 25, std::sqrt(10.0), std::sqrt(10.0), seed);
  const AlphaWeights a = example1_alpha(g, 1e3);
  const AlphaInduced ind = alpha_induced(g, a, 0.5);
  const Lemma1Report rep =
      check_lemma1(problem, g, a, ind.w, ind.eta_prime(0), 10000);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "max ||sum c_i|| %.3g, max average-step defect %.3g (tol 1e-10)",
                rep.max_correction_sum, rep.max_average_residual);
  results.push_back({"lemma1/ring", rep.passed(), detail});
  if (!out_dir.empty()) {
    write_series_csv(fs::path(out_dir) / "lemma1_correction_sum.csv", "csum_norm",
                     rep.correction_sum_series);
    write_series_csv(fs::path(out_dir) / "lemma1_average_residual.csv", "residual",
                     rep.average_residual_series);
  }
  const Lemma1Report bad = check_lemma1(problem, g, a, ind.w, ind.eta_prime(0), 500,
                                        Lemma1Options{.tamper_alpha = true});
  std::snprintf(detail, sizeof(detail),
                "max ||sum c_i|| with tampered alpha %.3g (must exceed 1e-10)",
                bad.max_correction_sum);
  results.push_back({"lemma1/negative-control", !bad.passed(), detail});
  return results;
}

std::vector<VerifyResult> verify_mixing() {
  std::vector<VerifyResult> results;
  for (const auto& c : check_theorem2()) {
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "eta=%g max violation %.3g, eta' spread %.3g",
                  c.eta, c.report.max_violation, c.eta_prime_spread);
    char name[96];
    std::snprintf(name, sizeof(name), "mixing/%s/eta=%g", c.topology.c_str(), c.eta);
    results.push_back({name, c.ok, detail});
  }
  return results;
}

std::vector<VerifyResult> verify_gt_form(std::uint64_t seed, const std::string& out_dir) {
  std::vector<VerifyResult> results;
  const struct {
    const char* name;
    Graph g;
  } topos[] = {{"ring", build_ring(25)}, {"complete", build_complete(25)}};
  for (const auto& t : topos) {
    const QuadraticProblem problem =
        generate_quadratic(50, 25, std::sqrt(10.0), std::sqrt(10.0), seed);
    const GtFormReport rep =
        check_gt_form(problem, t.g, example1_alpha(t.g, 1e3), 0.5, 1000);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max recursion defect %.3g (tol 1e-9)",
                  rep.max_residual);
    results.push_back({std::string("gt-form/") + t.name, rep.passed(), detail});
    if (!out_dir.empty()) {
      write_series_csv(fs::path(out_dir) / (std::string("gt_form_") + t.name + "_residual.csv"),
                       "residual", rep.residual_series);
      write_series_csv(fs::path(out_dir) / (std::string("gt_form_") + t.name + "_tnorm.csv"),
                       "t_norm", rep.t_norm_series);
    }
  }
  return results;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized optimization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int reps = 1;
  bool seed_given = false, reps_given = false;

  auto* run_cmd = app.add_subcommand("run", "run experiments from a config file");
  run_cmd->add_option("--config", config_path, "key=value config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
    seed_given = true;
  });
  run_cmd->add_option("--reps", reps, "repetition override")->each([&](const std::string&) {
    reps_given = true;
  });

  std::string preset_name;
  auto* preset_cmd = app.add_subcommand("preset", "run a canned experiment grid");
  preset_cmd->add_option("name", preset_name, "one of fig2|fig3|fig4|fig5|fig6")->required();
  preset_cmd->add_option("--out", out_dir, "output directory");
  preset_cmd->add_option("--seed", seed, "master seed");
  preset_cmd->add_option("--reps", reps, "repetitions per sweep point");

  std::string check_name;
  auto* verify_cmd = app.add_subcommand("verify", "machine-check structural identities");
  verify_cmd->add_option("check", check_name, "theorem1|lemma1|mixing|gt-form|all")->required();
  verify_cmd->add_option("--out", out_dir, "directory for per-round deviation CSVs");
  verify_cmd->add_option("--seed", seed, "seed for the checked runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config_file(config_path);
      if (seed_given) cfg.seed = seed;
      if (reps_given) cfg.reps = reps;
      return run_configs({cfg}, out_dir);
    }
    if (*preset_cmd) {
      return run_configs(preset(preset_name, seed, reps), out_dir);
    }
    if (*verify_cmd) {
      fs::create_directories(out_dir);
      std::vector<VerifyResult> results;
      auto append = [&](std::vector<VerifyResult> more) {
        for (auto& r : more) results.push_back(std::move(r));
      };
      if (check_name == "theorem1") append(verify_theorem1(seed, out_dir));
      else if (check_name == "lemma1") append(verify_lemma1(seed, out_dir));
      else if (check_name == "mixing") append(verify_mixing());
      else if (check_name == "gt-form") append(verify_gt_form(seed, out_dir));
      else if (check_name == "all") {
        append(verify_theorem1(seed, out_dir));
        append(verify_lemma1(seed, out_dir));
        append(verify_mixing());
        append(verify_gt_form(seed, out_dir));
      } else {
        std::fprintf(stderr, "unknown check '%s' (theorem1|lemma1|mixing|gt-form|all)\n",
                     check_name.c_str());
        return 2;
      }
      bool all_pass = true;
      for (const auto& r : results) {
        std::printf("[%s] %-28s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all_pass = all_pass && r.pass;
      }
      return all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
