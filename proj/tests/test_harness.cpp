#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "decsim/harness.hpp"

using namespace decsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("decsim_test_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig small_gecl() {
  ExperimentConfig cfg;
  cfg.algorithm = "gecl";
  cfg.topology = "ring";
  cfg.mixing = "metropolis";
  cfg.d = 6;
  cfg.n = 5;
  cfg.rounds = 40;
  cfg.zeta_sq = {0.0, 10.0};
  cfg.sigma_sq = {10.0};
  cfg.eta_prime = 1e-2;
  cfg.seed = 7;
  cfg.reps = 2;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("config text parses keys, lists and comments") {
  const ExperimentConfig cfg = parse_config_text(
      "# demo\n"
      "algorithm = gecl\n"
      "topology = torus:3x3\n"
      "mixing = metropolis\n"
      "d = 4\nn = 9\nrounds = 10\n"
      "zeta_sq = 0, 2, 4\n"
      "sigma_sq = 0\n"
      "eta_prime = 0.001  # trailing comment\n"
      "seed = 99\nreps = 3\n");
  CHECK(cfg.algorithm == "gecl");
  CHECK(cfg.topology == "torus:3x3");
  CHECK(cfg.zeta_sq == std::vector<double>{0, 2, 4});
  CHECK(cfg.eta_prime == 1e-3);
  CHECK(cfg.seed == 99);
  CHECK(cfg.reps == 3);
  cfg.validate();
}

TEST_CASE("config validation lists offending keys") {
  ExperimentConfig cfg = small_gecl();
  cfg.algorithm = "dpsgd";
  cfg.eta_prime = 1e-3;  // stray for dpsgd
  cfg.eta = std::nullopt; // required for dpsgd
  try {
    cfg.validate();
    FAIL("expected validation error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("eta:") != std::string::npos);
    CHECK(msg.find("eta_prime") != std::string::npos);
  }
}

TEST_CASE("config validation: unknown names and bad lists") {
  CHECK_THROWS_AS(parse_config_text("algorithm = gossip\n").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("zeta_sq =\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("nonsense = 4\n"), std::invalid_argument);
  ExperimentConfig torus_bad = small_gecl();
  torus_bad.topology = "torus:4x4";  // n mismatch (5)
  CHECK_THROWS_AS(torus_bad.validate(), std::invalid_argument);
}

TEST_CASE("ecl rejects a mixing spec, gecl requires one") {
  ExperimentConfig cfg = small_gecl();
  cfg.algorithm = "ecl";
  cfg.eta = 0.5;
  cfg.alpha_total = 100.0;
  cfg.eta_prime = std::nullopt;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // mixing still set
  cfg.mixing.clear();
  cfg.validate();

  ExperimentConfig g2 = small_gecl();
  g2.mixing.clear();
  CHECK_THROWS_AS(g2.validate(), std::invalid_argument);
}

TEST_CASE("run_experiment expands the sweep cross product deterministically") {
  const ExperimentConfig cfg = small_gecl();
  const auto records = run_experiment(cfg);
  CHECK(records.size() == 4);  // 2 zeta x 1 sigma x 2 reps
  for (const auto& rec : records) CHECK(rec.rows.size() == 41);

  // reordering the sweep list must not change any record
  ExperimentConfig flipped = cfg;
  std::swap(flipped.zeta_sq[0], flipped.zeta_sq[1]);
  const auto records2 = run_experiment(flipped);
  REQUIRE(records2.size() == 4);
  auto find = [&](const std::vector<RunRecord>& rs, const std::string& z,
                  const std::string& rep) -> const RunRecord& {
    for (const auto& r : rs)
      if (*r.find_meta("zeta_sq") == z && *r.find_meta("rep") == rep) return r;
    throw std::runtime_error("record not found");
  };
  for (const char* z : {"0", "10"}) {
    for (const char* rep : {"0", "1"}) {
      const RunRecord& a = find(records, z, rep);
      const RunRecord& b = find(records2, z, rep);
      REQUIRE(a.rows.size() == b.rows.size());
      for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].error == b.rows[i].error);
        CHECK(a.rows[i].extra == b.rows[i].extra);
      }
    }
  }
}

TEST_CASE("a zero-round point yields a single-row record") {
  ExperimentConfig cfg = small_gecl();
  cfg.rounds = 0;
  cfg.zeta_sq = {4.0};
  cfg.sigma_sq = {0.0};
  cfg.reps = 1;
  const auto records = run_experiment(cfg);
  REQUIRE(records.size() == 1);
  CHECK(records[0].rows.size() == 1);
  CHECK(*records[0].find_meta("vectors_per_round") == "30");  // 3 * 2|E|, ring(5)
}

TEST_CASE("csv round trip reproduces the record exactly") {
  TempDir tmp;
  const auto records = run_experiment(small_gecl());
  const RunRecord& rec = records.front();
  const fs::path file = tmp.path / "rec.csv";
  write_record_csv(file, rec);
  const RunRecord back = read_record_csv(file);
  CHECK(back.meta == rec.meta);
  CHECK(back.extra_name == rec.extra_name);
  REQUIRE(back.rows.size() == rec.rows.size());
  for (size_t i = 0; i < rec.rows.size(); ++i) {
    CHECK(back.rows[i].error == rec.rows[i].error);
    CHECK(back.rows[i].consensus == rec.rows[i].consensus);
    CHECK(back.rows[i].fgap == rec.rows[i].fgap);
    CHECK(back.rows[i].extra == rec.rows[i].extra);
  }
}

TEST_CASE("write_records emits one file per record plus an index") {
  TempDir tmp;
  const auto records = run_experiment(small_gecl());
  const auto names = write_records(tmp.path, records);
  CHECK(names.size() == records.size());
  for (const auto& n : names) CHECK(fs::exists(tmp.path / n));
  CHECK(fs::exists(tmp.path / "index.csv"));
}

TEST_CASE("summarize averages reps per sweep point") {
  const auto records = run_experiment(small_gecl());
  const auto rows = summarize(records);
  CHECK(rows.size() == 2);  // two zeta points
  for (const auto& r : rows) {
    CHECK(r.reps == 2);
    CHECK(r.algorithm == "gecl");
    CHECK(r.sigma_sq == 10.0);
  }
}

TEST_CASE("presets cover the documented grids") {
  const auto fig2 = preset("fig2", 42, 1);
  CHECK(fig2.size() == 9);  // 3 algorithms x 3 topologies
  size_t runs = 0;
  for (const auto& cfg : fig2) {
    cfg.validate();
    runs += cfg.zeta_sq.size() * cfg.sigma_sq.size() * cfg.reps;
  }
  CHECK(runs == 36);

  const auto fig3 = preset("fig3", 42, 1);
  for (const auto& cfg : fig3) {
    CHECK(cfg.sigma_sq == std::vector<double>{0});
    CHECK(cfg.zeta_sq.size() == 6);
  }
  const auto fig4 = preset("fig4", 42, 1);
  for (const auto& cfg : fig4) {
    CHECK(cfg.zeta_sq == std::vector<double>{0});
    CHECK(cfg.sigma_sq.size() == 5);
  }
  CHECK_THROWS_AS(preset("fig9", 42, 1), std::invalid_argument);
}

TEST_CASE("topology specs resolve by name") {
  CHECK(build_topology("ring", 6).num_edges() == 6);
  CHECK(build_topology("complete", 4).num_edges() == 6);
  CHECK(build_topology("torus:3x4", 12).n == 12);
  CHECK_THROWS_AS(build_topology("mesh", 4), std::invalid_argument);
  CHECK_THROWS_AS(build_topology("torus:3", 3), std::invalid_argument);
}

TEST_SUITE_END();
