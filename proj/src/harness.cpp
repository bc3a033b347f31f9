#include "decsim/harness.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "decsim/rng.hpp"

namespace decsim {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size())
      throw std::invalid_argument("config: bad numeric value '" + item + "' for " + key);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  auto v = parse_double_list(s, key);
  if (v.size() != 1)
    throw std::invalid_argument("config: expected a single value for " + key);
  return v[0];
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::uint64_t double_bits(double v) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(v));
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

struct MixingSpec {
  bool metropolis = false;
  std::optional<double> alpha_total;
};

std::optional<MixingSpec> parse_mixing(const std::string& s) {
  if (s == "metropolis") return MixingSpec{true, std::nullopt};
  if (s.rfind("alpha:", 0) == 0) {
    try {
      double a = std::stod(s.substr(6));
      if (a > 0.0) return MixingSpec{false, a};
    } catch (...) {
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  const auto algo = algo_from_name(algorithm);
  if (!algo) errs.push_back("algorithm: must be one of dpsgd|ecl|gecl|gt, got '" + algorithm + "'");
  if (d < 1) errs.push_back("d: must be >= 1");
  if (n < 1) errs.push_back("n: must be >= 1");
  if (rounds < 0) errs.push_back("rounds: must be >= 0");
  if (reps < 1) errs.push_back("reps: must be >= 1");
  if (zeta_sq.empty()) errs.push_back("zeta_sq: sweep list must be nonempty");
  if (sigma_sq.empty()) errs.push_back("sigma_sq: sweep list must be nonempty");
  for (double z : zeta_sq)
    if (z < 0.0) errs.push_back("zeta_sq: values must be >= 0");
  for (double s : sigma_sq)
    if (s < 0.0) errs.push_back("sigma_sq: values must be >= 0");
  if (theta && (*theta <= 0.0 || *theta > 1.0)) errs.push_back("theta: must be in (0, 1]");
  if (ecl_z_init != "zero" && ecl_z_init != "coupled")
    errs.push_back("ecl_z_init: must be zero|coupled");

  try {
    build_topology(topology, n);
  } catch (const std::exception& e) {
    errs.push_back(std::string("topology: ") + e.what());
  }

  const auto mix = parse_mixing(mixing);
  const bool has_mixing = !mixing.empty();
  if (has_mixing && !mix)
    errs.push_back("mixing: must be metropolis|alpha:<alpha_total>, got '" + mixing + "'");

  if (algo) {
    switch (*algo) {
      case Algo::Dpsgd:
      case Algo::Gt: {
        if (!eta) errs.push_back("eta: required for " + algorithm);
        if (!has_mixing) errs.push_back("mixing: required for " + algorithm);
        if (eta_prime) errs.push_back("eta_prime: not a parameter of " + algorithm);
        if (theta) errs.push_back("theta: not a parameter of " + algorithm);
        if (alpha_total) errs.push_back("alpha_total: not a parameter of " + algorithm);
        break;
      }
      case Algo::Ecl: {
        if (!eta) errs.push_back("eta: required for ecl");
        if (!alpha_total) errs.push_back("alpha_total: required for ecl");
        if (alpha_total && *alpha_total <= 0.0) errs.push_back("alpha_total: must be > 0");
        if (has_mixing) errs.push_back("mixing: not a parameter of ecl (weights come from alpha_total and eta)");
        if (eta_prime) errs.push_back("eta_prime: not a parameter of ecl");
        break;
      }
      case Algo::Gecl: {
        if (!has_mixing) errs.push_back("mixing: required for gecl");
        if (mix && mix->metropolis && !eta_prime)
          errs.push_back("eta_prime: required for gecl with metropolis mixing");
        if (mix && !mix->metropolis && !eta && !eta_prime)
          errs.push_back("eta: required for gecl with alpha mixing (or give eta_prime)");
        if (alpha_total && *alpha_total < 0.0) errs.push_back("alpha_total: must be >= 0");
        if (theta) errs.push_back("theta: not a parameter of gecl");
        break;
      }
    }
  }

  if (!errs.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");

    if (key == "algorithm") cfg.algorithm = val;
    else if (key == "topology") cfg.topology = val;
    else if (key == "mixing") cfg.mixing = val;
    else if (key == "d") cfg.d = static_cast<int>(parse_double(val, key));
    else if (key == "n") cfg.n = static_cast<int>(parse_double(val, key));
    else if (key == "rounds") cfg.rounds = static_cast<std::int64_t>(parse_double(val, key));
    else if (key == "zeta_sq") cfg.zeta_sq = parse_double_list(val, key);
    else if (key == "sigma_sq") cfg.sigma_sq = parse_double_list(val, key);
    else if (key == "eta") cfg.eta = parse_double(val, key);
    else if (key == "eta_prime") cfg.eta_prime = parse_double(val, key);
    else if (key == "theta") cfg.theta = parse_double(val, key);
    else if (key == "alpha_total") cfg.alpha_total = parse_double(val, key);
    else if (key == "ecl_z_init") cfg.ecl_z_init = val;
    else if (key == "x0") cfg.x0 = parse_double(val, key);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "reps") cfg.reps = static_cast<int>(parse_double(val, key));
    else if (key == "label") cfg.label = val;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Graph build_topology(const std::string& spec, int n) {
  if (spec == "ring") return build_ring(n);
  if (spec == "complete") return build_complete(n);
  if (spec.rfind("torus:", 0) == 0) {
    const std::string dims = spec.substr(6);
    const auto x = dims.find('x');
    if (x != std::string::npos) {
      try {
        const int rows = std::stoi(dims.substr(0, x));
        const int cols = std::stoi(dims.substr(x + 1));
        if (rows * cols != n)
          throw std::invalid_argument("torus " + dims + " has " +
                                      std::to_string(rows * cols) + " nodes but n=" +
                                      std::to_string(n));
        return build_torus(rows, cols);
      } catch (const std::invalid_argument&) {
        throw;
      } catch (...) {
      }
    }
    throw std::invalid_argument("bad torus spec '" + spec + "', expected torus:RxC");
  }
  throw std::invalid_argument("unknown topology '" + spec + "' (ring|torus:RxC|complete)");
}

std::uint64_t point_seed(std::uint64_t master, double zeta_sq, double sigma_sq, int rep) {
  const std::uint64_t param_key =
      mix64(double_bits(zeta_sq) * 0x9e3779b97f4a7c15ULL ^ double_bits(sigma_sq));
  return derive_state(master, StreamTag::SweepPoint, param_key,
                      static_cast<std::uint64_t>(rep));
}

namespace {

void parallel_for(int count, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int threads = std::min<int>(count, static_cast<int>(hw));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Algo algo = *algo_from_name(cfg.algorithm);
  const Graph g = build_topology(cfg.topology, cfg.n);
  const auto mix = parse_mixing(cfg.mixing);

  struct Point {
    double zsq, ssq;
    int rep;
  };
  std::vector<Point> points;
  for (double z : cfg.zeta_sq)
    for (double s : cfg.sigma_sq)
      for (int rep = 0; rep < cfg.reps; ++rep) points.push_back({z, s, rep});

  // Shared, immutable per-experiment structures.
  AlgoParams base;
  Eigen::VectorXd induced_eta_prime;
  double diag_p = -1.0, diag_b = -1.0, diag_bp = -1.0;
  const auto note_diagnostics = [&](const Eigen::MatrixXd& w, const AlphaWeights& a) {
    const MixingMatrix mm{w};
    diag_p = spectral_gap(mm);
    const FrobeniusConsts fc = frobenius_consts(mm, a);
    diag_b = fc.b;
    diag_bp = fc.b_prime;
  };

  switch (algo) {
    case Algo::Dpsgd:
    case Algo::Gt: {
      base.eta = *cfg.eta;
      if (mix->metropolis) {
        base.w = metropolis(g).w;
        note_diagnostics(*base.w, uniform_alpha(g, 0.0));
      } else {
        const AlphaWeights a = example1_alpha(g, *mix->alpha_total);
        base.w = alpha_induced(g, a, *cfg.eta).w;
        note_diagnostics(*base.w, a);
      }
      break;
    }
    case Algo::Ecl: {
      base.eta = *cfg.eta;
      base.theta = cfg.theta.value_or(0.5);
      base.alpha = example1_alpha(g, *cfg.alpha_total);
      base.z_init = cfg.ecl_z_init == "coupled" ? EclZInit::CoupledToX0 : EclZInit::Zero;
      const AlphaInduced ind = alpha_induced(g, *base.alpha, *cfg.eta);
      note_diagnostics(ind.w, *base.alpha);
      induced_eta_prime = ind.eta_prime;
      break;
    }
    case Algo::Gecl: {
      AlphaWeights a = cfg.alpha_total && *cfg.alpha_total > 0.0
                           ? example1_alpha(g, *cfg.alpha_total)
                           : uniform_alpha(g, 0.0);
      if (mix->metropolis) {
        base.w = metropolis(g).w;
        base.eta_prime = Eigen::VectorXd::Constant(g.n, *cfg.eta_prime);
      } else {
        AlphaWeights wa = example1_alpha(g, *mix->alpha_total);
        const AlphaInduced ind = alpha_induced(g, wa, cfg.eta.value_or(1.0));
        base.w = ind.w;
        base.eta_prime = cfg.eta_prime
                             ? Eigen::VectorXd::Constant(g.n, *cfg.eta_prime)
                             : ind.eta_prime;
        if (!cfg.alpha_total) a = wa;  // correction follows the mixing weights
      }
      base.alpha = a;
      note_diagnostics(*base.w, a);
      break;
    }
  }

  std::vector<RunRecord> records(points.size());
  parallel_for(static_cast<int>(points.size()), [&](int idx) {
    const Point& pt = points[static_cast<size_t>(idx)];
    const std::uint64_t seed = point_seed(cfg.seed, pt.zsq, pt.ssq, pt.rep);
    const QuadraticProblem problem =
        generate_quadratic(cfg.d, cfg.n, std::sqrt(pt.zsq), std::sqrt(pt.ssq), seed);
    RunRecord rec = run(algo, problem, g, base, cfg.rounds, cfg.x0);
    // echo the exact sweep values (run() stores zeta^2 via sqrt round trip)
    rec.set_meta("zeta_sq", fmt_double(pt.zsq));
    rec.set_meta("sigma_sq", fmt_double(pt.ssq));
    rec.set_meta("topology", cfg.topology);
    if (!cfg.mixing.empty()) rec.set_meta("mixing", cfg.mixing);
    if (cfg.alpha_total) rec.set_meta("alpha_total", fmt_double(*cfg.alpha_total));
    rec.set_meta("rep", std::to_string(pt.rep));
    rec.set_meta("master_seed", std::to_string(cfg.seed));
    if (!cfg.label.empty()) rec.set_meta("label", cfg.label);
    if (diag_p >= 0.0) {
      rec.set_meta("spectral_gap_p", fmt_double(diag_p));
      rec.set_meta("frobenius_b", fmt_double(diag_b));
      rec.set_meta("frobenius_b_prime", fmt_double(diag_bp));
    }
    if (algo == Algo::Ecl)
      rec.set_meta("eta_prime_induced", fmt_double(induced_eta_prime(0)));
    records[static_cast<size_t>(idx)] = std::move(rec);
  });
  return records;
}

void write_record_csv(const std::filesystem::path& path, const RunRecord& rec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "# decsim-record v1\n";
  for (const auto& [k, v] : rec.meta) out << "# " << k << "=" << v << "\n";
  out << "round,error,consensus,fgap";
  if (!rec.extra_name.empty()) out << "," << rec.extra_name;
  out << "\n";
  char buf[192];
  for (size_t r = 0; r < rec.rows.size(); ++r) {
    const MetricRow& row = rec.rows[r];
    if (rec.extra_name.empty())
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", r, row.error,
                    row.consensus, row.fgap);
    else
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", r, row.error,
                    row.consensus, row.fgap, row.extra);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RunRecord read_record_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record: " + path.string());
  RunRecord rec;
  std::string line;
  bool header_seen = false;
  size_t expect_cols = 4;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        rec.meta.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) cols.push_back(trim(c));
      if (cols.size() < 4 || cols[0] != "round")
        throw std::runtime_error("bad record header in " + path.string());
      if (cols.size() == 5) {
        rec.extra_name = cols[4];
        expect_cols = 5;
      } else if (cols.size() != 4) {
        throw std::runtime_error("bad record header in " + path.string());
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (cells.size() != expect_cols)
      throw std::runtime_error("bad record row in " + path.string());
    MetricRow row;
    row.error = std::stod(cells[1]);
    row.consensus = std::stod(cells[2]);
    row.fgap = std::stod(cells[3]);
    if (expect_cols == 5) row.extra = std::stod(cells[4]);
    if (std::stoull(cells[0]) != rec.rows.size())
      throw std::runtime_error("non-contiguous rounds in " + path.string());
    rec.rows.push_back(row);
  }
  if (!header_seen) throw std::runtime_error("record has no header: " + path.string());
  return rec;
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '/' || c == ' ') c = '_';
  return s;
}

std::string meta_or(const RunRecord& rec, const std::string& key, const std::string& dflt) {
  const std::string* v = rec.find_meta(key);
  return v ? *v : dflt;
}

}  // namespace

std::vector<std::string> write_records(const std::filesystem::path& dir,
                                       const std::vector<RunRecord>& records) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  std::ofstream index(dir / "index.csv");
  if (!index) throw std::runtime_error("cannot open index.csv in " + dir.string());
  index << "file,algorithm,topology,zeta_sq,sigma_sq,rep,rounds,final_error\n";
  for (const auto& rec : records) {
    const std::string label = meta_or(rec, "label", "");
    std::string name = (label.empty() ? "" : sanitize(label) + "_") +
                       meta_or(rec, "algorithm", "run") + "_" +
                       sanitize(meta_or(rec, "topology", "topo")) + "_z" +
                       fmt_short(std::stod(meta_or(rec, "zeta_sq", "0"))) + "_s" +
                       fmt_short(std::stod(meta_or(rec, "sigma_sq", "0"))) + "_r" +
                       meta_or(rec, "rep", "0") + ".csv";
    write_record_csv(dir / name, rec);
    index << name << "," << meta_or(rec, "algorithm", "") << ","
          << meta_or(rec, "topology", "") << "," << meta_or(rec, "zeta_sq", "") << ","
          << meta_or(rec, "sigma_sq", "") << "," << meta_or(rec, "rep", "0") << ","
          << meta_or(rec, "rounds", "") << "," << fmt_double(rec.final_error()) << "\n";
    names.push_back(std::move(name));
  }
  return names;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) return {};
  const size_t rows0 = records.front().rows.size();
  for (const auto& r : records)
    if (r.rows.size() != rows0)
      throw std::invalid_argument("summarize: records have differing round counts");

  std::map<std::tuple<std::string, std::string, double, double>, std::pair<double, int>> acc;
  for (const auto& rec : records) {
    const auto key = std::make_tuple(meta_or(rec, "algorithm", ""), meta_or(rec, "topology", ""),
                                     std::stod(meta_or(rec, "zeta_sq", "0")),
                                     std::stod(meta_or(rec, "sigma_sq", "0")));
    auto& [sum, count] = acc[key];
    sum += rec.final_error();
    count += 1;
  }
  std::vector<SummaryRow> out;
  out.reserve(acc.size());
  for (const auto& [key, val] : acc) {
    SummaryRow row;
    row.algorithm = std::get<0>(key);
    row.topology = std::get<1>(key);
    row.zeta_sq = std::get<2>(key);
    row.sigma_sq = std::get<3>(key);
    row.reps = val.second;
    row.final_error = val.first / val.second;
    out.push_back(std::move(row));
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "algorithm,topology,zeta_sq,sigma_sq,reps,final_error\n";
  for (const auto& r : rows)
    out << r.algorithm << "," << r.topology << "," << fmt_short(r.zeta_sq) << ","
        << fmt_short(r.sigma_sq) << "," << r.reps << "," << fmt_double(r.final_error)
        << "\n";
}

namespace {

ExperimentConfig preset_base(const std::string& algo, const std::string& topo,
                             const std::string& label, std::uint64_t seed, int reps) {
  ExperimentConfig cfg;
  cfg.algorithm = algo;
  cfg.topology = topo;
  cfg.d = 50;
  cfg.n = 25;
  cfg.rounds = 10000;
  cfg.seed = seed;
  cfg.reps = reps;
  cfg.label = label;
  if (algo == "dpsgd") {
    cfg.mixing = "metropolis";
    cfg.eta = 1e-3;
  } else if (algo == "ecl") {
    cfg.eta = 0.5;
    cfg.alpha_total = 1e3;
    cfg.theta = 0.5;
  } else if (algo == "gecl") {
    cfg.mixing = "metropolis";
    cfg.eta_prime = 1e-3;
  } else if (algo == "gt") {
    cfg.mixing = "metropolis";
    cfg.eta = 1e-3;
  }
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6"}; }

std::vector<ExperimentConfig> preset(const std::string& name, std::uint64_t seed, int reps) {
  const std::vector<std::string> algos = {"gecl", "ecl", "dpsgd"};
  const std::vector<std::string> topos = {"ring", "torus:5x5", "complete"};
  const std::vector<double> zeta_grid = {0, 2, 4, 6, 8, 10};
  const std::vector<double> sigma_grid = {0, 2, 4, 8, 10};

  std::vector<ExperimentConfig> cfgs;
  for (const auto& a : algos) {
    for (const auto& t : topos) {
      ExperimentConfig cfg = preset_base(a, t, name, seed, reps);
      if (name == "fig2") {
        cfg.zeta_sq = {0, 10};
        cfg.sigma_sq = {0, 10};
      } else if (name == "fig3") {
        cfg.zeta_sq = zeta_grid;
        cfg.sigma_sq = {0};
      } else if (name == "fig4") {
        cfg.zeta_sq = {0};
        cfg.sigma_sq = sigma_grid;
      } else if (name == "fig5") {
        cfg.zeta_sq = zeta_grid;
        cfg.sigma_sq = {10};
      } else if (name == "fig6") {
        cfg.zeta_sq = {10};
        cfg.sigma_sq = sigma_grid;
      } else {
        throw std::invalid_argument("unknown preset '" + name + "' (fig2..fig6)");
      }
      cfgs.push_back(std::move(cfg));
    }
  }
  return cfgs;
}

}  // namespace decsim
