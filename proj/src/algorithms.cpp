#include "decsim/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace decsim {

Eigen::MatrixXd mix_neighbors(const Eigen::MatrixXd& w, const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij != 0.0) out.col(i) += wij * x.col(j);
    }
  }
  return out;
}

Eigen::MatrixXd mix_neighbors_transpose(const Eigen::MatrixXd& w, const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wji = w(j, i);
      if (wji != 0.0) out.col(i) += wji * x.col(j);
    }
  }
  return out;
}

NeighborAlpha align_alpha(const Graph& g, const AlphaWeights& aw) {
  NeighborAlpha na;
  na.a.resize(g.n);
  na.row_sum.assign(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    na.a[i].reserve(g.neighbors[i].size());
    for (int j : g.neighbors[i]) {
      const double v = aw.at(i, j);
      na.a[i].push_back(v);
      na.row_sum[i] += v;
    }
  }
  return na;
}

EdgeIndex build_edge_index(const Graph& g) {
  EdgeIndex idx;
  idx.rev.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    idx.rev[i].reserve(g.neighbors[i].size());
    for (int j : g.neighbors[i]) {
      const auto& nj = g.neighbors[j];
      const auto it = std::lower_bound(nj.begin(), nj.end(), i);
      idx.rev[i].push_back(static_cast<int>(it - nj.begin()));
    }
  }
  return idx;
}

void dpsgd_step(DpsgdState& s, const Eigen::MatrixXd& w, double eta,
                const Eigen::MatrixXd& grads) {
  s.xs = mix_neighbors(w, s.xs - eta * grads);
}

EclState make_ecl_state(const Graph& g, const Eigen::MatrixXd& x0, EclZInit init) {
  EclState s;
  s.xs = x0;
  s.z.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    s.z[i] = Eigen::MatrixXd::Zero(x0.rows(), g.degree(i));
    if (init == EclZInit::CoupledToX0) {
      for (int k = 0; k < g.degree(i); ++k) {
        const int j = g.neighbors[i][k];
        s.z[i].col(k) = edge_sign(i, j) * x0.col(j);
      }
    }
  }
  return s;
}

void ecl_step(EclState& s, const Graph& g, const EdgeIndex& idx,
              const NeighborAlpha& na, double eta, double theta,
              const Eigen::MatrixXd& grads) {
  const int n = g.n;
  const Eigen::Index d = s.xs.rows();

  Eigen::MatrixXd xs_next(d, n);
  Eigen::VectorXd coupling(d);
  for (int i = 0; i < n; ++i) {
    coupling.setZero();
    const auto& nbrs = g.neighbors[i];
    for (size_t k = 0; k < nbrs.size(); ++k) {
      const double aij = na.a[i][k];
      if (aij != 0.0) coupling += aij * edge_sign(i, nbrs[k]) * s.z[i].col(k);
    }
    xs_next.col(i) =
        (s.xs.col(i) - eta * (grads.col(i) - coupling)) / (1.0 + eta * na.row_sum[i]);
  }

  // z_{i|j} <- (1-theta) z_{i|j} + theta y_{j|i},
  // with y_{j|i} = z_{j|i} - 2 sign(j,i) x_j^{new} read from the neighbor.
  // Edges with alpha = 0 carry no penalty: their duals never enter the
  // x-update, so the exchange is skipped and z stays put.
  std::vector<Eigen::MatrixXd> z_next(n);
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = g.neighbors[i];
    z_next[i].resize(d, static_cast<Eigen::Index>(nbrs.size()));
    for (size_t k = 0; k < nbrs.size(); ++k) {
      const int j = nbrs[k];
      if (na.a[i][k] == 0.0) {
        z_next[i].col(static_cast<Eigen::Index>(k)) =
            s.z[i].col(static_cast<Eigen::Index>(k));
        continue;
      }
      const int back = idx.rev[i][k];
      z_next[i].col(static_cast<Eigen::Index>(k)) =
          (1.0 - theta) * s.z[i].col(static_cast<Eigen::Index>(k)) +
          theta * (s.z[j].col(back) - 2.0 * edge_sign(j, i) * xs_next.col(j));
    }
  }

  s.xs = std::move(xs_next);
  s.z = std::move(z_next);
}

void gecl_step(GeclState& s, const Graph& g, const NeighborAlpha& na,
               const Eigen::MatrixXd& w, const Eigen::VectorXd& eta_prime,
               const Eigen::MatrixXd& grads, Eigen::MatrixXd* xtilde_out) {
  const int n = g.n;
  Eigen::MatrixXd xt = mix_neighbors(w, s.xs);

  Eigen::MatrixXd cs_next = mix_neighbors_transpose(w, s.cs - grads);
  cs_next += grads;
  // alpha term, accumulated per edge so opposite directions cancel exactly
  for (auto [i, j] : g.edges) {
    const auto& nbrs = g.neighbors[i];
    const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j);
    const double aij = na.a[i][static_cast<size_t>(it - nbrs.begin())];
    if (aij == 0.0) continue;
    const Eigen::VectorXd t = 0.5 * aij * (xt.col(j) - xt.col(i));
    cs_next.col(i) += t;
    cs_next.col(j) -= t;
  }

  for (int i = 0; i < n; ++i)
    s.xs.col(i) = xt.col(i) - eta_prime(i) * (grads.col(i) - s.cs.col(i));
  s.cs = std::move(cs_next);
  if (xtilde_out) *xtilde_out = std::move(xt);
}

Eigen::MatrixXd gt_next_xs(const GtState& s, const Eigen::MatrixXd& w, double eta) {
  return mix_neighbors(w, s.xs - eta * s.ps);
}

void gt_step(GtState& s, const Eigen::MatrixXd& w, double eta,
             const Eigen::MatrixXd& grads_next) {
  s.xs = gt_next_xs(s, w, eta);
  s.ps = mix_neighbors(w, s.ps) + (grads_next - s.grads);
  s.grads = grads_next;
}

std::string algo_name(Algo a) {
  switch (a) {
    case Algo::Dpsgd: return "dpsgd";
    case Algo::Ecl: return "ecl";
    case Algo::Gecl: return "gecl";
    case Algo::Gt: return "gt";
  }
  return "?";
}

std::optional<Algo> algo_from_name(const std::string& name) {
  if (name == "dpsgd") return Algo::Dpsgd;
  if (name == "ecl") return Algo::Ecl;
  if (name == "gecl") return Algo::Gecl;
  if (name == "gt") return Algo::Gt;
  return std::nullopt;
}

void RunRecord::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta.emplace_back(key, value);
}

const std::string* RunRecord::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return &v;
  return nullptr;
}

namespace {

[[noreturn]] void missing(Algo algo, const std::string& param) {
  throw std::invalid_argument("run(" + algo_name(algo) + "): missing required parameter '" +
                              param + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

RunRecord run(Algo algo, const QuadraticProblem& problem, const Graph& g,
              const AlgoParams& params, std::int64_t rounds, double x0) {
  if (rounds < 0) throw std::invalid_argument("run: rounds must be >= 0");
  if (problem.nodes() != g.n)
    throw std::invalid_argument("run: problem has " + std::to_string(problem.nodes()) +
                                " nodes but graph has " + std::to_string(g.n));
  const int n = g.n;
  const int d = problem.dim();
  const NoiseStream ns = problem.noise_stream();

  const Eigen::MatrixXd x_init = Eigen::MatrixXd::Constant(d, n, x0);

  RunRecord rec;
  rec.set_meta("algorithm", algo_name(algo));
  rec.set_meta("d", std::to_string(d));
  rec.set_meta("n", std::to_string(n));
  rec.set_meta("rounds", std::to_string(rounds));
  rec.set_meta("seed", std::to_string(problem.seed()));
  rec.set_meta("zeta_sq", fmt(problem.zeta() * problem.zeta()));
  rec.set_meta("sigma_sq", fmt(problem.sigma() * problem.sigma()));
  rec.set_meta("x0", fmt(x0));
  rec.set_meta("rng", rng_name());
  // d-vectors sent per neighbor per synchronized round: gossip and the
  // primal-dual form exchange one, the corrected-gossip form three
  // (x, then xtilde and c - g), gradient tracking two (x - eta*p and p).
  const int vectors_per_neighbor =
      algo == Algo::Gecl ? 3 : (algo == Algo::Gt ? 2 : 1);
  rec.set_meta("vectors_per_round",
               std::to_string(vectors_per_neighbor * 2 * g.num_edges()));
  rec.rows.reserve(static_cast<size_t>(rounds) + 1);

  const auto grads_at = [&](const Eigen::MatrixXd& xs, std::int64_t r) {
    Eigen::MatrixXd gmat(d, n);
    for (int i = 0; i < n; ++i) gmat.col(i) = stochastic_grad(problem, ns, i, r, xs.col(i));
    return gmat;
  };
  const auto base_row = [&](const Eigen::MatrixXd& xs) {
    MetricRow row;
    row.error = error_metric(problem, xs);
    row.consensus = consensus_distance(xs);
    row.fgap = problem.global_value(xs.rowwise().mean()) - problem.optimal_value();
    return row;
  };

  switch (algo) {
    case Algo::Dpsgd: {
      if (!params.eta) missing(algo, "eta");
      if (!params.w) missing(algo, "w (mixing matrix)");
      rec.set_meta("eta", fmt(*params.eta));
      DpsgdState s{x_init};
      for (std::int64_t r = 0; r < rounds; ++r) {
        rec.rows.push_back(base_row(s.xs));
        dpsgd_step(s, *params.w, *params.eta, grads_at(s.xs, r));
      }
      rec.rows.push_back(base_row(s.xs));
      break;
    }
    case Algo::Ecl: {
      if (!params.eta) missing(algo, "eta");
      if (!params.alpha) missing(algo, "alpha");
      const double theta = params.theta.value_or(0.5);
      if (theta <= 0.0 || theta > 1.0)
        throw std::invalid_argument("run(ecl): theta must be in (0, 1]");
      rec.set_meta("eta", fmt(*params.eta));
      rec.set_meta("theta", fmt(theta));
      rec.set_meta("z_init", params.z_init == EclZInit::Zero ? "zero" : "coupled");
      const NeighborAlpha na = align_alpha(g, *params.alpha);
      const EdgeIndex idx = build_edge_index(g);
      EclState s = make_ecl_state(g, x_init, params.z_init);
      for (std::int64_t r = 0; r < rounds; ++r) {
        rec.rows.push_back(base_row(s.xs));
        ecl_step(s, g, idx, na, *params.eta, theta, grads_at(s.xs, r));
      }
      rec.rows.push_back(base_row(s.xs));
      break;
    }
    case Algo::Gecl: {
      if (!params.w) missing(algo, "w (mixing matrix)");
      if (!params.eta_prime) missing(algo, "eta_prime");
      const AlphaWeights alpha = params.alpha.value_or(uniform_alpha(g, 0.0));
      if (params.eta_prime->size() != n)
        throw std::invalid_argument("run(gecl): eta_prime must have one entry per node");
      rec.set_meta("eta_prime", fmt((*params.eta_prime)(0)));
      rec.extra_name = "csum_norm";
      const NeighborAlpha na = align_alpha(g, alpha);
      GeclState s{x_init, Eigen::MatrixXd::Zero(d, n)};
      for (std::int64_t r = 0; r < rounds; ++r) {
        MetricRow row = base_row(s.xs);
        row.extra = s.cs.rowwise().sum().norm();
        rec.rows.push_back(row);
        gecl_step(s, g, na, *params.w, *params.eta_prime, grads_at(s.xs, r));
      }
      MetricRow row = base_row(s.xs);
      row.extra = s.cs.rowwise().sum().norm();
      rec.rows.push_back(row);
      break;
    }
    case Algo::Gt: {
      if (!params.eta) missing(algo, "eta");
      if (!params.w) missing(algo, "w (mixing matrix)");
      rec.set_meta("eta", fmt(*params.eta));
      rec.extra_name = "tracker_residual";
      GtState s;
      s.xs = x_init;
      s.grads = grads_at(s.xs, 0);
      s.ps = s.grads;
      for (std::int64_t r = 0; r < rounds; ++r) {
        MetricRow row = base_row(s.xs);
        row.extra = (s.ps.rowwise().sum() - s.grads.rowwise().sum()).norm();
        rec.rows.push_back(row);
        // The tracker consumes the gradient at the new iterate, so the
        // noise key r+1 is drawn here and cached for the next round.
        const Eigen::MatrixXd grads_next =
            grads_at(gt_next_xs(s, *params.w, *params.eta), r + 1);
        gt_step(s, *params.w, *params.eta, grads_next);
      }
      MetricRow row = base_row(s.xs);
      row.extra = (s.ps.rowwise().sum() - s.grads.rowwise().sum()).norm();
      rec.rows.push_back(row);
      break;
    }
  }
  return rec;
}

}  // namespace decsim
