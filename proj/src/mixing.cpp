#include "decsim/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decsim {

namespace {

std::pair<int, int> canon(int i, int j) { return {std::min(i, j), std::max(i, j)}; }

}  // namespace

double AlphaWeights::at(int i, int j) const {
  auto it = values.find(canon(i, j));
  return it == values.end() ? 0.0 : it->second;
}

void AlphaWeights::set(int i, int j, double v) {
  if (v < 0.0) throw std::invalid_argument("alpha weights must be >= 0");
  values[canon(i, j)] = v;
}

double AlphaWeights::row_sum(const Graph& g, int i) const {
  double s = 0.0;
  for (int j : g.neighbors[i]) s += at(i, j);
  return s;
}

AlphaWeights example1_alpha(const Graph& g, double alpha_total) {
  if (alpha_total <= 0.0) throw std::invalid_argument("example1_alpha: alpha_total must be > 0");
  auto k = regularity(g);
  if (!k || *k == 0)
    throw std::invalid_argument("example1_alpha: graph is not regular with positive degree");
  AlphaWeights a;
  const double per_edge = alpha_total / static_cast<double>(*k);
  for (auto [i, j] : g.edges) a.set(i, j, per_edge);
  return a;
}

AlphaWeights uniform_alpha(const Graph& g, double per_edge) {
  AlphaWeights a;
  for (auto [i, j] : g.edges) a.set(i, j, per_edge);
  return a;
}

void pin_row_sums(Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  for (int i = 0; i < n; ++i) {
    for (int pass = 0; pass < 4; ++pass) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += w(i, j);
      const double resid = s - 1.0;
      if (resid == 0.0) break;
      if (std::abs(resid) > 1e-12)
        throw std::logic_error("pin_row_sums: row sum residual too large to pin");
      w(i, i) -= resid;
    }
  }
}

MixingMatrix metropolis(const Graph& g) {
  const int n = g.n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges) {
    const double wij = 1.0 / (std::max(g.degree(i), g.degree(j)) + 1.0);
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.neighbors[i]) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  pin_row_sums(w);
  return MixingMatrix{std::move(w)};
}

AlphaInduced alpha_induced(const Graph& g, const AlphaWeights& a, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("alpha_induced: eta must be > 0");
  const int n = g.n;
  AlphaInduced out;
  out.w = Eigen::MatrixXd::Zero(n, n);
  out.eta_prime = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double s = a.row_sum(g, i);
    const double denom = 2.0 * (1.0 + eta * s);
    out.w(i, i) = (2.0 + eta * s) / denom;
    for (int j : g.neighbors[i]) out.w(i, j) = eta * a.at(i, j) / denom;
    out.eta_prime(i) = eta / (1.0 + eta * s);
  }
  pin_row_sums(out.w);
  return out;
}

double spectral_gap(const MixingMatrix& w) {
  const int n = w.size();
  if (n == 1) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.w, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  // Principal eigenvalue of a mixing matrix is 1 (the last); rho is the
  // larger of the second-largest and the most negative in magnitude.
  const double rho = std::max(std::abs(ev(n - 2)), std::abs(ev(0)));
  const double p = 1.0 - rho * rho;
  return std::clamp(p, 0.0, 1.0);
}

FrobeniusConsts frobenius_consts(const MixingMatrix& w, const AlphaWeights& a) {
  const int n = w.size();
  FrobeniusConsts out;
  out.b_prime = (w.w - Eigen::MatrixXd::Identity(n, n)).squaredNorm();

  Eigen::MatrixXd d_minus_e = Eigen::MatrixXd::Zero(n, n);
  for (auto& [edge, alpha] : a.values) {
    d_minus_e(edge.first, edge.second) = alpha;
    d_minus_e(edge.second, edge.first) = alpha;
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += d_minus_e(i, j);
    d_minus_e(i, i) -= row;  // subtract E = diag(row sums of D)
  }
  out.b = 0.25 * d_minus_e.squaredNorm();
  return out;
}

MixingReport validate_mixing(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw std::invalid_argument("validate_mixing: matrix must be square");
  constexpr double kTol = 1e-12;
  const int n = static_cast<int>(w.rows());
  MixingReport rep;

  double sym = 0.0, stoch = 0.0, neg = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) sym = std::max(sym, std::abs(w(i, j) - w(j, i)));
  for (int i = 0; i < n; ++i) {
    stoch = std::max(stoch, std::abs(w.row(i).sum() - 1.0));
    stoch = std::max(stoch, std::abs(w.col(i).sum() - 1.0));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      neg = std::max({neg, -w(i, j), w(i, j) - 1.0});
  neg = std::max(neg, 0.0);

  rep.symmetric = sym <= kTol;
  rep.doubly_stochastic = stoch <= kTol;
  rep.nonneg = neg <= kTol;
  rep.max_violation = std::max({sym, stoch, neg});
  return rep;
}

}  // namespace decsim
