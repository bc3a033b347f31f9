#pragma once

#include <map>
#include <utility>

#include <Eigen/Dense>

#include "decsim/topology.hpp"

namespace decsim {

// Symmetric doubly stochastic weights supported on the graph plus
// self-loops. Constructors pin ascending-order row sums to exactly 1.0
// so repeated gossip steps do not leak mass.
struct MixingMatrix {
  Eigen::MatrixXd w;

  int size() const { return static_cast<int>(w.rows()); }
};

// Per-edge penalty parameters alpha_{i|j}, one value per undirected edge
// (symmetry alpha_{i|j} = alpha_{j|i} is structural). Missing edges read
// as 0.
struct AlphaWeights {
  std::map<std::pair<int, int>, double> values;

  double at(int i, int j) const;
  void set(int i, int j, double v);
  // S_i = sum over neighbors of alpha_{i|k}, ascending neighbor order.
  double row_sum(const Graph& g, int i) const;
};

// alpha/k on every edge of a k-regular graph; row sums all equal
// alpha_total. Throws if the graph is not regular.
AlphaWeights example1_alpha(const Graph& g, double alpha_total);

// Same value on every edge (no regularity requirement).
AlphaWeights uniform_alpha(const Graph& g, double per_edge);

// Metropolis weights in the symmetric max-degree form
// W_ij = 1/(max(|N_i|, |N_j|) + 1). On regular graphs this agrees with
// 1/(|N_i|+1) and it stays a valid mixing matrix on irregular graphs.
// A disconnected graph still builds (its spectral gap is then 0);
// connectivity warnings are the caller's business.
MixingMatrix metropolis(const Graph& g);

// The weights and effective step sizes induced by (eta, alpha):
//   W_ii  = (2 + eta*S_i) / (2(1 + eta*S_i)),   S_i = sum_k alpha_{i|k}
//   W_ij  = eta*alpha_{i|j} / (2(1 + eta*S_i))  on edges, 0 otherwise
//   eta'_i = eta / (1 + eta*S_i)
// Rows always sum to 1; W is symmetric only when the S_i are all equal.
struct AlphaInduced {
  Eigen::MatrixXd w;
  Eigen::VectorXd eta_prime;  // per node
};
AlphaInduced alpha_induced(const Graph& g, const AlphaWeights& a, double eta);

// 1 - rho^2 where rho is the largest absolute eigenvalue of W on the
// subspace orthogonal to the all-ones vector.
double spectral_gap(const MixingMatrix& w);

// b' = ||W - I||_F^2 and b = (1/4)||D - E||_F^2, with D the alpha
// adjacency matrix and E = diag of its row sums.
struct FrobeniusConsts {
  double b_prime = 0.0;
  double b = 0.0;
};
FrobeniusConsts frobenius_consts(const MixingMatrix& w, const AlphaWeights& a);

// Predicate report for an arbitrary square matrix, tolerance 1e-12.
struct MixingReport {
  bool symmetric = false;
  bool doubly_stochastic = false;
  bool nonneg = false;
  double max_violation = 0.0;

  bool ok() const { return symmetric && doubly_stochastic && nonneg; }
};
MixingReport validate_mixing(const Eigen::MatrixXd& w);

// Nudges diagonal entries so each row, summed left to right in scalar
// order, adds to exactly 1.0. Residuals must already be < 1e-12.
void pin_row_sums(Eigen::MatrixXd& w);

}  // namespace decsim
