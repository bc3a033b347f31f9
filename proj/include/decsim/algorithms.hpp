#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decsim/mixing.hpp"
#include "decsim/objective.hpp"
#include "decsim/topology.hpp"

namespace decsim {

// Orientation sign of the consensus constraint on edge (i, j): +1 if i > j,
// -1 if i < j. Antisymmetric by construction.
inline double edge_sign(int i, int j) { return i > j ? 1.0 : -1.0; }

// out.col(i) = sum_j W(i, j) * X.col(j), accumulated in ascending j and
// skipping exact zeros. Every node reads only its own row of W, which keeps
// the update a faithful one-round message exchange and the floating-point
// order deterministic.
Eigen::MatrixXd mix_neighbors(const Eigen::MatrixXd& w, const Eigen::MatrixXd& x);

// out.col(i) = sum_j W(j, i) * X.col(j): mixing with the transposed
// weights. Coincides with mix_neighbors bit for bit when W is symmetric.
Eigen::MatrixXd mix_neighbors_transpose(const Eigen::MatrixXd& w, const Eigen::MatrixXd& x);

// Alpha values re-indexed to follow each node's neighbor list, plus the
// row sums S_i. Built once per run; steps index it directly.
struct NeighborAlpha {
  std::vector<std::vector<double>> a;  // a[i][k] pairs with neighbors[i][k]
  std::vector<double> row_sum;         // S_i
};
NeighborAlpha align_alpha(const Graph& g, const AlphaWeights& aw);

// rev[i][k] = position of i inside neighbors[j] where j = neighbors[i][k].
// Lets a node locate the reverse direction of each of its edges in O(1).
struct EdgeIndex {
  std::vector<std::vector<int>> rev;
};
EdgeIndex build_edge_index(const Graph& g);

// ---- gossip / D-PSGD ----

struct DpsgdState {
  Eigen::MatrixXd xs;  // d x n, one column per node
};

// x_i <- sum_{j in N_i^+} W_ij (x_j - eta * g_j)
void dpsgd_step(DpsgdState& s, const Eigen::MatrixXd& w, double eta,
                const Eigen::MatrixXd& grads);

// ---- primal-dual form (dual variables z per directed edge) ----

enum class EclZInit {
  Zero,        // dual variables start at zero
  CoupledToX0  // z_{i|j} = sign(i,j) * x_j^0, the reformulation premise
};

struct EclState {
  Eigen::MatrixXd xs;
  // z[i] is d x deg(i); column k holds z_{i|j} for j = neighbors[i][k]
  std::vector<Eigen::MatrixXd> z;
};

EclState make_ecl_state(const Graph& g, const Eigen::MatrixXd& x0, EclZInit init);

// One round:
//   x_i <- (1 + eta S_i)^{-1} (x_i - eta (g_i - sum_j alpha_ij sign(i,j) z_ij))
//   y_ij = z_ij - 2 sign(i,j) x_i          (transient, transmitted to j)
//   z_ij <- (1 - theta) z_ij + theta y_ji
void ecl_step(EclState& s, const Graph& g, const EdgeIndex& idx,
              const NeighborAlpha& na, double eta, double theta,
              const Eigen::MatrixXd& grads);

// ---- gossip form with gradient correction ----

struct GeclState {
  Eigen::MatrixXd xs;
  Eigen::MatrixXd cs;  // correction terms, d x n
};

// One round:
//   xt_i = sum_j W_ij x_j
//   x_i <- xt_i - eta'_i (g_i - c_i)
//   c_i <- sum_j W_ji (c_j - g_j) + g_i + sum_{j in N_i} alpha_ij/2 (xt_j - xt_i)
// The c update carries the transposed weight W_ji: identical to W_ij for a
// mixing (symmetric) W, and the form that stays exactly equivalent to the
// primal-dual updates when per-node step sizes make W asymmetric. The alpha
// term is accumulated edge-pairwise so the two directions cancel exactly in
// floating point.
void gecl_step(GeclState& s, const Graph& g, const NeighborAlpha& na,
               const Eigen::MatrixXd& w, const Eigen::VectorXd& eta_prime,
               const Eigen::MatrixXd& grads,
               Eigen::MatrixXd* xtilde_out = nullptr);

// ---- gradient tracking ----

struct GtState {
  Eigen::MatrixXd xs;
  Eigen::MatrixXd ps;     // trackers, p^0 = g^0
  Eigen::MatrixXd grads;  // g^(r) at the current xs
};

// The parameters the x-update will produce; callers evaluate the next
// gradient on this before completing the round.
Eigen::MatrixXd gt_next_xs(const GtState& s, const Eigen::MatrixXd& w, double eta);

// One round (grads_next must be evaluated at gt_next_xs(...)):
//   x_i <- sum_j W_ij (x_j - eta * p_j)
//   p_i <- sum_j W_ij p_j + (g_i^(r+1) - g_i^(r))
void gt_step(GtState& s, const Eigen::MatrixXd& w, double eta,
             const Eigen::MatrixXd& grads_next);

// ---- round-driving runner ----

enum class Algo { Dpsgd, Ecl, Gecl, Gt };

std::string algo_name(Algo a);
std::optional<Algo> algo_from_name(const std::string& name);

struct AlgoParams {
  std::optional<double> eta;                 // dpsgd, ecl, gt
  std::optional<double> theta;               // ecl (default 0.5)
  std::optional<AlphaWeights> alpha;         // ecl, gecl
  EclZInit z_init = EclZInit::Zero;          // ecl
  std::optional<Eigen::MatrixXd> w;          // dpsgd, gecl, gt
  std::optional<Eigen::VectorXd> eta_prime;  // gecl (per node)
};

struct MetricRow {
  double error = 0.0;      // (1/n) sum ||x_i - x*||^2
  double consensus = 0.0;  // (1/n) sum ||x_i - xbar||^2
  double fgap = 0.0;       // f(xbar) - f*
  double extra = 0.0;      // algorithm-specific (see RunRecord::extra_name)
};

struct RunRecord {
  std::vector<std::pair<std::string, std::string>> meta;
  std::string extra_name;        // "" when the extra column is absent
  std::vector<MetricRow> rows;   // rounds + 1 entries, row r = state at round r

  double final_error() const { return rows.back().error; }
  void set_meta(const std::string& key, const std::string& value);
  const std::string* find_meta(const std::string& key) const;
};

// Executes `rounds` synchronized rounds from the common start x0 * ones.
// Records error, consensus, function gap each round, plus ||sum_i c_i||
// for the corrected-gossip form and ||sum_i p_i - sum_i g_i|| for gradient
// tracking. Throws a config error naming any missing parameter.
RunRecord run(Algo algo, const QuadraticProblem& problem, const Graph& g,
              const AlgoParams& params, std::int64_t rounds, double x0 = 0.0);

}  // namespace decsim
