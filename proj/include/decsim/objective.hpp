#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "decsim/rng.hpp"

namespace decsim {

// Local objectives f_i over a shared parameter space. value/grad are
// indexed by node; implementations must keep them consistent (the test
// suite cross-checks with central differences).
class Objective {
 public:
  Objective(int d, int n) : d_(d), n_(n) {}
  virtual ~Objective() = default;

  int dim() const { return d_; }
  int nodes() const { return n_; }

  virtual double value(int i, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd grad(int i, const Eigen::VectorXd& x) const = 0;

  // f(x) = (1/n) sum_i f_i(x)
  double global_value(const Eigen::VectorXd& x) const;

 private:
  int d_ = 0;
  int n_ = 0;
};

// Keyed gradient-noise source: noise(i, r) is a fixed function of
// (seed, i, r), so coupled algorithm runs can consume identical samples.
// Coordinates are i.i.d. N(0, sigma^2/d).
struct NoiseStream {
  std::uint64_t seed = 0;
  double sigma = 0.0;
  int d = 0;

  Eigen::VectorXd noise(int node, std::int64_t round) const;
};

// f_i(x) = 0.5 * ||x - b_i||^2, the synthetic strongly convex family.
// L = mu = 1; the optimum is the mean of the centers.
class QuadraticProblem final : public Objective {
 public:
  QuadraticProblem(Eigen::MatrixXd centers, double zeta, double sigma,
                   std::uint64_t seed);

  double value(int i, const Eigen::VectorXd& x) const override;
  Eigen::VectorXd grad(int i, const Eigen::VectorXd& x) const override;

  const Eigen::MatrixXd& centers() const { return centers_; }  // d x n
  const Eigen::VectorXd& optimum() const { return xstar_; }
  double optimal_value() const { return fstar_; }
  double zeta() const { return zeta_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

  NoiseStream noise_stream() const { return NoiseStream{seed_, sigma_, dim()}; }

 private:
  Eigen::MatrixXd centers_;
  Eigen::VectorXd xstar_;
  double fstar_ = 0.0;
  double zeta_ = 0.0;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
};

// Centers drawn i.i.d. per node from N(0, zeta^2/d * I); deterministic in seed.
QuadraticProblem generate_quadratic(int d, int n, double zeta, double sigma,
                                    std::uint64_t seed);

// grad f_i(x) + noise(i, r); mean-zero noise with E||eps||^2 = sigma^2.
Eigen::VectorXd stochastic_grad(const QuadraticProblem& p, const NoiseStream& ns,
                                int node, std::int64_t round,
                                const Eigen::VectorXd& x);

// (1/n) sum_i ||x_i - x*||^2, columns of xs are the node parameters.
double error_metric(const QuadraticProblem& p, const Eigen::MatrixXd& xs);

// (1/n) sum_i ||x_i - xbar||^2
double consensus_distance(const Eigen::MatrixXd& xs);

}  // namespace decsim
