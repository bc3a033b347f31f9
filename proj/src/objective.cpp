#include "decsim/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace decsim {

double Objective::global_value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (int i = 0; i < n_; ++i) total += value(i, x);
  return total / static_cast<double>(n_);
}

Eigen::VectorXd NoiseStream::noise(int node, std::int64_t round) const {
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(d);
  if (sigma == 0.0) return eps;
  fill_standard_normal(eps, seed, StreamTag::GradNoise,
                       static_cast<std::uint64_t>(node),
                       static_cast<std::uint64_t>(round));
  eps *= sigma / std::sqrt(static_cast<double>(d));
  return eps;
}

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd centers, double zeta,
                                   double sigma, std::uint64_t seed)
    : Objective(static_cast<int>(centers.rows()), static_cast<int>(centers.cols())),
      centers_(std::move(centers)),
      zeta_(zeta),
      sigma_(sigma),
      seed_(seed) {
  xstar_ = centers_.rowwise().mean();
  fstar_ = 0.0;
  for (int i = 0; i < nodes(); ++i)
    fstar_ += 0.5 * (xstar_ - centers_.col(i)).squaredNorm();
  fstar_ /= static_cast<double>(nodes());
}

double QuadraticProblem::value(int i, const Eigen::VectorXd& x) const {
  return 0.5 * (x - centers_.col(i)).squaredNorm();
}

Eigen::VectorXd QuadraticProblem::grad(int i, const Eigen::VectorXd& x) const {
  return x - centers_.col(i);
}

QuadraticProblem generate_quadratic(int d, int n, double zeta, double sigma,
                                    std::uint64_t seed) {
  if (d < 1 || n < 1) throw std::invalid_argument("generate_quadratic: need d >= 1 and n >= 1");
  if (zeta < 0.0 || sigma < 0.0)
    throw std::invalid_argument("generate_quadratic: zeta and sigma must be >= 0");
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(d, n);
  if (zeta > 0.0) {
    const double scale = zeta / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < n; ++i) {
      fill_standard_normal(centers.col(i), seed, StreamTag::Centers,
                           static_cast<std::uint64_t>(i), 0);
      centers.col(i) *= scale;
    }
  }
  return QuadraticProblem(std::move(centers), zeta, sigma, seed);
}

Eigen::VectorXd stochastic_grad(const QuadraticProblem& p, const NoiseStream& ns,
                                int node, std::int64_t round,
                                const Eigen::VectorXd& x) {
  if (x.size() != p.dim())
    throw std::invalid_argument("stochastic_grad: x has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(p.dim()));
  if (ns.sigma == 0.0) return p.grad(node, x);
  return p.grad(node, x) + ns.noise(node, round);
}

double error_metric(const QuadraticProblem& p, const Eigen::MatrixXd& xs) {
  const Eigen::VectorXd& xstar = p.optimum();
  double total = 0.0;
  for (int i = 0; i < xs.cols(); ++i) total += (xs.col(i) - xstar).squaredNorm();
  return total / static_cast<double>(xs.cols());
}

double consensus_distance(const Eigen::MatrixXd& xs) {
  const Eigen::VectorXd xbar = xs.rowwise().mean();
  double total = 0.0;
  for (int i = 0; i < xs.cols(); ++i) total += (xs.col(i) - xbar).squaredNorm();
  return total / static_cast<double>(xs.cols());
}

}  // namespace decsim
