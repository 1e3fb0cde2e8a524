#pragma once

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "hvc/ipm.hpp"
#include "hvc/opf.hpp"

namespace testing {

// Largest |analytic - fd| / max(1, |fd|) over the entries of each derivative,
// central differences with step h.
struct FdErrors {
  double gradient = 0.0, eq_jacobian = 0.0, ineq_jacobian = 0.0, hessian = 0.0;
};

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& fd) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - fd(i, j)) / std::max(1.0, std::abs(fd(i, j))));
  return worst;
}

inline FdErrors fd_check(const hvc::Nlp& nlp, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu,
                         double h = 1e-6) {
  const int n = nlp.num_vars();
  Eigen::VectorXd g_fd(n);
  Eigen::MatrixXd jh_fd(nlp.num_eq(), n), jg_fd(nlp.num_ineq(), n), h_fd(n, n);
  auto lag_grad = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return nlp.objective_gradient(z) + nlp.eq_jacobian(z).transpose() * lambda +
           nlp.ineq_jacobian(z).transpose() * mu;
  };
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd up = x, dn = x;
    up[k] += h;
    dn[k] -= h;
    g_fd[k] = (nlp.objective(up) - nlp.objective(dn)) / (2 * h);
    jh_fd.col(k) = (nlp.eq(up) - nlp.eq(dn)) / (2 * h);
    jg_fd.col(k) = (nlp.ineq(up) - nlp.ineq(dn)) / (2 * h);
    h_fd.col(k) = (lag_grad(up) - lag_grad(dn)) / (2 * h);
  }
  FdErrors e;
  e.gradient = rel_err(nlp.objective_gradient(x), g_fd);
  e.eq_jacobian = rel_err(nlp.eq_jacobian(x), jh_fd);
  e.ineq_jacobian = rel_err(nlp.ineq_jacobian(x), jg_fd);
  e.hessian = rel_err(nlp.lagrangian_hessian(x, 1.0, lambda, mu), h_fd);
  return e;
}

// A point near the operating point with every variable perturbed, and
// random multipliers.
inline Eigen::VectorXd random_interior(const hvc::OpfProblem& prob, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x = prob.initial_point();
  const auto& net = prob.network();
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const int b = static_cast<int>(i);
    x[prob.v_index(b)] += 0.02 * u(rng);
    if (prob.theta_index(b) >= 0) x[prob.theta_index(b)] += 0.05 * u(rng);
  }
  for (std::size_t k = 0; k < net.generators.size(); ++k)
    x[prob.dq_index(static_cast<int>(k))] += 0.05 * u(rng);
  for (std::size_t s = 0; s < net.shunts.size(); ++s)
    x[prob.shunt_index(static_cast<int>(s))] += 0.02 * u(rng);
  x[prob.df_index()] += 0.01 * u(rng);
  return x;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace testing
