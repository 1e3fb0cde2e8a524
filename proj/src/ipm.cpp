#include "hvc/ipm.hpp"

#include <algorithm>
#include <cmath>

namespace hvc {

double KktResiduals::max() const {
  return std::max({stationarity, primal, complementarity, dual_sign});
}

std::string_view to_string(IpmStatus s) {
  switch (s) {
    case IpmStatus::optimal: return "optimal";
    case IpmStatus::infeasible: return "infeasible";
    case IpmStatus::max_iterations: return "max_iterations";
    case IpmStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

namespace {

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

KktResiduals kkt_residuals(const Nlp& nlp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& mu) {
  KktResiduals r;
  Eigen::VectorXd grad = nlp.objective_gradient(x);
  const Eigen::VectorXd h = nlp.eq(x);
  const Eigen::VectorXd g = nlp.ineq(x);
  if (h.size()) grad += nlp.eq_jacobian(x).transpose() * lambda;
  if (g.size()) grad += nlp.ineq_jacobian(x).transpose() * mu;
  r.stationarity = inf_norm(grad);
  r.primal = inf_norm(h);
  for (int i = 0; i < g.size(); ++i) {
    r.primal = std::max(r.primal, g[i]);
    r.complementarity = std::max(r.complementarity, std::abs(mu[i] * g[i]));
    r.dual_sign = std::max(r.dual_sign, -mu[i]);
  }
  return r;
}

IpmResult solve_ipm(const Nlp& nlp, const Eigen::VectorXd& x0,
                    const IpmOptions& opts) {
  const int n = nlp.num_vars(), me = nlp.num_eq(), mi = nlp.num_ineq();
  IpmResult res;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd g = nlp.ineq(x);
  Eigen::VectorXd z = (-g).cwiseMax(opts.z0);
  double gamma = opts.z0 * opts.z0;
  Eigen::VectorXd mu = (gamma * z.cwiseInverse()).cwiseMax(opts.z0);

  Eigen::VectorXd best_x = x, best_lam = lam, best_mu = mu;
  double best_score = kkt_residuals(nlp, x, lam, mu).max();

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it;
    const auto kkt = kkt_residuals(nlp, x, lam, mu);
    if (kkt.max() < best_score) {
      best_score = kkt.max();
      best_x = x;
      best_lam = lam;
      best_mu = mu;
    }
    if (kkt.stationarity <= opts.tolerance && kkt.primal <= opts.tolerance &&
        kkt.complementarity <= opts.tolerance && kkt.dual_sign == 0.0) {
      res.status = IpmStatus::optimal;
      res.x = x;
      res.lambda = lam;
      res.mu = mu;
      res.z = z;
      res.kkt = kkt;
      return res;
    }
    if ((me && inf_norm(lam) > opts.multiplier_limit) ||
        (mi && inf_norm(mu) > opts.multiplier_limit)) {
      res.status = IpmStatus::infeasible;
      break;
    }

    const Eigen::VectorXd h = nlp.eq(x);
    const Eigen::MatrixXd Jh = nlp.eq_jacobian(x);
    const Eigen::MatrixXd Jg = nlp.ineq_jacobian(x);
    Eigen::VectorXd Lx = nlp.objective_gradient(x);
    if (me) Lx += Jh.transpose() * lam;
    if (mi) Lx += Jg.transpose() * mu;
    const Eigen::MatrixXd Lxx = nlp.lagrangian_hessian(x, 1.0, lam, mu);

    const Eigen::VectorXd zinv = z.cwiseInverse();
    const Eigen::VectorXd d = mu.cwiseProduct(zinv);
    Eigen::MatrixXd M = Lxx;
    Eigen::VectorXd N = Lx;
    if (mi) {
      M += Jg.transpose() * d.asDiagonal() * Jg;
      N += Jg.transpose() *
           (zinv.cwiseProduct(mu.cwiseProduct(g) + Eigen::VectorXd::Constant(mi, gamma)));
    }
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = M;
    if (me) {
      K.topRightCorner(n, me) = Jh.transpose();
      K.bottomLeftCorner(me, n) = Jh;
    }
    Eigen::VectorXd rhs(n + me);
    rhs << -N, -h;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) {
      res.status = IpmStatus::numerical_failure;
      break;
    }
    const Eigen::VectorXd dx = sol.head(n);
    const Eigen::VectorXd dlam = sol.tail(me);
    Eigen::VectorXd dz, dmu;
    double ap = 1.0, ad = 1.0;
    if (mi) {
      dz = -g - z - Jg * dx;
      dmu = -mu + zinv.cwiseProduct(Eigen::VectorXd::Constant(mi, gamma) -
                                    mu.cwiseProduct(dz));
      for (int i = 0; i < mi; ++i) {
        if (dz[i] < 0) ap = std::min(ap, opts.tau * z[i] / -dz[i]);
        if (dmu[i] < 0) ad = std::min(ad, opts.tau * mu[i] / -dmu[i]);
      }
    }
    x += ap * dx;
    if (mi) {
      z += ap * dz;
      mu += ad * dmu;
    }
    if (me) lam += ad * dlam;
    if (mi) gamma = opts.sigma * z.dot(mu) / mi;
    g = nlp.ineq(x);
    res.iterations = it + 1;
  }

  res.x = best_x;
  res.lambda = best_lam;
  res.mu = best_mu;
  res.z = z;
  res.kkt = kkt_residuals(nlp, best_x, best_lam, best_mu);
  return res;
}

}  // namespace hvc
