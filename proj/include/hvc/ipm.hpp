#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace hvc {

// Smooth nonlinear program
//   min f(x)  s.t.  h(x) = 0,  g(x) <= 0
// with dense derivatives. Jacobians are (rows = constraints, cols = x).
class Nlp {
 public:
  virtual ~Nlp() = default;
  virtual int num_vars() const = 0;
  virtual int num_eq() const = 0;
  virtual int num_ineq() const = 0;
  virtual double objective(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd eq(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd ineq(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& x) const = 0;
  // sigma hess f + sum lambda_i hess h_i + sum mu_i hess g_i
  virtual Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& x,
                                             double sigma,
                                             const Eigen::VectorXd& lambda,
                                             const Eigen::VectorXd& mu) const = 0;
};

struct KktResiduals {
  double stationarity = 0.0;     // |grad f + Jh' lambda + Jg' mu|_inf
  double primal = 0.0;           // max(|h|_inf, max(g, 0))
  double complementarity = 0.0;  // max |mu_i g_i|
  double dual_sign = 0.0;        // max(-mu, 0)

  double max() const;
};

// Evaluated from the problem functions alone, independent of solver state.
KktResiduals kkt_residuals(const Nlp& nlp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& mu);

struct IpmOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  double tau = 0.995;    // fraction-to-boundary
  double sigma = 0.2;    // barrier reduction factor
  double z0 = 0.1;       // slack floor at the initial point
  double multiplier_limit = 1e10;  // beyond this the problem is deemed infeasible
};

enum class IpmStatus { optimal, infeasible, max_iterations, numerical_failure };
std::string_view to_string(IpmStatus s);

struct IpmResult {
  Eigen::VectorXd x, lambda, mu, z;
  IpmStatus status = IpmStatus::max_iterations;
  int iterations = 0;
  KktResiduals kkt;
};

// Primal-dual logarithmic-barrier method: slacks z > 0 turn g(x) <= 0 into
// g(x) + z = 0, each iteration takes one Newton step on the perturbed KKT
// conditions (reduced to the x/lambda block), step lengths follow the
// fraction-to-boundary rule and the barrier parameter is set to
// sigma * z'mu / m.
IpmResult solve_ipm(const Nlp& nlp, const Eigen::VectorXd& x0,
                    const IpmOptions& opts = {});

}  // namespace hvc
