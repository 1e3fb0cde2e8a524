#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hvc/admittance.hpp"

namespace hvc {

// Polar-form nodal power equations
//   P_i = V_i sum_j V_j (G_ij cos t_ij + B_ij sin t_ij)
//   Q_i = V_i sum_j V_j (G_ij sin t_ij - B_ij cos t_ij),  t_ij = th_i - th_j
// with analytic first and second derivatives. Each nonzero Y_ij contributes
// one term to P_i and Q_i that depends on (V_i, V_j, th_i, th_j) only, so
// derivatives are accumulated entry by entry.
class AcModel {
 public:
  explicit AcModel(const AdmittanceMatrix& y);

  int size() const { return n_; }

  void injections(const Eigen::VectorXd& v, const Eigen::VectorXd& theta,
                  Eigen::VectorXd& p, Eigen::VectorXd& q) const;

  struct Jacobian {
    Eigen::MatrixXd dp_dv, dp_dth, dq_dv, dq_dth;
  };
  Jacobian jacobian(const Eigen::VectorXd& v,
                    const Eigen::VectorXd& theta) const;

  // sum_i (wp_i * hess P_i + wq_i * hess Q_i), ordered [V_0..V_{n-1},
  // th_0..th_{n-1}].
  Eigen::MatrixXd weighted_hessian(const Eigen::VectorXd& v,
                                   const Eigen::VectorXd& theta,
                                   const Eigen::VectorXd& wp,
                                   const Eigen::VectorXd& wq) const;

 private:
  struct Entry {
    int i, j;
    double g, b;
  };
  int n_;
  std::vector<Entry> entries_;
};

}  // namespace hvc
