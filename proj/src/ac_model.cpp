#include "hvc/ac_model.hpp"

#include <cmath>

namespace hvc {

AcModel::AcModel(const AdmittanceMatrix& y) : n_(y.dimension) {
  for (int col = 0; col < y.y.outerSize(); ++col)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(y.y, col); it; ++it)
      entries_.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()),
                          it.value().real(), it.value().imag()});
}

void AcModel::injections(const Eigen::VectorXd& v, const Eigen::VectorXd& theta,
                         Eigen::VectorXd& p, Eigen::VectorXd& q) const {
  p = Eigen::VectorXd::Zero(n_);
  q = Eigen::VectorXd::Zero(n_);
  for (const auto& e : entries_) {
    if (e.i == e.j) {
      const double v2 = v[e.i] * v[e.i];
      p[e.i] += v2 * e.g;
      q[e.i] -= v2 * e.b;
      continue;
    }
    const double a = theta[e.i] - theta[e.j];
    const double c = std::cos(a), s = std::sin(a);
    const double vv = v[e.i] * v[e.j];
    p[e.i] += vv * (e.g * c + e.b * s);
    q[e.i] += vv * (e.g * s - e.b * c);
  }
}

AcModel::Jacobian AcModel::jacobian(const Eigen::VectorXd& v,
                                    const Eigen::VectorXd& theta) const {
  Jacobian J{Eigen::MatrixXd::Zero(n_, n_), Eigen::MatrixXd::Zero(n_, n_),
             Eigen::MatrixXd::Zero(n_, n_), Eigen::MatrixXd::Zero(n_, n_)};
  for (const auto& e : entries_) {
    const int i = e.i, j = e.j;
    if (i == j) {
      J.dp_dv(i, i) += 2.0 * v[i] * e.g;
      J.dq_dv(i, i) -= 2.0 * v[i] * e.b;
      continue;
    }
    const double a = theta[i] - theta[j];
    const double c = std::cos(a), s = std::sin(a);
    const double u = e.g * c + e.b * s;  // d/da u = -w
    const double w = e.g * s - e.b * c;  // d/da w = u
    const double vv = v[i] * v[j];
    J.dp_dv(i, i) += v[j] * u;
    J.dp_dv(i, j) += v[i] * u;
    J.dp_dth(i, i) -= vv * w;
    J.dp_dth(i, j) += vv * w;
    J.dq_dv(i, i) += v[j] * w;
    J.dq_dv(i, j) += v[i] * w;
    J.dq_dth(i, i) += vv * u;
    J.dq_dth(i, j) -= vv * u;
  }
  return J;
}

Eigen::MatrixXd AcModel::weighted_hessian(const Eigen::VectorXd& v,
                                          const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& wp,
                                          const Eigen::VectorXd& wq) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
  const int off = n_;
  auto add = [&H](int r, int c, double val) {
    H(r, c) += val;
    if (r != c) H(c, r) += val;
  };
  for (const auto& e : entries_) {
    const int i = e.i, j = e.j;
    if (wp[i] == 0.0 && wq[i] == 0.0) continue;
    if (i == j) {
      add(i, i, 2.0 * (wp[i] * e.g - wq[i] * e.b));
      continue;
    }
    const double a = theta[i] - theta[j];
    const double c = std::cos(a), s = std::sin(a);
    const double u = e.g * c + e.b * s;
    const double w = e.g * s - e.b * c;
    // Second derivatives of the P term (p) and Q term (q) with respect to
    // (V_i, V_j, a); angles enter through a = th_i - th_j.
    const double vivj = wp[i] * u + wq[i] * w;
    const double vi_a = v[j] * (-wp[i] * w + wq[i] * u);
    const double vj_a = v[i] * (-wp[i] * w + wq[i] * u);
    const double a_a = -v[i] * v[j] * (wp[i] * u + wq[i] * w);
    add(i, j, vivj);
    add(i, off + i, vi_a);
    add(i, off + j, -vi_a);
    add(j, off + i, vj_a);
    add(j, off + j, -vj_a);
    add(off + i, off + i, a_a);
    add(off + j, off + j, a_a);
    add(off + i, off + j, -a_a);
  }
  return H;
}

}  // namespace hvc
