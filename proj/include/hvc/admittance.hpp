#pragma once

#include <complex>

#include <Eigen/Sparse>

#include "hvc/network.hpp"

namespace hvc {

using Complex = std::complex<double>;

// Pi-model terms of one branch, per-unit. The from side carries the tap.
struct BranchAdmittance {
  Complex yff, yft, ytf, ytt;
};

BranchAdmittance branch_admittance(const Branch& br);

struct AdmittanceMatrix {
  int dimension = 0;
  Eigen::SparseMatrix<Complex> y;  // column-major, compressed

  Complex operator()(int i, int j) const { return y.coeff(i, j); }
};

AdmittanceMatrix build_admittance(const Network& net);

// Shunt-to-ground admittance embedded in the branch pi models (line charging
// plus the legs a tap introduces), summed in closed form. For a consistent Y
// this equals the sum of all its entries.
Complex total_shunt_admittance(const Network& net);

}  // namespace hvc
