#include "hvc/admittance.hpp"

#include <vector>

namespace hvc {

BranchAdmittance branch_admittance(const Branch& br) {
  const Complex ys = 1.0 / Complex(br.r_pu, br.x_pu);
  const Complex half_b(0.0, br.b_shunt_pu / 2.0);
  const double t = br.tap;
  return {(ys + half_b) / (t * t), -ys / t, -ys / t, ys + half_b};
}

AdmittanceMatrix build_admittance(const Network& net) {
  const int n = static_cast<int>(net.buses.size());
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(4 * net.branches.size());
  for (const auto& br : net.branches) {
    const auto a = branch_admittance(br);
    trip.emplace_back(br.from_bus, br.from_bus, a.yff);
    trip.emplace_back(br.from_bus, br.to_bus, a.yft);
    trip.emplace_back(br.to_bus, br.from_bus, a.ytf);
    trip.emplace_back(br.to_bus, br.to_bus, a.ytt);
  }
  AdmittanceMatrix out;
  out.dimension = n;
  out.y.resize(n, n);
  // duplicates are summed in triplet order, so the result is deterministic
  out.y.setFromTriplets(trip.begin(), trip.end());
  out.y.makeCompressed();
  return out;
}

Complex total_shunt_admittance(const Network& net) {
  Complex sum = 0.0;
  for (const auto& br : net.branches) {
    const Complex ys = 1.0 / Complex(br.r_pu, br.x_pu);
    const double inv_t = 1.0 / br.tap;
    sum += Complex(0.0, br.b_shunt_pu / 2.0) * (1.0 + inv_t * inv_t) +
           ys * (1.0 - inv_t) * (1.0 - inv_t);
  }
  return sum;
}

}  // namespace hvc
