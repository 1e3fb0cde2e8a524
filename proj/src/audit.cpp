#include "hvc/audit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "hvc/error.hpp"

namespace hvc {

AuditReport audit_dispatch(const Network& net, const DispatchPoint& pt,
                           double phi_lead_pf, double tol) {
  const std::size_t nb = net.buses.size();
  if (pt.v_pu.size() != nb || pt.theta_rad.size() != nb ||
      pt.gen_p_mw.size() != net.generators.size() ||
      pt.gen_q_mvar.size() != net.generators.size() ||
      pt.gen_p0_mw.size() != net.generators.size() ||
      pt.shunt_q_mvar.size() != net.shunts.size() ||
      pt.load_p_mw.size() != net.loads.size() ||
      pt.load_q_mvar.size() != net.loads.size() ||
      pt.wind_p_mw.size() != net.wind_parks.size())
    throw InputError("dispatch point does not match the network");

  AuditReport rep;
  auto check = [&](const std::string& name, double violation) {
    rep.max_violation_pu = std::max(rep.max_violation_pu, violation);
    if (violation > tol) rep.findings.push_back({name, violation});
  };
  const double sb = net.s_base_mva;
  const double tan_lead = std::tan(std::acos(phi_lead_pf));

  for (std::size_t i = 0; i < nb; ++i) {
    const auto& b = net.buses[i];
    check("v_max bus " + std::to_string(i), pt.v_pu[i] - b.v_max_pu);
    check("v_min bus " + std::to_string(i), b.v_min_pu - pt.v_pu[i]);
  }

  for (std::size_t k = 0; k < net.generators.size(); ++k) {
    const auto& g = net.generators[k];
    const std::string tag = " gen " + std::to_string(k);
    const double p = pt.gen_p_mw[k] / sb, q = pt.gen_q_mvar[k] / sb;
    check("droop" + tag,
          std::abs(pt.gen_p_mw[k] - (pt.gen_p0_mw[k] + g.k_p_mw_per_hz * pt.delta_f_hz)) /
              sb);
    check("p_max" + tag, p - g.p_max_mw / sb);
    check("p_min" + tag, g.p_min_mw / sb - p);
    check("q_max" + tag, q - g.q_max_mvar / sb);
    check("q_min" + tag, g.q_min_mvar / sb - q);
    check("s_max" + tag, std::hypot(p, q) - g.s_max_mva / sb);
    check("lead_pf" + tag, -p * tan_lead - q);
    if (g.x_d_pu && g.e_q_max_pu) {
      const double v = pt.v_pu[g.bus];
      const double xd = *g.x_d_pu * sb / g.s_max_mva;
      check("field_limit" + tag,
            std::hypot(p, q + v * v / xd) - v * *g.e_q_max_pu / xd);
    }
  }

  for (std::size_t s = 0; s < net.shunts.size(); ++s) {
    const auto& sh = net.shunts[s];
    const auto& b = net.buses[sh.bus];
    const double v = pt.v_pu[sh.bus];
    const double q = pt.shunt_q_mvar[s] / sb;
    const std::string tag = " shunt " + std::to_string(s);
    check("shunt_min" + tag, sh.q_min_mvar / sb * v * v / (b.v_min_pu * b.v_min_pu) - q);
    check("shunt_max" + tag, q - sh.q_max_mvar / sb * v * v / (b.v_max_pu * b.v_max_pu));
  }

  // Nodal balance: S_i = V_i * conj(I_i), currents from the branch pi models.
  std::vector<std::complex<double>> v(nb), inj(nb, 0.0), cur(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) v[i] = std::polar(pt.v_pu[i], pt.theta_rad[i]);
  for (const auto& br : net.branches) {
    const std::complex<double> ys = 1.0 / std::complex<double>(br.r_pu, br.x_pu);
    const std::complex<double> yc(0.0, br.b_shunt_pu / 2.0);
    const std::complex<double> vf = v[br.from_bus] / br.tap, vt = v[br.to_bus];
    const std::complex<double> i_series = ys * (vf - vt);
    cur[br.from_bus] += (i_series + yc * vf) / br.tap;
    cur[br.to_bus] += -i_series + yc * vt;
  }
  for (std::size_t k = 0; k < net.generators.size(); ++k)
    inj[net.generators[k].bus] += std::complex<double>(pt.gen_p_mw[k], pt.gen_q_mvar[k]);
  for (std::size_t k = 0; k < net.loads.size(); ++k)
    inj[net.loads[k].bus] -= std::complex<double>(pt.load_p_mw[k], pt.load_q_mvar[k]);
  for (std::size_t k = 0; k < net.wind_parks.size(); ++k)
    inj[net.wind_parks[k].bus] += pt.wind_p_mw[k];
  for (std::size_t s = 0; s < net.shunts.size(); ++s)
    inj[net.shunts[s].bus] += std::complex<double>(0.0, pt.shunt_q_mvar[s]);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::complex<double> mis = v[i] * std::conj(cur[i]) - inj[i] / sb;
    check("balance bus " + std::to_string(i), std::max(std::abs(mis.real()), std::abs(mis.imag())));
  }
  return rep;
}

}  // namespace hvc
