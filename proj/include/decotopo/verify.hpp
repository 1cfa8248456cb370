#pragma once

// Channel verification battery: the named residual checks behind the
// `verify-channel` subcommand.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decotopo/doubled.hpp"
#include "decotopo/toric_dense.hpp"

namespace decotopo {

struct CheckResult {
  std::string check_name;
  double residual = 0.0;
  bool pass = false;
};

inline std::vector<CheckResult> run_channel_checks() {
  std::vector<CheckResult> out;
  constexpr double quarter_pi = 0.7853981633974483;

  {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) worst = std::max(worst, compose_check(0.5 * i / 20.0, quarter_pi));
    out.push_back({"compose_EdagE_equals_Eprime", worst, worst < 1e-12});
  }
  {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const DoubledOperator e = build_edge_channel(0.5 * i / 20.0, quarter_pi, 1);
      const DoubledOperator ee{1, (e.mat.adjoint() * e.mat).eval()};
      worst = std::max(worst, partial_transpose_check(ee));
    }
    out.push_back({"partial_transpose_selfdual", worst, worst < 1e-12});
  }
  {
    const DoubledOperator y = build_y_channel(0.25, 1);
    const DoubledOperator yy{1, (y.mat.adjoint() * y.mat).eval()};
    const double r = partial_transpose_check(yy);
    out.push_back({"partial_transpose_y_kraus_breaks", r, r > 1e-3});
  }
  {
    TorusLattice lat(4, 4);
    const auto path = horizontal_path(lat, 0, 1, 2);
    const PauliString we = charge_string(lat, path);
    const PauliString wm_expected = flux_string(lat, diag_translate_path(lat, path));
    const bool eq3 = emd_conjugate(we, lat) == wm_expected;
    out.push_back({"emd_charge_to_flux", eq3 ? 0.0 : 1.0, eq3});

    const PauliString twice = emd_conjugate(emd_conjugate(we, lat), lat);
    const bool invol = twice == we.translated(lat, 1, 1);
    out.push_back({"emd_involution_up_to_translation", invol ? 0.0 : 1.0, invol});

    const PauliString wf = fermion_string(lat, path);
    const PauliString lhs = emd_conjugate(wf, lat);
    const PauliString rhs =
        charge_string(lat, diag_translate_path(lat, diag_translate_path(lat, path))) *
        flux_string(lat, diag_translate_path(lat, path));
    const bool eq4 = lhs.same_support(rhs);
    const bool neq = !lhs.same_support(fermion_string(lat, path).translated(lat, 1, 1));
    out.push_back({"emd_fermion_rotates", (eq4 && neq) ? 0.0 : 1.0, eq4 && neq});
  }
  {
    const bool cov = kraus_set_covariant_under_sigma(0.3, quarter_pi, 2);
    out.push_back({"kraus_set_sigma_covariant", cov ? 0.0 : 1.0, cov});
  }
  {
    TorusLattice lat(2, 2);
    const ConvexDecomposition cd = convex_decomposition(0.5, lat);
    out.push_back({"convex_sum_P_equals_one", std::abs(cd.sum_p - 1.0), std::abs(cd.sum_p - 1.0) < 1e-12});
    out.push_back({"convex_tr_rho2_equals_sum_P2", std::abs(cd.tr_rho2 - cd.sum_p2),
                   std::abs(cd.tr_rho2 - cd.sum_p2) < 1e-10});
    out.push_back({"convex_states_orthogonal", cd.max_offdiag_overlap, cd.max_offdiag_overlap < 1e-10});
    out.push_back({"convex_ising_formula", cd.max_formula_error, cd.max_formula_error < 1e-10});
  }
  return out;
}

inline nlohmann::json checks_to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks)
    arr.push_back({{"check_name", c.check_name}, {"residual", c.residual}, {"pass", c.pass}});
  return arr;
}

}  // namespace decotopo
