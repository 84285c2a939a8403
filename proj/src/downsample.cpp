#include "qpaw/downsample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpaw::downsample {

DownsamplePlan expand_plan(int n_b, int n_b_prime, int n_b_double_prime) {
  if (!(n_b < n_b_prime && n_b_prime < n_b_double_prime)) {
    throw std::invalid_argument("expand_plan: need n_b < n_b' < n_b''");
  }
  DownsamplePlan p;
  p.runs = {Run{1, n_b_double_prime, +1}, Run{2, n_b_prime, +1}, Run{1, n_b_prime, -1},
            Run{3, n_b, +1}, Run{2, n_b, -1}};
  return p;
}

double allocate_budget(const ErrorBudget& budget, int n_runs) {
  if (n_runs < 1) throw std::invalid_argument("allocate_budget: n_runs must be >= 1");
  const double residual = budget.eps_tot - budget.eps_orb - budget.eps_trunc -
                          budget.eps_pw - budget.eps_paw - budget.eps_be;
  if (!(residual > 0.0)) {
    throw std::runtime_error("allocate_budget: budget exhausted before QPE");
  }
  return residual / n_runs;
}

std::vector<ConvergenceRow> convergence_table(const toyscf::WellInstanceSpec& family,
                                              const std::vector<int>& n_b_list) {
  if (n_b_list.empty()) throw std::invalid_argument("convergence_table: empty n_b list");
  std::vector<int> sizes = n_b_list;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  toyscf::WellInstanceSpec spec = family;
  spec.n_bands = sizes.back();
  toyscf::HamiltonianInstance inst = toyscf::make_well_instance(spec);
  const toyscf::OrbitalSet& orbs = *inst.orbitals;
  toyscf::Tensor4 kappa = toyscf::kappa_oracle(inst);
  Mat density = toyscf::mp2_density(orbs, kappa);

  std::vector<ConvergenceRow> rows;
  for (int nb : sizes) {
    if (nb <= spec.n_occ) {
      throw std::invalid_argument("convergence_table: n_b must exceed n_occ");
    }
    ConvergenceRow row;
    row.n_b = nb;
    const int n_keep = nb - spec.n_occ;
    toyscf::OrbitalSet sub = toyscf::natural_orbitals(orbs, density, n_keep);
    Mat t = orbs.coefficients.adjoint() * sub.coefficients;
    toyscf::Tensor4 ksub = toyscf::project_kappa(kappa, t);
    row.e_corr = toyscf::mp2_energy(sub, ksub);
    rows.push_back(row);
  }

  const double reference = rows.back().e_corr;
  for (auto& row : rows) row.deviation_direct = row.e_corr - reference;
  // telescoped route: accumulate consecutive differences up to the reference
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = k; i + 1 < rows.size(); ++i) {
      acc += rows[i].e_corr - rows[i + 1].e_corr;
    }
    rows[k].deviation_telescoped = acc;
  }
  return rows;
}

}  // namespace qpaw::downsample
