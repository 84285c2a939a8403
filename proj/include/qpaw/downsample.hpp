#pragma once

#include <array>
#include <vector>

#include "qpaw/toyscf.hpp"

namespace qpaw::downsample {

struct Run {
  int cell_n = 1;            // (n, n, n) supercell
  int orbitals_per_atom = 0;
  int sign = 1;
  double eps_qpe = 0.0;      // Hartree, filled by budget allocation
};

// The five telescoped QPE jobs behind E_ds(3):
// E(1,n_b'') + E(2,n_b') - E(1,n_b') + E(3,n_b) - E(2,n_b).
struct DownsamplePlan {
  std::array<Run, 5> runs;
};

DownsamplePlan expand_plan(int n_b, int n_b_prime, int n_b_double_prime);

// Evaluates the plan's signed sum on an energy surface E(n, m).
template <typename F>
double evaluate_plan(const DownsamplePlan& plan, F&& energy) {
  double e = 0.0;
  for (const auto& r : plan.runs) e += r.sign * energy(r.cell_n, r.orbitals_per_atom);
  return e;
}

struct ErrorBudget {
  double eps_tot = 0.0;
  double eps_qpe = 0.0;
  double eps_trunc = 0.0;
  double eps_be = 0.0;
  double eps_orb = 0.0;
  double eps_pw = 0.0;
  double eps_paw = 0.0;
};

// Residual QPE budget split equally over the runs; throws when the
// non-QPE components already exhaust eps_tot.
double allocate_budget(const ErrorBudget& budget, int n_runs);

struct ConvergenceRow {
  int n_b = 0;                      // total orbitals retained
  double e_corr = 0.0;              // MP2 correlation energy, Hartree
  double deviation_direct = 0.0;    // vs the largest-n_b reference
  double deviation_telescoped = 0.0;
};

// MP2 convergence table over natural-orbital counts for a toy well family;
// the largest entry is the reference row.
std::vector<ConvergenceRow> convergence_table(const toyscf::WellInstanceSpec& family,
                                              const std::vector<int>& n_b_list);

}  // namespace qpaw::downsample
