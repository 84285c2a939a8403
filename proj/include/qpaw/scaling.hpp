#pragma once

#include <string>
#include <vector>

#include "qpaw/lcucost.hpp"
#include "qpaw/toyscf.hpp"

namespace qpaw::scaling {

struct SweepPoint {
  double size = 0.0;  // N_b or N_A
  double lambda2 = 0.0;
  double gamma_nonzero = 0.0;
  long gamma_nominal = 0;
  long n_pw_pair = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double lambda2_slope = 0.0;
  double gamma_slope = 0.0;
};

// Fixed cell and plane-wave grid, orbital count swept (continuum-limit analog).
SweepResult orbital_sweep(double a_bohr, double cutoff_ev,
                          const std::vector<toyscf::PotentialWell>& wells,
                          const std::vector<int>& n_b_list, int beth);

// Supercell replications of a two-well base cell at fixed orbitals per atom
// (thermodynamic-limit analog). Sizes are numbers of atoms.
SweepResult supercell_sweep(double a0_bohr, double cutoff_ev, int orbitals_per_atom,
                            const std::vector<std::array<int, 3>>& replications,
                            int beth, int paw_na);

std::string to_csv(const SweepResult& result, const std::string& size_label);

}  // namespace qpaw::scaling
