#pragma once

// Atomic units are used internally (Hartree, Bohr). Cutoffs cross the API
// boundary in eV, error budgets in Hartree unless a mHa flag is given.

namespace qpaw::units {

inline constexpr double ev_per_hartree = 27.211386245988;
inline constexpr double hartree_per_ev = 1.0 / ev_per_hartree;
inline constexpr double mha_per_hartree = 1000.0;

inline double ev_to_hartree(double ev) { return ev * hartree_per_ev; }
inline double hartree_to_ev(double ha) { return ha * ev_per_hartree; }

}  // namespace qpaw::units
