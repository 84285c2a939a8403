#include "qpaw/pwbasis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "qpaw/units.hpp"

namespace qpaw::pwbasis {

namespace {

bool lex_positive(const Miller& m) {
  for (int c : m) {
    if (c != 0) return c > 0;
  }
  return false;  // origin
}

Miller negate(const Miller& m) { return {-m[0], -m[1], -m[2]}; }

// Fills gcart/g2/neg_index/halfspace/hs_slot from a sorted miller list.
void finalize(PlaneWaveBasis& b, const Cell& cell) {
  std::sort(b.miller.begin(), b.miller.end());
  b.rebuild_index();
  const std::size_t n = b.miller.size();
  b.gcart.resize(n);
  b.g2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    b.gcart[i] = cell.gvec(b.miller[i]);
    b.g2[i] = b.gcart[i].squaredNorm();
  }
  b.neg_index.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int j = b.index_of(negate(b.miller[i]));
    if (j < 0) throw std::logic_error("pwbasis: grid not closed under negation");
    b.neg_index[i] = j;
  }
  b.halfspace.clear();
  b.hs_slot.assign(n, -1);
  int origin = b.index_of({0, 0, 0});
  if (origin >= 0) {
    b.halfspace.push_back(origin);
    b.hs_slot[origin] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!lex_positive(b.miller[i])) continue;
    int slot = static_cast<int>(b.halfspace.size());
    b.halfspace.push_back(static_cast<int>(i));
    b.hs_slot[i] = slot;
    b.hs_slot[b.neg_index[i]] = slot;
  }
}

}  // namespace

void PlaneWaveBasis::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < miller.size(); ++i) {
    index_[miller[i]] = static_cast<int>(i);
  }
}

PlaneWaveBasis build_basis(const Cell& cell, double cutoff_ev) {
  if (!(cutoff_ev > 0.0)) throw std::invalid_argument("build_basis: cutoff must be > 0");
  const double cutoff_ha = units::ev_to_hartree(cutoff_ev);
  const double gmax = std::sqrt(2.0 * cutoff_ha);

  // |m_i| = |G . a_i| / (2 pi) <= gmax |a_i| / (2 pi)
  std::array<int, 3> bound;
  for (int d = 0; d < 3; ++d) {
    bound[d] = static_cast<int>(std::floor(gmax * cell.lattice.row(d).norm() / (2.0 * M_PI))) + 1;
  }

  PlaneWaveBasis b;
  b.cutoff_ev = cutoff_ev;
  for (int i = -bound[0]; i <= bound[0]; ++i)
    for (int j = -bound[1]; j <= bound[1]; ++j)
      for (int k = -bound[2]; k <= bound[2]; ++k) {
        Miller m{i, j, k};
        if (0.5 * cell.gvec(m).squaredNorm() <= cutoff_ha) b.miller.push_back(m);
      }
  finalize(b, cell);
  return b;
}

PlaneWaveBasis build_difference_grid(const Cell& cell,
                                     const PlaneWaveBasis& orbital_basis) {
  std::set<Miller> diff;
  for (const auto& m1 : orbital_basis.miller)
    for (const auto& m2 : orbital_basis.miller)
      diff.insert({m2[0] - m1[0], m2[1] - m1[1], m2[2] - m1[2]});
  PlaneWaveBasis b;
  b.cutoff_ev = 4.0 * orbital_basis.cutoff_ev;
  b.miller.assign(diff.begin(), diff.end());
  finalize(b, cell);
  return b;
}

CoulombKernel coulomb_kernel(const PlaneWaveBasis& basis, const Cell& cell,
                             Regularization reg,
                             std::optional<double> user_vreg0) {
  const double volume = cell.volume();
  CoulombKernel k;
  k.reg = reg;
  if (reg == Regularization::user_value) {
    if (!user_vreg0 || !std::isfinite(*user_vreg0) || *user_vreg0 < 0.0) {
      throw std::invalid_argument("coulomb_kernel: user v_reg(0) must be finite and >= 0");
    }
    k.vreg0 = *user_vreg0;
  } else {
    // equal-volume sphere, v_reg(0) = 2 pi R_c^2 / V with R_c = (3V/4pi)^(1/3)
    const double rc = std::cbrt(3.0 * volume / (4.0 * M_PI));
    k.vreg0 = 2.0 * M_PI * rc * rc / volume;
  }
  k.v0 = 0.5 * k.vreg0;
  k.halved_zero = true;
  k.values.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    k.values[i] = basis.g2[i] > 0.0 ? 4.0 * M_PI / (volume * basis.g2[i]) : k.vreg0;
  }
  return k;
}

}  // namespace qpaw::pwbasis
