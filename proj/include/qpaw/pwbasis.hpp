#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "qpaw/cell.hpp"

namespace qpaw::pwbasis {

using Miller = std::array<int, 3>;

// Plane-wave G-grid with deterministic lexicographic Miller ordering and a
// half-space index selecting one representative per {G, -G} pair, G=0 first.
// A representative is the member whose first nonzero Miller component is
// positive.
struct PlaneWaveBasis {
  double cutoff_ev = 0.0;  // kinetic-energy bound satisfied by every G
  std::vector<Miller> miller;
  std::vector<Eigen::Vector3d> gcart;  // 1/Bohr
  std::vector<double> g2;              // |G|^2
  std::vector<int> neg_index;          // index of -G
  std::vector<int> halfspace;          // gvector indices, G=0 first, lex order
  std::vector<int> hs_slot;            // gvector index -> half-space slot

  std::size_t size() const { return miller.size(); }
  std::size_t halfspace_size() const { return halfspace.size(); }

  int index_of(const Miller& m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
  }

  bool is_representative(int i) const { return halfspace[hs_slot[i]] == i; }

  void rebuild_index();

 private:
  std::map<Miller, int> index_;
};

// All G with kinetic energy |G|^2/2 <= cutoff (eV at the boundary, converted
// to Hartree). Degenerate cutoffs leaving only G=0 are legal.
PlaneWaveBasis build_basis(const Cell& cell, double cutoff_ev);

// Difference set {G' - G : G, G' in basis}; carries the pair densities.
// Kinetic energies are bounded by 4x the orbital cutoff.
PlaneWaveBasis build_difference_grid(const Cell& cell,
                                     const PlaneWaveBasis& orbital_basis);

enum class Regularization { spherical_truncation, user_value };

// Periodic Coulomb kernel v(G) = 4*pi/(V G^2) with a regularized finite G=0
// entry. `v0` stores the half-space value v'(0) = v_reg(0)/2; vreg0 keeps the
// unhalved regularized value for full-grid sums.
struct CoulombKernel {
  std::vector<double> values;  // per grid index; origin slot holds vreg0
  double v0 = 0.0;             // v'(0) = vreg0/2
  double vreg0 = 0.0;
  bool halved_zero = true;
  Regularization reg = Regularization::spherical_truncation;

  // half-space weight v'(G): v(G) for G != 0, vreg0/2 at the origin
  double vprime(const PlaneWaveBasis& basis, int i) const {
    return basis.g2[i] > 0.0 ? values[i] : v0;
  }
};

CoulombKernel coulomb_kernel(const PlaneWaveBasis& basis, const Cell& cell,
                             Regularization reg,
                             std::optional<double> user_vreg0 = std::nullopt);

}  // namespace qpaw::pwbasis
