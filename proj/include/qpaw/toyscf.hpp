#pragma once

#include <optional>
#include <vector>

#include "qpaw/linalg.hpp"
#include "qpaw/pwbasis.hpp"

namespace qpaw::toyscf {

// Gaussian well of a periodic model potential, -depth * exp(-|r-c|^2/(2 w^2))
// summed over lattice images. Smooth and cusp-free, like pseudized systems.
struct PotentialWell {
  Eigen::Vector3d center;  // Bohr
  double depth = 1.0;      // Hartree
  double width = 1.0;      // Bohr
};

struct OrbitalSet {
  Mat coefficients;  // N_pw x N_b, orthonormal columns, complex PW convention
  RVec eigenvalues;  // Hartree, nondecreasing
  int n_occ = 0;

  int n_bands() const { return static_cast<int>(coefficients.cols()); }
};

// Reciprocal orbital-pair densities eta_{pq,j}(G) on the difference grid,
// stored per half-space representative. The -G values follow from the
// reflection rule eta_j(-G) = (-1)^j eta_j(G).
struct PairDensityTensor {
  pwbasis::PlaneWaveBasis grid;
  int n_b = 0;
  std::vector<std::array<Mat, 2>> eta;  // per half-space slot

  const Mat& eta_rep(int slot, int j) const { return eta[slot][j]; }

  // eta_j at an arbitrary grid index
  Mat eta_at(int grid_index, int j) const {
    const Mat& e = eta[grid.hs_slot[grid_index]][j];
    return (grid.is_representative(grid_index) || j == 0) ? e : Mat(-e);
  }

  // full pair-density coefficient matrix C(G) = eta_0(G) + i eta_1(G)
  Mat c_at(int grid_index) const {
    return eta_at(grid_index, 0) + cxd(0.0, 1.0) * eta_at(grid_index, 1);
  }
};

struct PawBlock {
  int atom_id = 0;
  int n_a = 0;
  Mat proj_overlaps;            // N_b x n_a, P_pi = <psi_p|ptilde_i>
  std::vector<double> ctensor;  // n_a^4 row-major, pair-swap symmetric

  double c(int i1, int i2, int i3, int i4) const {
    return ctensor[((i1 * n_a + i2) * n_a + i3) * n_a + i4];
  }
};

struct HamiltonianInstance {
  Cell cell;
  pwbasis::PlaneWaveBasis basis;  // orbital grid
  Mat h;                          // one-body matrix, Hermitian
  double constant = 0.0;          // H^(0)
  PairDensityTensor pair_density;
  std::vector<PawBlock> paw_blocks;
  pwbasis::CoulombKernel kernel;  // on the pair-density grid
  std::optional<OrbitalSet> orbitals;

  int n_b() const { return static_cast<int>(h.rows()); }
  void validate() const;  // Hermiticity, symmetry and dimension checks
};

// Dense rank-4 tensor with (p,q,r,s) indexing; desk-scale only.
struct Tensor4 {
  int n = 0;
  std::vector<cxd> a;

  Tensor4() = default;
  explicit Tensor4(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_ * n_ * n_) {}
  cxd& operator()(int p, int q, int r, int s) {
    return a[((static_cast<std::size_t>(p) * n + q) * n + r) * n + s];
  }
  const cxd& operator()(int p, int q, int r, int s) const {
    return a[((static_cast<std::size_t>(p) * n + q) * n + r) * n + s];
  }
};

// Diagonalizes |G|^2/2 delta_gg' + V(G - G') assembled in a real cos/sin
// basis, so the returned orbitals are real in real space (C_{-g} = C_g^*).
// constant_shift adds a uniform background to the potential.
OrbitalSet solve_mean_field(const Cell& cell, const pwbasis::PlaneWaveBasis& basis,
                            const std::vector<PotentialWell>& wells, int n_bands,
                            int n_occ, double constant_shift = 0.0);

// Discrete convolution of coefficient columns on the difference grid plus the
// eta_0/eta_1 reflection split.
PairDensityTensor pair_density(const OrbitalSet& orbitals,
                               const pwbasis::PlaneWaveBasis& basis,
                               const Cell& cell);

// Brute-force two-body tensor: soft half-space sum plus PAW corrections.
// Guard rail N_b <= 16.
Tensor4 kappa_oracle(const HamiltonianInstance& instance);

// Approximate-MP2 virtual-space density matrix D_ab.
Mat mp2_density(const OrbitalSet& orbitals, const Tensor4& kappa);

// Closed-shell spin-summed MP2 correlation energy (canonical orbitals).
double mp2_energy(const OrbitalSet& orbitals, const Tensor4& kappa);

// Rotates the virtual block onto the leading n_keep natural orbitals and
// semicanonicalizes the kept block; occupied orbitals untouched.
OrbitalSet natural_orbitals(const OrbitalSet& orbitals, const Mat& density,
                            int n_keep);

// Deterministic synthetic PAW block with an indefinite, pair-swap-symmetric
// ctensor. complex_proj draws complex projector overlaps (default real).
PawBlock synthesize_paw_block(int n_a, int n_b, std::uint64_t seed,
                              double magnitude, bool complex_proj = false);

// One-body matrix and kappa in a rotated orbital basis phi_a = sum_p psi_p U_pa.
void rotate_basis(const Mat& u, Mat& h, Tensor4& kappa);

// kappa in a projected basis phi_a = sum_p psi_p T_pa; T may be rectangular
// with orthonormal columns.
Tensor4 project_kappa(const Tensor4& kappa, const Mat& t);

struct SynthSpec {
  double a_bohr = 2.0 * M_PI;
  double cutoff_ev = 45.0;
  int n_b = 4;
  int n_paw_blocks = 1;
  int n_a = 2;
  double paw_magnitude = 0.1;
  std::uint64_t seed = 1;
  bool complex_mode = false;  // complex Hermitian eta / projector overlaps
};

// Random desk-scale instance: real symmetric (default) eta matrices with the
// physical G=0 normalization, Hermitian h, synthetic PAW blocks.
HamiltonianInstance synth_random_instance(const SynthSpec& spec);

struct WellInstanceSpec {
  double a_bohr = 6.0;
  double cutoff_ev = 40.0;
  std::vector<PotentialWell> wells;
  int n_bands = 4;
  int n_occ = 1;
  int n_paw_blocks = 0;
  int n_a = 2;
  double paw_magnitude = 0.05;
  std::uint64_t paw_seed = 7;
};

// Instance from the toy mean field: canonical orbitals, h = diag(eps).
HamiltonianInstance make_well_instance(const WellInstanceSpec& spec);

}  // namespace qpaw::toyscf
