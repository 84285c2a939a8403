#pragma once

#include <cstdint>
#include <vector>

#include "qpaw/factorize.hpp"
#include "qpaw/linalg.hpp"
#include "qpaw/toyscf.hpp"

namespace qpaw::besim {

// Occupation-number basis over 2*N_b spin orbitals at fixed particle number,
// optionally restricted to S_z = 0. Bits 0..N_b-1 are spin-up, N_b..2N_b-1
// spin-down; states are ordered as ascending bitstrings.
struct FockSpace {
  int n_orbitals = 0;
  int n_electrons = 0;
  bool sz_zero_only = false;
  std::vector<std::uint32_t> states;

  static FockSpace fixed_n(int n_orbitals, int n_electrons);
  static FockSpace fixed_n_sz0(int n_orbitals, int n_electrons);

  int dimension() const { return static_cast<int>(states.size()); }
  int index_of(std::uint32_t s) const;  // -1 if absent
};

// Spin-summed excitation operator E_pq = sum_sigma a^dag_{p sigma} a_{q sigma}
// as a dense matrix with fermionic signs.
Mat excitation_operator(const FockSpace& fock, int p, int q);

Mat number_operator(const FockSpace& fock);

// H = H0 + sum (h_corrected)_pq E_pq + 1/2 sum kappa_pqrs E+_pq E_rs
Mat fock_hamiltonian_direct(const factorize::OneBodyTerm& one_body,
                            const toyscf::Tensor4& kappa, double constant,
                            const FockSpace& fock);

// Same operator assembled from the factorization:
// sum_{G>=0,j} v'(G) (sum C_pq,j E_pq)^2 + 1/2 sum_mu eps_mu (sum L_pq E_pq)^2
// plus the corrected one-body part and the constant.
Mat fock_hamiltonian_factored(const factorize::FactorizedHamiltonian& factors,
                              const FockSpace& fock);

// Fock-space representation of the orbital rotation U (one fixture checks the
// conjugation route  Uhat (sum f_p E_pp) Uhat^dag == sum (U f U^dag)_pq E_pq).
Mat fock_rotation(const FockSpace& fock, const Mat& u);

struct BlockEncoding {
  Mat matrix;  // 2m x 2m Hermitian unitary
  double alpha = 1.0;
  int coding_dim = 0;
};

// Hermitian completion [[A/alpha, B], [B, -A/alpha]] with
// B = sqrt(I - (A/alpha)^2).
BlockEncoding hermitian_block_encoding(const Mat& a, double alpha);

// U R U with R = diag(+I, -I); asserts the top-left block equals
// 2 (A/alpha)^2 - I before returning the full product.
Mat chebyshev_square(const BlockEncoding& be);

}  // namespace qpaw::besim
