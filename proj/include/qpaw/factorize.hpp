#pragma once

#include <vector>

#include "qpaw/toyscf.hpp"

namespace qpaw::factorize {

// One (G, j) eigendecomposition of the soft pair-density matrix:
// eta_j(G) = u diag(f) u^dagger, weighted by v'(G) in the half-space sum.
struct SoftFactor {
  pwbasis::Miller gvec{0, 0, 0};
  double g2 = 0.0;
  int j = 0;
  double weight = 0.0;  // v'(G)
  RVec f;
  Mat u;
};

// Signed PAW factor for one ordered projector pair (i1 <= i2):
// L = u diag(f) u^dagger with the compound-tensor eigenvalue split into
// magnitude and sign, which the block encoding loads separately.
struct PawFactor {
  int atom_id = 0;
  int i1 = 0;
  int i2 = 0;
  double eps = 0.0;  // |epsilon^a_{i1 i2}|
  int sign = 1;
  RVec f;
  Mat u;
};

struct OneBodyTerm {
  Mat h;
  Mat h_corrected;  // h - 1/2 sum_r kappa_rprq
  Mat h_prime;      // h + 1/2 sum_r (2 kappa_rrpq - kappa_rprq)
  RVec eps_prime;   // eigenvalues of h_prime, ascending
};

struct FactorizedHamiltonian {
  double constant = 0.0;
  OneBodyTerm one_body;
  std::vector<SoftFactor> soft;
  std::vector<PawFactor> paw;
  double truncation_delta = 0.0;
  long surviving_parameters = 0;  // nonzero eigenvalue/column items

  int n_b = 0;
  int n_pw_pair = 0;  // pair-density grid size, enters L
  double volume = 0.0;
  double g_min = 0.0;  // smallest nonzero |G| on the pair grid

  long count_survivors() const;
};

// Per half-space G and parity channel; the identically-zero (G=0, j=1)
// channel is skipped so the factor count equals N_pw.
std::vector<SoftFactor> factor_soft(const toyscf::PairDensityTensor& pd,
                                    const pwbasis::CoulombKernel& kernel);

std::vector<PawFactor> factor_paw(const std::vector<toyscf::PawBlock>& blocks);

OneBodyTerm effective_one_body(const Mat& h, const toyscf::Tensor4& kappa);
OneBodyTerm effective_one_body_from_factors(const Mat& h,
                                            const std::vector<SoftFactor>& soft,
                                            const std::vector<PawFactor>& paw);

// Full pipeline step: soft + PAW factors plus the corrected one-body spectrum
// (contracted from the untruncated factors).
FactorizedHamiltonian factorize_instance(const toyscf::HamiltonianInstance& instance);

// Zeroes soft eigenvalues with |f| <= delta*|G| (delta*g_min at G=0) and every
// entry at or below the 1e-10 global floor. One-body data is left untouched.
FactorizedHamiltonian truncate(const FactorizedHamiltonian& factors, double delta);

// Oracle inverse: reassembles the dense two-body tensor from the factors.
toyscf::Tensor4 reconstruct_kappa(const FactorizedHamiltonian& factors);

}  // namespace qpaw::factorize
