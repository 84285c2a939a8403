#include "qpaw/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpaw::factorize {

namespace {

constexpr double kFloor = 1e-10;

Mat assemble(const RVec& f, const Mat& u) {
  return u * f.asDiagonal() * u.adjoint();
}

}  // namespace

long FactorizedHamiltonian::count_survivors() const {
  long n = 0;
  for (const auto& s : soft) {
    for (Eigen::Index i = 0; i < s.f.size(); ++i) {
      if (std::abs(s.f(i)) > kFloor) ++n;
    }
  }
  for (const auto& p : paw) {
    if (p.eps <= kFloor) continue;
    for (Eigen::Index i = 0; i < p.f.size(); ++i) {
      if (std::abs(p.f(i)) > kFloor) ++n;
    }
  }
  return n;
}

std::vector<SoftFactor> factor_soft(const toyscf::PairDensityTensor& pd,
                                    const pwbasis::CoulombKernel& kernel) {
  std::vector<SoftFactor> out;
  const auto& grid = pd.grid;
  out.reserve(2 * grid.halfspace_size());
  for (std::size_t s = 0; s < grid.halfspace_size(); ++s) {
    const int ig = grid.halfspace[s];
    const bool origin = grid.g2[ig] == 0.0;
    for (int j = 0; j < 2; ++j) {
      if (origin && j == 1) continue;  // eta_1(0) = 0 identically
      SoftFactor f;
      f.gvec = grid.miller[ig];
      f.g2 = grid.g2[ig];
      f.j = j;
      f.weight = kernel.vprime(grid, ig);
      HermitianEig eig;
      try {
        eig = hermitian_eig_desc(pd.eta[s][j]);
      } catch (const std::exception& e) {
        throw std::runtime_error("factor_soft: failed at G=(" + std::to_string(f.gvec[0]) +
                                 "," + std::to_string(f.gvec[1]) + "," +
                                 std::to_string(f.gvec[2]) + "), j=" + std::to_string(j) +
                                 ": " + e.what());
      }
      f.f = std::move(eig.values);
      f.u = std::move(eig.vectors);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<PawFactor> factor_paw(const std::vector<toyscf::PawBlock>& blocks) {
  std::vector<PawFactor> out;
  for (const auto& blk : blocks) {
    const int na = blk.n_a;
    // ordered pairs (i1 <= i2), lexicographic
    std::vector<std::pair<int, int>> pairs;
    for (int i1 = 0; i1 < na; ++i1)
      for (int i2 = i1; i2 < na; ++i2) pairs.emplace_back(i1, i2);
    const int m = static_cast<int>(pairs.size());

    RMat chat(m, m);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        const auto [a, b] = pairs[k];
        const auto [c, d] = pairs[l];
        const double scale = (a == b ? 0.5 : 1.0) * (c == d ? 0.5 : 1.0);
        chat(k, l) = scale * blk.c(a, b, c, d);
      }
    if ((chat - chat.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("factor_paw: ctensor not pair-swap symmetric");
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (chat + chat.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("factor_paw: eigensolver failed");

    // B^k = D + D^dagger over ordered pairs
    std::vector<Mat> b(m);
    for (int k = 0; k < m; ++k) {
      const auto [i1, i2] = pairs[k];
      Mat d = blk.proj_overlaps.col(i1).conjugate() * blk.proj_overlaps.col(i2).transpose();
      b[k] = d + d.adjoint();
    }

    for (int mu = 0; mu < m; ++mu) {
      PawFactor pf;
      pf.atom_id = blk.atom_id;
      pf.i1 = pairs[mu].first;
      pf.i2 = pairs[mu].second;
      const double eps = es.eigenvalues()(mu);
      pf.eps = std::abs(eps);
      pf.sign = eps < 0.0 ? -1 : 1;
      Mat l = Mat::Zero(blk.proj_overlaps.rows(), blk.proj_overlaps.rows());
      for (int k = 0; k < m; ++k) l += es.eigenvectors()(k, mu) * b[k];
      HermitianEig eig = hermitian_eig_desc(l);
      pf.f = std::move(eig.values);
      pf.u = std::move(eig.vectors);
      out.push_back(std::move(pf));
    }
  }
  return out;
}

OneBodyTerm effective_one_body(const Mat& h, const toyscf::Tensor4& kappa) {
  const int nb = static_cast<int>(h.rows());
  Mat exch = Mat::Zero(nb, nb);  // sum_r kappa_rprq
  Mat coul = Mat::Zero(nb, nb);  // sum_r kappa_rrpq
  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q) {
      cxd ae = 0.0, ac = 0.0;
      for (int r = 0; r < nb; ++r) {
        ae += kappa(r, p, r, q);
        ac += kappa(r, r, p, q);
      }
      exch(p, q) = ae;
      coul(p, q) = ac;
    }
  OneBodyTerm t;
  t.h = h;
  t.h_corrected = h - 0.5 * exch;
  t.h_prime = h + 0.5 * (2.0 * coul - exch);
  if (hermiticity_defect(t.h_corrected) > 1e-10 || hermiticity_defect(t.h_prime) > 1e-10) {
    throw std::runtime_error("effective_one_body: non-Hermitian result, kappa symmetries inconsistent");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (t.h_prime + t.h_prime.adjoint()));
  t.eps_prime = es.eigenvalues();
  return t;
}

OneBodyTerm effective_one_body_from_factors(const Mat& h,
                                            const std::vector<SoftFactor>& soft,
                                            const std::vector<PawFactor>& paw) {
  const int nb = static_cast<int>(h.rows());
  Mat exch = Mat::Zero(nb, nb);
  Mat coul = Mat::Zero(nb, nb);
  for (const auto& s : soft) {
    const Mat c = assemble(s.f, s.u);
    const double w = 2.0 * s.weight;
    exch += w * (c * c);
    coul += w * s.f.sum() * c;
  }
  for (const auto& p : paw) {
    const Mat l = assemble(p.f, p.u);
    const double eps = p.sign * p.eps;
    exch += eps * (l * l);
    coul += eps * p.f.sum() * l;
  }
  OneBodyTerm t;
  t.h = h;
  t.h_corrected = h - 0.5 * exch;
  t.h_prime = h + 0.5 * (2.0 * coul - exch);
  if (hermiticity_defect(t.h_corrected) > 1e-10 || hermiticity_defect(t.h_prime) > 1e-10) {
    throw std::runtime_error("effective_one_body: non-Hermitian result, kappa symmetries inconsistent");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (t.h_prime + t.h_prime.adjoint()));
  t.eps_prime = es.eigenvalues();
  return t;
}

FactorizedHamiltonian factorize_instance(const toyscf::HamiltonianInstance& instance) {
  FactorizedHamiltonian fh;
  fh.constant = instance.constant;
  fh.soft = factor_soft(instance.pair_density, instance.kernel);
  fh.paw = factor_paw(instance.paw_blocks);
  fh.one_body = effective_one_body_from_factors(instance.h, fh.soft, fh.paw);
  fh.n_b = instance.n_b();
  fh.n_pw_pair = static_cast<int>(instance.pair_density.grid.size());
  fh.volume = instance.cell.volume();
  double g2min = 0.0;
  for (const auto& s : fh.soft) {
    if (s.g2 > 0.0 && (g2min == 0.0 || s.g2 < g2min)) g2min = s.g2;
  }
  fh.g_min = std::sqrt(g2min);
  fh.surviving_parameters = fh.count_survivors();
  return fh;
}

FactorizedHamiltonian truncate(const FactorizedHamiltonian& factors, double delta) {
  if (delta < 0.0) throw std::invalid_argument("truncate: delta must be >= 0");
  FactorizedHamiltonian out = factors;
  for (auto& s : out.soft) {
    const double scale = s.g2 > 0.0 ? std::sqrt(s.g2) : out.g_min;
    for (Eigen::Index i = 0; i < s.f.size(); ++i) {
      if (std::abs(s.f(i)) <= std::max(delta * scale, kFloor)) s.f(i) = 0.0;
    }
  }
  for (auto& p : out.paw) {
    for (Eigen::Index i = 0; i < p.f.size(); ++i) {
      if (std::abs(p.f(i)) <= kFloor) p.f(i) = 0.0;
    }
  }
  out.truncation_delta = delta;
  out.surviving_parameters = out.count_survivors();
  return out;
}

toyscf::Tensor4 reconstruct_kappa(const FactorizedHamiltonian& factors) {
  const int nb = factors.n_b;
  if (nb > 16) throw std::invalid_argument("reconstruct_kappa: guard rail N_b <= 16 exceeded");
  toyscf::Tensor4 kappa(nb);
  auto add_outer = [&](const Mat& c, double w) {
    for (int p = 0; p < nb; ++p)
      for (int q = 0; q < nb; ++q) {
        const cxd left = w * std::conj(c(p, q));
        if (left == cxd(0.0, 0.0)) continue;
        for (int r = 0; r < nb; ++r)
          for (int s = 0; s < nb; ++s) kappa(p, q, r, s) += left * c(r, s);
      }
  };
  for (const auto& s : factors.soft) add_outer(assemble(s.f, s.u), 2.0 * s.weight);
  for (const auto& p : factors.paw) add_outer(assemble(p.f, p.u), p.sign * p.eps);
  return kappa;
}

}  // namespace qpaw::factorize
