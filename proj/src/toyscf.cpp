#include "qpaw/toyscf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qpaw/rng.hpp"
#include "qpaw/units.hpp"

namespace qpaw::toyscf {

namespace {

// Fourier coefficient of the periodic Gaussian-well potential at G.
cxd potential_coefficient(const Cell& cell, const std::vector<PotentialWell>& wells,
                          const Eigen::Vector3d& g) {
  const double volume = cell.volume();
  cxd v = 0.0;
  for (const auto& w : wells) {
    const double amp = -w.depth / volume * std::pow(2.0 * M_PI, 1.5) *
                       w.width * w.width * w.width *
                       std::exp(-0.5 * g.squaredNorm() * w.width * w.width);
    v += amp * std::exp(cxd(0.0, -g.dot(w.center)));
  }
  return v;
}

int pair_slot(int i, int j, int n) {
  // ordered pairs (i <= j), row-major over the upper triangle
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace

void HamiltonianInstance::validate() const {
  const int nb = n_b();
  if (h.rows() != h.cols()) throw std::invalid_argument("instance: h not square");
  if (hermiticity_defect(h) > 1e-12) {
    throw std::invalid_argument("instance: h violates Hermiticity (tol 1e-12)");
  }
  if (pair_density.n_b != nb) {
    throw std::invalid_argument("instance: pair-density dimension mismatch");
  }
  if (pair_density.eta.size() != pair_density.grid.halfspace_size()) {
    throw std::invalid_argument("instance: pair-density half-space size mismatch");
  }
  if (kernel.values.size() != pair_density.grid.size()) {
    throw std::invalid_argument("instance: kernel not built on pair-density grid");
  }
  for (std::size_t s = 0; s < pair_density.eta.size(); ++s) {
    for (int j = 0; j < 2; ++j) {
      const Mat& e = pair_density.eta[s][j];
      if (e.rows() != nb || e.cols() != nb) {
        throw std::invalid_argument("instance: eta dimension mismatch");
      }
      if (hermiticity_defect(e) > 1e-10) {
        throw std::invalid_argument("instance: eta violates Hermiticity (tol 1e-10)");
      }
    }
  }
  // anti-reflection forces eta_1(0) = 0
  if (pair_density.eta[0][1].cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("instance: eta_1(G=0) must vanish");
  }
  for (const auto& blk : paw_blocks) {
    if (blk.proj_overlaps.rows() != nb || blk.proj_overlaps.cols() != blk.n_a) {
      throw std::invalid_argument("instance: projector overlap dimension mismatch");
    }
    if (blk.ctensor.size() != static_cast<std::size_t>(blk.n_a) * blk.n_a * blk.n_a * blk.n_a) {
      throw std::invalid_argument("instance: ctensor size mismatch");
    }
    for (int i1 = 0; i1 < blk.n_a; ++i1)
      for (int i2 = 0; i2 < blk.n_a; ++i2)
        for (int i3 = 0; i3 < blk.n_a; ++i3)
          for (int i4 = 0; i4 < blk.n_a; ++i4) {
            if (std::abs(blk.c(i1, i2, i3, i4) - blk.c(i3, i4, i1, i2)) > 1e-12) {
              throw std::invalid_argument("instance: ctensor violates pair-swap symmetry");
            }
            if (std::abs(blk.c(i1, i2, i3, i4) - blk.c(i2, i1, i4, i3)) > 1e-12) {
              throw std::invalid_argument("instance: ctensor violates within-pair symmetry");
            }
          }
  }
}

OrbitalSet solve_mean_field(const Cell& cell, const pwbasis::PlaneWaveBasis& basis,
                            const std::vector<PotentialWell>& wells, int n_bands,
                            int n_occ, double constant_shift) {
  const int npw = static_cast<int>(basis.size());
  if (n_bands > npw) throw std::invalid_argument("solve_mean_field: n_bands > N_pw");
  if (n_bands < 1) throw std::invalid_argument("solve_mean_field: n_bands < 1");

  Mat hc(npw, npw);
  for (int g = 0; g < npw; ++g) {
    for (int gp = 0; gp < npw; ++gp) {
      const Eigen::Vector3d dg = basis.gcart[g] - basis.gcart[gp];
      hc(g, gp) = potential_coefficient(cell, wells, dg);
    }
    hc(g, g) += 0.5 * basis.g2[g] + constant_shift;
  }
  if (hermiticity_defect(hc) > 1e-10) {
    throw std::runtime_error("solve_mean_field: assembled matrix not Hermitian");
  }

  // Unitary map from complex plane waves onto the real cos/sin basis; the
  // transformed matrix is real symmetric because the potential is real, and
  // real eigenvectors give orbitals with C(-g) = C(g)^*.
  Mat w = Mat::Zero(npw, npw);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  int col = 0;
  for (std::size_t s = 0; s < basis.halfspace_size(); ++s) {
    const int ig = basis.halfspace[s];
    if (basis.g2[ig] == 0.0) {
      w(ig, col++) = 1.0;
      continue;
    }
    const int in = basis.neg_index[ig];
    w(ig, col) = inv_sqrt2;
    w(in, col) = inv_sqrt2;
    ++col;
    w(ig, col) = cxd(0.0, -inv_sqrt2);
    w(in, col) = cxd(0.0, inv_sqrt2);
    ++col;
  }
  Mat hr_c = w.adjoint() * hc * w;
  if (hr_c.imag().cwiseAbs().maxCoeff() > 1e-10) {
    throw std::runtime_error("solve_mean_field: real-basis matrix has imaginary residue");
  }
  RMat hr = 0.5 * (hr_c.real() + hr_c.real().transpose());

  Eigen::SelfAdjointEigenSolver<RMat> es(hr);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_mean_field: eigensolver failed");

  RMat cr = es.eigenvectors().leftCols(n_bands);
  for (int c = 0; c < n_bands; ++c) {
    Eigen::Index imax = 0;
    cr.col(c).cwiseAbs().maxCoeff(&imax);
    if (cr(imax, c) < 0.0) cr.col(c) *= -1.0;
  }

  OrbitalSet out;
  out.coefficients = w * cr;
  out.eigenvalues = es.eigenvalues().head(n_bands);
  out.n_occ = n_occ;
  return out;
}

PairDensityTensor pair_density(const OrbitalSet& orbitals,
                               const pwbasis::PlaneWaveBasis& basis,
                               const Cell& cell) {
  const int npw = static_cast<int>(basis.size());
  const int nb = orbitals.n_bands();
  if (orbitals.coefficients.rows() != npw) {
    throw std::invalid_argument("pair_density: orbital/basis dimension mismatch");
  }
  PairDensityTensor t;
  t.grid = pwbasis::build_difference_grid(cell, basis);
  t.n_b = nb;
  t.eta.assign(t.grid.halfspace_size(), {Mat::Zero(nb, nb), Mat::Zero(nb, nb)});

  const double inv_v = 1.0 / cell.volume();
  const cxd half(0.5, 0.0);
  const cxd half_over_i(0.0, -0.5);  // 1/(2i)
  const Mat& c = orbitals.coefficients;
  for (int g1 = 0; g1 < npw; ++g1) {
    for (int g2 = 0; g2 < npw; ++g2) {
      const pwbasis::Miller d{basis.miller[g2][0] - basis.miller[g1][0],
                              basis.miller[g2][1] - basis.miller[g1][1],
                              basis.miller[g2][2] - basis.miller[g1][2]};
      const int id = t.grid.index_of(d);
      const int slot = t.grid.hs_slot[id];
      const Mat x = inv_v * (c.row(g1).adjoint() * c.row(g2));
      if (slot == 0) {
        t.eta[0][0] += x;  // self-paired origin: eta_0(0) = C(0), eta_1(0) = 0
      } else if (t.grid.is_representative(id)) {
        t.eta[slot][0] += half * x;
        t.eta[slot][1] += half_over_i * x;
      } else {
        t.eta[slot][0] += half * x;
        t.eta[slot][1] -= half_over_i * x;
      }
    }
  }
  return t;
}

Tensor4 kappa_oracle(const HamiltonianInstance& instance) {
  const int nb = instance.n_b();
  if (nb > 16) throw std::invalid_argument("kappa_oracle: guard rail N_b <= 16 exceeded");
  Tensor4 kappa(nb);

  const auto& grid = instance.pair_density.grid;
  for (std::size_t s = 0; s < grid.halfspace_size(); ++s) {
    const int ig = grid.halfspace[s];
    const double w = 2.0 * instance.kernel.vprime(grid, ig);
    for (int j = 0; j < 2; ++j) {
      const Mat& e = instance.pair_density.eta[s][j];
      for (int p = 0; p < nb; ++p)
        for (int q = 0; q < nb; ++q) {
          const cxd left = w * std::conj(e(p, q));
          if (left == cxd(0.0, 0.0)) continue;
          for (int r = 0; r < nb; ++r)
            for (int ss = 0; ss < nb; ++ss) kappa(p, q, r, ss) += left * e(r, ss);
        }
    }
  }

  for (const auto& blk : instance.paw_blocks) {
    const int na = blk.n_a;
    std::vector<Mat> d(na * na);
    for (int i1 = 0; i1 < na; ++i1)
      for (int i2 = 0; i2 < na; ++i2) {
        d[i1 * na + i2] =
            blk.proj_overlaps.col(i1).conjugate() * blk.proj_overlaps.col(i2).transpose();
      }
    for (int i1 = 0; i1 < na; ++i1)
      for (int i2 = 0; i2 < na; ++i2)
        for (int i3 = 0; i3 < na; ++i3)
          for (int i4 = 0; i4 < na; ++i4) {
            const double cval = blk.c(i1, i2, i3, i4);
            if (cval == 0.0) continue;
            const Mat& dl = d[i1 * na + i2];
            const Mat& dr = d[i3 * na + i4];
            for (int p = 0; p < nb; ++p)
              for (int q = 0; q < nb; ++q) {
                const cxd left = cval * std::conj(dl(p, q));
                for (int r = 0; r < nb; ++r)
                  for (int ss = 0; ss < nb; ++ss) kappa(p, q, r, ss) += left * dr(r, ss);
              }
          }
  }
  return kappa;
}

Mat mp2_density(const OrbitalSet& orbitals, const Tensor4& kappa) {
  const int nb = orbitals.n_bands();
  const int no = orbitals.n_occ;
  const int nv = nb - no;
  if (no < 1) throw std::invalid_argument("mp2_density: need at least one occupied orbital");
  if (nv < 1) throw std::invalid_argument("mp2_density: need at least one virtual orbital");
  const RVec& eps = orbitals.eigenvalues;

  Mat d = Mat::Zero(nv, nv);
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nv; ++b)
      for (int c = 0; c < nv; ++c)
        for (int i = 0; i < no; ++i) {
          const double den_b = eps(no + b) + eps(no + c) - 2.0 * eps(i);
          const double den_a = eps(no + a) + eps(no + c) - 2.0 * eps(i);
          if (std::abs(den_b) < 1e-10 || std::abs(den_a) < 1e-10) {
            throw std::runtime_error("mp2_density: degenerate gap");
          }
          d(a, b) += kappa(i, no + c, no + b, i) * std::conj(kappa(i, no + c, no + a, i)) /
                     (den_b * den_a);
        }
  return d;
}

double mp2_energy(const OrbitalSet& orbitals, const Tensor4& kappa) {
  const int nb = orbitals.n_bands();
  const int no = orbitals.n_occ;
  const int nv = nb - no;
  if (no < 1 || nv < 1) throw std::invalid_argument("mp2_energy: need occupied and virtual orbitals");
  const RVec& eps = orbitals.eigenvalues;

  cxd e2 = 0.0;
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
          const double den = eps(i) + eps(j) - eps(no + a) - eps(no + b);
          if (std::abs(den) < 1e-10) throw std::runtime_error("mp2_energy: degenerate gap");
          const cxd aibj = kappa(no + a, i, no + b, j);
          const cxd ajbi = kappa(no + a, j, no + b, i);
          e2 += aibj * (2.0 * std::conj(aibj) - std::conj(ajbi)) / den;
        }
  if (std::abs(e2.imag()) > 1e-10) throw std::runtime_error("mp2_energy: non-real result");
  return e2.real();
}

OrbitalSet natural_orbitals(const OrbitalSet& orbitals, const Mat& density, int n_keep) {
  const int nb = orbitals.n_bands();
  const int no = orbitals.n_occ;
  const int nv = nb - no;
  if (n_keep < 1 || n_keep > nv) throw std::invalid_argument("natural_orbitals: n_keep out of range");
  if (density.rows() != nv || density.cols() != nv) {
    throw std::invalid_argument("natural_orbitals: density dimension mismatch");
  }

  HermitianEig no_eig = hermitian_eig_desc(density);  // descending occupation
  Mat kept = no_eig.vectors.leftCols(n_keep);

  // semicanonicalize the kept span so MP2 denominators stay well defined
  Mat h_virt = kept.adjoint() * orbitals.eigenvalues.tail(nv).asDiagonal() * kept;
  Eigen::SelfAdjointEigenSolver<Mat> sc(0.5 * (h_virt + h_virt.adjoint()));
  Mat rot = kept * sc.eigenvectors();
  for (int c = 0; c < n_keep; ++c) {
    Eigen::Index imax = 0;
    rot.col(c).cwiseAbs().maxCoeff(&imax);
    if (std::abs(rot(imax, c)) > 0.0) {
      rot.col(c) *= std::conj(rot(imax, c)) / std::abs(rot(imax, c));
    }
  }

  OrbitalSet out;
  out.coefficients.resize(orbitals.coefficients.rows(), no + n_keep);
  out.coefficients.leftCols(no) = orbitals.coefficients.leftCols(no);
  out.coefficients.rightCols(n_keep) = orbitals.coefficients.rightCols(nv) * rot;
  out.eigenvalues.resize(no + n_keep);
  out.eigenvalues.head(no) = orbitals.eigenvalues.head(no);
  out.eigenvalues.tail(n_keep) = sc.eigenvalues();
  out.n_occ = no;
  return out;
}

PawBlock synthesize_paw_block(int n_a, int n_b, std::uint64_t seed, double magnitude,
                              bool complex_proj) {
  if (n_a < 1) throw std::invalid_argument("synthesize_paw_block: n_a must be >= 1");
  Rng rng(seed);
  PawBlock blk;
  blk.n_a = n_a;
  blk.atom_id = 0;

  // symmetric matrix over ordered pairs; the unfolding below gives the full
  // within-pair and pair-swap symmetry and is generically indefinite
  const int m = n_a * (n_a + 1) / 2;
  RMat t(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      t(i, j) = magnitude * rng.gaussian();
      t(j, i) = t(i, j);
    }
  blk.ctensor.assign(static_cast<std::size_t>(n_a) * n_a * n_a * n_a, 0.0);
  for (int i1 = 0; i1 < n_a; ++i1)
    for (int i2 = 0; i2 < n_a; ++i2)
      for (int i3 = 0; i3 < n_a; ++i3)
        for (int i4 = 0; i4 < n_a; ++i4) {
          blk.ctensor[((i1 * n_a + i2) * n_a + i3) * n_a + i4] =
              t(pair_slot(i1, i2, n_a), pair_slot(i3, i4, n_a));
        }

  blk.proj_overlaps.resize(n_b, n_a);
  for (int p = 0; p < n_b; ++p)
    for (int i = 0; i < n_a; ++i) {
      const double re = rng.gaussian();
      const double im = complex_proj ? rng.gaussian() : 0.0;
      blk.proj_overlaps(p, i) = cxd(re, im) / std::sqrt(static_cast<double>(n_b));
    }
  return blk;
}

void rotate_basis(const Mat& u, Mat& h, Tensor4& kappa) {
  const int n = static_cast<int>(u.rows());
  h = u.adjoint() * h * u;
  Tensor4 t1(n), t2(n);
  // contract one index at a time
  for (int a = 0; a < n; ++a)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int p = 0; p < n; ++p) acc += u(p, a) * kappa(p, q, r, s);
          t1(a, q, r, s) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int q = 0; q < n; ++q) acc += std::conj(u(q, b)) * t1(a, q, r, s);
          t2(a, b, r, s) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int r = 0; r < n; ++r) acc += std::conj(u(r, c)) * t2(a, b, r, s);
          t1(a, b, c, s) = acc;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cxd acc = 0.0;
          for (int s = 0; s < n; ++s) acc += u(s, d) * t1(a, b, c, s);
          kappa(a, b, c, d) = acc;
        }
}

Tensor4 project_kappa(const Tensor4& kappa, const Mat& t) {
  const int n = kappa.n;
  const int m = static_cast<int>(t.cols());
  if (t.rows() != n) throw std::invalid_argument("project_kappa: dimension mismatch");
  Tensor4 out(m);
  std::vector<cxd> s1(static_cast<std::size_t>(m) * n * n * n);
  auto idx1 = [&](int a, int q, int r, int s) {
    return ((static_cast<std::size_t>(a) * n + q) * n + r) * n + s;
  };
  for (int a = 0; a < m; ++a)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int p = 0; p < n; ++p) acc += t(p, a) * kappa(p, q, r, s);
          s1[idx1(a, q, r, s)] = acc;
        }
  std::vector<cxd> s2(static_cast<std::size_t>(m) * m * n * n);
  auto idx2 = [&](int a, int b, int r, int s) {
    return ((static_cast<std::size_t>(a) * m + b) * n + r) * n + s;
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int q = 0; q < n; ++q) acc += std::conj(t(q, b)) * s1[idx1(a, q, r, s)];
          s2[idx2(a, b, r, s)] = acc;
        }
  std::vector<cxd> s3(static_cast<std::size_t>(m) * m * m * n);
  auto idx3 = [&](int a, int b, int c, int s) {
    return ((static_cast<std::size_t>(a) * m + b) * m + c) * n + s;
  };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int s = 0; s < n; ++s) {
          cxd acc = 0.0;
          for (int r = 0; r < n; ++r) acc += std::conj(t(r, c)) * s2[idx2(a, b, r, s)];
          s3[idx3(a, b, c, s)] = acc;
        }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          cxd acc = 0.0;
          for (int s = 0; s < n; ++s) acc += t(s, d) * s3[idx3(a, b, c, s)];
          out(a, b, c, d) = acc;
        }
  return out;
}

HamiltonianInstance synth_random_instance(const SynthSpec& spec) {
  Rng rng(spec.seed);
  Cell cell = Cell::cubic(spec.a_bohr);
  auto basis = pwbasis::build_basis(cell, spec.cutoff_ev);
  auto grid = pwbasis::build_difference_grid(cell, basis);
  auto kernel = pwbasis::coulomb_kernel(grid, cell, pwbasis::Regularization::spherical_truncation);

  const int nb = spec.n_b;
  const double volume = cell.volume();

  PairDensityTensor pd;
  pd.grid = grid;
  pd.n_b = nb;
  pd.eta.assign(grid.halfspace_size(), {Mat::Zero(nb, nb), Mat::Zero(nb, nb)});
  pd.eta[0][0] = Mat::Identity(nb, nb) / volume;  // orthonormality at G = 0
  for (std::size_t s = 1; s < grid.halfspace_size(); ++s) {
    const double g2 = grid.g2[grid.halfspace[s]];
    const double sigma = 1.0 / (volume * (1.0 + g2));
    for (int j = 0; j < 2; ++j) {
      Mat e = Mat::Zero(nb, nb);
      for (int p = 0; p < nb; ++p)
        for (int q = p; q < nb; ++q) {
          const double re = sigma * rng.gaussian();
          const double im = (spec.complex_mode && q > p) ? sigma * rng.gaussian() : 0.0;
          e(p, q) = cxd(re, im);
          e(q, p) = std::conj(e(p, q));
        }
      pd.eta[s][j] = e;
    }
  }

  Mat h = Mat::Zero(nb, nb);
  for (int p = 0; p < nb; ++p) {
    h(p, p) = -1.0 + 0.5 * p;
    for (int q = p + 1; q < nb; ++q) {
      const double re = 0.05 * rng.gaussian();
      const double im = spec.complex_mode ? 0.05 * rng.gaussian() : 0.0;
      h(p, q) = cxd(re, im);
      h(q, p) = std::conj(h(p, q));
    }
  }

  std::vector<PawBlock> blocks;
  for (int b = 0; b < spec.n_paw_blocks; ++b) {
    PawBlock blk = synthesize_paw_block(spec.n_a, nb, spec.seed * 97 + 13 * (b + 1),
                                        spec.paw_magnitude, spec.complex_mode);
    blk.atom_id = b;
    blocks.push_back(std::move(blk));
  }

  HamiltonianInstance inst{cell, std::move(basis), std::move(h), 0.1 * rng.uniform(),
                           std::move(pd), std::move(blocks), std::move(kernel), std::nullopt};
  inst.validate();
  return inst;
}

HamiltonianInstance make_well_instance(const WellInstanceSpec& spec) {
  Cell cell = Cell::cubic(spec.a_bohr);
  auto basis = pwbasis::build_basis(cell, spec.cutoff_ev);
  OrbitalSet orbs = solve_mean_field(cell, basis, spec.wells, spec.n_bands, spec.n_occ);
  PairDensityTensor pd = pair_density(orbs, basis, cell);
  auto kernel = pwbasis::coulomb_kernel(pd.grid, cell, pwbasis::Regularization::spherical_truncation);

  Mat h = Mat::Zero(spec.n_bands, spec.n_bands);
  h.diagonal() = orbs.eigenvalues.cast<cxd>();

  std::vector<PawBlock> blocks;
  for (int b = 0; b < spec.n_paw_blocks; ++b) {
    PawBlock blk = synthesize_paw_block(spec.n_a, spec.n_bands, spec.paw_seed + 31 * b,
                                        spec.paw_magnitude);
    blk.atom_id = b;
    blocks.push_back(std::move(blk));
  }

  HamiltonianInstance inst{cell, std::move(basis), std::move(h), 0.0,
                           std::move(pd), std::move(blocks), std::move(kernel), std::move(orbs)};
  inst.validate();
  return inst;
}

}  // namespace qpaw::toyscf
