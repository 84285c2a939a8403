#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qpaw/rng.hpp"
#include "qpaw/toyscf.hpp"
#include "qpaw/units.hpp"

using namespace qpaw;
using toyscf::PotentialWell;
using toyscf::Tensor4;

namespace {

std::vector<PotentialWell> one_well(double a) {
  return {{Eigen::Vector3d(0.5 * a, 0.5 * a, 0.5 * a), 4.0, 0.8}};
}

// generic placement, breaks point-group degeneracies
std::vector<PotentialWell> two_wells(double a) {
  return {{Eigen::Vector3d(0.31 * a, 0.47 * a, 0.55 * a), 3.0, 0.8},
          {Eigen::Vector3d(0.68 * a, 0.52 * a, 0.41 * a), 1.7, 1.1}};
}

// half-space kappa rebuilt by summing the full grid with the unsplit C
// matrices and v(G) (vreg0 at the origin)
Tensor4 full_grid_kappa_soft(const toyscf::HamiltonianInstance& inst) {
  const int nb = inst.n_b();
  Tensor4 kappa(nb);
  const auto& grid = inst.pair_density.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = inst.kernel.values[i];  // vreg0 at G=0, unhalved
    const Mat c = inst.pair_density.c_at(static_cast<int>(i));
    for (int p = 0; p < nb; ++p)
      for (int q = 0; q < nb; ++q)
        for (int r = 0; r < nb; ++r)
          for (int s = 0; s < nb; ++s) {
            kappa(p, q, r, s) += w * std::conj(c(p, q)) * c(r, s);
          }
  }
  return kappa;
}

}  // namespace

TEST_CASE("free electrons: kinetic spectrum and G=0 ground state") {
  Cell cell = Cell::cubic(2.0 * M_PI);
  auto basis = pwbasis::build_basis(cell, units::hartree_to_ev(1.6));
  auto orbs = toyscf::solve_mean_field(cell, basis, {}, 5, 1);
  std::vector<double> ke(basis.g2.size());
  for (std::size_t i = 0; i < basis.g2.size(); ++i) ke[i] = 0.5 * basis.g2[i];
  std::sort(ke.begin(), ke.end());
  for (int p = 0; p < 5; ++p) CHECK(orbs.eigenvalues(p) == doctest::Approx(ke[p]).epsilon(1e-12));
  const int origin = basis.index_of({0, 0, 0});
  CHECK(std::abs(orbs.coefficients(origin, 0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single well ground energy matches the Jacobi oracle") {
  const double a = 2.0 * M_PI;
  Cell cell = Cell::cubic(a);
  auto basis = pwbasis::build_basis(cell, units::hartree_to_ev(1.6));
  REQUIRE(basis.size() == 27);
  auto orbs = toyscf::solve_mean_field(cell, basis, two_wells(a), 4, 1);

  // independent assembly of the complex plane-wave matrix + Jacobi rotations
  const auto wells = two_wells(a);
  const int n = static_cast<int>(basis.size());
  Mat h(n, n);
  for (int g = 0; g < n; ++g)
    for (int gp = 0; gp < n; ++gp) {
      const Eigen::Vector3d dg = basis.gcart[g] - basis.gcart[gp];
      cxd v = 0.0;
      for (const auto& w : wells) {
        v += -w.depth / cell.volume() * std::pow(2.0 * M_PI, 1.5) * std::pow(w.width, 3) *
             std::exp(-0.5 * dg.squaredNorm() * w.width * w.width) *
             std::exp(cxd(0.0, -dg.dot(w.center)));
      }
      h(g, gp) = v + (g == gp ? 0.5 * basis.g2[g] : 0.0);
    }
  Eigen::VectorXd ev = oracles::jacobi_eigenvalues(h);
  for (int p = 0; p < 4; ++p) CHECK(orbs.eigenvalues(p) == doctest::Approx(ev(p)).epsilon(1e-9));

  // orthonormal columns
  CHECK(unitarity_defect(orbs.coefficients) < 1e-10);
}

TEST_CASE("uniform potential shift moves all eigenvalues") {
  const double a = 5.0;
  Cell cell = Cell::cubic(a);
  auto basis = pwbasis::build_basis(cell, 60.0);
  auto base = toyscf::solve_mean_field(cell, basis, two_wells(a), 4, 1);
  auto shifted = toyscf::solve_mean_field(cell, basis, two_wells(a), 4, 1, 0.37);
  for (int p = 0; p < 4; ++p) {
    CHECK(shifted.eigenvalues(p) == doctest::Approx(base.eigenvalues(p) + 0.37).epsilon(1e-12));
  }
  // eigenvectors unchanged up to phase; with the real solver, up to sign
  for (int p = 0; p < 4; ++p) {
    const double overlap = std::abs(base.coefficients.col(p).dot(shifted.coefficients.col(p)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("n_bands > N_pw is rejected") {
  Cell cell = Cell::cubic(2.0 * M_PI);
  auto basis = pwbasis::build_basis(cell, units::hartree_to_ev(0.1));
  CHECK_THROWS(toyscf::solve_mean_field(cell, basis, {}, 2, 1));
}

TEST_CASE("pair density: orthonormality at G=0 and reflection symmetries") {
  const double a = 5.0;
  Cell cell = Cell::cubic(a);
  auto basis = pwbasis::build_basis(cell, 70.0);
  auto orbs = toyscf::solve_mean_field(cell, basis, one_well(a), 4, 1);
  auto pd = toyscf::pair_density(orbs, basis, cell);

  const double inv_v = 1.0 / cell.volume();
  const Mat c0 = pd.c_at(pd.grid.index_of({0, 0, 0}));
  CHECK((c0 - inv_v * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(11);
  for (int t = 0; t < 12; ++t) {
    const int i = static_cast<int>(rng.integer() % pd.grid.size());
    const Mat c = pd.c_at(i);
    const Mat cm = pd.c_at(pd.grid.neg_index[i]);
    CHECK((c.adjoint() - cm).cwiseAbs().maxCoeff() < 1e-12);  // C*_pq(G) = C_qp(-G)
    for (int j = 0; j < 2; ++j) {
      const Mat e = pd.eta_at(i, j);
      CHECK(hermiticity_defect(e) < 1e-12);
      const Mat em = pd.eta_at(pd.grid.neg_index[i], j);
      CHECK((em - (j == 0 ? 1.0 : -1.0) * e).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  // real orbitals: eta_0 = Re C, eta_1 = Im C entrywise
  for (int t = 0; t < 12; ++t) {
    const int i = static_cast<int>(rng.integer() % pd.grid.size());
    const Mat c = pd.c_at(i);
    CHECK((pd.eta_at(i, 0) - c.real().cast<cxd>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pd.eta_at(i, 1) - c.imag().cast<cxd>()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("kappa oracle: diagonal positivity without PAW") {
  toyscf::WellInstanceSpec spec;
  spec.a_bohr = 5.0;
  spec.cutoff_ev = 50.0;
  spec.wells = one_well(5.0);
  spec.n_bands = 1;
  spec.n_paw_blocks = 0;
  auto inst = toyscf::make_well_instance(spec);
  auto kappa = toyscf::kappa_oracle(inst);
  CHECK(kappa(0, 0, 0, 0).real() > 0.0);
  CHECK(std::abs(kappa(0, 0, 0, 0).imag()) < 1e-14);
}

TEST_CASE("kappa oracle: rank-1 PAW block factorizes as products of D entries") {
  const int nb = 3;
  toyscf::SynthSpec spec;
  spec.n_b = nb;
  spec.cutoff_ev = 20.0;
  spec.n_paw_blocks = 0;
  auto inst = toyscf::synth_random_instance(spec);
  // zero the soft channel, keep a single projector with identity-like ctensor
  for (auto& e : inst.pair_density.eta) {
    e[0].setZero();
    e[1].setZero();
  }
  toyscf::PawBlock blk;
  blk.n_a = 1;
  blk.ctensor = {1.0};
  Rng rng(5);
  blk.proj_overlaps.resize(nb, 1);
  for (int p = 0; p < nb; ++p) blk.proj_overlaps(p, 0) = rng.gaussian();
  inst.paw_blocks = {blk};

  auto kappa = toyscf::kappa_oracle(inst);
  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q)
      for (int r = 0; r < nb; ++r)
        for (int s = 0; s < nb; ++s) {
          const cxd d_pq = std::conj(blk.proj_overlaps(p, 0)) * blk.proj_overlaps(q, 0);
          const cxd d_rs = std::conj(blk.proj_overlaps(r, 0)) * blk.proj_overlaps(s, 0);
          CHECK(std::abs(kappa(p, q, r, s) - std::conj(d_pq) * d_rs) < 1e-12);
        }
}

TEST_CASE("kappa oracle agrees with the full-grid summation oracle") {
  toyscf::SynthSpec spec;
  spec.n_b = 4;
  spec.cutoff_ev = 25.0;
  spec.n_paw_blocks = 0;
  spec.seed = 9;
  auto inst = toyscf::synth_random_instance(spec);
  auto kappa = toyscf::kappa_oracle(inst);
  auto full = full_grid_kappa_soft(inst);
  double dev = 0.0;
  for (std::size_t i = 0; i < kappa.a.size(); ++i) {
    dev = std::max(dev, std::abs(kappa.a[i] - full.a[i]));
  }
  CHECK(dev < 1e-10);
}

TEST_CASE("kappa symmetries hold on generated instances") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    toyscf::SynthSpec spec;
    spec.n_b = 4;
    spec.cutoff_ev = 25.0;
    spec.n_paw_blocks = 1;
    spec.seed = seed;
    auto inst = toyscf::synth_random_instance(spec);
    auto kappa = toyscf::kappa_oracle(inst);
    double herm = 0.0, swap = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        for (int r = 0; r < 4; ++r)
          for (int s = 0; s < 4; ++s) {
            herm = std::max(herm,
                            std::abs(kappa(p, q, r, s) - std::conj(kappa(q, p, s, r))));
            swap = std::max(swap, std::abs(kappa(p, q, r, s) - kappa(r, s, p, q)));
          }
    CHECK(herm < 1e-12);
    CHECK(swap < 1e-12);
  }
}

TEST_CASE("kappa oracle guard rail") {
  toyscf::SynthSpec spec;
  spec.n_b = 17;
  spec.cutoff_ev = 10.0;
  spec.n_paw_blocks = 0;
  auto inst = toyscf::synth_random_instance(spec);
  CHECK_THROWS_AS(toyscf::kappa_oracle(inst), std::invalid_argument);
}

TEST_CASE("mp2 density: closed forms, zero case, permuted oracle, PSD") {
  toyscf::SynthSpec spec;
  spec.n_b = 5;
  spec.cutoff_ev = 25.0;
  spec.n_paw_blocks = 1;
  spec.seed = 21;
  auto inst = toyscf::synth_random_instance(spec);
  auto kappa = toyscf::kappa_oracle(inst);

  toyscf::OrbitalSet orbs;
  orbs.coefficients = Mat::Identity(5, 5);
  orbs.eigenvalues.resize(5);
  orbs.eigenvalues << -1.0, -0.3, 0.4, 0.9, 1.7;
  orbs.n_occ = 2;

  Mat d = toyscf::mp2_density(orbs, kappa);
  // permuted-summation oracle: loop order (i, c, a, b) instead of (a, b, c, i)
  const int no = 2, nv = 3;
  Mat d2 = Mat::Zero(nv, nv);
  for (int i = 0; i < no; ++i)
    for (int c = 0; c < nv; ++c)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
          const double den_b = orbs.eigenvalues(no + b) + orbs.eigenvalues(no + c) -
                               2.0 * orbs.eigenvalues(i);
          const double den_a = orbs.eigenvalues(no + a) + orbs.eigenvalues(no + c) -
                               2.0 * orbs.eigenvalues(i);
          d2(a, b) += kappa(i, no + c, no + b, i) * std::conj(kappa(i, no + c, no + a, i)) /
                      (den_b * den_a);
        }
  CHECK((d - d2).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::SelfAdjointEigenSolver<Mat> es(d);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  // single occupied/virtual closed form
  toyscf::OrbitalSet two;
  two.coefficients = Mat::Identity(2, 2);
  two.eigenvalues.resize(2);
  two.eigenvalues << -0.5, 0.8;
  two.n_occ = 1;
  toyscf::SynthSpec s2 = spec;
  s2.n_b = 2;
  auto inst2 = toyscf::synth_random_instance(s2);
  auto k2 = toyscf::kappa_oracle(inst2);
  Mat d1 = toyscf::mp2_density(two, k2);
  const double gap = 2.0 * (two.eigenvalues(1) - two.eigenvalues(0));
  CHECK(d1(0, 0).real() ==
        doctest::Approx(std::norm(k2(0, 1, 1, 0)) / (gap * gap)).epsilon(1e-12));

  // zero two-body tensor
  Tensor4 zero(5);
  Mat dz = toyscf::mp2_density(orbs, zero);
  CHECK(dz.cwiseAbs().maxCoeff() == 0.0);

  // degenerate denominator is a hard error
  toyscf::OrbitalSet degen = orbs;
  degen.eigenvalues << -1.0, -0.3, -1.0, 0.9, 1.7;  // eps_a + eps_c - 2 eps_i = 0
  CHECK_THROWS_AS(toyscf::mp2_density(degen, kappa), std::runtime_error);
}

TEST_CASE("mp2 energy: zero kappa and the two-level closed form") {
  toyscf::OrbitalSet orbs;
  orbs.coefficients = Mat::Identity(2, 2);
  orbs.eigenvalues.resize(2);
  orbs.eigenvalues << -0.6, 0.5;
  orbs.n_occ = 1;
  Tensor4 zero(2);
  CHECK(toyscf::mp2_energy(orbs, zero) == 0.0);

  toyscf::SynthSpec spec;
  spec.n_b = 2;
  spec.cutoff_ev = 20.0;
  spec.seed = 33;
  auto inst = toyscf::synth_random_instance(spec);
  auto kappa = toyscf::kappa_oracle(inst);
  const double e2 = toyscf::mp2_energy(orbs, kappa);
  const cxd aibj = kappa(1, 0, 1, 0);
  const double expected =
      (aibj * (2.0 * std::conj(aibj) - std::conj(aibj))).real() /
      (2.0 * orbs.eigenvalues(0) - 2.0 * orbs.eigenvalues(1));
  CHECK(e2 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("natural orbitals: invariance, fixed point, range checks") {
  toyscf::WellInstanceSpec spec;
  spec.a_bohr = 5.0;
  spec.cutoff_ev = 60.0;
  spec.wells = one_well(5.0);
  spec.n_bands = 6;
  spec.n_occ = 1;
  spec.n_paw_blocks = 1;
  spec.paw_magnitude = 0.02;
  auto inst = toyscf::make_well_instance(spec);
  const auto& orbs = *inst.orbitals;
  auto kappa = toyscf::kappa_oracle(inst);
  Mat density = toyscf::mp2_density(orbs, kappa);

  // keeping every natural orbital reproduces the canonical MP2 energy
  const double e_ref = toyscf::mp2_energy(orbs, kappa);
  auto full = toyscf::natural_orbitals(orbs, density, 5);
  Mat t = orbs.coefficients.adjoint() * full.coefficients;
  auto krot = toyscf::project_kappa(kappa, t);
  CHECK(toyscf::mp2_energy(full, krot) == doctest::Approx(e_ref).epsilon(1e-10));

  // diagonal density: the rotation is a permutation
  Mat diag_density = Mat::Zero(5, 5);
  diag_density.diagonal() << 0.05, 0.4, 0.01, 0.2, 0.1;
  auto perm = toyscf::natural_orbitals(orbs, diag_density, 5);
  Mat p = (orbs.coefficients.adjoint() * perm.coefficients).bottomRightCorner(5, 5);
  for (int c = 0; c < 5; ++c) {
    int nonzero = 0;
    for (int r = 0; r < 5; ++r) {
      if (std::abs(p(r, c)) > 1e-9) ++nonzero;
    }
    CHECK(nonzero == 1);
  }

  CHECK_THROWS(toyscf::natural_orbitals(orbs, density, 0));
  CHECK_THROWS(toyscf::natural_orbitals(orbs, density, 6));
}

TEST_CASE("synthetic PAW blocks: determinism, zero magnitude, indefiniteness") {
  auto a = toyscf::synthesize_paw_block(3, 4, 77, 0.5);
  auto b = toyscf::synthesize_paw_block(3, 4, 77, 0.5);
  CHECK(a.ctensor == b.ctensor);
  CHECK((a.proj_overlaps - b.proj_overlaps).cwiseAbs().maxCoeff() == 0.0);

  auto z = toyscf::synthesize_paw_block(2, 4, 3, 0.0);
  for (double v : z.ctensor) CHECK(v == 0.0);

  int negative_seen = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto blk = toyscf::synthesize_paw_block(2, 3, seed, 0.3);
    RMat chat(3, 3);
    const std::array<std::pair<int, int>, 3> pairs{{{0, 0}, {0, 1}, {1, 1}}};
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const auto [i1, i2] = pairs[k];
        const auto [i3, i4] = pairs[l];
        const double scale = (i1 == i2 ? 0.5 : 1.0) * (i3 == i4 ? 0.5 : 1.0);
        chat(k, l) = scale * blk.c(i1, i2, i3, i4);
      }
    Eigen::SelfAdjointEigenSolver<RMat> es(chat);
    if (es.eigenvalues().minCoeff() < 0.0) ++negative_seen;
  }
  CHECK(negative_seen > 0);
}
