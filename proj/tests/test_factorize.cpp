#include <doctest.h>

#include "qpaw/factorize.hpp"
#include "qpaw/rng.hpp"

using namespace qpaw;
using toyscf::Tensor4;

namespace {

double max_abs_diff(const Tensor4& a, const Tensor4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

toyscf::HamiltonianInstance random_instance(std::uint64_t seed, int nb, int paw_blocks,
                                            bool complex_mode = false) {
  toyscf::SynthSpec spec;
  spec.n_b = nb;
  spec.cutoff_ev = 25.0;
  spec.n_paw_blocks = paw_blocks;
  spec.n_a = 2;
  spec.seed = seed;
  spec.complex_mode = complex_mode;
  return toyscf::synth_random_instance(spec);
}

}  // namespace

TEST_CASE("soft factors: zero matrix, 1x1 case, unitarity and conventions") {
  auto inst = random_instance(4, 1, 0);
  // zero one half-space entry
  inst.pair_density.eta[1][0].setZero();
  auto factors = factorize::factor_soft(inst.pair_density, inst.kernel);

  // count equals the pair-grid size: both j channels minus the missing (0,1)
  CHECK(factors.size() == inst.pair_density.grid.size());

  for (const auto& s : factors) {
    CHECK(unitarity_defect(s.u) < 1e-10);
    // reassembly
    Mat c = s.u * s.f.asDiagonal() * s.u.adjoint();
    const int slot = inst.pair_density.grid.hs_slot[inst.pair_density.grid.index_of(s.gvec)];
    CHECK((c - inst.pair_density.eta[slot][s.j]).cwiseAbs().maxCoeff() < 1e-10);
    // descending magnitude order
    for (Eigen::Index i = 1; i < s.f.size(); ++i) {
      CHECK(std::abs(s.f(i - 1)) >= std::abs(s.f(i)) - 1e-15);
    }
    // phase fix: largest component of each column real positive
    for (Eigen::Index c2 = 0; c2 < s.u.cols(); ++c2) {
      Eigen::Index imax = 0;
      s.u.col(c2).cwiseAbs().maxCoeff(&imax);
      CHECK(std::abs(s.u(imax, c2).imag()) < 1e-12);
      CHECK(s.u(imax, c2).real() >= 0.0);
    }
  }

  // the zeroed entry factors to f = 0, U = I
  const auto& z = factors[1];  // slot 1, j = 0 follows the origin factor
  CHECK(z.f.cwiseAbs().maxCoeff() == 0.0);
  CHECK((z.u - Mat::Identity(1, 1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft reconstruction matches the oracle") {
  for (bool complex_mode : {false, true}) {
    auto inst = random_instance(7, 4, 0, complex_mode);
    auto fh = factorize::factorize_instance(inst);
    auto kappa = toyscf::kappa_oracle(inst);
    auto rebuilt = factorize::reconstruct_kappa(fh);
    CHECK(max_abs_diff(kappa, rebuilt) < 1e-10);
  }
}

TEST_CASE("paw factors: smallest case has the (1/2)^2 scaling") {
  const int nb = 3;
  toyscf::PawBlock blk;
  blk.n_a = 1;
  blk.atom_id = 0;
  blk.ctensor = {0.8};
  Rng rng(2);
  blk.proj_overlaps.resize(nb, 1);
  for (int p = 0; p < nb; ++p) blk.proj_overlaps(p, 0) = rng.gaussian();

  auto factors = factorize::factor_paw({blk});
  REQUIRE(factors.size() == 1);
  const auto& f = factors[0];
  CHECK(f.i1 == 0);
  CHECK(f.i2 == 0);
  CHECK(f.eps == doctest::Approx(0.25 * 0.8).epsilon(1e-12));
  CHECK(f.sign == 1);
  // L = D + D^dag with |O| = 1
  Mat d = blk.proj_overlaps.col(0).conjugate() * blk.proj_overlaps.col(0).transpose();
  Mat l = f.u * f.f.asDiagonal() * f.u.adjoint();
  CHECK((l.cwiseAbs() - (d + d.adjoint()).cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("paw reconstruction matches the oracle and exercises both signs") {
  auto inst = random_instance(11, 4, 2);
  // drop the soft part so only PAW remains
  for (auto& e : inst.pair_density.eta) {
    e[0].setZero();
    e[1].setZero();
  }
  inst.pair_density.eta[0][0] = Mat::Identity(4, 4) / inst.cell.volume();
  // keep kappa purely PAW by zeroing the kernel's soft support
  for (auto& v : inst.kernel.values) v = 0.0;
  inst.kernel.v0 = 0.0;
  inst.kernel.vreg0 = 0.0;

  auto fh = factorize::factorize_instance(inst);
  auto kappa = toyscf::kappa_oracle(inst);
  auto rebuilt = factorize::reconstruct_kappa(fh);
  CHECK(max_abs_diff(kappa, rebuilt) < 1e-10);

  bool has_negative = false, has_positive = false;
  for (const auto& p : fh.paw) {
    if (p.sign < 0) has_negative = true;
    if (p.sign > 0) has_positive = true;
  }
  CHECK(has_negative);
  CHECK(has_positive);
}

TEST_CASE("zero ctensor contributes nothing") {
  auto blk = toyscf::synthesize_paw_block(2, 3, 5, 0.0);
  auto factors = factorize::factor_paw({blk});
  for (const auto& f : factors) CHECK(f.eps == 0.0);
}

TEST_CASE("asymmetric ctensor is rejected") {
  auto blk = toyscf::synthesize_paw_block(2, 3, 5, 0.1);
  blk.ctensor[1] += 1.0;  // break pair-swap symmetry
  CHECK_THROWS_AS(factorize::factor_paw({blk}), std::invalid_argument);
}

TEST_CASE("truncate: floor-only at delta=0, saturation, G=0 rule, monotonicity") {
  auto inst = random_instance(13, 4, 1);
  auto fh = factorize::factorize_instance(inst);

  auto t0 = factorize::truncate(fh, 0.0);
  for (std::size_t i = 0; i < fh.soft.size(); ++i) {
    for (Eigen::Index k = 0; k < fh.soft[i].f.size(); ++k) {
      const double orig = fh.soft[i].f(k);
      const double kept = t0.soft[i].f(k);
      if (std::abs(orig) > 1e-10) {
        CHECK(kept == orig);
      } else {
        CHECK(kept == 0.0);
      }
    }
  }

  auto tinf = factorize::truncate(fh, 1e9);
  for (const auto& s : tinf.soft) CHECK(s.f.cwiseAbs().maxCoeff() == 0.0);
  // kappa reduces to the PAW-only part
  auto kappa_paw_only = factorize::reconstruct_kappa(tinf);
  toyscf::HamiltonianInstance paw_only = inst;
  for (auto& e : paw_only.pair_density.eta) {
    e[0].setZero();
    e[1].setZero();
  }
  paw_only.pair_density.eta[0][0] = Mat::Identity(4, 4) / inst.cell.volume();
  for (auto& v : paw_only.kernel.values) v = 0.0;
  paw_only.kernel.v0 = 0.0;
  paw_only.kernel.vreg0 = 0.0;
  auto kappa_paw = toyscf::kappa_oracle(paw_only);
  CHECK(max_abs_diff(kappa_paw_only, kappa_paw) < 1e-10);

  // surviving parameters nonincreasing in delta
  long last = t0.surviving_parameters;
  for (double delta : {1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
    auto t = factorize::truncate(fh, delta);
    CHECK(t.surviving_parameters <= last);
    last = t.surviving_parameters;
  }

  // the G=0 channel is truncatable through the delta * g_min rule
  bool g0_zeroed = true;
  auto tbig = factorize::truncate(fh, 1e8);
  for (const auto& s : tbig.soft) {
    if (s.g2 == 0.0 && s.f.cwiseAbs().maxCoeff() > 0.0) g0_zeroed = false;
  }
  CHECK(g0_zeroed);

  CHECK_THROWS_AS(factorize::truncate(fh, -1.0), std::invalid_argument);
}

TEST_CASE("effective one body: closed forms and the dual contraction path") {
  // kappa = 0: all three matrices are h
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = -0.7;
  h(1, 1) = 0.4;
  h(0, 1) = cxd(0.05, 0.0);
  h(1, 0) = cxd(0.05, 0.0);
  Tensor4 zero(2);
  auto ob0 = factorize::effective_one_body(h, zero);
  CHECK((ob0.h_corrected - h).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ob0.h_prime - h).cwiseAbs().maxCoeff() == 0.0);

  // N_b = 1: h' = h + kappa/2
  Mat h1 = Mat::Zero(1, 1);
  h1(0, 0) = 0.3;
  Tensor4 k1(1);
  k1(0, 0, 0, 0) = 0.9;
  auto ob1 = factorize::effective_one_body(h1, k1);
  CHECK(ob1.h_prime(0, 0).real() == doctest::Approx(0.3 + 0.45).epsilon(1e-14));
  CHECK(ob1.h_corrected(0, 0).real() == doctest::Approx(0.3 - 0.45).epsilon(1e-14));

  // factor contraction equals the dense contraction
  auto inst = random_instance(17, 4, 1);
  auto fh = factorize::factorize_instance(inst);
  auto kappa = toyscf::kappa_oracle(inst);
  auto dense = factorize::effective_one_body(inst.h, kappa);
  CHECK((fh.one_body.h_corrected - dense.h_corrected).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fh.one_body.h_prime - dense.h_prime).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fh.one_body.eps_prime - dense.eps_prime).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index i = 1; i < fh.one_body.eps_prime.size(); ++i) {
    CHECK(fh.one_body.eps_prime(i) >= fh.one_body.eps_prime(i - 1));
  }
}

TEST_CASE("factorization is bit-stable across repeated runs") {
  auto inst = random_instance(23, 3, 1);
  auto a = factorize::factorize_instance(inst);
  auto b = factorize::factorize_instance(inst);
  REQUIRE(a.soft.size() == b.soft.size());
  for (std::size_t i = 0; i < a.soft.size(); ++i) {
    CHECK((a.soft[i].f - b.soft[i].f).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.soft[i].u - b.soft[i].u).cwiseAbs().maxCoeff() == 0.0);
  }
  for (std::size_t i = 0; i < a.paw.size(); ++i) {
    CHECK(a.paw[i].eps == b.paw[i].eps);
    CHECK((a.paw[i].u - b.paw[i].u).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("reconstruct_kappa guard rail and degenerate edge cases") {
  auto inst = random_instance(29, 2, 0);
  auto fh = factorize::factorize_instance(inst);
  fh.n_b = 17;
  CHECK_THROWS_AS(factorize::reconstruct_kappa(fh), std::invalid_argument);

  // all eigenvalues zeroed -> zero tensor
  auto fz = factorize::factorize_instance(inst);
  for (auto& s : fz.soft) s.f.setZero();
  for (auto& p : fz.paw) p.f.setZero();
  auto kz = factorize::reconstruct_kappa(fz);
  for (const auto& v : kz.a) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("single surviving soft factor gives a rank-1 compound tensor") {
  auto inst = random_instance(31, 3, 0);
  auto fh = factorize::factorize_instance(inst);
  // keep a single eigenvalue in a single factor
  bool first = true;
  for (auto& s : fh.soft) {
    s.f.setZero();
    if (first && s.g2 > 0.0) {
      s.f(0) = 0.5;
      first = false;
    }
  }
  auto kappa = factorize::reconstruct_kappa(fh);
  // as a matrix over compound indices (pq),(rs) the tensor has rank 1
  Mat m(9, 9);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) m(p * 3 + q, r * 3 + s) = kappa(p, q, r, s);
  Eigen::JacobiSVD<Mat> svd(m);
  CHECK(svd.singularValues()(0) > 1e-12);
  for (Eigen::Index i = 1; i < svd.singularValues().size(); ++i) {
    CHECK(svd.singularValues()(i) < 1e-12);
  }
}
