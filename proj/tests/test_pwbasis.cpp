#include <doctest.h>

#include "oracles.hpp"
#include "qpaw/pwbasis.hpp"
#include "qpaw/rng.hpp"
#include "qpaw/units.hpp"

using namespace qpaw;
using pwbasis::Regularization;

TEST_CASE("cubic cell with |m| <= 1 shell") {
  Cell cell = Cell::cubic(2.0 * M_PI);  // reciprocal vectors of unit length
  const double cutoff_ev = units::hartree_to_ev(1.6);
  auto basis = pwbasis::build_basis(cell, cutoff_ev);
  CHECK(basis.size() == 27);
  CHECK(basis.halfspace_size() == 14);
  CHECK(basis.miller.front() == pwbasis::Miller{-1, -1, -1});
  CHECK(basis.miller[basis.halfspace[0]] == pwbasis::Miller{0, 0, 0});
}

TEST_CASE("degenerate cutoff keeps only the origin") {
  Cell cell = Cell::cubic(2.0 * M_PI);
  auto basis = pwbasis::build_basis(cell, units::hartree_to_ev(0.1));
  CHECK(basis.size() == 1);
  CHECK(basis.halfspace_size() == 1);
  CHECK(basis.miller[0] == pwbasis::Miller{0, 0, 0});
}

TEST_CASE("diamond conventional cell count matches brute force") {
  const double a = 3.567 * 1.8897259886;  // Bohr
  Cell cell = Cell::cubic(a);
  auto basis = pwbasis::build_basis(cell, 600.0);
  const long expected =
      oracles::count_gvectors(cell.lattice, units::ev_to_hartree(600.0), 12);
  CHECK(static_cast<long>(basis.size()) == expected);
  for (double g2 : basis.g2) CHECK(0.5 * g2 <= units::ev_to_hartree(600.0) + 1e-12);
}

TEST_CASE("grid closure and half-space partition") {
  Cell cell = Cell::cubic(4.0);
  auto basis = pwbasis::build_basis(cell, 150.0);
  CHECK(basis.size() % 2 == 1);
  CHECK(basis.halfspace_size() == (basis.size() + 1) / 2);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int n = basis.neg_index[i];
    CHECK(basis.neg_index[n] == static_cast<int>(i));
    CHECK(basis.hs_slot[i] == basis.hs_slot[n]);
  }
  // exactly one representative per pair
  for (std::size_t s = 0; s < basis.halfspace_size(); ++s) {
    const int ig = basis.halfspace[s];
    CHECK(basis.is_representative(ig));
    if (basis.g2[ig] > 0.0) CHECK_FALSE(basis.is_representative(basis.neg_index[ig]));
  }
  // lexicographic ordering
  for (std::size_t i = 1; i < basis.size(); ++i) CHECK(basis.miller[i - 1] < basis.miller[i]);
}

TEST_CASE("difference grid is closed under negation and bounded by 4x cutoff") {
  Cell cell = Cell::cubic(5.0);
  auto basis = pwbasis::build_basis(cell, 80.0);
  auto diff = pwbasis::build_difference_grid(cell, basis);
  CHECK(diff.size() > basis.size());
  const double bound = units::ev_to_hartree(4.0 * 80.0);
  for (std::size_t i = 0; i < diff.size(); ++i) {
    CHECK(0.5 * diff.g2[i] <= bound + 1e-12);
    CHECK(diff.neg_index[diff.neg_index[i]] == static_cast<int>(i));
  }
}

TEST_CASE("invalid cell is rejected") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  CHECK_THROWS(Cell(m));
  CHECK_THROWS(pwbasis::build_basis(Cell::cubic(3.0), -1.0));
}

TEST_CASE("coulomb kernel values") {
  Cell cell = Cell::cubic(2.0);  // V = 8
  auto basis = pwbasis::build_basis(cell, units::hartree_to_ev(2.5 * M_PI * M_PI));
  auto kernel = pwbasis::coulomb_kernel(basis, cell, Regularization::spherical_truncation);
  const int idx = basis.index_of({2, 0, 0});  // |G| = 2 pi
  REQUIRE(idx >= 0);
  CHECK(kernel.values[idx] == doctest::Approx(1.0 / (8.0 * M_PI)).epsilon(1e-12));

  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const int i = static_cast<int>(rng.integer() % basis.size());
    CHECK(kernel.values[i] == doctest::Approx(kernel.values[basis.neg_index[i]]).epsilon(1e-14));
    if (basis.g2[i] > 0.0) CHECK(kernel.values[i] > 0.0);
  }
  CHECK(std::isfinite(kernel.v0));
  CHECK(kernel.halved_zero);
}

TEST_CASE("spherical truncation G=0 value matches the radial quadrature oracle") {
  const double volume = 1000.0;
  Cell cell = Cell::cubic(10.0);
  auto basis = pwbasis::build_basis(cell, 30.0);
  auto kernel = pwbasis::coulomb_kernel(basis, cell, Regularization::spherical_truncation);
  const double rc = std::cbrt(3.0 * volume / (4.0 * M_PI));
  const double closed_form = 2.0 * M_PI * rc * rc / volume;
  CHECK(kernel.vreg0 == doctest::Approx(closed_form).epsilon(1e-12));
  CHECK(kernel.vreg0 == doctest::Approx(oracles::truncated_kernel_g0(volume)).epsilon(1e-8));
  CHECK(kernel.v0 == doctest::Approx(0.5 * kernel.vreg0).epsilon(1e-14));
}

TEST_CASE("user kernel regularization is validated") {
  Cell cell = Cell::cubic(3.0);
  auto basis = pwbasis::build_basis(cell, 40.0);
  CHECK_THROWS(pwbasis::coulomb_kernel(basis, cell, Regularization::user_value, -1.0));
  CHECK_THROWS(pwbasis::coulomb_kernel(basis, cell, Regularization::user_value,
                                       std::nan("")));
  auto kernel = pwbasis::coulomb_kernel(basis, cell, Regularization::user_value, 0.25);
  CHECK(kernel.vreg0 == 0.25);
  CHECK(kernel.v0 == doctest::Approx(0.125));
}
