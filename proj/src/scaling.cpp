#include "qpaw/scaling.hpp"

#include <cmath>
#include <sstream>

#include "qpaw/factorize.hpp"

namespace qpaw::scaling {

namespace {

constexpr double kFloor = 1e-10;

struct StreamCost {
  double lambda2 = 0.0;
  long columns = 0;
  long l_count = 0;
};

// lambda_2 and surviving-column count without materializing the factors; the
// per-factor weights match lcucost::lambda_total algebraically.
StreamCost stream_cost(const toyscf::PairDensityTensor& pd,
                       const pwbasis::CoulombKernel& kernel,
                       const std::vector<toyscf::PawBlock>& blocks, int n_sub) {
  StreamCost out;
  const auto& grid = pd.grid;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  for (std::size_t s = 0; s < grid.halfspace_size(); ++s) {
    const int ig = grid.halfspace[s];
    const bool origin = grid.g2[ig] == 0.0;
    for (int j = 0; j < 2; ++j) {
      if (origin && j == 1) continue;
      es.compute(pd.eta[s][j].topLeftCorner(n_sub, n_sub), Eigen::EigenvaluesOnly);
      const RVec fabs = es.eigenvalues().cwiseAbs();
      if (!origin) {
        out.lambda2 += 0.5 * kernel.vprime(grid, ig) * fabs.sum() * fabs.sum();
      }
      out.columns += (fabs.array() > kFloor).count();
    }
  }
  out.l_count = static_cast<long>(grid.size());

  if (!blocks.empty()) {
    std::vector<toyscf::PawBlock> reduced = blocks;
    for (auto& blk : reduced) {
      blk.proj_overlaps = Mat(blk.proj_overlaps.topRows(n_sub));
    }
    for (const auto& p : factorize::factor_paw(reduced)) {
      const double l1 = p.f.cwiseAbs().sum();
      out.lambda2 += 0.5 * p.eps * l1 * l1;
      if (p.eps > kFloor) out.columns += (p.f.cwiseAbs().array() > kFloor).count();
      ++out.l_count;
    }
  }
  return out;
}

void fit_slopes(SweepResult& result) {
  std::vector<std::pair<double, double>> lam, gam;
  for (const auto& p : result.points) {
    lam.emplace_back(p.size, p.lambda2);
    gam.emplace_back(p.size, p.gamma_nonzero);
  }
  result.lambda2_slope = lcucost::fit_loglog_slope(lam);
  result.gamma_slope = lcucost::fit_loglog_slope(gam);
}

}  // namespace

SweepResult orbital_sweep(double a_bohr, double cutoff_ev,
                          const std::vector<toyscf::PotentialWell>& wells,
                          const std::vector<int>& n_b_list, int beth) {
  Cell cell = Cell::cubic(a_bohr);
  auto basis = pwbasis::build_basis(cell, cutoff_ev);
  int nb_max = 0;
  for (int nb : n_b_list) nb_max = std::max(nb_max, nb);
  toyscf::OrbitalSet orbs = toyscf::solve_mean_field(cell, basis, wells, nb_max, 1);
  toyscf::PairDensityTensor pd = toyscf::pair_density(orbs, basis, cell);
  auto kernel = pwbasis::coulomb_kernel(pd.grid, cell,
                                        pwbasis::Regularization::spherical_truncation);

  SweepResult result;
  for (int nb : n_b_list) {
    StreamCost c = stream_cost(pd, kernel, {}, nb);
    SweepPoint p;
    p.size = nb;
    p.lambda2 = c.lambda2;
    p.gamma_nonzero = static_cast<double>(c.columns) * nb * beth;
    p.gamma_nominal = c.l_count * static_cast<long>(nb) * nb * beth;
    p.n_pw_pair = static_cast<long>(pd.grid.size());
    result.points.push_back(p);
  }
  fit_slopes(result);
  return result;
}

SweepResult supercell_sweep(double a0_bohr, double cutoff_ev, int orbitals_per_atom,
                            const std::vector<std::array<int, 3>>& replications,
                            int beth, int paw_na) {
  SweepResult result;
  for (const auto& rep : replications) {
    Eigen::Matrix3d lattice = Eigen::Matrix3d::Zero();
    lattice(0, 0) = rep[0] * a0_bohr;
    lattice(1, 1) = rep[1] * a0_bohr;
    lattice(2, 2) = rep[2] * a0_bohr;
    Cell cell(lattice);

    // two wells per base cell, replicated with the lattice
    std::vector<toyscf::PotentialWell> wells;
    for (int i = 0; i < rep[0]; ++i)
      for (int jj = 0; jj < rep[1]; ++jj)
        for (int k = 0; k < rep[2]; ++k) {
          const Eigen::Vector3d shift(i * a0_bohr, jj * a0_bohr, k * a0_bohr);
          wells.push_back({shift + Eigen::Vector3d(0.25 * a0_bohr, 0.25 * a0_bohr,
                                                   0.25 * a0_bohr),
                           2.0, 0.9});
          wells.push_back({shift + Eigen::Vector3d(0.75 * a0_bohr, 0.75 * a0_bohr,
                                                   0.75 * a0_bohr),
                           2.0, 0.9});
        }
    const int n_atoms = static_cast<int>(wells.size());
    const int nb = orbitals_per_atom * n_atoms;

    auto basis = pwbasis::build_basis(cell, cutoff_ev);
    toyscf::OrbitalSet orbs = toyscf::solve_mean_field(cell, basis, wells, nb, n_atoms);
    toyscf::PairDensityTensor pd = toyscf::pair_density(orbs, basis, cell);
    auto kernel = pwbasis::coulomb_kernel(pd.grid, cell,
                                          pwbasis::Regularization::spherical_truncation);
    std::vector<toyscf::PawBlock> blocks;
    for (int a = 0; a < n_atoms; ++a) {
      auto blk = toyscf::synthesize_paw_block(paw_na, nb, 1000 + a, 0.05);
      blk.atom_id = a;
      blocks.push_back(std::move(blk));
    }

    StreamCost c = stream_cost(pd, kernel, blocks, nb);
    SweepPoint p;
    p.size = n_atoms;
    p.lambda2 = c.lambda2;
    p.gamma_nonzero = static_cast<double>(c.columns) * nb * beth;
    p.gamma_nominal = c.l_count * static_cast<long>(nb) * nb * beth;
    p.n_pw_pair = static_cast<long>(pd.grid.size());
    result.points.push_back(p);
  }
  fit_slopes(result);
  return result;
}

std::string to_csv(const SweepResult& result, const std::string& size_label) {
  std::ostringstream os;
  os << size_label << ",lambda2_ha,gamma_nonzero_bits,gamma_nominal_bits,n_pw_pair\n";
  os.precision(12);
  for (const auto& p : result.points) {
    os << p.size << "," << p.lambda2 << "," << p.gamma_nonzero << "," << p.gamma_nominal
       << "," << p.n_pw_pair << "\n";
  }
  os << "# lambda2_slope," << result.lambda2_slope << "\n";
  os << "# gamma_slope," << result.gamma_slope << "\n";
  return os.str();
}

}  // namespace qpaw::scaling
