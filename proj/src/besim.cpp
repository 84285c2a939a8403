#include "qpaw/besim.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace qpaw::besim {

namespace {

constexpr int kMaxOrbitals = 12;

int popcount_below(std::uint32_t s, int pos) {
  const std::uint32_t mask = (1u << pos) - 1u;
  return std::popcount(s & mask);
}

// per-column action of E_pq, amplitudes are +-1
struct SparseColumns {
  std::vector<std::vector<std::pair<int, double>>> cols;
};

SparseColumns excitation_columns(const FockSpace& fock, int p, int q) {
  const int nb = fock.n_orbitals;
  SparseColumns op;
  op.cols.resize(fock.dimension());
  for (int jcol = 0; jcol < fock.dimension(); ++jcol) {
    const std::uint32_t s = fock.states[jcol];
    for (int spin = 0; spin < 2; ++spin) {
      const int qp = q + spin * nb;
      const int pp = p + spin * nb;
      if (!(s >> qp & 1u)) continue;
      const std::uint32_t s1 = s & ~(1u << qp);
      if (s1 >> pp & 1u) continue;
      const double sign_q = popcount_below(s, qp) % 2 ? -1.0 : 1.0;
      const double sign_p = popcount_below(s1, pp) % 2 ? -1.0 : 1.0;
      const std::uint32_t s2 = s1 | (1u << pp);
      const int i = fock.index_of(s2);
      if (i < 0) throw std::logic_error("excitation: state left the sector");
      op.cols[jcol].emplace_back(i, sign_q * sign_p);
    }
  }
  return op;
}

}  // namespace

FockSpace FockSpace::fixed_n(int n_orbitals, int n_electrons) {
  if (n_orbitals < 1 || n_orbitals > kMaxOrbitals) {
    throw std::invalid_argument("fock: orbital count out of range");
  }
  if (n_electrons < 0 || n_electrons > 2 * n_orbitals) {
    throw std::invalid_argument("fock: electron count out of range");
  }
  FockSpace f;
  f.n_orbitals = n_orbitals;
  f.n_electrons = n_electrons;
  const std::uint32_t top = 1u << (2 * n_orbitals);
  for (std::uint32_t s = 0; s < top; ++s) {
    if (std::popcount(s) == n_electrons) f.states.push_back(s);
  }
  return f;
}

FockSpace FockSpace::fixed_n_sz0(int n_orbitals, int n_electrons) {
  if (n_electrons % 2 != 0) throw std::invalid_argument("fock: S_z=0 needs even N");
  FockSpace f = fixed_n(n_orbitals, n_electrons);
  f.sz_zero_only = true;
  const std::uint32_t up_mask = (1u << n_orbitals) - 1u;
  std::erase_if(f.states, [&](std::uint32_t s) {
    return std::popcount(s & up_mask) != n_electrons / 2;
  });
  return f;
}

int FockSpace::index_of(std::uint32_t s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) return -1;
  return static_cast<int>(it - states.begin());
}

Mat excitation_operator(const FockSpace& fock, int p, int q) {
  if (p < 0 || q < 0 || p >= fock.n_orbitals || q >= fock.n_orbitals) {
    throw std::invalid_argument("excitation_operator: index out of range");
  }
  Mat e = Mat::Zero(fock.dimension(), fock.dimension());
  SparseColumns op = excitation_columns(fock, p, q);
  for (int j = 0; j < fock.dimension(); ++j) {
    for (const auto& [i, amp] : op.cols[j]) e(i, j) += amp;
  }
  return e;
}

Mat number_operator(const FockSpace& fock) {
  Mat n = Mat::Zero(fock.dimension(), fock.dimension());
  for (int j = 0; j < fock.dimension(); ++j) n(j, j) = std::popcount(fock.states[j]);
  return n;
}

Mat fock_hamiltonian_direct(const factorize::OneBodyTerm& one_body,
                            const toyscf::Tensor4& kappa, double constant,
                            const FockSpace& fock) {
  const int nb = fock.n_orbitals;
  const int dim = fock.dimension();
  if (one_body.h.rows() != nb || kappa.n != nb) {
    throw std::invalid_argument("fock_hamiltonian_direct: dimension mismatch");
  }

  std::vector<SparseColumns> e(nb * nb);
  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q) e[p * nb + q] = excitation_columns(fock, p, q);

  Mat h = Mat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) h(j, j) = constant;

  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q) {
      const cxd c = one_body.h_corrected(p, q);
      if (c == cxd(0.0, 0.0)) continue;
      for (int j = 0; j < dim; ++j) {
        for (const auto& [i, amp] : e[p * nb + q].cols[j]) h(i, j) += c * amp;
      }
    }

  // 1/2 sum kappa_pqrs E_qp E_rs
  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q) {
      const auto& left = e[q * nb + p];
      for (int r = 0; r < nb; ++r)
        for (int s = 0; s < nb; ++s) {
          const cxd c = 0.5 * kappa(p, q, r, s);
          if (c == cxd(0.0, 0.0)) continue;
          const auto& right = e[r * nb + s];
          for (int j = 0; j < dim; ++j) {
            for (const auto& [k, a1] : right.cols[j]) {
              for (const auto& [i, a2] : left.cols[k]) h(i, j) += c * (a1 * a2);
            }
          }
        }
    }
  return h;
}

namespace {

// columns of M = sum_pq X_pq E_pq for Hermitian X
std::vector<std::vector<std::pair<int, cxd>>> one_body_columns(
    const FockSpace& fock, const Mat& x) {
  const int nb = fock.n_orbitals;
  std::vector<std::map<int, cxd>> acc(fock.dimension());
  for (int p = 0; p < nb; ++p)
    for (int q = 0; q < nb; ++q) {
      if (x(p, q) == cxd(0.0, 0.0)) continue;
      SparseColumns op = excitation_columns(fock, p, q);
      for (int j = 0; j < fock.dimension(); ++j) {
        for (const auto& [i, amp] : op.cols[j]) acc[j][i] += x(p, q) * amp;
      }
    }
  std::vector<std::vector<std::pair<int, cxd>>> cols(fock.dimension());
  for (int j = 0; j < fock.dimension(); ++j) {
    cols[j].assign(acc[j].begin(), acc[j].end());
  }
  return cols;
}

void add_square(Mat& h, const FockSpace& fock, const Mat& x, double w) {
  if (w == 0.0) return;
  auto cols = one_body_columns(fock, x);
  for (int j = 0; j < fock.dimension(); ++j) {
    for (const auto& [k, a1] : cols[j]) {
      for (const auto& [i, a2] : cols[k]) h(i, j) += w * a1 * a2;
    }
  }
}

}  // namespace

Mat fock_hamiltonian_factored(const factorize::FactorizedHamiltonian& factors,
                              const FockSpace& fock) {
  const int nb = fock.n_orbitals;
  if (factors.n_b != nb) {
    throw std::invalid_argument("fock_hamiltonian_factored: dimension mismatch");
  }
  const int dim = fock.dimension();
  Mat h = Mat::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) h(j, j) = factors.constant;

  {
    auto cols = one_body_columns(fock, factors.one_body.h_corrected);
    for (int j = 0; j < dim; ++j) {
      for (const auto& [i, amp] : cols[j]) h(i, j) += amp;
    }
  }
  for (const auto& s : factors.soft) {
    add_square(h, fock, s.u * s.f.asDiagonal() * s.u.adjoint(), s.weight);
  }
  for (const auto& p : factors.paw) {
    add_square(h, fock, p.u * p.f.asDiagonal() * p.u.adjoint(), 0.5 * p.sign * p.eps);
  }
  return h;
}

Mat fock_rotation(const FockSpace& fock, const Mat& u) {
  if (unitarity_defect(u) > 1e-10) {
    throw std::invalid_argument("fock_rotation: input not unitary");
  }
  // u = W exp(i theta) W^dag  ->  generator K = W (i theta) W^dag
  Eigen::ComplexEigenSolver<Mat> es(u);
  Mat w = es.eigenvectors();
  Eigen::VectorXcd log_ev(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < log_ev.size(); ++i) {
    log_ev(i) = cxd(0.0, std::arg(es.eigenvalues()(i)));
  }
  Mat k = w * log_ev.asDiagonal() * w.inverse();

  auto cols = one_body_columns(fock, k);
  Mat kf = Mat::Zero(fock.dimension(), fock.dimension());
  for (int j = 0; j < fock.dimension(); ++j) {
    for (const auto& [i, amp] : cols[j]) kf(i, j) += amp;
  }
  // kf is anti-Hermitian; exponentiate through the Hermitian i*kf
  Eigen::SelfAdjointEigenSolver<Mat> hs(cxd(0.0, 1.0) * kf);
  Eigen::VectorXcd phase(hs.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) {
    phase(i) = std::exp(cxd(0.0, -hs.eigenvalues()(i)));
  }
  return hs.eigenvectors() * phase.asDiagonal() * hs.eigenvectors().adjoint();
}

BlockEncoding hermitian_block_encoding(const Mat& a, double alpha) {
  if (hermiticity_defect(a) > 1e-12) {
    throw std::invalid_argument("hermitian_block_encoding: A not Hermitian");
  }
  const int m = static_cast<int>(a.rows());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  const double norm2 = es.eigenvalues().cwiseAbs().maxCoeff();
  if (alpha < norm2) {
    throw std::invalid_argument("hermitian_block_encoding: subnormalization too small");
  }
  Eigen::VectorXd b_ev(m);
  for (int i = 0; i < m; ++i) {
    double x = 1.0 - std::pow(es.eigenvalues()(i) / alpha, 2);
    if (x < 0.0 && x > -1e-14) x = 0.0;
    b_ev(i) = std::sqrt(x);
  }
  Mat b = es.eigenvectors() * b_ev.asDiagonal() * es.eigenvectors().adjoint();

  BlockEncoding be;
  be.alpha = alpha;
  be.coding_dim = m;
  be.matrix.resize(2 * m, 2 * m);
  be.matrix.topLeftCorner(m, m) = a / alpha;
  be.matrix.topRightCorner(m, m) = b;
  be.matrix.bottomLeftCorner(m, m) = b;
  be.matrix.bottomRightCorner(m, m) = -a / alpha;
  if (unitarity_defect(be.matrix) > 1e-12) {
    throw std::runtime_error("hermitian_block_encoding: completion not unitary");
  }
  return be;
}

Mat chebyshev_square(const BlockEncoding& be) {
  const int m = be.coding_dim;
  Mat r = Mat::Identity(2 * m, 2 * m);
  r.bottomRightCorner(m, m) *= -1.0;
  Mat uru = be.matrix * r * be.matrix;
  const Mat a_over_alpha = be.matrix.topLeftCorner(m, m);
  const Mat expected = 2.0 * a_over_alpha * a_over_alpha - Mat::Identity(m, m);
  if ((uru.topLeftCorner(m, m) - expected).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::runtime_error("chebyshev_square: T2 identity violated");
  }
  return uru;
}

}  // namespace qpaw::besim
