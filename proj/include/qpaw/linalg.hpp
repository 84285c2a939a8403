#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qpaw {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline double hermiticity_defect(const Mat& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

struct HermitianEig {
  RVec values;  // sorted by descending |value|
  Mat vectors;  // columns, phase-fixed
};

// Hermitian eigendecomposition with the deterministic conventions used for
// factor storage: eigenvalues ordered by descending magnitude (stable on
// ties), each eigenvector scaled so its largest-magnitude component is real
// positive.
inline HermitianEig hermitian_eig_desc(const Mat& a, double herm_tol = 1e-10) {
  if (hermiticity_defect(a) > herm_tol) {
    throw std::invalid_argument("hermitian_eig_desc: input not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig_desc: eigensolver failed");
  }
  const auto n = a.rows();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(j));
  });
  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.values(c) = es.eigenvalues()(order[c]);
    Eigen::VectorXcd v = es.eigenvectors().col(order[c]);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (std::abs(v(imax)) > 0.0) v *= std::conj(v(imax)) / std::abs(v(imax));
    out.vectors.col(c) = v;
  }
  return out;
}

inline double unitarity_defect(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace qpaw
