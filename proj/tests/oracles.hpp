#pragma once

// Independent reference routines used only by tests. These deliberately avoid
// the library code paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// count of Miller triples with |G|^2/2 <= cutoff, plain bounding-box loop
inline long count_gvectors(const Eigen::Matrix3d& lattice, double cutoff_ha, int box) {
  const Eigen::Matrix3d b = 2.0 * M_PI * lattice.inverse().transpose();
  long n = 0;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j)
      for (int k = -box; k <= box; ++k) {
        const Eigen::Vector3d g =
            i * b.row(0).transpose() + j * b.row(1).transpose() + k * b.row(2).transpose();
        if (0.5 * g.squaredNorm() <= cutoff_ha) ++n;
      }
  return n;
}

// real-space integral of the spherically truncated Coulomb kernel over the
// equal-volume sphere, by midpoint quadrature
inline double truncated_kernel_g0(double volume, int n_steps = 200000) {
  const double rc = std::cbrt(3.0 * volume / (4.0 * M_PI));
  const double h = rc / n_steps;
  double acc = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    const double r = (i + 0.5) * h;
    acc += 4.0 * M_PI * r * r / r * h;
  }
  return acc / volume;
}

// cyclic Jacobi eigenvalues for a Hermitian matrix, ascending
inline Eigen::VectorXd jacobi_eigenvalues(Mat a, int max_sweeps = 60) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off < 1e-14) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const cxd apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // phase-align the pivot, then a real Jacobi rotation:
        // U = diag(1, e^{-i phi}) * [[c, -s], [s, c]]
        const double phi = std::arg(apq);
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const cxd em = std::exp(cxd(0.0, -phi));
        const cxd ep = std::conj(em);
        for (int k = 0; k < n; ++k) {  // A <- A U
          const cxd akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp + s * em * akq;
          a(k, q) = -s * akp + c * em * akq;
        }
        for (int k = 0; k < n; ++k) {  // A <- U^dag A
          const cxd apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + s * ep * aqk;
          a(q, k) = -s * apk + c * ep * aqk;
        }
      }
  }
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev(i) = a(i, i).real();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

// Gauss-Legendre quadrature of f on [a, b]
template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels = 64) {
  // 5-point rule per panel
  static const double xs[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                               0.538469310105683, 0.906179845938664};
  static const double ws[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                               0.478628670499366, 0.236926885056189};
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    for (int i = 0; i < 5; ++i) acc += 0.5 * h * ws[i] * f(mid + 0.5 * h * xs[i]);
  }
  return acc;
}

}  // namespace oracles
