#pragma once

#include <optional>
#include <vector>

#include "qpaw/linalg.hpp"

namespace qpaw::upaw {

// Radial factor of a partial wave phi = values(r) * Y_lm; overlaps carry the
// r^2 weight.
struct RadialFunction {
  std::vector<double> grid;    // Bohr, strictly increasing
  std::vector<double> values;
  int l = 0;
};

// Even polynomial R(r) = sum_p c_p (r^2)^(P+M-1-p) inside the augmentation
// sphere; identical to the all-electron channel outside.
struct ChannelFit {
  int l = 0;
  std::vector<double> coefficients;  // length P + M, highest power first
};

struct FitOptions {
  double r_a = 1.0;
  int p_order = 2;   // matched boundary derivatives 0 .. P-1
  int m_count = 1;   // coefficients allocated to the overlap constraints
  std::optional<double> gmax;  // enables the Fourier-tail penalty
  double tol = 1e-8;
  int max_iter = 200;
};

struct PseudoRadialSetup {
  double r_a = 0.0;
  int p_order = 0;
  int m_count = 0;
  std::vector<ChannelFit> channels;
  RMat overlap_diff;              // O_ij = <pseudo_i|pseudo_j> - <ae_i|ae_j>
  std::vector<double> residuals;  // boundary residuals then overlap residuals
  double max_residual = 0.0;
  double fourier_tail = 0.0;      // tail metric when gmax was given
  bool converged = false;
};

// Constrained fit: boundary rows eliminated exactly, overlap constraints
// solved by damped Newton from a least-squares seed; optional tail-metric
// minimization on the constraint manifold.
PseudoRadialSetup fit_pseudo_radial(const std::vector<RadialFunction>& ae_channels,
                                    const FitOptions& options);

struct VerifyReport {
  std::vector<double> boundary_residuals;  // per channel, max over orders
  RMat overlap_residuals;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Recomputes every constraint residual on a 2x-density quadrature grid.
VerifyReport verify_setup(const PseudoRadialSetup& setup,
                          const std::vector<RadialFunction>& ae_channels,
                          double tol = 1e-8);

// Piecewise pseudo channel: polynomial inside r_a, all-electron data outside.
double pseudo_value(const ChannelFit& channel, const RadialFunction& ae, double r_a,
                    double r);

// sum_{G > gmax} G^2 |b(G)|^2 with b the l=0 transform of r * pseudo(r),
// summed over channels on a fixed tail grid.
double fourier_tail(const PseudoRadialSetup& setup,
                    const std::vector<RadialFunction>& ae_channels, double gmax);

// Evaluates the inside polynomial and its first n derivatives at r.
std::vector<double> polynomial_derivatives(const ChannelFit& channel, double r, int n);

}  // namespace qpaw::upaw
