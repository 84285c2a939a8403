#include "qpaw/upaw_radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qpaw::upaw {

namespace {

// ---- local polynomial interpolation of tabulated data ----

// value and first nderiv derivatives at r from a centered stencil
std::vector<double> interpolate_derivs(const RadialFunction& f, double r, int nderiv,
                                       int stencil = 0) {
  const int n = static_cast<int>(f.grid.size());
  const int k = stencil > 0 ? stencil : std::max(nderiv + 4, 8);
  if (n < k) throw std::invalid_argument("radial grid too small for interpolation");
  auto it = std::lower_bound(f.grid.begin(), f.grid.end(), r);
  int lo = static_cast<int>(it - f.grid.begin()) - k / 2;
  lo = std::clamp(lo, 0, n - k);

  // solve for coefficients of sum_j a_j (x - r)^j through the stencil
  RMat v(k, k);
  RVec y(k);
  for (int i = 0; i < k; ++i) {
    const double t = f.grid[lo + i] - r;
    double pw = 1.0;
    for (int j = 0; j < k; ++j) {
      v(i, j) = pw;
      pw *= t;
    }
    y(i) = f.values[lo + i];
  }
  RVec a = v.fullPivLu().solve(y);
  std::vector<double> out(nderiv + 1);
  double fact = 1.0;
  for (int i = 0; i <= nderiv; ++i) {
    out[i] = a(i) * fact;
    fact *= (i + 1);
  }
  return out;
}

double interpolate_value(const RadialFunction& f, double r) {
  // exact at grid nodes
  auto it = std::lower_bound(f.grid.begin(), f.grid.end(), r);
  if (it != f.grid.end() && *it == r) return f.values[it - f.grid.begin()];
  return interpolate_derivs(f, r, 0, 6)[0];
}

// ---- quadrature ----

// integral of the quadratic through (x0,y0),(x1,y1),(x2,y2) over [lo, hi]
double quad3(double x0, double x1, double x2, double y0, double y1, double y2,
             double lo, double hi) {
  auto antideriv = [&](double x) {
    // exact antiderivative of each Lagrange basis
    auto ibasis = [&](double xa, double xb, double denom) {
      // int (x-xa)(x-xb) dx = x^3/3 - (xa+xb) x^2/2 + xa xb x
      const double t = x;
      return (t * t * t / 3.0 - (xa + xb) * t * t / 2.0 + xa * xb * t) / denom;
    };
    return y0 * ibasis(x1, x2, (x0 - x1) * (x0 - x2)) +
           y1 * ibasis(x0, x2, (x1 - x0) * (x1 - x2)) +
           y2 * ibasis(x0, x1, (x2 - x0) * (x2 - x1));
  };
  return antideriv(hi) - antideriv(lo);
}

// composite Simpson generalized to non-uniform nodes
double simpson(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (y[0] + y[1]) * (x[1] - x[0]);
  double s = 0.0;
  int i = 0;
  for (; i + 2 < n; i += 2) {
    s += quad3(x[i], x[i + 1], x[i + 2], y[i], y[i + 1], y[i + 2], x[i], x[i + 2]);
  }
  if (i + 1 < n) {  // one interval left, integrate the last quadratic over it
    s += quad3(x[n - 3], x[n - 2], x[n - 1], y[n - 3], y[n - 2], y[n - 1], x[n - 2],
               x[n - 1]);
  }
  return s;
}

// integration nodes on [0, r_a]: origin, interior grid points, r_a
std::vector<double> inside_nodes(const RadialFunction& f, double r_a) {
  std::vector<double> x;
  x.push_back(0.0);
  for (double r : f.grid) {
    if (r > 0.0 && r < r_a) x.push_back(r);
  }
  x.push_back(r_a);
  return x;
}

std::vector<double> refine_midpoints(const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(2 * x.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.push_back(x[i]);
    out.push_back(0.5 * (x[i] + x[i + 1]));
  }
  out.push_back(x.back());
  return out;
}

// ---- polynomial helpers; exponent of coefficient k is e_k = K-1-k in r^2 ----

double poly_eval(const std::vector<double>& c, double r) {
  const double r2 = r * r;
  double acc = 0.0;
  for (double ck : c) acc = acc * r2 + ck;  // Horner in r^2, highest first
  return acc;
}

double monomial_deriv(int e2, int order, double r) {
  // d^order/dr^order of r^(2 e2)
  const int pw = 2 * e2;
  if (order > pw) return 0.0;
  double coeff = 1.0;
  for (int i = 0; i < order; ++i) coeff *= (pw - i);
  return coeff * std::pow(r, pw - order);
}

struct ChannelWork {
  const RadialFunction* ae = nullptr;
  std::vector<double> nodes;      // quadrature nodes in [0, r_a]
  std::vector<double> ae_inside;  // AE values on the nodes
  RVec c0;                        // particular solution of the boundary rows
  RMat nullspace;                 // K x M
  RVec c;                         // current coefficients
};

RVec channel_coeffs(const ChannelWork& w, const RVec& z) {
  return w.c0 + w.nullspace * z;
}

}  // namespace

std::vector<double> polynomial_derivatives(const ChannelFit& channel, double r, int n) {
  const int k = static_cast<int>(channel.coefficients.size());
  std::vector<double> out(n + 1, 0.0);
  for (int order = 0; order <= n; ++order) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      acc += channel.coefficients[j] * monomial_deriv(k - 1 - j, order, r);
    }
    out[order] = acc;
  }
  return out;
}

double pseudo_value(const ChannelFit& channel, const RadialFunction& ae, double r_a,
                    double r) {
  if (r >= r_a) return interpolate_value(ae, r);
  return poly_eval(channel.coefficients, r);
}

namespace {

// shared work for fitting and verification
struct Problem {
  const std::vector<RadialFunction>* ae;
  double r_a;
  int p_order;
  int m_count;
  int k;  // coefficients per channel
  std::vector<ChannelWork> work;
  std::vector<std::pair<int, int>> pairs;  // same-l channel pairs (i <= j)
  std::vector<double> targets;             // AE overlaps on [0, r_a]
  RMat gram;                               // shared monomial Gram matrix
  std::vector<RVec> ae_moments;            // per channel: quad(r^2 mono_k AE)
};

double overlap_quad(const std::vector<double>& x, const std::vector<double>& f,
                    const std::vector<double>& g) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * x[i] * f[i] * g[i];
  return simpson(x, y);
}

Problem setup_problem(const std::vector<RadialFunction>& ae, const FitOptions& opt) {
  if (ae.empty()) throw std::invalid_argument("fit_pseudo_radial: no channels");
  if (opt.p_order < 1) throw std::invalid_argument("fit_pseudo_radial: P must be >= 1");
  if (opt.m_count < 0) throw std::invalid_argument("fit_pseudo_radial: M must be >= 0");

  Problem pb;
  pb.ae = &ae;
  pb.r_a = opt.r_a;
  pb.p_order = opt.p_order;
  pb.m_count = opt.m_count;
  pb.k = opt.p_order + opt.m_count;

  for (const auto& ch : ae) {
    if (ch.grid.size() != ch.values.size() || ch.grid.size() < 8) {
      throw std::invalid_argument("fit_pseudo_radial: bad radial data");
    }
    for (std::size_t i = 1; i < ch.grid.size(); ++i) {
      if (!(ch.grid[i] > ch.grid[i - 1])) {
        throw std::invalid_argument("fit_pseudo_radial: grid not strictly increasing");
      }
    }
    if (!(opt.r_a > ch.grid.front() && opt.r_a < ch.grid.back())) {
      throw std::invalid_argument("fit_pseudo_radial: r_a outside grid range");
    }
  }

  // quadrature nodes are shared across channels only if grids match; keep one
  // set per channel for generality
  for (const auto& ch : ae) {
    ChannelWork w;
    w.ae = &ch;
    w.nodes = inside_nodes(ch, opt.r_a);
    w.ae_inside.resize(w.nodes.size());
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
      w.ae_inside[i] = interpolate_value(ch, w.nodes[i]);
    }
    pb.work.push_back(std::move(w));
  }

  // boundary rows: d^i poly(r_a) = d^i AE(r_a), i = 0..P-1
  for (auto& w : pb.work) {
    RMat b(opt.p_order, pb.k);
    for (int i = 0; i < opt.p_order; ++i)
      for (int j = 0; j < pb.k; ++j) b(i, j) = monomial_deriv(pb.k - 1 - j, i, opt.r_a);
    auto derivs = interpolate_derivs(*w.ae, opt.r_a, opt.p_order - 1);
    RVec rhs(opt.p_order);
    for (int i = 0; i < opt.p_order; ++i) rhs(i) = derivs[i];

    Eigen::CompleteOrthogonalDecomposition<RMat> cod(b);
    if (cod.rank() < opt.p_order) {
      throw std::runtime_error("fit_pseudo_radial: boundary constraints rank deficient");
    }
    w.c0 = cod.solve(rhs);
    Eigen::JacobiSVD<RMat> svd(b, Eigen::ComputeFullV);
    w.nullspace = svd.matrixV().rightCols(pb.k - opt.p_order);
    w.c = w.c0;
  }

  // same-l overlap constraints
  for (int i = 0; i < static_cast<int>(ae.size()); ++i)
    for (int j = i; j < static_cast<int>(ae.size()); ++j) {
      if (ae[i].l != ae[j].l) continue;
      pb.pairs.emplace_back(i, j);
      pb.targets.push_back(
          overlap_quad(pb.work[i].nodes, pb.work[i].ae_inside, pb.work[j].ae_inside));
    }

  // Gram matrix of the monomials on the first channel's nodes (grids are
  // expected to agree across channels of one augmentation sphere; cross
  // overlaps use channel i's nodes)
  const auto& nodes = pb.work[0].nodes;
  pb.gram = RMat::Zero(pb.k, pb.k);
  std::vector<std::vector<double>> mono(pb.k, std::vector<double>(nodes.size()));
  for (int j = 0; j < pb.k; ++j) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      mono[j][i] = std::pow(nodes[i] * nodes[i], pb.k - 1 - j);
    }
  }
  for (int a = 0; a < pb.k; ++a)
    for (int b = a; b < pb.k; ++b) {
      pb.gram(a, b) = overlap_quad(nodes, mono[a], mono[b]);
      pb.gram(b, a) = pb.gram(a, b);
    }
  for (auto& w : pb.work) {
    RVec mom(pb.k);
    for (int j = 0; j < pb.k; ++j) mom(j) = overlap_quad(w.nodes, mono[j], w.ae_inside);
    pb.ae_moments.push_back(mom);
  }
  return pb;
}

RVec constraint_values(const Problem& pb, const std::vector<RVec>& coeffs) {
  RVec g(pb.pairs.size());
  for (std::size_t t = 0; t < pb.pairs.size(); ++t) {
    const auto [i, j] = pb.pairs[t];
    g(t) = coeffs[i].dot(pb.gram * coeffs[j]) - pb.targets[t];
  }
  return g;
}

RMat constraint_jacobian(const Problem& pb, const std::vector<RVec>& coeffs) {
  const int m = pb.m_count;
  const int nch = static_cast<int>(pb.work.size());
  RMat jac = RMat::Zero(static_cast<int>(pb.pairs.size()), nch * m);
  for (std::size_t t = 0; t < pb.pairs.size(); ++t) {
    const auto [i, j] = pb.pairs[t];
    RVec gi = pb.work[i].nullspace.transpose() * (pb.gram * coeffs[j]);
    RVec gj = pb.work[j].nullspace.transpose() * (pb.gram * coeffs[i]);
    jac.block(static_cast<int>(t), i * m, 1, m) += gi.transpose();
    jac.block(static_cast<int>(t), j * m, 1, m) += gj.transpose();
  }
  return jac;
}

std::vector<RVec> coeffs_from_z(const Problem& pb, const RVec& z) {
  const int m = pb.m_count;
  std::vector<RVec> coeffs;
  for (std::size_t c = 0; c < pb.work.size(); ++c) {
    coeffs.push_back(channel_coeffs(pb.work[c], z.segment(static_cast<int>(c) * m, m)));
  }
  return coeffs;
}

// tail quadratic form over a fixed G grid above gmax
struct TailForm {
  RMat q;               // shared over channels
  std::vector<RVec> lin;  // per channel, from the outside part
  std::vector<double> constant;
};

TailForm tail_form(const Problem& pb, double gmax) {
  TailForm tf;
  const int k = pb.k;
  tf.q = RMat::Zero(k, k);
  const int ng = 64;
  const double dg = 2.0 * gmax / ng;

  // inside transform of each monomial, on the first channel's nodes
  const auto& nodes = pb.work[0].nodes;
  for (std::size_t c = 0; c < pb.work.size(); ++c) {
    tf.lin.push_back(RVec::Zero(k));
    tf.constant.push_back(0.0);
  }
  for (int ig = 1; ig <= ng; ++ig) {
    const double g = gmax + ig * dg;
    RVec s(k);
    for (int j = 0; j < k; ++j) {
      std::vector<double> y(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        y[i] = nodes[i] * std::pow(nodes[i] * nodes[i], k - 1 - j) * std::sin(g * nodes[i]);
      }
      s(j) = simpson(nodes, y);
    }
    const double w = dg * g * g;
    tf.q += w * (s * s.transpose());
    for (std::size_t c = 0; c < pb.work.size(); ++c) {
      const auto& ae = *pb.work[c].ae;
      std::vector<double> xs, ys;
      xs.push_back(pb.r_a);
      ys.push_back(pb.r_a * interpolate_value(ae, pb.r_a) * std::sin(g * pb.r_a));
      for (std::size_t i = 0; i < ae.grid.size(); ++i) {
        if (ae.grid[i] > pb.r_a) {
          xs.push_back(ae.grid[i]);
          ys.push_back(ae.grid[i] * ae.values[i] * std::sin(g * ae.grid[i]));
        }
      }
      const double outside = simpson(xs, ys);
      tf.lin[c] += w * outside * s;
      tf.constant[c] += w * outside * outside;
    }
  }
  return tf;
}

double tail_value(const TailForm& tf, const std::vector<RVec>& coeffs) {
  double t = 0.0;
  for (std::size_t c = 0; c < coeffs.size(); ++c) {
    t += coeffs[c].dot(tf.q * coeffs[c]) + 2.0 * tf.lin[c].dot(coeffs[c]) + tf.constant[c];
  }
  return t;
}

}  // namespace

PseudoRadialSetup fit_pseudo_radial(const std::vector<RadialFunction>& ae_channels,
                                    const FitOptions& opt) {
  Problem pb = setup_problem(ae_channels, opt);
  const int nch = static_cast<int>(pb.work.size());
  const int m = pb.m_count;
  const int nz = nch * m;

  // least-squares seed: closest even polynomial to the all-electron channel
  // inside r_a, subject to the boundary rows
  RVec z = RVec::Zero(nz);
  for (int c = 0; c < nch; ++c) {
    const auto& w = pb.work[c];
    if (m == 0) continue;
    RMat a = w.nullspace.transpose() * pb.gram * w.nullspace;
    RVec rhs = w.nullspace.transpose() * (pb.ae_moments[c] - pb.gram * w.c0);
    z.segment(c * m, m) = a.ldlt().solve(rhs);
  }

  auto coeffs = coeffs_from_z(pb, z);
  RVec g = constraint_values(pb, coeffs);

  // damped Newton with minimum-norm steps
  int iter = 0;
  while (g.cwiseAbs().maxCoeff() > 1e-13 && iter < opt.max_iter && nz > 0) {
    RMat jac = constraint_jacobian(pb, coeffs);
    RVec dz = jac.completeOrthogonalDecomposition().solve(-g);
    double step = 1.0;
    const double g0 = g.norm();
    for (int back = 0; back < 40; ++back) {
      auto trial = coeffs_from_z(pb, z + step * dz);
      RVec gt = constraint_values(pb, trial);
      if (gt.norm() < g0) {
        z += step * dz;
        coeffs = std::move(trial);
        g = std::move(gt);
        break;
      }
      step *= 0.5;
      if (back == 39) iter = opt.max_iter;  // stagnated
    }
    ++iter;
  }

  if (g.size() > 0 && g.cwiseAbs().maxCoeff() > opt.tol) {
    std::ostringstream os;
    os << "fit_pseudo_radial: infeasible constraint system, max overlap residual "
       << g.cwiseAbs().maxCoeff() << " after " << iter << " iterations";
    throw std::runtime_error(os.str());
  }

  // optional tail minimization on the constraint manifold
  if (opt.gmax && nz > 0) {
    TailForm tf = tail_form(pb, *opt.gmax);
    double best = tail_value(tf, coeffs);
    RVec zbest = z;
    for (int it = 0; it < 60; ++it) {
      RMat jac = constraint_jacobian(pb, coeffs);
      RVec grad = RVec::Zero(nz);
      RMat hess = RMat::Zero(nz, nz);
      for (int c = 0; c < nch; ++c) {
        const auto& w = pb.work[c];
        grad.segment(c * m, m) =
            2.0 * w.nullspace.transpose() * (tf.q * coeffs[c] + tf.lin[c]);
        hess.block(c * m, c * m, m, m) =
            2.0 * w.nullspace.transpose() * tf.q * w.nullspace;
      }
      const int nc = static_cast<int>(pb.pairs.size());
      RMat kkt = RMat::Zero(nz + nc, nz + nc);
      kkt.topLeftCorner(nz, nz) = hess + 1e-12 * RMat::Identity(nz, nz);
      kkt.topRightCorner(nz, nc) = jac.transpose();
      kkt.bottomLeftCorner(nc, nz) = jac;
      RVec rhs(nz + nc);
      rhs.head(nz) = -grad;
      rhs.tail(nc) = -g;
      RVec sol = kkt.fullPivLu().solve(rhs);
      RVec dz = sol.head(nz);
      double step = 1.0;
      bool accepted = false;
      for (int back = 0; back < 25; ++back) {
        auto trial = coeffs_from_z(pb, z + step * dz);
        RVec gt = constraint_values(pb, trial);
        const double tv = tail_value(tf, trial);
        if (gt.cwiseAbs().maxCoeff() < 10.0 * opt.tol && tv < best) {
          z += step * dz;
          coeffs = std::move(trial);
          g = std::move(gt);
          best = tv;
          zbest = z;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted || dz.norm() < 1e-14) break;
    }
    // re-polish feasibility after the objective phase
    z = zbest;
    coeffs = coeffs_from_z(pb, z);
    g = constraint_values(pb, coeffs);
    for (int it = 0; it < 50 && g.cwiseAbs().maxCoeff() > 1e-13; ++it) {
      RMat jac = constraint_jacobian(pb, coeffs);
      RVec dz = jac.completeOrthogonalDecomposition().solve(-g);
      z += dz;
      coeffs = coeffs_from_z(pb, z);
      g = constraint_values(pb, coeffs);
    }
  }

  PseudoRadialSetup setup;
  setup.r_a = opt.r_a;
  setup.p_order = opt.p_order;
  setup.m_count = opt.m_count;
  for (int c = 0; c < nch; ++c) {
    ChannelFit ch;
    ch.l = ae_channels[c].l;
    ch.coefficients.assign(coeffs[c].data(), coeffs[c].data() + pb.k);
    setup.channels.push_back(std::move(ch));
  }

  VerifyReport check = verify_setup(setup, ae_channels, opt.tol);
  setup.overlap_diff = check.overlap_residuals;
  setup.residuals = check.boundary_residuals;
  for (Eigen::Index i = 0; i < check.overlap_residuals.rows(); ++i)
    for (Eigen::Index j = i; j < check.overlap_residuals.cols(); ++j) {
      setup.residuals.push_back(std::abs(check.overlap_residuals(i, j)));
    }
  setup.max_residual = check.max_residual;
  setup.converged = check.pass;
  if (opt.gmax) setup.fourier_tail = fourier_tail(setup, ae_channels, *opt.gmax);
  return setup;
}

VerifyReport verify_setup(const PseudoRadialSetup& setup,
                          const std::vector<RadialFunction>& ae_channels, double tol) {
  const int nch = static_cast<int>(ae_channels.size());
  if (static_cast<int>(setup.channels.size()) != nch) {
    throw std::invalid_argument("verify_setup: channel count mismatch");
  }
  VerifyReport rep;
  rep.tol = tol;
  rep.overlap_residuals = RMat::Zero(nch, nch);

  for (int c = 0; c < nch; ++c) {
    auto derivs = interpolate_derivs(ae_channels[c], setup.r_a, setup.p_order - 1,
                                     setup.p_order + 6);
    auto poly = polynomial_derivatives(setup.channels[c], setup.r_a, setup.p_order - 1);
    double worst = 0.0;
    for (int i = 0; i < setup.p_order; ++i) {
      worst = std::max(worst, std::abs(poly[i] - derivs[i]));
    }
    rep.boundary_residuals.push_back(worst);
  }

  for (int i = 0; i < nch; ++i)
    for (int j = i; j < nch; ++j) {
      if (ae_channels[i].l != ae_channels[j].l) continue;
      auto nodes = refine_midpoints(inside_nodes(ae_channels[i], setup.r_a));
      std::vector<double> pi(nodes.size()), pj(nodes.size()), ai(nodes.size()),
          aj(nodes.size());
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        pi[n] = poly_eval(setup.channels[i].coefficients, nodes[n]);
        pj[n] = poly_eval(setup.channels[j].coefficients, nodes[n]);
        ai[n] = interpolate_value(ae_channels[i], nodes[n]);
        aj[n] = interpolate_value(ae_channels[j], nodes[n]);
      }
      const double diff = overlap_quad(nodes, pi, pj) - overlap_quad(nodes, ai, aj);
      rep.overlap_residuals(i, j) = diff;
      rep.overlap_residuals(j, i) = diff;
    }

  rep.max_residual = 0.0;
  for (double b : rep.boundary_residuals) rep.max_residual = std::max(rep.max_residual, b);
  rep.max_residual =
      std::max(rep.max_residual, rep.overlap_residuals.cwiseAbs().maxCoeff());
  rep.pass = rep.max_residual <= tol;
  return rep;
}

double fourier_tail(const PseudoRadialSetup& setup,
                    const std::vector<RadialFunction>& ae_channels, double gmax) {
  const int ng = 64;
  const double dg = 2.0 * gmax / ng;
  double total = 0.0;
  for (std::size_t c = 0; c < ae_channels.size(); ++c) {
    const auto& ae = ae_channels[c];
    std::vector<double> xs;
    xs.push_back(0.0);
    for (double r : ae.grid) {
      if (r > 0.0) xs.push_back(r);
    }
    for (int ig = 1; ig <= ng; ++ig) {
      const double g = gmax + ig * dg;
      std::vector<double> ys(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        ys[i] = xs[i] * pseudo_value(setup.channels[c], ae, setup.r_a, xs[i]) *
                std::sin(g * xs[i]);
      }
      const double b = simpson(xs, ys);
      total += dg * g * g * b * b;
    }
  }
  return total;
}

}  // namespace qpaw::upaw
