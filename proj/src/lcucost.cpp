#include "qpaw/lcucost.hpp"

#include <cmath>
#include <stdexcept>

namespace qpaw::lcucost {

namespace {

constexpr double kFloor = 1e-10;

long ceil_log2(long x) {
  long b = 0;
  while ((1L << b) < x) ++b;
  return b;
}

long ceil_div(long a, long b) { return (a + b - 1) / b; }

}  // namespace

LambdaReport lambda_total(const factorize::FactorizedHamiltonian& factors) {
  if (factors.one_body.eps_prime.size() == 0) {
    throw std::invalid_argument("lambda_total: one-body spectrum missing");
  }
  const int nb = factors.n_b;
  LambdaReport rep;
  rep.lambda_one_body = factors.one_body.eps_prime.cwiseAbs().sum();
  rep.xi = {RMat::Zero(nb, nb), RMat::Zero(nb, nb)};

  double paw_term = 0.0;
  double factorwise = 0.0;
  for (const auto& s : factors.soft) {
    if (s.g2 <= 0.0) continue;  // xi runs over G > 0
    const RVec fabs = s.f.cwiseAbs();
    rep.xi[s.j] += (8.0 * M_PI / (factors.volume * s.g2)) * (fabs * fabs.transpose());
    factorwise += 0.5 * s.weight * fabs.sum() * fabs.sum();
  }
  for (const auto& p : factors.paw) {
    const double l1 = p.f.cwiseAbs().sum();
    paw_term += 0.5 * p.eps * l1 * l1;
  }
  const double xi_quarter = 0.25 * (rep.xi[0].sum() + rep.xi[1].sum());
  rep.lambda_two_body = xi_quarter + paw_term;
  rep.lambda_two_body_factorwise = factorwise + paw_term;

  const double scale = std::max({std::abs(rep.lambda_two_body),
                                 std::abs(rep.lambda_two_body_factorwise), 1e-300});
  if (std::abs(rep.lambda_two_body - rep.lambda_two_body_factorwise) / scale > 1e-10) {
    throw std::runtime_error("lambda_total: dual-path lambda_2 disagreement");
  }
  rep.lambda_total = rep.lambda_one_body + rep.lambda_two_body;
  return rep;
}

GammaReport gamma_counts(const factorize::FactorizedHamiltonian& factors, int beth) {
  GammaReport g;
  g.l_count = factors.n_pw_pair + static_cast<long>(factors.paw.size());
  g.gamma_nominal = g.l_count * static_cast<long>(factors.n_b) * factors.n_b * beth;

  long columns = 0;
  for (const auto& s : factors.soft) {
    for (Eigen::Index i = 0; i < s.f.size(); ++i) {
      if (std::abs(s.f(i)) > kFloor) ++columns;
    }
  }
  for (const auto& p : factors.paw) {
    if (p.eps <= kFloor) continue;
    for (Eigen::Index i = 0; i < p.f.size(); ++i) {
      if (std::abs(p.f(i)) > kFloor) ++columns;
    }
  }
  g.gamma_nonzero = columns * static_cast<long>(factors.n_b) * beth;
  return g;
}

QroamCost qroam_cost(long l_count, long n_b, int beth, long kr) {
  if (kr < 1 || (kr & (kr - 1)) != 0) {
    throw std::invalid_argument("qroam_cost: k_r must be a power of 2");
  }
  const long items = l_count * n_b;
  QroamCost c;
  c.toffolis = ceil_div(items, kr) + n_b * static_cast<long>(beth) * (kr - 1);
  c.qubits = n_b * static_cast<long>(beth) * kr + ceil_log2(ceil_div(items, kr));
  return c;
}

long optimal_kr(long l_count, long n_b, int beth) {
  long best_kr = 1;
  long best = qroam_cost(l_count, n_b, beth, 1).toffolis;
  for (long kr = 2; kr <= l_count * n_b; kr *= 2) {
    const long t = qroam_cost(l_count, n_b, beth, kr).toffolis;
    if (t < best) {
      best = t;
      best_kr = kr;
    }
  }
  return best_kr;
}

CostReport qpe_cost(const factorize::FactorizedHamiltonian& factors, const CostConfig& config) {
  if (!(config.eps_qpe > 0.0)) throw std::invalid_argument("qpe_cost: eps_qpe must be > 0");
  if (config.beth < 1 || config.aleph < 1) {
    throw std::invalid_argument("qpe_cost: bitlengths must be >= 1");
  }
  CostReport rep;
  rep.lambda = lambda_total(factors);
  rep.gamma = gamma_counts(factors, config.beth);

  const long nb = factors.n_b;
  rep.kr_chosen = config.kr ? *config.kr : optimal_kr(rep.gamma.l_count, nb, config.beth);
  rep.qroam = qroam_cost(rep.gamma.l_count, nb, config.beth, rep.kr_chosen);

  rep.iterations = static_cast<long>(
      std::ceil(M_PI * rep.lambda.lambda_total / (2.0 * config.eps_qpe)));
  if (rep.iterations < 1) rep.iterations = 1;

  const long rotations = 2L * 4L * nb * (config.beth - 2);
  const long prep = rep.gamma.l_count + (1L << ceil_log2(rep.gamma.l_count)) + 1;
  const long per_iteration = 2 * rep.qroam.toffolis + rotations + prep;
  rep.toffoli_total = rep.iterations * per_iteration;

  const long log_l = ceil_log2(rep.gamma.l_count);
  const long log_iter = ceil_log2(rep.iterations);
  rep.logical_qubits = 2 * nb + rep.qroam.qubits + log_l + config.aleph + log_iter +
                       config.control_overhead_qubits;

  rep.breakdown["iterations"] = static_cast<double>(rep.iterations);
  rep.breakdown["per_iteration_toffolis"] = static_cast<double>(per_iteration);
  rep.breakdown["qroam_load_unload"] = static_cast<double>(2 * rep.qroam.toffolis);
  rep.breakdown["rotation_layers"] = static_cast<double>(rotations);
  rep.breakdown["state_preparation"] = static_cast<double>(prep - 1);
  rep.breakdown["sign_output_bit"] = 1.0;
  rep.breakdown["qubits_system"] = static_cast<double>(2 * nb);
  rep.breakdown["qubits_qroam"] = static_cast<double>(rep.qroam.qubits);
  rep.breakdown["qubits_l_index"] = static_cast<double>(log_l);
  rep.breakdown["qubits_keep_prob"] = static_cast<double>(config.aleph);
  rep.breakdown["qubits_phase"] = static_cast<double>(log_iter);
  rep.breakdown["qubits_control"] = static_cast<double>(config.control_overhead_qubits);
  return rep;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw std::invalid_argument("fit_loglog_slope: need >= 4 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_loglog_slope: nonpositive point");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qpaw::lcucost
