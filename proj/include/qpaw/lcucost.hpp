#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpaw/factorize.hpp"

namespace qpaw::lcucost {

struct CostConfig {
  int beth = 20;    // rotation bitlength
  int aleph = 10;   // keep-probability bitlength
  double eps_qpe = 1e-3;  // Hartree
  std::optional<long> kr; // forced QROAM parameter, power of 2
  // ancilla block for walk control, spare and flag qubits; kept in one place
  int control_overhead_qubits = 10;
};

struct LambdaReport {
  double lambda_total = 0.0;
  double lambda_one_body = 0.0;
  double lambda_two_body = 0.0;           // 1/4 sum xi + PAW term
  double lambda_two_body_factorwise = 0.0;  // per-factor accumulation
  std::array<RMat, 2> xi;                 // xi^{(j)}_pq
};

// Subnormalization components; throws if the two lambda_2 routes disagree
// beyond 1e-10 relative.
LambdaReport lambda_total(const factorize::FactorizedHamiltonian& factors);

struct GammaReport {
  long l_count = 0;         // L = N_pw + sum_a n_a (n_a + 1)/2
  long gamma_nominal = 0;   // L N_b^2 beth
  long gamma_nonzero = 0;   // surviving rotation columns x N_b x beth
};

GammaReport gamma_counts(const factorize::FactorizedHamiltonian& factors, int beth);

struct QroamCost {
  long toffolis = 0;
  long qubits = 0;
};

// ceil(L N_b / k_r) + N_b beth (k_r - 1) Toffolis,
// N_b beth k_r + ceil(log2(L N_b / k_r)) qubits; k_r must be a power of 2.
QroamCost qroam_cost(long l_count, long n_b, int beth, long kr);

long optimal_kr(long l_count, long n_b, int beth);

struct CostReport {
  LambdaReport lambda;
  GammaReport gamma;
  long kr_chosen = 1;
  QroamCost qroam;
  long iterations = 0;
  long toffoli_total = 0;
  long logical_qubits = 0;
  std::map<std::string, double> breakdown;
};

CostReport qpe_cost(const factorize::FactorizedHamiltonian& factors, const CostConfig& config);

// least-squares slope of log(y) vs log(x); needs >= 4 points
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace qpaw::lcucost
