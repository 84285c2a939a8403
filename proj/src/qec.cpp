#include "qpaw/qec.hpp"

#include <cmath>
#include <stdexcept>

namespace qpaw::qec {

std::vector<FactorySpec> default_factory_catalog() {
  // CCZ gate-synthillation factories in the style of the standard
  // surface-code factory tables, sized for p_phys = 1e-4.
  return {
      {"(15-to-1)_(9,3,3)", 9.3e-10, 1150, 18.1, {9, 3, 3}},
      {"(15-to-1)_(9,3,3) x (8-to-CCZ)_(15,7,9)", 3.0e-14, 12400, 36.1, {15, 7, 9}},
      {"(15-to-1)^4_(9,3,3) x (8-to-CCZ)_(25,9,9)", 5.5e-20, 47000, 36.1, {25, 9, 9}},
      {"(15-to-1)_(17,7,7) x (8-to-CCZ)_(35,13,15)", 1.0e-24, 108000, 50.0, {35, 13, 15}},
  };
}

int code_distance(const QecConfig& config, double n_toff, double n_qubits) {
  if (!(n_toff > 0.0) || !(n_qubits > 0.0)) {
    throw std::invalid_argument("code_distance: inputs must be positive");
  }
  if (config.p_phys >= config.p_thr) {
    throw std::invalid_argument("code_distance: below threshold required (p_phys < p_thr)");
  }
  const double budget = config.p_fail_log / (3.0 * n_toff * n_qubits);
  const double ratio = config.p_phys / config.p_thr;
  const int step = config.odd_distance_only ? 2 : 1;
  for (int d = 1; d < 10000; d += step) {
    if (config.a_prefactor * std::pow(ratio, 0.5 * (d + 1)) <= budget) return d;
  }
  throw std::runtime_error("code_distance: no feasible distance below 10000");
}

PhysicalResources physical_resources(const QecConfig& config, long logical_qubits,
                                     double n_toff) {
  if (logical_qubits < 1 || !(n_toff > 0.0)) {
    throw std::invalid_argument("physical_resources: inputs must be positive");
  }
  PhysicalResources r;
  r.code_distance = code_distance(config, n_toff, static_cast<double>(logical_qubits));

  const double q = static_cast<double>(logical_qubits);
  r.logical_tiles = 2 * logical_qubits +
                    static_cast<long>(std::ceil(std::sqrt(8.0 * q))) + 1;

  // cheapest factory meeting the distillation error budget
  const double target = config.p_fail_msd / n_toff;
  const FactorySpec* chosen = nullptr;
  const FactorySpec* best_available = nullptr;
  for (const auto& f : config.factory_catalog) {
    if (!best_available || f.output_error < best_available->output_error) best_available = &f;
    if (f.output_error <= target) {
      if (!chosen || f.footprint_qubits < chosen->footprint_qubits) chosen = &f;
    }
  }
  if (!chosen) {
    std::string best = best_available ? best_available->name : "(empty catalog)";
    throw std::runtime_error(
        "physical_resources: no catalog factory meets output error <= " +
        std::to_string(target) + "; best available: " + best);
  }
  r.factory_name = chosen->name;

  // one CCZ state must be ready every cycles_per_toffoli logical cycles
  const double logical_cycles_per_state = chosen->cycles_per_state / r.code_distance;
  r.factories_count = static_cast<int>(
      std::ceil(logical_cycles_per_state / config.cycles_per_toffoli));
  if (r.factories_count < 1) r.factories_count = 1;
  r.factory_qubits = static_cast<long>(r.factories_count) * chosen->footprint_qubits;

  const long d = r.code_distance;
  r.physical_qubits_total = (2 * d * d - 1) * r.logical_tiles + r.factory_qubits;
  r.runtime_cycles = 3.0 * n_toff * static_cast<double>(d);
  r.runtime_seconds = r.runtime_cycles * config.cycle_time_s;

  r.p_logical_total = 3.0 * n_toff * static_cast<double>(logical_qubits) *
                      config.a_prefactor *
                      std::pow(config.p_phys / config.p_thr, 0.5 * (d + 1));
  r.p_msd_total = n_toff * chosen->output_error;
  return r;
}

}  // namespace qpaw::qec
