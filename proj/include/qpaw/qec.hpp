#pragma once

#include <array>
#include <string>
#include <vector>

namespace qpaw::qec {

// Magic-state factory catalog entry. Footprints and cycle counts are
// externally sourced configuration, not derived constants; users can swap the
// catalog through the CLI.
struct FactorySpec {
  std::string name;
  double output_error = 0.0;
  long footprint_qubits = 0;
  double cycles_per_state = 0.0;  // code cycles per CCZ state
  std::array<int, 3> distances{0, 0, 0};  // d_X, d_Z, d_m
};

std::vector<FactorySpec> default_factory_catalog();

struct QecConfig {
  double p_phys = 1e-4;
  double p_thr = 0.01;
  double a_prefactor = 0.1;
  double p_fail_log = 0.009;
  double p_fail_msd = 0.001;
  int cycles_per_toffoli = 3;  // logical cycles consumed per Toffoli
  bool odd_distance_only = true;
  double cycle_time_s = 1e-6;
  std::vector<FactorySpec> factory_catalog = default_factory_catalog();
};

struct PhysicalResources {
  int code_distance = 0;
  long logical_tiles = 0;  // fast-block layout, 2n + ceil(sqrt(8n)) + 1
  int factories_count = 0;
  std::string factory_name;
  long factory_qubits = 0;
  long physical_qubits_total = 0;
  double runtime_cycles = 0.0;  // 3 N_Toff d code cycles
  double runtime_seconds = 0.0;
  double p_logical_total = 0.0;
  double p_msd_total = 0.0;
};

// Smallest (odd by default) d with
// A (p/p_thr)^((d+1)/2) <= p_fail_log / (3 N_Toff N_qubits).
int code_distance(const QecConfig& config, double n_toff, double n_qubits);

PhysicalResources physical_resources(const QecConfig& config, long logical_qubits,
                                     double n_toff);

}  // namespace qpaw::qec
