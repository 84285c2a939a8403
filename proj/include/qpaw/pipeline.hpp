#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "qpaw/lcucost.hpp"
#include "qpaw/qec.hpp"
#include "qpaw/toyscf.hpp"

namespace qpaw::pipeline {

struct PipelineConfig {
  std::string instance_path;
  double delta = 0.0;
  lcucost::CostConfig cost;
  bool verify = false;     // run the Fock-space identity suite inline
  bool with_qec = false;
  qec::QecConfig qec_config;
};

// ingest -> factorize -> truncate -> lambda/Gamma -> QPE cost [-> QEC]
// [-> identity suite]; the report embeds the config and input checksum.
nlohmann::json run_pipeline(const PipelineConfig& config);

// full command-line front end; returns the process exit code
// (0 success, 1 invariant failure, 2 usage error)
int run_cli(int argc, char** argv);

}  // namespace qpaw::pipeline
