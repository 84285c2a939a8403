#pragma once

#include <string>

#include <json.hpp>

#include "qpaw/factorize.hpp"
#include "qpaw/toyscf.hpp"

namespace qpaw::io {

using nlohmann::json;

// Instance schema (version 1): complex matrices as parallel re/im row-major
// arrays; pair densities either explicit per half-space G or derived from
// stored orbitals.
json instance_to_json(const toyscf::HamiltonianInstance& instance);
toyscf::HamiltonianInstance instance_from_json(const json& j);

toyscf::HamiltonianInstance ingest(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// canonical serialization used for round-trips and checksums
std::string dump_canonical(const json& j);

json factors_to_json(const factorize::FactorizedHamiltonian& factors);
factorize::FactorizedHamiltonian factors_from_json(const json& j);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace qpaw::io
