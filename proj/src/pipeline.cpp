#include "qpaw/pipeline.hpp"

#include <CLI11.hpp>
#include <iostream>

#include "qpaw/besim.hpp"
#include "qpaw/downsample.hpp"
#include "qpaw/factorize.hpp"
#include "qpaw/instance_io.hpp"
#include "qpaw/scaling.hpp"
#include "qpaw/units.hpp"
#include "qpaw/upaw_radial.hpp"

namespace qpaw::pipeline {

using nlohmann::json;

namespace {

json lambda_to_json(const lcucost::LambdaReport& rep) {
  json j;
  j["lambda_total_ha"] = rep.lambda_total;
  j["lambda_one_body_ha"] = rep.lambda_one_body;
  j["lambda_two_body_ha"] = rep.lambda_two_body;
  j["lambda_two_body_factorwise_ha"] = rep.lambda_two_body_factorwise;
  j["xi_sum_j0"] = rep.xi[0].sum();
  j["xi_sum_j1"] = rep.xi[1].sum();
  j["xi_max"] = std::max(rep.xi[0].cwiseAbs().maxCoeff(), rep.xi[1].cwiseAbs().maxCoeff());
  return j;
}

json cost_to_json(const lcucost::CostReport& rep) {
  json j;
  j["lambda"] = lambda_to_json(rep.lambda);
  j["l_count"] = rep.gamma.l_count;
  j["gamma_nominal_bits"] = rep.gamma.gamma_nominal;
  j["gamma_nonzero_bits"] = rep.gamma.gamma_nonzero;
  j["kr_chosen"] = rep.kr_chosen;
  j["qroam_toffolis"] = rep.qroam.toffolis;
  j["qroam_qubits"] = rep.qroam.qubits;
  j["iterations"] = rep.iterations;
  j["toffoli_total"] = rep.toffoli_total;
  j["logical_qubits"] = rep.logical_qubits;
  j["breakdown"] = rep.breakdown;
  return j;
}

json qec_to_json(const qec::PhysicalResources& r) {
  json j;
  j["code_distance"] = r.code_distance;
  j["logical_tiles"] = r.logical_tiles;
  j["factories_count"] = r.factories_count;
  j["factory_name"] = r.factory_name;
  j["factory_qubits"] = r.factory_qubits;
  j["physical_qubits_total"] = r.physical_qubits_total;
  j["runtime_cycles"] = r.runtime_cycles;
  j["runtime_seconds"] = r.runtime_seconds;
  j["p_logical_total"] = r.p_logical_total;
  j["p_msd_total"] = r.p_msd_total;
  return j;
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["instance"] = c.instance_path;
  j["delta"] = c.delta;
  j["eps_qpe_ha"] = c.cost.eps_qpe;
  j["beth"] = c.cost.beth;
  j["aleph"] = c.cost.aleph;
  if (c.cost.kr) j["kr"] = *c.cost.kr;
  j["verify"] = c.verify;
  j["with_qec"] = c.with_qec;
  return j;
}

// Fock-space identity suite on a desk-scale instance
json verify_instance(const toyscf::HamiltonianInstance& inst,
                     const factorize::FactorizedHamiltonian& factors) {
  json j;
  const int nb = inst.n_b();
  if (nb > 6) {
    throw std::runtime_error("verify: instance too large for the identity suite (N_b <= 6)");
  }
  toyscf::Tensor4 kappa = toyscf::kappa_oracle(inst);
  toyscf::Tensor4 rebuilt = factorize::reconstruct_kappa(factors);
  double kdev = 0.0;
  for (std::size_t i = 0; i < kappa.a.size(); ++i) {
    kdev = std::max(kdev, std::abs(kappa.a[i] - rebuilt.a[i]));
  }
  j["kappa_max_deviation"] = kdev;

  const int n_elec = std::min(4, nb);
  auto fock = besim::FockSpace::fixed_n(nb, n_elec - n_elec % 2);
  factorize::OneBodyTerm ob = factorize::effective_one_body(inst.h, kappa);
  Mat hd = besim::fock_hamiltonian_direct(ob, kappa, inst.constant, fock);
  Mat hf = besim::fock_hamiltonian_factored(factors, fock);
  const double fdev = (hd - hf).cwiseAbs().maxCoeff();
  j["fock_identity_max_deviation"] = fdev;
  j["fock_dimension"] = fock.dimension();

  lcucost::LambdaReport lam = lcucost::lambda_total(factors);
  Eigen::SelfAdjointEigenSolver<Mat> es(hd);
  const double half_width =
      0.5 * (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
  j["lambda_total_ha"] = lam.lambda_total;
  j["fock_half_width_ha"] = half_width;
  j["lambda_bounds_half_width"] = lam.lambda_total >= half_width;

  j["pass"] = kdev <= 1e-10 && fdev <= 1e-9 && lam.lambda_total >= half_width;
  return j;
}

}  // namespace

json run_pipeline(const PipelineConfig& config) {
  json report;
  report["config"] = config_to_json(config);

  std::string stage = "ingest";
  try {
    const std::string bytes = io::read_file(config.instance_path);
    report["input_checksum_fnv1a"] = io::fnv1a_hex(bytes);
    toyscf::HamiltonianInstance inst = io::instance_from_json(json::parse(bytes));
    report["instance"]["n_b"] = inst.n_b();
    report["instance"]["n_pw"] = inst.basis.size();
    report["instance"]["n_pw_pair"] = inst.pair_density.grid.size();
    report["instance"]["n_paw_blocks"] = inst.paw_blocks.size();
    report["instance"]["volume_bohr3"] = inst.cell.volume();

    stage = "factorize";
    factorize::FactorizedHamiltonian factors = factorize::factorize_instance(inst);

    stage = "truncate";
    factors = factorize::truncate(factors, config.delta);
    report["truncation"]["delta"] = config.delta;
    report["truncation"]["surviving_parameters"] = factors.surviving_parameters;

    stage = "estimate";
    lcucost::CostReport cost = lcucost::qpe_cost(factors, config.cost);
    report["cost"] = cost_to_json(cost);

    bool ok = true;
    if (config.with_qec) {
      stage = "qec";
      auto phys = qec::physical_resources(config.qec_config, cost.logical_qubits,
                                          static_cast<double>(cost.toffoli_total));
      report["qec"] = qec_to_json(phys);
    }
    if (config.verify) {
      stage = "verify";
      report["verify"] = verify_instance(inst, factors);
      ok = ok && report["verify"]["pass"].get<bool>();
    }
    report["pass"] = ok;
  } catch (const std::exception& e) {
    throw std::runtime_error("stage '" + stage + "': " + e.what());
  }
  return report;
}

namespace {

void emit(const json& j, const std::string& out_path) {
  const std::string text = io::dump_canonical(j);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_file(out_path, text);
  }
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_file(out_path, text);
  }
}

int run_cli_impl(int argc, char** argv) {
  CLI::App app{"resource estimation and verification pipeline for qubitized QPE of "
               "plane-wave/PAW Hamiltonians"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a desk-scale instance file");
  std::string synth_mode = "random";
  std::string synth_out;
  toyscf::SynthSpec sspec;
  double well_depth = 4.0, well_width = 0.8;
  int well_bands = 4, well_occ = 1, well_paw = 1;
  synth->add_option("--mode", synth_mode, "random|well")->check(CLI::IsMember({"random", "well"}));
  synth->add_option("--a-bohr", sspec.a_bohr, "cubic cell edge");
  synth->add_option("--cutoff-ev", sspec.cutoff_ev, "kinetic-energy cutoff");
  synth->add_option("--nb", sspec.n_b, "orbital count");
  synth->add_option("--paw-blocks", sspec.n_paw_blocks, "synthetic PAW block count");
  synth->add_option("--na", sspec.n_a, "projectors per PAW block");
  synth->add_option("--paw-magnitude", sspec.paw_magnitude, "ctensor scale");
  synth->add_option("--seed", sspec.seed, "RNG seed");
  synth->add_flag("--complex", sspec.complex_mode, "complex Hermitian mode");
  synth->add_option("--well-depth", well_depth, "well depth, Hartree (well mode)");
  synth->add_option("--well-width", well_width, "well width, Bohr (well mode)");
  synth->add_option("--bands", well_bands, "bands to keep (well mode)");
  synth->add_option("--occ", well_occ, "doubly occupied orbitals (well mode)");
  synth->add_option("--paw", well_paw, "PAW blocks (well mode)");
  synth->add_option("--out", synth_out, "output path (default stdout)");

  // ---- factorize ----
  auto* fact = app.add_subcommand("factorize", "factorize an instance file");
  std::string fact_in, fact_out;
  double fact_delta = 0.0;
  fact->add_option("--instance", fact_in, "instance JSON")->required();
  fact->add_option("--delta", fact_delta, "truncation threshold");
  fact->add_option("--out", fact_out, "output path (default stdout)");

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "logical resource estimate");
  std::string est_factors, est_instance, est_out;
  double est_eps_qpe = 0.0, est_eps_qpe_mha = 0.0, est_delta = 0.0;
  PipelineConfig pcfg;
  bool est_verify = false, est_qec = false;
  est->add_option("--factors", est_factors, "factors JSON");
  est->add_option("--instance", est_instance, "instance JSON (runs the full pipeline)");
  est->add_option("--delta", est_delta, "truncation threshold (with --instance)");
  est->add_option("--eps-qpe", est_eps_qpe, "QPE error budget, Hartree");
  est->add_option("--eps-qpe-mha", est_eps_qpe_mha, "QPE error budget, mHa");
  est->add_option("--beth", pcfg.cost.beth, "rotation bitlength");
  est->add_option("--aleph", pcfg.cost.aleph, "keep-probability bitlength");
  long est_kr = 0;
  est->add_option("--kr", est_kr, "force QROAM k_r (power of 2)");
  est->add_flag("--verify", est_verify, "run the identity suite inline");
  est->add_flag("--qec", est_qec, "append surface-code resources");
  est->add_option("--out", est_out, "output path (default stdout)");

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "Fock-space identity suite");
  std::string ver_in, ver_out;
  double ver_delta = 0.0;
  ver->add_option("--instance", ver_in, "instance JSON")->required();
  ver->add_option("--delta", ver_delta, "truncation threshold");
  ver->add_option("--out", ver_out, "output path (default stdout)");

  // ---- scaling ----
  auto* sca = app.add_subcommand("scaling", "lambda_2 / Gamma scaling sweeps");
  std::string sca_family = "orbital", sca_csv;
  int sca_beth = 20;
  sca->add_option("--family", sca_family, "orbital|supercell")
      ->check(CLI::IsMember({"orbital", "supercell"}));
  sca->add_option("--beth", sca_beth, "rotation bitlength");
  sca->add_option("--csv", sca_csv, "CSV output path (default stdout)");

  // ---- downsample ----
  auto* ds = app.add_subcommand("downsample", "down-sampling plan and QPE budgets");
  int ds_nb = 17, ds_nbp = 26, ds_nbpp = 80;
  double ds_budget_mha = 1.6, ds_consumed_mha = 1.4, ds_be_mha = 0.0;
  std::string ds_out;
  ds->add_option("--nb", ds_nb, "orbitals/atom at the largest cell")->required();
  ds->add_option("--nbp", ds_nbp, "intermediate orbitals/atom")->required();
  ds->add_option("--nbpp", ds_nbpp, "orbitals/atom at the smallest cell")->required();
  ds->add_option("--budget-mha", ds_budget_mha, "total error budget, mHa");
  ds->add_option("--consumed-mha", ds_consumed_mha,
                 "budget consumed by orb+trunc+pw+paw, mHa");
  ds->add_option("--be-mha", ds_be_mha, "block-encoding budget, mHa");
  ds->add_option("--out", ds_out, "output path (default stdout)");

  // ---- upaw-fit ----
  auto* uf = app.add_subcommand("upaw-fit", "fit pseudo partial waves");
  std::string uf_in, uf_out;
  upaw::FitOptions uopt;
  double uf_gmax = 0.0;
  uf->add_option("--input", uf_in, "radial channels JSON")->required();
  uf->add_option("--ra", uopt.r_a, "augmentation radius, Bohr")->required();
  uf->add_option("--p", uopt.p_order, "boundary derivative order")->required();
  uf->add_option("--m", uopt.m_count, "overlap coefficient count")->required();
  uf->add_option("--gmax", uf_gmax, "Fourier penalty cutoff, 1/Bohr");
  uf->add_option("--tol", uopt.tol, "constraint tolerance");
  uf->add_option("--out", uf_out, "output path (default stdout)");

  // ---- qec ----
  auto* qc = app.add_subcommand("qec", "surface-code physical resources");
  long qc_logical = 0;
  double qc_toffolis = 0.0, qc_p = 1e-4;
  std::string qc_catalog, qc_out;
  qc->add_option("--logical-qubits", qc_logical, "algorithm logical qubits")->required();
  qc->add_option("--toffolis", qc_toffolis, "total Toffoli count")->required();
  qc->add_option("--p", qc_p, "physical error rate");
  qc->add_option("--catalog", qc_catalog, "factory catalog JSON");
  qc->add_option("--out", qc_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
  }

  if (synth->parsed()) {
    toyscf::HamiltonianInstance inst = [&] {
      if (synth_mode == "well") {
        toyscf::WellInstanceSpec w;
        w.a_bohr = sspec.a_bohr;
        w.cutoff_ev = sspec.cutoff_ev;
        w.wells = {{Eigen::Vector3d(0.5 * sspec.a_bohr, 0.5 * sspec.a_bohr,
                                    0.5 * sspec.a_bohr),
                    well_depth, well_width}};
        w.n_bands = well_bands;
        w.n_occ = well_occ;
        w.n_paw_blocks = well_paw;
        w.n_a = sspec.n_a;
        w.paw_magnitude = sspec.paw_magnitude;
        w.paw_seed = sspec.seed;
        return toyscf::make_well_instance(w);
      }
      return toyscf::synth_random_instance(sspec);
    }();
    emit(io::instance_to_json(inst), synth_out);
    return 0;
  }

  if (fact->parsed()) {
    toyscf::HamiltonianInstance inst = io::ingest(fact_in);
    auto factors = factorize::truncate(factorize::factorize_instance(inst), fact_delta);
    emit(io::factors_to_json(factors), fact_out);
    return 0;
  }

  if (est->parsed()) {
    if (est_eps_qpe_mha > 0.0) est_eps_qpe = est_eps_qpe_mha / units::mha_per_hartree;
    if (!(est_eps_qpe > 0.0)) throw CLI::ValidationError("estimate", "need --eps-qpe or --eps-qpe-mha");
    pcfg.cost.eps_qpe = est_eps_qpe;
    if (est_kr > 0) pcfg.cost.kr = est_kr;
    if (!est_instance.empty()) {
      pcfg.instance_path = est_instance;
      pcfg.delta = est_delta;
      pcfg.verify = est_verify;
      pcfg.with_qec = est_qec;
      json report = run_pipeline(pcfg);
      emit(report, est_out);
      return report["pass"].get<bool>() ? 0 : 1;
    }
    if (est_factors.empty()) throw CLI::ValidationError("estimate", "need --factors or --instance");
    auto factors = io::factors_from_json(json::parse(io::read_file(est_factors)));
    lcucost::CostReport cost = lcucost::qpe_cost(factors, pcfg.cost);
    json j = cost_to_json(cost);
    emit(j, est_out);
    std::cerr << "lambda = " << cost.lambda.lambda_total
              << " Ha, L = " << cost.gamma.l_count << ", k_r = " << cost.kr_chosen
              << ", iterations = " << cost.iterations
              << ", Toffolis = " << cost.toffoli_total
              << ", logical qubits = " << cost.logical_qubits << "\n";
    return 0;
  }

  if (ver->parsed()) {
    toyscf::HamiltonianInstance inst = io::ingest(ver_in);
    auto factors = factorize::truncate(factorize::factorize_instance(inst), ver_delta);
    json j = verify_instance(inst, factors);
    emit(j, ver_out);
    return j["pass"].get<bool>() ? 0 : 1;
  }

  if (sca->parsed()) {
    scaling::SweepResult result;
    std::string label;
    if (sca_family == "orbital") {
      result = scaling::orbital_sweep(
          8.0, 120.0,
          {{Eigen::Vector3d(3.0, 3.0, 4.0), 2.5, 0.8},
           {Eigen::Vector3d(5.0, 3.0, 4.0), 2.5, 0.8},
           {Eigen::Vector3d(3.0, 5.0, 4.0), 2.5, 0.8},
           {Eigen::Vector3d(5.0, 5.0, 4.0), 2.5, 0.8}},
          {10, 14, 20, 28, 40, 56}, sca_beth);
      label = "n_b";
    } else {
      result = scaling::supercell_sweep(5.0, 110.0, 4,
                                        {{1, 1, 1}, {2, 1, 1}, {2, 2, 1}, {2, 2, 2}},
                                        sca_beth, 2);
      label = "n_atoms";
    }
    emit_text(scaling::to_csv(result, label), sca_csv);
    return 0;
  }

  if (ds->parsed()) {
    auto plan = downsample::expand_plan(ds_nb, ds_nbp, ds_nbpp);
    downsample::ErrorBudget budget;
    budget.eps_tot = ds_budget_mha / units::mha_per_hartree;
    budget.eps_orb = ds_consumed_mha / units::mha_per_hartree;
    budget.eps_be = ds_be_mha / units::mha_per_hartree;
    const double per_run = downsample::allocate_budget(budget, 5);
    json j;
    j["per_run_eps_qpe_mha"] = per_run * units::mha_per_hartree;
    json runs = json::array();
    for (auto& r : plan.runs) {
      json rj;
      rj["cell"] = {r.cell_n, r.cell_n, r.cell_n};
      rj["orbitals_per_atom"] = r.orbitals_per_atom;
      rj["sign"] = r.sign;
      rj["eps_qpe_mha"] = per_run * units::mha_per_hartree;
      runs.push_back(std::move(rj));
    }
    j["runs"] = std::move(runs);
    emit(j, ds_out);
    return 0;
  }

  if (uf->parsed()) {
    json in = json::parse(io::read_file(uf_in));
    std::vector<upaw::RadialFunction> channels;
    for (const auto& c : in.at("channels")) {
      upaw::RadialFunction f;
      f.l = c.value("l", 0);
      f.grid = c.at("grid").get<std::vector<double>>();
      f.values = c.at("values").get<std::vector<double>>();
      channels.push_back(std::move(f));
    }
    if (uf_gmax > 0.0) uopt.gmax = uf_gmax;
    upaw::PseudoRadialSetup setup = upaw::fit_pseudo_radial(channels, uopt);
    json j;
    j["r_a"] = setup.r_a;
    j["p"] = setup.p_order;
    j["m"] = setup.m_count;
    j["converged"] = setup.converged;
    j["max_residual"] = setup.max_residual;
    j["residuals"] = setup.residuals;
    if (uopt.gmax) j["fourier_tail"] = setup.fourier_tail;
    json chans = json::array();
    for (std::size_t c = 0; c < setup.channels.size(); ++c) {
      json cj;
      cj["l"] = setup.channels[c].l;
      cj["coefficients"] = setup.channels[c].coefficients;
      cj["grid"] = channels[c].grid;
      cj["ae_values"] = channels[c].values;
      chans.push_back(std::move(cj));
    }
    j["channels"] = std::move(chans);
    emit(j, uf_out);
    return setup.converged ? 0 : 1;
  }

  if (qc->parsed()) {
    qec::QecConfig cfg;
    cfg.p_phys = qc_p;
    if (!qc_catalog.empty()) {
      json cat = json::parse(io::read_file(qc_catalog));
      cfg.factory_catalog.clear();
      for (const auto& f : cat.at("factories")) {
        qec::FactorySpec spec;
        spec.name = f.at("name").get<std::string>();
        spec.output_error = f.at("output_error").get<double>();
        spec.footprint_qubits = f.at("footprint_qubits").get<long>();
        spec.cycles_per_state = f.at("cycles_per_state").get<double>();
        cfg.factory_catalog.push_back(std::move(spec));
      }
    }
    auto phys = qec::physical_resources(cfg, qc_logical, qc_toffolis);
    emit(qec_to_json(phys), qc_out);
    return 0;
  }

  return 2;
}

}  // namespace

int run_cli(int argc, char** argv) {
  try {
    return run_cli_impl(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qpaw::pipeline
