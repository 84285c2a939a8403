#include "qpaw/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qpaw::io {

namespace {

json complex_matrix_to_json(const Mat& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

Mat complex_matrix_from_json(const json& j, const std::string& where) {
  if (!j.contains("re") || !j.contains("im") || !j.contains("rows") || !j.contains("cols")) {
    throw std::runtime_error("schema violation at " + where + ": need rows/cols/re/im");
  }
  const Eigen::Index rows = j["rows"].get<Eigen::Index>();
  const Eigen::Index cols = j["cols"].get<Eigen::Index>();
  const auto re = j["re"].get<std::vector<double>>();
  const auto im = j["im"].get<std::vector<double>>();
  if (re.size() != static_cast<std::size_t>(rows * cols) || re.size() != im.size()) {
    throw std::runtime_error("schema violation at " + where + ": length mismatch");
  }
  Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c, ++k) m(r, c) = cxd(re[k], im[k]);
  return m;
}

json vector_to_json(const RVec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

RVec vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json instance_to_json(const toyscf::HamiltonianInstance& instance) {
  json j;
  j["version"] = 1;
  json lattice = json::array();
  for (int r = 0; r < 3; ++r) {
    lattice.push_back({instance.cell.lattice(r, 0), instance.cell.lattice(r, 1),
                       instance.cell.lattice(r, 2)});
  }
  j["cell"]["lattice_bohr"] = lattice;
  j["basis"]["cutoff_ev"] = instance.basis.cutoff_ev;
  j["constant_ha"] = instance.constant;
  j["h"] = complex_matrix_to_json(instance.h);

  if (instance.orbitals) {
    j["pair_density"]["mode"] = "from_orbitals";
    j["pair_density"]["orbitals"]["coefficients"] =
        complex_matrix_to_json(instance.orbitals->coefficients);
    j["pair_density"]["orbitals"]["eigenvalues_ha"] =
        vector_to_json(instance.orbitals->eigenvalues);
    j["pair_density"]["orbitals"]["n_occ"] = instance.orbitals->n_occ;
  } else {
    j["pair_density"]["mode"] = "explicit";
    j["pair_density"]["n_b"] = instance.pair_density.n_b;
    json entries = json::array();
    const auto& grid = instance.pair_density.grid;
    for (std::size_t s = 0; s < grid.halfspace_size(); ++s) {
      const auto& m = grid.miller[grid.halfspace[s]];
      json e;
      e["miller"] = {m[0], m[1], m[2]};
      e["eta0"] = complex_matrix_to_json(instance.pair_density.eta[s][0]);
      e["eta1"] = complex_matrix_to_json(instance.pair_density.eta[s][1]);
      entries.push_back(std::move(e));
    }
    j["pair_density"]["entries"] = std::move(entries);
  }

  json blocks = json::array();
  for (const auto& blk : instance.paw_blocks) {
    json b;
    b["atom_id"] = blk.atom_id;
    b["n_a"] = blk.n_a;
    b["proj_overlaps"] = complex_matrix_to_json(blk.proj_overlaps);
    b["ctensor_flat"] = blk.ctensor;
    blocks.push_back(std::move(b));
  }
  j["paw_blocks"] = std::move(blocks);

  if (instance.kernel.reg == pwbasis::Regularization::user_value) {
    j["kernel"]["regularization"] = "user_value";
    j["kernel"]["vreg0"] = instance.kernel.vreg0;
  } else {
    j["kernel"]["regularization"] = "spherical_truncation";
  }
  return j;
}

toyscf::HamiltonianInstance instance_from_json(const json& j) {
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw std::runtime_error("schema violation at /version: unsupported version");
  }
  const auto& lat = j.at("cell").at("lattice_bohr");
  Eigen::Matrix3d lattice;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) lattice(r, c) = lat.at(r).at(c).get<double>();
  Cell cell(lattice);

  const double cutoff = j.at("basis").at("cutoff_ev").get<double>();
  auto basis = pwbasis::build_basis(cell, cutoff);
  auto grid = pwbasis::build_difference_grid(cell, basis);

  pwbasis::Regularization reg = pwbasis::Regularization::spherical_truncation;
  std::optional<double> vreg0;
  const std::string regname = j.at("kernel").at("regularization").get<std::string>();
  if (regname == "user_value") {
    reg = pwbasis::Regularization::user_value;
    vreg0 = j.at("kernel").at("vreg0").get<double>();
  } else if (regname != "spherical_truncation") {
    throw std::runtime_error("schema violation at /kernel/regularization: unknown value");
  }

  Mat h = complex_matrix_from_json(j.at("h"), "/h");

  toyscf::PairDensityTensor pd;
  std::optional<toyscf::OrbitalSet> orbitals;
  const std::string mode = j.at("pair_density").at("mode").get<std::string>();
  if (mode == "from_orbitals") {
    toyscf::OrbitalSet orbs;
    orbs.coefficients = complex_matrix_from_json(
        j.at("pair_density").at("orbitals").at("coefficients"),
        "/pair_density/orbitals/coefficients");
    orbs.eigenvalues =
        vector_from_json(j.at("pair_density").at("orbitals").at("eigenvalues_ha"));
    orbs.n_occ = j.at("pair_density").at("orbitals").at("n_occ").get<int>();
    if (orbs.coefficients.rows() != static_cast<Eigen::Index>(basis.size())) {
      throw std::runtime_error(
          "schema violation at /pair_density/orbitals: coefficient rows != N_pw");
    }
    pd = toyscf::pair_density(orbs, basis, cell);
    orbitals = std::move(orbs);
  } else if (mode == "explicit") {
    pd.grid = grid;
    pd.n_b = j.at("pair_density").at("n_b").get<int>();
    const auto& entries = j.at("pair_density").at("entries");
    if (entries.size() != grid.halfspace_size()) {
      throw std::runtime_error(
          "schema violation at /pair_density/entries: expected one entry per half-space G");
    }
    pd.eta.resize(grid.halfspace_size());
    for (std::size_t s = 0; s < grid.halfspace_size(); ++s) {
      const auto& e = entries.at(s);
      const auto m = e.at("miller").get<std::array<int, 3>>();
      const int idx = grid.index_of(m);
      if (idx < 0 || !grid.is_representative(idx) ||
          grid.hs_slot[idx] != static_cast<int>(s)) {
        throw std::runtime_error(
            "schema violation at /pair_density/entries: miller order must follow the "
            "half-space index");
      }
      pd.eta[s][0] = complex_matrix_from_json(e.at("eta0"), "/pair_density/entries/eta0");
      pd.eta[s][1] = complex_matrix_from_json(e.at("eta1"), "/pair_density/entries/eta1");
    }
  } else {
    throw std::runtime_error("schema violation at /pair_density/mode: unknown mode");
  }

  std::vector<toyscf::PawBlock> blocks;
  for (const auto& b : j.at("paw_blocks")) {
    toyscf::PawBlock blk;
    blk.atom_id = b.at("atom_id").get<int>();
    blk.n_a = b.at("n_a").get<int>();
    blk.proj_overlaps =
        complex_matrix_from_json(b.at("proj_overlaps"), "/paw_blocks/proj_overlaps");
    blk.ctensor = b.at("ctensor_flat").get<std::vector<double>>();
    blocks.push_back(std::move(blk));
  }

  auto kernel = pwbasis::coulomb_kernel(pd.grid, cell, reg, vreg0);
  toyscf::HamiltonianInstance inst{cell,          std::move(basis),  std::move(h),
                                   j.at("constant_ha").get<double>(), std::move(pd),
                                   std::move(blocks), std::move(kernel), std::move(orbitals)};
  inst.validate();
  return inst;
}

toyscf::HamiltonianInstance ingest(const std::string& path) {
  json j = json::parse(read_file(path));
  return instance_from_json(j);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dump_canonical(const json& j) { return j.dump(1) + "\n"; }

json factors_to_json(const factorize::FactorizedHamiltonian& f) {
  json j;
  j["version"] = 1;
  j["constant_ha"] = f.constant;
  j["n_b"] = f.n_b;
  j["n_pw_pair"] = f.n_pw_pair;
  j["volume_bohr3"] = f.volume;
  j["g_min"] = f.g_min;
  j["truncation_delta"] = f.truncation_delta;
  j["surviving_parameters"] = f.surviving_parameters;
  j["one_body"]["h"] = complex_matrix_to_json(f.one_body.h);
  j["one_body"]["h_corrected"] = complex_matrix_to_json(f.one_body.h_corrected);
  j["one_body"]["h_prime"] = complex_matrix_to_json(f.one_body.h_prime);
  j["one_body"]["eps_prime"] = vector_to_json(f.one_body.eps_prime);
  json soft = json::array();
  for (const auto& s : f.soft) {
    json e;
    e["miller"] = {s.gvec[0], s.gvec[1], s.gvec[2]};
    e["g2"] = s.g2;
    e["j"] = s.j;
    e["weight"] = s.weight;
    e["f"] = vector_to_json(s.f);
    e["u"] = complex_matrix_to_json(s.u);
    soft.push_back(std::move(e));
  }
  j["soft"] = std::move(soft);
  json paw = json::array();
  for (const auto& p : f.paw) {
    json e;
    e["atom_id"] = p.atom_id;
    e["i1"] = p.i1;
    e["i2"] = p.i2;
    e["eps"] = p.eps;
    e["sign"] = p.sign;
    e["f"] = vector_to_json(p.f);
    e["u"] = complex_matrix_to_json(p.u);
    paw.push_back(std::move(e));
  }
  j["paw"] = std::move(paw);
  return j;
}

factorize::FactorizedHamiltonian factors_from_json(const json& j) {
  factorize::FactorizedHamiltonian f;
  f.constant = j.at("constant_ha").get<double>();
  f.n_b = j.at("n_b").get<int>();
  f.n_pw_pair = j.at("n_pw_pair").get<int>();
  f.volume = j.at("volume_bohr3").get<double>();
  f.g_min = j.at("g_min").get<double>();
  f.truncation_delta = j.at("truncation_delta").get<double>();
  f.surviving_parameters = j.at("surviving_parameters").get<long>();
  f.one_body.h = complex_matrix_from_json(j.at("one_body").at("h"), "/one_body/h");
  f.one_body.h_corrected =
      complex_matrix_from_json(j.at("one_body").at("h_corrected"), "/one_body/h_corrected");
  f.one_body.h_prime =
      complex_matrix_from_json(j.at("one_body").at("h_prime"), "/one_body/h_prime");
  f.one_body.eps_prime = vector_from_json(j.at("one_body").at("eps_prime"));
  for (const auto& e : j.at("soft")) {
    factorize::SoftFactor s;
    const auto m = e.at("miller").get<std::array<int, 3>>();
    s.gvec = m;
    s.g2 = e.at("g2").get<double>();
    s.j = e.at("j").get<int>();
    s.weight = e.at("weight").get<double>();
    s.f = vector_from_json(e.at("f"));
    s.u = complex_matrix_from_json(e.at("u"), "/soft/u");
    f.soft.push_back(std::move(s));
  }
  for (const auto& e : j.at("paw")) {
    factorize::PawFactor p;
    p.atom_id = e.at("atom_id").get<int>();
    p.i1 = e.at("i1").get<int>();
    p.i2 = e.at("i2").get<int>();
    p.eps = e.at("eps").get<double>();
    p.sign = e.at("sign").get<int>();
    p.f = vector_from_json(e.at("f"));
    p.u = complex_matrix_from_json(e.at("u"), "/paw/u");
    f.paw.push_back(std::move(p));
  }
  return f;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace qpaw::io
