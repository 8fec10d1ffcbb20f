#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hsb/pipeline.hpp"

using namespace hsb;

namespace {

constexpr int kExitNoSolution = 2;
constexpr int kExitConfig = 3;
constexpr int kExitOther = 1;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

PipelineConfig resolve(const CommonOptions& o) {
  PipelineConfig c = load_config(o.config);
  if (o.seed) c.spec.seed = *o.seed;
  c.threads = o.threads;
  if (!o.out.empty()) c.output_dir = o.out;
  if (c.output_dir.empty()) c.output_dir = "hsb_out";
  return c;
}

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory (overrides the config)");
  app->add_option("--seed", o.seed, "base seed (overrides the config)");
  app->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

void print_summary(const RunReport& rep) {
  std::cout << "model " << to_string(rep.config.spec.model) << " L=" << rep.config.spec.L
            << " realizations=" << rep.config.n_realizations << "\n";
  const Eigen::MatrixXd norm = rep.plateau.normalized();
  for (size_t a = 0; a < rep.labels.size(); ++a)
    std::cout << "  " << rep.labels[a] << "  K/R=" << rep.plateau.K(a, a) / rep.plateau.R(a) << "\n";
  if (rep.constraints) {
    std::cout << "classes:";
    for (const auto& cls : rep.constraints->classes) {
      std::cout << " {";
      for (size_t i = 0; i < cls.size(); ++i) std::cout << (i ? "," : "") << rep.labels[cls[i]];
      std::cout << "}";
    }
    std::cout << "\n";
  }
  for (const auto& e : rep.selection_rule)
    std::cout << "  " << rep.labels[e.a] << " x " << rep.labels[e.b] << "  dN=" << e.delta_n
              << "  normalized=" << e.normalized << "\n";
  if (rep.bootstrap) {
    auto show = [](const char* name, const std::optional<int>& rank, const std::vector<BootstrapSolution>& sols,
                   const std::vector<std::vector<MatchReport>>& matches) {
      std::cout << name << ": ";
      if (!rank) {
        std::cout << "none\n";
        return;
      }
      std::cout << "r*=" << *rank << ", " << sols.size() << " solution(s)\n";
      for (size_t i = 0; i < sols.size(); ++i) {
        const auto m = matched_fixtures(matches[i]);
        std::cout << "  #" << i << " matches:";
        for (const auto& n : m) std::cout << " " << n;
        if (m.empty()) std::cout << " (none)";
        std::cout << "\n";
      }
    };
    show("linear", rep.bootstrap->linear_rank, rep.bootstrap->linear, rep.linear_matches);
    show("corep", rep.bootstrap->corep_rank, rep.bootstrap->corep, rep.corep_matches);
  }
  if (rep.kramers_advisory) std::cout << "advisory: diagonal plateaus sit near 2R; consider kramers_factor 2\n";
}

void dump_operators(const PipelineConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json j = {{"schema_version", kSchemaVersion}, {"model", to_string(c.spec.model)}, {"seed", c.spec.seed}};
  if (c.spec.model == Model::FermiHubbard) {
    json blocks = json::array();
    for (const auto& [u, d] : c.hubbard.sectors) {
      const Eigen::MatrixXcd h = build_fermi_hubbard(c.spec, u, d);
      blocks.push_back({{"n_up", u}, {"n_down", d}, {"H", to_json(SparseOp(h.sparseView()))}});
    }
    j["sectors"] = blocks;
  } else {
    const LatticeSystem sys = build_lattice(c.spec);
    j["H"] = to_json(sys.H);
    json ps = json::array();
    for (size_t l = 0; l < sys.projectors.P.size(); ++l)
      ps.push_back({{"label", sys.projectors.subgroup.labels[l]},
                    {"d", sys.projectors.dims()[l]},
                    {"P", to_json(sys.projectors.P[l])}});
    j["projectors"] = ps;
  }
  write_text(dir / "operators.json", j.dump() + "\n");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hidden symmetry bootstrap from spectral form factors"};
  app.require_subcommand(1);

  CommonOptions xo, po, oo;
  bool dump = false;
  auto* xsff = app.add_subcommand("xsff", "ensemble plateaus, constraints and curves");
  add_common(xsff, xo);
  auto* pipeline = app.add_subcommand("pipeline", "full chain from model to verified bootstrap solutions");
  add_common(pipeline, po);
  pipeline->add_flag("--dump-operators", dump, "also write H and projectors of the first realization");

  std::string constraints_path, boot_out = "hsb_out";
  BootstrapOptions bopt;
  std::string branch_mode = "both";
  auto* boot = app.add_subcommand("bootstrap", "solve from a constraints.json document");
  boot->add_option("--constraints", constraints_path, "constraints JSON")->required()->check(CLI::ExistingFile);
  boot->add_option("--out", boot_out, "output directory");
  boot->add_option("--r-max", bopt.r_max, "largest rank searched");
  boot->add_option("--b-max", bopt.b_max, "largest branching multiplicity");
  boot->add_option("--branch", branch_mode, "both, linear or corep")
      ->check(CLI::IsMember({"both", "linear", "corep"}));

  std::string solutions_path, fixture_name, which = "linear";
  int index = 0;
  auto* verify = app.add_subcommand("verify", "compare a stored solution with a fixture");
  verify->add_option("--solutions", solutions_path, "solutions JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--fixture", fixture_name, "fixture name")->required();
  verify->add_option("--branch", which, "linear or corep")->check(CLI::IsMember({"linear", "corep"}));
  verify->add_option("--index", index, "solution index within the branch");

  std::vector<int> pair = {0, 0};
  double window = 50.0;
  auto* oracle = app.add_subcommand("oracle", "exact plateau against a numerical late-time average");
  add_common(oracle, oo);
  oracle->add_option("--pair", pair, "sector indices a b")->expected(2);
  oracle->add_option("--window", window, "T in Heisenberg times");

  auto* fixtures = app.add_subcommand("fixtures", "stored solutions");
  fixtures->require_subcommand(1);
  auto* flist = fixtures->add_subcommand("list", "list fixtures");
  std::string show_name;
  auto* fshow = fixtures->add_subcommand("show", "print one fixture as JSON");
  fshow->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (xsff->parsed() || pipeline->parsed()) {
      const bool full = pipeline->parsed();
      const PipelineConfig c = resolve(full ? po : xo);
      if (full && dump) dump_operators(c, c.output_dir);
      const RunReport rep = run_pipeline(c, full);
      export_report(rep, c.output_dir);
      print_summary(rep);
      return 0;
    }
    if (boot->parsed()) {
      bopt.linear = branch_mode != "corep";
      bopt.corep = branch_mode != "linear";
      const NumericalConstraints nc = constraints_from_json(read_json(constraints_path));
      const BootstrapResult res = run_bootstrap(nc, bopt);
      std::filesystem::create_directories(boot_out);
      json j = to_json(res);
      j["schema_version"] = kSchemaVersion;
      write_text(std::filesystem::path(boot_out) / "solutions.json", j.dump(2) + "\n");
      std::cout << "linear r*=" << (res.linear_rank ? std::to_string(*res.linear_rank) : "none") << " ("
                << res.linear.size() << "), corep r*=" << (res.corep_rank ? std::to_string(*res.corep_rank) : "none")
                << " (" << res.corep.size() << ")\n";
      return 0;
    }
    if (verify->parsed()) {
      const json j = read_json(solutions_path);
      const json& list = j.at(which);
      if (index < 0 || index >= static_cast<int>(list.size()))
        throw Error(ErrorKind::ConfigError, "solution index out of range");
      const MatchReport m = verify_against_fixture(solution_from_json(list.at(index)), fixture_name);
      std::cout << to_json(m).dump(2) << "\n";
      return 0;
    }
    if (oracle->parsed()) {
      const PipelineConfig c = resolve(oo);
      PipelineConfig one = c;
      one.n_realizations = 1;
      const Ensemble ens = build_ensemble(one);
      const auto& sp = ens.spectra[0];
      std::vector<int> d = ens.projectors ? ens.projectors->dims() : std::vector<int>(sp.weights.rows(), 1);
      if (pair[0] < 0 || pair[1] < 0 || pair[0] >= static_cast<int>(d.size()) || pair[1] >= static_cast<int>(d.size()))
        throw Error(ErrorKind::ConfigError, "sector index out of range");
      const double exact = plateau_exact(sp.weights, sp.energies, pair[0], pair[1], d[pair[0]], d[pair[1]], c.degeneracy_tol);
      const double numeric = oracle_plateau(sp.weights, sp.energies, pair[0], pair[1], d[pair[0]], d[pair[1]],
                                            window * heisenberg_time(sp.energies));
      std::cout << json{{"exact", exact}, {"oracle", numeric}, {"window_heisenberg_times", window}}.dump(2) << "\n";
      return 0;
    }
    if (flist->parsed()) {
      for (const auto& f : all_fixtures())
        std::cout << f.name << "\t" << to_string(f.branch) << "\tr=" << f.rank() << "\t" << f.subgroup.name << "\t"
                  << f.description << "\n";
      return 0;
    }
    if (fshow->parsed()) {
      std::cout << to_json(fixture_by_name(show_name)).dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::NoSolution) return kExitNoSolution;
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::BadSpec) return kExitConfig;
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return 0;
}
