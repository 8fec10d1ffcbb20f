#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hsb/bootstrap.hpp"
#include "hsb/fixtures.hpp"
#include "hsb/lattice_models.hpp"
#include "hsb/serialize.hpp"
#include "hsb/spectral.hpp"

namespace hsb {

struct TimeGridConfig {
  int points = 400;
  /** Bounds in units of the Heisenberg time 2 pi D / span. */
  double t_min = 1e-4;
  double t_max = 1e2;
  double smoothing_width = 0.02;
};

struct HubbardConfig {
  std::vector<std::pair<int, int>> sectors;
  /** "exact" uses degeneracy clusters; "smoothed" averages smoothed late-time curves. */
  std::string plateau = "exact";
  double window_factor = 10.0;
  double smoothing_width = 1e-3;
};

struct PipelineConfig {
  HamiltonianSpec spec;
  int n_realizations = 1;
  int nu = 1;
  ConstraintOptions thresholds;
  double degeneracy_tol = 1e-10;
  BootstrapOptions bootstrap;
  std::optional<long long> unitary_order;
  TimeGridConfig grid;
  HubbardConfig hubbard;
  bool curves = true;
  std::string output_dir;
  int threads = 1;
};

namespace detail {

inline Distribution distribution_from_json(const json& j) {
  const std::string kind = j.value("distribution", "gaussian");
  if (kind == "gaussian") return Distribution::gaussian(j.at("mean"), j.value("std", 0.0));
  if (kind == "uniform") return Distribution::uniform(j.at("low"), j.at("high"));
  if (kind == "fixed") return Distribution::fixed(j.at("value"));
  throw Error(ErrorKind::ConfigError, "unknown distribution '" + kind + "'");
}

inline json distribution_to_json(const Distribution& d) {
  switch (d.kind) {
    case Distribution::Kind::Gaussian: return {{"distribution", "gaussian"}, {"mean", d.a}, {"std", d.b}};
    case Distribution::Kind::Uniform: return {{"distribution", "uniform"}, {"low", d.a}, {"high", d.b}};
    case Distribution::Kind::Fixed: return {{"distribution", "fixed"}, {"value", d.a}};
  }
  return {};
}

}  // namespace detail

/** @brief Parses and validates a configuration document. */
inline PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    if (j.value("schema_version", kSchemaVersion) != kSchemaVersion)
      throw Error(ErrorKind::ConfigError, "unsupported schema_version");
    c.spec.model = model_from_string(j.at("model"));
    c.spec.L = j.at("L");
    c.spec.theta = j.value("theta", 0.0);
    c.spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("couplings"))
      for (const auto& [name, d] : j.at("couplings").items()) c.spec.couplings[name] = detail::distribution_from_json(d);
    c.n_realizations = j.value("n_realizations", 1);
    c.nu = j.value("kramers_factor", 1);
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      c.thresholds.positivity_threshold = t.value("positivity", c.thresholds.positivity_threshold);
      c.thresholds.equality_tol = t.value("equality", c.thresholds.equality_tol);
      c.thresholds.ratio_tol = t.value("ratio", c.thresholds.ratio_tol);
      c.degeneracy_tol = t.value("degeneracy", c.degeneracy_tol);
    }
    if (j.contains("bootstrap")) {
      const json& b = j.at("bootstrap");
      c.bootstrap.r_min = b.value("r_min", c.bootstrap.r_min);
      c.bootstrap.r_max = b.value("r_max", c.bootstrap.r_max);
      c.bootstrap.b_max = b.value("b_max", c.bootstrap.b_max);
      const std::string mode = b.value("branch", "both");
      if (mode != "both" && mode != "linear" && mode != "corep")
        throw Error(ErrorKind::ConfigError, "bootstrap.branch must be both, linear or corep");
      c.bootstrap.linear = mode != "corep";
      c.bootstrap.corep = mode != "linear";
      if (b.contains("unitary_order") && !b.at("unitary_order").is_null())
        c.unitary_order = b.at("unitary_order").get<long long>();
    }
    if (j.contains("time_grid")) {
      const json& g = j.at("time_grid");
      c.grid.points = g.value("points", c.grid.points);
      c.grid.t_min = g.value("t_min", c.grid.t_min);
      c.grid.t_max = g.value("t_max", c.grid.t_max);
      c.grid.smoothing_width = g.value("smoothing_width", c.grid.smoothing_width);
    }
    if (j.contains("hubbard")) {
      const json& h = j.at("hubbard");
      for (const auto& s : h.value("sectors", json::array())) c.hubbard.sectors.emplace_back(s.at(0), s.at(1));
      c.hubbard.plateau = h.value("plateau", c.hubbard.plateau);
      c.hubbard.window_factor = h.value("window_factor", c.hubbard.window_factor);
      c.hubbard.smoothing_width = h.value("smoothing_width", c.hubbard.smoothing_width);
    }
    c.curves = j.value("curves", true);
    c.output_dir = j.value("output", std::string());
    c.threads = j.value("threads", 1);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BadSpec) throw Error(ErrorKind::ConfigError, e.what());
    throw;
  }
  if (c.n_realizations < 1) throw Error(ErrorKind::ConfigError, "n_realizations must be at least 1");
  if (c.nu != 1 && c.nu != 2) throw Error(ErrorKind::ConfigError, "kramers_factor must be 1 or 2");
  if (!(c.thresholds.positivity_threshold > 0) || !(c.thresholds.equality_tol > 0) || !(c.thresholds.ratio_tol > 0) ||
      !(c.degeneracy_tol > 0))
    throw Error(ErrorKind::ConfigError, "thresholds must be positive");
  if (c.threads < 1) c.threads = 1;
  if (c.spec.model == Model::FermiHubbard) {
    if (c.hubbard.sectors.empty()) {
      // S^z = 0 or +1/2 sectors around half filling
      for (int n = std::max(0, c.spec.L - 2); n <= std::min(2 * c.spec.L, c.spec.L + 2); ++n)
        c.hubbard.sectors.emplace_back((n + 1) / 2, n / 2);
    }
    if (c.hubbard.plateau != "exact" && c.hubbard.plateau != "smoothed")
      throw Error(ErrorKind::ConfigError, "hubbard.plateau must be exact or smoothed");
  }
  try {
    validate_spec(c.spec);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return c;
}

inline json config_to_json(const PipelineConfig& c) {
  json couplings = json::object();
  for (const auto& [k, d] : c.spec.couplings) couplings[k] = detail::distribution_to_json(d);
  json sectors = json::array();
  for (const auto& [u, d] : c.hubbard.sectors) sectors.push_back(json::array({u, d}));
  std::string mode = c.bootstrap.linear && c.bootstrap.corep ? "both" : (c.bootstrap.linear ? "linear" : "corep");
  return {{"schema_version", kSchemaVersion},
          {"model", to_string(c.spec.model)},
          {"L", c.spec.L},
          {"theta", c.spec.theta},
          {"seed", c.spec.seed},
          {"couplings", couplings},
          {"n_realizations", c.n_realizations},
          {"kramers_factor", c.nu},
          {"thresholds",
           {{"positivity", c.thresholds.positivity_threshold},
            {"equality", c.thresholds.equality_tol},
            {"ratio", c.thresholds.ratio_tol},
            {"degeneracy", c.degeneracy_tol}}},
          {"bootstrap",
           {{"r_min", c.bootstrap.r_min},
            {"r_max", c.bootstrap.r_max},
            {"b_max", c.bootstrap.b_max},
            {"branch", mode},
            {"unitary_order", c.unitary_order ? json(*c.unitary_order) : json(nullptr)}}},
          {"time_grid",
           {{"points", c.grid.points},
            {"t_min", c.grid.t_min},
            {"t_max", c.grid.t_max},
            {"smoothing_width", c.grid.smoothing_width}}},
          {"hubbard",
           {{"sectors", sectors},
            {"plateau", c.hubbard.plateau},
            {"window_factor", c.hubbard.window_factor},
            {"smoothing_width", c.hubbard.smoothing_width}}},
          {"curves", c.curves}};
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

/** @brief One sector-pair curve averaged over the ensemble. */
struct Curve {
  int a = 0;
  int b = 0;
  std::vector<double> t;
  std::vector<double> raw;
  std::vector<double> smooth;
};

/** @brief Per-stage wall times in seconds. */
struct StageTimes {
  double build_and_diagonalize = 0.0;
  double curves = 0.0;
  double bootstrap = 0.0;
};

struct SelectionRuleEntry {
  int a = 0;
  int b = 0;
  int delta_n = 0;
  double normalized = 0.0;
};

struct RunReport {
  PipelineConfig config;
  std::vector<std::string> labels;
  std::vector<int> d;
  PlateauMatrix plateau;
  std::optional<NumericalConstraints> constraints;
  std::optional<BootstrapResult> bootstrap;
  std::vector<std::vector<MatchReport>> linear_matches;
  std::vector<std::vector<MatchReport>> corep_matches;
  std::vector<Curve> curves;
  std::vector<SelectionRuleEntry> selection_rule;
  bool kramers_advisory = false;
  double mean_heisenberg_time = 0.0;
  StageTimes times;
};

/** @brief Runs fn(i) for i in [0, n) on up to `threads` workers; results land in caller-owned slots. */
template <class Fn>
inline void parallel_for(int n, int threads, Fn fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<std::string> hubbard_labels(const std::vector<std::pair<int, int>>& sectors) {
  std::vector<std::string> out;
  for (const auto& [u, d] : sectors) {
    std::ostringstream s;
    s << "N=" << u + d << ",Sz=" << (u - d) / 2.0;
    out.push_back(s.str());
  }
  return out;
}

/** @brief Spectra of every realization; sector-resolved for all models. */
struct Ensemble {
  std::vector<BlockSpectrum> spectra;
  std::vector<Couplings> couplings;
  std::optional<ProjectorSet> projectors;
};

inline Ensemble build_ensemble(const PipelineConfig& c) {
  Ensemble ens;
  ens.spectra.resize(c.n_realizations);
  ens.couplings.resize(c.n_realizations);
  if (c.spec.model != Model::FermiHubbard) {
    HamiltonianSpec s0 = c.spec;
    ens.projectors = build_lattice(s0).projectors;
  }
  parallel_for(c.n_realizations, c.threads, [&](int i) {
    HamiltonianSpec s = c.spec;
    s.seed = c.spec.seed + static_cast<std::uint64_t>(i);
    if (c.spec.model == Model::FermiHubbard) {
      std::vector<Eigen::MatrixXcd> blocks;
      for (const auto& [u, d] : c.hubbard.sectors) blocks.push_back(build_fermi_hubbard(s, u, d, &ens.couplings[i]));
      ens.spectra[i] = block_spectrum(blocks);
    } else {
      const LatticeSystem sys = build_lattice(s);
      ens.couplings[i] = sys.couplings;
      ens.spectra[i] = block_spectrum(sys.H, sys.projectors);
    }
  });
  return ens;
}

/** @brief Ensemble-averaged curves for every pair a <= b on a shared log grid. */
inline std::vector<Curve> ensemble_curves(const Ensemble& ens, const std::vector<int>& d, const TimeGridConfig& g,
                                          double t_heisenberg, int threads) {
  const auto t = log_grid(g.t_min * t_heisenberg, g.t_max * t_heisenberg, g.points);
  const int n = static_cast<int>(d.size());
  std::vector<Eigen::MatrixXcd> traces(ens.spectra.size());
  parallel_for(static_cast<int>(ens.spectra.size()), threads, [&](int i) {
    traces[i] = sector_traces(ens.spectra[i].weights, ens.spectra[i].energies, t);
  });
  std::vector<Curve> out;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      std::vector<std::vector<double>> series;
      for (const auto& z : traces) {
        std::vector<double> s(t.size());
        for (size_t k = 0; k < t.size(); ++k)
          s[k] = (z(a, k) * std::conj(z(b, k))).real() / (static_cast<double>(d[a]) * d[b]);
        series.push_back(std::move(s));
      }
      Curve c{a, b, t, disorder_average(series).first, {}};
      c.smooth = gaussian_smooth(c.raw, g.smoothing_width);
      out.push_back(std::move(c));
    }
  return out;
}

/** @brief Subgroup fixtures sharing the subgroup of a run, for automatic verification. */
inline std::vector<Fixture> fixtures_for_subgroup(const std::string& subgroup) {
  std::vector<Fixture> out;
  for (auto& f : all_fixtures())
    if (f.subgroup.name == subgroup) out.push_back(f);
  return out;
}

/**
 * @brief Model, diagonalization, plateau matrix, constraints, bootstrap and fixture checks.
 *
 * Fermionic runs stop after the plateau matrix and report the particle-number selection rule.
 */
inline RunReport run_pipeline(const PipelineConfig& c, bool run_bootstrap_stage = true) {
  using clock = std::chrono::steady_clock;
  RunReport rep;
  rep.config = c;
  auto t0 = clock::now();
  const Ensemble ens = build_ensemble(c);
  rep.times.build_and_diagonalize = std::chrono::duration<double>(clock::now() - t0).count();

  if (ens.projectors) {
    rep.labels = ens.projectors->subgroup.labels;
    rep.d = ens.projectors->dims();
  } else {
    rep.labels = hubbard_labels(c.hubbard.sectors);
    rep.d.assign(c.hubbard.sectors.size(), 1);
  }

  std::vector<Eigen::MatrixXd> ks(c.n_realizations);
  const bool smoothed = c.spec.model == Model::FermiHubbard && c.hubbard.plateau == "smoothed";
  parallel_for(c.n_realizations, c.threads, [&](int i) {
    const auto& sp = ens.spectra[i];
    ks[i] = smoothed ? smoothed_late_plateau(sp.weights, sp.energies, rep.d, c.hubbard.window_factor,
                                             c.hubbard.smoothing_width)
                     : plateau_all(sp.weights, sp.energies, rep.d, c.degeneracy_tol);
  });
  double th = 0.0;
  for (const auto& sp : ens.spectra) th += heisenberg_time(sp.energies);
  rep.mean_heisenberg_time = th / c.n_realizations;

  std::tie(rep.plateau.K, rep.plateau.standard_error) = disorder_average(ks);
  rep.plateau.R = benchmark_lines(ens.spectra[0].traces, rep.d, c.nu);
  rep.plateau.nu = c.nu;
  rep.plateau.ensemble_size = c.n_realizations;
  rep.plateau.labels = rep.labels;
  rep.plateau.d = rep.d;
  rep.kramers_advisory = kramers_advisory(rep.plateau, c.thresholds.ratio_tol);

  t0 = clock::now();
  if (c.curves && rep.mean_heisenberg_time > 0)
    rep.curves = ensemble_curves(ens, rep.d, c.grid, rep.mean_heisenberg_time, c.threads);
  rep.times.curves = std::chrono::duration<double>(clock::now() - t0).count();

  if (!ens.projectors) {
    const Eigen::MatrixXd norm = rep.plateau.normalized();
    for (size_t a = 0; a < c.hubbard.sectors.size(); ++a)
      for (size_t b = a + 1; b < c.hubbard.sectors.size(); ++b) {
        const int na = c.hubbard.sectors[a].first + c.hubbard.sectors[a].second;
        const int nb = c.hubbard.sectors[b].first + c.hubbard.sectors[b].second;
        rep.selection_rule.push_back({static_cast<int>(a), static_cast<int>(b), std::abs(na - nb), norm(a, b)});
      }
    return rep;
  }

  const RepTheory& n_ring = ens.projectors->subgroup.ring;
  rep.constraints = extract_constraints(rep.plateau, c.thresholds, n_ring, dual_map(n_ring).dual, c.unitary_order);
  if (!run_bootstrap_stage) return rep;

  t0 = clock::now();
  rep.bootstrap = run_bootstrap(*rep.constraints, c.bootstrap);
  rep.times.bootstrap = std::chrono::duration<double>(clock::now() - t0).count();
  const auto fixtures = fixtures_for_subgroup(ens.projectors->subgroup.name);
  for (const auto& s : rep.bootstrap->linear) {
    rep.linear_matches.emplace_back();
    for (const auto& f : fixtures) rep.linear_matches.back().push_back(verify_against_fixture(s, f));
  }
  for (const auto& s : rep.bootstrap->corep) {
    rep.corep_matches.emplace_back();
    for (const auto& f : fixtures) rep.corep_matches.back().push_back(verify_against_fixture(s, f));
  }
  return rep;
}

/** @brief Names of fixtures fully matched by a solution. */
inline std::vector<std::string> matched_fixtures(const std::vector<MatchReport>& reps) {
  std::vector<std::string> out;
  for (const auto& m : reps)
    if (m.all()) out.push_back(m.fixture);
  return out;
}

inline json solutions_to_json(const RunReport& rep) {
  json j = to_json(*rep.bootstrap);
  j["schema_version"] = kSchemaVersion;
  for (size_t i = 0; i < rep.linear_matches.size(); ++i) j["linear"][i]["fixture_matches"] = matched_fixtures(rep.linear_matches[i]);
  for (size_t i = 0; i < rep.corep_matches.size(); ++i) j["corep"][i]["fixture_matches"] = matched_fixtures(rep.corep_matches[i]);
  return j;
}

inline json selection_rule_to_json(const RunReport& rep) {
  json rows = json::array();
  for (const auto& e : rep.selection_rule)
    rows.push_back({{"a", rep.labels[e.a]}, {"b", rep.labels[e.b]}, {"delta_n", e.delta_n}, {"normalized", e.normalized}});
  return {{"schema_version", kSchemaVersion}, {"pairs", rows}, {"plateau_method", rep.config.hubbard.plateau}};
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + p.string());
  out << s;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + p.string());
}

inline std::string format_double(double x) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17) << x;
  return s.str();
}

/** @brief One CSV per curve, named xsff_<a>_<b>.csv, with header t,K_raw,K_smooth. */
inline std::vector<std::filesystem::path> export_curves(const std::vector<Curve>& curves,
                                                        const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (curves.empty()) return written;
  std::filesystem::create_directories(dir);
  for (const auto& c : curves) {
    std::string body = "t,K_raw,K_smooth\n";
    for (size_t k = 0; k < c.t.size(); ++k)
      body += format_double(c.t[k]) + "," + format_double(c.raw[k]) + "," + format_double(c.smooth[k]) + "\n";
    const auto p = dir / ("xsff_" + std::to_string(c.a) + "_" + std::to_string(c.b) + ".csv");
    write_text(p, body);
    written.push_back(p);
  }
  return written;
}

/** @brief Writes every artifact of a run; timing goes to timing.json so the data files stay bit-stable. */
inline std::vector<std::filesystem::path> export_report(const RunReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const json& j) {
    write_text(dir / name, j.dump(2) + "\n");
    written.push_back(dir / name);
  };
  put("config.json", config_to_json(rep.config));
  json plateau = to_json(rep.plateau);
  plateau["kramers_advisory"] = rep.kramers_advisory;
  plateau["mean_heisenberg_time"] = rep.mean_heisenberg_time;
  put("plateau.json", plateau);
  if (rep.constraints) put("constraints.json", to_json(*rep.constraints));
  if (rep.bootstrap) put("solutions.json", solutions_to_json(rep));
  if (!rep.selection_rule.empty()) put("selection_rule.json", selection_rule_to_json(rep));
  put("timing.json", {{"build_and_diagonalize_s", rep.times.build_and_diagonalize},
                      {"curves_s", rep.times.curves},
                      {"bootstrap_s", rep.times.bootstrap},
                      {"ensemble_size", rep.plateau.ensemble_size}});
  for (const auto& p : export_curves(rep.curves, dir / "curves")) written.push_back(p);
  return written;
}

}  // namespace hsb
