// Acceptance runner: one PASS/FAIL line per criterion with its runtime.
//
// Exit status is 0 when the set of failing criteria equals the set passed with --expect-fail, so a documented
// failure stays visible in the output while any change in outcome, in either direction, fails the run.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "hsb/pipeline.hpp"
#include "synthetic.hpp"

using namespace hsb;

namespace {

// Tolerances and limits, pinned.
constexpr double kCharacterTol = 1e-8;
constexpr double kOracleRelTol = 0.01;
constexpr double kOracleWindowHeisenberg = 50.0;
constexpr int kOracleSeeds = 20;
constexpr int kOracleDim = 64;
constexpr double kS3DiagLow = 0.85, kS3DiagHigh = 1.15;
constexpr double kS3OffDiagRel = 0.1;
constexpr double kS3CrossMax = 0.05;
constexpr double kAtRatioLow = 1.3, kAtRatioHigh = 2.0;
constexpr double kOddMax = 0.05;
constexpr double kEvenMin = 0.2;
constexpr int kOracleInstances = 50;
constexpr int kOracleRankMax = 3;
constexpr int kOracleBMax = 2;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

PipelineConfig config(const std::string& name) {
  PipelineConfig c = load_config(std::string(HSB_SOURCE_DIR) + "/configs/" + name + ".json");
  c.curves = false;
  return c;
}

int index_of(const std::vector<std::string>& labels, const std::string& l) {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == l) return static_cast<int>(i);
  throw Error(ErrorKind::ConfigError, "label " + l + " not present");
}

std::vector<std::vector<int>> sorted_classes(std::vector<std::vector<int>> cls) {
  for (auto& c : cls) std::sort(c.begin(), c.end());
  std::sort(cls.begin(), cls.end());
  return cls;
}

/** Unique solution at the expected rank that matches the named fixture on every item. */
void expect_unique_match(Outcome& o, const std::string& branch, const std::optional<int>& rank,
                         const std::vector<BootstrapSolution>& sols, int want_rank, const std::string& fixture) {
  o.check(rank && *rank == want_rank, branch + " r* = " + std::to_string(want_rank) + " (got " +
                                          (rank ? std::to_string(*rank) : std::string("none")) + ")");
  int matches = 0;
  for (const auto& s : sols) matches += verify_against_fixture(s, fixture).all();
  o.note(branch + ": " + std::to_string(sols.size()) + " solution(s), " + std::to_string(matches) + " matching " + fixture);
  o.check(matches == 1, branch + " match to " + fixture);
  o.check(sols.size() == 1, branch + " uniqueness");
}

Outcome criterion_1() {
  Outcome o;
  for (const auto& f : all_fixtures()) {
    o.check(verlinde_fusion(*f.ring.characters, f.ring.weight_divisors) == f.ring.fusion, f.name + " verlinde");
    const CharacterTable t = characters_from_fusion(f.ring);
    const auto p = match_columns(f.ring.characters->entries, t.entries, kCharacterTol);
    o.check(p.has_value(), f.name + " characters");
    if (p)
      for (size_t c = 0; c < p->size(); ++c)
        o.check(f.ring.characters->class_sizes[c] == t.class_sizes[(*p)[c]], f.name + " class size");
  }
  o.note(std::to_string(all_fixtures().size()) + " fixtures");
  return o;
}

/**
 * GUE matrices with a complete set of projectors onto random orthogonal subspaces; the subspace ranks are drawn
 * per seed and sum to the full dimension.
 */
Outcome criterion_2() {
  Outcome o;
  double worst = 0.0;
  for (int seed = 1; seed <= kOracleSeeds; ++seed) {
    std::mt19937_64 rng(seed);
    const int sectors = 4;
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto gaussian_matrix = [&]() {
      Eigen::MatrixXcd z(kOracleDim, kOracleDim);
      for (int i = 0; i < kOracleDim; ++i)
        for (int j = 0; j < kOracleDim; ++j) z(i, j) = cplx(gauss(rng), gauss(rng));
      return z;
    };
    const Eigen::MatrixXcd g = gaussian_matrix();
    const Eigen::MatrixXcd h = 0.5 * (g + g.adjoint());
    const Eigen::MatrixXcd v = Eigen::HouseholderQR<Eigen::MatrixXcd>(gaussian_matrix()).householderQ();
    std::vector<int> cuts{0, kOracleDim};
    std::uniform_int_distribution<int> cut(1, kOracleDim - 1);
    while (static_cast<int>(cuts.size()) < sectors + 1) {
      const int c = cut(rng);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<SparseOp> ps;
    for (int s = 0; s < sectors; ++s) {
      const Eigen::MatrixXcd cols = v.middleCols(cuts[s], cuts[s + 1] - cuts[s]);
      const Eigen::MatrixXcd p = cols * cols.adjoint();
      ps.push_back(p.sparseView(1.0, 0.0));
    }
    const SpectralData sd = diagonalize(h);
    const SectorWeights w = sector_weights(sd, ps);
    const double T = kOracleWindowHeisenberg * heisenberg_time(sd.energies);
    for (int a = 0; a < sectors; ++a)
      for (int b = a; b < sectors; ++b) {
        const double exact = plateau_exact(w, sd.energies, a, b, 1, 1, 1e-8);
        const double oracle = oracle_plateau(w, sd.energies, a, b, 1, 1, T);
        const double err = std::abs(oracle - exact) / std::abs(exact);
        worst = std::max(worst, err);
        o.check(err <= kOracleRelTol, "seed " + std::to_string(seed) + " pair " + std::to_string(a) + "," +
                                          std::to_string(b) + " exact " + fmt(exact) + " oracle " + fmt(oracle));
      }
  }
  o.note("worst relative deviation " + fmt(worst));
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const RunReport rep = run_pipeline(config("s3_chain"));
  const Eigen::MatrixXd& k = rep.plateau.K;
  const Eigen::MatrixXd norm = rep.plateau.normalized();
  for (int a = 0; a < 3; ++a) {
    const double ratio = k(a, a) / rep.plateau.R(a);
    o.check(ratio >= kS3DiagLow && ratio <= kS3DiagHigh, "K/R in range for sector " + std::to_string(a));
  }
  const double rel = std::abs(k(1, 2) - k(1, 1)) / k(1, 1);
  o.check(rel < kS3OffDiagRel, "|K12 - K11|/K11 = " + fmt(rel));
  o.check(std::abs(norm(0, 1)) < kS3CrossMax && std::abs(norm(0, 2)) < kS3CrossMax,
          "cross correlations " + fmt(norm(0, 1)) + ", " + fmt(norm(0, 2)));
  expect_unique_match(o, "linear", rep.bootstrap->linear_rank, rep.bootstrap->linear, 3, "S3");
  expect_unique_match(o, "corep", rep.bootstrap->corep_rank, rep.bootstrap->corep, 2, "S3-corep");
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const RunReport rep = run_pipeline(config("kt_spin1"));
  const auto& nc = *rep.constraints;
  const int i01 = index_of(rep.labels, "01"), i11 = index_of(rep.labels, "11");
  const std::vector<std::vector<int>> want = sorted_classes({{0}, {index_of(rep.labels, "10")}, {i01, i11}});
  o.check(sorted_classes(nc.classes) == want, "class pattern {01 = 11}");
  for (bool mf : nc.multiplicity_free) o.check(mf, "multiplicity-free");
  expect_unique_match(o, "linear", rep.bootstrap->linear_rank, rep.bootstrap->linear, 5, "D4");
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const RunReport rep = run_pipeline(config("ashkin_teller"));
  const double ratio = rep.plateau.K(0, 0) / rep.plateau.R(0);
  o.note("K00/R = " + fmt(ratio));
  o.check(ratio >= kAtRatioLow && ratio <= kAtRatioHigh, "K00/R in [1.3, 2.0]");
  o.check(sorted_classes(rep.constraints->classes) == sorted_classes({{0}, {1, 2, 3}}), "non-trivial sectors merge");
  expect_unique_match(o, "linear", rep.bootstrap->linear_rank, rep.bootstrap->linear, 5, "S4");
  return o;
}

Outcome criterion_6() {
  Outcome o;
  {
    PipelineConfig c = config("quantum_torus_pi6");
    const RunReport rep = run_pipeline(c);
    const std::vector<std::vector<int>> want =
        sorted_classes({{0}, {1}, {2}, {3}, {index_of(rep.labels, "[1,1]"), index_of(rep.labels, "[1,2]")}});
    o.check(sorted_classes(rep.constraints->classes) == want, "pi/6 merge {[1,1],[1,2]} only");
    o.check(rep.constraints->unitary_order == 18, "pi/6 |N| = 18 supplied");
    expect_unique_match(o, "pi/6 linear", rep.bootstrap->linear_rank, rep.bootstrap->linear, 9, "S3xS3-linear");
    expect_unique_match(o, "pi/6 corep", rep.bootstrap->corep_rank, rep.bootstrap->corep, 5, "S3xS3-corep");
  }
  {
    const RunReport rep = run_pipeline(config("quantum_torus_pi4"));
    const std::vector<std::vector<int>> want = sorted_classes(
        {{0}, {1}, {index_of(rep.labels, "[0,1]"), index_of(rep.labels, "[1,0]")},
         {index_of(rep.labels, "[1,1]"), index_of(rep.labels, "[1,2]")}});
    o.check(sorted_classes(rep.constraints->classes) == want, "pi/4 merges");
    const auto& b = *rep.bootstrap;
    o.check(b.linear_rank == 6, "pi/4 linear r* = 6");
    o.check(b.linear.size() == 2, "pi/4 exactly two solutions (got " + std::to_string(b.linear.size()) + ")");
    int group = 0, spurious = 0;
    for (const auto& s : b.linear) {
      group += verify_against_fixture(s, "Z3sqZ4").all();
      spurious += verify_against_fixture(s, "QTC-SD-spurious").all();
    }
    o.check(group == 1, "pi/4 Z3sqZ4 match");
    o.check(spurious == 1, "pi/4 QTC-SD-spurious match");
    o.check(fixture_by_name("QTC-SD-spurious").group_status == "NotAGroup", "spurious ring tagged NotAGroup");
  }
  return o;
}

void selection_rule_checks(Outcome& o, const std::string& name) {
  const PipelineConfig c = config(name);
  const RunReport rep = run_pipeline(c);
  int half = -1;
  for (size_t a = 0; a < c.hubbard.sectors.size(); ++a)
    if (c.hubbard.sectors[a].first + c.hubbard.sectors[a].second == c.spec.L) half = static_cast<int>(a);
  o.check(half >= 0, name + " has a half-filling sector");
  double odd_max = 0.0, even_min = 1e300;
  for (const auto& e : rep.selection_rule) {
    if (e.delta_n % 2 == 1) odd_max = std::max(odd_max, std::abs(e.normalized));
    if (e.delta_n % 2 == 0 && (e.a == half || e.b == half)) even_min = std::min(even_min, e.normalized);
  }
  o.note(name + ": max |odd| = " + fmt(odd_max) + ", min even from half filling = " + fmt(even_min));
  o.check(odd_max < kOddMax, name + " odd pairs");
  o.check(even_min > kEvenMin, name + " even pairs");
}

Outcome criterion_7() {
  Outcome o;
  selection_rule_checks(o, "fermi_hubbard");
  selection_rule_checks(o, "fermi_hubbard_fixed");
  return o;
}

Outcome criterion_8() {
  Outcome o;
  std::mt19937_64 rng(8);
  int nonempty = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const auto inst = testing::random_small_instance(rng);
    for (int r = 1; r <= kOracleRankMax; ++r) {
      const auto staged = staged_rings(inst.constraints, r, kOracleBMax);
      const auto brute = brute_force_rings(inst.constraints, r, kOracleBMax);
      nonempty += !brute.empty();
      o.check(staged == brute, "instance " + std::to_string(i) + " rank " + std::to_string(r));
    }
  }
  o.note(std::to_string(kOracleInstances) + " instances, " + std::to_string(nonempty) + " non-empty rank slices");
  return o;
}

Outcome criterion_9() {
  Outcome o;
  for (const char* suite : {"test_group_algebra", "test_fixtures", "test_lattice_models", "test_spectral",
                            "test_bootstrap", "test_pipeline"}) {
    const std::string cmd = std::string(HSB_BINARY_DIR) + "/" + suite + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    o.check(status == 0, suite);
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only, expect_fail;
  app.add_option("--only", only, "run these criteria only");
  app.add_option("--expect-fail", expect_fail, "criteria documented as failing");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "algebra round trips", 1.0, criterion_1},
      {2, "plateau oracle", 30.0, criterion_2},
      {3, "S3 chain end to end", 300.0, criterion_3},
      {4, "KT chain and D4", 600.0, criterion_4},
      {5, "Ashkin-Teller and S4", 600.0, criterion_5},
      {6, "quantum torus chain", 1200.0, criterion_6},
      {7, "Fermi-Hubbard selection rule", 600.0, criterion_7},
      {8, "solver oracle equivalence", 120.0, criterion_8},
      {9, "property suites", 600.0, criterion_9},
  };

  std::set<int> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(dt < c.limit_s, "runtime limit " + fmt(c.limit_s) + " s");
    if (!o.pass) failed.insert(c.id);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.title << " (" << fmt(dt) << " s)";
    for (const auto& n : o.notes) std::cout << "; " << n;
    std::cout << std::endl;
  }

  std::set<int> expected(expect_fail.begin(), expect_fail.end());
  if (!only.empty()) {
    std::set<int> ran(only.begin(), only.end());
    std::set<int> kept;
    for (int e : expected)
      if (ran.count(e)) kept.insert(e);
    expected = kept;
  }
  if (failed == expected) {
    if (!failed.empty()) std::cout << "failures match the documented set" << std::endl;
    return 0;
  }
  std::cout << "failures differ from the documented set" << std::endl;
  return 1;
}
