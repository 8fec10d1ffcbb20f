#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsb/bootstrap.hpp"
#include "hsb/errors.hpp"
#include "hsb/group_algebra.hpp"
#include "hsb/subgroups.hpp"

namespace hsb {

/** @brief A stored hidden-group solution used to check bootstrap output. */
struct Fixture {
  std::string name;
  std::string description;
  Subgroup subgroup;
  BranchingMatrix branching;
  RepTheory ring;
  Branch branch = Branch::Linear;
  /** For each subgroup class, the hidden-group class that contains it. */
  std::vector<int> class_embedding;
  /** "Group" or "NotAGroup" (consistent ring without a realizing group). */
  std::string group_status = "Group";
  std::optional<long long> unitary_order;

  int rank() const { return ring.rank(); }
};

namespace detail {

inline CharacterTable make_table(const std::vector<std::vector<cplx>>& rows, const std::vector<long long>& sizes) {
  CharacterTable t;
  t.entries.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t c = 0; c < rows[a].size(); ++c) t.entries(a, c) = rows[a][c];
  t.class_sizes = sizes;
  return t;
}

inline Fixture make_fixture(std::string name, std::string description, Subgroup sub,
                            const std::vector<std::vector<int>>& b_rows, const std::vector<std::array<int, 4>>& fusion,
                            const std::vector<std::vector<cplx>>& chars, const std::vector<long long>& sizes,
                            std::vector<int> embedding, Branch branch,
                            std::optional<std::vector<int>> mu = std::nullopt) {
  Fixture f;
  f.name = std::move(name);
  f.description = std::move(description);
  f.subgroup = std::move(sub);
  f.branching = BranchingMatrix::from_rows(b_rows);
  f.ring.dims = irrep_dims_from_branching(f.branching, f.subgroup.ring.dims);
  f.ring.fusion = fusion_from_entries(f.branching.cols, fusion);
  f.ring.characters = make_table(chars, sizes);
  f.ring.weight_divisors = mu;
  f.ring.group_order = f.ring.characters->group_order();
  f.branch = branch;
  f.class_embedding = std::move(embedding);
  if (branch == Branch::Corep) f.unitary_order = f.ring.group_order;
  return f;
}

}  // namespace detail

inline Fixture fixture_s3() {
  return detail::make_fixture(
      "S3", "S3 hidden in the Z3 clock chain with charge conjugation", z3_subgroup(),
      {{1, 1, 0}, {0, 0, 1}, {0, 0, 1}}, {{1, 1, 0, 1}, {1, 2, 2, 1}, {2, 2, 0, 1}, {2, 2, 1, 1}, {2, 2, 2, 1}},
      {{1, 1, 1}, {1, -1, 1}, {2, 0, -1}}, {1, 3, 2}, {0, 2, 2}, Branch::Linear);
}

inline Fixture fixture_s3_corep() {
  return detail::make_fixture("S3-corep", "Z3 with an anti-unitary partner, magnetic reading of the clock chain",
                              z3_subgroup(), {{1, 0}, {0, 1}, {0, 1}}, {{1, 1, 0, 2}, {1, 1, 1, 1}},
                              {{1, 1}, {2, -1}}, {1, 2}, {0, 1, 1}, Branch::Corep, std::vector<int>{1, 2});
}

inline Fixture fixture_d4() {
  return detail::make_fixture(
      "D4", "D4 hidden in the Kennedy-Tasaki transformed spin-1 chain", v4_subgroup({"00", "10", "01", "11"}),
      {{1, 1, 0, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 1}},
      {{1, 1, 0, 1}, {2, 2, 0, 1}, {3, 3, 0, 1}, {1, 2, 3, 1}, {1, 3, 2, 1}, {2, 3, 1, 1},
       {1, 4, 4, 1}, {2, 4, 4, 1}, {3, 4, 4, 1}, {4, 4, 0, 1}, {4, 4, 1, 1}, {4, 4, 2, 1}, {4, 4, 3, 1}},
      {{1, 1, 1, 1, 1}, {1, 1, 1, -1, -1}, {1, 1, -1, 1, -1}, {1, 1, -1, -1, 1}, {2, -2, 0, 0, 0}},
      {1, 1, 2, 2, 2}, {0, 2, 1, 2}, Branch::Linear);
}

inline Fixture fixture_s4() {
  return detail::make_fixture(
      "S4", "S4 hidden in the Ashkin-Teller chain at the four-state Potts point",
      v4_subgroup({"(0,0)", "(1,0)", "(0,1)", "(1,1)"}),
      {{1, 1, 2, 0, 0}, {0, 0, 0, 1, 1}, {0, 0, 0, 1, 1}, {0, 0, 0, 1, 1}},
      {{1, 1, 0, 1}, {1, 2, 2, 1}, {1, 3, 4, 1}, {1, 4, 3, 1},
       {2, 2, 0, 1}, {2, 2, 1, 1}, {2, 2, 2, 1}, {2, 3, 3, 1}, {2, 3, 4, 1}, {2, 4, 3, 1}, {2, 4, 4, 1},
       {3, 3, 0, 1}, {3, 3, 2, 1}, {3, 3, 3, 1}, {3, 3, 4, 1},
       {4, 4, 0, 1}, {4, 4, 2, 1}, {4, 4, 3, 1}, {4, 4, 4, 1},
       {3, 4, 1, 1}, {3, 4, 2, 1}, {3, 4, 3, 1}, {3, 4, 4, 1}},
      {{1, 1, 1, 1, 1}, {1, 1, -1, -1, 1}, {2, 2, 0, 0, -1}, {3, -1, 1, -1, 0}, {3, -1, -1, 1, 0}},
      {1, 3, 6, 6, 8}, {0, 1, 1, 1}, Branch::Linear);
}

inline Fixture fixture_s3xs3_linear() {
  std::vector<std::array<int, 4>> e = {
      {1, 1, 0, 1}, {2, 2, 0, 1}, {3, 3, 0, 1}, {1, 2, 3, 1}, {1, 3, 2, 1}, {2, 3, 1, 1},
      {1, 4, 5, 1}, {1, 5, 4, 1}, {1, 6, 6, 1}, {1, 7, 7, 1}, {1, 8, 8, 1},
      {2, 4, 4, 1}, {2, 5, 5, 1}, {2, 6, 7, 1}, {2, 7, 6, 1}, {2, 8, 8, 1},
      {3, 4, 5, 1}, {3, 5, 4, 1}, {3, 6, 7, 1}, {3, 7, 6, 1}, {3, 8, 8, 1},
      {4, 4, 0, 1}, {4, 4, 2, 1}, {4, 4, 4, 1}, {5, 5, 0, 1}, {5, 5, 2, 1}, {5, 5, 4, 1},
      {4, 5, 1, 1}, {4, 5, 3, 1}, {4, 5, 5, 1},
      {6, 6, 0, 1}, {6, 6, 1, 1}, {6, 6, 6, 1}, {7, 7, 0, 1}, {7, 7, 1, 1}, {7, 7, 6, 1},
      {6, 7, 2, 1}, {6, 7, 3, 1}, {6, 7, 7, 1},
      {4, 6, 8, 1}, {4, 7, 8, 1}, {5, 6, 8, 1}, {5, 7, 8, 1},
      {4, 8, 6, 1}, {4, 8, 7, 1}, {4, 8, 8, 1}, {5, 8, 6, 1}, {5, 8, 7, 1}, {5, 8, 8, 1},
      {6, 8, 4, 1}, {6, 8, 5, 1}, {6, 8, 8, 1}, {7, 8, 4, 1}, {7, 8, 5, 1}, {7, 8, 8, 1}};
  for (int k = 0; k < 9; ++k) e.push_back({8, 8, k, 1});
  return detail::make_fixture(
      "S3xS3-linear", "S3 x S3 hidden in the three-state quantum torus chain at theta = pi/6", torus_subgroup(),
      {{1, 0, 0, 1, 0, 0, 0, 0, 0},
       {0, 1, 1, 0, 0, 0, 0, 0, 0},
       {0, 0, 0, 0, 0, 0, 1, 1, 0},
       {0, 0, 0, 0, 1, 1, 0, 0, 0},
       {0, 0, 0, 0, 0, 0, 0, 0, 1},
       {0, 0, 0, 0, 0, 0, 0, 0, 1}},
      e,
      {{1, 1, 1, 1, 1, 1, 1, 1, 1},
       {1, 1, 1, 1, -1, 1, -1, 1, -1},
       {1, 1, 1, 1, 1, -1, 1, -1, -1},
       {1, 1, 1, 1, -1, -1, -1, -1, 1},
       {2, 2, -1, -1, 2, 0, -1, 0, 0},
       {2, 2, -1, -1, -2, 0, 1, 0, 0},
       {2, -1, 2, -1, 0, 2, 0, -1, 0},
       {2, -1, 2, -1, 0, -2, 0, 1, 0},
       {4, -2, -2, 1, 0, 0, 0, 0, 0}},
      {1, 2, 2, 4, 3, 3, 6, 6, 9}, {0, 2, 1, 3, 3, 8}, Branch::Linear);
}

inline Fixture fixture_s3xs3_corep() {
  return detail::make_fixture(
      "S3xS3-corep", "magnetic reading of the quantum torus chain at theta = pi/6", torus_subgroup(),
      {{1, 0, 0, 0, 0},
       {0, 1, 0, 0, 0},
       {0, 0, 1, 0, 0},
       {0, 0, 0, 1, 0},
       {0, 0, 0, 0, 1},
       {0, 0, 0, 0, 1}},
      {{1, 1, 0, 1}, {1, 2, 2, 1}, {1, 3, 3, 1}, {1, 4, 4, 1},
       {2, 2, 0, 1}, {2, 2, 1, 1}, {2, 2, 2, 1}, {3, 3, 0, 1}, {3, 3, 1, 1}, {3, 3, 3, 1}, {2, 3, 4, 1},
       {2, 4, 4, 1}, {2, 4, 3, 2}, {3, 4, 4, 1}, {3, 4, 2, 2},
       {4, 4, 4, 1}, {4, 4, 0, 2}, {4, 4, 1, 2}, {4, 4, 2, 2}, {4, 4, 3, 2}},
      {{1, 1, 1, 1, 1}, {1, 1, 1, 1, -1}, {2, -1, -1, 2, 0}, {2, -1, 2, -1, 0}, {4, 1, -2, -2, 0}},
      {1, 4, 2, 2, 9}, {0, 3, 2, 1, 1, 4}, Branch::Corep, std::vector<int>{1, 1, 1, 1, 2});
}

namespace detail {

inline std::vector<std::array<int, 4>> torus_rank6_upper(bool z4) {
  std::vector<std::array<int, 4>> e;
  if (z4) {
    e = {{1, 1, 2, 1}, {1, 2, 3, 1}, {1, 3, 0, 1}, {2, 2, 0, 1}, {2, 3, 1, 1}, {3, 3, 2, 1}};
  } else {
    e = {{1, 1, 0, 1}, {2, 2, 0, 1}, {3, 3, 0, 1}, {1, 2, 3, 1}, {2, 3, 1, 1}, {1, 3, 2, 1}};
  }
  for (int a = 1; a <= 3; ++a) {
    e.push_back({a, 4, 4, 1});
    e.push_back({a, 5, 5, 1});
  }
  for (int k = 0; k <= 4; ++k) e.push_back({4, 4, k, 1});
  e.push_back({4, 4, 5, 2});
  e.push_back({4, 5, 4, 2});
  e.push_back({4, 5, 5, 2});
  for (int k : {0, 1, 2, 3, 5}) e.push_back({5, 5, k, 1});
  e.push_back({5, 5, 4, 2});
  return e;
}

inline const std::vector<std::vector<int>>& torus_rank6_branching() {
  static const std::vector<std::vector<int>> b = {{1, 0, 1, 0, 0, 0}, {0, 1, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1},
                                                  {0, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 1, 0}};
  return b;
}

}  // namespace detail

inline Fixture fixture_z3sqz4() {
  const cplx i(0.0, 1.0);
  return detail::make_fixture(
      "Z3sqZ4", "Z3^2 x| Z4 hidden in the quantum torus chain at theta = pi/4", torus_subgroup(),
      detail::torus_rank6_branching(), detail::torus_rank6_upper(true),
      {{1, 1, 1, 1, 1, 1}, {1, 1, 1, -1, i, -i}, {1, 1, 1, 1, -1, -1}, {1, 1, 1, -1, -i, i},
       {4, 1, -2, 0, 0, 0}, {4, -2, 1, 0, 0, 0}},
      {1, 4, 4, 9, 9, 9}, {0, 2, 2, 1, 1, 3}, Branch::Linear);
}

inline Fixture fixture_qtc_sd_spurious() {
  Fixture f = detail::make_fixture(
      "QTC-SD-spurious", "consistent rank-6 ring at theta = pi/4 with no realizing group", torus_subgroup(),
      detail::torus_rank6_branching(), detail::torus_rank6_upper(false),
      {{1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, -1, -1}, {1, 1, 1, -1, -1, 1}, {1, 1, 1, -1, 1, -1},
       {4, 1, -2, 0, 0, 0}, {4, -2, 1, 0, 0, 0}},
      {1, 4, 4, 9, 9, 9}, {0, 2, 2, 1, 1, 5}, Branch::Linear);
  f.group_status = "NotAGroup";
  return f;
}

inline std::vector<Fixture> all_fixtures() {
  return {fixture_s3(),           fixture_s3_corep(),    fixture_d4(),     fixture_s4(),
          fixture_s3xs3_linear(), fixture_s3xs3_corep(), fixture_z3sqz4(), fixture_qtc_sd_spurious()};
}

inline Fixture fixture_by_name(const std::string& name) {
  for (auto& f : all_fixtures())
    if (f.name == name) return f;
  throw Error(ErrorKind::ConfigError, "unknown fixture '" + name + "'");
}

/** @brief Itemized comparison of a bootstrap solution with a fixture. */
struct MatchReport {
  std::string fixture;
  bool rank = false;
  bool branch = false;
  bool branching = false;
  bool fusion = false;
  bool characters = false;
  bool class_sizes = false;
  std::vector<int> relabeling;
  std::vector<std::string> notes;

  bool all() const { return rank && branch && branching && fusion && characters && class_sizes; }
};

/** @brief Relabeling q (solution index -> fixture index, 0 fixed) carrying B and N onto the fixture's. */
inline std::optional<std::vector<int>> find_relabeling(const BranchingMatrix& b, const FusionTensor& n,
                                                       const BranchingMatrix& fb, const FusionTensor& fn) {
  if (b.rows != fb.rows || b.cols != fb.cols || n.rank != fn.rank || n.rank != b.cols) return std::nullopt;
  const int r = b.cols;
  std::vector<int> q(r, -1);
  std::vector<bool> used(r, false);
  std::optional<std::vector<int>> found;
  std::function<void(int)> rec = [&](int a) {
    if (found) return;
    if (a == r) {
      if (n.relabel(q) == fn) found = q;
      return;
    }
    for (int t = 0; t < r; ++t) {
      if (used[t] || (a == 0) != (t == 0) || b.column(a) != fb.column(t)) continue;
      used[t] = true;
      q[a] = t;
      rec(a + 1);
      used[t] = false;
    }
  };
  rec(0);
  return found;
}

inline MatchReport verify_against_fixture(const BootstrapSolution& s, const Fixture& f) {
  MatchReport rep;
  rep.fixture = f.name;
  rep.rank = s.rank == f.rank();
  rep.branch = s.branch == f.branch;
  if (!rep.rank) {
    rep.notes.push_back("rank " + std::to_string(s.rank) + " vs " + std::to_string(f.rank()));
    return rep;
  }
  if (!rep.branch) rep.notes.push_back(std::string("branch ") + to_string(s.branch) + " vs " + to_string(f.branch));
  if (s.branching.rows != f.branching.rows) {
    rep.notes.push_back("subgroup irrep count differs");
    return rep;
  }
  const auto q = find_relabeling(s.branching, s.ring.fusion, f.branching, f.ring.fusion);
  if (!q) {
    // report which part fails: branching columns alone, or fusion too
    std::vector<std::vector<int>> sc, fc;
    for (int a = 0; a < s.rank; ++a) sc.push_back(s.branching.column(a));
    for (int a = 0; a < f.rank(); ++a) fc.push_back(f.branching.column(a));
    std::sort(sc.begin(), sc.end());
    std::sort(fc.begin(), fc.end());
    rep.branching = sc == fc;
    rep.notes.push_back(rep.branching ? "fusion differs under every column relabeling" : "branching columns differ");
    return rep;
  }
  rep.branching = true;
  rep.fusion = true;
  rep.relabeling = *q;
  if (!s.ring.characters || !f.ring.characters) {
    rep.notes.push_back("character table missing");
    return rep;
  }
  Eigen::MatrixXcd moved(s.ring.characters->entries.rows(), s.ring.characters->entries.cols());
  for (int a = 0; a < s.rank; ++a) moved.row((*q)[a]) = s.ring.characters->entries.row(a);
  const auto p = match_columns(f.ring.characters->entries, moved, 1e-6);
  if (!p) {
    rep.notes.push_back("character columns differ");
    return rep;
  }
  rep.characters = true;
  rep.class_sizes = true;
  for (size_t c = 0; c < p->size(); ++c)
    if (f.ring.characters->class_sizes[c] != s.ring.characters->class_sizes[(*p)[c]]) rep.class_sizes = false;
  if (!rep.class_sizes) rep.notes.push_back("class sizes differ");
  return rep;
}

inline MatchReport verify_against_fixture(const BootstrapSolution& s, const std::string& name) {
  return verify_against_fixture(s, fixture_by_name(name));
}

}  // namespace hsb
