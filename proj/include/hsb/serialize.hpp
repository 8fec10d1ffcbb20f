#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "hsb/bootstrap.hpp"
#include "hsb/constraints.hpp"
#include "hsb/fixtures.hpp"
#include "hsb/spectral.hpp"

namespace hsb {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline IntMatrix int_matrix_from_json(const json& j) {
  return IntMatrix::from_rows(j.get<std::vector<std::vector<int>>>());
}

/** @brief Sparse triplets [i, j, k, N^k_ij] over non-zero entries. */
inline json to_json(const FusionTensor& n) {
  json out = json::array();
  for (int i = 0; i < n.rank; ++i)
    for (int j = 0; j < n.rank; ++j)
      for (int k = 0; k < n.rank; ++k)
        if (n(i, j, k) != 0) out.push_back(json::array({i, j, k, n(i, j, k)}));
  return out;
}

inline FusionTensor fusion_from_json(const json& j, int rank) {
  FusionTensor n(rank);
  for (const auto& e : j) {
    const int i = e.at(0), a = e.at(1), k = e.at(2);
    if (i < 0 || a < 0 || k < 0 || i >= rank || a >= rank || k >= rank)
      throw Error(ErrorKind::ConfigError, "fusion entry out of range");
    n(i, a, k) = e.at(3).get<int>();
  }
  return n;
}

inline json to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXcd complex_matrix_from_json(const json& j) {
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < c; ++b) m(a, b) = complex_from_json(j.at(a).at(b));
  return m;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const CharacterTable& t) { return {{"entries", to_json(t.entries)}, {"class_sizes", t.class_sizes}}; }

inline CharacterTable character_table_from_json(const json& j) {
  CharacterTable t;
  t.entries = complex_matrix_from_json(j.at("entries"));
  t.class_sizes = j.at("class_sizes").get<std::vector<long long>>();
  return t;
}

inline json to_json(const RepTheory& r) {
  json j = {{"dims", r.dims}, {"fusion", to_json(r.fusion)}};
  if (r.characters) j["characters"] = to_json(*r.characters);
  if (r.group_order) j["group_order"] = *r.group_order;
  if (r.weight_divisors) j["weight_divisors"] = *r.weight_divisors;
  return j;
}

inline RepTheory rep_theory_from_json(const json& j) {
  RepTheory r;
  r.dims = j.at("dims").get<std::vector<int>>();
  r.fusion = fusion_from_json(j.at("fusion"), r.rank());
  if (j.contains("characters")) r.characters = character_table_from_json(j.at("characters"));
  if (j.contains("group_order")) r.group_order = j.at("group_order").get<long long>();
  if (j.contains("weight_divisors")) r.weight_divisors = j.at("weight_divisors").get<std::vector<int>>();
  return r;
}

inline Branch branch_from_string(const std::string& s) {
  if (s == "Linear") return Branch::Linear;
  if (s == "Corep") return Branch::Corep;
  if (s == "ProjectiveSuspected") return Branch::ProjectiveSuspected;
  throw Error(ErrorKind::ConfigError, "unknown branch '" + s + "'");
}

inline json to_json(const BootstrapSolution& s) {
  json j = {{"rank", s.rank},
            {"branching", to_json(s.branching)},
            {"ring", to_json(s.ring)},
            {"branch", to_string(s.branch)},
            {"corep_subset", s.corep_subset},
            {"diagnostics", s.diagnostics}};
  if (s.group_order) j["group_order"] = *s.group_order;
  return j;
}

inline BootstrapSolution solution_from_json(const json& j) {
  BootstrapSolution s;
  s.rank = j.at("rank");
  s.branching = int_matrix_from_json(j.at("branching"));
  s.ring = rep_theory_from_json(j.at("ring"));
  s.branch = branch_from_string(j.at("branch"));
  if (j.contains("group_order")) s.group_order = j.at("group_order").get<long long>();
  if (j.contains("corep_subset")) s.corep_subset = j.at("corep_subset").get<std::vector<int>>();
  if (j.contains("diagnostics")) s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return s;
}

inline json to_json(const BootstrapResult& r) {
  json j = {{"linear", json::array()}, {"corep", json::array()}, {"projective", json::array()}};
  for (const auto& s : r.linear) j["linear"].push_back(to_json(s));
  for (const auto& s : r.corep) j["corep"].push_back(to_json(s));
  for (const auto& s : r.projective) j["projective"].push_back(to_json(s));
  j["linear_rank"] = r.linear_rank ? json(*r.linear_rank) : json(nullptr);
  j["corep_rank"] = r.corep_rank ? json(*r.corep_rank) : json(nullptr);
  json per = json::object();
  for (const auto& [rank, n] : r.candidates_per_rank) per[std::to_string(rank)] = n;
  j["candidates_per_rank"] = per;
  return j;
}

inline json to_json(const PlateauMatrix& p) {
  json r = json::array();
  for (Eigen::Index a = 0; a < p.R.size(); ++a) r.push_back(p.R(a));
  return {{"schema_version", kSchemaVersion},
          {"K", to_json(p.K)},
          {"R", r},
          {"standard_error", to_json(p.standard_error)},
          {"normalized", to_json(p.normalized())},
          {"kramers_factor", p.nu},
          {"ensemble_size", p.ensemble_size},
          {"labels", p.labels},
          {"d", p.d}};
}

inline PlateauMatrix plateau_from_json(const json& j) {
  PlateauMatrix p;
  const auto k = j.at("K").get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(k.size());
  p.K.resize(n, n);
  p.standard_error = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) p.K(a, b) = k[a][b];
  if (j.contains("standard_error")) {
    const auto se = j.at("standard_error").get<std::vector<std::vector<double>>>();
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) p.standard_error(a, b) = se[a][b];
  }
  const auto r = j.at("R").get<std::vector<double>>();
  p.R = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  p.nu = j.value("kramers_factor", 1);
  p.ensemble_size = j.value("ensemble_size", 1);
  p.labels = j.value("labels", std::vector<std::string>{});
  p.d = j.at("d").get<std::vector<int>>();
  return p;
}

inline json to_json(const NumericalConstraints& nc) {
  json pos = json::array();
  for (const auto& row : nc.positive) {
    json r = json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    pos.push_back(r);
  }
  json j = {{"schema_version", kSchemaVersion},
            {"classes", nc.classes},
            {"positive", pos},
            {"multiplicity_free", nc.multiplicity_free},
            {"higher_multiplicity", nc.higher_multiplicity},
            {"ratio", nc.ratio},
            {"d_lambda", nc.d_lambda},
            {"subgroup_ring", to_json(nc.n_ring)},
            {"subgroup_dual", nc.n_dual},
            {"labels", nc.labels}};
  j["unitary_order"] = nc.unitary_order ? json(*nc.unitary_order) : json(nullptr);
  return j;
}

inline NumericalConstraints constraints_from_json(const json& j) {
  NumericalConstraints nc;
  nc.classes = j.at("classes").get<std::vector<std::vector<int>>>();
  for (const auto& row : j.at("positive")) {
    std::vector<bool> r;
    for (const auto& v : row) r.push_back(v.get<int>() != 0);
    nc.positive.push_back(r);
  }
  nc.multiplicity_free = j.at("multiplicity_free").get<std::vector<bool>>();
  nc.higher_multiplicity = j.at("higher_multiplicity").get<std::vector<bool>>();
  nc.ratio = j.at("ratio").get<std::vector<double>>();
  nc.d_lambda = j.at("d_lambda").get<std::vector<int>>();
  nc.n_ring = rep_theory_from_json(j.at("subgroup_ring"));
  nc.n_dual = j.at("subgroup_dual").get<std::vector<int>>();
  nc.labels = j.value("labels", std::vector<std::string>{});
  if (j.contains("unitary_order") && !j.at("unitary_order").is_null())
    nc.unitary_order = j.at("unitary_order").get<long long>();
  return nc;
}

inline json to_json(const Fixture& f) {
  json j = {{"schema_version", kSchemaVersion},
            {"name", f.name},
            {"description", f.description},
            {"subgroup", f.subgroup.name},
            {"subgroup_labels", f.subgroup.labels},
            {"branching", to_json(f.branching)},
            {"ring", to_json(f.ring)},
            {"branch", to_string(f.branch)},
            {"rank", f.rank()},
            {"class_embedding", f.class_embedding},
            {"group_status", f.group_status}};
  j["unitary_order"] = f.unitary_order ? json(*f.unitary_order) : json(nullptr);
  return j;
}

inline json to_json(const MatchReport& m) {
  return {{"fixture", m.fixture},         {"rank", m.rank},
          {"branch", m.branch},           {"branching", m.branching},
          {"fusion", m.fusion},           {"characters", m.characters},
          {"class_sizes", m.class_sizes}, {"match", m.all()},
          {"relabeling", m.relabeling},   {"notes", m.notes}};
}

/** @brief Sparse operator as [row, col, re, im] entries. */
inline json to_json(const SparseOp& op) {
  json entries = json::array();
  for (int c = 0; c < op.outerSize(); ++c)
    for (SparseOp::InnerIterator it(op, c); it; ++it)
      entries.push_back(json::array({it.row(), it.col(), it.value().real(), it.value().imag()}));
  return {{"rows", op.rows()}, {"cols", op.cols()}, {"entries", entries}};
}

}  // namespace hsb
