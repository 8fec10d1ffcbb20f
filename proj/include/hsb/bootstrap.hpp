#pragma once

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hsb/constraints.hpp"
#include "hsb/group_algebra.hpp"

namespace hsb {

/** @brief Interpretation attached to a bootstrap solution. */
enum class Branch { Linear, Corep, ProjectiveSuspected };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Linear: return "Linear";
    case Branch::Corep: return "Corep";
    case Branch::ProjectiveSuspected: return "ProjectiveSuspected";
  }
  return "Unknown";
}

/** @brief Equivalence classes as vertices, inter-class positivity as edges. */
struct QuotientGraph {
  int n = 0;
  std::vector<std::vector<bool>> adj;
};

/** @brief One candidate hidden-group representation theory. */
struct BootstrapSolution {
  int rank = 0;
  BranchingMatrix branching;
  RepTheory ring;
  Branch branch = Branch::ProjectiveSuspected;
  std::optional<long long> group_order;
  std::vector<int> corep_subset;
  std::vector<std::string> diagnostics;
};

struct BootstrapOptions {
  int r_min = 1;
  int r_max = 16;
  int b_max = 3;
  bool linear = true;
  bool corep = true;
};

/** @brief Solutions grouped by branch, each at its minimal feasible rank. */
struct BootstrapResult {
  std::optional<int> linear_rank;
  std::optional<int> corep_rank;
  std::vector<BootstrapSolution> linear;
  std::vector<BootstrapSolution> corep;
  std::vector<BootstrapSolution> projective;
  std::vector<BranchingMatrix> surviving_candidates;
  std::map<int, int> candidates_per_rank;
};

inline std::vector<std::vector<int>> equivalence_classes(const NumericalConstraints& nc) {
  const int n = nc.n_irreps();
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (auto cls : nc.classes) {
    if (cls.empty()) throw Error(ErrorKind::BadPlateauData, "empty equivalence class");
    std::sort(cls.begin(), cls.end());
    for (int l : cls) {
      if (l < 0 || l >= n || seen[l]++) throw Error(ErrorKind::BadPlateauData, "classes do not partition the irreps");
    }
    out.push_back(cls);
  }
  for (int l = 0; l < n; ++l)
    if (!seen[l]) throw Error(ErrorKind::BadPlateauData, "irrep missing from partition");
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

inline QuotientGraph quotient_graph(const std::vector<std::vector<int>>& classes,
                                    const std::vector<std::vector<bool>>& positive) {
  QuotientGraph g;
  g.n = static_cast<int>(classes.size());
  g.adj.assign(g.n, std::vector<bool>(g.n, false));
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int la : classes[a])
        for (int lb : classes[b])
          if (positive[la][lb]) g.adj[a][b] = g.adj[b][a] = true;
  return g;
}

/** @brief All non-empty cliques up to max_size, ordered by size then lexicographically. */
inline std::vector<std::vector<int>> all_cliques(const QuotientGraph& g, int max_size) {
  std::vector<std::vector<int>> maximal;
  std::function<void(std::vector<int>, std::vector<int>, std::vector<int>)> bk =
      [&](std::vector<int> r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
          maximal.push_back(r);
          return;
        }
        int pivot = p.empty() ? x.front() : p.front();
        std::vector<int> cand;
        for (int v : p)
          if (!g.adj[pivot][v]) cand.push_back(v);
        for (int v : cand) {
          std::vector<int> r2 = r, p2, x2;
          r2.push_back(v);
          for (int u : p)
            if (g.adj[v][u]) p2.push_back(u);
          for (int u : x)
            if (g.adj[v][u]) x2.push_back(u);
          bk(r2, p2, x2);
          p.erase(std::find(p.begin(), p.end(), v));
          x.push_back(v);
        }
      };
  std::vector<int> all(g.n);
  std::iota(all.begin(), all.end(), 0);
  if (g.n > 0) bk({}, all, {});
  std::set<std::vector<int>> cliques;
  for (auto m : maximal) {
    std::sort(m.begin(), m.end());
    const int k = static_cast<int>(m.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> s;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) s.push_back(m[i]);
      if (static_cast<int>(s.size()) <= max_size) cliques.insert(s);
    }
  }
  std::vector<std::vector<int>> out(cliques.begin(), cliques.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

/** @brief Candidate branching columns, deduplicated and sorted in descending lexicographic order. */
inline std::vector<std::vector<int>> column_types(const std::vector<std::vector<int>>& cliques,
                                                  const std::vector<int>& bmax_per_class,
                                                  const std::vector<std::vector<int>>& classes, int n_irreps) {
  std::set<std::vector<int>> types;
  for (const auto& q : cliques) {
    std::vector<int> v(q.size(), 1);
    while (true) {
      std::vector<int> col(n_irreps, 0);
      for (size_t i = 0; i < q.size(); ++i)
        for (int l : classes[q[i]]) col[l] = v[i];
      types.insert(col);
      size_t pos = 0;
      while (pos < q.size() && v[pos] == bmax_per_class[q[pos]]) v[pos++] = 1;
      if (pos == q.size()) break;
      ++v[pos];
    }
  }
  return std::vector<std::vector<int>>(types.rbegin(), types.rend());
}

namespace detail {

inline bool matrix_passes_filters(const BranchingMatrix& b, const NumericalConstraints& nc,
                                  const std::vector<int>& bmax_class) {
  const int n = b.rows;
  const auto cls = nc.class_of();
  for (int l = 0; l < n; ++l) {
    bool covered = false;
    for (int a = 0; a < b.cols; ++a) covered |= b(l, a) > 0;
    if (!covered) return false;
  }
  for (int la = 0; la < n; ++la)
    for (int lb = la + 1; lb < n; ++lb) {
      if (!nc.positive[la][lb]) continue;
      bool realized = false;
      for (int a = 0; a < b.cols; ++a) realized |= b(la, a) > 0 && b(lb, a) > 0;
      if (!realized) return false;
    }
  for (size_t c = 0; c < nc.classes.size(); ++c) {
    if (!nc.higher_multiplicity[c] || bmax_class[c] < 2) continue;
    bool realized = false;
    for (int l : nc.classes[c])
      for (int a = 0; a < b.cols; ++a) realized |= b(l, a) >= 2;
    if (!realized) return false;
  }
  return true;
}

}  // namespace detail

/** @brief Trivial column plus every multiset of r-1 column types that passes the matrix-level filters. */
inline std::vector<BranchingMatrix> assemble_candidates(const std::vector<std::vector<int>>& types, int r,
                                                        const NumericalConstraints& nc, int b_max = 3) {
  std::vector<BranchingMatrix> out;
  const int n = nc.n_irreps();
  if (r < 1) return out;
  const auto bmax_class = class_bmax(nc, b_max);
  const int t = static_cast<int>(types.size());
  std::vector<int> pick(r - 1, 0);
  auto emit = [&]() {
    BranchingMatrix b(n, r);
    b(0, 0) = 1;
    for (int a = 1; a < r; ++a)
      for (int l = 0; l < n; ++l) b(l, a) = types[pick[a - 1]][l];
    if (detail::matrix_passes_filters(b, nc, bmax_class)) out.push_back(b);
  };
  if (r == 1) {
    emit();
    return out;
  }
  if (t == 0) return out;
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == r - 1) {
      emit();
      return;
    }
    for (int k = start; k < t; ++k) {
      pick[pos] = k;
      rec(pos + 1, k);
    }
  };
  rec(0, 0);
  return out;
}

/** @brief t_lambda = sum N^{lambda}_{ab} b_{a,i} b_{b,j}. */
inline std::vector<int> fusion_target(const BranchingMatrix& b, const RepTheory& n_ring, int i, int j) {
  const int n = b.rows;
  std::vector<int> t(n, 0);
  for (int la = 0; la < n; ++la) {
    if (b(la, i) == 0) continue;
    for (int lb = 0; lb < n; ++lb) {
      if (b(lb, j) == 0) continue;
      const int w = b(la, i) * b(lb, j);
      for (int l = 0; l < n; ++l) t[l] += n_ring.fusion(la, lb, l) * w;
    }
  }
  return t;
}

/** @brief Non-negative integer vectors x with B x = t, enumerated depth first in lexicographic order. */
inline std::vector<std::vector<int>> enumerate_decompositions(const std::vector<int>& t, const BranchingMatrix& b) {
  const int r = b.cols;
  const int n = b.rows;
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r, 0);
  std::vector<int> resid = t;
  for (int x : t)
    if (x < 0) return out;
  // later_cover[k][l]: some column >= k has support on l
  std::vector<std::vector<bool>> later(r + 1, std::vector<bool>(n, false));
  for (int k = r - 1; k >= 0; --k)
    for (int l = 0; l < n; ++l) later[k][l] = later[k + 1][l] || b(l, k) > 0;
  std::function<void(int)> rec = [&](int k) {
    for (int l = 0; l < n; ++l)
      if (resid[l] > 0 && !later[k][l]) return;
    if (k == r) {
      out.push_back(cur);
      return;
    }
    int ub = INT_MAX;
    bool any = false;
    for (int l = 0; l < n; ++l)
      if (b(l, k) > 0) {
        any = true;
        ub = std::min(ub, resid[l] / b(l, k));
      }
    if (!any) ub = 0;
    for (int c = 0; c <= ub; ++c) {
      cur[k] = c;
      for (int l = 0; l < n; ++l) resid[l] -= c * b(l, k);
      rec(k + 1);
      for (int l = 0; l < n; ++l) resid[l] += c * b(l, k);
    }
    cur[k] = 0;
  };
  rec(0);
  return out;
}

/** @brief Pair order used by the search: self pairs first, then ascending off-diagonal pairs. */
inline std::vector<std::pair<int, int>> fusion_pair_order(int r) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < r; ++i) pairs.emplace_back(i, i);
  for (int i = 1; i < r; ++i)
    for (int j = i + 1; j < r; ++j) pairs.emplace_back(i, j);
  return pairs;
}

namespace detail {

inline bool has_unique_partners(const FusionTensor& n) {
  for (int i = 0; i < n.rank; ++i) {
    int count = 0;
    for (int j = 0; j < n.rank; ++j) count += n(i, j, 0) > 0;
    if (count > 1) return false;
  }
  return true;
}

inline bool associative(const FusionTensor& n) {
  const int r = n.rank;
  for (int i = 1; i < r; ++i)
    for (int j = 1; j < r; ++j)
      for (int l = 1; l < r; ++l)
        for (int m = 0; m < r; ++m) {
          long long lhs = 0, rhs = 0;
          for (int k = 0; k < r; ++k) {
            lhs += static_cast<long long>(n(i, j, k)) * n(k, l, m);
            rhs += static_cast<long long>(n(j, l, k)) * n(i, k, m);
          }
          if (lhs != rhs) return false;
        }
  return true;
}

/** @brief Applies every permutation that only shuffles identical non-trivial columns and keeps the minimum. */
inline FusionTensor canonical_within_blocks(const BranchingMatrix& b, const FusionTensor& n) {
  const int r = b.cols;
  std::vector<std::vector<int>> blocks;
  for (int a = 1; a < r; ++a) {
    if (!blocks.empty() && b.column(blocks.back().front()) == b.column(a))
      blocks.back().push_back(a);
    else
      blocks.push_back({a});
  }
  FusionTensor best = n;
  std::vector<int> p(r);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> perms(blocks.size());
  for (size_t k = 0; k < blocks.size(); ++k) perms[k] = blocks[k];
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == blocks.size()) {
      FusionTensor cand = n.relabel(p);
      if (cand < best) best = cand;
      return;
    }
    std::vector<int> target = blocks[k];
    std::sort(target.begin(), target.end());
    do {
      for (size_t q = 0; q < blocks[k].size(); ++q) p[blocks[k][q]] = target[q];
      rec(k + 1);
    } while (std::next_permutation(target.begin(), target.end()));
    for (int a : blocks[k]) p[a] = a;
  };
  rec(0);
  return best;
}

}  // namespace detail

/** @brief Canonical representative of (B, N) over all relabelings of the non-trivial columns. */
inline std::pair<BranchingMatrix, FusionTensor> canonical_form(const BranchingMatrix& b, const FusionTensor& n) {
  const int r = b.cols;
  std::vector<int> rest(std::max(0, r - 1));
  std::iota(rest.begin(), rest.end(), 1);
  std::optional<std::pair<BranchingMatrix, FusionTensor>> best;
  do {
    std::vector<int> p(r);
    p[0] = 0;
    for (int a = 1; a < r; ++a) p[a] = rest[a - 1];
    std::pair<BranchingMatrix, FusionTensor> cand{b.permute_columns(p), n.relabel(p)};
    if (!best || cand < *best) best = cand;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return *best;
}

/** @brief Depth-first fusion assignment with partial rigidity and incremental associativity pruning. */
inline std::vector<FusionTensor> backtrack_fusion(const BranchingMatrix& b,
                                                  const std::vector<std::vector<std::vector<int>>>& lists) {
  const int r = b.cols;
  const auto pairs = fusion_pair_order(r);
  std::vector<FusionTensor> out;
  if (lists.size() != pairs.size()) throw Error(ErrorKind::DimensionMismatch, "one decomposition list per pair");
  for (const auto& l : lists)
    if (l.empty()) return out;
  FusionTensor n(r);
  std::vector<std::vector<bool>> assigned(r, std::vector<bool>(r, false));
  for (int a = 0; a < r; ++a) {
    n(0, a, a) = n(a, 0, a) = 1;
    assigned[0][a] = assigned[a][0] = true;
  }
  std::vector<int> partner(r, -1);
  partner[0] = 0;

  auto triple_ok = [&](int i, int j, int l) {
    if (!assigned[i][j] || !assigned[j][l]) return true;
    for (int k = 0; k < r; ++k) {
      if (n(i, j, k) > 0 && !assigned[k][l]) return true;
      if (n(j, l, k) > 0 && !assigned[i][k]) return true;
    }
    for (int m = 0; m < r; ++m) {
      long long lhs = 0, rhs = 0;
      for (int k = 0; k < r; ++k) {
        lhs += static_cast<long long>(n(i, j, k)) * n(k, l, m);
        rhs += static_cast<long long>(n(j, l, k)) * n(i, k, m);
      }
      if (lhs != rhs) return false;
    }
    return true;
  };
  auto consistent = [&]() {
    for (int i = 1; i < r; ++i)
      for (int j = 1; j < r; ++j)
        for (int l = 1; l < r; ++l)
          if (!triple_ok(i, j, l)) return false;
    return true;
  };

  std::function<void(size_t)> rec = [&](size_t p) {
    if (p == pairs.size()) {
      if (detail::associative(n)) out.push_back(n);
      return;
    }
    const auto [i, j] = pairs[p];
    for (const auto& v : lists[p]) {
      const int old_pi = partner[i], old_pj = partner[j];
      if (v[0] > 0) {
        if ((partner[i] != -1 && partner[i] != j) || (partner[j] != -1 && partner[j] != i)) continue;
        partner[i] = j;
        partner[j] = i;
      }
      for (int k = 0; k < r; ++k) n(i, j, k) = n(j, i, k) = v[k];
      assigned[i][j] = assigned[j][i] = true;
      if (consistent()) rec(p + 1);
      assigned[i][j] = assigned[j][i] = false;
      for (int k = 0; k < r; ++k) n(i, j, k) = n(j, i, k) = 0;
      partner[i] = old_pi;
      partner[j] = old_pj;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

/** @brief Corep reading with weights mu: unique partners carrying N^0 = mu and integral magnetic classes. */
inline std::optional<CharacterTable> corep_table(const RepTheory& ring, const std::vector<int>& mu,
                                                 long long unitary_order) {
  const int r = ring.rank();
  for (int i = 0; i < r; ++i) {
    int count = 0, j0 = -1;
    for (int j = 0; j < r; ++j)
      if (ring.fusion(i, j, 0) > 0) {
        ++count;
        j0 = j;
      }
    if (count != 1 || ring.fusion(i, j0, 0) != mu[i]) return std::nullopt;
  }
  try {
    CharacterTable t;
    t.entries = joint_character_columns(ring.fusion, ring.dims);
    const ClassData cd = class_sizes_from_characters(t.entries, mu);
    if (cd.group_order != unitary_order) return std::nullopt;
    t.class_sizes = cd.class_sizes;
    return t;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/**
 * @brief Induction check: sum_alpha b_{lambda,alpha} d_alpha = d_lambda [G:N] for one index shared by all rows.
 *
 * When the order of N is known the index must also reproduce sum d_alpha^2. Necessary for a linear reading.
 */
inline bool induction_balanced(const BranchingMatrix& b, const std::vector<int>& d_lambda,
                               std::optional<long long> n_order) {
  std::vector<long long> d_alpha(b.cols, 0);
  for (int a = 0; a < b.cols; ++a)
    for (int l = 0; l < b.rows; ++l) d_alpha[a] += static_cast<long long>(b(l, a)) * d_lambda[l];
  auto induced = [&](int l) {
    long long s = 0;
    for (int a = 0; a < b.cols; ++a) s += b(l, a) * d_alpha[a];
    return s;
  };
  const long long index = induced(0);
  for (int l = 1; l < b.rows; ++l)
    if (induced(l) != index * d_lambda[l]) return false;
  if (n_order) {
    long long sum_d2 = 0;
    for (long long d : d_alpha) sum_d2 += d * d;
    if (index * *n_order != sum_d2) return false;
  }
  return true;
}

/**
 * @brief True when the table forces G/Z(G) to be cyclic for a non-abelian G, which no group allows.
 *
 * Z(G) is the union of singleton classes; the irreps of G/Z(G) are those whose character equals its dimension
 * on every central class.
 */
inline bool cyclic_central_quotient(const RepTheory& ring, const CharacterTable& t) {
  const int r = ring.rank();
  bool abelian = true;
  for (int d : ring.dims) abelian &= d == 1;
  if (abelian) return false;
  std::vector<int> quotient;
  for (int a = 0; a < r; ++a) {
    bool trivial_on_center = true;
    for (int c = 0; c < r; ++c)
      if (t.class_sizes[c] == 1) trivial_on_center &= std::abs(t.entries(a, c) - cplx(ring.dims[a], 0.0)) < 1e-6;
    if (!trivial_on_center) continue;
    if (ring.dims[a] != 1) return false;
    quotient.push_back(a);
  }
  auto times = [&](int a, int b) {
    for (int k = 0; k < r; ++k)
      if (ring.fusion(a, b, k) > 0) return k;
    return 0;
  };
  for (int g : quotient) {
    int order = 1;
    for (int cur = g; cur != 0; cur = times(cur, g)) ++order;
    if (order == static_cast<int>(quotient.size())) return true;
  }
  return false;
}

}  // namespace detail

/** @brief Tags a complete ring as Linear, Corep or ProjectiveSuspected; nullopt if it violates the axioms. */
inline std::optional<BootstrapSolution> classify_solution(const BranchingMatrix& b, const FusionTensor& fusion,
                                                          const NumericalConstraints& nc, bool corep_enabled) {
  BootstrapSolution s;
  s.rank = b.cols;
  s.branching = b;
  s.ring.dims = irrep_dims_from_branching(b, nc.d_lambda);
  s.ring.fusion = fusion;
  const FusionValidation v = validate_fusion_ring(s.ring);
  if (!v.axioms()) return std::nullopt;
  if (monoidality_residual(b, nc.n_ring, s.ring) != 0) return std::nullopt;
  long long sum_d2 = 0;
  for (int d : s.ring.dims) sum_d2 += static_cast<long long>(d) * d;

  const bool balanced = detail::induction_balanced(b, nc.d_lambda, nc.n_ring.group_order);
  if (v.rigidity && !balanced) {
    s.diagnostics.push_back("rigid");
    s.diagnostics.push_back("induction_unbalanced");
  } else if (v.rigidity) {
    s.diagnostics.push_back("rigid");
    try {
      CharacterTable t = characters_from_fusion(s.ring);
      if (t.group_order() == sum_d2 && detail::cyclic_central_quotient(s.ring, t)) {
        s.diagnostics.push_back("cyclic_central_quotient");
      } else if (t.group_order() == sum_d2) {
        s.ring.characters = t;
        s.ring.group_order = sum_d2;
        s.group_order = sum_d2;
        s.branch = Branch::Linear;
        s.diagnostics.push_back("integer_class_sizes");
        return s;
      }
    } catch (const Error& e) {
      s.diagnostics.push_back(std::string("characters: ") + e.what());
    }
  } else {
    s.diagnostics.push_back("not_rigid");
  }

  if (corep_enabled && nc.unitary_order) {
    std::vector<int> even;
    for (int a = 1; a < s.ring.rank(); ++a)
      if (s.ring.dims[a] % 2 == 0) even.push_back(a);
    for (unsigned mask = 0; mask < (1u << even.size()); ++mask) {
      long long half = 0;
      std::vector<int> subset;
      std::vector<int> mu(s.ring.rank(), 1);
      for (size_t q = 0; q < even.size(); ++q)
        if (mask & (1u << q)) {
          subset.push_back(even[q]);
          mu[even[q]] = 2;
          half += static_cast<long long>(s.ring.dims[even[q]]) * s.ring.dims[even[q]];
        }
      const long long n_uni = sum_d2 - half / 2;
      if (half % 2 != 0 || n_uni != *nc.unitary_order) continue;
      auto t = detail::corep_table(s.ring, mu, n_uni);
      if (!t) continue;
      s.ring.characters = *t;
      s.ring.weight_divisors = mu;
      s.ring.group_order = n_uni;
      s.group_order = 2 * n_uni;
      s.corep_subset = subset;
      s.branch = Branch::Corep;
      s.diagnostics.push_back("corep_order_formula");
      return s;
    }
  }
  s.branch = Branch::ProjectiveSuspected;
  return s;
}

/** @brief Complete rings for one candidate branching matrix, deduplicated up to relabeling. */
inline std::vector<FusionTensor> rings_for_candidate(const BranchingMatrix& b, const RepTheory& n_ring) {
  const auto pairs = fusion_pair_order(b.cols);
  std::vector<std::vector<std::vector<int>>> lists;
  for (const auto& [i, j] : pairs) {
    lists.push_back(enumerate_decompositions(fusion_target(b, n_ring, i, j), b));
    if (lists.back().empty()) return {};
  }
  std::set<FusionTensor> uniq;
  for (const auto& n : backtrack_fusion(b, lists)) uniq.insert(detail::canonical_within_blocks(b, n));
  return std::vector<FusionTensor>(uniq.begin(), uniq.end());
}

inline BootstrapResult run_bootstrap(const NumericalConstraints& nc, const BootstrapOptions& opt = {}) {
  BootstrapResult res;
  const auto classes = equivalence_classes(nc);
  NumericalConstraints cn = nc;
  cn.classes = classes;
  const auto bmax = class_bmax(cn, opt.b_max);
  const auto graph = quotient_graph(classes, nc.positive);
  const auto cliques = all_cliques(graph, graph.n);
  const auto types = column_types(cliques, bmax, classes, nc.n_irreps());
  const bool corep_on = opt.corep && nc.unitary_order.has_value();
  bool linear_done = !opt.linear;
  bool corep_done = !corep_on;
  std::optional<int> projective_rank;

  auto key = [](const BootstrapSolution& s) { return std::make_pair(s.branching, s.ring.fusion); };
  auto by_key = [&](const BootstrapSolution& a, const BootstrapSolution& b) { return key(a) < key(b); };

  for (int r = std::max(1, opt.r_min); r <= opt.r_max && !(linear_done && corep_done); ++r) {
    const auto candidates = assemble_candidates(types, r, cn, opt.b_max);
    res.candidates_per_rank[r] = static_cast<int>(candidates.size());
    std::vector<BootstrapSolution> lin, cor, proj;
    std::vector<BranchingMatrix> surviving;
    // once only the linear branch is open and nothing else is reported, unbalanced candidates cannot contribute
    const bool linear_only = corep_done && (res.corep_rank || projective_rank);
    for (const auto& b : candidates) {
      if (linear_only && !detail::induction_balanced(b, nc.d_lambda, nc.n_ring.group_order)) continue;
      const auto rings = rings_for_candidate(b, nc.n_ring);
      if (!rings.empty()) surviving.push_back(b);
      for (const auto& n : rings) {
        auto s = classify_solution(b, n, cn, corep_on && !corep_done);
        if (!s) continue;
        if (s->branch == Branch::Linear && !linear_done) lin.push_back(*s);
        if (s->branch == Branch::Corep && !corep_done) cor.push_back(*s);
        if (s->branch == Branch::ProjectiveSuspected) proj.push_back(*s);
      }
    }
    if (!lin.empty()) {
      std::sort(lin.begin(), lin.end(), by_key);
      res.linear = lin;
      res.linear_rank = r;
      linear_done = true;
    }
    if (!cor.empty()) {
      std::sort(cor.begin(), cor.end(), by_key);
      res.corep = cor;
      res.corep_rank = r;
      corep_done = true;
    }
    if (!proj.empty() && !projective_rank) {
      std::sort(proj.begin(), proj.end(), by_key);
      res.projective = proj;
      projective_rank = r;
    }
    if (res.surviving_candidates.empty()) res.surviving_candidates = surviving;
    if (corep_on && !corep_done && 2 * *nc.unitary_order < r) corep_done = true;
  }
  if (res.linear_rank || res.corep_rank) {
    res.projective.clear();
    return res;
  }
  if (res.projective.empty() && res.surviving_candidates.empty())
    throw Error(ErrorKind::NoSolution, "no consistent candidate up to r_max");
  return res;
}

/**
 * @brief Exhaustive reference enumerator for small instances.
 *
 * Walks every integer matrix in the per-class box and every fusion vector allowed by the dimension bound,
 * then keeps rings that satisfy monoidality, associativity and partner uniqueness.
 */
inline std::vector<std::pair<BranchingMatrix, FusionTensor>> brute_force_rings(const NumericalConstraints& nc, int r,
                                                                               int b_max) {
  const int n = nc.n_irreps();
  const auto classes = equivalence_classes(nc);
  NumericalConstraints cn = nc;
  cn.classes = classes;
  const auto cls = cn.class_of();
  const auto bmax = class_bmax(cn, b_max);
  const auto graph = quotient_graph(classes, nc.positive);
  std::set<std::pair<BranchingMatrix, FusionTensor>> found;

  std::vector<std::vector<int>> columns;
  {
    std::vector<int> col(n, 0);
    std::function<void(int)> rec = [&](int l) {
      if (l == n) {
        bool nonzero = false;
        for (int x : col) nonzero |= x > 0;
        if (!nonzero) return;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c)
            if (cls[a] == cls[c] && col[a] != col[c]) return;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c)
            if (col[a] > 0 && col[c] > 0 && cls[a] != cls[c] && !graph.adj[cls[a]][cls[c]]) return;
        columns.push_back(col);
        return;
      }
      for (int v = 0; v <= bmax[cls[l]]; ++v) {
        col[l] = v;
        rec(l + 1);
      }
      col[l] = 0;
    };
    rec(0);
  }

  std::vector<int> pick(std::max(0, r - 1), 0);
  std::function<void(int)> over_b = [&](int a) {
    if (a < r - 1) {
      for (size_t k = 0; k < columns.size(); ++k) {
        pick[a] = static_cast<int>(k);
        over_b(a + 1);
      }
      return;
    }
    BranchingMatrix b(n, r);
    b(0, 0) = 1;
    for (int c = 1; c < r; ++c)
      for (int l = 0; l < n; ++l) b(l, c) = columns[pick[c - 1]][l];
    if (!detail::matrix_passes_filters(b, cn, bmax)) return;
    std::vector<int> d(r, 0);
    for (int c = 0; c < r; ++c)
      for (int l = 0; l < n; ++l) d[c] += b(l, c) * nc.d_lambda[l];

    const auto pairs = fusion_pair_order(r);
    std::vector<std::vector<std::vector<int>>> options(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      std::vector<int> v(r, 0);
      std::function<void(int, int)> box = [&](int k, int dim_left) {
        if (k == r) {
          if (dim_left != 0) return;
          for (int l = 0; l < n; ++l) {
            long long lhs = 0, rhs = 0;
            for (int la = 0; la < n; ++la)
              for (int lb = 0; lb < n; ++lb)
                lhs += static_cast<long long>(nc.n_ring.fusion(la, lb, l)) * b(la, i) * b(lb, j);
            for (int q = 0; q < r; ++q) rhs += static_cast<long long>(v[q]) * b(l, q);
            if (lhs != rhs) return;
          }
          options[p].push_back(v);
          return;
        }
        for (int x = 0; x * d[k] <= d[i] * d[j] && x * d[k] <= dim_left; ++x) {
          v[k] = x;
          box(k + 1, dim_left - x * d[k]);
        }
        v[k] = 0;
      };
      box(0, d[i] * d[j]);
      if (options[p].empty()) return;
    }
    FusionTensor nt(r);
    for (int a = 0; a < r; ++a) nt(0, a, a) = nt(a, 0, a) = 1;
    std::function<void(size_t)> prod = [&](size_t p) {
      if (p == pairs.size()) {
        if (detail::associative(nt) && detail::has_unique_partners(nt)) found.insert(canonical_form(b, nt));
        return;
      }
      const auto [i, j] = pairs[p];
      for (const auto& v : options[p]) {
        for (int k = 0; k < r; ++k) nt(i, j, k) = nt(j, i, k) = v[k];
        prod(p + 1);
      }
      for (int k = 0; k < r; ++k) nt(i, j, k) = nt(j, i, k) = 0;
    };
    prod(0);
  };
  if (r >= 1) over_b(0);
  return std::vector<std::pair<BranchingMatrix, FusionTensor>>(found.begin(), found.end());
}

/** @brief The staged search's ring set at a single rank, in the same canonical form as brute_force_rings. */
inline std::vector<std::pair<BranchingMatrix, FusionTensor>> staged_rings(const NumericalConstraints& nc, int r,
                                                                          int b_max) {
  const auto classes = equivalence_classes(nc);
  NumericalConstraints cn = nc;
  cn.classes = classes;
  const auto bmax = class_bmax(cn, b_max);
  const auto graph = quotient_graph(classes, nc.positive);
  const auto types = column_types(all_cliques(graph, graph.n), bmax, classes, nc.n_irreps());
  std::set<std::pair<BranchingMatrix, FusionTensor>> found;
  for (const auto& b : assemble_candidates(types, r, cn, b_max))
    for (const auto& n : rings_for_candidate(b, nc.n_ring)) found.insert(canonical_form(b, n));
  return std::vector<std::pair<BranchingMatrix, FusionTensor>>(found.begin(), found.end());
}

}  // namespace hsb
