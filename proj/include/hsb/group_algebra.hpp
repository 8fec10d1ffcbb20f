#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "hsb/errors.hpp"

namespace hsb {

using cplx = std::complex<double>;

/** @brief Tolerance used whenever a floating value must snap to an integer. */
inline constexpr double kIntegerSnapTol = 1e-6;

/** @brief Returns true and writes the nearest integer if x is within tol of it. */
inline bool snap_integer(double x, long long& out, double tol = kIntegerSnapTol) {
  const double r = std::round(x);
  if (std::abs(x - r) > tol) return false;
  out = static_cast<long long>(r);
  return true;
}

/** @brief Dense row-major integer matrix with lexicographic ordering. */
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;

  IntMatrix() = default;
  IntMatrix(int r, int c, int fill = 0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  static IntMatrix from_rows(const std::vector<std::vector<int>>& rws) {
    IntMatrix m(static_cast<int>(rws.size()), rws.empty() ? 0 : static_cast<int>(rws[0].size()));
    for (int i = 0; i < m.rows; ++i) {
      if (static_cast<int>(rws[i].size()) != m.cols) throw Error(ErrorKind::DimensionMismatch, "ragged rows");
      for (int j = 0; j < m.cols; ++j) m(i, j) = rws[i][j];
    }
    return m;
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  int& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  int operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  std::vector<int> column(int c) const {
    std::vector<int> v(rows);
    for (int r = 0; r < rows; ++r) v[r] = (*this)(r, c);
    return v;
  }

  /** @brief Column-permuted copy: new column p[c] receives old column c. */
  IntMatrix permute_columns(const std::vector<int>& p) const {
    IntMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, p[c]) = (*this)(r, c);
    return m;
  }

  auto operator<=>(const IntMatrix&) const = default;
  bool operator==(const IntMatrix&) const = default;
};

using BranchingMatrix = IntMatrix;

/** @brief Fusion multiplicities N[i][j][k] = N^{k}_{ij} stored densely. */
struct FusionTensor {
  int rank = 0;
  std::vector<int> data;

  FusionTensor() = default;
  explicit FusionTensor(int r) : rank(r), data(static_cast<size_t>(r) * r * r, 0) {}

  int& operator()(int i, int j, int k) { return data[(static_cast<size_t>(i) * rank + j) * rank + k]; }
  int operator()(int i, int j, int k) const { return data[(static_cast<size_t>(i) * rank + j) * rank + k]; }

  /** @brief Fusion matrix (N_i)_{jk} = N^{k}_{ij}. */
  Eigen::MatrixXd matrix(int i) const {
    Eigen::MatrixXd m(rank, rank);
    for (int j = 0; j < rank; ++j)
      for (int k = 0; k < rank; ++k) m(j, k) = (*this)(i, j, k);
    return m;
  }

  /** @brief Relabelled copy: old index a becomes p[a] in every slot. */
  FusionTensor relabel(const std::vector<int>& p) const {
    FusionTensor out(rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j)
        for (int k = 0; k < rank; ++k) out(p[i], p[j], p[k]) = (*this)(i, j, k);
    return out;
  }

  auto operator<=>(const FusionTensor&) const = default;
  bool operator==(const FusionTensor&) const = default;
};

/** @brief Builds a commutative fusion tensor from entries (i,j,k,v); unit rules are filled in. */
inline FusionTensor fusion_from_entries(int rank, const std::vector<std::array<int, 4>>& entries) {
  FusionTensor n(rank);
  for (int a = 0; a < rank; ++a) {
    n(0, a, a) = 1;
    n(a, 0, a) = 1;
  }
  for (const auto& e : entries) {
    n(e[0], e[1], e[2]) = e[3];
    n(e[1], e[0], e[2]) = e[3];
  }
  return n;
}

/** @brief Group-ring fusion of an abelian group given its irrep product table. */
inline FusionTensor abelian_fusion(const std::vector<std::vector<int>>& product) {
  const int r = static_cast<int>(product.size());
  FusionTensor n(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) n(i, j, product[i][j]) = 1;
  return n;
}

/** @brief Character values over classes together with class sizes. */
struct CharacterTable {
  Eigen::MatrixXcd entries;
  std::vector<long long> class_sizes;

  long long group_order() const {
    return std::accumulate(class_sizes.begin(), class_sizes.end(), 0LL);
  }
};

/** @brief Irrep dimensions and fusion data of a (candidate) group. */
struct RepTheory {
  std::vector<int> dims;
  FusionTensor fusion;
  std::optional<CharacterTable> characters;
  std::optional<long long> group_order;
  std::optional<std::vector<int>> weight_divisors;

  int rank() const { return static_cast<int>(dims.size()); }
};

/** @brief Involution alpha -> dual alpha on irrep labels. */
struct DualMap {
  std::vector<int> dual;
  int operator()(int a) const { return dual[a]; }
};

/** @brief (1/|G|) sum_c |c| f(c) conj(g(c)). */
inline cplx inner_product(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                          const std::vector<long long>& class_sizes, long long group_order) {
  if (f.size() != g.size() || f.size() != static_cast<Eigen::Index>(class_sizes.size()))
    throw Error(ErrorKind::InvalidClassData, "class function length mismatch");
  const long long total = std::accumulate(class_sizes.begin(), class_sizes.end(), 0LL);
  if (total != group_order) throw Error(ErrorKind::InvalidClassData, "group order differs from sum of class sizes");
  cplx s = 0;
  for (Eigen::Index c = 0; c < f.size(); ++c) s += static_cast<double>(class_sizes[c]) * f(c) * std::conj(g(c));
  return s / static_cast<double>(group_order);
}

namespace detail {

inline std::vector<int> unit_divisors(const std::optional<std::vector<int>>& mu, int rank) {
  if (!mu) return std::vector<int>(rank, 1);
  if (static_cast<int>(mu->size()) != rank) throw Error(ErrorKind::InvalidClassData, "weight divisor length");
  for (int m : *mu)
    if (m != 1 && m != 2 && m != 4) throw Error(ErrorKind::InvalidClassData, "weight divisor must be 1, 2 or 4");
  return *mu;
}

}  // namespace detail

/** @brief N^{k}_{ij} = <chi_i chi_j, chi_k> / mu_k, snapped to non-negative integers. */
inline FusionTensor verlinde_fusion(const CharacterTable& table,
                                    const std::optional<std::vector<int>>& weight_divisors = std::nullopt) {
  const int r = static_cast<int>(table.entries.rows());
  const auto mu = detail::unit_divisors(weight_divisors, r);
  const long long order = table.group_order();
  FusionTensor n(r);
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      const Eigen::VectorXcd prod = table.entries.row(i).transpose().cwiseProduct(table.entries.row(j).transpose());
      for (int k = 0; k < r; ++k) {
        const cplx v = inner_product(prod, table.entries.row(k).transpose(), table.class_sizes, order) /
                       static_cast<double>(mu[k]);
        long long q = 0;
        if (std::abs(v.imag()) > kIntegerSnapTol || !snap_integer(v.real(), q) || q < 0)
          throw Error(ErrorKind::NotAFusionRing, "non-integer Verlinde coefficient");
        n(i, j, k) = static_cast<int>(q);
        n(j, i, k) = static_cast<int>(q);
      }
    }
  }
  return n;
}

/** @brief Class sizes and order from column orthogonality; mu enables the corepresentation weighting. */
struct ClassData {
  std::vector<long long> class_sizes;
  long long group_order = 0;
};

inline ClassData class_sizes_from_characters(const Eigen::MatrixXcd& entries,
                                             const std::optional<std::vector<int>>& weight_divisors = std::nullopt) {
  const int r = static_cast<int>(entries.rows());
  if (entries.cols() != r) throw Error(ErrorKind::NotAGroupTable, "character table not square");
  for (int c = 0; c < r; ++c)
    if (std::abs(entries(0, c) - cplx(1, 0)) > kIntegerSnapTol)
      throw Error(ErrorKind::NotAGroupTable, "trivial row is not all ones");
  const auto mu = detail::unit_divisors(weight_divisors, r);
  double order_f = 0;
  for (int a = 0; a < r; ++a) order_f += std::norm(entries(a, 0)) / mu[a];
  ClassData out;
  if (!snap_integer(order_f, out.group_order) || out.group_order <= 0)
    throw Error(ErrorKind::NotAGroupTable, "non-integer group order");
  long long total = 0;
  for (int c = 0; c < r; ++c) {
    double s = 0;
    for (int a = 0; a < r; ++a) s += std::norm(entries(a, c)) / mu[a];
    long long size = 0;
    if (s <= 0 || !snap_integer(static_cast<double>(out.group_order) / s, size) || size <= 0)
      throw Error(ErrorKind::NotAGroupTable, "non-integer class size");
    out.class_sizes.push_back(size);
    total += size;
  }
  if (total != out.group_order) throw Error(ErrorKind::NotAGroupTable, "class sizes do not sum to the order");
  return out;
}

/** @brief Reorders columns: the column closest to dims first, the rest lexicographically by rounded values. */
inline Eigen::MatrixXcd canonical_column_order(const Eigen::MatrixXcd& cols, const std::vector<int>& dims) {
  const int n = static_cast<int>(cols.cols());
  const int r = static_cast<int>(cols.rows());
  int id_col = 0;
  double best = 1e300;
  for (int c = 0; c < n; ++c) {
    double d = 0;
    for (int a = 0; a < r; ++a) d += std::abs(cols(a, c) - cplx(dims[a], 0));
    if (d < best) {
      best = d;
      id_col = c;
    }
  }
  auto key = [&](int c) {
    std::vector<std::pair<long long, long long>> k(r);
    for (int a = 0; a < r; ++a)
      k[a] = {std::llround(cols(a, c).real() * 1e6), std::llround(cols(a, c).imag() * 1e6)};
    return k;
  };
  std::vector<int> order;
  for (int c = 0; c < n; ++c)
    if (c != id_col) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  order.insert(order.begin(), id_col);
  Eigen::MatrixXcd out(r, n);
  for (int c = 0; c < n; ++c) out.col(c) = cols.col(order[c]);
  return out;
}

/** @brief Common eigenvectors of all fusion matrices, each normalized to 1 on the trivial irrep. */
inline Eigen::MatrixXcd joint_character_columns(const FusionTensor& fusion, const std::vector<int>& dims) {
  const int r = fusion.rank;
  if (r == 1) return Eigen::MatrixXcd::Ones(1, 1);
  std::vector<Eigen::MatrixXd> mats(r);
  for (int i = 0; i < r; ++i) mats[i] = fusion.matrix(i);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if ((mats[i] * mats[j] - mats[j] * mats[i]).cwiseAbs().maxCoeff() > 0.5)
        throw Error(ErrorKind::InvalidRing, "fusion matrices do not commute");

  for (int attempt = 0; attempt < 5; ++attempt) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + static_cast<unsigned long long>(attempt));
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, r);
    for (int i = 1; i < r; ++i) a += coef(rng) * mats[i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) continue;
    Eigen::MatrixXcd v = es.eigenvectors();
    bool ok = true;
    for (int c = 0; c < r && ok; ++c) {
      if (std::abs(v(0, c)) < 1e-8) {
        ok = false;
        break;
      }
      v.col(c) /= v(0, c);
      const double scale = std::max(1.0, v.col(c).norm());
      for (int i = 0; i < r && ok; ++i) {
        const Eigen::VectorXcd res = mats[i].cast<cplx>() * v.col(c) - v(i, c) * v.col(c);
        if (res.norm() > 1e-8 * scale * std::max(1.0, std::abs(v(i, c)))) ok = false;
      }
    }
    for (int c = 0; c < r && ok; ++c)
      for (int d = c + 1; d < r && ok; ++d)
        if ((v.col(c) - v.col(d)).cwiseAbs().maxCoeff() < 1e-6) ok = false;
    if (ok) return canonical_column_order(v, dims);
  }
  throw Error(ErrorKind::DegenerateSpectrum, "no joint eigenbasis found after 5 seeds");
}

/** @brief Character table obtained by simultaneous diagonalization of the fusion matrices. */
inline CharacterTable characters_from_fusion(const RepTheory& ring) {
  CharacterTable t;
  t.entries = joint_character_columns(ring.fusion, ring.dims);
  const ClassData cd = class_sizes_from_characters(t.entries, ring.weight_divisors);
  t.class_sizes = cd.class_sizes;
  return t;
}

/** @brief Permutation p with a.col(c) ~ b.col(p[c]) within tol, or nullopt. */
inline std::optional<std::vector<int>> match_columns(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                     double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::nullopt;
  const int n = static_cast<int>(a.cols());
  std::vector<int> p(n, -1);
  std::vector<bool> used(n, false);
  std::function<bool(int)> rec = [&](int c) {
    if (c == n) return true;
    for (int d = 0; d < n; ++d) {
      if (used[d] || (a.col(c) - b.col(d)).cwiseAbs().maxCoeff() > tol) continue;
      used[d] = true;
      p[c] = d;
      if (rec(c + 1)) return true;
      used[d] = false;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return p;
}

/** @brief Itemized fusion-ring axiom checks. */
struct FusionValidation {
  bool integral = true;
  bool unity = true;
  bool commutativity = true;
  bool associativity = true;
  bool dimension = true;
  bool rigidity = true;

  bool axioms() const { return integral && unity && commutativity && associativity && dimension; }
  bool all() const { return axioms() && rigidity; }

  std::vector<std::string> failures() const {
    std::vector<std::string> f;
    if (!integral) f.push_back("integrality");
    if (!unity) f.push_back("unity");
    if (!commutativity) f.push_back("commutativity");
    if (!associativity) f.push_back("associativity");
    if (!dimension) f.push_back("dimension");
    if (!rigidity) f.push_back("rigidity");
    return f;
  }
};

/** @brief Dual partner of each irrep, or nullopt if some irrep has zero or several partners. */
inline std::optional<std::vector<int>> dual_partners(const FusionTensor& n) {
  std::vector<int> dual(n.rank, -1);
  for (int i = 0; i < n.rank; ++i) {
    for (int j = 0; j < n.rank; ++j) {
      if (n(i, j, 0) <= 0) continue;
      if (dual[i] != -1) return std::nullopt;
      dual[i] = j;
    }
    if (dual[i] == -1) return std::nullopt;
  }
  return dual;
}

inline FusionValidation validate_fusion_ring(const RepTheory& ring) {
  FusionValidation v;
  const FusionTensor& n = ring.fusion;
  const int r = n.rank;
  if (r != ring.rank() || r == 0) {
    v.integral = v.unity = v.commutativity = v.associativity = v.dimension = v.rigidity = false;
    return v;
  }
  for (int x : n.data)
    if (x < 0) v.integral = false;
  if (ring.dims[0] != 1) v.unity = false;
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k)
      if (n(0, j, k) != (j == k ? 1 : 0) || n(j, 0, k) != (j == k ? 1 : 0)) v.unity = false;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        if (n(i, j, k) != n(j, i, k)) v.commutativity = false;
  for (int i = 0; i < r && v.associativity; ++i)
    for (int j = 0; j < r && v.associativity; ++j)
      for (int l = 0; l < r && v.associativity; ++l)
        for (int m = 0; m < r; ++m) {
          long long lhs = 0, rhs = 0;
          for (int k = 0; k < r; ++k) {
            lhs += static_cast<long long>(n(i, j, k)) * n(k, l, m);
            rhs += static_cast<long long>(n(j, l, k)) * n(i, k, m);
          }
          if (lhs != rhs) {
            v.associativity = false;
            break;
          }
        }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      long long s = 0;
      for (int k = 0; k < r; ++k) s += static_cast<long long>(n(i, j, k)) * ring.dims[k];
      if (s != static_cast<long long>(ring.dims[i]) * ring.dims[j]) v.dimension = false;
    }
  const auto dual = dual_partners(n);
  if (!dual) {
    v.rigidity = false;
  } else {
    const auto& d = *dual;
    for (int i = 0; i < r; ++i) {
      if (n(i, d[i], 0) != 1 || d[d[i]] != i) v.rigidity = false;
    }
    if (v.rigidity && d[0] != 0) v.rigidity = false;
    for (int i = 0; i < r && v.rigidity; ++i)
      for (int j = 0; j < r && v.rigidity; ++j)
        for (int k = 0; k < r; ++k)
          if (n(i, j, k) != n(d[j], d[i], d[k])) {
            v.rigidity = false;
            break;
          }
  }
  return v;
}

inline DualMap dual_map(const RepTheory& ring) {
  const auto d = dual_partners(ring.fusion);
  if (!d) throw Error(ErrorKind::NotRigid, "irrep without a unique dual");
  for (int i = 0; i < ring.rank(); ++i)
    if (ring.fusion(i, (*d)[i], 0) != 1) throw Error(ErrorKind::NotRigid, "trivial irrep appears more than once");
  return DualMap{*d};
}

/** @brief Restriction multiplicities b = <chi_lambda, Res chi_alpha>_N. */
inline BranchingMatrix branching_from_characters(const CharacterTable& g_table, const CharacterTable& n_table,
                                                 const std::vector<int>& class_embedding) {
  const int nc = static_cast<int>(n_table.entries.cols());
  if (static_cast<int>(class_embedding.size()) != nc)
    throw Error(ErrorKind::InconsistentEmbedding, "embedding must cover every subgroup class");
  const int rn = static_cast<int>(n_table.entries.rows());
  const int rg = static_cast<int>(g_table.entries.rows());
  BranchingMatrix b(rn, rg);
  const long long order = n_table.group_order();
  for (int l = 0; l < rn; ++l)
    for (int a = 0; a < rg; ++a) {
      Eigen::VectorXcd res(nc);
      for (int c = 0; c < nc; ++c) res(c) = g_table.entries(a, class_embedding[c]);
      const cplx v = inner_product(res, n_table.entries.row(l).transpose(), n_table.class_sizes, order);
      long long q = 0;
      if (std::abs(v.imag()) > kIntegerSnapTol || !snap_integer(v.real(), q) || q < 0)
        throw Error(ErrorKind::InconsistentEmbedding, "non-integer branching multiplicity");
      b(l, a) = static_cast<int>(q);
    }
  return b;
}

/** @brief Max |sum N^{c}_{ab} b_{a,i} b_{b,j} - sum_k N^{k}_{ij} b_{c,k}| over i, j, c. */
inline long long monoidality_residual(const BranchingMatrix& b, const RepTheory& n_ring, const RepTheory& g_ring) {
  const int rn = b.rows;
  const int rg = b.cols;
  if (n_ring.rank() != rn || g_ring.rank() != rg) throw Error(ErrorKind::DimensionMismatch, "monoidality shapes");
  long long worst = 0;
  for (int i = 0; i < rg; ++i)
    for (int j = 0; j < rg; ++j)
      for (int c = 0; c < rn; ++c) {
        long long lhs = 0, rhs = 0;
        for (int la = 0; la < rn; ++la) {
          if (b(la, i) == 0) continue;
          for (int lb = 0; lb < rn; ++lb)
            lhs += static_cast<long long>(n_ring.fusion(la, lb, c)) * b(la, i) * b(lb, j);
        }
        for (int k = 0; k < rg; ++k) rhs += static_cast<long long>(g_ring.fusion(i, j, k)) * b(c, k);
        worst = std::max(worst, std::llabs(lhs - rhs));
      }
  return worst;
}

inline std::vector<int> irrep_dims_from_branching(const BranchingMatrix& b, const std::vector<int>& d_lambda) {
  if (static_cast<int>(d_lambda.size()) != b.rows) throw Error(ErrorKind::DimensionMismatch, "d_lambda length");
  std::vector<int> d(b.cols, 0);
  for (int a = 0; a < b.cols; ++a) {
    for (int l = 0; l < b.rows; ++l) d[a] += b(l, a) * d_lambda[l];
    if (d[a] < 1) throw Error(ErrorKind::EmptyIrrep, "zero branching column");
  }
  return d;
}

}  // namespace hsb
