#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hsb/errors.hpp"
#include "hsb/group_algebra.hpp"
#include "hsb/subgroups.hpp"

namespace hsb {

using SparseOp = Eigen::SparseMatrix<cplx>;

enum class Model { ObrienFendley, KtSpin1, AshkinTeller, QuantumTorus, FermiHubbard };

inline const char* to_string(Model m) {
  switch (m) {
    case Model::ObrienFendley: return "obrien_fendley";
    case Model::KtSpin1: return "kt_spin1";
    case Model::AshkinTeller: return "ashkin_teller";
    case Model::QuantumTorus: return "quantum_torus";
    case Model::FermiHubbard: return "fermi_hubbard";
  }
  return "unknown";
}

inline Model model_from_string(const std::string& s) {
  if (s == "obrien_fendley" || s == "s3_chain") return Model::ObrienFendley;
  if (s == "kt_spin1") return Model::KtSpin1;
  if (s == "ashkin_teller") return Model::AshkinTeller;
  if (s == "quantum_torus") return Model::QuantumTorus;
  if (s == "fermi_hubbard") return Model::FermiHubbard;
  throw Error(ErrorKind::BadSpec, "unknown model '" + s + "'");
}

/** @brief Coupling distribution; a zero-width Gaussian behaves as a fixed value. */
struct Distribution {
  enum class Kind { Gaussian, Uniform, Fixed };
  Kind kind = Kind::Fixed;
  double a = 0.0;  ///< mean, lower bound, or fixed value
  double b = 0.0;  ///< standard deviation or upper bound

  static Distribution gaussian(double mean, double sd) { return {Kind::Gaussian, mean, sd}; }
  static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static Distribution fixed(double v) { return {Kind::Fixed, v, 0.0}; }
};

struct HamiltonianSpec {
  Model model = Model::ObrienFendley;
  int L = 2;
  double theta = 0.0;
  std::map<std::string, Distribution> couplings;
  std::uint64_t seed = 0;
};

/** @brief Default distributions for each model. */
inline std::map<std::string, Distribution> default_couplings(Model m) {
  switch (m) {
    case Model::ObrienFendley:
      return {{"J", Distribution::gaussian(1.0, 0.25)}, {"h", Distribution::gaussian(1.0, 0.25)}};
    case Model::KtSpin1:
      return {{"J", Distribution::gaussian(1.0, 0.25)},
              {"Delta", Distribution::gaussian(0.7, 0.25)},
              {"g", Distribution::gaussian(0.2, 0.25)},
              {"D", Distribution::gaussian(0.3, 0.25)}};
    case Model::AshkinTeller:
      return {{"J", Distribution::uniform(0.5, 1.5)},
              {"Jp", Distribution::uniform(0.5, 1.5)},
              {"h", Distribution::uniform(0.5, 1.5)}};
    case Model::QuantumTorus:
      return {{"J", Distribution::gaussian(1.0, 0.25)}};
    case Model::FermiHubbard:
      return {{"t", Distribution::gaussian(3.0, 0.5)}, {"U", Distribution::fixed(4.0)}};
  }
  return {};
}

/** @brief Parameter names and counts in the order they are drawn from the generator. */
inline std::vector<std::pair<std::string, int>> coupling_layout(Model m, int L) {
  switch (m) {
    case Model::ObrienFendley: return {{"J", L - 1}, {"h", L}};
    case Model::KtSpin1: return {{"J", L - 1}, {"Delta", L - 1}, {"g", L - 1}, {"D", L}};
    case Model::AshkinTeller: return {{"J", L - 1}, {"Jp", std::max(0, L - 2)}, {"h", L}};
    case Model::QuantumTorus: return {{"J", L - 1}};
    case Model::FermiHubbard: return {{"t", L - 1}, {"U", 1}};
  }
  return {};
}

using Couplings = std::map<std::string, std::vector<double>>;

inline void validate_spec(const HamiltonianSpec& spec) {
  if (spec.L < 1) throw Error(ErrorKind::BadSpec, "L must be positive");
  if (spec.model == Model::QuantumTorus && spec.L % 3 != 0)
    throw Error(ErrorKind::BadSpec, "quantum torus chain needs L divisible by 3");
  if (spec.model == Model::AshkinTeller && spec.L < 3)
    throw Error(ErrorKind::BadSpec, "Ashkin-Teller chain needs L >= 3");
  for (const auto& [name, d] : spec.couplings) {
    if (d.kind == Distribution::Kind::Gaussian && d.b < 0)
      throw Error(ErrorKind::BadSpec, "negative standard deviation for " + name);
    if (d.kind == Distribution::Kind::Uniform && d.b < d.a)
      throw Error(ErrorKind::BadSpec, "empty uniform range for " + name);
  }
}

/** @brief Draws every coupling vector from a generator seeded with spec.seed, in layout order. */
inline Couplings draw_couplings(const HamiltonianSpec& spec) {
  validate_spec(spec);
  auto dists = default_couplings(spec.model);
  for (const auto& [k, v] : spec.couplings) dists[k] = v;
  std::mt19937_64 rng(spec.seed);
  Couplings out;
  for (const auto& [name, count] : coupling_layout(spec.model, spec.L)) {
    const Distribution d = dists.at(name);
    std::vector<double> v(count);
    for (double& x : v) {
      switch (d.kind) {
        case Distribution::Kind::Gaussian:
          x = d.b == 0.0 ? d.a : std::normal_distribution<double>(d.a, d.b)(rng);
          break;
        case Distribution::Kind::Uniform:
          x = std::uniform_real_distribution<double>(d.a, d.b)(rng);
          break;
        case Distribution::Kind::Fixed:
          x = d.a;
          break;
      }
    }
    out[name] = v;
  }
  return out;
}

/** @brief Operator on a contiguous or sparse set of sites; op is ordered with the first site most significant. */
struct LocalTerm {
  std::vector<int> sites;
  Eigen::MatrixXcd op;
};

inline long long ipow(int base, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/** @brief Sums local terms into a sparse operator on (C^d)^{L}, site 0 being the most significant digit. */
inline SparseOp assemble_terms(int L, int d, const std::vector<LocalTerm>& terms) {
  const long long dim = ipow(d, L);
  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<long long> stride(L);
  for (int j = 0; j < L; ++j) stride[j] = ipow(d, L - 1 - j);
  for (const auto& term : terms) {
    const int k = static_cast<int>(term.sites.size());
    const int ld = static_cast<int>(term.op.rows());
    std::vector<std::vector<std::pair<int, cplx>>> nz(ld);
    for (int in = 0; in < ld; ++in)
      for (int out = 0; out < ld; ++out)
        if (std::abs(term.op(out, in)) > 0.0) nz[in].emplace_back(out, term.op(out, in));
    for (long long col = 0; col < dim; ++col) {
      int in = 0;
      for (int q = 0; q < k; ++q) in = in * d + static_cast<int>((col / stride[term.sites[q]]) % d);
      for (const auto& [out, val] : nz[in]) {
        long long row = col;
        int o = out, i = in;
        for (int q = k - 1; q >= 0; --q) {
          row += static_cast<long long>((o % d) - (i % d)) * stride[term.sites[q]];
          o /= d;
          i /= d;
        }
        trips.emplace_back(row, col, val);
      }
    }
  }
  SparseOp h(dim, dim);
  h.setFromTriplets(trips.begin(), trips.end());
  h.prune(cplx(0.0, 0.0), 0.0);
  return h;
}

/** @brief Kronecker product of two local matrices (first factor most significant). */
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/** @brief Product over all sites of the same on-site matrix. */
inline SparseOp site_product(int L, const Eigen::MatrixXcd& u) {
  const int d = static_cast<int>(u.rows());
  const long long dim = ipow(d, L);
  std::vector<std::vector<std::pair<int, cplx>>> nz(d);
  for (int in = 0; in < d; ++in)
    for (int out = 0; out < d; ++out)
      if (std::abs(u(out, in)) > 1e-14) nz[in].emplace_back(out, u(out, in));
  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<int> digits(L);
  for (long long col = 0; col < dim; ++col) {
    long long c = col;
    for (int j = L - 1; j >= 0; --j) {
      digits[j] = static_cast<int>(c % d);
      c /= d;
    }
    std::function<void(int, long long, cplx)> rec = [&](int j, long long row, cplx val) {
      if (j == L) {
        trips.emplace_back(row, col, val);
        return;
      }
      for (const auto& [out, v] : nz[digits[j]]) rec(j + 1, row * d + out, val * v);
    };
    rec(0, 0, cplx(1.0, 0.0));
  }
  SparseOp op(dim, dim);
  op.setFromTriplets(trips.begin(), trips.end());
  return op;
}

/** @brief Projectors onto isotypic components of the manifest subgroup. */
struct ProjectorSet {
  Subgroup subgroup;
  std::vector<SparseOp> P;
  /** Every element of the subgroup as a monomial operator, with the class it belongs to. */
  std::vector<SparseOp> elements;
  std::vector<int> element_class;

  int size() const { return static_cast<int>(P.size()); }
  const std::vector<int>& dims() const { return subgroup.ring.dims; }
};

/** @brief P_lambda = d_lambda/|N| sum_g conj(chi_lambda(g)) U_g. */
inline ProjectorSet projectors_from_elements(const Subgroup& sub, const std::vector<SparseOp>& elements,
                                             const std::vector<int>& element_class) {
  ProjectorSet ps;
  ps.subgroup = sub;
  ps.elements = elements;
  ps.element_class = element_class;
  const auto& chi = sub.ring.characters->entries;
  const double order = static_cast<double>(elements.size());
  for (int l = 0; l < sub.ring.rank(); ++l) {
    SparseOp p(elements[0].rows(), elements[0].cols());
    for (size_t g = 0; g < elements.size(); ++g)
      p += (static_cast<double>(sub.ring.dims[l]) / order * std::conj(chi(l, element_class[g]))) * elements[g];
    p.prune(cplx(0.0, 0.0), 1e-14);
    ps.P.push_back(p);
  }
  return ps;
}

/** @brief Bundle returned by every lattice builder. */
struct LatticeSystem {
  SparseOp H;
  ProjectorSet projectors;
  Couplings couplings;
  int local_dim = 0;
};

namespace ops {

inline cplx omega() { return std::polar(1.0, 2.0 * std::numbers::pi / 3.0); }

/** @brief Clock operator Z = sum w^q |q><q|. */
inline Eigen::MatrixXcd clock_z() {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(3, 3);
  for (int q = 0; q < 3; ++q) z(q, q) = std::pow(omega(), q);
  return z;
}

/** @brief Shift operator X = sum |q+1><q|. */
inline Eigen::MatrixXcd clock_x() {
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(3, 3);
  for (int q = 0; q < 3; ++q) x((q + 1) % 3, q) = 1.0;
  return x;
}

/** @brief Charge conjugation |q> -> |-q>. */
inline Eigen::MatrixXcd clock_c() {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(3, 3);
  for (int q = 0; q < 3; ++q) c((3 - q) % 3, q) = 1.0;
  return c;
}

/** @brief S+ = (1/3)(2 - w X - w^2 X^dagger) Z^dagger. */
inline Eigen::MatrixXcd s_plus() {
  const cplx w = omega();
  const Eigen::MatrixXcd x = clock_x();
  return (1.0 / 3.0) * (2.0 * Eigen::MatrixXcd::Identity(3, 3) - w * x - w * w * x.adjoint()) * clock_z().adjoint();
}

/** @brief Spin-1 matrices in the basis m = +1, 0, -1. */
inline Eigen::MatrixXcd spin_x() {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(3, 3);
  s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = 1.0 / std::sqrt(2.0);
  return s;
}

inline Eigen::MatrixXcd spin_y() {
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(3, 3);
  s(0, 1) = -i / std::sqrt(2.0);
  s(1, 0) = i / std::sqrt(2.0);
  s(1, 2) = -i / std::sqrt(2.0);
  s(2, 1) = i / std::sqrt(2.0);
  return s;
}

inline Eigen::MatrixXcd spin_z() {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(3, 3);
  s(0, 0) = 1.0;
  s(2, 2) = -1.0;
  return s;
}

/** @brief exp(i pi S^a) = 1 - 2 (S^a)^2 for spin 1. */
inline Eigen::MatrixXcd pi_rotation(const Eigen::MatrixXcd& s) {
  return Eigen::MatrixXcd::Identity(3, 3) - 2.0 * s * s;
}

/** @brief Pauli matrices embedded on the sigma (first) or tau (second) qubit of a four-state site. */
inline Eigen::MatrixXcd pauli_x() {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
  p(0, 1) = p(1, 0) = 1.0;
  return p;
}

inline Eigen::MatrixXcd pauli_z() {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
  p(0, 0) = 1.0;
  p(1, 1) = -1.0;
  return p;
}

inline Eigen::MatrixXcd id(int n) { return Eigen::MatrixXcd::Identity(n, n); }

}  // namespace ops

/** @brief Z3 clock chain with the O'Brien-Fendley deformation, open boundaries. */
inline LatticeSystem build_obrien_fendley(const HamiltonianSpec& spec) {
  LatticeSystem sys;
  sys.couplings = draw_couplings(spec);
  sys.local_dim = 3;
  const int L = spec.L;
  const auto& J = sys.couplings["J"];
  const auto& h = sys.couplings["h"];
  const double ct = std::cos(spec.theta), st = std::sin(spec.theta);
  const Eigen::MatrixXcd z = ops::clock_z(), x = ops::clock_x(), sp = ops::s_plus();
  const Eigen::MatrixXcd sm = sp.adjoint();
  const Eigen::MatrixXcd xx = x + x.adjoint();
  Eigen::MatrixXcd potts = kron(z.adjoint(), z);
  potts += potts.adjoint().eval();
  Eigen::MatrixXcd bond1 = 3.0 * kron(sp, sm) - 3.0 * kron(sp * sp, sm * sm);
  bond1 += bond1.adjoint().eval();
  std::vector<LocalTerm> terms;
  for (int j = 0; j + 1 < L; ++j) terms.push_back({{j, j + 1}, J[j] * (-ct * potts + st * bond1)});
  for (int j = 0; j < L; ++j) terms.push_back({{j}, h[j] * (-ct + st) * xx});
  sys.H = assemble_terms(L, 3, terms);

  const Subgroup sub = z3_subgroup();
  std::vector<SparseOp> el;
  std::vector<int> cls;
  Eigen::MatrixXcd xq = ops::id(3);
  for (int q = 0; q < 3; ++q) {
    el.push_back(site_product(L, xq));
    cls.push_back(q);
    xq = x * xq;
  }
  sys.projectors = projectors_from_elements(sub, el, cls);
  return sys;
}

/** @brief Global charge conjugation of the clock chain. */
inline SparseOp clock_charge_conjugation(int L) { return site_product(L, ops::clock_c()); }

/** @brief Kennedy-Tasaki transformed spin-1 chain, open boundaries. */
inline LatticeSystem build_kt_spin1(const HamiltonianSpec& spec) {
  LatticeSystem sys;
  sys.couplings = draw_couplings(spec);
  sys.local_dim = 3;
  const int L = spec.L;
  const auto& J = sys.couplings["J"];
  const auto& Dl = sys.couplings["Delta"];
  const auto& g = sys.couplings["g"];
  const auto& D = sys.couplings["D"];
  const Eigen::MatrixXcd sx = ops::spin_x(), sy = ops::spin_y(), sz = ops::spin_z();
  const Eigen::MatrixXcd ez = ops::pi_rotation(sz), ex = ops::pi_rotation(sx);
  const Eigen::MatrixXcd a = sx * sx - sy * sy;
  const Eigen::MatrixXcd b = sx * sy + sy * sx;
  const Eigen::MatrixXcd xx = kron(sx, sx);
  const Eigen::MatrixXcd yy = kron(sy * ez, ex * sy);
  const Eigen::MatrixXcd zz = kron(sz, sz);
  const Eigen::MatrixXcd aa = kron(a, a);
  const Eigen::MatrixXcd bb = kron(ez * b, b);
  std::vector<LocalTerm> terms;
  for (int j = 0; j + 1 < L; ++j) {
    terms.push_back({{j, j + 1}, J[j] * (-xx + yy) - Dl[j] * zz});
    terms.push_back({{j, j + 1}, 2.0 * g[j] * (aa - bb)});
  }
  for (int j = 0; j < L; ++j) terms.push_back({{j}, D[j] * sz * sz});
  sys.H = assemble_terms(L, 3, terms);

  const Subgroup sub = v4_subgroup({"00", "10", "01", "11"});
  const SparseOp ux = site_product(L, ex), uz = site_product(L, ez);
  const SparseOp one = site_product(L, ops::id(3));
  sys.projectors = projectors_from_elements(sub, {one, ux, uz, SparseOp(ux * uz)}, {0, 1, 2, 3});
  return sys;
}

/** @brief Global pi rotations U^x and U^z of the spin-1 chain. */
inline std::pair<SparseOp, SparseOp> kt_rotations(int L) {
  return {site_product(L, ops::pi_rotation(ops::spin_x())), site_product(L, ops::pi_rotation(ops::spin_z()))};
}

namespace detail {

/** @brief On-site operators of the Ashkin-Teller site |s_sigma, s_tau> with index 2 s_sigma + s_tau. */
struct AtSite {
  Eigen::MatrixXcd sx, sz, tx, tz;
};

inline AtSite at_site() {
  const Eigen::MatrixXcd i2 = ops::id(2);
  return {kron(ops::pauli_x(), i2), kron(ops::pauli_z(), i2), kron(i2, ops::pauli_x()), kron(i2, ops::pauli_z())};
}

}  // namespace detail

/** @brief Two coupled Ising chains at the four-state Potts point with nearest and next-nearest bonds. */
inline LatticeSystem build_ashkin_teller(const HamiltonianSpec& spec) {
  LatticeSystem sys;
  sys.couplings = draw_couplings(spec);
  sys.local_dim = 4;
  const int L = spec.L;
  const auto& J = sys.couplings["J"];
  const auto& Jp = sys.couplings["Jp"];
  const auto& h = sys.couplings["h"];
  const auto s = detail::at_site();
  const Eigen::MatrixXcd bond = kron(s.sz, s.sz) + kron(s.tz, s.tz) + kron(s.sz * s.tz, s.sz * s.tz);
  const Eigen::MatrixXcd field = s.sx + s.tx + s.sx * s.tx;
  std::vector<LocalTerm> terms;
  for (int j = 0; j + 1 < L; ++j) terms.push_back({{j, j + 1}, J[j] * bond});
  for (int j = 0; j + 2 < L; ++j) terms.push_back({{j, j + 2}, Jp[j] * bond});
  for (int j = 0; j < L; ++j) terms.push_back({{j}, h[j] * field});
  sys.H = assemble_terms(L, 4, terms);

  const Subgroup sub = v4_subgroup({"(0,0)", "(1,0)", "(0,1)", "(1,1)"});
  const SparseOp g1 = site_product(L, s.sx), g2 = site_product(L, s.tx);
  const SparseOp one = site_product(L, ops::id(4));
  sys.projectors = projectors_from_elements(sub, {one, g1, g2, SparseOp(g1 * g2)}, {0, 1, 2, 3});
  return sys;
}

/** @brief Global swap of the two Ising copies and global on-site CNOT with sigma as control. */
inline std::pair<SparseOp, SparseOp> ashkin_teller_hidden_generators(int L) {
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) swap(2 * b + a, 2 * a + b) = 1.0;
  Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) cnot(2 * a + (a == 1 ? 1 - b : b), 2 * a + b) = 1.0;
  return {site_product(L, swap), site_product(L, cnot)};
}

/** @brief Three-state quantum torus chain, open boundaries, J^Z = J cos(theta), J^X = J sin(theta). */
inline LatticeSystem build_quantum_torus(const HamiltonianSpec& spec) {
  LatticeSystem sys;
  sys.couplings = draw_couplings(spec);
  sys.local_dim = 3;
  const int L = spec.L;
  const auto& J = sys.couplings["J"];
  const Eigen::MatrixXcd z = ops::clock_z(), x = ops::clock_x();
  Eigen::MatrixXcd zz = kron(z, z.adjoint());
  zz += zz.adjoint().eval();
  Eigen::MatrixXcd xx = kron(x, x.adjoint());
  xx += xx.adjoint().eval();
  std::vector<LocalTerm> terms;
  for (int j = 0; j + 1 < L; ++j)
    terms.push_back({{j, j + 1}, J[j] * (std::cos(spec.theta) * zz + std::sin(spec.theta) * xx)});
  sys.H = assemble_terms(L, 3, terms);

  const Subgroup sub = torus_subgroup();
  const SparseOp gz = site_product(L, z), gx = site_product(L, x), gr = site_product(L, ops::clock_c());
  std::vector<SparseOp> el;
  std::vector<int> cls;
  SparseOp za = site_product(L, ops::id(3));
  for (int a = 0; a < 3; ++a) {
    SparseOp zaxb = za;
    for (int b = 0; b < 3; ++b) {
      int c = 0;
      if (a == 0 && b == 0) c = 0;
      else if (b == 0) c = 1;
      else if (a == 0) c = 2;
      else if (a == b) c = 3;
      else c = 4;
      el.push_back(zaxb);
      cls.push_back(c);
      el.push_back(SparseOp(zaxb * gr));
      cls.push_back(5);
      zaxb = SparseOp(zaxb * gx);
    }
    za = SparseOp(za * gz);
  }
  sys.projectors = projectors_from_elements(sub, el, cls);
  return sys;
}

/** @brief Global charge conjugation R of the torus chain. */
inline SparseOp torus_conjugation(int L) { return site_product(L, ops::clock_c()); }

/** @brief Fermionic basis of one (N_up, N_down) sector: bit strings of the up and down occupations. */
struct HubbardSector {
  int L = 0;
  int n_up = 0;
  int n_dn = 0;
  std::vector<std::uint32_t> up;
  std::vector<std::uint32_t> dn;

  long long dim() const { return static_cast<long long>(up.size()) * static_cast<long long>(dn.size()); }
  long long index(size_t iu, size_t id) const { return static_cast<long long>(iu) * dn.size() + id; }
};

inline std::vector<std::uint32_t> bit_strings(int L, int n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1u << L); ++s)
    if (std::popcount(s) == n) out.push_back(s);
  return out;
}

inline HubbardSector hubbard_sector(int L, int n_up, int n_dn) {
  if (n_up < 0 || n_dn < 0 || n_up > L || n_dn > L || L > 16)
    throw Error(ErrorKind::BadSpec, "Hubbard sector out of range");
  return {L, n_up, n_dn, bit_strings(L, n_up), bit_strings(L, n_dn)};
}

namespace detail {

inline std::map<std::uint32_t, size_t> position_map(const std::vector<std::uint32_t>& v) {
  std::map<std::uint32_t, size_t> m;
  for (size_t i = 0; i < v.size(); ++i) m[v[i]] = i;
  return m;
}

/** @brief Hopping c^dagger_i c_j on one species string; returns sign and target, or 0 if blocked. */
inline int hop(std::uint32_t s, int i, int j, std::uint32_t& out) {
  if (!((s >> j) & 1u) || ((s >> i) & 1u)) return 0;
  const int lo = std::min(i, j), hi = std::max(i, j);
  const std::uint32_t between = ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
  out = (s & ~(1u << j)) | (1u << i);
  return (std::popcount(s & between) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/** @brief Dense Hubbard Hamiltonian of one sector, including the -(U/2) N shift. */
inline Eigen::MatrixXcd build_fermi_hubbard(const std::vector<double>& t, double U, const HubbardSector& sec) {
  const long long dim = sec.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto up_pos = detail::position_map(sec.up);
  const auto dn_pos = detail::position_map(sec.dn);
  for (size_t iu = 0; iu < sec.up.size(); ++iu)
    for (size_t id = 0; id < sec.dn.size(); ++id) {
      const long long col = sec.index(iu, id);
      h(col, col) = U * std::popcount(sec.up[iu] & sec.dn[id]) - 0.5 * U * (sec.n_up + sec.n_dn);
      for (int j = 0; j + 1 < sec.L; ++j) {
        for (const auto [a, b] : {std::pair{j, j + 1}, std::pair{j + 1, j}}) {
          std::uint32_t out = 0;
          if (int sg = detail::hop(sec.up[iu], a, b, out)) h(sec.index(up_pos.at(out), id), col) += -t[j] * sg;
          if (int sg = detail::hop(sec.dn[id], a, b, out)) h(sec.index(iu, dn_pos.at(out)), col) += -t[j] * sg;
        }
      }
    }
  return h;
}

inline Eigen::MatrixXcd build_fermi_hubbard(const HamiltonianSpec& spec, int n_up, int n_dn, Couplings* drawn = nullptr) {
  const Couplings c = draw_couplings(spec);
  if (drawn) *drawn = c;
  return build_fermi_hubbard(c.at("t"), c.at("U").at(0), hubbard_sector(spec.L, n_up, n_dn));
}

/** @brief eta^+ = sum_j (-1)^j c^dagger_{j up} c^dagger_{j down} from sector (a,b) to (a+1,b+1). */
inline Eigen::MatrixXcd eta_plus(const HubbardSector& from, const HubbardSector& to) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(to.dim(), from.dim());
  const auto up_pos = detail::position_map(to.up);
  const auto dn_pos = detail::position_map(to.dn);
  for (size_t iu = 0; iu < from.up.size(); ++iu)
    for (size_t id = 0; id < from.dn.size(); ++id) {
      const std::uint32_t u = from.up[iu], d = from.dn[id];
      for (int j = 0; j < from.L; ++j) {
        if (((u >> j) & 1u) || ((d >> j) & 1u)) continue;
        const std::uint32_t below = (1u << j) - 1u;
        // down mode L+j passes every up mode and the down modes below j; then up mode j passes up modes below j
        const int parity = from.n_up + std::popcount(d & below) + std::popcount(u & below) + j;
        m(to.index(up_pos.at(u | (1u << j)), dn_pos.at(d | (1u << j))), from.index(iu, id)) +=
            (parity % 2 == 0) ? 1.0 : -1.0;
      }
    }
  return m;
}

/** @brief Builds any non-fermionic model by identifier. */
inline LatticeSystem build_lattice(const HamiltonianSpec& spec) {
  validate_spec(spec);
  switch (spec.model) {
    case Model::ObrienFendley: return build_obrien_fendley(spec);
    case Model::KtSpin1: return build_kt_spin1(spec);
    case Model::AshkinTeller: return build_ashkin_teller(spec);
    case Model::QuantumTorus: return build_quantum_torus(spec);
    case Model::FermiHubbard: break;
  }
  throw Error(ErrorKind::BadSpec, "the Hubbard model is built per sector");
}

/** @brief max over ops of the largest entry of [H, O]. */
template <class Mat>
inline double symmetry_residual(const Mat& h, const std::vector<Mat>& operators) {
  double worst = 0.0;
  for (const auto& o : operators) {
    if (o.rows() != h.rows() || o.cols() != h.cols()) throw Error(ErrorKind::DimensionMismatch, "operator shape");
    const Eigen::MatrixXcd c = Eigen::MatrixXcd(h * o) - Eigen::MatrixXcd(o * h);
    if (c.size() > 0) worst = std::max(worst, c.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hsb
