#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hsb/constraints.hpp"
#include "hsb/errors.hpp"
#include "hsb/group_algebra.hpp"
#include "hsb/lattice_models.hpp"

namespace hsb {

struct SpectralData {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
};

/** @brief w(lambda, n) = Re <n|P_lambda|n>. */
using SectorWeights = Eigen::MatrixXd;

inline void require_hermitian(const Eigen::MatrixXcd& h, double rel_tol = 1e-12) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::BadOperator, "operator is not square");
  if (h.size() == 0) return;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) throw Error(ErrorKind::BadOperator, "operator is not Hermitian");
}

inline SpectralData diagonalize(const Eigen::MatrixXcd& h) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::BadOperator, "eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline SectorWeights sector_weights(const SpectralData& spec, const std::vector<SparseOp>& projectors) {
  const Eigen::Index n = spec.vectors.cols();
  SectorWeights w(projectors.size(), n);
  for (size_t l = 0; l < projectors.size(); ++l) {
    if (projectors[l].rows() != spec.vectors.rows()) throw Error(ErrorKind::DimensionMismatch, "projector size");
    const Eigen::MatrixXcd pv = projectors[l] * spec.vectors;
    for (Eigen::Index k = 0; k < n; ++k) w(l, k) = spec.vectors.col(k).dot(pv.col(k)).real();
  }
  return w;
}

inline SectorWeights sector_weights(const SpectralData& spec, const ProjectorSet& proj) {
  return sector_weights(spec, proj.P);
}

/**
 * @brief Spectrum resolved into isotypic blocks: concatenated eigenvalues with 0/1 sector weights.
 *
 * Each projector is factored as Q Q^dagger with orthonormal Q, and H is diagonalised inside each range.
 * Symmetry elements are monomial, so Q is assembled orbit by orbit from small dense blocks.
 */
struct BlockSpectrum {
  Eigen::VectorXd energies;
  SectorWeights weights;
  std::vector<long long> traces;
};

namespace detail {

/** @brief Orbits of basis states under a set of monomial operators. */
inline std::vector<std::vector<int>> basis_orbits(const std::vector<SparseOp>& elements, int dim) {
  std::vector<int> image_of(static_cast<size_t>(dim) * elements.size(), -1);
  for (size_t g = 0; g < elements.size(); ++g) {
    const SparseOp& u = elements[g];
    for (int c = 0; c < u.outerSize(); ++c) {
      int count = 0;
      for (SparseOp::InnerIterator it(u, c); it; ++it) {
        image_of[g * dim + c] = static_cast<int>(it.row());
        ++count;
      }
      if (count != 1) throw Error(ErrorKind::BadOperator, "symmetry element is not monomial");
    }
  }
  std::vector<int> seen(dim, 0);
  std::vector<std::vector<int>> orbits;
  for (int s = 0; s < dim; ++s) {
    if (seen[s]) continue;
    std::vector<int> orbit{s};
    seen[s] = 1;
    for (size_t i = 0; i < orbit.size(); ++i)
      for (size_t g = 0; g < elements.size(); ++g) {
        const int t = image_of[g * dim + orbit[i]];
        if (!seen[t]) {
          seen[t] = 1;
          orbit.push_back(t);
        }
      }
    std::sort(orbit.begin(), orbit.end());
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

/** @brief Orthonormal basis (as sparse columns) of the range of a projector that is block diagonal over orbits. */
inline SparseOp projector_range(const SparseOp& p, const std::vector<std::vector<int>>& orbits) {
  std::vector<Eigen::Triplet<cplx>> trips;
  int col = 0;
  for (const auto& orbit : orbits) {
    const int m = static_cast<int>(orbit.size());
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j)
      for (SparseOp::InnerIterator it(p, orbit[j]); it; ++it) {
        const auto pos = std::lower_bound(orbit.begin(), orbit.end(), static_cast<int>(it.row()));
        if (pos != orbit.end() && *pos == it.row()) block(pos - orbit.begin(), j) = it.value();
      }
    if (block.cwiseAbs().maxCoeff() < 1e-12) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
    for (int k = 0; k < m; ++k) {
      if (es.eigenvalues()(k) < 0.5) continue;
      for (int i = 0; i < m; ++i)
        if (std::abs(es.eigenvectors()(i, k)) > 1e-14) trips.emplace_back(orbit[i], col, es.eigenvectors()(i, k));
      ++col;
    }
  }
  SparseOp q(p.rows(), col);
  q.setFromTriplets(trips.begin(), trips.end());
  return q;
}

}  // namespace detail

/** @brief Sector-resolved spectrum of H using the monomial elements stored in the projector set. */
inline BlockSpectrum block_spectrum(const SparseOp& h, const ProjectorSet& proj) {
  const int dim = static_cast<int>(h.rows());
  const auto orbits = detail::basis_orbits(proj.elements, dim);
  BlockSpectrum out;
  std::vector<Eigen::VectorXd> per_sector;
  for (const auto& p : proj.P) {
    const SparseOp q = detail::projector_range(p, orbits);
    const SparseOp hq = h * q;
    const Eigen::MatrixXcd hl = Eigen::MatrixXcd(SparseOp(q.adjoint() * hq));
    per_sector.push_back(hl.rows() ? diagonalize(0.5 * (hl + hl.adjoint())).energies : Eigen::VectorXd());
    out.traces.push_back(q.cols());
  }
  const long long total = std::accumulate(out.traces.begin(), out.traces.end(), 0LL);
  if (total != dim) throw Error(ErrorKind::DimensionMismatch, "projector ranges do not tile the Hilbert space");
  out.energies.resize(total);
  out.weights = SectorWeights::Zero(proj.P.size(), total);
  long long off = 0;
  for (size_t l = 0; l < per_sector.size(); ++l) {
    out.energies.segment(off, per_sector[l].size()) = per_sector[l];
    out.weights.block(l, off, 1, per_sector[l].size()).setOnes();
    off += per_sector[l].size();
  }
  return out;
}

/** @brief Concatenates independently diagonalised sector Hamiltonians (fermionic sectors). */
inline BlockSpectrum block_spectrum(const std::vector<Eigen::MatrixXcd>& blocks) {
  BlockSpectrum out;
  std::vector<Eigen::VectorXd> evs;
  long long total = 0;
  for (const auto& b : blocks) {
    evs.push_back(b.rows() ? diagonalize(b).energies : Eigen::VectorXd());
    out.traces.push_back(b.rows());
    total += b.rows();
  }
  out.energies.resize(total);
  out.weights = SectorWeights::Zero(blocks.size(), total);
  long long off = 0;
  for (size_t l = 0; l < evs.size(); ++l) {
    out.energies.segment(off, evs[l].size()) = evs[l];
    out.weights.block(l, off, 1, evs[l].size()).setOnes();
    off += evs[l].size();
  }
  return out;
}

inline double spectral_span(const Eigen::VectorXd& e) {
  if (e.size() == 0) return 0.0;
  return e.maxCoeff() - e.minCoeff();
}

/** @brief Heisenberg time 2 pi D / span; 0 for a flat spectrum. */
inline double heisenberg_time(const Eigen::VectorXd& e) {
  const double span = spectral_span(e);
  return span > 0 ? 2.0 * std::numbers::pi * static_cast<double>(e.size()) / span : 0.0;
}

/** @brief Sector traces z_lambda(t) = sum_n w_n exp(-i E_n t) on a time grid; rows are sectors. */
inline Eigen::MatrixXcd sector_traces(const SectorWeights& w, const Eigen::VectorXd& e, const std::vector<double>& t) {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(w.rows(), static_cast<Eigen::Index>(t.size()));
  Eigen::VectorXcd phase(e.size());
  for (size_t k = 0; k < t.size(); ++k) {
    for (Eigen::Index n = 0; n < e.size(); ++n) phase(n) = std::polar(1.0, -e(n) * t[k]);
    z.col(static_cast<Eigen::Index>(k)) = w.cast<cplx>() * phase;
  }
  return z;
}

inline std::vector<double> xsff_timeseries(const SectorWeights& w, const Eigen::VectorXd& e, int a, int b, int da,
                                           int db, const std::vector<double>& t) {
  for (size_t k = 1; k < t.size(); ++k)
    if (!(t[k] > t[k - 1])) throw Error(ErrorKind::BadSpec, "time grid must be strictly increasing");
  SectorWeights pair(2, w.cols());
  pair.row(0) = w.row(a);
  pair.row(1) = w.row(b);
  const Eigen::MatrixXcd z = sector_traces(pair, e, t);
  std::vector<double> out(t.size());
  for (size_t k = 0; k < t.size(); ++k)
    out[k] = (z(0, k) * std::conj(z(1, k))).real() / (static_cast<double>(da) * db);
  return out;
}

/** @brief Groups of indices into ascending energies whose consecutive gaps are below tol * span / D. */
inline std::vector<std::vector<int>> degeneracy_clusters(const Eigen::VectorXd& e, double degeneracy_tol) {
  std::vector<int> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return e(x) < e(y); });
  const double gap = e.size() ? degeneracy_tol * spectral_span(e) / static_cast<double>(e.size()) : 0.0;
  std::vector<std::vector<int>> groups;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || (e(order[i]) - e(order[i - 1]) > 0.0 && e(order[i]) - e(order[i - 1]) >= gap))
      groups.emplace_back();
    groups.back().push_back(order[i]);
  }
  return groups;
}

/** @brief Cluster weights W(lambda, g) = sum of w over the degeneracy group g. */
inline Eigen::MatrixXd cluster_weights(const SectorWeights& w, const std::vector<std::vector<int>>& groups) {
  Eigen::MatrixXd cw = Eigen::MatrixXd::Zero(w.rows(), static_cast<Eigen::Index>(groups.size()));
  for (size_t g = 0; g < groups.size(); ++g)
    for (int n : groups[g]) cw.col(static_cast<Eigen::Index>(g)) += w.col(n);
  return cw;
}

inline double plateau_exact(const SectorWeights& w, const Eigen::VectorXd& e, int a, int b, int da, int db,
                             double degeneracy_tol) {
  if (!(degeneracy_tol > 0)) throw Error(ErrorKind::BadSpec, "degeneracy tolerance must be positive");
  const Eigen::MatrixXd cw = cluster_weights(w, degeneracy_clusters(e, degeneracy_tol));
  return cw.row(a).dot(cw.row(b)) / (static_cast<double>(da) * db);
}

/** @brief All plateau entries K(a,b) at once. */
inline Eigen::MatrixXd plateau_all(const SectorWeights& w, const Eigen::VectorXd& e, const std::vector<int>& d,
                                   double degeneracy_tol) {
  if (!(degeneracy_tol > 0)) throw Error(ErrorKind::BadSpec, "degeneracy tolerance must be positive");
  const Eigen::MatrixXd cw = cluster_weights(w, degeneracy_clusters(e, degeneracy_tol));
  Eigen::MatrixXd k = cw * cw.transpose();
  for (Eigen::Index a = 0; a < k.rows(); ++a)
    for (Eigen::Index b = 0; b < k.cols(); ++b) k(a, b) /= static_cast<double>(d[a]) * d[b];
  return k;
}

/**
 * @brief Trapezoidal average of the xSFF element over [T, 2T].
 *
 * The step resolves the fastest oscillation, set by the spectral span.
 */
inline double oracle_plateau(const SectorWeights& w, const Eigen::VectorXd& e, int a, int b, int da, int db,
                             double T) {
  if (e.size() <= 1) return xsff_timeseries(w, e, a, b, da, db, {0.0})[0];
  const double span = spectral_span(e);
  const double dt = span > 0 ? 0.1 * 2.0 * std::numbers::pi / span : T;
  const long long n = std::max(2LL, static_cast<long long>(std::ceil(T / dt)) + 1);
  std::vector<double> t(n);
  for (long long k = 0; k < n; ++k) t[k] = T + T * static_cast<double>(k) / static_cast<double>(n - 1);
  const auto s = xsff_timeseries(w, e, a, b, da, db, t);
  double acc = 0.0;
  for (long long k = 0; k + 1 < n; ++k) acc += 0.5 * (s[k] + s[k + 1]) * (t[k + 1] - t[k]);
  return acc / T;
}

inline double oracle_plateau(const Eigen::MatrixXcd& h, const std::vector<SparseOp>& projectors, int a, int b,
                             int da, int db, double T) {
  const SpectralData sd = diagonalize(h);
  return oracle_plateau(sector_weights(sd, projectors), sd.energies, a, b, da, db, T);
}

/**
 * @brief Late-time plateau read from Gaussian-smoothed curves rather than from degeneracy clusters.
 *
 * Every K(a,b)(t) is sampled on a uniform grid over [T, 2T] with T = window_factor * t_H and a step of a
 * quarter of the fastest period, smoothed with gaussian_smooth, and averaged.
 */
inline Eigen::MatrixXd smoothed_late_plateau(const SectorWeights& w, const Eigen::VectorXd& e,
                                             const std::vector<int>& d, double window_factor,
                                             double relative_width);

inline Eigen::VectorXd benchmark_lines(const std::vector<long long>& traces, const std::vector<int>& d, int nu) {
  if (nu != 1 && nu != 2) throw Error(ErrorKind::BadSpec, "Kramers factor must be 1 or 2");
  if (traces.size() != d.size()) throw Error(ErrorKind::DimensionMismatch, "traces and dimensions differ");
  Eigen::VectorXd r(d.size());
  for (size_t l = 0; l < d.size(); ++l) r(l) = static_cast<double>(nu) * traces[l] / d[l];
  return r;
}

inline Eigen::VectorXd benchmark_lines(const ProjectorSet& proj, int nu) {
  std::vector<long long> tr;
  for (const auto& p : proj.P) {
    cplx s = 0.0;
    for (int k = 0; k < p.outerSize(); ++k) s += p.coeff(k, k);
    tr.push_back(std::llround(s.real()));
  }
  return benchmark_lines(tr, proj.dims(), nu);
}

/** @brief Ensemble-level plateau data. */
struct PlateauMatrix {
  Eigen::MatrixXd K;
  Eigen::VectorXd R;
  Eigen::MatrixXd standard_error;
  int nu = 1;
  int ensemble_size = 1;
  std::vector<std::string> labels;
  std::vector<int> d;

  Eigen::MatrixXd normalized() const {
    Eigen::MatrixXd n = K;
    for (Eigen::Index a = 0; a < K.rows(); ++a)
      for (Eigen::Index b = 0; b < K.cols(); ++b) {
        const double s = std::sqrt(std::max(0.0, K(a, a)) * std::max(0.0, K(b, b)));
        n(a, b) = s > 0 ? K(a, b) / s : 0.0;
      }
    return n;
  }
};

/** @brief Mean and standard error (sample std / sqrt n) accumulated in index order. */
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> disorder_average(const std::vector<Eigen::MatrixXd>& xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "no realizations to average");
  const Eigen::Index r = xs[0].rows(), c = xs[0].cols();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(r, c);
  for (const auto& x : xs) {
    if (x.rows() != r || x.cols() != c) throw Error(ErrorKind::DimensionMismatch, "realization shapes differ");
    mean += x;
  }
  const double n = static_cast<double>(xs.size());
  mean /= n;
  Eigen::MatrixXd se = Eigen::MatrixXd::Zero(r, c);
  if (xs.size() > 1) {
    for (const auto& x : xs) se += (x - mean).cwiseAbs2();
    se = (se / (n - 1.0)).cwiseSqrt() / std::sqrt(n);
  }
  return {mean, se};
}

inline std::pair<std::vector<double>, std::vector<double>> disorder_average(
    const std::vector<std::vector<double>>& xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "no realizations to average");
  std::vector<Eigen::MatrixXd> m;
  for (const auto& x : xs) m.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())));
  const auto [mean, se] = disorder_average(m);
  return {std::vector<double>(mean.data(), mean.data() + mean.size()),
          std::vector<double>(se.data(), se.data() + se.size())};
}

/** @brief Averages plateau matrices of one ensemble; R and labels are taken from the first entry. */
inline PlateauMatrix disorder_average(const std::vector<PlateauMatrix>& xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "no realizations to average");
  std::vector<Eigen::MatrixXd> ks;
  for (const auto& x : xs) ks.push_back(x.K);
  PlateauMatrix out = xs[0];
  std::tie(out.K, out.standard_error) = disorder_average(ks);
  out.ensemble_size = static_cast<int>(xs.size());
  return out;
}

/**
 * @brief Gaussian convolution in grid-index space with sigma = relative_width * series length.
 *
 * The kernel is truncated at four sigma and renormalised by the mass that falls inside the series.
 */
inline std::vector<double> gaussian_smooth(const std::vector<double>& s, double relative_width) {
  if (!(relative_width > 0)) throw Error(ErrorKind::BadSpec, "smoothing width must be positive");
  const long long n = static_cast<long long>(s.size());
  const double sigma = std::max(relative_width * static_cast<double>(n), 1e-12);
  const long long half = static_cast<long long>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * half + 1);
  for (long long k = -half; k <= half; ++k) kernel[k + half] = std::exp(-0.5 * (k / sigma) * (k / sigma));
  std::vector<double> out(s.size());
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0, mass = 0.0;
    for (long long k = std::max(-half, -i); k <= std::min(half, n - 1 - i); ++k) {
      acc += kernel[k + half] * s[i + k];
      mass += kernel[k + half];
    }
    out[i] = acc / mass;
  }
  return out;
}

/** @brief Logarithmic grid of n points between lo and hi. */
inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw Error(ErrorKind::BadSpec, "invalid time grid");
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return t;
}

struct ConstraintOptions {
  double positivity_threshold = 0.05;
  double equality_tol = 0.05;
  double ratio_tol = 0.15;
};

/** @brief Union-find over N-irreps; classes are emitted in order of their smallest member. */
inline std::vector<std::vector<int>> merge_classes(int n, const std::vector<std::pair<int, int>>& merges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [a, b] : merges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<std::vector<int>> classes;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[slot[r]].push_back(i);
  }
  return classes;
}

/**
 * @brief Reads the positivity pattern, equivalence classes, and multiplicity flags off a plateau matrix.
 *
 * A class is multiplicity-free when every member is, and carries the higher-multiplicity flag when any
 * member does; its ratio is the mean member ratio.
 */
inline NumericalConstraints extract_constraints(const PlateauMatrix& pm, const ConstraintOptions& opt,
                                                const RepTheory& n_ring, const std::vector<int>& n_dual,
                                                std::optional<long long> unitary_order = std::nullopt) {
  const int n = static_cast<int>(pm.K.rows());
  if (pm.K.cols() != n || pm.R.size() != n || static_cast<int>(pm.d.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "plateau matrix shape");
  for (int a = 0; a < n; ++a)
    if (pm.K(a, a) < 0) throw Error(ErrorKind::BadPlateauData, "negative diagonal plateau");
  NumericalConstraints nc;
  nc.positive.assign(n, std::vector<bool>(n, false));
  std::vector<std::pair<int, int>> merges;
  const Eigen::MatrixXd norm = pm.normalized();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const double kab = 0.5 * (pm.K(a, b) + pm.K(b, a));
      if (norm(a, b) > opt.positivity_threshold) {
        nc.positive[a][b] = nc.positive[b][a] = true;
        if (std::abs(pm.K(a, a) - kab) < opt.equality_tol * pm.K(a, a) &&
            std::abs(pm.K(b, b) - kab) < opt.equality_tol * pm.K(a, a))
          merges.emplace_back(a, b);
      }
    }
  nc.classes = merge_classes(n, merges);
  for (const auto& cls : nc.classes) {
    bool free = true, higher = false;
    double ratio = 0.0;
    for (int l : cls) {
      const double q = pm.R(l) > 0 ? pm.K(l, l) / pm.R(l) : 0.0;
      ratio += q;
      free = free && std::abs(q - 1.0) < opt.ratio_tol;
      higher = higher || (q - 1.0 > opt.ratio_tol);
    }
    nc.multiplicity_free.push_back(free);
    nc.higher_multiplicity.push_back(higher);
    nc.ratio.push_back(ratio / static_cast<double>(cls.size()));
  }
  nc.d_lambda = pm.d;
  nc.n_ring = n_ring;
  nc.n_dual = n_dual;
  nc.unitary_order = unitary_order;
  nc.labels = pm.labels;
  return nc;
}

/** @brief Advisory: every diagonal plateau sits near 2R rather than R. */
inline bool kramers_advisory(const PlateauMatrix& pm, double ratio_tol = 0.15) {
  if (pm.nu != 1 || pm.K.rows() == 0) return false;
  for (Eigen::Index a = 0; a < pm.K.rows(); ++a)
    if (!(pm.R(a) > 0) || std::abs(pm.K(a, a) / pm.R(a) - 2.0) >= 2.0 * ratio_tol) return false;
  return true;
}

/**
 * @brief Optional strict merge check: smoothed diagonal and cross curves agree in the sup norm over the
 * last decade of the grid, relative to the diagonal plateau.
 */
inline bool curves_agree(const std::vector<double>& t, const std::vector<double>& diag,
                         const std::vector<double>& cross, double plateau, double tol) {
  if (t.empty() || diag.size() != t.size() || cross.size() != t.size()) return false;
  const double start = t.back() / 10.0;
  double worst = 0.0;
  for (size_t k = 0; k < t.size(); ++k)
    if (t[k] >= start) worst = std::max(worst, std::abs(diag[k] - cross[k]));
  return worst < tol * plateau;
}

inline Eigen::MatrixXd smoothed_late_plateau(const SectorWeights& w, const Eigen::VectorXd& e,
                                             const std::vector<int>& d, double window_factor,
                                             double relative_width) {
  const Eigen::Index ns = w.rows();
  const double span = spectral_span(e);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ns, ns);
  if (!(span > 0)) return plateau_all(w, e, d, 1e-10);
  const double T = window_factor * heisenberg_time(e);
  const double dt = 0.25 * 2.0 * std::numbers::pi / span;
  const Eigen::Index n = static_cast<Eigen::Index>(std::ceil(T / dt)) + 1;
  Eigen::VectorXcd phase(e.size()), step(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    phase(k) = std::polar(1.0, -e(k) * T);
    step(k) = std::polar(1.0, -e(k) * dt);
  }
  const Eigen::MatrixXcd wc = w.cast<cplx>();
  Eigen::MatrixXcd z(ns, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k % 1024 == 0)
      for (Eigen::Index m = 0; m < e.size(); ++m) phase(m) = std::polar(1.0, -e(m) * (T + dt * k));
    z.col(k) = wc * phase;
    phase = phase.cwiseProduct(step);
  }
  std::vector<double> series(n);
  for (Eigen::Index a = 0; a < ns; ++a)
    for (Eigen::Index b = a; b < ns; ++b) {
      for (Eigen::Index k = 0; k < n; ++k) series[k] = (z(a, k) * std::conj(z(b, k))).real();
      const auto sm = gaussian_smooth(series, relative_width);
      const double mean = std::accumulate(sm.begin(), sm.end(), 0.0) / static_cast<double>(n);
      out(a, b) = out(b, a) = mean / (static_cast<double>(d[a]) * d[b]);
    }
  return out;
}

}  // namespace hsb
