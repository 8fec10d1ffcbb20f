#include <gtest/gtest.h>

#include <numbers>

#include "hsb/lattice_models.hpp"
#include "hsb/spectral.hpp"

using namespace hsb;

namespace {

HamiltonianSpec spec_for(Model m, int L, double theta = 0.0, std::uint64_t seed = 11) {
  HamiltonianSpec s;
  s.model = m;
  s.L = L;
  s.theta = theta;
  s.seed = seed;
  return s;
}

Eigen::MatrixXcd dense(const SparseOp& a) { return Eigen::MatrixXcd(a); }

double max_abs(const Eigen::MatrixXcd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

void expect_projector_invariants(const LatticeSystem& sys) {
  const Eigen::Index dim = sys.H.rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  const auto& P = sys.projectors.P;
  for (size_t l = 0; l < P.size(); ++l) {
    const Eigen::MatrixXcd p = dense(P[l]);
    sum += p;
    EXPECT_LT(max_abs(p * p - p), 1e-12) << "idempotence " << l;
    for (size_t m = l + 1; m < P.size(); ++m) EXPECT_LT(max_abs(p * dense(P[m])), 1e-12) << "orthogonality";
    const double tr = p.trace().real();
    const double per = tr / sys.projectors.dims()[l];
    EXPECT_NEAR(per, std::round(per), 1e-8);
  }
  EXPECT_LT(max_abs(sum - Eigen::MatrixXcd::Identity(dim, dim)), 1e-12);
  std::vector<SparseOp> ps(P.begin(), P.end());
  EXPECT_LT(symmetry_residual(sys.H, ps), 1e-10);
}

void expect_hermitian(const SparseOp& h) {
  const Eigen::MatrixXcd d = dense(h);
  EXPECT_LT(max_abs(d - d.adjoint()), 1e-12 * std::max(1.0, max_abs(d)));
}

}  // namespace

TEST(ObrienFendley, SingleSiteFieldSpectrum) {
  HamiltonianSpec s = spec_for(Model::ObrienFendley, 1);
  s.couplings["h"] = Distribution::fixed(1.0);
  const LatticeSystem sys = build_obrien_fendley(s);
  const SpectralData sd = diagonalize(dense(sys.H));
  EXPECT_NEAR(sd.energies(0), -2.0, 1e-12);
  EXPECT_NEAR(sd.energies(1), 1.0, 1e-12);
  EXPECT_NEAR(sd.energies(2), 1.0, 1e-12);
}

TEST(ObrienFendley, DimensionAndChargeZeroTrace) {
  EXPECT_EQ(build_obrien_fendley(spec_for(Model::ObrienFendley, 8)).H.rows(), 6561);
  const LatticeSystem sys = build_obrien_fendley(spec_for(Model::ObrienFendley, 2));
  EXPECT_NEAR(dense(sys.projectors.P[0]).trace().real(), 3.0, 1e-12);
}

TEST(ObrienFendley, ProjectorsAndHiddenConjugation) {
  for (double theta : {0.0, 0.3, 1.1}) {
    const LatticeSystem sys = build_obrien_fendley(spec_for(Model::ObrienFendley, 4, theta));
    expect_hermitian(sys.H);
    expect_projector_invariants(sys);
    EXPECT_LT(symmetry_residual(sys.H, std::vector<SparseOp>{clock_charge_conjugation(4)}), 1e-10);
  }
}

TEST(ObrienFendley, SPlusIsNilpotent) {
  const Eigen::MatrixXcd sp = ops::s_plus();
  EXPECT_GT(max_abs(sp * sp), 1e-3);
  EXPECT_LT(max_abs(sp * sp * sp), 1e-12);
}

TEST(KtSpin1, CommutesWithPiRotations) {
  const LatticeSystem sys = build_kt_spin1(spec_for(Model::KtSpin1, 3));
  EXPECT_EQ(sys.H.rows(), 27);
  expect_hermitian(sys.H);
  const auto [ux, uz] = kt_rotations(3);
  EXPECT_LT(symmetry_residual(sys.H, std::vector<SparseOp>{ux, uz}), 1e-10);
  expect_projector_invariants(sys);
}

TEST(KtSpin1, CompletenessAtTwoSites) {
  const LatticeSystem sys = build_kt_spin1(spec_for(Model::KtSpin1, 2));
  double total = 0.0;
  for (const auto& p : sys.projectors.P) total += dense(p).trace().real();
  EXPECT_NEAR(total, 9.0, 1e-12);
}

TEST(KtSpin1, SpinMatricesAreHermitianWithSpinOneAlgebra) {
  const Eigen::MatrixXcd sx = ops::spin_x(), sy = ops::spin_y(), sz = ops::spin_z();
  const cplx i(0.0, 1.0);
  EXPECT_LT(max_abs(sy - sy.adjoint()), 1e-15);
  EXPECT_LT(max_abs(sx * sy - sy * sx - i * sz), 1e-12);
  EXPECT_LT(max_abs(sx * sx + sy * sy + sz * sz - 2.0 * ops::id(3)), 1e-12);
}

TEST(AshkinTeller, HiddenSwapAndCnot) {
  const LatticeSystem sys = build_ashkin_teller(spec_for(Model::AshkinTeller, 3));
  EXPECT_EQ(sys.H.rows(), 64);
  const auto [sw, cn] = ashkin_teller_hidden_generators(3);
  EXPECT_LT(symmetry_residual(sys.H, std::vector<SparseOp>{sw, cn}), 1e-10);
  expect_projector_invariants(sys);
}

TEST(AshkinTeller, FixedCouplingsGiveRealSymmetricMatrix) {
  HamiltonianSpec s = spec_for(Model::AshkinTeller, 3);
  for (const char* k : {"J", "Jp", "h"}) s.couplings[k] = Distribution::fixed(1.0);
  const Eigen::MatrixXcd h = dense(build_ashkin_teller(s).H);
  EXPECT_LT(h.imag().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(max_abs(h - h.transpose()), 1e-15);
}

TEST(AshkinTeller, NeedsThreeSites) {
  EXPECT_THROW(build_ashkin_teller(spec_for(Model::AshkinTeller, 2)), Error);
}

TEST(QuantumTorus, RealHamiltonianAndCompleteProjectors) {
  const LatticeSystem sys = build_quantum_torus(spec_for(Model::QuantumTorus, 6, std::numbers::pi / 6));
  EXPECT_EQ(sys.H.rows(), 729);
  double imag = 0.0;
  for (int k = 0; k < sys.H.outerSize(); ++k)
    for (SparseOp::InnerIterator it(sys.H, k); it; ++it) imag = std::max(imag, std::abs(it.value().imag()));
  EXPECT_LT(imag, 1e-12);
  long long total = 0;
  for (const auto& p : sys.projectors.P) {
    cplx tr = 0.0;
    for (int k = 0; k < p.outerSize(); ++k) tr += p.coeff(k, k);
    total += std::llround(tr.real());
  }
  EXPECT_EQ(total, 729);
}

TEST(QuantumTorus, ConjugationAndProjectorInvariants) {
  const LatticeSystem sys = build_quantum_torus(spec_for(Model::QuantumTorus, 3, std::numbers::pi / 4));
  EXPECT_LT(symmetry_residual(sys.H, std::vector<SparseOp>{torus_conjugation(3)}), 1e-10);
  expect_projector_invariants(sys);
  EXPECT_EQ(sys.projectors.dims(), (std::vector<int>{1, 1, 2, 2, 2, 2}));
}

TEST(QuantumTorus, ProjectorsMatchJointEigenspaceConstruction) {
  // P[a,b] = P(a,b) + P(-a,-b) with P(a,b) the joint projector onto Z = w^a, X = w^b
  const int L = 3;
  const LatticeSystem sys = build_quantum_torus(spec_for(Model::QuantumTorus, L, 0.4));
  const Eigen::MatrixXcd z = dense(site_product(L, ops::clock_z()));
  const Eigen::MatrixXcd x = dense(site_product(L, ops::clock_x()));
  const Eigen::MatrixXcd r = dense(torus_conjugation(L));
  const Eigen::Index dim = z.rows();
  const cplx w = ops::omega();
  auto joint = [&](int a, int b) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd zp = Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < 3; ++i) {
      Eigen::MatrixXcd xq = Eigen::MatrixXcd::Identity(dim, dim);
      for (int j = 0; j < 3; ++j) {
        p += std::pow(w, -(i * a + j * b)) * zp * xq;
        xq = xq * x;
      }
      zp = zp * z;
    }
    return Eigen::MatrixXcd(p / 9.0);
  };
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  EXPECT_LT(max_abs(dense(sys.projectors.P[0]) - joint(0, 0) * (id + r) / 2.0), 1e-12);
  EXPECT_LT(max_abs(dense(sys.projectors.P[1]) - joint(0, 0) * (id - r) / 2.0), 1e-12);
  const int qz[4] = {0, 1, 1, 1}, qx[4] = {1, 0, 1, 2};
  for (int l = 0; l < 4; ++l) {
    const Eigen::MatrixXcd expect = joint(qz[l], qx[l]) + joint((3 - qz[l]) % 3, (3 - qx[l]) % 3);
    EXPECT_LT(max_abs(dense(sys.projectors.P[l + 2]) - expect), 1e-12) << l;
  }
}

TEST(QuantumTorus, RequiresMultipleOfThree) {
  EXPECT_THROW(build_quantum_torus(spec_for(Model::QuantumTorus, 4)), Error);
}

TEST(FermiHubbard, TwoSiteHalfFilling) {
  const HubbardSector sec = hubbard_sector(2, 1, 1);
  const SpectralData sd = diagonalize(build_fermi_hubbard({1.0}, 4.0, sec));
  const double r = std::sqrt(32.0);
  EXPECT_NEAR(sd.energies(0), (-4.0 - r) / 2.0, 1e-12);
  EXPECT_NEAR(sd.energies(1), -4.0, 1e-12);
  EXPECT_NEAR(sd.energies(2), 0.0, 1e-12);
  EXPECT_NEAR(sd.energies(3), (-4.0 + r) / 2.0, 1e-12);
}

TEST(FermiHubbard, EmptySector) {
  const Eigen::MatrixXcd h = build_fermi_hubbard({1.0}, 4.0, hubbard_sector(2, 0, 0));
  ASSERT_EQ(h.rows(), 1);
  EXPECT_EQ(h(0, 0), cplx(0.0, 0.0));
}

TEST(FermiHubbard, EtaPairingCommutesWithRandomHopping) {
  HamiltonianSpec s = spec_for(Model::FermiHubbard, 4);
  Couplings c;
  const Eigen::MatrixXcd h22 = build_fermi_hubbard(s, 2, 2, &c);
  const Eigen::MatrixXcd h33 = build_fermi_hubbard(s, 3, 3);
  const Eigen::MatrixXcd eta = eta_plus(hubbard_sector(4, 2, 2), hubbard_sector(4, 3, 3));
  EXPECT_GT(max_abs(eta), 0.5);
  EXPECT_LT(max_abs(h33 * eta - eta * h22), 1e-10);
}

TEST(FermiHubbard, SpectrumMatchesFullFockSpaceJordanWigner) {
  // independent check: assemble H on the full 4^L space from Jordan-Wigner strings and compare sector spectra
  const int L = 3;
  const std::vector<double> t = {1.3, 0.7};
  const double U = 4.0;
  const int modes = 2 * L;
  const int dim = 1 << modes;
  auto annihilate = [&](int mode) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
      if (!((s >> mode) & 1)) continue;
      int sign = 1;
      for (int m = 0; m < mode; ++m)
        if ((s >> m) & 1) sign = -sign;
      c(s ^ (1 << mode), s) = sign;
    }
    return c;
  };
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int sp = 0; sp < 2; ++sp)
    for (int j = 0; j + 1 < L; ++j) {
      const Eigen::MatrixXd a = annihilate(sp * L + j), b = annihilate(sp * L + j + 1);
      h -= t[j] * (a.transpose() * b + b.transpose() * a);
    }
  for (int j = 0; j < L; ++j) {
    const Eigen::MatrixXd nu = annihilate(j).transpose() * annihilate(j);
    const Eigen::MatrixXd nd = annihilate(L + j).transpose() * annihilate(L + j);
    h += U * nu * nd - 0.5 * U * (nu + nd);
  }
  for (int nup = 0; nup <= L; ++nup)
    for (int ndn = 0; ndn <= L; ++ndn) {
      std::vector<int> idx;
      for (int s = 0; s < dim; ++s)
        if (std::popcount(static_cast<unsigned>(s & ((1 << L) - 1))) == nup &&
            std::popcount(static_cast<unsigned>(s >> L)) == ndn)
          idx.push_back(s);
      Eigen::MatrixXd block(idx.size(), idx.size());
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
      const SpectralData sd = diagonalize(build_fermi_hubbard(t, U, hubbard_sector(L, nup, ndn)));
      ASSERT_EQ(sd.energies.size(), es.eigenvalues().size());
      EXPECT_LT((sd.energies - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(FermiHubbard, SectorOutOfRange) { EXPECT_THROW(hubbard_sector(3, 4, 0), Error); }

TEST(SymmetryResidual, IdentityAndShapeMismatch) {
  const LatticeSystem sys = build_obrien_fendley(spec_for(Model::ObrienFendley, 3, 0.3));
  EXPECT_EQ(symmetry_residual(sys.H, std::vector<SparseOp>{site_product(3, ops::id(3))}), 0.0);
  EXPECT_THROW(symmetry_residual(sys.H, std::vector<SparseOp>{site_product(2, ops::id(3))}), Error);
}

TEST(Couplings, SeedDeterminism) {
  const HamiltonianSpec s = spec_for(Model::KtSpin1, 6, 0.0, 99);
  EXPECT_EQ(draw_couplings(s), draw_couplings(s));
  HamiltonianSpec other = s;
  other.seed = 100;
  EXPECT_NE(draw_couplings(s), draw_couplings(other));
}

TEST(Couplings, DrawsMatchDeclaredDistributions) {
  HamiltonianSpec s = spec_for(Model::ObrienFendley, 20001, 0.0, 5);
  const Couplings c = draw_couplings(s);
  for (const char* name : {"J", "h"}) {
    const auto& v = c.at(name);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / (v.size() - 1));
    EXPECT_NEAR(mean, 1.0, 0.05);
    EXPECT_NEAR(sd, 0.25, 0.05 * 0.25);
  }
  HamiltonianSpec u = spec_for(Model::AshkinTeller, 20001, 0.0, 5);
  const auto& h = draw_couplings(u).at("h");
  const double mean = std::accumulate(h.begin(), h.end(), 0.0) / h.size();
  EXPECT_NEAR(mean, 1.0, 0.05);
  EXPECT_GE(*std::min_element(h.begin(), h.end()), 0.5);
  EXPECT_LE(*std::max_element(h.begin(), h.end()), 1.5);
}

TEST(Couplings, InvalidDistributionIsBadSpec) {
  HamiltonianSpec s = spec_for(Model::ObrienFendley, 3);
  s.couplings["J"] = Distribution::gaussian(1.0, -0.1);
  try {
    draw_couplings(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadSpec);
  }
}
