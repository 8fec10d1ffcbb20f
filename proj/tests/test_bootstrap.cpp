#include <gtest/gtest.h>

#include <random>

#include "hsb/bootstrap.hpp"
#include "hsb/fixtures.hpp"
#include "synthetic.hpp"

using namespace hsb;
using hsb::testing::constraints_for;

namespace {

QuotientGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  QuotientGraph g;
  g.n = n;
  g.adj.assign(n, std::vector<bool>(n, false));
  for (auto [a, b] : edges) g.adj[a][b] = g.adj[b][a] = true;
  return g;
}

bool contains(const std::vector<BranchingMatrix>& list, const std::vector<std::vector<int>>& rows) {
  const BranchingMatrix want = BranchingMatrix::from_rows(rows);
  for (const auto& b : list)
    if (b == want) return true;
  return false;
}

std::vector<std::string> matches_of(const BootstrapSolution& s) {
  std::vector<std::string> out;
  for (const auto& f : all_fixtures())
    if (verify_against_fixture(s, f).all()) out.push_back(f.name);
  return out;
}

int count_matching(const std::vector<BootstrapSolution>& sols, const std::string& name) {
  int n = 0;
  for (const auto& s : sols)
    if (verify_against_fixture(s, name).all()) ++n;
  return n;
}

}  // namespace

TEST(Cliques, FourClassExample) {
  // classes C1={0}, C2={1,2}, C3={3}; only C1 and C2 correlate
  const auto g = graph_from_edges(3, {{0, 1}});
  const auto c = all_cliques(g, 3);
  const std::vector<std::vector<int>> want{{0}, {1}, {2}, {0, 1}};
  EXPECT_EQ(c, want);
}

TEST(Cliques, EdgelessGivesSingletons) {
  const auto c = all_cliques(graph_from_edges(5, {}), 5);
  ASSERT_EQ(c.size(), 5u);
  for (const auto& q : c) EXPECT_EQ(q.size(), 1u);
}

TEST(Cliques, TriangleGivesSeven) {
  const auto g = graph_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(all_cliques(g, 3).size(), 7u);
  EXPECT_EQ(all_cliques(g, 2).size(), 6u);
}

TEST(Cliques, QuotientGraphFromPositivity) {
  std::vector<std::vector<bool>> pos(4, std::vector<bool>(4, false));
  pos[0][2] = pos[2][0] = true;
  const auto g = quotient_graph({{0}, {1, 2}, {3}}, pos);
  EXPECT_TRUE(g.adj[0][1]);
  EXPECT_FALSE(g.adj[0][2]);
  EXPECT_FALSE(g.adj[1][2]);
}

TEST(ColumnTypes, FourClassExampleWithUnitCaps) {
  const std::vector<std::vector<int>> classes{{0}, {1, 2}, {3}};
  const auto types = column_types({{0}, {1}, {2}, {0, 1}}, {1, 1, 1}, classes, 4);
  const std::vector<std::vector<int>> want{{1, 1, 1, 0}, {1, 0, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 1}};
  EXPECT_EQ(types, want);
}

TEST(ColumnTypes, SingletonWithCapTwo) {
  const auto types = column_types({{0}}, {2}, {{0}}, 1);
  const std::vector<std::vector<int>> want{{2}, {1}};
  EXPECT_EQ(types, want);
}

TEST(ColumnTypes, AshkinTellerClasses) {
  const auto nc = constraints_for(fixture_s4());
  const auto classes = equivalence_classes(nc);
  NumericalConstraints cn = nc;
  cn.classes = classes;
  const auto g = quotient_graph(classes, nc.positive);
  const auto types = column_types(all_cliques(g, g.n), class_bmax(cn, 3), classes, nc.n_irreps());
  auto has = [&](std::vector<int> v) { return std::find(types.begin(), types.end(), v) != types.end(); };
  EXPECT_TRUE(has({2, 0, 0, 0}));
  EXPECT_TRUE(has({0, 1, 1, 1}));
}

TEST(Candidates, S3AtRanksThreeAndTwo) {
  const auto nc = constraints_for(fixture_s3(), 3);
  const auto classes = equivalence_classes(nc);
  NumericalConstraints cn = nc;
  cn.classes = classes;
  const auto g = quotient_graph(classes, nc.positive);
  const auto types = column_types(all_cliques(g, g.n), class_bmax(cn, 3), classes, nc.n_irreps());
  EXPECT_TRUE(contains(assemble_candidates(types, 3, cn), {{1, 1, 0}, {0, 0, 1}, {0, 0, 1}}));
  EXPECT_TRUE(contains(assemble_candidates(types, 2, cn), {{1, 0}, {0, 1}, {0, 1}}));
}

TEST(Candidates, RankOneSingleIrrep) {
  NumericalConstraints nc;
  nc.classes = {{0}};
  nc.positive = {{false}};
  nc.multiplicity_free = {true};
  nc.higher_multiplicity = {false};
  nc.ratio = {1.0};
  nc.d_lambda = {1};
  const auto c = assemble_candidates({{1}}, 1, nc);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], BranchingMatrix::from_rows({{1}}));
}

TEST(FusionTarget, S3SelfPair) {
  const Fixture f = fixture_s3();
  const std::vector<int> want{2, 1, 1};
  EXPECT_EQ(fusion_target(f.branching, f.subgroup.ring, 2, 2), want);
}

TEST(FusionTarget, TrivialPairIsColumn) {
  const Fixture f = fixture_d4();
  for (int j = 0; j < f.rank(); ++j) EXPECT_EQ(fusion_target(f.branching, f.subgroup.ring, 0, j), f.branching.column(j));
}

TEST(FusionTarget, D4TwoDimensionalSelfPair) {
  const Fixture f = fixture_d4();
  const std::vector<int> want{2, 2, 0, 0};
  EXPECT_EQ(fusion_target(f.branching, f.subgroup.ring, 4, 4), want);
}

TEST(Decompositions, S3TargetSplitsOverEqualColumns) {
  // the trivial column and alpha_1 share the vector (1,0,0), so only x_0 + x_1 = 2 is fixed
  const Fixture f = fixture_s3();
  const auto d = enumerate_decompositions({2, 1, 1}, f.branching);
  const std::vector<std::vector<int>> want{{0, 2, 1}, {1, 1, 1}, {2, 0, 1}};
  EXPECT_EQ(d, want);
}

TEST(Decompositions, IdenticalColumnsGiveThree) {
  const auto b = BranchingMatrix::from_rows({{1, 1}});
  EXPECT_EQ(enumerate_decompositions({2}, b).size(), 3u);
}

TEST(Decompositions, ZeroTarget) {
  const auto d = enumerate_decompositions({0, 0, 0}, fixture_s3().branching);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0], (std::vector<int>{0, 0, 0}));
}

TEST(Decompositions, NegativeTargetHasNone) {
  EXPECT_TRUE(enumerate_decompositions({-1, 0, 0}, fixture_s3().branching).empty());
}

TEST(Backtrack, S3CandidateGivesPublishedRing) {
  const Fixture f = fixture_s3();
  const auto rings = rings_for_candidate(f.branching, f.subgroup.ring);
  int rigid = 0;
  for (const auto& n : rings) {
    RepTheory ring;
    ring.dims = {1, 1, 2};
    ring.fusion = n;
    if (!validate_fusion_ring(ring).all()) continue;
    ++rigid;
    EXPECT_EQ(n, f.ring.fusion);
  }
  EXPECT_EQ(rigid, 1);
}

TEST(Backtrack, DoubleDualIsRejected) {
  // over Z2, two columns on the sign irrep both square to the trivial column and also fuse to it together
  const auto b = BranchingMatrix::from_rows({{1, 0, 0}, {0, 1, 1}});
  RepTheory z2 = hsb::testing::z2_subgroup().ring;
  std::vector<std::vector<std::vector<int>>> lists;
  for (auto [i, j] : fusion_pair_order(3)) lists.push_back(enumerate_decompositions(fusion_target(b, z2, i, j), b));
  EXPECT_TRUE(backtrack_fusion(b, lists).empty());
}

TEST(Backtrack, RankOneIsTrivialTensor) {
  const auto b = BranchingMatrix::from_rows({{1}});
  const auto rings = backtrack_fusion(b, {});
  ASSERT_EQ(rings.size(), 1u);
  EXPECT_EQ(rings[0](0, 0, 0), 1);
}

TEST(PairOrder, SelfPairsFirst) {
  const std::vector<std::pair<int, int>> want{{1, 1}, {2, 2}, {3, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(fusion_pair_order(4), want);
  EXPECT_TRUE(fusion_pair_order(1).empty());
}

TEST(Classify, S3IsLinearOfOrderSix) {
  const Fixture f = fixture_s3();
  const auto s = classify_solution(f.branching, f.ring.fusion, constraints_for(f, 3), true);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->branch, Branch::Linear);
  ASSERT_TRUE(s->group_order.has_value());
  EXPECT_EQ(*s->group_order, 6);
}

TEST(Classify, RankTwoRingIsCorep) {
  const Fixture f = fixture_s3_corep();
  const auto s = classify_solution(f.branching, f.ring.fusion, constraints_for(f, 3), true);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->branch, Branch::Corep);
  EXPECT_EQ(s->corep_subset, (std::vector<int>{1}));
  ASSERT_TRUE(s->group_order.has_value());
  EXPECT_EQ(*s->group_order, 6);
}

TEST(Classify, RankTwoRingWithoutUnitaryOrderIsNotLinear) {
  const Fixture f = fixture_s3_corep();
  const auto s = classify_solution(f.branching, f.ring.fusion, constraints_for(f), false);
  if (s) EXPECT_NE(s->branch, Branch::Linear);
}

TEST(Recovery, S3BothBranches) {
  const auto res = run_bootstrap(constraints_for(fixture_s3(), 3));
  ASSERT_TRUE(res.linear_rank.has_value());
  ASSERT_TRUE(res.corep_rank.has_value());
  EXPECT_EQ(*res.linear_rank, 3);
  EXPECT_EQ(*res.corep_rank, 2);
  ASSERT_EQ(res.linear.size(), 1u);
  ASSERT_EQ(res.corep.size(), 1u);
  EXPECT_TRUE(verify_against_fixture(res.linear[0], "S3").all());
  EXPECT_TRUE(verify_against_fixture(res.corep[0], "S3-corep").all());
}

TEST(Recovery, S3LinearOnlyWithoutUnitaryOrder) {
  const auto res = run_bootstrap(constraints_for(fixture_s3()));
  EXPECT_FALSE(res.corep_rank.has_value());
  ASSERT_TRUE(res.linear_rank.has_value());
  EXPECT_EQ(*res.linear_rank, 3);
}

TEST(Recovery, D4IsAmongRankFiveSolutions) {
  const auto res = run_bootstrap(constraints_for(fixture_d4()), {.corep = false});
  ASSERT_TRUE(res.linear_rank.has_value());
  EXPECT_EQ(*res.linear_rank, 5);
  EXPECT_EQ(count_matching(res.linear, "D4"), 1);
}

TEST(Recovery, S4IsAmongRankFiveSolutions) {
  const auto res = run_bootstrap(constraints_for(fixture_s4()), {.corep = false});
  ASSERT_TRUE(res.linear_rank.has_value());
  EXPECT_EQ(*res.linear_rank, 5);
  EXPECT_EQ(count_matching(res.linear, "S4"), 1);
}

TEST(Recovery, TorusRankSixGivesGroupAndSpuriousRing) {
  const auto res = run_bootstrap(constraints_for(fixture_z3sqz4()), {.corep = false});
  ASSERT_TRUE(res.linear_rank.has_value());
  EXPECT_EQ(*res.linear_rank, 6);
  EXPECT_EQ(count_matching(res.linear, "Z3sqZ4"), 1);
  EXPECT_EQ(count_matching(res.linear, "QTC-SD-spurious"), 1);
}

// Rank-5 rings found alongside S4 that match no fixture. Each is checked here against the ring axioms,
// rigidity and monoidality independently of the search, so their presence is a property of the constraints.
class ExtraRankFive : public ::testing::TestWithParam<const char*> {};

TEST_P(ExtraRankFive, UnmatchedSolutionsAreGenuineRings) {
  const Fixture f = fixture_by_name(GetParam());
  const auto res = run_bootstrap(constraints_for(f), {.corep = false});
  int extra = 0;
  for (const auto& s : res.linear) {
    if (!matches_of(s).empty()) continue;
    ++extra;
    const auto v = validate_fusion_ring(s.ring);
    EXPECT_TRUE(v.all());
    EXPECT_EQ(monoidality_residual(s.branching, f.subgroup.ring, s.ring), 0);
    const auto t = characters_from_fusion(s.ring);
    long long dsq = 0;
    for (int d : s.ring.dims) dsq += static_cast<long long>(d) * d;
    EXPECT_EQ(t.group_order(), dsq);
  }
  EXPECT_EQ(extra, 1);
}

INSTANTIATE_TEST_SUITE_P(AshkinTeller, ExtraRankFive, ::testing::Values("S4"));

TEST(Oracle, StagedMatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2024);
  int nonempty = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = hsb::testing::random_small_instance(rng);
    for (int r = 1; r <= 3; ++r) {
      const auto staged = staged_rings(inst.constraints, r, 2);
      const auto brute = brute_force_rings(inst.constraints, r, 2);
      EXPECT_EQ(staged, brute) << "trial " << trial << " subgroup " << inst.subgroup << " rank " << r;
      nonempty += !brute.empty();
    }
  }
  EXPECT_GT(nonempty, 10);
}

TEST(Oracle, GeneratorRingIsFoundWhenItIsARing) {
  const Fixture f = fixture_s3();
  const auto nc = constraints_for(f);
  const auto found = staged_rings(nc, 3, 3);
  EXPECT_NE(std::find(found.begin(), found.end(), canonical_form(f.branching, f.ring.fusion)), found.end());
}

TEST(Errors, NoSolutionBelowRankCap) {
  EXPECT_THROW(run_bootstrap(constraints_for(fixture_s3()), {.r_max = 1}), Error);
}

TEST(Errors, MalformedPartition) {
  auto nc = constraints_for(fixture_s3());
  nc.classes = {{0}, {1}};
  EXPECT_THROW(equivalence_classes(nc), Error);
}

TEST(Induction, FixturesAreBalanced) {
  for (const auto& f : all_fixtures()) {
    if (f.branch != Branch::Linear) continue;
    EXPECT_TRUE(detail::induction_balanced(f.branching, f.subgroup.ring.dims, f.subgroup.ring.group_order)) << f.name;
  }
}

TEST(Induction, UnequalIndexIsRejected) {
  // Z3 rows with index 1 on the trivial row and 2 on the others
  const auto b = BranchingMatrix::from_rows({{1, 0}, {0, 1}, {0, 1}});
  EXPECT_FALSE(detail::induction_balanced(b, {1, 1, 1}, std::nullopt));
  EXPECT_TRUE(detail::induction_balanced(fixture_s3().branching, {1, 1, 1}, 3));
  EXPECT_FALSE(detail::induction_balanced(fixture_s3().branching, {1, 1, 1}, 4));
}

TEST(CentralQuotient, GroupFixturesPass) {
  for (const auto& f : all_fixtures()) {
    if (f.branch != Branch::Linear) continue;
    EXPECT_FALSE(detail::cyclic_central_quotient(f.ring, *f.ring.characters)) << f.name;
  }
}

TEST(CentralQuotient, CyclicLinearPartWithCentralDerivedGroupIsRejected) {
  // dims (1,1,1,1,2) with the linear irreps forming Z4: the table passes integrality but G/Z(G) = Z4
  RepTheory ring;
  ring.dims = {1, 1, 1, 1, 2};
  ring.fusion = FusionTensor(5);
  const int z4[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 1, 0}, {3, 2, 0, 1}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) ring.fusion(a, b, z4[a][b]) = 1;
  for (int a = 0; a < 4; ++a) ring.fusion(a, 4, 4) = ring.fusion(4, a, 4) = 1;
  for (int k = 0; k < 4; ++k) ring.fusion(4, 4, k) = 1;
  ASSERT_TRUE(validate_fusion_ring(ring).all());
  const CharacterTable t = characters_from_fusion(ring);
  EXPECT_EQ(t.group_order(), 8);
  EXPECT_TRUE(detail::cyclic_central_quotient(ring, t));

  const Fixture d4 = fixture_d4();
  const auto nc = constraints_for(d4);
  const auto s = classify_solution(d4.branching, ring.fusion, nc, false);
  ASSERT_TRUE(s.has_value());
  EXPECT_NE(s->branch, Branch::Linear);
}

TEST(Recovery, KtRankFiveIsUniqueAfterCentralQuotientCheck) {
  const auto res = run_bootstrap(constraints_for(fixture_d4()), {.corep = false});
  ASSERT_EQ(res.linear.size(), 1u);
  EXPECT_TRUE(verify_against_fixture(res.linear[0], "D4").all());
}
