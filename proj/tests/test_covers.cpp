#include "hcycle/covers.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hcycle;
using fixtures::identity_cover;
using fixtures::isogeny_cover;

namespace {

bool mentions(const Validation &v, const std::string &what) { return v.violation.find(what) != std::string::npos; }

// Renumber source and target vertices; edges keep their order and orientation.
GraphCover relabel(const GraphCover &c, std::mt19937 &rng) {
  auto permute = [&](const StableGraph &g, std::vector<int> &perm) {
    perm.resize(g.vertices.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vertex> verts(g.vertices.size());
    for (int v = 0; v < g.num_vertices(); ++v) verts[perm[v]] = g.vertices[v];
    std::vector<std::pair<int, int>> ends;
    for (const auto &e : g.edges) ends.emplace_back(perm[e.a.vertex], perm[e.b.vertex]);
    return make_graph(verts, ends);
  };
  std::vector<int> sp, tp;
  GraphCover out = c;
  out.source = permute(c.source, sp);
  out.target = permute(c.target, tp);
  for (int v = 0; v < c.source.num_vertices(); ++v) {
    out.vertex_map[sp[v]] = tp[c.vertex_map[v]];
    out.degrees[sp[v]] = c.degrees[v];
  }
  return out;
}

// 2g(source) - 2 from the global Riemann-Hurwitz formula.
long global_rh(const GraphCover &c) {
  long sum = 0;
  for (const auto &r : c.edge_ramification) sum += 2 * (r[0] - 1);
  for (const auto &[l, r] : c.leg_ramification) sum += r - 1;
  return c.degree() * (2L * total_genus(c.target) - 2) + sum;
}

} // namespace

TEST(Covers, IdentityCoversAreValid) {
  for (auto [g, n] : {std::pair{0, 4}, {1, 2}, {2, 1}, {3, 0}})
    for (const auto &gr : enumerate_stable_graphs(g, n, 10)) {
      auto c = identity_cover(gr);
      EXPECT_TRUE(validate_cover(c).ok) << validate_cover(c).violation;
      EXPECT_TRUE(realizable(c).realizable);
      std::vector<int> all(static_cast<std::size_t>(gr.num_edges()));
      std::iota(all.begin(), all.end(), 0);
      EXPECT_TRUE(genericity_check(c, all));
      EXPECT_EQ(intersection_multiplicity(c, all), 1);
    }
}

TEST(Covers, IsogenyShapeIsValid) {
  for (auto [g, m2] : {std::pair{4, 8}, {2, 10}, {3, 9}}) {
    auto c = isogeny_cover(g, m2);
    auto v = validate_cover(c, true);
    EXPECT_TRUE(v.ok) << v.violation;
    EXPECT_EQ(total_genus(c.source), g);
    EXPECT_EQ(c.degree(), 2);
  }
}

TEST(Covers, BridgeRamificationTwoBreaksLocalDegree) {
  auto c = isogeny_cover(4, 8);
  c.edge_ramification[0] = {2, 2};
  auto v = validate_cover(c);
  EXPECT_FALSE(v.ok);
  EXPECT_TRUE(mentions(v, "local degree violated at source vertex 0")) << v.violation;
}

TEST(Covers, ViolationsAreReportedInOrder) {
  auto base = isogeny_cover(3, 9);
  auto unequal = base;
  unequal.edge_ramification[1] = {1, 2};
  EXPECT_TRUE(mentions(validate_cover(unequal), "unequal ramification"));

  auto moved = base;
  moved.vertex_map[2] = 0;
  EXPECT_TRUE(mentions(validate_cover(moved), "does not follow its vertex"));

  auto unpaired = base;
  unpaired.half_edge_map[0][1] = {1, 1};
  EXPECT_TRUE(mentions(validate_cover(unpaired), "not mapped onto a target edge"));

  auto global = base;
  global.degrees[0] = 2;
  global.leg_ramification[1] = 2;
  auto gv = validate_cover(global);
  EXPECT_FALSE(gv.ok);

  // Degree 2 over the genus-1 vertex everywhere, but one bridge removed from
  // the fiber count: only the global condition fails.
  auto ident = identity_cover(make_graph({{1, {1}}, {0, {2, 3}}}, {{0, 1}}));
  ident.degrees[0] = 2;
  ident.edge_ramification[0] = {2, 2};
  ident.leg_ramification[1] = 2;
  auto iv = validate_cover(ident);
  EXPECT_FALSE(iv.ok);
  EXPECT_TRUE(mentions(iv, "local degree") || mentions(iv, "global degree")) << iv.violation;

  auto rh = identity_cover(make_graph({{1, {1}}}, {}));
  rh.degrees[0] = 2;
  rh.leg_ramification[1] = 2;
  auto rv = validate_cover(rh);
  EXPECT_TRUE(mentions(rv, "Riemann-Hurwitz")) << rv.violation;

  auto missing = base;
  missing.leg_map.erase(1);
  EXPECT_TRUE(mentions(validate_cover(missing), "has no image"));
}

TEST(Covers, MissingHalfEdgeBreaksLocalDegree) {
  // Two genus-1 vertices over one target vertex, one of them also over a second
  // target vertex: degrees 2 over vertex 0 and 1 over vertex 1.
  auto c = identity_cover(make_graph({{1, {1}}, {1, {2}}}, {{0, 1}}));
  c.source = make_graph({{1, {1}}, {1, {3}}, {1, {2}}}, {{0, 2}});
  c.vertex_map = {0, 0, 1};
  c.degrees = {1, 1, 1};
  c.leg_map = {{1, 1}, {3, 1}, {2, 2}};
  c.leg_ramification = {{1, 1}, {3, 1}, {2, 1}};
  auto v = validate_cover(c);
  EXPECT_FALSE(v.ok);
  // Vertex 1 has no half-edge over the target edge, so local degree fails first.
  EXPECT_TRUE(mentions(v, "local degree violated at source vertex 1")) << v.violation;
}

TEST(Covers, ValidationIsRelabelingInvariant) {
  std::mt19937 rng(5);
  auto good = isogeny_cover(4, 8);
  auto bad = good;
  bad.edge_ramification[2] = {2, 2};
  for (int i = 0; i < 20; ++i) {
    EXPECT_TRUE(validate_cover(relabel(good, rng)).ok);
    EXPECT_FALSE(validate_cover(relabel(bad, rng)).ok);
  }
}

TEST(Covers, GlobalRiemannHurwitz) {
  for (auto [g, m2] : {std::pair{2, 10}, {3, 9}, {4, 8}}) {
    auto c = isogeny_cover(g, m2);
    ASSERT_TRUE(validate_cover(c).ok);
    EXPECT_EQ(2L * total_genus(c.source) - 2, global_rh(c));
  }
  for (const auto &gr : enumerate_stable_graphs(2, 2, 10)) {
    auto c = identity_cover(gr);
    EXPECT_EQ(2L * total_genus(c.source) - 2, global_rh(c));
  }
}

TEST(Covers, Realizability) {
  auto torus = identity_cover(make_graph({{1, {1}}}, {}));
  torus.degrees[0] = 2;
  torus.source.vertices[0].legs = {1, 2};
  torus.leg_map = {{1, 1}, {2, 1}};
  torus.leg_ramification = {{1, 1}, {2, 1}};
  ASSERT_TRUE(validate_cover(torus).ok) << validate_cover(torus).violation;
  auto r = realizable(torus);
  EXPECT_TRUE(r.realizable);
  ASSERT_EQ(r.classes.size(), 1u);
  EXPECT_EQ(r.classes[0], 3);

  auto rational = torus;
  rational.source.vertices[0].genus = 0;
  auto rr = realizable(rational);
  EXPECT_FALSE(rr.realizable);
  EXPECT_EQ(rr.classes[0], 0);
  EXPECT_NE(rr.reason.find("Riemann-Hurwitz"), std::string::npos);

  auto iso = isogeny_cover(4, 8);
  auto ir = realizable(iso);
  EXPECT_TRUE(ir.realizable);
  for (const auto &k : ir.classes) EXPECT_EQ(k, 1);

  HurwitzBounds small;
  small.max_degree = 1;
  EXPECT_THROW(realizable(iso, small), Refusal);
}

TEST(Covers, StratumDimension) {
  Vertex eleven{1, {}};
  for (int i = 1; i <= 11; ++i) eleven.legs.push_back(i);
  EXPECT_EQ(stratum_dimension(identity_cover(make_graph({eleven}, {}))), 11);
  EXPECT_EQ(stratum_dimension(identity_cover(make_graph({{0, {1, 2, 3}}}, {}))), 0);
  EXPECT_EQ(stratum_dimension(isogeny_cover(4, 8)), 11);
  EXPECT_EQ(stratum_dimension(identity_cover(make_graph({{0, {1, 2, 3}}}, {})), {2}), 2);
  EXPECT_THROW(stratum_dimension(identity_cover(make_graph({{0, {1, 2, 3}}}, {})), {-1}), std::invalid_argument);
  EXPECT_THROW(stratum_dimension(identity_cover(make_graph({{0, {1, 2, 3}}}, {})), {0, 0}), std::invalid_argument);
}

TEST(Covers, IntersectionMultiplicity) {
  auto iso = isogeny_cover(4, 8);
  // Source edges 0, 2, 4 lie on the first elliptic component, one over each target edge.
  EXPECT_EQ(intersection_multiplicity(iso, std::vector<int>{0, 2, 4}), 1);
  EXPECT_EQ(intersection_multiplicity(iso, std::vector<int>{1, 2, 5}), 1);
  EXPECT_THROW(intersection_multiplicity(iso, std::vector<int>{0, 1}), std::invalid_argument);
  EXPECT_FALSE(genericity_check(iso, std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(genericity_check(iso, std::vector<int>{0, 1, 2, 4}));

  // Degree 3 over a genus-1 vertex and a rational tail: a genus-2 component
  // meets the node with profile (2,1), so one source edge has ramification 2.
  GraphCover m;
  m.target = make_graph({{1, {1}}, {0, {2, 3}}}, {{0, 1}});
  m.source = make_graph({{2, {1, 2}}, {0, {3, 4, 5}}, {0, {6, 7}}}, {{0, 1}, {0, 2}});
  m.vertex_map = {0, 1, 1};
  m.degrees = {3, 2, 1};
  m.half_edge_map = {{EdgeSide{0, 0}, EdgeSide{0, 1}}, {EdgeSide{0, 0}, EdgeSide{0, 1}}};
  m.edge_ramification = {{2, 2}, {1, 1}};
  m.leg_map = {{1, 1}, {2, 1}, {3, 2}, {4, 3}, {5, 3}, {6, 2}, {7, 3}};
  m.leg_ramification = {{1, 2}, {2, 1}, {3, 2}, {4, 1}, {5, 1}, {6, 1}, {7, 1}};
  ASSERT_TRUE(validate_cover(m, true).ok) << validate_cover(m).violation;
  EXPECT_EQ(intersection_multiplicity(m, std::vector<int>{1}), 2);
  EXPECT_EQ(intersection_multiplicity(m, std::vector<int>{0}), 1);
  EXPECT_EQ(intersection_multiplicity(m, std::vector<int>{0, 1}), 1);
  EXPECT_TRUE(realizable(m).realizable);
}

TEST(Covers, SeparatingImage) {
  EXPECT_TRUE(separating_image_check(isogeny_cover(4, 8)));
  EXPECT_TRUE(separating_image_check(identity_cover(make_graph({{1, {1}}, {1, {2}}}, {{0, 1}}))));
  EXPECT_TRUE(separating_image_check(identity_cover(make_graph({{1, {1}}, {0, {}}}, {{0, 1}, {1, 1}}))));
  EXPECT_TRUE(separating_image_check(identity_cover(make_graph({{0, {1}}}, {{0, 0}, {0, 0}}))));
  // A bridge mapping to a loop.
  GraphCover c;
  c.target = make_graph({{0, {1}}}, {{0, 0}});
  c.source = make_graph({{0, {1}}, {0, {2}}}, {{0, 1}});
  c.vertex_map = {0, 0};
  c.degrees = {1, 1};
  c.half_edge_map = {{EdgeSide{0, 0}, EdgeSide{0, 1}}};
  c.edge_ramification = {{1, 1}};
  EXPECT_FALSE(separating_image_check(c));
}
