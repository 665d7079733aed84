#include "hcycle/graphs.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hcycle;

namespace {

// Isomorphism by trying every vertex bijection.
bool brute_isomorphic(const StableGraph &x, const StableGraph &y) {
  if (x.num_vertices() != y.num_vertices() || x.num_edges() != y.num_edges()) return false;
  auto sorted_legs = [](Vertex v) {
    std::sort(v.legs.begin(), v.legs.end());
    return v;
  };
  std::multiset<std::pair<int, int>> ey;
  for (const auto &e : y.edges) ey.insert({std::min(e.a.vertex, e.b.vertex), std::max(e.a.vertex, e.b.vertex)});
  std::vector<int> perm(x.vertices.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int v = 0; v < x.num_vertices() && ok; ++v) ok = sorted_legs(x.vertices[v]) == sorted_legs(y.vertices[perm[v]]);
    if (!ok) continue;
    std::multiset<std::pair<int, int>> ex;
    for (const auto &e : x.edges) {
      int a = perm[e.a.vertex], b = perm[e.b.vertex];
      ex.insert({std::min(a, b), std::max(a, b)});
    }
    if (ex == ey) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

StableGraph shuffled(const StableGraph &g, std::mt19937 &rng) {
  std::vector<int> perm(g.vertices.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vertex> verts(g.vertices.size());
  for (int v = 0; v < g.num_vertices(); ++v) {
    verts[perm[v]] = g.vertices[v];
    std::shuffle(verts[perm[v]].legs.begin(), verts[perm[v]].legs.end(), rng);
  }
  std::vector<std::pair<int, int>> ends;
  for (const auto &e : g.edges) {
    int a = perm[e.a.vertex], b = perm[e.b.vertex];
    if (rng() % 2) std::swap(a, b);
    ends.emplace_back(a, b);
  }
  std::shuffle(ends.begin(), ends.end(), rng);
  return make_graph(verts, ends);
}

StableGraph two_elliptic(int edges, int legs_each) {
  Vertex a{1, {}}, b{1, {}};
  for (int i = 1; i <= legs_each; ++i) a.legs.push_back(i), b.legs.push_back(legs_each + i);
  return make_graph({a, b}, std::vector<std::pair<int, int>>(static_cast<std::size_t>(edges), {0, 1}));
}

} // namespace

TEST(Graphs, ValidateExamples) {
  EXPECT_TRUE(validate(make_graph({{1, {1}}}, {})).ok);
  auto bad = validate(make_graph({{0, {1, 2}}}, {}));
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.violation.find("unstable"), std::string::npos);
  auto g = two_elliptic(1, 11);
  EXPECT_TRUE(validate(g).ok);
  EXPECT_EQ(total_genus(g), 2);
}

TEST(Graphs, ValidateCatchesStructuralErrors) {
  auto g = make_graph({{1, {1}}, {1, {2}}}, {{0, 1}});
  auto dup = g;
  dup.vertices[1].legs = {1};
  EXPECT_NE(validate(dup).violation.find("repeated"), std::string::npos);
  auto neg = g;
  neg.vertices[0].legs = {0};
  EXPECT_FALSE(validate(neg).ok);
  auto slot = g;
  slot.edges[0].b.slot = 3;
  EXPECT_NE(validate(slot).violation.find("slots"), std::string::npos);
  auto disc = make_graph({{1, {1}}, {1, {2}}}, {});
  EXPECT_FALSE(validate(disc).ok);
  EXPECT_TRUE(validate(disc, false).ok);
  auto missing = g;
  missing.edges[0].b.vertex = 5;
  EXPECT_FALSE(validate(missing).ok);
  EXPECT_FALSE(validate(StableGraph{}).ok);
}

TEST(Graphs, TotalGenusExamples) {
  EXPECT_EQ(total_genus(make_graph({{3, {}}}, {})), 3);
  EXPECT_EQ(total_genus(two_elliptic(3, 4)), 4);
  EXPECT_EQ(total_genus(make_graph({{0, {1}}}, {{0, 0}})), 1);
}

TEST(Graphs, CanonicalFormExamples) {
  std::mt19937 rng(3);
  auto g = two_elliptic(3, 4);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(canonical_form(shuffled(g, rng)), canonical_form(g));
  auto ab = make_graph({{1, {1}}, {1, {2}}}, {{0, 1}});
  auto ba = make_graph({{1, {2}}, {1, {1}}}, {{1, 0}});
  EXPECT_EQ(canonical_form(ab), canonical_form(ba));
  auto path = make_graph({{0, {1}}, {0, {}}, {0, {2}}}, {{0, 1}, {1, 2}});
  auto tri = make_graph({{0, {1}}, {0, {}}, {0, {2}}}, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_NE(canonical_form(path), canonical_form(tri));
  // Leg labels matter.
  auto swapped = make_graph({{1, {2}}, {2, {1}}}, {{0, 1}});
  auto orig = make_graph({{1, {1}}, {2, {2}}}, {{0, 1}});
  EXPECT_NE(canonical_form(swapped), canonical_form(orig));
}

TEST(Graphs, EnumerationCounts) {
  EXPECT_EQ(enumerate_stable_graphs(0, 3, 10).size(), 1u);
  EXPECT_EQ(enumerate_stable_graphs(1, 1, 10).size(), 2u);
  EXPECT_EQ(enumerate_stable_graphs(2, 0, 10).size(), 7u);
  EXPECT_EQ(enumerate_stable_graphs(0, 4, 10).size(), 4u);
  EXPECT_EQ(enumerate_stable_graphs(0, 5, 10).size(), 26u);
  EXPECT_EQ(enumerate_stable_graphs(1, 2, 10).size(), 5u);
  EXPECT_EQ(enumerate_stable_graphs(3, 0, 10).size(), 42u);
  EXPECT_TRUE(enumerate_stable_graphs(0, 2, 10).empty());
  // Single-vertex graphs of genus 2: smooth, one loop, two loops.
  EXPECT_EQ(enumerate_stable_graphs(2, 0, 1).size(), 3u);
}

TEST(Graphs, GenusFourCount) { EXPECT_EQ(enumerate_stable_graphs(4, 0, 20).size(), 379u); }

TEST(Graphs, EnumerationRefusesAboveBounds) {
  EXPECT_THROW(enumerate_stable_graphs(5, 0, 10), Refusal);
  EXPECT_THROW(enumerate_stable_graphs(-1, 0, 10), std::invalid_argument);
}

TEST(Graphs, EnumeratedGraphsAreValidAndDistinct) {
  for (auto [g, n] : {std::pair{0, 5}, {1, 3}, {2, 1}, {3, 0}, {2, 2}}) {
    auto all = enumerate_stable_graphs(g, n, 10);
    std::set<std::vector<long>> forms;
    for (const auto &gr : all) {
      EXPECT_TRUE(validate(gr).ok) << validate(gr).violation;
      EXPECT_EQ(total_genus(gr), g);
      EXPECT_EQ(gr.num_legs(), n);
      forms.insert(canonical_form(gr));
    }
    EXPECT_EQ(forms.size(), all.size());
  }
}

TEST(Graphs, CanonicalFormAgreesWithBijectionSearch) {
  std::vector<StableGraph> small;
  for (auto [g, n] : {std::pair{0, 3}, {0, 4}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {1, 3}, {0, 5}})
    for (auto &gr : enumerate_stable_graphs(g, n, 10))
      if (2 * gr.num_edges() <= 6) small.push_back(gr);
  std::mt19937 rng(11);
  for (std::size_t i = 0; i < small.size(); ++i) {
    auto copy = shuffled(small[i], rng);
    EXPECT_TRUE(brute_isomorphic(small[i], copy));
    EXPECT_EQ(canonical_form(small[i]), canonical_form(copy));
    for (std::size_t j = i + 1; j < small.size(); ++j)
      EXPECT_EQ(brute_isomorphic(small[i], small[j]), canonical_form(small[i]) == canonical_form(small[j]));
  }
}

TEST(Graphs, AutomorphismCounts) {
  EXPECT_EQ(automorphism_count(make_graph({{2, {}}}, {})), 1);
  EXPECT_EQ(automorphism_count(make_graph({{0, {}}}, {{0, 0}, {0, 0}})), 8);
  EXPECT_EQ(automorphism_count(make_graph({{0, {}}, {0, {}}}, {{0, 1}, {0, 1}, {0, 1}})), 12);
  EXPECT_EQ(automorphism_count(make_graph({{1, {}}, {1, {}}}, {{0, 1}})), 2);
  EXPECT_EQ(automorphism_count(make_graph({{1, {1}}, {1, {2}}}, {{0, 1}})), 1);
}

TEST(Graphs, SeparatingEdges) {
  auto g = make_graph({{1, {}}, {0, {1}}}, {{0, 1}, {1, 1}});
  EXPECT_TRUE(is_separating(g, 0));
  EXPECT_FALSE(is_separating(g, 1));
  EXPECT_FALSE(is_separating(two_elliptic(2, 1), 0));
}

TEST(Graphs, ContractionPreservesGenus) {
  for (const auto &gr : enumerate_stable_graphs(2, 2, 10)) {
    for (int e = 0; e < gr.num_edges(); ++e) {
      std::vector<int> keep;
      for (int i = 0; i < gr.num_edges(); ++i)
        if (i != e) keep.push_back(i);
      auto c = contract(gr, keep);
      EXPECT_EQ(total_genus(c.graph), 2);
      EXPECT_TRUE(validate(c.graph).ok);
      EXPECT_EQ(c.graph.num_edges(), gr.num_edges() - 1);
    }
    EXPECT_EQ(contract(gr, {}).graph, make_graph({{2, {1, 2}}}, {}));
  }
}

TEST(Graphs, AStructures) {
  // Gamma: genus-1 vertex -- genus-0 vertex (leg 1) -- genus-1 vertex, A: one edge.
  auto gamma = make_graph({{1, {}}, {0, {1}}, {1, {}}}, {{0, 1}, {1, 2}});
  auto a = make_graph({{1, {}}, {1, {1}}}, {{0, 1}});
  auto found = find_a_structures(gamma, a);
  EXPECT_EQ(found.size(), 2u);
  for (const auto &s : found) EXPECT_TRUE(is_a_structure(gamma, a, s));
  AStructure wrong = found[0];
  wrong.vertex_map[1] = 1 - wrong.vertex_map[1];
  EXPECT_FALSE(is_a_structure(gamma, a, wrong));
  EXPECT_TRUE(find_a_structures(gamma, make_graph({{2, {1}}}, {{0, 0}})).empty());
}
