#include "hcycle/strata.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hcycle;
using namespace oracles;

namespace {

void expect_pipeline_invariants(const Classification &r) {
  std::vector<long> prev;
  for (const auto &sc : r.contributions) {
    const auto &c = sc.cover;
    EXPECT_TRUE(validate_cover(c, true).ok) << sc.shape;
    EXPECT_TRUE(genericity_check(c, sc.a_structure)) << sc.shape;
    EXPECT_TRUE(separating_image_check(c)) << sc.shape;
    EXPECT_TRUE(realizable(c).realizable) << sc.shape;
    EXPECT_EQ(sc.tag == Tag::ZeroByDimension, sc.image_dim < sc.required_dim) << sc.shape;
    bool rational = std::all_of(c.target.vertices.begin(), c.target.vertices.end(),
                                [](const Vertex &v) { return v.genus == 0; });
    if (sc.tag == Tag::RationalTargetTKD) {
      EXPECT_TRUE(rational);
    }
    if (sc.tag == Tag::CandidateNontaut) {
      EXPECT_FALSE(rational);
    }
    EXPECT_GE(sc.multiplicity, 1);
    EXPECT_GE(sc.psi_excess_degree, 0);
    EXPECT_TRUE(prev < sc.key);
    prev = sc.key;
  }
}

std::set<std::pair<int, int>> isogeny_shapes(const Classification &r) {
  std::set<std::pair<int, int>> out;
  for (const auto *sc : survivors(r)) {
    auto p = isogeny_pair(*sc);
    EXPECT_TRUE(p.has_value()) << sc->shape;
    if (p) out.insert(*p);
  }
  return out;
}

} // namespace

TEST(Strata, ParamsDerivedQuantities) {
  HurwitzParams p{4, 2, 2, 0, 1, 0};
  EXPECT_EQ(p.b(), 2);
  EXPECT_EQ(p.N(), 2);
  EXPECT_EQ(p.B(), 6);
  EXPECT_THROW(check_params({2, 2, 2, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(check_params({2, 1, 2, 0, 0, 3}), std::invalid_argument);
  EXPECT_NO_THROW(check_params({2, 1, 2, 0, 0, 2}));
}

TEST(Strata, PairingCoefficient) {
  EXPECT_EQ(pairing_coefficient(2), 1);
  EXPECT_EQ(pairing_coefficient(3), -48);
  for (int d = 2; d <= 300; ++d) EXPECT_EQ(pairing_coefficient(d), a_coeff(d)) << d;
  EXPECT_THROW(pairing_coefficient(1), std::invalid_argument);
}

TEST(Strata, Equal12GenusTwo) {
  for (int d = 2; d <= 4; ++d) {
    auto r = classify_equal12(2, 10, d);
    expect_pipeline_invariants(r);
    std::set<std::pair<int, int>> want;
    for (int d1 = 1; d1 < d; ++d1) want.insert({d1, d - d1});
    EXPECT_EQ(isogeny_shapes(r), want) << "d = " << d;
    for (const auto *sc : survivors(r)) {
      // s pair fibers plus t nodes over the genus-1 target vertex.
      const auto &c = sc->cover;
      int y = -1;
      for (int v = 0; v < c.target.num_vertices(); ++v)
        if (c.target.vertices[v].genus == 1) y = v;
      ASSERT_GE(y, 0);
      auto br = branch_legs(c);
      int s = 0;
      for (int l : c.target.vertices[y].legs) s += br.count(l) ? 0 : 1;
      int t = c.target.valence(y) - static_cast<int>(c.target.vertices[y].legs.size());
      EXPECT_EQ(s + t, 11) << sc->shape;
      EXPECT_EQ(sc->image_dim, 11);
    }
  }
}

TEST(Strata, Equal12BiellipticCase) {
  auto r = classify_equal12(2, 10, 2);
  EXPECT_EQ(isogeny_shapes(r), (std::set<std::pair<int, int>>{{1, 1}}));
  for (const auto *sc : survivors(r)) EXPECT_EQ(sc->multiplicity, 1);
}

TEST(Strata, Equal12GenusThree) {
  auto r = classify_equal12(3, 9, 2);
  expect_pipeline_invariants(r);
  EXPECT_EQ(isogeny_shapes(r), (std::set<std::pair<int, int>>{{1, 1}}));
}

TEST(Strata, Equal12Refusals) {
  EXPECT_THROW(classify_equal12(2, 10, 5), Refusal);
  EXPECT_THROW(classify_equal12(5, 7, 2), Refusal);
  EXPECT_THROW(classify_equal12(2, 9, 2), std::invalid_argument);
  EXPECT_THROW(classify_equal12(1, 11, 2), std::invalid_argument);
  StrataBounds tight;
  tight.max_candidates = 3;
  EXPECT_THROW(classify_equal12(2, 10, 4, tight), Refusal);
}

TEST(Strata, WorkerCountDoesNotChangeOutput) {
  auto one = classify_equal12(2, 10, 3, {}, 1);
  auto four = classify_equal12(2, 10, 3, {}, 4);
  ASSERT_EQ(one.contributions.size(), four.contributions.size());
  for (std::size_t i = 0; i < one.contributions.size(); ++i) {
    EXPECT_EQ(one.contributions[i].key, four.contributions[i].key);
    EXPECT_EQ(one.contributions[i].tag, four.contributions[i].tag);
  }
}

TEST(Strata, RationalTailSurvivor) {
  for (int g = 2; g <= 4; ++g)
    for (int d = 2; d <= 3; ++d) {
      auto r = classify_divisor_pullback({g, 1, d, 1, 0, 0}, DivisorShape::RationalTail);
      expect_pipeline_invariants(r);
      auto s = survivors(r);
      ASSERT_EQ(s.size(), 1u) << g << " " << d;
      const auto &c = s[0]->cover;
      int tails = 0, bridges = 0;
      for (int v = 0; v < c.source.num_vertices(); ++v) {
        bool over_rational = c.target.vertices[c.vertex_map[v]].genus == 0;
        if (s[0]->a_structure.vertex_map[v] == 1) {
          // The degree-2 rational bridge carrying the pair, ramified over the node.
          EXPECT_TRUE(over_rational);
          EXPECT_EQ(c.source.vertices[v].genus, 0);
          EXPECT_EQ(c.degrees[v], 2);
          ++bridges;
        } else if (over_rational) {
          EXPECT_EQ(c.degrees[v], 1);
          ++tails;
        } else {
          EXPECT_EQ(c.source.vertices[v].genus, g);
          EXPECT_EQ(c.degrees[v], d);
        }
      }
      EXPECT_EQ(bridges, 1);
      EXPECT_EQ(tails, d - 2);
      bool ramified_node = false;
      for (const auto &er : c.edge_ramification) ramified_node |= er[0] == 2;
      EXPECT_TRUE(ramified_node);
    }
}

TEST(Strata, RationalTailWithTuples) {
  auto r = classify_divisor_pullback({3, 1, 3, 1, 1, 0}, DivisorShape::RationalTail);
  expect_pipeline_invariants(r);
  EXPECT_EQ(survivors(r).size(), 1u);
  EXPECT_THROW(classify_divisor_pullback({3, 1, 2, 0, 0, 0}, DivisorShape::RationalTail), Refusal);
}

TEST(Strata, EllipticTailSurvivor) {
  for (int g = 3; g <= 4; ++g)
    for (int d = 2; d <= 3; ++d)
      for (int m2 = 0; m2 <= 1; ++m2) {
        auto r = classify_divisor_pullback({g, 1, d, m2, 0, 0}, DivisorShape::EllipticTail);
        expect_pipeline_invariants(r);
        auto s = survivors(r);
        ASSERT_EQ(s.size(), 1u) << g << " " << d << " " << m2;
        const auto &c = s[0]->cover;
        int tails = 0;
        for (int v = 0; v < c.source.num_vertices(); ++v) {
          const auto &tv = c.target.vertices[c.vertex_map[v]];
          if (s[0]->a_structure.vertex_map[v] == 1) {
            // Totally ramified elliptic tail over the rational target.
            EXPECT_EQ(tv.genus, 0);
            EXPECT_EQ(c.source.vertices[v].genus, 1);
            EXPECT_EQ(c.degrees[v], 2);
          } else if (tv.genus == 1) {
            EXPECT_EQ(c.source.vertices[v].genus, g - 1);
            EXPECT_EQ(c.degrees[v], d);
          } else {
            EXPECT_EQ(c.source.vertices[v].genus, 0);
            EXPECT_EQ(c.degrees[v], 1);
            ++tails;
          }
        }
        EXPECT_EQ(tails, d - 2);
      }
}

TEST(Strata, EllipticTailNeedsThreeBranchPoints) {
  // In genus 2 there are only two branch points, too few for the tail.
  auto r = classify_divisor_pullback({2, 1, 2, 1, 0, 0}, DivisorShape::EllipticTail);
  EXPECT_TRUE(survivors(r).empty());
  for (const auto &sc : r.contributions) EXPECT_EQ(sc.tag, Tag::FixedTargetTKD);
}

TEST(Strata, EllipticTailRefusals) {
  EXPECT_THROW(classify_divisor_pullback({4, 2, 2, 0, 0, 0}, DivisorShape::EllipticTail), Refusal);
  EXPECT_THROW(classify_divisor_pullback({3, 1, 2, 0, 1, 0}, DivisorShape::EllipticTail), Refusal);
  EXPECT_THROW(classify_divisor_pullback({3, 1, 2, 0, 0, 1}, DivisorShape::EllipticTail), Refusal);
  EXPECT_THROW(classify_divisor_pullback({6, 1, 2, 0, 0, 0}, DivisorShape::EllipticTail), Refusal);
}

TEST(Strata, CombSurvivor) {
  HurwitzParams p{4, 2, 2, 0, 1, 0};
  auto r = classify_comb_pullback(p, 2);
  expect_pipeline_invariants(r);
  auto s = survivors(r);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0]->psi_excess_degree, 1);
  const auto &c = s[0]->cover;
  ASSERT_EQ(c.target.num_vertices(), 2);
  int tails = 0, spine = 0;
  for (int v = 0; v < c.source.num_vertices(); ++v) {
    if (s[0]->a_structure.vertex_map[v] >= 1) {
      EXPECT_EQ(c.source.vertices[v].genus, 1);
      EXPECT_EQ(c.degrees[v], 1);
      EXPECT_EQ(c.target.vertices[c.vertex_map[v]].genus, 1);
      ++tails;
    } else {
      EXPECT_EQ(c.source.vertices[v].genus, p.g - p.d);
      EXPECT_EQ(c.degrees[v], p.d);
      EXPECT_EQ(c.target.vertices[c.vertex_map[v]].genus, p.h - 1);
      ++spine;
    }
  }
  EXPECT_EQ(tails, p.d);
  EXPECT_EQ(spine, 1);
}

TEST(Strata, CombPsiDegree) {
  EXPECT_EQ(survivors(classify_comb_pullback({4, 2, 3, 0, 1, 0}, 2))[0]->psi_excess_degree, 0);
  auto r = classify_comb_pullback({4, 2, 2, 0, 2, 0}, 3);
  ASSERT_EQ(survivors(r).size(), 1u);
  EXPECT_EQ(survivors(r)[0]->psi_excess_degree, 2);
  EXPECT_LE(survivors(r)[0]->psi_excess_degree, 3);
}

TEST(Strata, CombRefusalsNameTheInequality) {
  auto msg = [](const HurwitzParams &p, int s) -> std::string {
    try {
      classify_comb_pullback(p, s);
    } catch (const Refusal &e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(msg({5, 2, 4, 0, 5, 0}, 2).find("d-1"), std::string::npos);
  EXPECT_NE(msg({4, 1, 2, 0, 5, 0}, 2).find("h = 1"), std::string::npos);
  EXPECT_NE(msg({4, 2, 2, 0, 0, 0}, 2).find("md = 0"), std::string::npos);
  EXPECT_NE(msg({4, 2, 2, 0, 5, 0}, 1).find("s = 1"), std::string::npos);
}
