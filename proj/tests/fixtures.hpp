#pragma once

#include "hcycle/covers.hpp"

namespace fixtures {

using namespace hcycle;

// Two elliptic components of degree 1 over a genus-1 target vertex carrying
// m2 pair fibers, joined by g-1 rational bridges of degree 2 over rational
// tails with two branch points each.
inline GraphCover isogeny_cover(int g, int m2) {
  GraphCover c;
  Vertex y1{1, {}};
  for (int i = 1; i <= m2; ++i) y1.legs.push_back(i);
  std::vector<Vertex> tv{y1};
  std::vector<std::pair<int, int>> te;
  for (int k = 1; k <= g - 1; ++k) {
    tv.push_back({0, {m2 + 2 * k - 1, m2 + 2 * k}});
    te.emplace_back(0, k);
  }
  c.target = make_graph(tv, te);

  Vertex x1{1, {}}, x2{1, {}};
  for (int i = 1; i <= m2; ++i) {
    x1.legs.push_back(2 * i - 1);
    x2.legs.push_back(2 * i);
    c.leg_map[2 * i - 1] = c.leg_map[2 * i] = i;
    c.leg_ramification[2 * i - 1] = c.leg_ramification[2 * i] = 1;
  }
  std::vector<Vertex> sv{x1, x2};
  std::vector<std::pair<int, int>> se;
  c.vertex_map = {0, 0};
  c.degrees = {1, 1};
  for (int k = 1; k <= g - 1; ++k) {
    int a = 2 * m2 + 2 * k - 1, b = 2 * m2 + 2 * k;
    sv.push_back({0, {a, b}});
    c.leg_map[a] = m2 + 2 * k - 1;
    c.leg_map[b] = m2 + 2 * k;
    c.leg_ramification[a] = c.leg_ramification[b] = 2;
    c.vertex_map.push_back(k);
    c.degrees.push_back(2);
    int bridge = static_cast<int>(sv.size()) - 1;
    for (int side : {0, 1}) {
      se.emplace_back(side, bridge);
      c.half_edge_map.push_back({EdgeSide{k - 1, 0}, EdgeSide{k - 1, 1}});
      c.edge_ramification.push_back({1, 1});
    }
  }
  c.source = make_graph(sv, se);
  return c;
}

// Every map the identity, all degrees and ramification 1.
inline GraphCover identity_cover(const StableGraph &g) {
  GraphCover c;
  c.source = c.target = g;
  for (int v = 0; v < g.num_vertices(); ++v) {
    c.vertex_map.push_back(v);
    c.degrees.push_back(1);
    for (int l : g.vertices[v].legs) c.leg_map[l] = l, c.leg_ramification[l] = 1;
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    c.half_edge_map.push_back({EdgeSide{e, 0}, EdgeSide{e, 1}});
    c.edge_ramification.push_back({1, 1});
  }
  return c;
}

} // namespace fixtures
