#pragma once

// Stable graphs: vertices with genus, edges as pairs of half-edges, labeled
// legs. Half-edges are addressed by (vertex, slot); the slots at a vertex are
// exactly 0..k-1.

#include "hcycle/canon.hpp"
#include "hcycle/common.hpp"

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace hcycle {

struct HalfEdgeRef {
  int vertex = 0;
  int slot = 0;
  auto operator<=>(const HalfEdgeRef &) const = default;
};

struct Vertex {
  int genus = 0;
  std::vector<int> legs;
  bool operator==(const Vertex &) const = default;
};

struct Edge {
  HalfEdgeRef a, b;
  bool is_loop() const { return a.vertex == b.vertex; }
  bool operator==(const Edge &) const = default;
};

struct StableGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  int edge_ends(int v) const {
    int k = 0;
    for (const auto &e : edges) k += (e.a.vertex == v) + (e.b.vertex == v);
    return k;
  }
  int valence(int v) const { return edge_ends(v) + static_cast<int>(vertices[v].legs.size()); }
  int num_legs() const {
    int n = 0;
    for (const auto &v : vertices) n += static_cast<int>(v.legs.size());
    return n;
  }

  // Edge end sitting at (vertex, slot): {edge index, side}.
  std::pair<int, int> locate(HalfEdgeRef h) const {
    for (int i = 0; i < num_edges(); ++i) {
      if (edges[i].a == h) return {i, 0};
      if (edges[i].b == h) return {i, 1};
    }
    return {-1, -1};
  }
  const HalfEdgeRef &end(int edge, int side) const { return side == 0 ? edges[edge].a : edges[edge].b; }

  bool operator==(const StableGraph &) const = default;
};

/// Builds a graph from vertex data and endpoint pairs, assigning slots in
/// order of appearance.
inline StableGraph make_graph(std::vector<Vertex> vertices, const std::vector<std::pair<int, int>> &edge_ends) {
  StableGraph g;
  g.vertices = std::move(vertices);
  std::vector<int> next(g.vertices.size(), 0);
  for (auto [u, v] : edge_ends) {
    if (u < 0 || v < 0 || u >= g.num_vertices() || v >= g.num_vertices())
      throw std::invalid_argument("make_graph: edge endpoint out of range");
    Edge e;
    e.a = {u, next[u]++};
    e.b = {v, next[v]++};
    g.edges.push_back(e);
  }
  return g;
}

struct Validation {
  bool ok = true;
  std::string violation;
  explicit operator bool() const { return ok; }
  static Validation fail(std::string why) { return {false, std::move(why)}; }
};

inline std::vector<int> component_labels(const StableGraph &g, int skip_edge = -1) {
  std::vector<int> parent(g.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < g.num_edges(); ++i)
    if (i != skip_edge) parent[find(g.edges[i].a.vertex)] = find(g.edges[i].b.vertex);
  std::vector<int> label(g.vertices.size());
  std::map<int, int> ids;
  for (int v = 0; v < g.num_vertices(); ++v) {
    auto [it, fresh] = ids.emplace(find(v), static_cast<int>(ids.size()));
    label[v] = it->second;
  }
  return label;
}

inline int count_components(const StableGraph &g, int skip_edge = -1) {
  auto l = component_labels(g, skip_edge);
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

/// Checks slots, legs, connectivity (optional) and stability, in that order.
inline Validation validate(const StableGraph &g, bool require_connected = true) {
  if (g.vertices.empty()) return Validation::fail("graph has no vertices");
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.vertices[v].genus < 0) return Validation::fail("vertex " + std::to_string(v) + " has negative genus");
  std::vector<std::set<int>> slots(g.vertices.size());
  for (int i = 0; i < g.num_edges(); ++i) {
    for (const auto *h : {&g.edges[i].a, &g.edges[i].b}) {
      if (h->vertex < 0 || h->vertex >= g.num_vertices())
        return Validation::fail("edge " + std::to_string(i) + " refers to missing vertex " + std::to_string(h->vertex));
      if (h->slot < 0 || !slots[h->vertex].insert(h->slot).second)
        return Validation::fail("edge " + std::to_string(i) + " reuses or misnumbers slot " + std::to_string(h->slot) +
                                " at vertex " + std::to_string(h->vertex));
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    int k = static_cast<int>(slots[v].size());
    if (k > 0 && *slots[v].rbegin() != k - 1)
      return Validation::fail("slots at vertex " + std::to_string(v) + " are not 0.." + std::to_string(k - 1));
  }
  std::set<int> labels;
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int l : g.vertices[v].legs) {
      if (l < 1) return Validation::fail("leg label " + std::to_string(l) + " is not positive");
      if (!labels.insert(l).second) return Validation::fail("leg label " + std::to_string(l) + " is repeated");
    }
  if (require_connected && count_components(g) != 1) return Validation::fail("graph is disconnected");
  for (int v = 0; v < g.num_vertices(); ++v) {
    int s = 2 * g.vertices[v].genus - 2 + g.valence(v);
    if (s <= 0)
      return Validation::fail("vertex " + std::to_string(v) + " is unstable: 2g-2+n = " + std::to_string(s));
  }
  return {};
}

/// Arithmetic genus: sum of vertex genera plus E - V + 1.
inline int total_genus(const StableGraph &g) {
  int s = 0;
  for (const auto &v : g.vertices) s += v.genus;
  return s + g.num_edges() - g.num_vertices() + 1;
}

inline bool is_separating(const StableGraph &g, int edge) {
  if (g.edges.at(edge).is_loop()) return false;
  return count_components(g, edge) > count_components(g);
}

namespace detail {

inline ColoredGraph colored_view(const StableGraph &g) {
  ColoredGraph cg;
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<int> legs = g.vertices[v].legs;
    std::sort(legs.begin(), legs.end());
    long loops = 0;
    for (const auto &e : g.edges) loops += e.is_loop() && e.a.vertex == v;
    ColorKey key{g.vertices[v].genus, loops, static_cast<long>(legs.size())};
    key.insert(key.end(), legs.begin(), legs.end());
    cg.add_vertex(std::move(key));
  }
  for (const auto &e : g.edges)
    if (!e.is_loop()) cg.add_arc(e.a.vertex, e.b.vertex);
  return cg;
}

} // namespace detail

/// Equal for isomorphic graphs (genus and leg labels respected), distinct otherwise.
inline std::vector<long> canonical_form(const StableGraph &g) { return canonize(detail::colored_view(g)).code; }

inline bool isomorphic(const StableGraph &a, const StableGraph &b) { return canonical_form(a) == canonical_form(b); }

/// The representative of g's isomorphism class: vertices in canonical order,
/// legs sorted, edges sorted by endpoint positions, slots renumbered.
inline StableGraph canonical_relabel(const StableGraph &g) {
  auto c = canonize(detail::colored_view(g));
  std::vector<int> pos(g.vertices.size());
  for (int i = 0; i < g.num_vertices(); ++i) pos[c.order[i]] = i;
  std::vector<Vertex> verts;
  for (int i = 0; i < g.num_vertices(); ++i) {
    Vertex v = g.vertices[c.order[i]];
    std::sort(v.legs.begin(), v.legs.end());
    verts.push_back(std::move(v));
  }
  std::vector<std::pair<int, int>> ends;
  for (const auto &e : g.edges) {
    int x = pos[e.a.vertex], y = pos[e.b.vertex];
    ends.emplace_back(std::min(x, y), std::max(x, y));
  }
  std::sort(ends.begin(), ends.end());
  return make_graph(std::move(verts), ends);
}

/// Automorphisms acting on half-edges: vertex symmetries times permutations
/// of parallel edges and flips/permutations of loops.
inline Integer automorphism_count(const StableGraph &g) {
  Integer total = vertex_automorphisms(detail::colored_view(g));
  std::map<std::pair<int, int>, int> bundles;
  for (const auto &e : g.edges) {
    int x = std::min(e.a.vertex, e.b.vertex), y = std::max(e.a.vertex, e.b.vertex);
    ++bundles[{x, y}];
  }
  for (const auto &[ends, m] : bundles) {
    for (int i = 2; i <= m; ++i) total *= i;
    if (ends.first == ends.second) total *= ipow(2, static_cast<unsigned long>(m));
  }
  return total;
}

struct Contraction {
  StableGraph graph;
  std::vector<int> vertex_map;  // old vertex -> new vertex
  std::vector<int> edge_map;    // old edge -> new edge, -1 when contracted
};

/// Contracts every edge not listed in keep_edges.
inline Contraction contract(const StableGraph &g, const std::vector<int> &keep_edges) {
  std::vector<bool> keep(g.edges.size(), false);
  for (int e : keep_edges) keep.at(static_cast<std::size_t>(e)) = true;
  std::vector<int> parent(g.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < g.num_edges(); ++i)
    if (!keep[i]) parent[find(g.edges[i].a.vertex)] = find(g.edges[i].b.vertex);

  Contraction out;
  out.vertex_map.assign(g.vertices.size(), -1);
  std::map<int, int> ids;
  for (int v = 0; v < g.num_vertices(); ++v) {
    auto [it, fresh] = ids.emplace(find(v), static_cast<int>(ids.size()));
    out.vertex_map[v] = it->second;
  }
  std::vector<Vertex> verts(ids.size());
  std::vector<int> internal(ids.size(), 0), members(ids.size(), 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    int c = out.vertex_map[v];
    verts[c].genus += g.vertices[v].genus;
    verts[c].legs.insert(verts[c].legs.end(), g.vertices[v].legs.begin(), g.vertices[v].legs.end());
    ++members[c];
  }
  for (int i = 0; i < g.num_edges(); ++i)
    if (!keep[i]) ++internal[out.vertex_map[g.edges[i].a.vertex]];
  for (std::size_t c = 0; c < verts.size(); ++c) {
    verts[c].genus += internal[c] - members[c] + 1;
    std::sort(verts[c].legs.begin(), verts[c].legs.end());
  }
  std::vector<std::pair<int, int>> ends;
  out.edge_map.assign(g.edges.size(), -1);
  for (int i = 0; i < g.num_edges(); ++i) {
    if (!keep[i]) continue;
    out.edge_map[i] = static_cast<int>(ends.size());
    ends.emplace_back(out.vertex_map[g.edges[i].a.vertex], out.vertex_map[g.edges[i].b.vertex]);
  }
  out.graph = make_graph(std::move(verts), ends);
  return out;
}

/// An identification of A with a contraction of Gamma: A-edge i is Gamma's
/// edge edge_selection[i]; vertex_map sends each Gamma vertex to the A vertex
/// it is contracted into.
struct AStructure {
  std::vector<int> edge_selection;
  std::vector<int> vertex_map;
  bool operator==(const AStructure &) const = default;
  auto operator<=>(const AStructure &) const = default;
};

/// Checks that contracting the unselected edges yields A with the given maps.
inline bool is_a_structure(const StableGraph &gamma, const StableGraph &a, const AStructure &s) {
  if (static_cast<int>(s.edge_selection.size()) != a.num_edges()) return false;
  if (static_cast<int>(s.vertex_map.size()) != gamma.num_vertices()) return false;
  std::set<int> distinct(s.edge_selection.begin(), s.edge_selection.end());
  if (static_cast<int>(distinct.size()) != a.num_edges()) return false;
  for (int e : s.edge_selection)
    if (e < 0 || e >= gamma.num_edges()) return false;
  auto c = contract(gamma, s.edge_selection);
  if (c.graph.num_vertices() != a.num_vertices()) return false;
  // c's vertex ids -> A's vertex ids through vertex_map.
  std::vector<int> to_a(c.graph.vertices.size(), -1);
  for (int v = 0; v < gamma.num_vertices(); ++v) {
    int cv = c.vertex_map[v], av = s.vertex_map[v];
    if (av < 0 || av >= a.num_vertices()) return false;
    if (to_a[cv] == -1) to_a[cv] = av;
    else if (to_a[cv] != av) return false;
  }
  std::set<int> image(to_a.begin(), to_a.end());
  if (static_cast<int>(image.size()) != a.num_vertices()) return false;
  for (int cv = 0; cv < c.graph.num_vertices(); ++cv) {
    const auto &x = c.graph.vertices[cv];
    auto y = a.vertices[to_a[cv]];
    std::sort(y.legs.begin(), y.legs.end());
    if (x.genus != y.genus || x.legs != y.legs) return false;
  }
  for (int i = 0; i < a.num_edges(); ++i) {
    const auto &ce = c.graph.edges[c.edge_map[s.edge_selection[i]]];
    int x = to_a[ce.a.vertex], y = to_a[ce.b.vertex];
    int p = a.edges[i].a.vertex, q = a.edges[i].b.vertex;
    if (!((x == p && y == q) || (x == q && y == p))) return false;
  }
  return true;
}

/// All A-structures on gamma: for each edge subset of size |E(A)| and each
/// vertex bijection of the contraction onto A, one edge matching.
inline std::vector<AStructure> find_a_structures(const StableGraph &gamma, const StableGraph &a) {
  std::vector<AStructure> out;
  const int m = gamma.num_edges(), k = a.num_edges();
  if (k > m) return out;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  auto next_combination = [&]() {
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) return false;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    return true;
  };
  do {
    auto c = contract(gamma, pick);
    if (c.graph.num_vertices() != a.num_vertices()) continue;
    std::vector<int> perm(static_cast<std::size_t>(a.num_vertices()));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      // perm[c vertex] = A vertex
      bool ok = true;
      for (int cv = 0; cv < c.graph.num_vertices() && ok; ++cv) {
        auto y = a.vertices[perm[cv]];
        std::sort(y.legs.begin(), y.legs.end());
        ok = c.graph.vertices[cv].genus == y.genus && c.graph.vertices[cv].legs == y.legs;
      }
      if (!ok) continue;
      // Match A edges greedily to selected edges with the same endpoints;
      // parallel edges are interchangeable so greedy is complete.
      std::vector<bool> used(static_cast<std::size_t>(k), false);
      std::vector<int> sel(static_cast<std::size_t>(k), -1);
      for (int i = 0; i < k && ok; ++i) {
        int p = a.edges[i].a.vertex, q = a.edges[i].b.vertex;
        bool found = false;
        for (int j = 0; j < k; ++j) {
          if (used[j]) continue;
          const auto &ce = c.graph.edges[c.edge_map[pick[j]]];
          int x = perm[ce.a.vertex], y = perm[ce.b.vertex];
          if ((x == p && y == q) || (x == q && y == p)) {
            used[j] = true;
            sel[i] = pick[j];
            found = true;
            break;
          }
        }
        ok = found;
      }
      if (!ok) continue;
      AStructure s;
      s.edge_selection = sel;
      s.vertex_map.resize(gamma.vertices.size());
      for (int v = 0; v < gamma.num_vertices(); ++v) s.vertex_map[v] = perm[c.vertex_map[v]];
      out.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
  } while (k > 0 && next_combination());
  return out;
}

struct GraphBounds {
  int max_genus = 4;
  int max_half_edges = static_cast<int>(env_bound("HCYCLE_MAX_HALF_EDGES", 12));
};

namespace detail {

struct RawGraph {
  std::vector<Vertex> vertices;
  std::vector<std::pair<int, int>> edges;
  StableGraph build() const { return make_graph(vertices, edges); }
};

inline bool stable_vertex(int genus, int valence) { return 2 * genus - 2 + valence > 0; }

inline int raw_valence(const RawGraph &r, int v) {
  int k = static_cast<int>(r.vertices[v].legs.size());
  for (auto [a, b] : r.edges) k += (a == v) + (b == v);
  return k;
}

// All graphs one degeneration away: a new loop, or a vertex split in two.
inline std::vector<RawGraph> degenerations(const RawGraph &r) {
  std::vector<RawGraph> out;
  for (int v = 0; v < static_cast<int>(r.vertices.size()); ++v) {
    if (r.vertices[v].genus >= 1) {
      RawGraph s = r;
      --s.vertices[v].genus;
      s.edges.emplace_back(v, v);
      out.push_back(std::move(s));
    }
    // Items at v: legs, then edge ends (edge index, side).
    std::vector<std::pair<int, int>> ends;
    for (int i = 0; i < static_cast<int>(r.edges.size()); ++i) {
      if (r.edges[i].first == v) ends.emplace_back(i, 0);
      if (r.edges[i].second == v) ends.emplace_back(i, 1);
    }
    const auto &legs = r.vertices[v].legs;
    const int items = static_cast<int>(legs.size() + ends.size());
    const int w = static_cast<int>(r.vertices.size());
    for (long mask = 0; mask < (1L << items); ++mask) {
      for (int g1 = 0; g1 <= r.vertices[v].genus; ++g1) {
        RawGraph s = r;
        s.vertices[v].legs.clear();
        s.vertices[v].genus = g1;
        s.vertices.push_back({r.vertices[v].genus - g1, {}});
        for (int i = 0; i < static_cast<int>(legs.size()); ++i)
          s.vertices[(mask >> i) & 1 ? w : v].legs.push_back(legs[i]);
        for (int j = 0; j < static_cast<int>(ends.size()); ++j) {
          int side_vertex = (mask >> (legs.size() + j)) & 1 ? w : v;
          auto &e = s.edges[ends[j].first];
          (ends[j].second == 0 ? e.first : e.second) = side_vertex;
        }
        s.edges.emplace_back(v, w);
        if (stable_vertex(s.vertices[v].genus, raw_valence(s, v)) && stable_vertex(s.vertices[w].genus, raw_valence(s, w)))
          out.push_back(std::move(s));
      }
    }
  }
  return out;
}

} // namespace detail

/// Every stable graph of genus g with legs 1..n and at most max_vertices
/// vertices, one per isomorphism class, sorted by canonical form.
inline std::vector<StableGraph> enumerate_stable_graphs(int g, int n, int max_vertices, const GraphBounds &bounds = {}) {
  if (g < 0 || n < 0) throw std::invalid_argument("enumerate_stable_graphs: g and n must be non-negative");
  if (max_vertices < 1) throw std::invalid_argument("enumerate_stable_graphs: max_vertices must be >= 1");
  const int max_edges = 3 * g - 3 + n;
  if (g > bounds.max_genus && 2 * max_edges > bounds.max_half_edges)
    throw Refusal("enumerate_stable_graphs: (g, n) = (" + std::to_string(g) + ", " + std::to_string(n) +
                  ") allows " + std::to_string(2 * max_edges) + " half-edges, above the bound " +
                  std::to_string(bounds.max_half_edges) + " for genus above " + std::to_string(bounds.max_genus));
  std::vector<StableGraph> out;
  if (2 * g - 2 + n <= 0) return out;

  detail::RawGraph smooth;
  smooth.vertices.push_back({g, {}});
  for (int l = 1; l <= n; ++l) smooth.vertices[0].legs.push_back(l);
  std::map<std::vector<long>, StableGraph> all;
  std::vector<detail::RawGraph> level{smooth};
  all.emplace(canonical_form(smooth.build()), smooth.build());
  while (!level.empty()) {
    std::map<std::vector<long>, detail::RawGraph> next;
    for (const auto &r : level)
      for (auto &s : detail::degenerations(r)) {
        if (static_cast<int>(s.vertices.size()) > max_vertices) continue;
        auto built = s.build();
        auto key = canonical_form(built);
        if (all.count(key)) continue;
        all.emplace(key, built);
        next.emplace(std::move(key), std::move(s));
      }
    level.clear();
    for (auto &[k, r] : next) level.push_back(std::move(r));
  }
  for (auto &[k, gr] : all) out.push_back(canonical_relabel(gr));
  return out;
}

} // namespace hcycle
