#pragma once

// Admissible covers of stable graphs: validity, realizability by monodromy,
// stratum dimension and local intersection multiplicity.

#include "hcycle/common.hpp"
#include "hcycle/graphs.hpp"
#include "hcycle/hurwitz.hpp"

#include <array>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace hcycle {

/// A half-edge named by the edge it belongs to and its side (0 = a, 1 = b).
struct EdgeSide {
  int edge = 0;
  int side = 0;
  auto operator<=>(const EdgeSide &) const = default;
};

struct GraphCover {
  StableGraph source, target;
  std::vector<int> vertex_map;                     // source vertex -> target vertex
  std::vector<std::array<EdgeSide, 2>> half_edge_map;  // source edge sides -> target half-edges
  std::map<int, int> leg_map;                      // source leg label -> target leg label
  std::vector<int> degrees;                        // per source vertex
  std::vector<std::array<int, 2>> edge_ramification;  // per source edge, per side
  std::map<int, int> leg_ramification;             // per source leg label

  /// Degree over target vertex 0 (all target vertices agree on valid covers).
  int degree() const {
    int d = 0;
    for (std::size_t v = 0; v < vertex_map.size(); ++v)
      if (vertex_map[v] == 0) d += degrees[v];
    return d;
  }

  bool operator==(const GraphCover &) const = default;
};

namespace detail {

inline int leg_vertex(const StableGraph &g, int label) {
  for (int v = 0; v < g.num_vertices(); ++v)
    for (int l : g.vertices[v].legs)
      if (l == label) return v;
  return -1;
}

// Connected class counts are requested over and over by the strata search.
inline Integer cached_classes(const MonodromyProblem &p, const HurwitzBounds &bounds) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::vector<std::vector<int>>>, Integer> cache;
  std::vector<std::vector<int>> key_profiles;
  for (const auto &pr : p.profiles) {
    auto parts = pr.parts;
    std::sort(parts.rbegin(), parts.rend());
    key_profiles.push_back(std::move(parts));
  }
  std::sort(key_profiles.begin(), key_profiles.end());
  auto key = std::make_tuple(p.degree, p.target_genus, std::move(key_profiles));
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Integer classes = count_tuples(p, bounds).classes;
  std::lock_guard lock(mu);
  cache.emplace(std::move(key), classes);
  return classes;
}

} // namespace detail

/// Checks, in order: both graphs, map shapes, compatibility with attachment
/// data, equal ramification across edges, local degrees over target
/// half-edges and legs, global degree, per-vertex Riemann-Hurwitz.
inline Validation validate_cover(const GraphCover &c, bool require_connected_source = false) {
  const auto &src = c.source, &tgt = c.target;
  if (auto v = validate(src, require_connected_source); !v) return Validation::fail("source: " + v.violation);
  if (auto v = validate(tgt, true); !v) return Validation::fail("target: " + v.violation);

  const int nv = src.num_vertices(), ne = src.num_edges();
  if (static_cast<int>(c.vertex_map.size()) != nv) return Validation::fail("vertex_map has wrong length");
  if (static_cast<int>(c.degrees.size()) != nv) return Validation::fail("degrees has wrong length");
  if (static_cast<int>(c.half_edge_map.size()) != ne) return Validation::fail("half_edge_map has wrong length");
  if (static_cast<int>(c.edge_ramification.size()) != ne) return Validation::fail("edge ramification has wrong length");
  for (int v = 0; v < nv; ++v) {
    if (c.vertex_map[v] < 0 || c.vertex_map[v] >= tgt.num_vertices())
      return Validation::fail("vertex " + std::to_string(v) + " maps outside the target");
    if (c.degrees[v] < 1) return Validation::fail("vertex " + std::to_string(v) + " has non-positive degree");
  }

  // Compatibility.
  for (int e = 0; e < ne; ++e) {
    const auto &img = c.half_edge_map[e];
    for (int s = 0; s < 2; ++s)
      if (img[s].edge < 0 || img[s].edge >= tgt.num_edges() || img[s].side < 0 || img[s].side > 1)
        return Validation::fail("edge " + std::to_string(e) + " side " + std::to_string(s) + " maps outside the target");
    if (img[0].edge != img[1].edge || img[0].side == img[1].side)
      return Validation::fail("edge " + std::to_string(e) + " is not mapped onto a target edge");
    for (int s = 0; s < 2; ++s) {
      int v = src.end(e, s).vertex;
      if (tgt.end(img[s].edge, img[s].side).vertex != c.vertex_map[v])
        return Validation::fail("edge " + std::to_string(e) + " side " + std::to_string(s) +
                                " does not follow its vertex to the target");
    }
  }
  std::set<int> source_labels;
  for (int v = 0; v < nv; ++v)
    for (int l : src.vertices[v].legs) {
      source_labels.insert(l);
      auto it = c.leg_map.find(l);
      if (it == c.leg_map.end()) return Validation::fail("leg " + std::to_string(l) + " has no image");
      int tv = detail::leg_vertex(tgt, it->second);
      if (tv < 0) return Validation::fail("leg " + std::to_string(l) + " maps to a missing target leg");
      if (tv != c.vertex_map[v])
        return Validation::fail("leg " + std::to_string(l) + " does not follow its vertex to the target");
      auto r = c.leg_ramification.find(l);
      if (r == c.leg_ramification.end() || r->second < 1)
        return Validation::fail("leg " + std::to_string(l) + " has no positive ramification");
    }
  for (const auto &[l, t] : c.leg_map)
    if (!source_labels.count(l)) return Validation::fail("leg_map mentions unknown leg " + std::to_string(l));

  // Common ramification across each edge.
  for (int e = 0; e < ne; ++e) {
    const auto &r = c.edge_ramification[e];
    if (r[0] < 1 || r[1] < 1) return Validation::fail("edge " + std::to_string(e) + " has non-positive ramification");
    if (r[0] != r[1]) return Validation::fail("edge " + std::to_string(e) + " has unequal ramification on its sides");
  }

  // Local degree over target half-edges and target legs.
  for (int v = 0; v < nv; ++v) {
    const int tv = c.vertex_map[v];
    std::map<EdgeSide, int> over_half_edge;
    for (int e = 0; e < tgt.num_edges(); ++e)
      for (int s = 0; s < 2; ++s)
        if (tgt.end(e, s).vertex == tv) over_half_edge[{e, s}] = 0;
    for (int e = 0; e < ne; ++e)
      for (int s = 0; s < 2; ++s)
        if (src.end(e, s).vertex == v) over_half_edge[c.half_edge_map[e][s]] += c.edge_ramification[e][s];
    for (const auto &[h, sum] : over_half_edge)
      if (sum != c.degrees[v])
        return Validation::fail("local degree violated at source vertex " + std::to_string(v) + " over target edge " +
                                std::to_string(h.edge) + " side " + std::to_string(h.side) + ": ramification sums to " +
                                std::to_string(sum) + ", degree is " + std::to_string(c.degrees[v]));
    std::map<int, int> over_leg;
    for (int l : tgt.vertices[tv].legs) over_leg[l] = 0;
    for (int l : src.vertices[v].legs) over_leg[c.leg_map.at(l)] += c.leg_ramification.at(l);
    for (const auto &[l, sum] : over_leg)
      if (sum != c.degrees[v])
        return Validation::fail("local degree violated at source vertex " + std::to_string(v) + " over target leg " +
                                std::to_string(l) + ": ramification sums to " + std::to_string(sum) + ", degree is " +
                                std::to_string(c.degrees[v]));
  }

  // Global degree.
  std::vector<int> fiber(tgt.vertices.size(), 0);
  for (int v = 0; v < nv; ++v) fiber[c.vertex_map[v]] += c.degrees[v];
  for (int tv = 0; tv < tgt.num_vertices(); ++tv)
    if (fiber[tv] != fiber[0])
      return Validation::fail("global degree violated: target vertex " + std::to_string(tv) + " has degree " +
                              std::to_string(fiber[tv]) + ", target vertex 0 has " + std::to_string(fiber[0]));

  // Riemann-Hurwitz at each source vertex.
  for (int v = 0; v < nv; ++v) {
    int branch = 0;
    for (int e = 0; e < ne; ++e)
      for (int s = 0; s < 2; ++s)
        if (src.end(e, s).vertex == v) branch += c.edge_ramification[e][s] - 1;
    for (int l : src.vertices[v].legs) branch += c.leg_ramification.at(l) - 1;
    int lhs = 2 * src.vertices[v].genus - 2;
    int rhs = c.degrees[v] * (2 * tgt.vertices[c.vertex_map[v]].genus - 2) + branch;
    if (lhs != rhs)
      return Validation::fail("Riemann-Hurwitz fails at source vertex " + std::to_string(v) + ": 2g-2 = " +
                              std::to_string(lhs) + " but d(2h-2) + branching = " + std::to_string(rhs));
  }
  return {};
}

/// The monodromy problem of the cover restricted to source vertex v: one
/// profile per target special point at the image vertex, trivial ones dropped.
inline MonodromyProblem vertex_problem(const GraphCover &c, int v) {
  const auto &src = c.source, &tgt = c.target;
  const int tv = c.vertex_map[v];
  std::map<std::pair<int, int>, std::vector<int>> parts;  // (kind, id) -> parts
  for (int e = 0; e < src.num_edges(); ++e)
    for (int s = 0; s < 2; ++s)
      if (src.end(e, s).vertex == v) {
        auto h = c.half_edge_map[e][s];
        parts[{0, 2 * h.edge + h.side}].push_back(c.edge_ramification[e][s]);
      }
  for (int l : src.vertices[v].legs) parts[{1, c.leg_map.at(l)}].push_back(c.leg_ramification.at(l));
  MonodromyProblem p{c.degrees[v], tgt.vertices[tv].genus, {}, true};
  for (auto &[key, ps] : parts) {
    RamificationProfile pr{ps};
    std::sort(pr.parts.rbegin(), pr.parts.rend());
    if (!pr.trivial()) p.profiles.push_back(std::move(pr));
  }
  return p;
}

struct Realizability {
  bool realizable = true;
  std::vector<Integer> classes;  // per source vertex; 0 where RH already fails
  std::string reason;
};

/// Positive connected Hurwitz count at every source vertex. Riemann-Hurwitz
/// is checked first, so hopeless vertices never reach the search.
inline Realizability realizable(const GraphCover &c, const HurwitzBounds &bounds = {}) {
  Realizability out;
  for (int v = 0; v < c.source.num_vertices(); ++v) {
    auto p = vertex_problem(c, v);
    auto g = connected_source_genus(p);
    if (!g || *g != c.source.vertices[v].genus) {
      out.classes.push_back(0);
      if (out.realizable)
        out.reason = "Riemann-Hurwitz excludes source vertex " + std::to_string(v);
      out.realizable = false;
      continue;
    }
    if (p.degree > bounds.max_degree)
      throw Refusal("realizable: source vertex " + std::to_string(v) + " has degree " + std::to_string(p.degree) +
                    " above the monodromy bound " + std::to_string(bounds.max_degree));
    Integer classes = detail::cached_classes(p, bounds);
    out.classes.push_back(classes);
    if (classes == 0 && out.realizable) {
      out.realizable = false;
      out.reason = "no monodromy realizes source vertex " + std::to_string(v);
    }
  }
  return out;
}

/// Sum over target vertices of 3g - 3 + n (+ extra marks).
inline long stratum_dimension(const GraphCover &c, const std::vector<int> &extra_marks = {}) {
  const auto &tgt = c.target;
  if (!extra_marks.empty() && static_cast<int>(extra_marks.size()) != tgt.num_vertices())
    throw std::invalid_argument("stratum_dimension: extra_marks needs one entry per target vertex");
  long total = 0;
  for (int v = 0; v < tgt.num_vertices(); ++v) {
    long term = 3L * tgt.vertices[v].genus - 3 + tgt.valence(v) + (extra_marks.empty() ? 0 : extra_marks[v]);
    if (term < 0)
      throw std::invalid_argument("stratum_dimension: target vertex " + std::to_string(v) + " is unstable (3g-3+n = " +
                                  std::to_string(term) + ")");
    total += term;
  }
  return total;
}

/// Every target edge is the image of some selected source edge.
inline bool genericity_check(const GraphCover &c, const std::vector<int> &selected_edges) {
  std::set<int> hit;
  for (int e : selected_edges) {
    if (e < 0 || e >= c.source.num_edges()) return false;
    hit.insert(c.half_edge_map[e][0].edge);
  }
  return static_cast<int>(hit.size()) == c.target.num_edges();
}

inline bool genericity_check(const GraphCover &c, const AStructure &a) { return genericity_check(c, a.edge_selection); }

/// Length of the artinian factor: product of ramification over the source
/// edges that are not selected.
inline Integer intersection_multiplicity(const GraphCover &c, const std::vector<int> &selected_edges) {
  std::set<int> sel(selected_edges.begin(), selected_edges.end());
  if (sel.size() != selected_edges.size()) throw std::invalid_argument("intersection_multiplicity: repeated edge");
  if (!genericity_check(c, selected_edges))
    throw std::invalid_argument("intersection_multiplicity: genericity fails (selected edges miss a target edge)");
  Integer m = 1;
  for (int e = 0; e < c.source.num_edges(); ++e)
    if (!sel.count(e)) m *= c.edge_ramification[e][0];
  return m;
}

inline Integer intersection_multiplicity(const GraphCover &c, const AStructure &a) {
  return intersection_multiplicity(c, a.edge_selection);
}

/// Separating source edges lie over separating target edges.
inline bool separating_image_check(const GraphCover &c) {
  for (int e = 0; e < c.source.num_edges(); ++e)
    if (is_separating(c.source, e) && !is_separating(c.target, c.half_edge_map[e][0].edge)) return false;
  return true;
}

} // namespace hcycle
