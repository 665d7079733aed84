#pragma once

// Pullbacks of Hurwitz cycles to boundary strata: enumerate the admissible
// cover strata (Gamma -> Gamma', A-structure) meeting a fixed boundary graph
// A, bound the dimension of their image in the factors of M_A, and tag each
// one with the reason it can or cannot carry a non-tautological class.

#include "hcycle/canon.hpp"
#include "hcycle/common.hpp"
#include "hcycle/covers.hpp"
#include "hcycle/graphs.hpp"
#include "hcycle/hurwitz.hpp"
#include "hcycle/modular.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace hcycle {

struct HurwitzParams {
  int g = 0, h = 1, d = 2;
  int m2 = 0, md = 0, n = 0;

  long b() const { return (2L * g - 2) - static_cast<long>(d) * (2L * h - 2); }
  long N() const { return (d - 1) * b(); }
  long B() const { return 3L * h - 3 + b() + m2 + md; }
  bool operator==(const HurwitzParams &) const = default;
};

inline void check_params(const HurwitzParams &p) {
  if (p.g < 0 || p.h < 0) throw std::invalid_argument("params: genera must be non-negative");
  if (p.d < 2) throw std::invalid_argument("params: degree must be at least 2");
  if (p.m2 < 0 || p.md < 0 || p.n < 0) throw std::invalid_argument("params: marked counts must be non-negative");
  if (p.b() < 0)
    throw std::invalid_argument("params: b = (2g-2) - d(2h-2) = " + std::to_string(p.b()) + " is negative");
  if (p.n > p.b())
    throw std::invalid_argument("params: n = " + std::to_string(p.n) + " exceeds the " + std::to_string(p.b()) +
                                " ramification points");
}

enum class Tag {
  BoundarySupportedTKD,
  RationalTargetTKD,
  FixedTargetTKD,
  DistinctTargetsTKD,
  ZeroByDimension,
  CandidateNontaut,
};

inline std::string to_string(Tag t) {
  switch (t) {
  case Tag::BoundarySupportedTKD: return "boundary-supported-TKD";
  case Tag::RationalTargetTKD: return "rational-target-TKD";
  case Tag::FixedTargetTKD: return "fixed-target-TKD";
  case Tag::DistinctTargetsTKD: return "distinct-targets-TKD";
  case Tag::ZeroByDimension: return "zero-by-dimension";
  case Tag::CandidateNontaut: return "candidate-nontaut";
  }
  return "?";
}

/// Image dimension of a stratum in one factor of M_A (a set of A vertices).
struct FactorDimension {
  std::string name;
  std::vector<int> a_vertices;
  long image = 0;
  long required = 0;
};

struct StratumContribution {
  GraphCover cover;
  AStructure a_structure;
  long image_dim = 0;      // of the factor closest to failing its requirement
  long required_dim = 0;
  std::vector<FactorDimension> factors;
  Integer multiplicity = 1;  // local-ring length only
  bool scalar_unknown = true;  // the remaining constant factor is never pinned down
  Tag tag = Tag::CandidateNontaut;
  long excess_dimension = 0;
  int psi_excess_degree = 0;
  std::string shape;
  std::vector<long> key;  // canonical form of the whole datum
};

struct StrataStats {
  long target_shapes = 0;
  long fiber_choices = 0;
  long gluings = 0;
  long wrong_source = 0;      // disconnected or wrong genus
  long no_a_structure = 0;    // no generic A-structure on Gamma
  long separating_rejected = 0;
  long placements = 0;
  long duplicates = 0;
};

struct Classification {
  std::vector<StratumContribution> contributions;
  StrataStats stats;
};

struct StrataBounds {
  int max_genus = 4;
  int max_degree = 4;
  long max_candidates = env_bound("HCYCLE_MAX_CANDIDATES", 2'000'000);
  HurwitzBounds hurwitz{};
};

namespace detail {

// Target legs come in classes. Every fiber of a class keeps the preimages
// listed in `roles`, each of which must end up on the given A vertex.
// Branch fibers are simple branch points and keep nothing.
struct FiberClass {
  std::string name;
  int count = 0;
  bool branch = false;
  std::vector<int> roles;
};

struct EngineSpec {
  int g = 0, h = 0, d = 0;
  std::vector<FiberClass> classes;
  StableGraph a;  // legs are filled in by attach_kept_legs
  std::vector<FactorDimension> factors;  // image left at 0
  long expected_dim = 0;
  bool trees_only = true;
};

/// Kept labels run over classes, then fibers of a class, then roles.
inline void attach_kept_legs(EngineSpec &spec) {
  for (auto &v : spec.a.vertices) v.legs.clear();
  int label = 1;
  for (const auto &c : spec.classes)
    for (int i = 0; i < c.count; ++i)
      for (int r : c.roles) spec.a.vertices.at(r).legs.push_back(label++);
}

inline int kept_total(const EngineSpec &spec) {
  int k = 0;
  for (const auto &c : spec.classes) k += c.count * static_cast<int>(c.roles.size());
  return k;
}

// Center vertex 0 with at most one loop (edge 0 when present), tails 1..k
// each joined to the center by one edge.
struct TargetShape {
  std::vector<int> genus;
  bool loop = false;
  std::vector<std::vector<int>> legs;  // [vertex][class] = number of fibers

  int num_vertices() const { return static_cast<int>(genus.size()); }
  int num_edges() const { return (loop ? 1 : 0) + num_vertices() - 1; }
  int tail_edge(int t) const { return (loop ? 1 : 0) + t - 1; }
  // Half-edges at v as (edge, side).
  std::vector<EdgeSide> half_edges(int v) const {
    std::vector<EdgeSide> out;
    if (v == 0) {
      if (loop) out.push_back({0, 0}), out.push_back({0, 1});
      for (int t = 1; t < num_vertices(); ++t) out.push_back({tail_edge(t), 0});
    } else {
      out.push_back({tail_edge(v), 1});
    }
    return out;
  }
  std::pair<int, int> edge_ends(int e) const {
    if (loop && e == 0) return {0, 0};
    return {0, e - (loop ? 1 : 0) + 1};
  }
};

inline std::vector<long> target_key(const TargetShape &t) {
  ColoredGraph cg;
  for (int v = 0; v < t.num_vertices(); ++v) {
    ColorKey k{0, t.genus[v]};
    k.insert(k.end(), t.legs[v].begin(), t.legs[v].end());
    cg.add_vertex(k);
  }
  for (int e = 0; e < t.num_edges(); ++e) {
    auto [a, b] = t.edge_ends(e);
    cg.add_arc(a, b);
  }
  return canonize(cg).code;
}

inline long target_vertex_dim(const TargetShape &t, int v) {
  long n = 0;
  for (int c : t.legs[v]) n += c;
  n += static_cast<long>(t.half_edges(v).size());
  return 3L * t.genus[v] - 3 + n;
}

inline void partitions_of(int n, int max_part, std::vector<int> &cur, std::vector<std::vector<int>> &out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions_of(n - p, p, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions_of(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions_of(n, n, cur, out);
  return out;
}

inline std::vector<TargetShape> target_shapes(const EngineSpec &spec, int max_edges) {
  std::vector<TargetShape> out;
  std::set<std::vector<long>> seen;
  const int nclass = static_cast<int>(spec.classes.size());
  for (int loop = 0; loop <= (spec.trees_only ? 0 : 1); ++loop)
    for (int center = 0; center + loop <= spec.h; ++center) {
      int rest = spec.h - center - loop;
      for (int k = 0; k + loop <= max_edges; ++k) {
        // Tail genera: non-increasing k-tuples summing to rest.
        std::vector<std::vector<int>> tails;
        std::vector<int> cur;
        std::function<void(int, int)> rec = [&](int left, int cap) {
          if (static_cast<int>(cur.size()) == k) {
            if (left == 0) tails.push_back(cur);
            return;
          }
          for (int x = std::min(left, cap); x >= 0; --x) {
            cur.push_back(x);
            rec(left - x, x);
            cur.pop_back();
          }
        };
        rec(rest, rest);
        for (const auto &tg : tails) {
          TargetShape base;
          base.genus.push_back(center);
          base.genus.insert(base.genus.end(), tg.begin(), tg.end());
          base.loop = loop == 1;
          const int nv = base.num_vertices();
          base.legs.assign(static_cast<std::size_t>(nv), std::vector<int>(static_cast<std::size_t>(nclass), 0));
          // Distribute each class over the vertices.
          auto count_of = [&](int c) { return c < nclass ? spec.classes[c].count : 0; };
          std::function<void(int, int, int)> dist = [&](int c, int v, int left) {
            if (c == nclass) {
              for (int w = 0; w < nv; ++w) {
                int n = static_cast<int>(base.half_edges(w).size());
                for (int x : base.legs[w]) n += x;
                if (!stable_vertex(base.genus[w], n)) return;
              }
              if (seen.insert(target_key(base)).second) out.push_back(base);
              return;
            }
            if (v == nv - 1) {
              base.legs[v][c] = left;
              dist(c + 1, 0, count_of(c + 1));
              base.legs[v][c] = 0;
              return;
            }
            for (int x = 0; x <= left; ++x) {
              base.legs[v][c] = x;
              dist(c, v + 1, left - x);
            }
            base.legs[v][c] = 0;
          };
          dist(0, 0, count_of(0));
        }
      }
    }
  return out;
}

struct CompType {
  int deg = 1, genus = 0, beta = 0;
  std::vector<std::vector<int>> parts;  // per half-edge of its target vertex
  auto operator<=>(const CompType &) const = default;
};

inline std::vector<CompType> component_types(const EngineSpec &spec, const TargetShape &t, int v,
                                             const HurwitzBounds &hb) {
  std::vector<CompType> out;
  const auto hes = t.half_edges(v);
  int nbranch = 0, nmarked = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c)
    (spec.classes[c].branch ? nbranch : nmarked) += t.legs[v][c];
  const int G = t.genus[v];
  for (int deg = 1; deg <= spec.d; ++deg) {
    auto parts = partitions_of(deg);
    for (int beta = 0; beta <= nbranch; ++beta) {
      if (beta > 0 && deg < 2) break;
      std::vector<std::size_t> pick(hes.size(), 0);
      while (true) {
        CompType ct{deg, 0, beta, {}};
        int branch = beta, valence = nmarked * deg + nbranch * deg - beta;
        for (std::size_t i = 0; i < hes.size(); ++i) {
          ct.parts.push_back(parts[pick[i]]);
          branch += deg - static_cast<int>(parts[pick[i]].size());
          valence += static_cast<int>(parts[pick[i]].size());
        }
        int twice = deg * (2 * G - 2) + branch;
        if (twice % 2 == 0 && twice >= -2) {
          ct.genus = twice / 2 + 1;
          if (stable_vertex(ct.genus, valence)) {
            MonodromyProblem p{deg, G, {}, true};
            std::vector<int> simple(static_cast<std::size_t>(deg - 1), 1);
            if (deg >= 2) simple[0] = 2;
            for (int i = 0; i < beta; ++i) p.profiles.push_back({simple});
            for (const auto &pp : ct.parts)
              if (RamificationProfile pr{pp}; !pr.trivial()) p.profiles.push_back(pr);
            if (cached_classes(p, hb) > 0) out.push_back(ct);
          }
        }
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == parts.size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
  }
  return out;
}

// Multisets of component types over one target vertex with total degree d
// and all branch fibers of the vertex used once.
inline std::vector<std::vector<CompType>> fiber_configs(const std::vector<CompType> &types, int d, int nbranch) {
  std::vector<std::vector<CompType>> out;
  std::vector<CompType> cur;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t from, int deg_left, int beta_left) {
    if (deg_left == 0) {
      if (beta_left == 0) out.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < types.size(); ++i) {
      if (types[i].deg > deg_left || types[i].beta > beta_left) continue;
      cur.push_back(types[i]);
      rec(i, deg_left - types[i].deg, beta_left - types[i].beta);
      cur.pop_back();
    }
  };
  rec(0, d, nbranch);
  return out;
}

// Non-negative integer matrices with the given margins.
inline void contingency_tables(const std::vector<int> &rows, const std::vector<int> &cols,
                               std::vector<std::vector<int>> &out_flat) {
  const std::size_t R = rows.size(), C = cols.size();
  std::vector<int> cell(R * C, 0), col_left(cols);
  std::function<void(std::size_t, std::size_t, int)> rec = [&](std::size_t r, std::size_t c, int row_left) {
    if (r == R) {
      if (std::all_of(col_left.begin(), col_left.end(), [](int x) { return x == 0; })) out_flat.push_back(cell);
      return;
    }
    if (c == C - 1) {
      if (row_left > col_left[c]) return;
      cell[r * C + c] = row_left;
      col_left[c] -= row_left;
      rec(r + 1, 0, r + 1 < R ? rows[r + 1] : 0);
      col_left[c] += row_left;
      cell[r * C + c] = 0;
      return;
    }
    for (int x = 0; x <= std::min(row_left, col_left[c]); ++x) {
      cell[r * C + c] = x;
      col_left[c] -= x;
      rec(r, c + 1, row_left - x);
      col_left[c] += x;
    }
    cell[r * C + c] = 0;
  };
  if (R == 0 || C == 0) {
    if (std::accumulate(rows.begin(), rows.end(), 0) == 0 && std::accumulate(cols.begin(), cols.end(), 0) == 0)
      out_flat.push_back({});
    return;
  }
  rec(0, 0, rows[0]);
}

struct SourceEdge {
  int u, v, ram, target_edge;
};

// All ways of joining the source half-edges over each target edge, matching
// ramification indices.
inline std::vector<std::vector<SourceEdge>> gluings(const TargetShape &t, const std::vector<int> &comp_vertex,
                                                    const std::vector<CompType> &comps) {
  // Half-edge position of (edge, side) among its vertex's half-edges.
  auto position = [&](int v, EdgeSide h) {
    auto hes = t.half_edges(v);
    return static_cast<int>(std::find(hes.begin(), hes.end(), h) - hes.begin());
  };
  std::vector<std::vector<std::vector<SourceEdge>>> per_edge;
  for (int e = 0; e < t.num_edges(); ++e) {
    auto [va, vb] = t.edge_ends(e);
    int pa = position(va, {e, 0}), pb = position(vb, {e, 1});
    std::map<int, std::pair<std::vector<int>, std::vector<int>>> by_ram;  // ram -> (row comps, col comps)
    for (std::size_t x = 0; x < comps.size(); ++x) {
      if (comp_vertex[x] == va)
        for (int r : comps[x].parts[pa]) by_ram[r].first.push_back(static_cast<int>(x));
      if (comp_vertex[x] == vb)
        for (int r : comps[x].parts[pb]) by_ram[r].second.push_back(static_cast<int>(x));
    }
    std::vector<std::vector<SourceEdge>> options{{}};
    for (auto &[r, lists] : by_ram) {
      if (lists.first.size() != lists.second.size()) return {};
      std::vector<int> rc, cc, rcnt, ccnt;
      for (int x : lists.first)
        if (rc.empty() || rc.back() != x) rc.push_back(x), rcnt.push_back(1);
        else ++rcnt.back();
      for (int x : lists.second)
        if (cc.empty() || cc.back() != x) cc.push_back(x), ccnt.push_back(1);
        else ++ccnt.back();
      std::vector<std::vector<int>> tables;
      contingency_tables(rcnt, ccnt, tables);
      std::vector<std::vector<SourceEdge>> next;
      for (const auto &opt : options)
        for (const auto &tab : tables) {
          auto o = opt;
          for (std::size_t i = 0; i < rc.size(); ++i)
            for (std::size_t j = 0; j < cc.size(); ++j)
              for (int k = 0; k < tab[i * cc.size() + j]; ++k) o.push_back({rc[i], cc[j], r, e});
          next.push_back(std::move(o));
        }
      options = std::move(next);
    }
    per_edge.push_back(std::move(options));
  }
  std::vector<std::vector<SourceEdge>> out{{}};
  for (const auto &opts : per_edge) {
    std::vector<std::vector<SourceEdge>> next;
    for (const auto &acc : out)
      for (const auto &o : opts) {
        auto x = acc;
        x.insert(x.end(), o.begin(), o.end());
        next.push_back(std::move(x));
      }
    out = std::move(next);
  }
  return out;
}

// Per source vertex: dimension after stabilizing its A-group with only kept
// legs and selected half-edges as special points (-1 when contracted); also
// the number of surviving edges inside groups.
struct GroupStabilization {
  std::vector<long> dim;
  int internal_edges = 0;
};

inline GroupStabilization stabilize_groups(const StableGraph &src, const std::vector<int> &selected,
                                           const std::set<int> &kept) {
  const int n = src.num_vertices();
  std::vector<int> special(static_cast<std::size_t>(n), 0);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int v = 0; v < n; ++v)
    for (int l : src.vertices[v].legs) special[v] += kept.count(l) ? 1 : 0;
  std::set<int> sel(selected.begin(), selected.end());
  std::vector<std::pair<int, int>> internal;
  for (int e = 0; e < src.num_edges(); ++e) {
    int a = src.edges[e].a.vertex, b = src.edges[e].b.vertex;
    if (sel.count(e)) ++special[a], ++special[b];
    else internal.emplace_back(a, b);
  }
  std::vector<bool> edge_alive(internal.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n; ++v) {
      if (!alive[v] || src.vertices[v].genus != 0) continue;
      std::vector<std::size_t> ends;
      for (std::size_t i = 0; i < internal.size(); ++i) {
        if (!edge_alive[i]) continue;
        if (internal[i].first == v) ends.push_back(i);
        if (internal[i].second == v) ends.push_back(i);
      }
      int val = special[v] + static_cast<int>(ends.size());
      if (val >= 3) continue;
      if (ends.size() == 2 && ends[0] != ends[1] && special[v] == 0) {
        auto other = [&](std::size_t i) { return internal[i].first == v ? internal[i].second : internal[i].first; };
        int x = other(ends[0]), y = other(ends[1]);
        edge_alive[ends[0]] = edge_alive[ends[1]] = false;
        internal.emplace_back(x, y);
        edge_alive.push_back(true);
        alive[v] = false;
        changed = true;
      } else if (ends.size() == 1 && val <= 2) {
        auto &e = internal[ends[0]];
        int x = e.first == v ? e.second : e.first;
        special[x] += special[v];
        edge_alive[ends[0]] = false;
        alive[v] = false;
        changed = true;
      }
    }
  }
  GroupStabilization out;
  out.dim.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> val(special);
  for (std::size_t i = 0; i < internal.size(); ++i)
    if (edge_alive[i]) {
      ++out.internal_edges;
      ++val[internal[i].first];
      ++val[internal[i].second];
    }
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    int g = src.vertices[v].genus;
    out.dim[v] = (g == 1 && val[v] == 0) ? 1 : std::max(0L, 3L * g - 3 + val[v]);
  }
  return out;
}

inline std::vector<long> candidate_key(const GraphCover &c, const AStructure &a, const std::vector<int> &leg_class,
                                       const std::map<int, int> &kept_role) {
  // leg_class: target leg label -> class index (dense by label).
  ColoredGraph cg;
  const auto &tgt = c.target, &src = c.source;
  std::vector<int> tv(tgt.vertices.size()), te(tgt.edges.size()), sv(src.vertices.size());
  std::map<int, int> tl;
  for (int v = 0; v < tgt.num_vertices(); ++v) tv[v] = cg.add_vertex({0, tgt.vertices[v].genus});
  for (int e = 0; e < tgt.num_edges(); ++e) {
    te[e] = cg.add_vertex({1});
    cg.add_arc(te[e], tv[tgt.edges[e].a.vertex]);
    cg.add_arc(te[e], tv[tgt.edges[e].b.vertex]);
  }
  for (int v = 0; v < tgt.num_vertices(); ++v)
    for (int l : tgt.vertices[v].legs) {
      tl[l] = cg.add_vertex({2, leg_class.at(static_cast<std::size_t>(l))});
      cg.add_arc(tl[l], tv[v]);
    }
  for (int v = 0; v < src.num_vertices(); ++v) {
    sv[v] = cg.add_vertex({3, src.vertices[v].genus, c.degrees[v], a.vertex_map[v]});
    cg.add_arc(sv[v], tv[c.vertex_map[v]]);
  }
  std::set<int> sel(a.edge_selection.begin(), a.edge_selection.end());
  for (int e = 0; e < src.num_edges(); ++e) {
    int x = cg.add_vertex({4, c.edge_ramification[e][0], sel.count(e) ? 1 : 0});
    cg.add_arc(x, sv[src.edges[e].a.vertex], {0});
    cg.add_arc(x, sv[src.edges[e].b.vertex], {1});
    cg.add_arc(x, te[c.half_edge_map[e][0].edge]);
  }
  for (int v = 0; v < src.num_vertices(); ++v)
    for (int l : src.vertices[v].legs) {
      int r = c.leg_ramification.at(l);
      auto kr = kept_role.find(l);
      if (r > 1) cg.add_arc(tl.at(c.leg_map.at(l)), sv[v], {1, r});
      else if (kr != kept_role.end()) cg.add_arc(tl.at(c.leg_map.at(l)), sv[v], {2, kr->second});
    }
  return canonize(cg).code;
}

inline std::string describe(const GraphCover &c, const AStructure &a) {
  std::string s;
  for (int tv = 0; tv < c.target.num_vertices(); ++tv) {
    if (tv) s += " | ";
    s += "Y" + std::to_string(tv) + "(g" + std::to_string(c.target.vertices[tv].genus) + ",n" +
         std::to_string(c.target.valence(tv)) + "):";
    for (int v = 0; v < c.source.num_vertices(); ++v)
      if (c.vertex_map[v] == tv)
        s += " X" + std::to_string(v) + "[g" + std::to_string(c.source.vertices[v].genus) + ",d" +
             std::to_string(c.degrees[v]) + ",A" + std::to_string(a.vertex_map[v]) + "]";
  }
  return s;
}

struct Candidate {
  StratumContribution contribution;
  GroupStabilization stab;
};

using LemmaTagger = std::function<Tag(const StratumContribution &, const GroupStabilization &)>;

inline Classification run_engine(EngineSpec spec, const LemmaTagger &lemma_tag, const StrataBounds &bounds,
                                 unsigned workers) {
  attach_kept_legs(spec);
  const int kept_count = kept_total(spec);
  const int nclass = static_cast<int>(spec.classes.size());
  StableGraph a_bare = spec.a;
  for (auto &v : a_bare.vertices) v.legs.clear();

  auto shapes = target_shapes(spec, spec.a.num_edges());
  Classification result;
  result.stats.target_shapes = static_cast<long>(shapes.size());
  std::mutex mu;
  std::map<std::vector<long>, StratumContribution> found;
  std::atomic<std::size_t> next{0};
  std::atomic<long> produced{0};
  std::exception_ptr failure;

  auto work = [&]() {
    StrataStats st;
    std::vector<std::pair<std::vector<long>, StratumContribution>> local;
    try {
      while (true) {
        std::size_t si = next++;
        if (si >= shapes.size()) break;
        const auto &t = shapes[si];
        const int ntv = t.num_vertices();

        // Target graph with leg labels: classes in order, then vertices.
        std::vector<Vertex> tverts(static_cast<std::size_t>(ntv));
        for (int v = 0; v < ntv; ++v) tverts[v].genus = t.genus[v];
        std::vector<int> leg_class{-1};
        std::vector<std::vector<std::vector<int>>> fiber_labels(
            static_cast<std::size_t>(nclass), std::vector<std::vector<int>>(static_cast<std::size_t>(ntv)));
        int tlabel = 1;
        for (int c = 0; c < nclass; ++c)
          for (int v = 0; v < ntv; ++v)
            for (int i = 0; i < t.legs[v][c]; ++i) {
              tverts[v].legs.push_back(tlabel);
              fiber_labels[c][v].push_back(tlabel);
              leg_class.push_back(c);
              ++tlabel;
            }
        std::vector<std::pair<int, int>> tedges;
        for (int e = 0; e < t.num_edges(); ++e) tedges.push_back(t.edge_ends(e));
        StableGraph target = make_graph(tverts, tedges);

        // Fibers per target vertex.
        std::vector<std::vector<std::vector<CompType>>> configs(static_cast<std::size_t>(ntv));
        bool empty = false;
        for (int v = 0; v < ntv && !empty; ++v) {
          int nb = 0;
          for (int c = 0; c < nclass; ++c)
            if (spec.classes[c].branch) nb += t.legs[v][c];
          configs[v] = fiber_configs(component_types(spec, t, v, bounds.hurwitz), spec.d, nb);
          empty = configs[v].empty();
        }
        if (empty) continue;
        std::vector<std::size_t> ci(static_cast<std::size_t>(ntv), 0);
        while (true) {
          ++st.fiber_choices;
          std::vector<CompType> comps;
          std::vector<int> comp_vertex;
          for (int v = 0; v < ntv; ++v)
            for (const auto &ct : configs[v][ci[v]]) comps.push_back(ct), comp_vertex.push_back(v);
          const int nc = static_cast<int>(comps.size());

          for (const auto &edges : gluings(t, comp_vertex, comps)) {
            ++st.gluings;
            std::vector<Vertex> bare(static_cast<std::size_t>(nc));
            for (int x = 0; x < nc; ++x) bare[x].genus = comps[x].genus;
            std::vector<std::pair<int, int>> ends;
            for (const auto &e : edges) ends.emplace_back(e.u, e.v);
            StableGraph skeleton = make_graph(bare, ends);
            if (count_components(skeleton) != 1 || total_genus(skeleton) != spec.g) {
              ++st.wrong_source;
              continue;
            }
            // Generic A-structures on the bare source.
            std::vector<AStructure> astrs;
            for (auto &s : find_a_structures(skeleton, a_bare)) {
              std::set<int> hit;
              for (int e : s.edge_selection) hit.insert(edges[e].target_edge);
              if (static_cast<int>(hit.size()) == t.num_edges()) astrs.push_back(std::move(s));
            }
            if (astrs.empty()) {
              ++st.no_a_structure;
              continue;
            }
            // Separating check needs only the skeleton and the target.
            bool sep_ok = true;
            for (int e = 0; e < skeleton.num_edges() && sep_ok; ++e)
              if (is_separating(skeleton, e) && !is_separating(target, edges[e].target_edge)) sep_ok = false;
            if (!sep_ok) {
              ++st.separating_rejected;
              continue;
            }

            for (const auto &astr : astrs) {
              // Placement options per (class, target vertex).
              struct Slot {
                int c, v;
                std::vector<std::vector<int>> options;  // comp per role slot
              };
              std::vector<Slot> slots;
              bool impossible = false;
              for (int c = 0; c < nclass && !impossible; ++c) {
                const auto &roles = spec.classes[c].roles;
                if (roles.empty()) continue;
                for (int v = 0; v < ntv && !impossible; ++v) {
                  if (t.legs[v][c] == 0) continue;
                  std::set<std::vector<int>> opts;
                  std::vector<int> cur;
                  std::vector<int> used(static_cast<std::size_t>(nc), 0);
                  std::function<void(std::size_t)> rec = [&](std::size_t j) {
                    if (j == roles.size()) {
                      // Slots sharing a role are interchangeable.
                      auto canon = cur;
                      for (std::size_t p = 0; p < roles.size(); ++p)
                        for (std::size_t q = p + 1; q < roles.size(); ++q)
                          if (roles[p] == roles[q] && canon[q] < canon[p]) std::swap(canon[p], canon[q]);
                      opts.insert(canon);
                      return;
                    }
                    for (int x = 0; x < nc; ++x) {
                      if (comp_vertex[x] != v || astr.vertex_map[x] != roles[j] || used[x] >= comps[x].deg) continue;
                      ++used[x];
                      cur.push_back(x);
                      rec(j + 1);
                      cur.pop_back();
                      --used[x];
                    }
                  };
                  rec(0);
                  if (opts.empty()) impossible = true;
                  slots.push_back({c, v, {opts.begin(), opts.end()}});
                }
              }
              if (impossible) continue;

              // Multisets of options per slot group, then the product.
              std::vector<std::vector<std::vector<int>>> choices;  // per slot: list of multisets (option indices)
              for (const auto &s : slots) {
                int k = t.legs[s.v][s.c];
                std::vector<std::vector<int>> ms;
                std::vector<int> cur;
                std::function<void(int)> rec = [&](int from) {
                  if (static_cast<int>(cur.size()) == k) {
                    ms.push_back(cur);
                    return;
                  }
                  for (int i = from; i < static_cast<int>(s.options.size()); ++i) {
                    cur.push_back(i);
                    rec(i);
                    cur.pop_back();
                  }
                };
                rec(0);
                choices.push_back(std::move(ms));
              }
              std::vector<std::size_t> pick(choices.size(), 0);
              while (true) {
                ++st.placements;
                if (++produced > bounds.max_candidates)
                  throw Refusal("strata: more than " + std::to_string(bounds.max_candidates) +
                                " candidate placements; raise HCYCLE_MAX_CANDIDATES");
                // Kept preimages per (class, target vertex, fiber index).
                std::map<std::tuple<int, int, int>, std::vector<int>> kept_on;
                bool capacity_ok = true;
                for (std::size_t s = 0; s < slots.size(); ++s) {
                  const auto &ms = choices[s][pick[s]];
                  for (std::size_t f = 0; f < ms.size(); ++f)
                    kept_on[{slots[s].c, slots[s].v, static_cast<int>(f)}] = slots[s].options[ms[f]];
                }
                // Materialize.
                GraphCover cover;
                cover.target = target;
                std::vector<Vertex> sverts(static_cast<std::size_t>(nc));
                for (int x = 0; x < nc; ++x) sverts[x].genus = comps[x].genus;
                std::map<int, int> kept_role;
                int kept_label = 1, fresh = kept_count + 1;
                std::vector<int> beta_left(static_cast<std::size_t>(nc));
                for (int x = 0; x < nc; ++x) beta_left[x] = comps[x].beta;
                // Kept labels follow the class order and, inside a class,
                // the vertex order, matching attach_kept_legs.
                for (int c = 0; c < nclass; ++c)
                  for (int v = 0; v < ntv; ++v)
                    for (int f = 0; f < t.legs[v][c]; ++f) {
                      int tl = fiber_labels[c][v][f];
                      std::vector<int> kept_here;
                      if (!spec.classes[c].roles.empty()) kept_here = kept_on.at({c, v, f});
                      std::vector<int> ramified(static_cast<std::size_t>(nc), 0);
                      if (spec.classes[c].branch)
                        for (int x = 0; x < nc; ++x)
                          if (comp_vertex[x] == v && beta_left[x] > 0) {
                            --beta_left[x];
                            ramified[x] = 1;
                            break;
                          }
                      std::vector<int> kept_count_on(static_cast<std::size_t>(nc), 0);
                      for (std::size_t j = 0; j < kept_here.size(); ++j) {
                        int x = kept_here[j];
                        ++kept_count_on[x];
                        sverts[x].legs.push_back(kept_label);
                        cover.leg_map[kept_label] = tl;
                        cover.leg_ramification[kept_label] = 1;
                        kept_role[kept_label] = spec.classes[c].roles[j];
                        ++kept_label;
                      }
                      for (int x = 0; x < nc; ++x) {
                        if (comp_vertex[x] != v) continue;
                        int unram = comps[x].deg - 2 * ramified[x] - kept_count_on[x];
                        if (unram < 0) capacity_ok = false;
                        if (ramified[x]) {
                          sverts[x].legs.push_back(fresh);
                          cover.leg_map[fresh] = tl;
                          cover.leg_ramification[fresh] = 2;
                          ++fresh;
                        }
                        for (int i = 0; i < unram; ++i) {
                          sverts[x].legs.push_back(fresh);
                          cover.leg_map[fresh] = tl;
                          cover.leg_ramification[fresh] = 1;
                          ++fresh;
                        }
                      }
                    }
                if (capacity_ok) {
                  cover.source = make_graph(sverts, ends);
                  cover.vertex_map = comp_vertex;
                  for (const auto &ct : comps) cover.degrees.push_back(ct.deg);
                  for (const auto &e : edges) {
                    cover.half_edge_map.push_back({EdgeSide{e.target_edge, 0}, EdgeSide{e.target_edge, 1}});
                    cover.edge_ramification.push_back({e.ram, e.ram});
                  }
                  if (auto v = validate_cover(cover); !v)
                    throw std::logic_error("strata: generated an invalid cover: " + v.violation);
                  auto rz = realizable(cover, bounds.hurwitz);
                  if (!rz.realizable) throw std::logic_error("strata: generated an unrealizable cover: " + rz.reason);

                  StratumContribution sc;
                  sc.a_structure = astr;
                  std::set<int> kept_set;
                  for (const auto &[l, r] : kept_role) kept_set.insert(l);
                  auto stab = stabilize_groups(cover.source, astr.edge_selection, kept_set);
                  sc.factors = spec.factors;
                  for (auto &f : sc.factors) {
                    std::set<int> fa(f.a_vertices.begin(), f.a_vertices.end());
                    f.image = 0;
                    for (int v = 0; v < ntv; ++v) {
                      long above = 0;
                      for (int x = 0; x < nc; ++x)
                        if (comp_vertex[x] == v && stab.dim[x] >= 0 && fa.count(astr.vertex_map[x])) above += stab.dim[x];
                      f.image += std::min(target_vertex_dim(t, v), above);
                    }
                  }
                  std::size_t bind = 0;
                  for (std::size_t i = 1; i < sc.factors.size(); ++i)
                    if (sc.factors[i].image - sc.factors[i].required <
                        sc.factors[bind].image - sc.factors[bind].required)
                      bind = i;
                  sc.image_dim = sc.factors[bind].image;
                  sc.required_dim = sc.factors[bind].required;
                  sc.multiplicity = intersection_multiplicity(cover, astr);
                  sc.excess_dimension = stratum_dimension(cover) - spec.expected_dim;
                  sc.psi_excess_degree = static_cast<int>(sc.excess_dimension);
                  sc.key = candidate_key(cover, astr, leg_class, kept_role);
                  sc.shape = describe(cover, astr);
                  sc.cover = std::move(cover);
                  bool all_rational = std::all_of(t.genus.begin(), t.genus.end(), [](int x) { return x == 0; });
                  if (sc.image_dim < sc.required_dim) sc.tag = Tag::ZeroByDimension;
                  else if (all_rational) sc.tag = Tag::RationalTargetTKD;
                  else sc.tag = lemma_tag(sc, stab);
                  local.emplace_back(sc.key, std::move(sc));
                }
                std::size_t i = 0;
                while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
                if (i == pick.size()) break;
              }
            }
          }
          std::size_t i = 0;
          while (i < ci.size() && ++ci[i] == configs[i].size()) ci[i++] = 0;
          if (i == ci.size()) break;
        }
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      next = shapes.size();
    }
    std::lock_guard lock(mu);
    auto &s = result.stats;
    s.fiber_choices += st.fiber_choices;
    s.gluings += st.gluings;
    s.wrong_source += st.wrong_source;
    s.no_a_structure += st.no_a_structure;
    s.separating_rejected += st.separating_rejected;
    s.placements += st.placements;
    for (auto &[k, sc] : local) {
      if (!found.emplace(k, std::move(sc)).second) ++s.duplicates;
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto &[k, sc] : found) result.contributions.push_back(std::move(sc));
  return result;
}

inline void require(bool ok, const std::string &what) {
  if (!ok) throw Refusal(what);
}

} // namespace detail

/// Sum over d1 + d1' = d of tau(d1) tau(d1').
inline Integer pairing_coefficient(int d) {
  if (d < 2) throw std::invalid_argument("pairing_coefficient: d must be at least 2");
  auto t = tau_table(static_cast<std::size_t>(d));
  Integer s = 0;
  for (int d1 = 1; d1 < d; ++d1) s += (*t)(d1) * (*t)(d - d1);
  return s;
}

/// Degrees of the two elliptic components over a common genus-1 target vertex,
/// when the contribution has that form.
inline std::optional<std::pair<int, int>> isogeny_pair(const StratumContribution &sc) {
  const auto &c = sc.cover;
  int x[2] = {-1, -1};
  for (int v = 0; v < c.source.num_vertices(); ++v) {
    int grp = sc.a_structure.vertex_map[v];
    if (grp > 1 || c.source.vertices[v].genus != 1) continue;
    if (x[grp] != -1) return std::nullopt;
    x[grp] = v;
  }
  if (x[0] < 0 || x[1] < 0) return std::nullopt;
  int t0 = c.vertex_map[x[0]], t1 = c.vertex_map[x[1]];
  if (t0 != t1 || c.target.vertices[t0].genus != 1) return std::nullopt;
  return std::make_pair(c.degrees[x[0]], c.degrees[x[1]]);
}

/// Pullback to M_{1,11} x M_{1,11} glued along g-1 pairs of points.
inline Classification classify_equal12(int g, int m2, int d, const StrataBounds &bounds = {}, unsigned workers = 1) {
  if (g < 2) throw std::invalid_argument("classify_equal12: g must be at least 2");
  if (m2 < 0 || g + m2 != 12) throw std::invalid_argument("classify_equal12: need g + m2 = 12");
  if (d < 2) throw std::invalid_argument("classify_equal12: d must be at least 2");
  detail::require(g <= bounds.max_genus, "classify_equal12: g = " + std::to_string(g) + " exceeds the genus bound " +
                                             std::to_string(bounds.max_genus));
  detail::require(d <= bounds.max_degree, "classify_equal12: d = " + std::to_string(d) +
                                              " exceeds the degree bound " + std::to_string(bounds.max_degree));
  detail::EngineSpec spec;
  spec.g = g, spec.h = 1, spec.d = d;
  spec.classes = {{"branch", 2 * g - 2, true, {}}, {"pair", m2, false, {0, 1}}};
  spec.a = make_graph({{1, {}}, {1, {}}}, std::vector<std::pair<int, int>>(static_cast<std::size_t>(g - 1), {0, 1}));
  spec.factors = {{"M(1,11) x M(1,11)", {0, 1}, 0, m2 + g - 1}};
  spec.expected_dim = (2L * g - 2 + m2) - (g - 1);
  spec.trees_only = g == 2;
  auto tagger = [](const StratumContribution &sc, const detail::GroupStabilization &st) {
    if (st.internal_edges > 0) return Tag::BoundarySupportedTKD;
    // The surviving elliptic components of the two groups.
    int t[2] = {-1, -1};
    for (int v = 0; v < sc.cover.source.num_vertices(); ++v)
      if (st.dim[v] >= 0) t[sc.a_structure.vertex_map[v]] = sc.cover.vertex_map[v];
    if (t[0] != t[1]) return Tag::DistinctTargetsTKD;
    return Tag::CandidateNontaut;
  };
  return detail::run_engine(spec, tagger, bounds, workers);
}

enum class DivisorShape { RationalTail, EllipticTail };

inline std::string to_string(DivisorShape s) {
  return s == DivisorShape::RationalTail ? "rational-tail" : "elliptic-tail";
}

/// Rational tail: the last of the m2 pairs sits on a rational tail.
/// Elliptic tail (h = 1): pullback to M_{g-1,2m2+1} x M_{1,1}.
inline Classification classify_divisor_pullback(const HurwitzParams &p, DivisorShape shape,
                                                const StrataBounds &bounds = {}, unsigned workers = 1) {
  check_params(p);
  detail::require(p.n == 0, "classify_divisor_pullback: marked ramification points are not supported (n = " +
                                std::to_string(p.n) + "); forget them first");
  detail::require(p.g <= bounds.max_genus, "classify_divisor_pullback: g = " + std::to_string(p.g) +
                                               " exceeds the genus bound " + std::to_string(bounds.max_genus));
  detail::require(p.d <= bounds.max_degree, "classify_divisor_pullback: d = " + std::to_string(p.d) +
                                                " exceeds the degree bound " + std::to_string(bounds.max_degree));
  detail::EngineSpec spec;
  spec.g = p.g, spec.h = p.h, spec.d = p.d;
  spec.expected_dim = p.B() - 1;
  spec.trees_only = true;
  std::vector<int> tuple_roles(static_cast<std::size_t>(p.d), 0);
  if (shape == DivisorShape::RationalTail) {
    detail::require(p.m2 >= 1, "classify_divisor_pullback: the rational-tail divisor needs m2 >= 1");
    spec.classes = {{"branch", static_cast<int>(p.b()), true, {}},
                    {"pair", p.m2 - 1, false, {0, 0}},
                    {"tail-pair", 1, false, {1, 1}},
                    {"tuple", p.md, false, tuple_roles}};
    spec.a = make_graph({{p.g, {}}, {0, {}}}, {{0, 1}});
    spec.factors = {{"genus-g factor", {0}, 0, p.B() - 1}};
    auto tagger = [](const StratumContribution &, const detail::GroupStabilization &) { return Tag::CandidateNontaut; };
    return detail::run_engine(spec, tagger, bounds, workers);
  }
  detail::require(p.h == 1, "classify_divisor_pullback: the elliptic-tail divisor needs h = 1");
  detail::require(p.md == 0, "classify_divisor_pullback: the elliptic-tail divisor needs md = 0");
  detail::require(p.g >= 2, "classify_divisor_pullback: the elliptic-tail divisor needs g >= 2");
  spec.classes = {{"branch", static_cast<int>(p.b()), true, {}}, {"pair", p.m2, false, {0, 0}}};
  spec.a = make_graph({{p.g - 1, {}}, {1, {}}}, {{0, 1}});
  spec.factors = {{"spine factor", {0}, 0, p.B() - 2}, {"M(1,1) factor", {1}, 0, 1}};
  auto tagger = [](const StratumContribution &sc, const detail::GroupStabilization &) {
    const auto &c = sc.cover;
    for (int v = 0; v < c.source.num_vertices(); ++v)
      if (sc.a_structure.vertex_map[v] == 1 && c.target.vertices[c.vertex_map[v]].genus >= 1)
        return Tag::FixedTargetTKD;
    return Tag::CandidateNontaut;
  };
  return detail::run_engine(spec, tagger, bounds, workers);
}

/// Pullback to the comb stratum: a genus g-d spine with d elliptic tails,
/// projected to degree (B-s-1, s-d+1).
inline Classification classify_comb_pullback(const HurwitzParams &p, int s, const StrataBounds &bounds = {},
                                             unsigned workers = 1) {
  check_params(p);
  auto need = [](bool ok, const std::string &lhs, long l, const std::string &op, long r) {
    detail::require(ok, "classify_comb_pullback: " + lhs + " = " + std::to_string(l) + " " + op + " " +
                            std::to_string(r) + " fails");
  };
  need(p.h >= 2, "h", p.h, ">=", 2);
  need(s >= 2, "s", s, ">=", 2);
  need(s >= p.d - 1, "s", s, ">= d-1 =", p.d - 1);
  need(p.md >= s - 1, "md", p.md, ">= s-1 =", s - 1);
  need(p.g >= p.d, "g", p.g, ">= d =", p.d);
  detail::require(p.n == 0, "classify_comb_pullback: marked ramification points are not supported");
  detail::require(p.g <= bounds.max_genus, "classify_comb_pullback: g = " + std::to_string(p.g) +
                                               " exceeds the genus bound " + std::to_string(bounds.max_genus));
  detail::require(p.d <= bounds.max_degree, "classify_comb_pullback: d = " + std::to_string(p.d) +
                                                " exceeds the degree bound " + std::to_string(bounds.max_degree));
  detail::EngineSpec spec;
  spec.g = p.g, spec.h = p.h, spec.d = p.d;
  std::vector<int> spine_roles(static_cast<std::size_t>(p.d), 0), tail_roles;
  for (int k = 1; k <= p.d; ++k) tail_roles.push_back(k);
  spec.classes = {{"branch", static_cast<int>(p.b()), true, {}},
                  {"pair", p.m2, false, {0, 0}},
                  {"spine-tuple", p.md - s + 1, false, spine_roles},
                  {"tail-tuple", s - 1, false, tail_roles}};
  std::vector<Vertex> av{{p.g - p.d, {}}};
  std::vector<std::pair<int, int>> ae;
  std::vector<int> tails;
  for (int k = 1; k <= p.d; ++k) av.push_back({1, {}}), ae.emplace_back(0, k), tails.push_back(k);
  spec.a = make_graph(av, ae);
  spec.factors = {{"spine factor", {0}, 0, p.B() - s - 1}, {"elliptic tails factor", tails, 0, s - p.d + 1}};
  spec.expected_dim = p.B() - p.d;
  spec.trees_only = true;
  {
    auto probe = spec;
    detail::attach_kept_legs(probe);
    auto v = validate(probe.a);
    if (!v) throw std::invalid_argument("classify_comb_pullback: the comb graph is not stable: " + v.violation);
  }
  auto tagger = [](const StratumContribution &, const detail::GroupStabilization &) { return Tag::CandidateNontaut; };
  auto out = detail::run_engine(spec, tagger, bounds, workers);
  for (auto &sc : out.contributions)
    if (sc.tag == Tag::CandidateNontaut) sc.psi_excess_degree = s - p.d + 1;
  return out;
}

} // namespace hcycle
