#pragma once

// JSON file formats for graphs, covers, parameters, certificates and
// classification results. Big integers travel as decimal strings.
// Malformed input raises std::invalid_argument.

#include "hcycle/certify.hpp"
#include "hcycle/covers.hpp"
#include "hcycle/strata.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace hcycle::io {

using json = nlohmann::ordered_json;

namespace detail {

template <class F>
auto guarded(const char *what, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception &e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

inline Integer integer_from(const json &j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (!j.is_string()) throw std::invalid_argument("expected an integer or a decimal string");
  Integer x;
  const auto s = j.get<std::string>();
  if (s.empty() || x.set_str(s, 10) != 0) throw std::invalid_argument("not a decimal integer: \"" + s + "\"");
  return x;
}

inline void require_keys(const json &j, std::initializer_list<const char *> allowed, const char *what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
  for (const auto &[k, v] : j.items()) {
    bool known = false;
    for (const char *a : allowed) known |= k == a;
    if (!known) throw std::invalid_argument(std::string(what) + ": unknown key \"" + k + "\"");
  }
}

} // namespace detail

// Parameters.

inline json to_json(const HurwitzParams &p) {
  return {{"g", p.g}, {"h", p.h}, {"d", p.d}, {"m2", p.m2}, {"md", p.md}, {"n", p.n}};
}

inline HurwitzParams params_from_json(const json &j) {
  return detail::guarded("params", [&] {
    detail::require_keys(j, {"g", "h", "d", "m2", "md", "n"}, "params");
    HurwitzParams p;
    p.g = j.at("g").get<int>();
    p.h = j.at("h").get<int>();
    p.d = j.at("d").get<int>();
    p.m2 = j.at("m2").get<int>();
    p.md = j.at("md").get<int>();
    p.n = j.at("n").get<int>();
    return p;
  });
}

// Graphs. An edge is [[v, slot], [w, slot]]; a bare [v, w] is also accepted
// on input, and then slots are assigned in order of appearance.

inline json to_json(const StableGraph &g) {
  json vs = json::array(), es = json::array();
  for (const auto &v : g.vertices) vs.push_back({{"genus", v.genus}, {"legs", v.legs}});
  for (const auto &e : g.edges) es.push_back({{e.a.vertex, e.a.slot}, {e.b.vertex, e.b.slot}});
  return {{"vertices", vs}, {"edges", es}};
}

inline StableGraph graph_from_json(const json &j) {
  return detail::guarded("graph", [&] {
    detail::require_keys(j, {"vertices", "edges"}, "graph");
    std::vector<Vertex> verts;
    for (const auto &v : j.at("vertices")) {
      detail::require_keys(v, {"genus", "legs"}, "graph vertex");
      verts.push_back({v.at("genus").get<int>(), v.value("legs", std::vector<int>{})});
    }
    const auto &es = j.at("edges");
    if (!es.is_array()) throw std::invalid_argument("graph: edges must be an array");
    for (const auto &e : es)
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("graph: an edge has two ends");
    bool bare = std::all_of(es.begin(), es.end(), [](const json &e) { return e[0].is_number_integer(); });
    if (bare) {
      std::vector<std::pair<int, int>> ends;
      for (const auto &e : es) ends.emplace_back(e[0].get<int>(), e[1].get<int>());
      return make_graph(std::move(verts), ends);
    }
    StableGraph g;
    g.vertices = std::move(verts);
    auto side = [](const json &x) {
      if (!x.is_array() || x.size() != 2) throw std::invalid_argument("graph: half-edge must be [vertex, slot]");
      return HalfEdgeRef{x[0].get<int>(), x[1].get<int>()};
    };
    for (const auto &e : es) g.edges.push_back({side(e[0]), side(e[1])});
    return g;
  });
}

// Covers.

inline json to_json(const GraphCover &c) {
  json hem = json::array(), legs = json::array(), eram = json::array(), lram = json::array();
  for (const auto &sides : c.half_edge_map) hem.push_back({{sides[0].edge, sides[0].side}, {sides[1].edge, sides[1].side}});
  for (const auto &[l, t] : c.leg_map) legs.push_back({l, t});
  for (const auto &r : c.edge_ramification) eram.push_back(r);
  for (const auto &[l, r] : c.leg_ramification) lram.push_back({l, r});
  return {{"source", to_json(c.source)},
          {"target", to_json(c.target)},
          {"vertex_map", c.vertex_map},
          {"half_edge_map", hem},
          {"leg_map", legs},
          {"degrees", c.degrees},
          {"ramification", {{"edges", eram}, {"legs", lram}}}};
}

inline GraphCover cover_from_json(const json &j) {
  return detail::guarded("cover", [&] {
    detail::require_keys(j, {"source", "target", "vertex_map", "half_edge_map", "leg_map", "degrees", "ramification"},
                         "cover");
    GraphCover c;
    c.source = graph_from_json(j.at("source"));
    c.target = graph_from_json(j.at("target"));
    c.vertex_map = j.at("vertex_map").get<std::vector<int>>();
    c.degrees = j.at("degrees").get<std::vector<int>>();
    auto pair_of = [](const json &x, const char *what) {
      if (!x.is_array() || x.size() != 2) throw std::invalid_argument(std::string("cover: ") + what + " must be a pair");
      return std::pair<int, int>{x[0].get<int>(), x[1].get<int>()};
    };
    for (const auto &e : j.at("half_edge_map")) {
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("cover: an edge has two images");
      auto [e0, s0] = pair_of(e[0], "edge image");
      auto [e1, s1] = pair_of(e[1], "edge image");
      c.half_edge_map.push_back({EdgeSide{e0, s0}, EdgeSide{e1, s1}});
    }
    for (const auto &x : j.at("leg_map")) {
      auto [l, t] = pair_of(x, "leg_map entry");
      if (!c.leg_map.emplace(l, t).second)
        throw std::invalid_argument("cover: leg " + std::to_string(l) + " listed twice");
    }
    const auto &ram = j.at("ramification");
    detail::require_keys(ram, {"edges", "legs"}, "cover ramification");
    for (const auto &r : ram.at("edges")) {
      auto [a, b] = pair_of(r, "edge ramification");
      c.edge_ramification.push_back({a, b});
    }
    for (const auto &x : ram.at("legs")) {
      auto [l, r] = pair_of(x, "leg ramification");
      if (!c.leg_ramification.emplace(l, r).second)
        throw std::invalid_argument("cover: ramification of leg " + std::to_string(l) + " listed twice");
    }
    return c;
  });
}

inline json to_json(const AStructure &a) { return {{"edge_selection", a.edge_selection}, {"vertex_map", a.vertex_map}}; }

inline AStructure a_structure_from_json(const json &j) {
  return detail::guarded("a-structure", [&] {
    detail::require_keys(j, {"edge_selection", "vertex_map"}, "a-structure");
    AStructure a;
    a.edge_selection = j.at("edge_selection").get<std::vector<int>>();
    a.vertex_map = j.at("vertex_map").get<std::vector<int>>();
    return a;
  });
}

// Certificates.

inline json to_json(const Certificate &c) {
  json steps = json::array();
  for (const auto &s : c.steps) {
    json st = {{"kind", to_string(s.kind)}, {"input", to_json(s.input)}, {"output", to_json(s.output)}};
    if (s.kind == StepKind::CombStep || s.s != 0) st["s"] = s.s;
    steps.push_back(st);
  }
  return {{"root", to_json(c.root)},
          {"steps", steps},
          {"base", {{"g", c.base_g}, {"m2", c.base_m2}}},
          {"witness", {{"d", c.witness_d}, {"a_d", c.witness_a.get_str()}}}};
}

inline Certificate certificate_from_json(const json &j) {
  return detail::guarded("certificate", [&] {
    detail::require_keys(j, {"root", "steps", "base", "witness"}, "certificate");
    Certificate c;
    c.root = params_from_json(j.at("root"));
    for (const auto &s : j.at("steps")) {
      detail::require_keys(s, {"kind", "input", "output", "s"}, "certificate step");
      auto kind = step_kind_from_string(s.at("kind").get<std::string>());
      if (!kind) throw std::invalid_argument("certificate: unknown step kind " + s.at("kind").dump());
      c.steps.push_back({*kind, params_from_json(s.at("input")), params_from_json(s.at("output")), s.value("s", 0)});
    }
    const auto &base = j.at("base");
    detail::require_keys(base, {"g", "m2"}, "certificate base");
    c.base_g = base.at("g").get<int>();
    c.base_m2 = base.at("m2").get<int>();
    const auto &w = j.at("witness");
    detail::require_keys(w, {"d", "a_d"}, "certificate witness");
    c.witness_d = w.at("d").get<int>();
    c.witness_a = detail::integer_from(w.at("a_d"));
    return c;
  });
}

// Classification output (write-only).

inline json to_json(const StratumContribution &sc) {
  json factors = json::array();
  for (const auto &f : sc.factors)
    factors.push_back(
        {{"name", f.name}, {"a_vertices", f.a_vertices}, {"image", f.image}, {"required", f.required}});
  return {{"tag", to_string(sc.tag)},
          {"shape", sc.shape},
          {"image_dim", sc.image_dim},
          {"required_dim", sc.required_dim},
          {"factors", factors},
          {"multiplicity", sc.multiplicity.get_str()},
          {"scalar_unknown", sc.scalar_unknown},
          {"excess_dimension", sc.excess_dimension},
          {"psi_excess_degree", sc.psi_excess_degree},
          {"a_structure", to_json(sc.a_structure)},
          {"cover", to_json(sc.cover)}};
}

inline json to_json(const Classification &r, bool include_zero = true) {
  json list = json::array();
  std::map<std::string, long> counts;
  for (const auto &sc : r.contributions) {
    ++counts[to_string(sc.tag)];
    if (include_zero || sc.tag != Tag::ZeroByDimension) list.push_back(to_json(sc));
  }
  json tags = json::object();
  for (const auto &[k, v] : counts) tags[k] = v;
  const auto &s = r.stats;
  json stats = {{"target_shapes", s.target_shapes},         {"fiber_choices", s.fiber_choices},
                {"gluings", s.gluings},                     {"wrong_source", s.wrong_source},
                {"no_a_structure", s.no_a_structure},       {"separating_rejected", s.separating_rejected},
                {"placements", s.placements},               {"duplicates", s.duplicates}};
  return {{"tag_counts", tags}, {"stats", stats}, {"contributions", list}};
}

// Files.

inline json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception &e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string &path, const json &j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << j.dump(2) << "\n";
}

} // namespace hcycle::io
