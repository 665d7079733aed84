#pragma once

// Canonical labeling of small vertex- and edge-colored multigraphs by color
// refinement plus individualization. Meant for graphs with a few dozen
// vertices at most.

#include <algorithm>
#include <map>
#include <tuple>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hcycle {

using ColorKey = std::vector<long>;

struct ColoredGraph {
  struct Arc {
    int u = 0, v = 0;  // unordered; u == v is a loop
    ColorKey color;
  };
  std::vector<ColorKey> vertex_color;
  std::vector<Arc> arcs;

  int size() const { return static_cast<int>(vertex_color.size()); }
  int add_vertex(ColorKey c) {
    vertex_color.push_back(std::move(c));
    return size() - 1;
  }
  void add_arc(int u, int v, ColorKey c = {}) { arcs.push_back({u, v, std::move(c)}); }
};

struct Canonical {
  std::vector<long> code;
  std::vector<int> order;  // order[position] = original vertex
};

namespace detail {

class Canonizer {
public:
  explicit Canonizer(const ColoredGraph &g) : g_(g), n_(g.size()) {
    for (const auto &a : g.arcs)
      if (a.u < 0 || a.v < 0 || a.u >= n_ || a.v >= n_) throw std::invalid_argument("canonize: arc endpoint out of range");
    std::map<ColorKey, int> ecol;
    for (const auto &a : g.arcs) ecol.emplace(a.color, 0);
    int r = 0;
    for (auto &[k, v] : ecol) v = r++;
    adj_.assign(n_, {});
    for (const auto &a : g.arcs) {
      int c = ecol.at(a.color);
      adj_[a.u].push_back({a.v, c});
      if (a.u != a.v) adj_[a.v].push_back({a.u, c});
    }
    arc_ids_.resize(g.arcs.size());
    for (std::size_t i = 0; i < g.arcs.size(); ++i) arc_ids_[i] = ecol.at(g.arcs[i].color);
  }

  Canonical run(bool prune_twins, long *leaf_hits = nullptr) {
    best_.code.clear();
    best_.order.clear();
    have_best_ = false;
    prune_ = prune_twins;
    hits_ = 0;
    std::vector<int> colors(n_);
    {
      std::vector<ColorKey> keys(g_.vertex_color);
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      for (int v = 0; v < n_; ++v)
        colors[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), g_.vertex_color[v]) - keys.begin());
    }
    refine(colors);
    search(colors);
    if (leaf_hits) *leaf_hits = hits_;
    return best_;
  }

private:
  struct Nb {
    int to, color;
  };

  static int count_distinct(const std::vector<int> &c) {
    std::vector<int> s(c);
    std::sort(s.begin(), s.end());
    return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
  }

  void refine(std::vector<int> &colors) const {
    int cells = count_distinct(colors);
    while (true) {
      std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sig(n_);
      for (int v = 0; v < n_; ++v) {
        sig[v].first = colors[v];
        for (const auto &nb : adj_[v]) sig[v].second.emplace_back(colors[nb.to], nb.color);
        std::sort(sig[v].second.begin(), sig[v].second.end());
      }
      auto sorted = sig;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (int v = 0; v < n_; ++v)
        colors[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
      int now = static_cast<int>(sorted.size());
      if (now == cells) break;
      cells = now;
    }
  }

  // True when swapping u and v is an automorphism of the input graph.
  bool transposition_is_automorphism(int u, int v) const {
    if (g_.vertex_color[u] != g_.vertex_color[v]) return false;
    auto sw = [&](int x) { return x == u ? v : x == v ? u : x; };
    std::vector<std::tuple<int, int, int>> before, after;
    for (std::size_t i = 0; i < g_.arcs.size(); ++i) {
      const auto &a = g_.arcs[i];
      if (a.u != u && a.u != v && a.v != u && a.v != v) continue;
      before.emplace_back(std::min(a.u, a.v), std::max(a.u, a.v), arc_ids_[i]);
      int x = sw(a.u), y = sw(a.v);
      after.emplace_back(std::min(x, y), std::max(x, y), arc_ids_[i]);
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    return before == after;
  }

  std::vector<long> code_for(const std::vector<int> &order) const {
    std::vector<int> pos(n_);
    for (int i = 0; i < n_; ++i) pos[order[i]] = i;
    std::vector<long> code;
    code.push_back(n_);
    for (int i = 0; i < n_; ++i) {
      const auto &k = g_.vertex_color[order[i]];
      code.push_back(static_cast<long>(k.size()));
      code.insert(code.end(), k.begin(), k.end());
    }
    std::vector<std::tuple<int, int, const ColorKey *>> arcs;
    for (const auto &a : g_.arcs) {
      int x = pos[a.u], y = pos[a.v];
      arcs.emplace_back(std::min(x, y), std::max(x, y), &a.color);
    }
    std::sort(arcs.begin(), arcs.end(), [](const auto &l, const auto &r) {
      if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) < std::get<0>(r);
      if (std::get<1>(l) != std::get<1>(r)) return std::get<1>(l) < std::get<1>(r);
      return *std::get<2>(l) < *std::get<2>(r);
    });
    code.push_back(static_cast<long>(arcs.size()));
    for (const auto &[x, y, c] : arcs) {
      code.push_back(x);
      code.push_back(y);
      code.push_back(static_cast<long>(c->size()));
      code.insert(code.end(), c->begin(), c->end());
    }
    return code;
  }

  void search(const std::vector<int> &colors) {
    // First non-singleton cell by color index.
    std::vector<int> cell_size(n_, 0);
    for (int c : colors) ++cell_size[c];
    int target = -1;
    for (int c = 0; c < n_; ++c)
      if (cell_size[c] > 1) {
        target = c;
        break;
      }
    if (target == -1) {
      std::vector<int> order(n_);
      for (int v = 0; v < n_; ++v) order[colors[v]] = v;
      auto code = code_for(order);
      if (!have_best_ || code < best_.code) {
        best_ = {std::move(code), std::move(order)};
        have_best_ = true;
        hits_ = 1;
      } else if (code == best_.code) {
        ++hits_;
      }
      return;
    }
    std::vector<int> tried;
    for (int v = 0; v < n_; ++v) {
      if (colors[v] != target) continue;
      if (prune_ && std::any_of(tried.begin(), tried.end(), [&](int w) { return transposition_is_automorphism(w, v); }))
        continue;
      tried.push_back(v);
      std::vector<int> next(n_);
      for (int w = 0; w < n_; ++w) next[w] = 2 * colors[w] + ((colors[w] == target && w != v) ? 1 : 0);
      // Re-rank to 0..cells-1 before refining.
      std::vector<int> s(next);
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      for (int &c : next) c = static_cast<int>(std::lower_bound(s.begin(), s.end(), c) - s.begin());
      refine(next);
      search(next);
    }
  }

  const ColoredGraph &g_;
  int n_;
  std::vector<std::vector<Nb>> adj_;
  std::vector<int> arc_ids_;
  Canonical best_;
  bool have_best_ = false;
  bool prune_ = true;
  long hits_ = 0;
};

} // namespace detail

/// Minimal code over all orderings reachable by the search; equal codes iff
/// the graphs are isomorphic as colored multigraphs.
inline Canonical canonize(const ColoredGraph &g) { return detail::Canonizer(g).run(true); }

/// Number of color-preserving vertex permutations that preserve the arc multiset.
inline long vertex_automorphisms(const ColoredGraph &g) {
  long hits = 0;
  detail::Canonizer(g).run(false, &hits);
  return hits;
}

} // namespace hcycle
