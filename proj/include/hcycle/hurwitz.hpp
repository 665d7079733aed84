#pragma once

// Hurwitz numbers by brute-force monodromy counting in S_d.

#include "hcycle/common.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcycle {

inline constexpr int kMaxPermDegree = 10;

/// Partition of the degree; stored sorted in decreasing order.
struct RamificationProfile {
  std::vector<int> parts;

  static RamificationProfile unramified(int d) { return {std::vector<int>(static_cast<std::size_t>(d), 1)}; }
  int degree() const { return std::accumulate(parts.begin(), parts.end(), 0); }
  // d - (number of preimages): the contribution to the branch divisor.
  int defect() const { return degree() - static_cast<int>(parts.size()); }
  bool trivial() const { return std::all_of(parts.begin(), parts.end(), [](int p) { return p == 1; }); }
};

struct MonodromyProblem {
  int degree = 1;
  int target_genus = 0;
  std::vector<RamificationProfile> profiles;
  bool connected = true;
};

struct HurwitzCount {
  Rational weighted = 0;   // tuples / d!
  Integer classes = 0;     // tuples up to simultaneous conjugation
  Integer tuples = 0;
  std::string diagnostic;  // non-empty when the answer was decided before searching
};

struct HurwitzBounds {
  int max_degree = static_cast<int>(env_bound("HCYCLE_MAX_DEGREE", 6));
  long long max_tuples = static_cast<long long>(env_bound("HCYCLE_MAX_TUPLES", 50'000'000));
};

/// Genus of a connected cover with this data, if Riemann-Hurwitz gives one.
inline std::optional<int> connected_source_genus(const MonodromyProblem &p) {
  int branch = 0;
  for (const auto &pr : p.profiles) branch += pr.defect();
  int twice = p.degree * (2 * p.target_genus - 2) + branch;  // 2g - 2
  if (twice % 2 != 0) return std::nullopt;
  return twice / 2 + 1;
}

namespace detail {

using Perm = std::array<std::uint8_t, kMaxPermDegree>;

inline Perm identity_perm(int d) {
  Perm p{};
  for (int i = 0; i < d; ++i) p[i] = static_cast<std::uint8_t>(i);
  return p;
}

// (a * b)(x) = a(b(x))
inline Perm compose(const Perm &a, const Perm &b, int d) {
  Perm r{};
  for (int i = 0; i < d; ++i) r[i] = a[b[i]];
  return r;
}

inline Perm inverse(const Perm &a, int d) {
  Perm r{};
  for (int i = 0; i < d; ++i) r[a[i]] = static_cast<std::uint8_t>(i);
  return r;
}

inline bool is_identity(const Perm &a, int d) {
  for (int i = 0; i < d; ++i)
    if (a[i] != i) return false;
  return true;
}

inline std::vector<int> cycle_type(const Perm &a, int d) {
  std::vector<int> parts;
  std::array<bool, kMaxPermDegree> seen{};
  for (int i = 0; i < d; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = a[j]) seen[j] = true, ++len;
    parts.push_back(len);
  }
  std::sort(parts.rbegin(), parts.rend());
  return parts;
}

inline std::vector<Perm> all_perms(int d) {
  std::vector<Perm> out;
  Perm p = identity_perm(d);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.begin() + d));
  return out;
}

inline bool generates_transitive(const std::vector<Perm> &gens, int d) {
  std::array<int, kMaxPermDegree> parent{};
  std::iota(parent.begin(), parent.begin() + d, 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = d;
  for (const auto &g : gens)
    for (int i = 0; i < d; ++i) {
      int a = find(i), b = find(g[i]);
      if (a != b) parent[a] = b, --comps;
    }
  return comps == 1;
}

// Number of c in S_d with c g c^{-1} = g for every g in gens.
inline long centralizer_size(const std::vector<Perm> &gens, const std::vector<Perm> &group, int d, bool transitive) {
  if (transitive) {
    // A centralizing element is fixed by the image of 0: c(g(x)) = g(c(x)).
    long count = 0;
    for (int target = 0; target < d; ++target) {
      std::array<int, kMaxPermDegree> c;
      c.fill(-1);
      c[0] = target;
      std::vector<int> stack{0};
      bool ok = true;
      while (!stack.empty() && ok) {
        int x = stack.back();
        stack.pop_back();
        for (const auto &g : gens) {
          int y = g[x], cy = g[c[x]];
          if (c[y] == -1) c[y] = cy, stack.push_back(y);
          else if (c[y] != cy) { ok = false; break; }
        }
      }
      if (!ok) continue;
      std::array<bool, kMaxPermDegree> used{};
      for (int i = 0; i < d && ok; ++i) {
        if (used[c[i]]) ok = false;
        used[c[i]] = true;
      }
      count += ok;
    }
    return count;
  }
  long count = 0;
  for (const auto &c : group) {
    bool ok = true;
    for (const auto &g : gens) {
      for (int i = 0; i < d && ok; ++i) ok = c[g[i]] == g[c[i]];
      if (!ok) break;
    }
    count += ok;
  }
  return count;
}

struct PartialCount {
  Integer tuples = 0;
  Integer stabilizer_sum = 0;
};

} // namespace detail

inline void validate_problem(const MonodromyProblem &p) {
  if (p.degree < 1) throw std::invalid_argument("hurwitz: degree must be >= 1");
  if (p.target_genus < 0) throw std::invalid_argument("hurwitz: target genus must be >= 0");
  for (const auto &pr : p.profiles) {
    if (pr.parts.empty() || pr.degree() != p.degree ||
        std::any_of(pr.parts.begin(), pr.parts.end(), [](int x) { return x < 1; }))
      throw std::invalid_argument("hurwitz: every profile must be a partition of the degree");
  }
}

/// Counts tuples (a_1, b_1, ..., a_h, b_h, s_1, ..., s_r) in S_d with
/// prod [a_i, b_i] * prod s_j = id and s_j of the given cycle types.
inline HurwitzCount count_tuples(MonodromyProblem p, const HurwitzBounds &bounds = {}, unsigned workers = 1) {
  validate_problem(p);
  for (auto &pr : p.profiles) std::sort(pr.parts.rbegin(), pr.parts.rend());
  const int d = p.degree;
  if (d > bounds.max_degree || d > kMaxPermDegree)
    throw Refusal("hurwitz: degree " + std::to_string(d) + " exceeds enumeration bound " +
                  std::to_string(std::min(bounds.max_degree, kMaxPermDegree)));

  HurwitzCount out;
  int branch = 0;
  for (const auto &pr : p.profiles) branch += pr.defect();
  if (branch % 2 != 0) {
    out.diagnostic = "Riemann-Hurwitz parity fails: total branching " + std::to_string(branch) + " is odd";
    return out;
  }
  if (p.connected) {
    int g = *connected_source_genus(p);
    if (g < 0) {
      out.diagnostic = "Riemann-Hurwitz gives negative source genus " + std::to_string(g);
      return out;
    }
  }

  const auto group = detail::all_perms(d);
  std::vector<std::vector<detail::Perm>> classes;
  for (std::size_t j = 0; j < p.profiles.size(); ++j) {
    std::vector<detail::Perm> members;
    for (const auto &g : group)
      if (detail::cycle_type(g, d) == p.profiles[j].parts) members.push_back(g);
    classes.push_back(std::move(members));
  }

  // Size of the search, with the last profile solved for rather than enumerated.
  long double estimate = 1;
  for (int i = 0; i < 2 * p.target_genus; ++i) estimate *= static_cast<long double>(group.size());
  for (std::size_t j = 0; j + 1 < classes.size(); ++j) estimate *= static_cast<long double>(classes[j].size());
  if (estimate > static_cast<long double>(bounds.max_tuples)) {
    std::ostringstream msg;
    msg << "hurwitz: search space of about " << static_cast<long long>(estimate) << " tuples exceeds budget "
        << bounds.max_tuples;
    throw Refusal(msg.str());
  }

  // Slots: 2h free permutations, then all profiles but the last; the last
  // element is forced by the product.
  std::vector<const std::vector<detail::Perm> *> slots;
  for (int i = 0; i < 2 * p.target_genus; ++i) slots.push_back(&group);
  for (std::size_t j = 0; j + 1 < classes.size(); ++j) slots.push_back(&classes[j]);
  const bool has_last = !p.profiles.empty();
  const std::vector<int> last_type = has_last ? p.profiles.back().parts : std::vector<int>{};

  auto run = [&](std::size_t first_begin, std::size_t stride) {
    detail::PartialCount acc;
    std::vector<detail::Perm> chosen(slots.size());
    std::vector<detail::Perm> gens;
    auto finish = [&](const detail::Perm &prod) {
      gens.assign(chosen.begin(), chosen.end());
      if (has_last) {
        detail::Perm last = detail::inverse(prod, d);
        if (detail::cycle_type(last, d) != last_type) return;
        gens.push_back(last);
      } else if (!detail::is_identity(prod, d)) {
        return;
      }
      bool transitive = detail::generates_transitive(gens, d);
      if (p.connected && !transitive) return;
      acc.tuples += 1;
      acc.stabilizer_sum += detail::centralizer_size(gens, group, d, transitive);
    };
    // prod accumulates [a_1,b_1]...[a_h,b_h] s_1 ... in order.
    auto rec = [&](auto &&self, std::size_t slot, const detail::Perm &prod) -> void {
      if (slot == slots.size()) return finish(prod);
      const auto &choices = *slots[slot];
      bool commutator_b = static_cast<int>(slot) < 2 * p.target_genus && slot % 2 == 1;
      std::size_t start = slot == 0 ? first_begin : 0, step = slot == 0 ? stride : 1;
      for (std::size_t i = start; i < choices.size(); i += step) {
        chosen[slot] = choices[i];
        if (static_cast<int>(slot) < 2 * p.target_genus && slot % 2 == 0) {
          self(self, slot + 1, prod);  // a_i is folded in together with b_i
        } else if (commutator_b) {
          const auto &a = chosen[slot - 1], &b = chosen[slot];
          detail::Perm comm = detail::compose(
              detail::compose(a, b, d), detail::compose(detail::inverse(a, d), detail::inverse(b, d), d), d);
          self(self, slot + 1, detail::compose(prod, comm, d));
        } else {
          self(self, slot + 1, detail::compose(prod, choices[i], d));
        }
      }
    };
    if (slots.empty()) {
      if (first_begin == 0) finish(detail::identity_perm(d));
    } else {
      rec(rec, 0, detail::identity_perm(d));
    }
    return acc;
  };

  detail::PartialCount total;
  if (workers > 1 && !slots.empty()) {
    std::vector<std::future<detail::PartialCount>> jobs;
    for (unsigned w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, run, w, workers));
    for (auto &j : jobs) {
      auto part = j.get();
      total.tuples += part.tuples;
      total.stabilizer_sum += part.stabilizer_sum;
    }
  } else {
    total = run(0, 1);
  }

  Integer fact = 1;
  for (int i = 2; i <= d; ++i) fact *= i;
  out.tuples = total.tuples;
  out.weighted = Rational(total.tuples, fact);
  out.weighted.canonicalize();
  Integer rem;
  mpz_tdiv_qr(out.classes.get_mpz_t(), rem.get_mpz_t(), total.stabilizer_sum.get_mpz_t(), fact.get_mpz_t());
  if (rem != 0) throw std::logic_error("hurwitz: orbit-stabilizer sum not divisible by d!");
  return out;
}

/// Connected unbranched degree-k covers of a torus, up to isomorphism.
inline Integer torus_cover_classes(int k, const HurwitzBounds &bounds = {}) {
  if (k < 1) throw std::invalid_argument("torus_cover_classes: k must be >= 1");
  return count_tuples({k, 1, {}, true}, bounds).classes;
}

/// "2,1,1;2,1,1" -> two profiles.
inline std::vector<RamificationProfile> parse_profiles(const std::string &text) {
  std::vector<RamificationProfile> out;
  if (text.empty()) return out;
  std::stringstream outer(text);
  std::string chunk;
  while (std::getline(outer, chunk, ';')) {
    RamificationProfile pr;
    std::stringstream inner(chunk);
    std::string tok;
    while (std::getline(inner, tok, ',')) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception &) {
        throw std::invalid_argument("malformed profile entry '" + tok + "'");
      }
      if (used != tok.size()) throw std::invalid_argument("malformed profile entry '" + tok + "'");
      pr.parts.push_back(v);
    }
    if (pr.parts.empty()) throw std::invalid_argument("empty ramification profile");
    out.push_back(std::move(pr));
  }
  return out;
}

} // namespace hcycle
