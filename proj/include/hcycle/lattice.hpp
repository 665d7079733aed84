#pragma once

// Index-k sublattices of Z^2 in Hermite normal form and their classes under
// the two-sided SL_2(Z) action (Smith normal form).

#include <compare>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hcycle {

/// [[a, b], [0, d]] with a, d >= 1 and 0 <= b < a.
struct HNFMatrix {
  long a = 1, b = 0, d = 1;
  long det() const { return a * d; }
  auto operator<=>(const HNFMatrix &) const = default;
};

/// diag(e1, e2) with e1 | e2.
struct SNFClass {
  long e1 = 1, e2 = 1;
  auto operator<=>(const SNFClass &) const = default;
};

inline std::vector<HNFMatrix> sublattices(long k) {
  if (k < 1) throw std::invalid_argument("sublattices: k must be >= 1");
  std::vector<HNFMatrix> out;
  for (long a = 1; a <= k; ++a) {
    if (k % a != 0) continue;
    for (long b = 0; b < a; ++b) out.push_back({a, b, k / a});
  }
  return out;
}

// For a 2x2 integer matrix the first elementary divisor is the gcd of the
// entries and the second is det / e1.
inline SNFClass snf_class(const HNFMatrix &m) {
  long e1 = std::gcd(std::gcd(m.a, m.b), m.d);
  return {e1, m.det() / e1};
}

inline std::vector<SNFClass> double_cosets(long k) {
  if (k < 1) throw std::invalid_argument("double_cosets: k must be >= 1");
  std::vector<SNFClass> out;
  for (long e1 = 1; e1 * e1 <= k; ++e1) {
    if (k % e1 != 0) continue;
    long e2 = k / e1;
    if (e2 % e1 == 0) out.push_back({e1, e2});
  }
  return out;
}

} // namespace hcycle
