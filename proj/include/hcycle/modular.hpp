#pragma once

// Ramanujan tau, the coefficients a_d of eta^48, weight-12 Hecke operators on
// q-expansions, and non-vanishing scans.

#include "hcycle/common.hpp"
#include "hcycle/qseries.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <future>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hcycle {

/// tau(1..bound) from the product expansion of eta^24. Immutable once built.
class TauTable {
public:
  explicit TauTable(std::size_t bound) : values_(bound + 1) {
    if (bound < 1) throw std::invalid_argument("TauTable: bound must be at least 1");
    QSeries delta = eta_power(24, bound + 1);
    for (std::size_t d = 1; d <= bound; ++d) values_[d] = delta[d];
  }

  std::size_t bound() const { return values_.size() - 1; }

  const Integer &operator()(std::size_t d) const {
    if (d < 1 || d > bound()) throw std::out_of_range("TauTable: index outside [1, bound]");
    return values_[d];
  }

private:
  std::vector<Integer> values_;
};

/// a_2..a_bound read off the direct expansion of eta^48.
class ACoeffTable {
public:
  explicit ACoeffTable(std::size_t bound) : values_(bound + 1) {
    if (bound < 2) throw std::invalid_argument("ACoeffTable: bound must be at least 2");
    QSeries f = eta_power(48, bound + 1);
    for (std::size_t d = 2; d <= bound; ++d) values_[d] = f[d];
  }

  std::size_t bound() const { return values_.size() - 1; }

  const Integer &operator()(std::size_t d) const {
    if (d < 2 || d > bound()) throw std::out_of_range("ACoeffTable: index outside [2, bound]");
    return values_[d];
  }

private:
  std::vector<Integer> values_;
};

namespace detail {

// Grow-only memo: a published table is never mutated, so callers may keep the
// shared_ptr while another thread replaces the cache with a larger one.
template <class Table, std::size_t MinBound>
std::shared_ptr<const Table> memo_table(std::size_t bound) {
  static std::mutex mu;
  static std::shared_ptr<const Table> cache;
  std::lock_guard lock(mu);
  if (!cache || cache->bound() < bound) {
    std::size_t target = std::max({bound, MinBound, cache ? 2 * cache->bound() : std::size_t{0}});
    cache = std::make_shared<const Table>(target);
  }
  return cache;
}

} // namespace detail

inline std::shared_ptr<const TauTable> tau_table(std::size_t bound) {
  return detail::memo_table<TauTable, 64>(bound);
}

inline std::shared_ptr<const ACoeffTable> a_table(std::size_t bound) {
  return detail::memo_table<ACoeffTable, 64>(bound);
}

inline Integer tau(long d) {
  if (d < 1) throw std::invalid_argument("tau: argument must be >= 1");
  return (*tau_table(static_cast<std::size_t>(d)))(static_cast<std::size_t>(d));
}

/// Coefficient of q^d in eta^48.
inline Integer a_coeff(long d) {
  if (d < 2) throw std::invalid_argument("a_coeff: argument must be >= 2");
  return (*a_table(static_cast<std::size_t>(d)))(static_cast<std::size_t>(d));
}

/// sum_{i + j = d, i, j >= 1} tau(i) tau(j).
inline Integer tau_convolution(long d, const TauTable &t) {
  if (d < 2) throw std::invalid_argument("tau_convolution: argument must be >= 2");
  Integer s = 0;
  for (long i = 1; i < d; ++i) s += t(i) * t(d - i);
  return s;
}

/// tau(1..bound) rebuilt from the values at primes alone, using
/// tau(mn) = tau(m) tau(n) for coprime m, n and
/// tau(p^{r+1}) = tau(p) tau(p^r) - p^11 tau(p^{r-1}).
inline std::vector<Integer> tau_from_prime_values(std::size_t bound, const TauTable &seeds) {
  if (seeds.bound() < bound) throw std::invalid_argument("tau_from_prime_values: seed table too small");
  std::vector<std::size_t> spf(bound + 1, 0);
  for (std::size_t i = 2; i <= bound; ++i)
    if (spf[i] == 0)
      for (std::size_t j = i; j <= bound; j += i)
        if (spf[j] == 0) spf[j] = i;

  std::vector<Integer> out(bound + 1);
  if (bound >= 1) out[1] = 1;
  for (std::size_t n = 2; n <= bound; ++n) {
    std::size_t p = spf[n], m = n, r = 0;
    while (m % p == 0) m /= p, ++r;
    if (m > 1) {
      out[n] = out[n / m] * out[m];
      continue;
    }
    if (r == 1) {
      out[n] = seeds(p);
      continue;
    }
    const Integer p11 = ipow(static_cast<long>(p), 11);
    out[n] = seeds(p) * out[n / p] - p11 * out[n / (p * p)];
  }
  return out;
}

/// Weight-12 Hecke operator on a q-expansion:
/// (T_k f)_n = sum_{e | gcd(n, k)} e^11 f_{nk/e^2}, for n < floor(prec / k).
inline QSeries hecke_apply(long k, const QSeries &f) {
  if (k < 1) throw std::invalid_argument("hecke_apply: k must be >= 1");
  const std::size_t uk = static_cast<std::size_t>(k);
  const std::size_t out_prec = f.prec() / uk;
  if (out_prec < 2) throw std::invalid_argument("hecke_apply: resulting precision below 2");
  std::vector<Integer> out(out_prec);
  for (std::size_t n = 0; n < out_prec; ++n) {
    const std::size_t g = std::gcd(n, uk);
    for (std::size_t e = 1; e <= g; ++e) {
      if (g % e != 0) continue;
      out[n] += ipow(static_cast<long>(e), 11) * f[n * uk / (e * e)];
    }
  }
  return QSeries(std::move(out));
}

enum class CoeffKind { Tau, A };

namespace detail {

// Coefficients of prod(1 - q^l)^3 below prec, from Jacobi's identity
// sum_k (-1)^k (2k+1) q^{k(k+1)/2}: a lacunary series with O(sqrt(prec)) terms.
inline std::vector<std::pair<std::size_t, long>> jacobi_cube_terms(std::size_t prec) {
  std::vector<std::pair<std::size_t, long>> terms;
  for (std::size_t k = 0;; ++k) {
    std::size_t e = k * (k + 1) / 2;
    if (e >= prec) break;
    long c = static_cast<long>(2 * k + 1);
    terms.emplace_back(e, (k % 2 == 0) ? c : -c);
  }
  return terms;
}

// Multiplies a residue vector by a lacunary integer series modulo p < 2^31.
// Products stay below 2^41 and at most a few thousand are accumulated before
// reduction, so int64 accumulation cannot overflow.
inline std::vector<std::uint32_t> mul_lacunary_mod(const std::vector<std::uint32_t> &dense,
                                                   const std::vector<std::pair<std::size_t, long>> &terms,
                                                   std::uint32_t p) {
  const std::size_t prec = dense.size();
  std::vector<std::uint32_t> out(prec);
  for (std::size_t n = 0; n < prec; ++n) {
    std::int64_t acc = 0;
    for (const auto &[e, c] : terms) {
      if (e > n) break;
      acc += static_cast<std::int64_t>(dense[n - e]) * c;
    }
    acc %= static_cast<std::int64_t>(p);
    if (acc < 0) acc += p;
    out[n] = static_cast<std::uint32_t>(acc);
  }
  return out;
}

// prod(1 - q^l)^{3 * cube_power} modulo p, below prec.
inline std::vector<std::uint32_t> euler_power_mod(std::size_t prec, unsigned cube_power, std::uint32_t p) {
  auto terms = jacobi_cube_terms(prec);
  std::vector<std::uint32_t> acc(prec, 0);
  acc[0] = 1;
  for (unsigned i = 0; i < cube_power; ++i) acc = mul_lacunary_mod(acc, terms, p);
  return acc;
}

// Indices d in [first, max] whose coefficient vanishes modulo p.
inline std::vector<std::size_t> zero_residues(CoeffKind kind, std::size_t max, std::uint32_t p) {
  const std::size_t shift = kind == CoeffKind::Tau ? 1 : 2;
  const unsigned cubes = kind == CoeffKind::Tau ? 8 : 16;
  const std::size_t first = kind == CoeffKind::Tau ? 1 : 2;
  std::vector<std::size_t> zeros;
  if (max < first) return zeros;
  auto series = euler_power_mod(max - shift + 1, cubes, p);
  for (std::size_t d = first; d <= max; ++d)
    if (series[d - shift] == 0) zeros.push_back(d);
  return zeros;
}

inline constexpr std::array<std::uint32_t, 2> kScanPrimes{2147483629u, 2147483587u};

} // namespace detail

/// All d <= max (d >= 1 for tau, d >= 2 for a_d) whose coefficient is exactly
/// zero. A non-zero residue modulo any prime certifies non-vanishing; indices
/// that are zero modulo every scan prime are settled by exact arithmetic.
inline std::vector<std::size_t> scan_nonvanishing(CoeffKind kind, std::size_t max, unsigned workers = 1) {
  std::vector<std::vector<std::size_t>> per_prime(detail::kScanPrimes.size());
  if (workers > 1) {
    std::vector<std::future<std::vector<std::size_t>>> jobs;
    for (std::uint32_t p : detail::kScanPrimes)
      jobs.push_back(std::async(std::launch::async, [=] { return detail::zero_residues(kind, max, p); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_prime[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < detail::kScanPrimes.size(); ++i)
      per_prime[i] = detail::zero_residues(kind, max, detail::kScanPrimes[i]);
  }

  std::vector<std::size_t> suspects = per_prime[0];
  for (std::size_t i = 1; i < per_prime.size(); ++i) {
    std::vector<std::size_t> both;
    std::set_intersection(suspects.begin(), suspects.end(), per_prime[i].begin(), per_prime[i].end(),
                          std::back_inserter(both));
    suspects = std::move(both);
  }

  std::vector<std::size_t> zeros;
  for (std::size_t d : suspects) {
    Integer exact = kind == CoeffKind::Tau ? tau(static_cast<long>(d)) : a_coeff(static_cast<long>(d));
    if (sgn(exact) == 0) zeros.push_back(d);
  }
  return zeros;
}

} // namespace hcycle
