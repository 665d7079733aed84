#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hcycle {

using Integer = mpz_class;
using Rational = mpq_class;

// A request that is well-formed but falls outside what the library will
// compute: enumeration budgets, failed theorem hypotheses, vanishing witnesses.
class Refusal : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Integer &x) { return x.get_str(); }

// Lowest terms; integers print without a denominator.
inline std::string to_string(const Rational &x) {
  Rational y = x;
  y.canonicalize();
  return y.get_str();
}

inline Integer ipow(long base, unsigned long exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base < 0 ? -base : base), exp);
  if (base < 0 && (exp & 1)) r = -r;
  return r;
}

// Reads a non-negative integer bound from the environment, falling back to
// `fallback` when unset or unparsable.
inline long env_bound(const char *name, long fallback) {
  const char *raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char *end = nullptr;
  long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 0) return fallback;
  return v;
}

} // namespace hcycle
