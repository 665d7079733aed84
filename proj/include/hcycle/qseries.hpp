#pragma once

// Truncated power series in q with exact integer coefficients.

#include "hcycle/common.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hcycle {

/// Power series c_0 + c_1 q + ... + c_{prec-1} q^{prec-1}, exact modulo q^prec.
class QSeries {
public:
  explicit QSeries(std::size_t prec) : coeffs_(prec) {
    if (prec == 0) throw std::invalid_argument("QSeries: precision must be positive");
  }

  QSeries(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("QSeries: precision must be positive");
  }

  static QSeries from_ints(std::initializer_list<long> cs, std::size_t prec) {
    QSeries s(prec);
    std::size_t i = 0;
    for (long c : cs) {
      if (i >= prec) break;
      s.coeffs_[i++] = c;
    }
    return s;
  }

  static QSeries one(std::size_t prec) { return monomial(0, prec); }

  static QSeries monomial(std::size_t exponent, std::size_t prec, const Integer &c = 1) {
    QSeries s(prec);
    if (exponent < prec) s.coeffs_[exponent] = c;
    return s;
  }

  std::size_t prec() const { return coeffs_.size(); }
  const Integer &operator[](std::size_t n) const { return coeffs_.at(n); }
  std::span<const Integer> coeffs() const { return coeffs_; }

  QSeries truncate(std::size_t new_prec) const {
    if (new_prec == 0 || new_prec > prec())
      throw std::invalid_argument("QSeries::truncate: precision must be in [1, prec]");
    return QSeries(std::vector<Integer>(coeffs_.begin(), coeffs_.begin() + new_prec));
  }

  bool operator==(const QSeries &other) const = default;

  friend QSeries operator+(const QSeries &a, const QSeries &b) {
    require_same_prec(a, b, "add");
    QSeries r(a.prec());
    for (std::size_t i = 0; i < a.prec(); ++i) r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
    return r;
  }

  friend QSeries operator-(const QSeries &a, const QSeries &b) {
    require_same_prec(a, b, "sub");
    QSeries r(a.prec());
    for (std::size_t i = 0; i < a.prec(); ++i) r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
    return r;
  }

  friend QSeries operator*(const Integer &c, const QSeries &a) {
    QSeries r(a.prec());
    for (std::size_t i = 0; i < a.prec(); ++i) r.coeffs_[i] = c * a.coeffs_[i];
    return r;
  }

  // Cauchy product truncated to the common precision. Iterates over the
  // non-zero support of the sparser factor, so products with lacunary series
  // such as prod(1 - q^l) cost O(prec * support).
  friend QSeries operator*(const QSeries &a, const QSeries &b) {
    require_same_prec(a, b, "mul");
    const std::size_t prec = a.prec();
    auto support = [](const QSeries &s) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < s.prec(); ++i)
        if (sgn(s.coeffs_[i]) != 0) idx.push_back(i);
      return idx;
    };
    std::vector<std::size_t> sa = support(a), sb = support(b);
    const QSeries &dense = sa.size() <= sb.size() ? b : a;
    const std::vector<std::size_t> &sparse_idx = sa.size() <= sb.size() ? sa : sb;
    const QSeries &sparse = sa.size() <= sb.size() ? a : b;

    QSeries r(prec);
    for (std::size_t i : sparse_idx) {
      const Integer &c = sparse.coeffs_[i];
      for (std::size_t j = 0; i + j < prec; ++j) {
        if (sgn(dense.coeffs_[j]) == 0) continue;
        mpz_addmul(r.coeffs_[i + j].get_mpz_t(), c.get_mpz_t(), dense.coeffs_[j].get_mpz_t());
      }
    }
    return r;
  }

  /// Multiplies by (1 - q^step) in place of a fresh copy; O(prec).
  QSeries times_one_minus_q_power(std::size_t step) const {
    QSeries r = *this;
    r.multiply_one_minus_q_power(step);
    return r;
  }

  void multiply_one_minus_q_power(std::size_t step) {
    if (step == 0) {
      for (auto &c : coeffs_) c = 0;
      return;
    }
    for (std::size_t n = prec(); n-- > step;)
      if (sgn(coeffs_[n - step]) != 0) coeffs_[n] -= coeffs_[n - step];
  }

  QSeries pow(unsigned exponent) const {
    QSeries r = one(prec());
    for (unsigned i = 0; i < exponent; ++i) r = r * *this;
    return r;
  }

private:
  static void require_same_prec(const QSeries &a, const QSeries &b, const char *op) {
    if (a.prec() != b.prec())
      throw std::invalid_argument(std::string("QSeries ") + op + ": precision mismatch");
  }

  std::vector<Integer> coeffs_;
};

inline QSeries add(const QSeries &a, const QSeries &b) { return a + b; }
inline QSeries mul(const QSeries &a, const QSeries &b) { return a * b; }

/// prod_{l >= 1} (1 - q^l) truncated at prec, built factor by factor.
inline QSeries euler_product(std::size_t prec) {
  QSeries p = QSeries::one(prec);
  for (std::size_t l = 1; l < prec; ++l) p.multiply_one_minus_q_power(l);
  return p;
}

/// q^{k/24} prod_{l >= 1} (1 - q^l)^k for k divisible by 24.
inline QSeries eta_power(unsigned k, std::size_t prec) {
  if (k % 24 != 0)
    throw std::invalid_argument("eta_power: exponent must be divisible by 24 (fractional q-powers unsupported)");
  if (prec == 0) throw std::invalid_argument("eta_power: precision must be positive");
  const std::size_t shift = k / 24;
  if (k == 0) return QSeries::one(prec);
  if (shift >= prec) return QSeries(prec);
  // Only the first prec - shift coefficients of the product survive the shift.
  const std::size_t inner = prec - shift;
  QSeries body = euler_product(inner).pow(k);
  std::vector<Integer> out(prec);
  for (std::size_t i = 0; i < inner; ++i) out[i + shift] = body[i];
  return QSeries(std::move(out));
}

} // namespace hcycle
