#pragma once

// Hypothesis checking and certificates for the reduction chain from
// (g, h, d, m2, md, n) down to a genus-1-target base case with g + m2 = 12.

#include "hcycle/modular.hpp"
#include "hcycle/strata.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace hcycle {

enum class TheoremCase { EllipticTarget, HigherTargetDegree2, HigherTargetDegreeAbove2 };

inline std::string to_string(TheoremCase c) {
  switch (c) {
  case TheoremCase::EllipticTarget: return "h=1";
  case TheoremCase::HigherTargetDegree2: return "h>1,d=2";
  case TheoremCase::HigherTargetDegreeAbove2: return "h>1,d>2";
  }
  return "?";
}

struct InequalityCheck {
  std::string name;  // e.g. "g + m2 >= 12"
  long lhs = 0, rhs = 0;
  bool pass = false;
};

struct HypothesisReport {
  TheoremCase which = TheoremCase::EllipticTarget;
  std::vector<InequalityCheck> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck &c) { return c.pass; });
  }
  const InequalityCheck *first_failure() const {
    for (const auto &c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

inline HypothesisReport check_hypotheses(const HurwitzParams &p) {
  if (p.h < 1) throw std::invalid_argument("check_hypotheses: h must be at least 1");
  if (p.d < 2) throw std::invalid_argument("check_hypotheses: d must be at least 2");
  if (p.g < 0 || p.m2 < 0 || p.md < 0 || p.n < 0)
    throw std::invalid_argument("check_hypotheses: g, m2, md, n must be non-negative");
  HypothesisReport r;
  auto ge = [&](std::string name, long lhs, long rhs) { r.checks.push_back({std::move(name), lhs, rhs, lhs >= rhs}); };
  const long g = p.g, h = p.h, d = p.d, m2 = p.m2, md = p.md;
  if (h == 1) {
    r.which = TheoremCase::EllipticTarget;
    ge("g >= 2", g, 2);
    ge("g + m2 >= 12", g + m2, 12);
  } else if (d == 2) {
    r.which = TheoremCase::HigherTargetDegree2;
    ge("g >= 2h", g, 2 * h);
    ge("g + m2 >= 2h + 10", g + m2, 2 * h + 10);
    ge("m2 >= 1", m2, 1);
  } else {
    r.which = TheoremCase::HigherTargetDegreeAbove2;
    ge("g >= d(h-1) + 2", g, d * (h - 1) + 2);
    ge("g + m2 + md >= (2d-3)(h-1) + 12", g + m2 + md, (2 * d - 3) * (h - 1) + 12);
    ge("md >= (d-3)(h-1) + 1", md, (d - 3) * (h - 1) + 1);
  }
  // Outside the bullets: more marked ramification points than exist.
  if (p.b() >= 0) ge("b >= n", p.b(), p.n);
  return r;
}

enum class StepKind { ForgetRamification, PairToTuple, DropPair, GenusStep, CombStep };

inline std::string to_string(StepKind k) {
  switch (k) {
  case StepKind::ForgetRamification: return "ForgetRamification";
  case StepKind::PairToTuple: return "PairToTuple";
  case StepKind::DropPair: return "DropPair";
  case StepKind::GenusStep: return "GenusStep";
  case StepKind::CombStep: return "CombStep";
  }
  return "?";
}

inline std::optional<StepKind> step_kind_from_string(const std::string &s) {
  for (auto k : {StepKind::ForgetRamification, StepKind::PairToTuple, StepKind::DropPair, StepKind::GenusStep,
                 StepKind::CombStep})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Non-tautologicality of `output` implies it for `input`.
struct ReductionStep {
  StepKind kind = StepKind::ForgetRamification;
  HurwitzParams input, output;
  int s = 0;  // CombStep only
  bool operator==(const ReductionStep &) const = default;
};

struct Certificate {
  HurwitzParams root;
  std::vector<ReductionStep> steps;
  int base_g = 0, base_m2 = 0;
  int witness_d = 0;
  Integer witness_a;
  bool operator==(const Certificate &) const = default;
};

namespace detail {

// The output a step must produce from `in`, or a reason it does not apply.
inline std::variant<HurwitzParams, std::string> apply_step(StepKind kind, const HurwitzParams &in, int s) {
  HurwitzParams out = in;
  auto fail = [](std::string why) -> std::variant<HurwitzParams, std::string> { return why; };
  if (kind != StepKind::CombStep && s != 0) return fail("only a CombStep carries s");
  switch (kind) {
  case StepKind::ForgetRamification:
    if (in.n < 1) return fail("ForgetRamification needs n >= 1");
    out.n = 0;
    return out;
  case StepKind::PairToTuple:
    if (in.n != 0) return fail("PairToTuple needs n = 0");
    if (in.md < 1) return fail("PairToTuple needs md >= 1");
    out.m2 = in.m2 + 1;
    out.md = in.md - 1;
    return out;
  case StepKind::DropPair:
    if (in.n != 0) return fail("DropPair needs n = 0");
    if (in.m2 < 1) return fail("DropPair needs m2 >= 1");
    out.m2 = in.m2 - 1;
    return out;
  case StepKind::GenusStep:
    if (in.h != 1) return fail("GenusStep needs h = 1");
    if (in.n != 0 || in.md != 0) return fail("GenusStep needs n = 0 and md = 0");
    if (in.g <= 12) return fail("GenusStep needs g > 12");
    out.g = in.g - 1;
    out.n = 1;
    return out;
  case StepKind::CombStep: {
    if (in.n != 0) return fail("CombStep needs n = 0");
    if (in.h < 2) return fail("CombStep needs h >= 2");
    if (s < 2) return fail("CombStep needs s >= 2");
    if (s < in.d - 1) return fail("CombStep needs s >= d-1");
    if (in.g < in.d) return fail("CombStep needs g >= d");
    // With d = 2 a pair and a 2-tuple are the same datum.
    long tuples = in.d == 2 ? static_cast<long>(in.md) + in.m2 : in.md;
    if (tuples < s - 1) return fail("CombStep needs md >= s-1");
    out.g = in.g - in.d;
    out.h = in.h - 1;
    // s-1 tuples go to the tails and the nodes form one new tuple on the
    // spine. For d = 2 a shortfall is taken from the pairs, and the node
    // tuple is then counted as a pair.
    if (in.md >= s - 1) {
      out.md = in.md - s + 2;
    } else {
      out.m2 = static_cast<int>(tuples - s + 2);
      out.md = 0;
    }
    return out;
  }
  }
  return fail("unknown step");
}

inline std::tuple<int, int, int, int, int> measure(const HurwitzParams &p) { return {p.h, p.g, p.n, p.md, p.m2}; }

} // namespace detail

inline Certificate build_certificate(const HurwitzParams &p) {
  auto rep = check_hypotheses(p);
  if (auto f = rep.first_failure())
    throw Refusal("hypothesis fails (" + to_string(rep.which) + "): " + f->name + " with " + std::to_string(f->lhs) +
                  " < " + std::to_string(f->rhs));
  Integer a = a_coeff(p.d);
  if (a == 0) throw Refusal("non-vanishing hypothesis fails: a_" + std::to_string(p.d) + " = 0");

  Certificate c;
  c.root = p;
  HurwitzParams cur = p;
  auto step = [&](StepKind k, int s = 0) {
    auto r = detail::apply_step(k, cur, s);
    if (auto *why = std::get_if<std::string>(&r)) throw std::logic_error("build_certificate: " + *why);
    auto next = std::get<HurwitzParams>(r);
    c.steps.push_back({k, cur, next, s});
    cur = next;
  };
  if (cur.n > 0) step(StepKind::ForgetRamification);
  while (cur.h > 1) step(StepKind::CombStep, cur.d == 2 ? 2 : cur.d - 1);
  while (cur.md > 0) step(StepKind::PairToTuple);
  while (cur.g > 12) {
    step(StepKind::GenusStep);
    step(StepKind::ForgetRamification);
  }
  while (cur.g + cur.m2 > 12) step(StepKind::DropPair);
  c.base_g = cur.g;
  c.base_m2 = cur.m2;
  c.witness_d = p.d;
  c.witness_a = a;
  return c;
}

struct VerifyResult {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

inline VerifyResult verify_certificate_detailed(const Certificate &c) {
  auto bad = [](std::string why) { return VerifyResult{false, std::move(why)}; };
  try {
    check_params(c.root);
  } catch (const std::invalid_argument &e) {
    return bad(std::string("root: ") + e.what());
  }
  HurwitzParams cur = c.root;
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    const auto &st = c.steps[i];
    auto at = "step " + std::to_string(i) + " (" + to_string(st.kind) + "): ";
    if (!(st.input == cur)) return bad(at + "input does not match the previous output");
    auto r = detail::apply_step(st.kind, st.input, st.s);
    if (auto *why = std::get_if<std::string>(&r)) return bad(at + *why);
    if (!(std::get<HurwitzParams>(r) == st.output)) return bad(at + "output is not the prescribed transformation");
    if (st.output.d != c.root.d) return bad(at + "degree changed");
    try {
      check_params(st.output);
    } catch (const std::invalid_argument &e) {
      return bad(at + e.what());
    }
    if (!(detail::measure(st.output) < detail::measure(st.input))) return bad(at + "measure does not decrease");
    cur = st.output;
  }
  if (cur.h != 1 || cur.n != 0 || cur.md != 0) return bad("chain does not end at h = 1, n = 0, md = 0");
  if (cur.g != c.base_g || cur.m2 != c.base_m2) return bad("base does not match the end of the chain");
  if (c.base_g < 2) return bad("base genus below 2");
  if (c.base_g + c.base_m2 != 12) return bad("base has g + m2 != 12");
  if (c.witness_d != c.root.d) return bad("witness degree differs from d");
  if (c.witness_a == 0) return bad("witness is zero");
  if (c.witness_d < 2 || a_coeff(c.witness_d) != c.witness_a) return bad("witness does not recompute");
  return {};
}

inline bool verify_certificate(const Certificate &c) { return verify_certificate_detailed(c).ok; }

} // namespace hcycle
