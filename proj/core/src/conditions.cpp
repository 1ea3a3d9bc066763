#include "cks/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cks/errors.hpp"
#include "cks/genfun.hpp"
#include "cks/logmath.hpp"

namespace cks {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::A1: return "A1";
    case Condition::A2: return "A2";
    case Condition::A2t: return "A2t";
    case Condition::B1: return "B1";
    case Condition::B1t: return "B1t";
    case Condition::B2: return "B2";
    case Condition::B2t: return "B2t";
    case Condition::B3: return "B3";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_on_window: return "holds_on_window";
    case Verdict::fails_at: return "fails_at";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Condition condition_from_string(std::string_view name) {
  for (Condition c : {Condition::A1, Condition::A2, Condition::A2t, Condition::B1, Condition::B1t,
                      Condition::B2, Condition::B2t, Condition::B3}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown condition '" + std::string(name) + "'");
}

namespace {

Window clamp_window(const WeightSequence& ws, Window w) {
  w.lo = std::max(w.lo, 0);
  w.hi = std::min(w.hi, ws.n_max());
  if (w.hi < w.lo) throw ValidationError("empty condition window");
  return w;
}

ConditionReport check_second_difference(std::span<const double> logs, Condition tag, int offset,
                                        double sign) {
  if (logs.size() < 3) throw ValidationError("log-convexity check needs at least 3 terms");
  ConditionReport rep;
  rep.condition = tag;
  rep.window = {offset, offset + static_cast<int>(logs.size()) - 1};
  rep.margin_offset = offset;
  rep.margins.resize(logs.size() - 2);
  rep.verdict = Verdict::holds_on_window;
  for (std::size_t i = 0; i + 2 < logs.size(); ++i) {
    // Difference of increments: each subtraction is of nearby values.
    const double second = (logs[i + 2] - logs[i + 1]) - (logs[i + 1] - logs[i]);
    rep.margins[i] = sign * second;
    if (rep.margins[i] < -kConvexityTolerance && !rep.fail_at) {
      rep.fail_at = offset + static_cast<int>(i);
      rep.verdict = Verdict::fails_at;
    }
  }
  return rep;
}

// log of alpha(n)/n! (sign=+1) or 1/(n! alpha(n)) (sign=-1) over the window.
std::vector<double> log_gamma_window(const WeightSequence& ws, Window w, double sign) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(w.hi - w.lo + 1));
  for (int n = w.lo; n <= w.hi; ++n) out.push_back(sign * ws.log_alpha(n) - log_factorial(n));
  return out;
}

ConditionReport check_a2_like(const WeightSequence& ws, Window window, Condition tag, double sign) {
  const Window w = clamp_window(ws, window);
  const int lo = std::max(w.lo, 1);
  if (w.hi - lo + 1 < 10) throw ValidationError("A2 checks need a window of at least 10 indices");
  ConditionReport rep;
  rep.condition = tag;
  rep.window = w;
  rep.window_limited = true;
  rep.value_offset = lo;
  for (int n = lo; n <= w.hi; ++n) {
    rep.values.push_back((sign * ws.log_alpha(n) - log_factorial(n)) / n);
  }
  // Margins: decrease of s over the last half, then ln(eps) - s(hi).
  const int mid = lo + (w.hi - lo) / 2;
  rep.margin_offset = mid + 1;
  bool decreasing = true;
  for (int n = mid + 1; n <= w.hi; ++n) {
    const double slack = rep.values[n - 1 - lo] - rep.values[n - lo];
    rep.margins.push_back(slack);
    if (slack < -kConvexityTolerance) decreasing = false;
  }
  const double final_slack = std::log(kA2Epsilon) - rep.values.back();
  rep.margins.push_back(final_slack);
  if (decreasing && final_slack > 0.0) {
    rep.verdict = Verdict::holds_on_window;
    rep.note = "s(n) decreasing on the last half and below ln(0.5) at the window end";
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.note = decreasing ? "s(n) has not fallen below ln(0.5) by the window end"
                          : "s(n) is not decreasing on the last half of the window";
  }
  return rep;
}

}  // namespace

ConditionReport check_A1(const WeightSequence& ws, Window window) {
  const Window w = clamp_window(ws, window);
  ConditionReport rep;
  rep.condition = Condition::A1;
  rep.window = w;
  rep.margin_offset = w.lo;
  rep.window_limited = true;
  constexpr double kMaxLog = 709.0;
  for (int n = w.lo; n <= w.hi; ++n) {
    rep.margins.push_back(std::exp(std::min(ws.log_alpha(n), kMaxLog)));
  }
  // Construction already rejects alpha(0) != 1 and non-finite logs, so alpha > 0 everywhere.
  rep.verdict = ws.log_alpha(0) == 0.0 ? Verdict::holds_on_window : Verdict::fails_at;
  if (rep.verdict == Verdict::fails_at) rep.fail_at = 0;
  const double min_alpha = *std::min_element(rep.margins.begin(), rep.margins.end());
  rep.note = "min alpha(n) on window = " + format_double(min_alpha) +
             "; the infimum over all n is not decidable from a window";
  return rep;
}

ConditionReport check_A2(const WeightSequence& ws, Window window) {
  return check_a2_like(ws, window, Condition::A2, +1.0);
}

ConditionReport check_A2_tilde(const WeightSequence& ws, Window window) {
  return check_a2_like(ws, window, Condition::A2t, -1.0);
}

ConditionReport check_logconvex(std::span<const double> logs, Condition tag, int offset) {
  return check_second_difference(logs, tag, offset, +1.0);
}

ConditionReport check_logconcave(std::span<const double> logs, Condition tag, int offset) {
  return check_second_difference(logs, tag, offset, -1.0);
}

ConditionReport check_B2(const WeightSequence& ws, Window window) {
  const Window w = clamp_window(ws, window);
  return check_logconcave(log_gamma_window(ws, w, +1.0), Condition::B2, w.lo);
}

ConditionReport check_B2_tilde(const WeightSequence& ws, Window window) {
  const Window w = clamp_window(ws, window);
  return check_logconcave(log_gamma_window(ws, w, -1.0), Condition::B2t, w.lo);
}

ConditionReport check_B3(const WeightSequence& ws, Window window) {
  const Window w = clamp_window(ws, window);
  const auto all = ws.log_alpha();
  return check_logconvex(all.subspan(static_cast<std::size_t>(w.lo),
                                     static_cast<std::size_t>(w.hi - w.lo + 1)),
                         Condition::B3, w.lo);
}

ConditionReport estimate_limsup(const WeightSequence& ws, Condition which, Window window) {
  if (which != Condition::B1 && which != Condition::B1t) {
    throw ValidationError("estimate_limsup handles B1 and B1t only");
  }
  Window w = clamp_window(ws, window);
  w.lo = std::max(w.lo, 1);
  if (w.hi - w.lo + 1 < 4) throw ValidationError("limsup window needs at least 4 indices");

  const GenFunEval gf(ws, which == Condition::B1 ? EgfMode::alpha : EgfMode::one_over_alpha);
  ConditionReport rep;
  rep.condition = which;
  rep.window = w;
  rep.window_limited = true;
  rep.value_offset = w.lo;
  for (int n = w.lo; n <= w.hi; ++n) {
    const double log_q = which == Condition::B1 ? log_b1_quantity(ws, gf, n) : log_theta(ws, gf, n);
    rep.values.push_back(log_q / n);
  }
  const int mid = w.lo + (w.hi - w.lo) / 2;
  const int quarter = w.lo + 3 * (w.hi - w.lo) / 4;
  double running = -std::numeric_limits<double>::infinity();
  double prev = running;
  rep.margin_offset = quarter + 1;
  bool flat = true;
  for (int n = mid; n <= w.hi; ++n) {
    running = std::max(running, rep.values[n - w.lo]);
    if (n > quarter) {
      const double slack = prev - running;
      rep.margins.push_back(slack);
      if (slack < -kConvexityTolerance) flat = false;
    }
    prev = running;
  }
  rep.log_limsup_estimate = running;
  rep.limsup_estimate = std::exp(running);
  rep.verdict = flat ? Verdict::holds_on_window : Verdict::inconclusive;
  rep.note = flat ? "running max of Q(n)^{1/n} flat over the last quarter"
                  : "running max of Q(n)^{1/n} still growing over the last quarter";
  return rep;
}

ConditionReport check_condition(const WeightSequence& ws, Condition c, Window window) {
  switch (c) {
    case Condition::A1: return check_A1(ws, window);
    case Condition::A2: return check_A2(ws, window);
    case Condition::A2t: return check_A2_tilde(ws, window);
    case Condition::B1:
    case Condition::B1t: return estimate_limsup(ws, c, window);
    case Condition::B2: return check_B2(ws, window);
    case Condition::B2t: return check_B2_tilde(ws, window);
    case Condition::B3: return check_B3(ws, window);
  }
  throw ValidationError("unknown condition");
}

std::vector<ImplicationCheck> check_implications(const WeightSequence& ws, Window window) {
  const std::pair<Condition, Condition> chain[] = {
      {Condition::A1, Condition::A2t},
      {Condition::B2, Condition::B1},
      {Condition::B2t, Condition::B1t},
      {Condition::B3, Condition::B2t},
  };
  std::vector<ImplicationCheck> out;
  for (const auto& [ante, cons] : chain) {
    ImplicationCheck check{ante, cons, check_condition(ws, ante, window), {}, false};
    try {
      check.consequent_report = check_condition(ws, cons, window);
    } catch (const TailNotCertified& e) {
      check.consequent_report.condition = cons;
      check.consequent_report.window = window;
      check.consequent_report.verdict = Verdict::inconclusive;
      check.consequent_report.window_limited = true;
      check.consequent_report.note = std::string("series not certified: ") + e.what();
    }
    check.violated = check.antecedent_report.verdict == Verdict::holds_on_window &&
                     check.consequent_report.verdict == Verdict::fails_at;
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace cks
