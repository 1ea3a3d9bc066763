#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cks/weights.hpp"

namespace cks {

/// The eight admissibility and growth conditions on a weight sequence.
/// A2t, B1t, B2t are the conditions stated for 1/alpha.
enum class Condition { A1, A2, A2t, B1, B1t, B2, B2t, B3 };
enum class Verdict { holds_on_window, fails_at, inconclusive };

std::string_view to_string(Condition c);
std::string_view to_string(Verdict v);
Condition condition_from_string(std::string_view name);

/// Closed index range [lo, hi], clamped to the sequence when checked.
struct Window {
  int lo = 0;
  int hi = 300;
};

/// Slack for log-convexity margins; covers rounding on the equality case alpha == 1.
inline constexpr double kConvexityTolerance = 1e-12;
/// Threshold epsilon in s(n_hi) < ln(epsilon) for the A2 / A2-tilde window verdict.
inline constexpr double kA2Epsilon = 0.5;

/// Finite-window verdict for one condition.
///
/// margins[i] is the slack at index margin_offset + i; fails_at(n) implies a
/// negative margin at n and holds_on_window implies every margin >= -tolerance.
struct ConditionReport {
  Condition condition = Condition::A1;
  Window window;
  Verdict verdict = Verdict::inconclusive;
  std::optional<int> fail_at;
  std::vector<double> margins;
  int margin_offset = 0;
  /// Per-index quantity behind the verdict (s(n) for A2, x(n) for B1), indexed from value_offset.
  std::vector<double> values;
  int value_offset = 0;
  /// Estimated limsup of Q(n)^{1/n} (B1 / B1t only), and its logarithm.
  std::optional<double> limsup_estimate;
  std::optional<double> log_limsup_estimate;
  /// The underlying statement is about all n (or a limit), so the verdict only covers the window.
  bool window_limited = false;
  std::string note;
};

/// alpha(0) = 1 and min alpha(n) > 0 on the window; margins are alpha(n).
ConditionReport check_A1(const WeightSequence& ws, Window window = {});

/// (alpha(n)/n!)^{1/n} -> 0 via s(n) = (ln alpha(n) - ln n!)/n. Needs >= 10 indices.
ConditionReport check_A2(const WeightSequence& ws, Window window = {});
/// (1/(n! alpha(n)))^{1/n} -> 0 via s(n) = -(ln n! + ln alpha(n))/n.
ConditionReport check_A2_tilde(const WeightSequence& ws, Window window = {});

/// Margins l(n) + l(n+2) - 2 l(n+1) (convex) or its negation (concave) of a
/// log sequence; index n of logs[i] is offset + i.
ConditionReport check_logconvex(std::span<const double> logs, Condition tag, int offset = 0);
ConditionReport check_logconcave(std::span<const double> logs, Condition tag, int offset = 0);

/// gamma(n) = alpha(n)/n! log-concave.
ConditionReport check_B2(const WeightSequence& ws, Window window = {});
/// 1/(n! alpha(n)) log-concave.
ConditionReport check_B2_tilde(const WeightSequence& ws, Window window = {});
/// alpha(n) log-convex.
ConditionReport check_B3(const WeightSequence& ws, Window window = {});

/// Window estimate of limsup Q(n)^{1/n} for B1 (Q = n!/alpha(n) inf G_alpha/r^n)
/// or B1t (Q = Theta(n)). x(n) = ln Q(n) / n over [max(lo,1), hi]; the estimate
/// is the max of x over the last half, and the verdict holds_on_window when the
/// running max is flat over the last quarter. Propagates TailNotCertified.
ConditionReport estimate_limsup(const WeightSequence& ws, Condition which, Window window = {});

/// Dispatch by condition tag.
ConditionReport check_condition(const WeightSequence& ws, Condition c, Window window = {});

struct ImplicationCheck {
  Condition antecedent;
  Condition consequent;
  ConditionReport antecedent_report;
  ConditionReport consequent_report;
  /// Antecedent holds on the window while the consequent fails there.
  bool violated = false;
};

/// A1 => A2t, B2 => B1, B2t => B1t, B3 => B2t, each evaluated on the same window.
/// A consequent whose series cannot be certified is reported inconclusive.
std::vector<ImplicationCheck> check_implications(const WeightSequence& ws, Window window = {});

}  // namespace cks
