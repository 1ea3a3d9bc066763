#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cks/logmath.hpp"
#include "cks/weights.hpp"

namespace cks {

/// Which exponential generating function of a weight sequence.
///   alpha:          G_alpha(r)   = sum alpha(n)/n! r^n
///   one_over_alpha: G_{1/alpha}(r) = sum 1/(n! alpha(n)) r^n
enum class EgfMode { alpha, one_over_alpha };

std::string_view to_string(EgfMode mode);

/// Result of a truncated EGF evaluation at r >= 0.
struct EgfValue {
  /// ln of the partial sum.
  double log_value = 0.0;
  /// ln of an upper bound on everything not in the partial sum (-inf if exact).
  double log_tail_bound = kNegInf;
  /// tail bound / partial sum.
  double rel_tail = 0.0;
  /// Highest index included in the partial sum.
  int last_index = 0;
};

/// Truncated evaluator for G_alpha or G_{1/alpha} in log space.
///
/// The neglected tail past the last index N is bounded by the geometric
/// majorant t_N q / (1 - q), q = t_N / t_{N-1}. The certificate engages once
/// q < 1 and the term ratio is nonincreasing over the last three terms. The
/// majorant is rigorous whenever the coefficient sequence is log-concave
/// (conditions B2 / B2-tilde); for other custom sequences it is a heuristic.
class GenFunEval {
 public:
  GenFunEval(const WeightSequence& ws, EgfMode mode);

  EgfMode mode() const { return mode_; }
  int n_max() const { return static_cast<int>(log_gamma_.size()) - 1; }
  std::span<const double> log_gamma() const { return log_gamma_; }
  double log_gamma(int n) const { return log_gamma_.at(static_cast<std::size_t>(n)); }

  /// Evaluate using all stored coefficients. Throws TailNotCertified.
  EgfValue eval(double r) const { return eval_truncated(r, n_max()); }

  /// Evaluate using coefficients 0..last_index only. Throws TailNotCertified.
  EgfValue eval_truncated(double r, int last_index) const;

  /// Smallest N such that the partial sum through N certifies rel_tail <= rel_tol.
  /// Throws TailNotCertified if no N <= n_max does.
  int certified_truncation(double r, double rel_tol) const;

  /// d/dt ln G(e^t) at t = ln r, i.e. the mean index under the term weights.
  /// Same truncation and certificate as eval.
  double log_derivative(double r) const;

 private:
  EgfMode mode_;
  std::vector<double> log_gamma_;
};

/// inf_{r>0} G(r) / r^n, minimized in t = ln r.
struct InfRatioResult {
  int n = 0;
  /// Minimizer; 0 when the infimum is the boundary limit r -> 0+ (n = 0).
  double r_star = 0.0;
  double log_inf = 0.0;
  /// Tail certificate held at every probe point.
  bool certified = true;
  bool boundary = false;
  int iterations = 0;
};

inline constexpr double kInfRatioTolerance = 1e-12;
inline constexpr int kInfRatioMaxIterations = 200;

/// Golden-section search on the convex h(t) = ln G(e^t) - n t after bracketing
/// the sign change of h'. Propagates TailNotCertified.
InfRatioResult inf_ratio(const GenFunEval& gf, int n);

/// ln Theta(n), Theta(n) = n! alpha(n) inf_r G_{1/alpha}(r) / r^n.
/// The evaluator must be the one_over_alpha EGF of ws.
double log_theta(const WeightSequence& ws, const GenFunEval& inverse_gf, int n);
double log_theta(const WeightSequence& ws, int n);

/// ln of n!/alpha(n) inf_r G_alpha(r) / r^n, the quantity inside condition B1.
double log_b1_quantity(const WeightSequence& ws, const GenFunEval& gf, int n);

/// ln G_{b_k}(r) = ln exp_k(r) - ln exp_k(0) = exp_{k-1}(r) - exp_{k-1}(0).
/// Throws OverflowError when exp_{k-1}(r) is not representable.
double bell_closed_form(int k, double r);

/// Evaluator for the factorial-power EGFs sum r^n / (n!)^c with c = 1 - beta
/// (G_alpha) or c = 1 + beta (G_{1/alpha}). Coefficients come from lgamma, so no
/// sequence is stored. The terms are log-concave in n with peak near R = r^{1/c}.
///
/// window: sums the terms around the peak and bounds both neglected sides by
///   geometric majorants.
/// euler_maclaurin: once R/c >= kEulerMaclaurinMinVariance the peak is too wide
///   to stream; the sum is the integral of the continuous term (trapezoid in the
///   scaled variable) plus Euler-Maclaurin endpoint corrections, with the
///   remainder bounded by (1/12) int |f''| and the outer tails by log-concavity.
///
/// ln G is reported relative to the reference c R as well: log_excess keeps full
/// precision when ln G itself (~ c R) is too large for doubles to resolve O(1) gaps.
struct StreamedEgfValue {
  enum class Method { window, euler_maclaurin };

  double log_value = 0.0;
  /// ln G - c R.
  double log_excess = 0.0;
  /// Two-sided relative bound on the truncation and summation error.
  double rel_tail = 0.0;
  /// Estimated absolute rounding error of log_value (from the magnitude of ln t_n).
  double log_rounding = 0.0;
  /// Same for log_excess.
  double excess_rounding = 0.0;
  double peak_index = 0.0;
  long long terms_summed = 0;
  Method method = Method::window;
};

inline constexpr long long kDefaultStreamBudget = 40'000'000;
inline constexpr double kEulerMaclaurinMinVariance = 1e11;

/// Throws TailNotCertified if the window would exceed term_budget terms.
StreamedEgfValue factorial_power_egf(double beta, EgfMode mode, double r,
                                     long long term_budget = kDefaultStreamBudget);

/// The euler_maclaurin path regardless of peak width. Needs r^{1/c} >= 1e5.
StreamedEgfValue factorial_power_egf_euler_maclaurin(double beta, EgfMode mode, double r);

}  // namespace cks
