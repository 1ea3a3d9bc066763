#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cks {

/// Default number of stored terms beyond alpha(0).
inline constexpr int kDefaultNMax = 400;

enum class WeightKind { constant, factorial_power, bell, custom };

std::string_view to_string(WeightKind kind);
WeightKind weight_kind_from_string(std::string_view name);

/// A weight sequence alpha(0..n_max) stored as natural logarithms.
///
/// Invariants checked at construction: log_alpha[0] == 0 and every entry is
/// finite. Only the finite window is stored, so "inf_n alpha(n) > 0" can only
/// be asserted for the window.
class WeightSequence {
 public:
  WeightKind kind() const { return kind_; }
  std::optional<double> beta() const { return beta_; }
  std::optional<int> bell_order() const { return bell_order_; }

  int n_max() const { return static_cast<int>(log_alpha_.size()) - 1; }
  double log_alpha(int n) const { return log_alpha_.at(static_cast<std::size_t>(n)); }
  double alpha(int n) const;
  std::span<const double> log_alpha() const { return log_alpha_; }

  /// Rebuild from serialized parts. Validates the same invariants as make_custom.
  static WeightSequence from_parts(WeightKind kind, std::optional<double> beta,
                                   std::optional<int> bell_order, std::vector<double> log_alpha);

 private:
  WeightSequence(WeightKind kind, std::optional<double> beta, std::optional<int> bell_order,
                 std::vector<double> log_alpha);

  friend WeightSequence make_constant(int);
  friend WeightSequence make_factorial_power(double, int);
  friend WeightSequence make_bell(int, int);
  friend WeightSequence make_custom(std::vector<double>);

  WeightKind kind_;
  std::optional<double> beta_;
  std::optional<int> bell_order_;
  std::vector<double> log_alpha_;
};

/// alpha(n) == 1.
WeightSequence make_constant(int n_max = kDefaultNMax);

/// alpha(n) = (n!)^beta for beta in [0, 1).
WeightSequence make_factorial_power(double beta, int n_max = kDefaultNMax);

/// Order-k Bell numbers b_k(n) = B_k(n) / exp_k(0), k >= 2.
WeightSequence make_bell(int k, int n_max = kDefaultNMax);

/// Arbitrary sequence given as ln alpha(n). First entry must be 0.
WeightSequence make_custom(std::vector<double> log_values);

/// Taylor coefficients of the k-fold iterated exponential exp_k at 0.
struct IteratedExpSeries {
  int k = 1;
  /// log_coeff[n] = ln(B_k(n) / n!).
  std::vector<double> log_coeff;
  /// ln exp_k(0).
  double log_exp_k_0 = 0.0;
  /// ln(B_k(n) / (n! exp_k(0))); entry 0 is exactly 0.
  std::vector<double> log_coeff_normalized;

  int n_max() const { return static_cast<int>(log_coeff.size()) - 1; }
};

IteratedExpSeries iterated_exp_series(int k, int n_max = kDefaultNMax);

/// exp composed with the series: returns the order k+1 series from order k.
IteratedExpSeries compose_with_exp(const IteratedExpSeries& inner);

/// Coefficients of exp(g(z)) / exp(g(0)) given ln g_m for m >= 1 (entry 0
/// ignored). Uses n h_n = sum_{m=1..n} m g_m h_{n-m}; -inf entries mean g_m = 0.
std::vector<double> log_exp_of_series_normalized(std::span<const double> log_g);

}  // namespace cks
