#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cks {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Shortest text that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

/// ln(sum_i exp(xs[i])). Empty input or all -inf gives -inf.
double log_sum_exp(std::span<const double> xs);

/// Streaming log-sum-exp with max shifting.
class LogSumAccumulator {
 public:
  void add(double log_term);
  double value() const;
  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double scaled_sum_ = 0.0;  // sum of exp(x - max_)
};

/// ln n! for n = 0..n_max, by running sums of ln k (no factorial is formed).
std::vector<double> log_factorials(int n_max);

/// ln n! for a single n, same summation as log_factorials for n <= 1024 and
/// lgamma beyond.
double log_factorial(int n);

/// ln(e^a - e^b) for a >= b.
double log_diff_exp(double a, double b);

}  // namespace cks
