#include "cks/logmath.hpp"

#include <algorithm>
#include <charconv>

namespace cks {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

void LogSumAccumulator::add(double log_term) {
  if (log_term == kNegInf) return;
  if (log_term <= max_) {
    scaled_sum_ += std::exp(log_term - max_);
    return;
  }
  scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
  max_ = log_term;
}

double LogSumAccumulator::value() const {
  if (max_ == kNegInf) return kNegInf;
  return max_ + std::log(scaled_sum_);
}

std::vector<double> log_factorials(int n_max) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n_max, 0)) + 1, 0.0);
  for (int k = 1; k <= n_max; ++k) out[k] = out[k - 1] + std::log(static_cast<double>(k));
  return out;
}

namespace {
constexpr int kCachedFactorials = 1024;

const std::vector<double>& cached_log_factorials() {
  static const std::vector<double> table = log_factorials(kCachedFactorials);
  return table;
}
}  // namespace

double log_factorial(int n) {
  if (n <= kCachedFactorials) return cached_log_factorials()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  return a + std::log1p(-std::exp(b - a));
}

}  // namespace cks
