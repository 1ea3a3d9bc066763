#include "cks/weights.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cks/errors.hpp"
#include "cks/logmath.hpp"

namespace cks {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::constant: return "constant";
    case WeightKind::factorial_power: return "factorial_power";
    case WeightKind::bell: return "bell";
    case WeightKind::custom: return "custom";
  }
  return "custom";
}

WeightKind weight_kind_from_string(std::string_view name) {
  if (name == "constant") return WeightKind::constant;
  if (name == "factorial_power" || name == "factorial-power" || name == "ks") return WeightKind::factorial_power;
  if (name == "bell") return WeightKind::bell;
  if (name == "custom") return WeightKind::custom;
  throw ValidationError("unknown weight kind '" + std::string(name) + "'");
}

namespace {

void validate_log_alpha(const std::vector<double>& log_alpha) {
  if (log_alpha.empty()) throw ValidationError("weight sequence needs at least alpha(0)");
  if (log_alpha[0] != 0.0) throw ValidationError("alpha(0) must equal 1 (ln alpha(0) = 0)");
  for (std::size_t n = 0; n < log_alpha.size(); ++n) {
    if (!std::isfinite(log_alpha[n])) {
      throw ValidationError("ln alpha(" + std::to_string(n) + ") is not finite");
    }
  }
}

void validate_n_max(int n_max) {
  if (n_max < 0) throw ValidationError("n_max must be >= 0");
}

}  // namespace

WeightSequence::WeightSequence(WeightKind kind, std::optional<double> beta,
                               std::optional<int> bell_order, std::vector<double> log_alpha)
    : kind_(kind), beta_(beta), bell_order_(bell_order), log_alpha_(std::move(log_alpha)) {
  validate_log_alpha(log_alpha_);
}

double WeightSequence::alpha(int n) const { return std::exp(log_alpha(n)); }

WeightSequence WeightSequence::from_parts(WeightKind kind, std::optional<double> beta,
                                          std::optional<int> bell_order,
                                          std::vector<double> log_alpha) {
  if (kind == WeightKind::factorial_power && (!beta || *beta < 0.0 || *beta >= 1.0)) {
    throw ValidationError("factorial_power sequence needs beta in [0, 1)");
  }
  if (kind == WeightKind::bell && (!bell_order || *bell_order < 2)) {
    throw ValidationError("bell sequence needs k >= 2");
  }
  if (kind == WeightKind::constant) {
    for (double v : log_alpha) {
      if (v != 0.0) throw ValidationError("constant sequence must have all ln alpha(n) == 0");
    }
  }
  return WeightSequence(kind, beta, bell_order, std::move(log_alpha));
}

WeightSequence make_constant(int n_max) {
  validate_n_max(n_max);
  return WeightSequence(WeightKind::constant, std::nullopt, std::nullopt,
                        std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0));
}

WeightSequence make_factorial_power(double beta, int n_max) {
  validate_n_max(n_max);
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
  std::vector<double> log_alpha = log_factorials(n_max);
  for (double& v : log_alpha) v *= beta;
  return WeightSequence(WeightKind::factorial_power, beta, std::nullopt, std::move(log_alpha));
}

std::vector<double> log_exp_of_series_normalized(std::span<const double> log_g) {
  const std::size_t size = log_g.size();
  std::vector<double> log_h(size, kNegInf);
  if (size == 0) return log_h;
  log_h[0] = 0.0;
  // ln(m g_m), hoisted out of the O(n^2) loop.
  std::vector<double> log_mg(size, kNegInf);
  for (std::size_t m = 1; m < size; ++m) log_mg[m] = std::log(static_cast<double>(m)) + log_g[m];

  std::vector<double> terms;
  terms.reserve(size);
  for (std::size_t n = 1; n < size; ++n) {
    terms.clear();
    for (std::size_t m = 1; m <= n; ++m) terms.push_back(log_mg[m] + log_h[n - m]);
    log_h[n] = log_sum_exp(terms) - std::log(static_cast<double>(n));
  }
  return log_h;
}

IteratedExpSeries iterated_exp_series(int k, int n_max) {
  validate_n_max(n_max);
  if (k < 1) throw ValidationError("iterated exponential order k must be >= 1");
  IteratedExpSeries series;
  series.k = 1;
  series.log_coeff = log_factorials(n_max);
  for (double& v : series.log_coeff) v = -v;
  series.log_coeff_normalized = series.log_coeff;
  series.log_exp_k_0 = 0.0;
  for (int order = 1; order < k; ++order) series = compose_with_exp(series);
  return series;
}

IteratedExpSeries compose_with_exp(const IteratedExpSeries& inner) {
  // exp(g)(0) = e^{g(0)} and g(0) = exp_k(0) = e^{log_exp_k_0}.
  const double log_f0 = std::exp(inner.log_exp_k_0);
  if (!std::isfinite(log_f0)) {
    throw OverflowError("ln exp_" + std::to_string(inner.k + 1) + "(0) exceeds double range");
  }
  IteratedExpSeries outer;
  outer.k = inner.k + 1;
  outer.log_exp_k_0 = log_f0;
  outer.log_coeff_normalized = log_exp_of_series_normalized(inner.log_coeff);
  outer.log_coeff.resize(outer.log_coeff_normalized.size());
  for (std::size_t n = 0; n < outer.log_coeff.size(); ++n) {
    outer.log_coeff[n] = log_f0 + outer.log_coeff_normalized[n];
  }
  return outer;
}

WeightSequence make_bell(int k, int n_max) {
  validate_n_max(n_max);
  if (k < 2) throw ValidationError("Bell order k must be >= 2");
  const IteratedExpSeries series = iterated_exp_series(k, n_max);
  // b_k(n) = n! B_k(n) / (n! exp_k(0)) with the normalized coefficients; b_k(0) == 1 exactly.
  std::vector<double> log_alpha = log_factorials(n_max);
  for (std::size_t n = 0; n < log_alpha.size(); ++n) log_alpha[n] += series.log_coeff_normalized[n];
  log_alpha[0] = 0.0;
  return WeightSequence(WeightKind::bell, std::nullopt, k, std::move(log_alpha));
}

WeightSequence make_custom(std::vector<double> log_values) {
  return WeightSequence(WeightKind::custom, std::nullopt, std::nullopt, std::move(log_values));
}

}  // namespace cks
