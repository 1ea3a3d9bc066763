#include "cks/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cks/errors.hpp"
#include "cks/logmath.hpp"

namespace cks {

std::string_view to_string(EgfMode mode) {
  return mode == EgfMode::alpha ? "alpha" : "one_over_alpha";
}

GenFunEval::GenFunEval(const WeightSequence& ws, EgfMode mode) : mode_(mode) {
  const std::vector<double> lf = log_factorials(ws.n_max());
  log_gamma_.resize(lf.size());
  for (std::size_t n = 0; n < lf.size(); ++n) {
    const double la = ws.log_alpha(static_cast<int>(n));
    log_gamma_[n] = mode == EgfMode::alpha ? la - lf[n] : -la - lf[n];
  }
}

namespace {

void check_argument(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw ValidationError("generating functions are evaluated at finite r >= 0, got " +
                          format_double(r));
  }
}

// ln t_n = ln gamma(n) + n ln r for n = 0..last.
std::vector<double> log_terms(std::span<const double> log_gamma, double log_r, int last) {
  std::vector<double> lt(static_cast<std::size_t>(last) + 1);
  for (int n = 0; n <= last; ++n) lt[n] = log_gamma[n] + n * log_r;
  return lt;
}

// ln of the geometric tail bound past index `last`, or nullopt-like NaN when
// the ratio test has not engaged.
double log_tail_after(const std::vector<double>& lt, int last) {
  if (last < 2) return std::numeric_limits<double>::quiet_NaN();
  const double d_last = lt[last] - lt[last - 1];
  const double d_prev = lt[last - 1] - lt[last - 2];
  if (!(d_last < 0.0) || d_last > d_prev + 1e-12) return std::numeric_limits<double>::quiet_NaN();
  // t_N q / (1 - q) with q = e^{d_last}.
  return lt[last] + d_last - std::log(-std::expm1(d_last));
}

[[noreturn]] void throw_uncertified(double r, int last) {
  throw TailNotCertified("ratio test did not engage at r = " + format_double(r) +
                         " with " + std::to_string(last + 1) + " terms; raise n_max");
}

}  // namespace

EgfValue GenFunEval::eval_truncated(double r, int last_index) const {
  check_argument(r);
  last_index = std::clamp(last_index, 0, n_max());
  EgfValue out;
  if (r == 0.0) {
    out.log_value = log_gamma_[0];
    out.last_index = 0;
    return out;
  }
  const std::vector<double> lt = log_terms(log_gamma_, std::log(r), last_index);
  const double log_tail = log_tail_after(lt, last_index);
  if (std::isnan(log_tail)) throw_uncertified(r, last_index);
  out.log_value = log_sum_exp(lt);
  out.log_tail_bound = log_tail;
  out.rel_tail = std::exp(log_tail - out.log_value);
  out.last_index = last_index;
  return out;
}

int GenFunEval::certified_truncation(double r, double rel_tol) const {
  check_argument(r);
  if (r == 0.0) return 0;
  const int last = n_max();
  const std::vector<double> lt = log_terms(log_gamma_, std::log(r), last);
  const double log_tol = std::log(rel_tol);
  LogSumAccumulator partial;
  for (int n = 0; n <= last; ++n) {
    partial.add(lt[n]);
    if (n < 2) continue;
    const double log_tail = log_tail_after(lt, n);
    if (!std::isnan(log_tail) && log_tail - partial.value() <= log_tol) return n;
  }
  throw TailNotCertified("no truncation <= " + std::to_string(last) +
                         " reaches relative tail " + format_double(rel_tol) +
                         " at r = " + format_double(r));
}

double GenFunEval::log_derivative(double r) const {
  check_argument(r);
  if (r == 0.0) return 0.0;
  const int last = n_max();
  const std::vector<double> lt = log_terms(log_gamma_, std::log(r), last);
  if (std::isnan(log_tail_after(lt, last))) throw_uncertified(r, last);
  const double m = *std::max_element(lt.begin(), lt.end());
  double num = 0.0;
  double den = 0.0;
  for (int n = 0; n <= last; ++n) {
    const double w = std::exp(lt[n] - m);
    num += n * w;
    den += w;
  }
  return num / den;
}

InfRatioResult inf_ratio(const GenFunEval& gf, int n) {
  if (n < 0) throw ValidationError("inf_ratio needs n >= 0");
  InfRatioResult res;
  res.n = n;
  if (n == 0) {
    // G is nondecreasing with G(0) = 1: the infimum is the limit r -> 0+.
    res.boundary = true;
    res.log_inf = gf.log_gamma(0);
    return res;
  }
  if (n > gf.n_max()) throw ValidationError("inf_ratio: n exceeds the stored coefficients");

  auto h = [&](double t) { return gf.eval(std::exp(t)).log_value - n * t; };
  auto dh = [&](double t) { return gf.log_derivative(std::exp(t)) - n; };

  // Start where consecutive terms n-1 and n balance.
  double t0 = gf.log_gamma(n - 1) - gf.log_gamma(n);
  if (!std::isfinite(t0)) t0 = 0.0;

  double lo = t0;
  double hi = t0;
  int iterations = 0;
  const double d0 = dh(t0);
  if (d0 < 0.0) {
    double step = 0.25;
    for (;;) {
      if (++iterations > kInfRatioMaxIterations) {
        throw TailNotCertified("inf_ratio: could not bracket the minimizer for n = " + std::to_string(n));
      }
      const double t = lo + step;
      double d = 0.0;
      try {
        d = dh(t);
      } catch (const TailNotCertified&) {
        // Overshot into the uncertified region; approach more slowly.
        step *= 0.5;
        if (step < 1e-9) throw;
        continue;
      }
      if (d < 0.0) {
        lo = t;
        step *= 2.0;
      } else {
        hi = t;
        break;
      }
    }
  } else if (d0 > 0.0) {
    double step = 0.25;
    for (;;) {
      if (++iterations > kInfRatioMaxIterations) {
        throw TailNotCertified("inf_ratio: could not bracket the minimizer for n = " + std::to_string(n));
      }
      const double t = hi - step;
      if (dh(t) > 0.0) {
        hi = t;
        step *= 2.0;
      } else {
        lo = t;
        break;
      }
    }
  }

  // Golden-section search on [lo, hi].
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double hc = h(c);
  double hd = h(d);
  int gs_iterations = 0;
  while (b - a > kInfRatioTolerance && gs_iterations < kInfRatioMaxIterations) {
    ++gs_iterations;
    if (hc <= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kInvPhi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kInvPhi * (b - a);
      hd = h(d);
    }
  }
  const double t_star = hc <= hd ? c : d;
  res.r_star = std::exp(t_star);
  res.log_inf = std::min(hc, hd);
  res.iterations = iterations + gs_iterations;
  return res;
}

double log_theta(const WeightSequence& ws, const GenFunEval& inverse_gf, int n) {
  if (inverse_gf.mode() != EgfMode::one_over_alpha) {
    throw ValidationError("log_theta needs the G_{1/alpha} evaluator");
  }
  if (n < 0 || n > ws.n_max()) throw ValidationError("log_theta: n outside the stored sequence");
  if (n == 0) return 0.0;
  return log_factorial(n) + ws.log_alpha(n) + inf_ratio(inverse_gf, n).log_inf;
}

double log_theta(const WeightSequence& ws, int n) {
  return log_theta(ws, GenFunEval(ws, EgfMode::one_over_alpha), n);
}

double log_b1_quantity(const WeightSequence& ws, const GenFunEval& gf, int n) {
  if (gf.mode() != EgfMode::alpha) throw ValidationError("log_b1_quantity needs the G_alpha evaluator");
  if (n == 0) return 0.0;
  return log_factorial(n) - ws.log_alpha(n) + inf_ratio(gf, n).log_inf;
}

double bell_closed_form(int k, double r) {
  if (k < 2) throw ValidationError("bell_closed_form needs k >= 2");
  check_argument(r);
  constexpr double kMaxExpArg = 709.0;
  double top = r;
  double base = 0.0;
  for (int i = 1; i < k; ++i) {
    if (top > kMaxExpArg) {
      throw OverflowError("exp_" + std::to_string(k - 1) + "(" + format_double(r) +
                          ") exceeds double range");
    }
    top = std::exp(top);
    base = std::exp(base);
  }
  return top - base;
}

namespace {

// (1 + u) ln(1 + u) - u without cancellation near u = 0.
double entropy_like(double u) {
  if (std::abs(u) > 0.05) return (1.0 + u) * std::log1p(u) - u;
  double out = 0.0;
  double power = u * u;
  for (int k = 2; k < 30; ++k) {
    const double term = power / (static_cast<double>(k) * (k - 1));
    out += (k % 2 == 0) ? term : -term;
    if (std::abs(term) < 1e-20 * std::abs(out)) break;
    power *= u;
  }
  return out;
}

// Continuous term exponent around the peak: g(delta) = c D(R + delta) with
// D(x) = x ln R - R - lnGamma(x + 1), written so that no O(R) quantity cancels.
// Valid for x >= 1e5, where the Stirling remainder truncation is below 1e-30.
struct PeakFrame {
  double c;
  double R;

  double g(double delta) const {
    const double u = delta / R;
    const double x = R + delta;
    const double stirling = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
    return c * (-0.5 * std::log(2.0 * std::numbers::pi * R) - R * entropy_like(u) - 0.5 * std::log1p(u) -
                stirling);
  }
  // g' = c (ln R - psi(x + 1)).
  double dg(double delta) const {
    const double x = R + delta;
    return c * (-std::log1p(delta / R) - 1.0 / (2.0 * x) + 1.0 / (12.0 * x * x));
  }
  // g'' = -c psi'(x + 1).
  double d2g(double delta) const {
    const double x = R + delta;
    return -c * (1.0 / x - 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x * x * x));
  }
};

StreamedEgfValue euler_maclaurin_egf(double c, double log_r) {
  const double log_R = log_r / c;
  const PeakFrame frame{c, std::exp(log_R)};
  const double R = frame.R;
  const double sigma = std::sqrt(R / c);
  const double g0 = frame.g(0.0);
  constexpr double kDrop = 80.0;

  double V = 8.0;
  while (frame.g(V * sigma) - g0 > -kDrop || frame.g(-V * sigma) - g0 > -kDrop) V += 1.0;
  const double A = std::floor(R - V * sigma);
  const double B = std::ceil(R + V * sigma);
  const double da = A - R;
  const double db = B - R;

  // Composite trapezoid in delta on [da, db] at two resolutions.
  auto integrate = [&](int intervals, double* abs_f2) {
    const double h = (db - da) / intervals;
    double sum = 0.0;
    double sum_f2 = 0.0;
    for (int i = 0; i <= intervals; ++i) {
      const double delta = da + h * i;
      const double f = std::exp(frame.g(delta) - g0);
      const double w = (i == 0 || i == intervals) ? 0.5 : 1.0;
      sum += w * f;
      const double slope = frame.dg(delta);
      sum_f2 += w * f * std::abs(frame.d2g(delta) + slope * slope);
    }
    if (abs_f2) *abs_f2 = sum_f2 * h;
    return sum * h;
  };
  const int intervals = 32 * static_cast<int>(2.0 * V);
  double int_abs_f2 = 0.0;
  const double fine = integrate(intervals, &int_abs_f2);
  const double coarse = integrate(intervals / 2, nullptr);

  const double fa = std::exp(frame.g(da) - g0);
  const double fb = std::exp(frame.g(db) - g0);
  const double dfa = fa * frame.dg(da);
  const double dfb = fb * frame.dg(db);
  const double value = fine + 0.5 * (fa + fb) + (dfb - dfa) / 12.0;

  // Outer tails: ratios of successive terms are bounded by exp(g') at the endpoints.
  const double q = std::exp(frame.dg(db));
  const double s = std::exp(-frame.dg(da));
  const double tails = fb * q / (1.0 - q) + fa * s / (1.0 - s);
  const double error = int_abs_f2 / 12.0 + std::abs(fine - coarse) + tails;

  StreamedEgfValue out;
  out.method = StreamedEgfValue::Method::euler_maclaurin;
  out.log_excess = g0 + std::log(value);
  out.log_value = c * R + out.log_excess;
  out.rel_tail = error / value;
  const double eps = std::numeric_limits<double>::epsilon();
  out.log_rounding = 4.0 * eps * c * R;
  out.excess_rounding = 64.0 * eps * (kDrop + std::abs(g0) + 1.0);
  out.peak_index = R;
  out.terms_summed = 2 * intervals + 2;
  return out;
}

}  // namespace

StreamedEgfValue factorial_power_egf_euler_maclaurin(double beta, EgfMode mode, double r) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
  check_argument(r);
  const double c = mode == EgfMode::alpha ? 1.0 - beta : 1.0 + beta;
  const double log_r = std::log(r);
  if (!(log_r / c >= std::log(1e5))) {
    throw ValidationError("the Euler-Maclaurin path needs a peak index >= 1e5");
  }
  return euler_maclaurin_egf(c, log_r);
}

StreamedEgfValue factorial_power_egf(double beta, EgfMode mode, double r, long long term_budget) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
  check_argument(r);
  StreamedEgfValue out;
  if (r == 0.0) return out;

  const double c = mode == EgfMode::alpha ? 1.0 - beta : 1.0 + beta;
  const double log_r = std::log(r);
  const double R = std::exp(log_r / c);
  if (!std::isfinite(R)) {
    throw TailNotCertified("factorial_power_egf: peak index overflows at r = " + format_double(r));
  }
  if (R / c >= kEulerMaclaurinMinVariance) return euler_maclaurin_egf(c, log_r);

  // Terms increase while r / n^c >= 1.
  const double peak = std::floor(R);
  out.peak_index = peak;
  auto log_term = [&](double n) { return n * log_r - c * std::lgamma(n + 1.0); };
  const double lt_peak = log_term(peak);
  const double log_cutoff = std::log(1e-16);
  constexpr int kReanchor = 1024;
  double sum = 1.0;  // in units of the peak term
  long long terms = 1;
  auto charge = [&]() {
    if (++terms > term_budget) {
      throw TailNotCertified("factorial_power_egf: window exceeds " + std::to_string(term_budget) +
                             " terms at r = " + format_double(r));
    }
  };

  // Right side: stop once t_n q / (1 - q) drops below the cutoff, q = r / (n+1)^c.
  double right_tail = 0.0;
  {
    double n = peak;
    double lt = lt_peak;
    for (long long step = 1;; ++step) {
      const double log_q = log_r - c * std::log(n + 1.0);
      if (log_q < 0.0) {
        const double log_bound = lt + log_q - std::log(-std::expm1(log_q));
        if (log_bound - lt_peak < log_cutoff) {
          right_tail = std::exp(log_bound - lt_peak);
          break;
        }
      }
      n += 1.0;
      lt = step % kReanchor == 0 ? log_term(n) : lt + log_q;
      sum += std::exp(lt - lt_peak);
      charge();
    }
  }
  // Left side: t_{n-1} / t_n = n^c / r =: s.
  double left_tail = 0.0;
  {
    double n = peak;
    double lt = lt_peak;
    for (long long step = 1; n > 0.0; ++step) {
      const double log_s = c * std::log(n) - log_r;
      if (log_s < 0.0) {
        const double log_bound = lt + log_s - std::log(-std::expm1(log_s));
        if (log_bound - lt_peak < log_cutoff) {
          left_tail = std::exp(log_bound - lt_peak);
          break;
        }
      }
      n -= 1.0;
      lt = step % kReanchor == 0 ? log_term(n) : lt + log_s;
      sum += std::exp(lt - lt_peak);
      charge();
    }
  }
  out.log_value = lt_peak + std::log(sum);
  out.rel_tail = (left_tail + right_tail) / sum;
  out.terms_summed = terms;
  const double eps = std::numeric_limits<double>::epsilon();
  out.log_rounding = 8.0 * eps * std::max(std::abs(peak * log_r), c * std::lgamma(peak + 1.0)) +
                     eps * std::sqrt(static_cast<double>(terms));
  out.log_excess = out.log_value - c * R;
  out.excess_rounding = out.log_rounding + 2.0 * eps * c * R;
  return out;
}

}  // namespace cks
