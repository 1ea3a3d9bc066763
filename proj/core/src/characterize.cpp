#include "cks/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cks/conditions.hpp"
#include "cks/errors.hpp"
#include "cks/logmath.hpp"

namespace cks {

std::string_view to_string(BoundMode mode) { return mode == BoundMode::test ? "test" : "generalized"; }

BoundMode bound_mode_from_string(std::string_view name) {
  if (name == "test") return BoundMode::test;
  if (name == "generalized") return BoundMode::generalized;
  throw ValidationError("unknown bound mode '" + std::string(name) + "'");
}

int ladder_steps(double a, double rho) {
  if (!(a > 0.0)) throw ValidationError("growth constant a must be > 0");
  if (a <= 1.0 + 1e-15) {
    // Shrinking case handled by callers; here we only need a rho^{2s} <= 1.
    return 0;
  }
  // Smallest s with s >= ln a / (2 ln(1/rho)); the 1e-12 absorbs rounding at exact powers.
  return static_cast<int>(std::ceil(std::log(a) / (2.0 * std::log(1.0 / rho)) - 1e-12));
}

namespace {

// Smallest s >= 0 with rho^{2s} <= a for a < 1.
int shrink_steps(double a, double rho) {
  if (!(a > 0.0)) throw ValidationError("growth constant a must be > 0");
  if (a >= 1.0) return 0;
  return static_cast<int>(std::ceil(std::log(a) / (2.0 * std::log(rho)) - 1e-12));
}

}  // namespace

RigorousBound rigorous_K_test(const ChaosExpansion& phi, double a, int p, const WeightSequence& ws) {
  RigorousBound out;
  out.q = p + shrink_steps(a, phi.model().rho());
  out.spec = {phi_norm(phi, out.q, ws, false), a, p, BoundMode::test};
  return out;
}

RigorousBound rigorous_K_generalized(const ChaosExpansion& Phi, double a, int p, const WeightSequence& ws) {
  RigorousBound out;
  out.q = p - shrink_steps(a, Phi.model().rho());
  out.spec = {phi_norm(Phi, out.q, ws, true), a, p, BoundMode::generalized};
  return out;
}

RigorousBound normalize_constants(const GrowthBoundSpec& spec, const SpaceModel& model) {
  const int steps = ladder_steps(spec.a, model.rho());
  RigorousBound out;
  out.q = spec.mode == BoundMode::generalized ? spec.p + steps : spec.p - steps;
  out.spec = {spec.K, 1.0, out.q, spec.mode};
  return out;
}

double log_growth_rhs(const GrowthBoundSpec& spec, const GenFunEval& gf, const SpaceModel& model,
                      const CPoint& xi) {
  const int index = spec.mode == BoundMode::generalized ? spec.p : -spec.p;
  const double x = spec.a * std::pow(norm_p(model, xi, index), 2);
  return std::log(spec.K) + 0.5 * gf.eval(x).log_value;
}

namespace {

CPoint scaled(const CPoint& dir, Complex z) {
  CPoint out = dir;
  for (Complex& e : out.entries) e *= z;
  return out;
}

double log_ratio_at(const ChaosExpansion& phi, const GrowthBoundSpec& spec, const GenFunEval& gf,
                    const CPoint& xi) {
  const double lhs = std::log(std::abs(s_transform(phi, xi)));
  const double rhs = log_growth_rhs(spec, gf, phi.model(), xi);
  if (lhs == kNegInf) return kNegInf;
  if (rhs == kNegInf) return std::numeric_limits<double>::infinity();
  return lhs - rhs;
}

}  // namespace

VerificationReport verify_growth(const ChaosExpansion& phi, const GrowthBoundSpec& spec,
                                 const WeightSequence& ws, const GridSpec& grid) {
  if (spec.K < 0.0 || !std::isfinite(spec.K) || spec.a < 0.0) {
    throw ValidationError("growth bound needs finite K >= 0 and a >= 0");
  }
  const SpaceModel& model = phi.model();
  const GenFunEval gf(ws, spec.mode == BoundMode::generalized ? EgfMode::alpha : EgfMode::one_over_alpha);
  const int index = spec.mode == BoundMode::generalized ? spec.p : -spec.p;

  VerificationReport rep;
  rep.bound = spec;
  rep.grid = grid;
  double best = kNegInf;
  CPoint best_point{std::vector<Complex>(static_cast<std::size_t>(model.dim()))};
  auto consider = [&](const CPoint& xi) {
    const double lr = log_ratio_at(phi, spec, gf, xi);
    ++rep.points_evaluated;
    if (lr > best) {
      best = lr;
      best_point = xi;
    }
  };

  consider(best_point);  // origin
  std::mt19937_64 rng(grid.seed);
  for (int d = 0; d < grid.directions; ++d) {
    CPoint dir = random_point(model.dim(), rng);
    const double nrm = norm_p(model, dir, index);
    for (Complex& e : dir.entries) e /= nrm;
    for (int i = 1; i <= grid.radii; ++i) {
      const double radius = grid.max_radius * i / grid.radii;
      for (int k = 0; k < grid.phases; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid.phases;
        consider(scaled(dir, std::polar(radius, theta)));
      }
    }
  }

  if (grid.refine && std::isfinite(best)) {
    // Compass search over the 2d real coordinates of xi.
    auto objective = [&](const CPoint& xi) {
      try {
        return log_ratio_at(phi, spec, gf, xi);
      } catch (const TailNotCertified&) {
        return kNegInf;
      }
    };
    CPoint x = best_point;
    double fx = best;
    double step = 0.1 * std::max(norm_p(model, x, index), 0.5);
    int evals = 0;
    constexpr int kMaxEvals = 6000;
    while (step > 1e-7 && evals < kMaxEvals) {
      bool improved = false;
      for (int j = 0; j < model.dim() && !improved; ++j) {
        for (const Complex delta : {Complex{step, 0}, Complex{-step, 0}, Complex{0, step}, Complex{0, -step}}) {
          CPoint y = x;
          y.entries[j] += delta;
          const double fy = objective(y);
          ++evals;
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    rep.points_evaluated += evals;
    if (fx > best) {
      best = fx;
      best_point = x;
    }
  }

  rep.max_ratio = std::exp(best);
  rep.witness = best_point;
  rep.pass = rep.max_ratio <= 1.0 + kGrowthPassSlack;
  return rep;
}

std::vector<Complex> extract_diag_coefficients(const std::function<Complex(Complex)>& along_ray, int N,
                                               double R, int M) {
  if (N < 0) throw ValidationError("extraction degree must be >= 0");
  if (M <= N) throw ValidationError("need more sample points than the degree (M > N)");
  if (!(R > 0.0)) throw ValidationError("sampling radius must be > 0");
  std::vector<Complex> samples(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    samples[m] = along_ray(std::polar(R, 2.0 * std::numbers::pi * m / M));
  }
  // Plain DFT: M is desk-scale.
  std::vector<Complex> bins(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    Complex acc{};
    for (int m = 0; m < M; ++m) {
      acc += samples[m] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(k) * m) % M) / M);
    }
    bins[k] = acc / static_cast<double>(M);
  }
  double total = 0.0;
  double residual = 0.0;
  for (int k = 0; k < M; ++k) {
    total += std::norm(bins[k]);
    if (k > N) residual += std::norm(bins[k]);
  }
  if (total > 0.0 && residual > kDegreeResidualTolerance * total) {
    throw DegreeOverflow("energy above degree " + std::to_string(N) + " is " +
                         format_double(residual / total) + " of the total");
  }
  std::vector<Complex> out(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) out[n] = bins[n] / std::pow(R, n);
  return out;
}

std::vector<Complex> extract_diag_coefficients(const ChaosExpansion& phi, const CPoint& xi, double R, int M) {
  return extract_diag_coefficients([&](Complex z) { return s_transform(phi, scaled(xi, z)); },
                                   phi.max_degree(), R, M);
}

Complex polarized_coefficient(const std::function<Complex(const CPoint&)>& F, std::span<const CPoint> xis,
                              int N, int M) {
  const int n = static_cast<int>(xis.size());
  if (n > 4) throw ValidationError("polarized_coefficient supports at most 4 directions");
  if (M <= N) throw ValidationError("need more sample points than the degree (M > N)");
  if (n == 0) throw ValidationError("polarized_coefficient needs at least one direction");
  const int d = xis.front().dim();
  for (const CPoint& xi : xis) {
    if (xi.dim() != d) throw ValidationError("directions must share a dimension");
  }
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(M);

  std::vector<Complex> roots(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / M);

  // Samples on the torus, flattened with axis 0 fastest.
  std::vector<Complex> grid(total);
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    CPoint point{std::vector<Complex>(static_cast<std::size_t>(d))};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) point.entries[j] += roots[digit[i]] * xis[i][j];
    }
    grid[flat] = F(point);
    for (int i = 0; i < n; ++i) {
      if (++digit[i] < M) break;
      digit[i] = 0;
    }
  }
  // Separable DFT, one axis at a time.
  std::size_t stride = 1;
  std::vector<Complex> line(static_cast<std::size_t>(M));
  for (int axis = 0; axis < n; ++axis) {
    for (std::size_t base = 0; base < total; ++base) {
      if ((base / stride) % M != 0) continue;
      for (int m = 0; m < M; ++m) line[m] = grid[base + m * stride];
      for (int k = 0; k < M; ++k) {
        Complex acc{};
        for (int m = 0; m < M; ++m) acc += line[m] * std::conj(roots[(k * m) % M]);
        grid[base + k * stride] = acc / static_cast<double>(M);
      }
    }
    stride *= static_cast<std::size_t>(M);
  }
  // Residual: bins whose total frequency exceeds N.
  double energy = 0.0;
  double residual = 0.0;
  std::fill(digit.begin(), digit.end(), 0);
  std::size_t target = 0;
  stride = 1;
  for (int i = 0; i < n; ++i) {
    target += stride;
    stride *= static_cast<std::size_t>(M);
  }
  for (std::size_t flat = 0; flat < total; ++flat) {
    int freq = 0;
    for (int i = 0; i < n; ++i) freq += digit[i];
    energy += std::norm(grid[flat]);
    if (freq > N) residual += std::norm(grid[flat]);
    for (int i = 0; i < n; ++i) {
      if (++digit[i] < M) break;
      digit[i] = 0;
    }
  }
  if (energy > 0.0 && residual > kDegreeResidualTolerance * energy) {
    throw DegreeOverflow("energy above total degree " + std::to_string(N) + " is " +
                         format_double(residual / energy) + " of the total");
  }
  return grid[target] / std::exp(log_factorial(n));
}

Complex polarized_coefficient(const ChaosExpansion& phi, std::span<const CPoint> xis, int M) {
  return polarized_coefficient([&](const CPoint& xi) { return s_transform(phi, xi); }, xis,
                               phi.max_degree(), M);
}

double lemma1_log_coefficient_bound(const GrowthBoundSpec& spec, const GenFunEval& inverse_gf,
                                    const SpaceModel& model, int n, std::span<const CPoint> directions) {
  if (spec.mode != BoundMode::test) throw ValidationError("the coefficient bound needs a test-mode spec");
  if (inverse_gf.mode() != EgfMode::one_over_alpha) throw ValidationError("needs the G_{1/alpha} evaluator");
  if (n < 0) throw ValidationError("degree must be >= 0");
  const double log_k2 = 2.0 * std::log(spec.K);
  if (n == 0) return log_k2;
  if (static_cast<int>(directions.size()) != n) throw ValidationError("need one direction per degree");
  if (spec.a == 0.0) return kNegInf;
  double out = log_k2 - std::log(2.0 * std::numbers::pi) + n * std::log(spec.a) + 2.0 * n +
               inf_ratio(inverse_gf, n).log_inf;
  for (const CPoint& xi : directions) out += 2.0 * std::log(norm_p(model, xi, -spec.p));
  return out;
}

double lemma1_log_coefficient_bound(const GrowthBoundSpec& spec, const WeightSequence& ws,
                                    const SpaceModel& model, int n, std::span<const CPoint> directions) {
  return lemma1_log_coefficient_bound(spec, GenFunEval(ws, EgfMode::one_over_alpha), model, n, directions);
}

Lemma1Admissibility lemma1_admissibility(double a, double hs_norm_pq, double limsup) {
  Lemma1Admissibility out;
  out.hs_norm = hs_norm_pq;
  out.limsup = limsup;
  out.product = a * std::exp(2.0) * hs_norm_pq * hs_norm_pq * limsup;
  out.admissible = out.product < 1.0;
  return out;
}

Window default_limsup_window(const WeightSequence& ws) {
  return {1, std::max(4, std::min(300, ws.n_max() / 2))};
}

Lemma1NormBound lemma1_norm_bound(const GrowthBoundSpec& spec, const WeightSequence& ws,
                                  const SpaceModel& model, int q, std::optional<double> limsup) {
  if (spec.mode != BoundMode::test) throw ValidationError("the norm bound needs a test-mode spec");
  if (q < 0 || q > spec.p) throw ValidationError("lemma1_norm_bound needs 0 <= q <= p");
  const double hs = hs_norm(model, spec.p, q);
  const double L = limsup ? *limsup : *estimate_limsup(ws, Condition::B1t, default_limsup_window(ws)).limsup_estimate;
  Lemma1NormBound out;
  out.admissibility = lemma1_admissibility(spec.a, hs, L);
  out.admissibility.window_limited = !limsup.has_value();
  if (!out.admissibility.admissible) {
    throw NotAdmissible("a e^2 ||i_{p,q}||^2 L = " + format_double(out.admissibility.product) +
                        " >= 1; shrink a or raise p");
  }
  const double log_k2 = 2.0 * std::log(spec.K);
  if (spec.a == 0.0 || log_k2 == kNegInf) {
    out.log_rhs = log_k2;
    out.terms = 1;
    return out;
  }
  const double log_x = std::log(spec.a) + 2.0 + 2.0 * std::log(hs);
  const GenFunEval inverse_gf(ws, EgfMode::one_over_alpha);
  LogSumAccumulator series;  // sum_{n>=1} Theta(n) x^n
  double prev = kNegInf;
  double prev_step = std::numeric_limits<double>::infinity();
  const double log_cutoff = std::log(1e-17);
  bool settled = false;
  int n = 1;
  for (; n < ws.n_max(); ++n) {
    const double term = log_theta(ws, inverse_gf, n) + n * log_x;
    series.add(term);
    const double step = term - prev;
    if (n >= 3 && step < 0.0 && step <= prev_step + 1e-12) {
      const double log_tail = term + step - std::log(-std::expm1(step));
      if (log_tail - series.value() < log_cutoff) {
        out.rel_tail = std::exp(log_tail - series.value());
        LogSumAccumulator with_tail;
        with_tail.add(series.value());
        with_tail.add(log_tail);
        series = with_tail;
        settled = true;
        break;
      }
    }
    prev = term;
    prev_step = step;
  }
  if (!settled) throw TailNotCertified("reconstruction series did not settle within n_max = " + std::to_string(ws.n_max()));
  out.terms = n + 1;
  LogSumAccumulator total;
  total.add(log_k2);
  total.add(log_k2 - std::log(2.0 * std::numbers::pi) + series.value());
  out.log_rhs = total.value();
  return out;
}

Lemma1Report run_lemma1_check(const ChaosExpansion& phi, const WeightSequence& ws, double a, int p, int q,
                              int n_directions, std::uint64_t seed, std::optional<double> limsup) {
  const SpaceModel& model = phi.model();
  const int N = phi.max_degree();
  const int M = N + 2;
  Lemma1Report rep;
  rep.q = q;
  rep.bound = rigorous_K_test(phi, a, p, ws);
  const GenFunEval inverse_gf(ws, EgfMode::one_over_alpha);

  std::mt19937_64 rng(seed);
  std::vector<CPoint> dirs;
  for (int i = 0; i < n_directions; ++i) dirs.push_back(random_point(model.dim(), rng));

  double worst_slack = std::numeric_limits<double>::infinity();
  auto check_bound = [&](int n, std::span<const CPoint> xs, Complex coef) {
    const double bound = lemma1_log_coefficient_bound(rep.bound.spec, inverse_gf, model, n, xs);
    const double lhs = 2.0 * std::log(std::abs(coef));
    if (lhs == kNegInf) return;
    worst_slack = std::min(worst_slack, bound - lhs);
    // Relative slack for rounding in coefficients that sit exactly on the bound.
    if (lhs > bound + 1e-9) rep.coefficient_bounds_hold = false;
  };

  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const CPoint& xi = dirs[i];
    const std::vector<Complex> diag = extract_diag_coefficients(phi, xi, 1.0, M);
    for (int n = 0; n <= N; ++n) {
      const Complex exact = apply_diagonal(phi.tensor(n), xi);
      rep.max_diag_error = std::max(rep.max_diag_error, std::abs(diag[n] - exact));
      const std::vector<CPoint> same(static_cast<std::size_t>(n), xi);
      check_bound(n, same, diag[n]);
    }
    for (int n = 1; n <= std::min(N, 4); ++n) {
      std::vector<CPoint> xs;
      for (int k = 0; k < n; ++k) xs.push_back(dirs[(i + k) % dirs.size()]);
      const Complex extracted = polarized_coefficient(phi, xs, M);
      const Complex exact = apply_polarized(phi.tensor(n), xs);
      rep.max_polarized_error = std::max(rep.max_polarized_error, std::abs(extracted - exact));
      check_bound(n, xs, extracted);
    }
  }
  rep.worst_coefficient_log_slack = worst_slack;
  rep.norm_bound = lemma1_norm_bound(rep.bound.spec, ws, model, q, limsup);
  rep.log_norm_sq = log_phi_norm_sq(phi, q, ws, false);
  rep.norm_bound_holds = rep.log_norm_sq <= rep.norm_bound.log_rhs + 1e-12;
  return rep;
}

KsEnvelope ks_envelopes(double beta, double r, long long term_budget) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("ks_envelopes needs 0 < beta < 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("ks_envelopes needs r > 0");
  KsEnvelope out;
  out.beta = beta;
  out.r = r;
  const double ln2 = std::numbers::ln2;
  const double lr = std::log(r);
  const double cm = 1.0 - beta;
  const double cp = 1.0 + beta;
  out.log_lower_e = cm * std::exp(lr / cm);
  out.log_upper_e = beta * ln2 + cm * std::exp(beta / cm * ln2 + lr / cm);
  out.log_lower_f = -beta * ln2 + cp * std::exp(-beta / cp * ln2 + lr / cp);
  out.log_upper_f = cp * std::exp(lr / cp);
  const StreamedEgfValue ga = factorial_power_egf(beta, EgfMode::alpha, r, term_budget);
  const StreamedEgfValue gi = factorial_power_egf(beta, EgfMode::one_over_alpha, r, term_budget);
  out.log_g_alpha = ga.log_value;
  out.log_g_inverse = gi.log_value;
  out.rel_tail = std::max(ga.rel_tail, gi.rel_tail);
  out.log_rounding = std::max(ga.log_rounding, gi.log_rounding);

  // Compare in the frame shifted by c R (c = 1 -+ beta, R = r^{1/c}), where the
  // envelope gaps are O(1) numbers instead of differences of ~c R magnitudes.
  const double ref_e = cm * std::exp(lr / cm);
  const double ref_f = cp * std::exp(lr / cp);
  const double upper_e = beta * ln2 + ref_e * std::expm1(beta / cm * ln2);
  const double lower_f = -beta * ln2 + ref_f * std::expm1(-beta / cp * ln2);
  // A verdict counts only if it survives the full error budget.
  auto holds = [](double lo, const StreamedEgfValue& g, double hi) {
    const double slack = g.excess_rounding + 1e-14;
    return lo <= g.log_excess + std::log1p(-g.rel_tail) - slack &&
           g.log_excess + std::log1p(g.rel_tail) + slack <= hi;
  };
  out.sandwich_e = holds(0.0, ga, upper_e);
  out.sandwich_f = holds(lower_f, gi, 0.0);
  return out;
}

double iterated_log(int j, double x) {
  if (j < 1) throw ValidationError("iterated_log needs j >= 1");
  double v = x;
  for (int i = 0; i < j; ++i) v = std::log(std::max(v, std::numbers::e));
  return v;
}

std::vector<BellEnvelopeRow> bell_envelope_scan(int k, std::span<const double> r_grid, double a, int n_max) {
  if (k < 2) throw ValidationError("bell_envelope_scan needs k >= 2");
  const WeightSequence ws = make_bell(k, n_max);
  const GenFunEval inverse_gf(ws, EgfMode::one_over_alpha);
  std::vector<BellEnvelopeRow> rows;
  for (double r : r_grid) {
    BellEnvelopeRow row;
    row.r = r;
    const EgfValue g = inverse_gf.eval(r);
    row.log_g_inverse = g.log_value;
    row.rel_tail = g.rel_tail;
    row.lhs = 0.5 * g.log_value;
    const double ar = a * r;
    row.rhs = std::sqrt(ar * iterated_log(k - 1, ar));
    row.ratio = r == 0.0 ? 1.0 : row.lhs / row.rhs;
    rows.push_back(row);
  }
  return rows;
}

CPoint random_point(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CPoint out{std::vector<Complex>(static_cast<std::size_t>(d))};
  for (Complex& e : out.entries) e = {normal(rng), normal(rng)};
  return out;
}

ChaosExpansion random_sparse_expansion(const SpaceModel& model, int max_degree, int nnz, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> degree_dist(0, max_degree);
  std::uniform_int_distribution<int> coord(0, model.dim() - 1);
  ChaosExpansion out(model, max_degree);
  for (int i = 0; i < nnz; ++i) {
    const int n = degree_dist(rng);
    MultiIndex idx(static_cast<std::size_t>(n));
    for (int& j : idx) j = coord(rng);
    out.set(std::move(idx), {normal(rng), normal(rng)});
  }
  return out;
}

}  // namespace cks
