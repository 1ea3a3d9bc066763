#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "cks/conditions.hpp"
#include "cks/fockmodel.hpp"
#include "cks/genfun.hpp"
#include "cks/weights.hpp"

namespace cks {

/// generalized: |F(xi)| <= K G_alpha(a |xi|_p^2)^{1/2}
/// test:        |F(xi)| <= K G_{1/alpha}(a |xi|_{-p}^2)^{1/2}
enum class BoundMode { generalized, test };

std::string_view to_string(BoundMode mode);
BoundMode bound_mode_from_string(std::string_view name);

struct GrowthBoundSpec {
  double K = 0.0;
  double a = 1.0;
  int p = 0;
  BoundMode mode = BoundMode::test;
};

/// A growth bound together with the ladder index q whose norm supplied K.
struct RigorousBound {
  GrowthBoundSpec spec;
  int q = 0;
};

/// Smallest s >= 0 with a rho^{2s} <= 1 (0 when a <= 1).
int ladder_steps(double a, double rho);

/// Test-function bound: q = p for a >= 1, else q = p + ceil(ln a / (2 ln rho)),
/// and K = ||phi||_{q,alpha}. Valid for every xi by Cauchy-Schwarz against the
/// renormalized exponential, since |xi|_{-q} <= rho^{q-p} |xi|_{-p} <= sqrt(a) |xi|_{-p}.
RigorousBound rigorous_K_test(const ChaosExpansion& phi, double a, int p, const WeightSequence& ws);

/// Generalized-function bound: q = p - (steps for a < 1) and K = ||Phi||_{-q,1/alpha},
/// using |xi|_q <= rho^{p-q} |xi|_p.
RigorousBound rigorous_K_generalized(const ChaosExpansion& Phi, double a, int p, const WeightSequence& ws);

/// Rewrites (K, a, p) as an equivalent-or-weaker bound with a = 1 at index q.
/// generalized: q = p + steps(a); test: q = p - steps(a).
RigorousBound normalize_constants(const GrowthBoundSpec& spec, const SpaceModel& model);

/// Grid of complex-phase rays: each random direction is normalized in the
/// norm the bound uses, then scaled by R e^{i theta}.
struct GridSpec {
  int directions = 10;
  int phases = 16;
  int radii = 8;
  double max_radius = 2.0;
  std::uint64_t seed = 20240601;
  /// Pattern-search refinement from the worst grid point.
  bool refine = true;
};

inline constexpr double kGrowthPassSlack = 1e-10;

struct VerificationReport {
  GrowthBoundSpec bound;
  GridSpec grid;
  double max_ratio = 0.0;
  CPoint witness;
  bool pass = true;
  int points_evaluated = 0;
};

/// ln of the right-hand side K G(a |xi|^2)^{1/2} at xi.
double log_growth_rhs(const GrowthBoundSpec& spec, const GenFunEval& gf, const SpaceModel& model,
                      const CPoint& xi);

/// Sup over the grid (and refinement) of |S phi(xi)| / RHS(xi). Propagates
/// TailNotCertified from grid points; refinement probes that fail to certify are skipped.
VerificationReport verify_growth(const ChaosExpansion& phi, const GrowthBoundSpec& spec,
                                 const WeightSequence& ws, const GridSpec& grid = {});

inline constexpr double kDegreeResidualTolerance = 1e-8;

/// <f_n, xi^{(x)n}> for n <= N from samples of z -> F(z xi) on |z| = R:
/// (1/M) sum_m F(R w^m) w^{-nm} / R^n, w = e^{2 pi i / M}. Needs M > N.
/// Throws DegreeOverflow if the relative energy in frequencies above N exceeds 1e-8.
std::vector<Complex> extract_diag_coefficients(const std::function<Complex(Complex)>& along_ray,
                                               int N, double R, int M);

/// Same, with F = S phi along the ray through xi.
std::vector<Complex> extract_diag_coefficients(const ChaosExpansion& phi, const CPoint& xi, double R,
                                               int M);

/// <f_n, xi_1 (x)^ ... (x)^ xi_n> from the z_1...z_n coefficient of F(sum z_i xi_i)
/// (n-dimensional DFT on roots of unity) divided by n!. N bounds the total degree of F;
/// needs M > N and n <= 4.
Complex polarized_coefficient(const std::function<Complex(const CPoint&)>& F,
                              std::span<const CPoint> xis, int N, int M);

Complex polarized_coefficient(const ChaosExpansion& phi, std::span<const CPoint> xis, int M);

/// ln of K^2/(2 pi) a^n e^{2n} inf_r G_{1/alpha}(r)/r^n prod |xi_i|_{-p}^2 for n >= 1,
/// and ln K^2 for n = 0 (direct bound |f_0| = |F(0)| <= K).
double lemma1_log_coefficient_bound(const GrowthBoundSpec& spec, const GenFunEval& inverse_gf,
                                    const SpaceModel& model, int n, std::span<const CPoint> directions);
double lemma1_log_coefficient_bound(const GrowthBoundSpec& spec, const WeightSequence& ws,
                                    const SpaceModel& model, int n, std::span<const CPoint> directions);

struct Lemma1Admissibility {
  double product = 0.0;  // a e^2 ||i_{p,q}||_HS^2 L
  double hs_norm = 0.0;
  double limsup = 0.0;
  bool admissible = false;
  /// L is a window estimate of the limsup.
  bool window_limited = true;
};

Lemma1Admissibility lemma1_admissibility(double a, double hs_norm_pq, double limsup);

struct Lemma1NormBound {
  Lemma1Admissibility admissibility;
  double log_rhs = 0.0;
  int terms = 0;
  double rel_tail = 0.0;
};

/// Right-hand side K^2 + K^2/(2 pi) sum_{n>=1} Theta(n) (a e^2 ||i_{p,q}||^2)^n with
/// a certified geometric tail. The n = 0 term uses |f_0|^2 <= K^2 (the sqrt(2 pi)
/// step needs n >= 1). limsup defaults to the B1t window estimate.
/// Throws NotAdmissible when the product is >= 1 and TailNotCertified if the sum
/// does not settle within the stored sequence.
Lemma1NormBound lemma1_norm_bound(const GrowthBoundSpec& spec, const WeightSequence& ws,
                                  const SpaceModel& model, int q,
                                  std::optional<double> limsup = std::nullopt);

/// Window default for the B1t limsup estimate used by lemma1_norm_bound.
Window default_limsup_window(const WeightSequence& ws);

/// Everything checked for one expansion: extraction round trip, per-coefficient
/// bounds, and ||phi||_{q,alpha}^2 against the norm bound.
struct Lemma1Report {
  RigorousBound bound;
  int q = 0;
  double max_diag_error = 0.0;
  double max_polarized_error = 0.0;
  bool coefficient_bounds_hold = true;
  double worst_coefficient_log_slack = 0.0;  // min over checks of ln(bound) - ln|coef|^2
  double log_norm_sq = 0.0;
  Lemma1NormBound norm_bound;
  bool norm_bound_holds = false;
};

Lemma1Report run_lemma1_check(const ChaosExpansion& phi, const WeightSequence& ws, double a, int p,
                              int q, int n_directions, std::uint64_t seed,
                              std::optional<double> limsup = std::nullopt);

/// Kondratiev-Streit envelopes, all in log space:
///   exp[(1-b) r^{1/(1-b)}] <= G_alpha(r) <= 2^b exp[(1-b) 2^{b/(1-b)} r^{1/(1-b)}]
///   2^{-b} exp[(1+b) 2^{-b/(1+b)} r^{1/(1+b)}] <= G_{1/alpha}(r) <= exp[(1+b) r^{1/(1+b)}]
struct KsEnvelope {
  double beta = 0.0;
  double r = 0.0;
  double log_lower_e = 0.0;
  double log_g_alpha = 0.0;
  double log_upper_e = 0.0;
  double log_lower_f = 0.0;
  double log_g_inverse = 0.0;
  double log_upper_f = 0.0;
  double rel_tail = 0.0;
  double log_rounding = 0.0;
  bool sandwich_e = false;
  bool sandwich_f = false;
};

KsEnvelope ks_envelopes(double beta, double r, long long term_budget = kDefaultStreamBudget);

/// log_1(x) = ln max(x, e), log_j = log_1 o log_{j-1}. Always >= 1.
double iterated_log(int j, double x);

struct BellEnvelopeRow {
  double r = 0.0;
  double log_g_inverse = 0.0;
  double lhs = 0.0;    // (1/2) ln G_{1/b_k}(r)
  double rhs = 0.0;    // sqrt(a r log_{k-1}(a r))
  double ratio = 1.0;  // lhs / rhs, 1 at r = 0
  double rel_tail = 0.0;
};

/// Exploratory comparison of ln G_{1/b_k}^{1/2} with sqrt(a r log_{k-1}(a r)).
std::vector<BellEnvelopeRow> bell_envelope_scan(int k, std::span<const double> r_grid, double a = 1.0,
                                                int n_max = 2000);

/// Seeded random instances.
CPoint random_point(int d, std::mt19937_64& rng);
/// nnz random entries spread over degrees 0..max_degree.
ChaosExpansion random_sparse_expansion(const SpaceModel& model, int max_degree, int nnz,
                                       std::mt19937_64& rng);

}  // namespace cks
