#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "cks/weights.hpp"

namespace cks {

using Complex = std::complex<double>;

/// Finite-dimensional norm ladder |xi|_p^2 = sum_j lambda_j^{2p} |xi_j|^2.
///
/// lambda_0 > 1 and nondecreasing, so rho = 1/lambda_0 gives
/// |xi|_p <= rho |xi|_{p+1} for every integer p (negative p are the dual norms).
class SpaceModel {
 public:
  explicit SpaceModel(std::vector<double> lambda);

  /// lambda_j = 2(j + 1): rho = 1/2 and ||i_{p+1,p}||_HS < 1 for every d.
  static SpaceModel default_model(int d = 3);

  int dim() const { return static_cast<int>(lambda_.size()); }
  double lambda(int j) const { return lambda_.at(static_cast<std::size_t>(j)); }
  std::span<const double> lambdas() const { return lambda_; }
  double rho() const { return 1.0 / lambda_.front(); }

  bool operator==(const SpaceModel&) const = default;

 private:
  std::vector<double> lambda_;
};

/// A point of the complexified space.
struct CPoint {
  std::vector<Complex> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  Complex operator[](int j) const { return entries[static_cast<std::size_t>(j)]; }
};

double norm_p(const SpaceModel& model, const CPoint& xi, int p);

/// ||i_{q,p}||_HS = sqrt(sum_j lambda_j^{-2(q-p)}), q >= p.
double hs_norm(const SpaceModel& model, int q, int p);

/// Nondecreasing multi-index j_1 <= ... <= j_n.
using MultiIndex = std::vector<int>;

/// Occupation counts k_j = #{i : j_i = j}, trailing zeros trimmed. A
/// bijective encoding of a sorted multi-index that stays O(d) for any degree.
using Occupation = std::vector<int>;

Occupation to_occupation(MultiIndex idx);
MultiIndex to_multi_index(const Occupation& occ);

/// ln(n! / prod_j k_j!): number of distinct orderings of the multi-index.
double log_multiplicity(const Occupation& occ);

/// Symmetric tensor of degree n stored once per sorted multi-index m.
///
/// The full tensor assigns exp(log_scale) * c_m to every permutation of m.
/// The common scale keeps coefficients like xi^n / n! representable for large n.
class SymTensor {
 public:
  explicit SymTensor(int degree, double log_scale = 0.0);

  int degree() const { return degree_; }
  double log_scale() const { return log_scale_; }
  const std::map<Occupation, Complex>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  /// Largest coordinate index used plus one (0 if empty).
  int support_dim() const;

  /// Sets the coefficient of the index (sorted internally); zero removes the entry.
  void set(MultiIndex idx, Complex c);
  void set_occupation(Occupation occ, Complex c);
  /// Unscaled stored coefficient c_m (0 if absent).
  Complex stored(MultiIndex idx) const;
  /// Full coefficient exp(log_scale) c_m.
  Complex coefficient(MultiIndex idx) const;

 private:
  int degree_;
  double log_scale_;
  std::map<Occupation, Complex> entries_;
};

/// ln |f|_p^2 (-inf for the zero tensor).
double log_tensor_norm_sq(const SymTensor& f, const SpaceModel& model, int p);

/// <f, xi^{(x)n}> = sum_m mult(m) c_m prod_i xi_{j_i}.
Complex apply_diagonal(const SymTensor& f, const CPoint& xi);

/// <f, xi_1 (x)^ ... (x)^ xi_n> with the symmetrized product; needs n points.
Complex apply_polarized(const SymTensor& f, std::span<const CPoint> xis);

/// Bilinear pairing <F, f> = sum_m mult(m) C_m c_m (no conjugation).
Complex tensor_pairing(const SymTensor& lhs, const SymTensor& rhs);

/// Finite chaos expansion f_0..f_N over a space model.
class ChaosExpansion {
 public:
  explicit ChaosExpansion(SpaceModel model, int max_degree = 0);

  const SpaceModel& model() const { return model_; }
  int max_degree() const { return static_cast<int>(tensors_.size()) - 1; }
  const SymTensor& tensor(int n) const { return tensors_.at(static_cast<std::size_t>(n)); }
  const std::vector<SymTensor>& tensors() const { return tensors_; }

  /// Replaces f_n (growing N if needed). Indices must be < model dimension.
  void set_tensor(SymTensor f);
  /// Shorthand for set on f_n, growing N if needed.
  void set(MultiIndex idx, Complex c);

 private:
  SpaceModel model_;
  std::vector<SymTensor> tensors_;
};

/// ln ||phi||_{p,alpha}^2 (dual = false) or ln ||Phi||_{-p,1/alpha}^2 (dual = true).
double log_phi_norm_sq(const ChaosExpansion& phi, int p, const WeightSequence& ws, bool dual = false);
double phi_norm(const ChaosExpansion& phi, int p, const WeightSequence& ws, bool dual = false);

/// <<Phi, phi>> = sum_n n! <F_n, f_n>.
Complex pair(const ChaosExpansion& Phi, const ChaosExpansion& phi);

/// Renormalized exponential truncated at degree N: f_n = xi^{(x)n} / n!.
ChaosExpansion exp_vector(const SpaceModel& model, const CPoint& xi, int N = 12);

/// S phi(xi) = sum_n <f_n, xi^{(x)n}>.
Complex s_transform(const ChaosExpansion& phi, const CPoint& xi);

/// Both sides of ||:e^{<.,xi>}:||_{p,alpha}^2 = G_alpha(|xi|_p^2).
struct Eq21Check {
  double log_lhs_sq = 0.0;
  double log_rhs_sq = 0.0;
  double rel_gap = 0.0;
  int degree_used = 0;
  double rel_tail = 0.0;
};

inline constexpr double kEq21TailTolerance = 1e-12;

/// Raises the truncation degree from N until the G_alpha tail at |xi|_p^2 is
/// certified below 1e-12 of the value. Throws TailNotCertified.
Eq21Check verify_2_1(const SpaceModel& model, const CPoint& xi, int p, const WeightSequence& ws,
                     int N = 12);

}  // namespace cks
