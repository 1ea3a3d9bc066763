#include "cks/fockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "cks/errors.hpp"
#include "cks/genfun.hpp"
#include "cks/logmath.hpp"

namespace cks {

namespace {

// Sum of terms given as (log magnitude, unit phase), accumulated with a
// running max shift so that huge and tiny magnitudes combine safely.
class LogComplexSum {
 public:
  void add(double log_mag, Complex phase) {
    if (log_mag == kNegInf) return;
    if (log_mag > max_) {
      sum_ *= std::exp(max_ - log_mag);
      max_ = log_mag;
    }
    sum_ += std::exp(log_mag - max_) * phase;
  }
  Complex value() const { return max_ == kNegInf ? Complex{} : sum_ * std::exp(max_); }

 private:
  double max_ = kNegInf;
  Complex sum_{};
};


void check_dims(const SpaceModel& model, const CPoint& xi) {
  if (xi.dim() != model.dim()) {
    throw ValidationError("point has dimension " + std::to_string(xi.dim()) + ", model has " +
                          std::to_string(model.dim()));
  }
}

}  // namespace

SpaceModel::SpaceModel(std::vector<double> lambda) : lambda_(std::move(lambda)) {
  if (lambda_.empty()) throw ValidationError("space model needs d >= 1");
  if (!(lambda_.front() > 1.0)) throw ValidationError("lambda_0 must exceed 1 so that rho < 1");
  for (std::size_t j = 1; j < lambda_.size(); ++j) {
    if (!(lambda_[j] >= lambda_[j - 1]) || !std::isfinite(lambda_[j])) {
      throw ValidationError("lambda ladder must be finite and nondecreasing");
    }
  }
}

SpaceModel SpaceModel::default_model(int d) {
  if (d < 1) throw ValidationError("space model needs d >= 1");
  std::vector<double> lambda(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) lambda[j] = 2.0 * (j + 1);
  return SpaceModel(std::move(lambda));
}

double norm_p(const SpaceModel& model, const CPoint& xi, int p) {
  check_dims(model, xi);
  double s = 0.0;
  for (int j = 0; j < model.dim(); ++j) s += std::pow(model.lambda(j), 2.0 * p) * std::norm(xi[j]);
  return std::sqrt(s);
}

double hs_norm(const SpaceModel& model, int q, int p) {
  if (q < p) throw ValidationError("hs_norm(q, p) needs q >= p");
  double s = 0.0;
  for (double l : model.lambdas()) s += std::pow(l, -2.0 * (q - p));
  return std::sqrt(s);
}

Occupation to_occupation(MultiIndex idx) {
  Occupation occ;
  for (int j : idx) {
    if (j < 0) throw ValidationError("multi-index entries must be >= 0");
    if (static_cast<std::size_t>(j) >= occ.size()) occ.resize(static_cast<std::size_t>(j) + 1, 0);
    ++occ[static_cast<std::size_t>(j)];
  }
  return occ;
}

MultiIndex to_multi_index(const Occupation& occ) {
  MultiIndex idx;
  for (std::size_t j = 0; j < occ.size(); ++j) idx.insert(idx.end(), occ[j], static_cast<int>(j));
  return idx;
}

double log_multiplicity(const Occupation& occ) {
  const int n = std::accumulate(occ.begin(), occ.end(), 0);
  double out = log_factorial(n);
  for (int k : occ) out -= log_factorial(k);
  return out;
}


SymTensor::SymTensor(int degree, double log_scale) : degree_(degree), log_scale_(log_scale) {
  if (degree < 0) throw ValidationError("tensor degree must be >= 0");
  if (!std::isfinite(log_scale)) throw ValidationError("tensor log_scale must be finite");
}

int SymTensor::support_dim() const {
  int d = 0;
  for (const auto& [occ, c] : entries_) d = std::max(d, static_cast<int>(occ.size()));
  return d;
}

void SymTensor::set_occupation(Occupation occ, Complex c) {
  while (!occ.empty() && occ.back() == 0) occ.pop_back();
  if (std::accumulate(occ.begin(), occ.end(), 0) != degree_) {
    throw ValidationError("multi-index length does not match tensor degree " + std::to_string(degree_));
  }
  if (c == Complex{}) {
    entries_.erase(occ);
  } else {
    entries_[std::move(occ)] = c;
  }
}

void SymTensor::set(MultiIndex idx, Complex c) {
  if (static_cast<int>(idx.size()) != degree_) {
    throw ValidationError("multi-index length does not match tensor degree " + std::to_string(degree_));
  }
  set_occupation(to_occupation(std::move(idx)), c);
}

Complex SymTensor::stored(MultiIndex idx) const {
  const auto it = entries_.find(to_occupation(std::move(idx)));
  return it == entries_.end() ? Complex{} : it->second;
}

Complex SymTensor::coefficient(MultiIndex idx) const {
  return std::exp(log_scale_) * stored(std::move(idx));
}

double log_tensor_norm_sq(const SymTensor& f, const SpaceModel& model, int p) {
  if (f.support_dim() > model.dim()) throw ValidationError("tensor uses indices beyond the model");
  LogSumAccumulator acc;
  for (const auto& [occ, c] : f.entries()) {
    double term = log_multiplicity(occ) + 2.0 * std::log(std::abs(c));
    for (std::size_t j = 0; j < occ.size(); ++j) {
      if (occ[j] != 0) term += 2.0 * p * occ[j] * std::log(model.lambda(static_cast<int>(j)));
    }
    acc.add(term);
  }
  return acc.empty() ? kNegInf : acc.value() + 2.0 * f.log_scale();
}

Complex apply_diagonal(const SymTensor& f, const CPoint& xi) {
  if (f.support_dim() > xi.dim()) throw ValidationError("tensor uses indices beyond the point");
  std::vector<double> log_abs(static_cast<std::size_t>(xi.dim()));
  for (int j = 0; j < xi.dim(); ++j) log_abs[j] = std::log(std::abs(xi[j]));
  LogComplexSum sum;
  for (const auto& [occ, c] : f.entries()) {
    double log_mag = f.log_scale() + log_multiplicity(occ) + std::log(std::abs(c));
    double arg = std::arg(c);
    bool zero = false;
    for (std::size_t j = 0; j < occ.size(); ++j) {
      if (occ[j] == 0) continue;
      if (xi.entries[j] == Complex{}) {
        zero = true;
        break;
      }
      log_mag += occ[j] * log_abs[j];
      arg += occ[j] * std::arg(xi.entries[j]);
    }
    if (!zero) sum.add(log_mag, std::polar(1.0, arg));
  }
  return sum.value();
}

Complex apply_polarized(const SymTensor& f, std::span<const CPoint> xis) {
  const int n = f.degree();
  if (static_cast<int>(xis.size()) != n) {
    throw ValidationError("apply_polarized needs exactly degree-many points");
  }
  Complex total{};
  for (const auto& [occ, c] : f.entries()) {
    const MultiIndex m = to_multi_index(occ);
    for (const CPoint& xi : xis) {
      if (!m.empty() && m.back() >= xi.dim()) throw ValidationError("tensor uses indices beyond the point");
    }
    // Sum over distinct orderings = permanent / prod k_j!.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Complex perm{};
    do {
      Complex prod{1.0, 0.0};
      for (int i = 0; i < n; ++i) prod *= xis[i][m[order[i]]];
      perm += prod;
    } while (std::next_permutation(order.begin(), order.end()));
    double log_rep = 0.0;
    for (int k : occ) log_rep += log_factorial(k);
    total += c * perm * std::exp(-log_rep);
  }
  return total * std::exp(f.log_scale());
}

namespace {

void accumulate_pairing(const SymTensor& lhs, const SymTensor& rhs, double extra_log, LogComplexSum& sum) {
  if (lhs.degree() != rhs.degree()) return;
  const SymTensor& small = lhs.entries().size() <= rhs.entries().size() ? lhs : rhs;
  const SymTensor& large = &small == &lhs ? rhs : lhs;
  const double scale = extra_log + lhs.log_scale() + rhs.log_scale();
  for (const auto& [occ, c] : small.entries()) {
    const auto it = large.entries().find(occ);
    if (it == large.entries().end()) continue;
    sum.add(scale + log_multiplicity(occ) + std::log(std::abs(c)) + std::log(std::abs(it->second)),
            std::polar(1.0, std::arg(c) + std::arg(it->second)));
  }
}

}  // namespace

Complex tensor_pairing(const SymTensor& lhs, const SymTensor& rhs) {
  LogComplexSum sum;
  accumulate_pairing(lhs, rhs, 0.0, sum);
  return sum.value();
}

ChaosExpansion::ChaosExpansion(SpaceModel model, int max_degree) : model_(std::move(model)) {
  if (max_degree < 0) throw ValidationError("max degree must be >= 0");
  for (int n = 0; n <= max_degree; ++n) tensors_.emplace_back(n);
}

void ChaosExpansion::set_tensor(SymTensor f) {
  if (f.support_dim() > model_.dim()) throw ValidationError("tensor uses indices beyond the model");
  while (max_degree() < f.degree()) tensors_.emplace_back(max_degree() + 1);
  tensors_[static_cast<std::size_t>(f.degree())] = std::move(f);
}

void ChaosExpansion::set(MultiIndex idx, Complex c) {
  for (int j : idx) {
    if (j >= model_.dim()) throw ValidationError("multi-index entry beyond the model dimension");
  }
  const int n = static_cast<int>(idx.size());
  while (max_degree() < n) tensors_.emplace_back(max_degree() + 1);
  tensors_[static_cast<std::size_t>(n)].set(std::move(idx), c);
}

double log_phi_norm_sq(const ChaosExpansion& phi, int p, const WeightSequence& ws, bool dual) {
  if (phi.max_degree() > ws.n_max()) {
    throw ValidationError("expansion degree exceeds the stored weight sequence");
  }
  LogSumAccumulator acc;
  for (int n = 0; n <= phi.max_degree(); ++n) {
    const double tn = log_tensor_norm_sq(phi.tensor(n), phi.model(), dual ? -p : p);
    if (tn == kNegInf) continue;
    acc.add(log_factorial(n) + (dual ? -ws.log_alpha(n) : ws.log_alpha(n)) + tn);
  }
  return acc.value();
}

double phi_norm(const ChaosExpansion& phi, int p, const WeightSequence& ws, bool dual) {
  return std::exp(0.5 * log_phi_norm_sq(phi, p, ws, dual));
}

Complex pair(const ChaosExpansion& Phi, const ChaosExpansion& phi) {
  if (!(Phi.model() == phi.model())) throw ValidationError("pairing needs expansions over the same model");
  LogComplexSum sum;
  const int top = std::min(Phi.max_degree(), phi.max_degree());
  for (int n = 0; n <= top; ++n) accumulate_pairing(Phi.tensor(n), phi.tensor(n), log_factorial(n), sum);
  return sum.value();
}

namespace {

// Calls fn(occupation) for every composition of n into the coordinates in `support`.
template <typename Fn>
void for_each_occupation(const std::vector<int>& support, int dim, int n, Fn&& fn) {
  Occupation occ(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
    const int j = support[pos];
    if (pos + 1 == support.size()) {
      occ[j] = remaining;
      fn(occ);
      occ[j] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      occ[j] = k;
      self(self, pos + 1, remaining - k);
    }
    occ[j] = 0;
  };
  rec(rec, 0, n);
}

}  // namespace

ChaosExpansion exp_vector(const SpaceModel& model, const CPoint& xi, int N) {
  check_dims(model, xi);
  if (N < 0) throw ValidationError("truncation degree must be >= 0");
  ChaosExpansion out(model, N);
  out.set({}, 1.0);
  double s = 0.0;
  std::vector<int> support;
  for (int j = 0; j < xi.dim(); ++j) {
    s = std::max(s, std::abs(xi[j]));
    if (xi[j] != Complex{}) support.push_back(j);
  }
  if (s == 0.0) return out;
  // f_n = exp(n ln s - ln n!) * prod_j (xi_j / s)^{k_j}.
  std::vector<double> log_rel(static_cast<std::size_t>(xi.dim()));
  std::vector<double> arg(static_cast<std::size_t>(xi.dim()));
  for (int j : support) {
    log_rel[j] = std::log(std::abs(xi[j]) / s);
    arg[j] = std::arg(xi[j]);
  }
  for (int n = 1; n <= N; ++n) {
    SymTensor f(n, n * std::log(s) - log_factorial(n));
    for_each_occupation(support, xi.dim(), n, [&](const Occupation& occ) {
      double lm = 0.0;
      double ph = 0.0;
      for (int j : support) {
        lm += occ[j] * log_rel[j];
        ph += occ[j] * arg[j];
      }
      const Complex c = std::polar(std::exp(lm), ph);
      if (c != Complex{}) f.set_occupation(occ, c);
    });
    out.set_tensor(std::move(f));
  }
  return out;
}

Complex s_transform(const ChaosExpansion& phi, const CPoint& xi) {
  check_dims(phi.model(), xi);
  Complex total{};
  for (const SymTensor& f : phi.tensors()) total += apply_diagonal(f, xi);
  return total;
}

Eq21Check verify_2_1(const SpaceModel& model, const CPoint& xi, int p, const WeightSequence& ws, int N) {
  check_dims(model, xi);
  const double x = std::pow(norm_p(model, xi, p), 2);
  const GenFunEval gf(ws, EgfMode::alpha);
  const EgfValue rhs = gf.eval(x);
  Eq21Check out;
  out.degree_used = std::clamp(std::max(N, gf.certified_truncation(x, kEq21TailTolerance)), 0, ws.n_max());
  out.log_rhs_sq = rhs.log_value;
  out.log_lhs_sq = log_phi_norm_sq(exp_vector(model, xi, out.degree_used), p, ws, false);
  out.rel_gap = std::abs(std::expm1(out.log_lhs_sq - out.log_rhs_sq));
  out.rel_tail = rhs.rel_tail;
  return out;
}

}  // namespace cks
