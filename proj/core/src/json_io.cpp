#include "cks/json_io.hpp"

#include <cmath>
#include <sstream>

#include "cks/errors.hpp"

namespace cks {

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

namespace {

Json number(double x) { return json_number(x); }

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

Json complex_json(Complex c) { return Json{{"re", number(c.real())}, {"im", number(c.imag())}}; }

}  // namespace

Json to_json(const WeightSequence& ws) {
  Json j;
  j["kind"] = std::string(to_string(ws.kind()));
  if (ws.beta()) j["beta"] = *ws.beta();
  if (ws.bell_order()) j["k"] = *ws.bell_order();
  j["n_max"] = ws.n_max();
  j["log_alpha"] = std::vector<double>(ws.log_alpha().begin(), ws.log_alpha().end());
  return j;
}

WeightSequence weights_from_json(const Json& j) {
  const auto kind = weight_kind_from_string(required<std::string>(j, "kind"));
  std::optional<double> beta;
  std::optional<int> k;
  if (j.contains("beta")) beta = required<double>(j, "beta");
  if (j.contains("k")) k = required<int>(j, "k");
  auto logs = required<std::vector<double>>(j, "log_alpha");
  if (j.contains("n_max") && required<int>(j, "n_max") + 1 != static_cast<int>(logs.size())) {
    throw ValidationError("n_max does not match the length of log_alpha");
  }
  return WeightSequence::from_parts(kind, beta, k, std::move(logs));
}

Json to_json(const ConditionReport& report, const std::string& margins_csv_path) {
  Json j;
  j["condition"] = std::string(to_string(report.condition));
  j["window"] = {report.window.lo, report.window.hi};
  j["verdict"] = std::string(to_string(report.verdict));
  if (report.fail_at) j["fail_at"] = *report.fail_at;
  if (report.limsup_estimate) j["limsup_estimate"] = number(*report.limsup_estimate);
  if (report.log_limsup_estimate) j["log_limsup_estimate"] = number(*report.log_limsup_estimate);
  j["window_limited"] = report.window_limited;
  if (!report.margins.empty()) {
    double worst = report.margins.front();
    for (double m : report.margins) worst = std::min(worst, m);
    j["min_margin"] = number(worst);
  }
  if (!margins_csv_path.empty()) {
    j["margins_csv"] = margins_csv_path;
  } else {
    Json margins = Json::array();
    for (double m : report.margins) margins.push_back(number(m));
    j["margin_offset"] = report.margin_offset;
    j["margins"] = std::move(margins);
  }
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

Json to_json(const CPoint& xi) {
  Json arr = Json::array();
  for (Complex c : xi.entries) arr.push_back(complex_json(c));
  return arr;
}

CPoint point_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("a point must be an array of {re, im}");
  CPoint out;
  for (const Json& e : j) out.entries.emplace_back(required<double>(e, "re"), required<double>(e, "im"));
  return out;
}

Json to_json(const ChaosExpansion& phi) {
  Json j;
  j["d"] = phi.model().dim();
  j["lambda"] = std::vector<double>(phi.model().lambdas().begin(), phi.model().lambdas().end());
  j["N"] = phi.max_degree();
  Json tensors = Json::array();
  for (const SymTensor& f : phi.tensors()) {
    if (f.empty()) continue;
    Json t;
    t["degree"] = f.degree();
    if (f.log_scale() != 0.0) t["log_scale"] = f.log_scale();
    Json entries = Json::array();
    for (const auto& [occ, c] : f.entries()) {
      Json e = complex_json(c);
      e["idx"] = to_multi_index(occ);
      entries.push_back(std::move(e));
    }
    t["entries"] = std::move(entries);
    tensors.push_back(std::move(t));
  }
  j["tensors"] = std::move(tensors);
  return j;
}

ChaosExpansion expansion_from_json(const Json& j) {
  std::vector<double> lambda;
  if (j.contains("lambda")) {
    lambda = required<std::vector<double>>(j, "lambda");
  } else {
    const SpaceModel def = SpaceModel::default_model(required<int>(j, "d"));
    lambda.assign(def.lambdas().begin(), def.lambdas().end());
  }
  if (j.contains("d") && required<int>(j, "d") != static_cast<int>(lambda.size())) {
    throw ValidationError("d does not match the length of lambda");
  }
  const int N = j.contains("N") ? required<int>(j, "N") : 0;
  if (N < 0) throw ValidationError("N must be >= 0");
  ChaosExpansion phi(SpaceModel(std::move(lambda)), N);
  if (!j.contains("tensors")) return phi;
  for (const Json& t : j.at("tensors")) {
    const int degree = required<int>(t, "degree");
    if (degree < 0) throw ValidationError("degree must be >= 0");
    SymTensor f(degree, t.contains("log_scale") ? required<double>(t, "log_scale") : 0.0);
    if (t.contains("entries")) {
      for (const Json& e : t.at("entries")) {
        auto idx = required<MultiIndex>(e, "idx");
        if (static_cast<int>(idx.size()) != degree) throw ValidationError("index length must equal the degree");
        f.set(std::move(idx), {required<double>(e, "re"), required<double>(e, "im")});
      }
    }
    phi.set_tensor(std::move(f));
  }
  return phi;
}

Json to_json(const VerificationReport& report) {
  Json j;
  j["check"] = "growth";
  j["mode"] = std::string(to_string(report.bound.mode));
  j["K"] = number(report.bound.K);
  j["a"] = report.bound.a;
  j["p"] = report.bound.p;
  j["grid"] = {{"directions", report.grid.directions},
               {"phases", report.grid.phases},
               {"radii", report.grid.radii},
               {"max_radius", report.grid.max_radius},
               {"seed", report.grid.seed},
               {"refine", report.grid.refine}};
  j["points_evaluated"] = report.points_evaluated;
  j["max_ratio"] = number(report.max_ratio);
  j["witness"] = to_json(report.witness);
  j["pass"] = report.pass;
  return j;
}

Json to_json(const Lemma1Report& report) {
  Json j;
  j["check"] = "lemma1";
  j["K"] = number(report.bound.spec.K);
  j["a"] = report.bound.spec.a;
  j["p"] = report.bound.spec.p;
  j["K_from_index"] = report.bound.q;
  j["q"] = report.q;
  const auto& adm = report.norm_bound.admissibility;
  j["admissibility"] = {{"product", number(adm.product)},
                        {"hs_norm", number(adm.hs_norm)},
                        {"limsup", number(adm.limsup)},
                        {"admissible", adm.admissible},
                        {"window_limited", adm.window_limited}};
  j["max_diag_error"] = number(report.max_diag_error);
  j["max_polarized_error"] = number(report.max_polarized_error);
  j["coefficient_bounds_hold"] = report.coefficient_bounds_hold;
  j["worst_coefficient_log_slack"] = number(report.worst_coefficient_log_slack);
  j["log_norm_sq"] = number(report.log_norm_sq);
  j["log_rhs"] = number(report.norm_bound.log_rhs);
  j["series_terms"] = report.norm_bound.terms;
  j["rel_tail"] = number(report.norm_bound.rel_tail);
  j["pass"] = report.norm_bound_holds && report.coefficient_bounds_hold;
  return j;
}

Json to_json(const KsEnvelope& env) {
  return Json{{"beta", env.beta},
              {"r", env.r},
              {"log_lower_e", number(env.log_lower_e)},
              {"log_g_alpha", number(env.log_g_alpha)},
              {"log_upper_e", number(env.log_upper_e)},
              {"log_lower_f", number(env.log_lower_f)},
              {"log_g_inverse", number(env.log_g_inverse)},
              {"log_upper_f", number(env.log_upper_f)},
              {"rel_tail", number(env.rel_tail)},
              {"log_rounding", number(env.log_rounding)},
              {"sandwich_e", env.sandwich_e},
              {"sandwich_f", env.sandwich_f}};
}

Json to_json(const Eq21Check& check) {
  return Json{{"check", "eq21"},
              {"log_lhs_sq", number(check.log_lhs_sq)},
              {"log_rhs_sq", number(check.log_rhs_sq)},
              {"rel_gap", number(check.rel_gap)},
              {"degree_used", check.degree_used},
              {"rel_tail", number(check.rel_tail)}};
}

std::string genfun_csv(const GenFunEval& gf, double r, int last) {
  const EgfValue v = gf.eval_truncated(r, last);
  std::ostringstream out;
  out << "index,value,tail_bound\n";
  const double log_r = r > 0.0 ? std::log(r) : kNegInf;
  for (int n = 0; n <= last; ++n) {
    const double term = n == 0 ? gf.log_gamma(0) : gf.log_gamma(n) + n * log_r;
    out << n << ',' << format_double(term) << ',';
    if (n == last) out << format_double(v.log_tail_bound);
    out << '\n';
  }
  return out.str();
}

std::string egf_grid_csv(const GenFunEval& gf, std::span<const double> r_grid) {
  std::ostringstream out;
  out << "index,value,tail_bound\n";
  for (const double r : r_grid) {
    const EgfValue v = gf.eval(r);
    out << format_double(r) << ',' << format_double(v.log_value) << ',' << format_double(v.log_tail_bound)
        << '\n';
  }
  return out.str();
}

std::string theta_csv(const WeightSequence& ws, int n_lo, int n_hi) {
  const GenFunEval inverse(ws, EgfMode::one_over_alpha);
  std::ostringstream out;
  out << "index,value,tail_bound\n";
  for (int n = n_lo; n <= n_hi; ++n) {
    const InfRatioResult ir = inf_ratio(inverse, n);
    const double tail = ir.r_star > 0.0 ? inverse.eval(ir.r_star).log_tail_bound : kNegInf;
    out << n << ',' << format_double(log_theta(ws, inverse, n)) << ',' << format_double(tail) << '\n';
  }
  return out.str();
}

std::string margins_csv(const ConditionReport& report) {
  std::ostringstream out;
  out << "n,margin\n";
  for (std::size_t i = 0; i < report.margins.size(); ++i) {
    out << report.margin_offset + static_cast<int>(i) << ',' << format_double(report.margins[i]) << '\n';
  }
  return out.str();
}

std::string bell_envelope_csv(std::span<const BellEnvelopeRow> rows) {
  std::ostringstream out;
  out << "r,lhs,rhs,ratio\n";
  for (const BellEnvelopeRow& row : rows) {
    out << format_double(row.r) << ',' << format_double(row.lhs) << ',' << format_double(row.rhs) << ','
        << format_double(row.ratio) << '\n';
  }
  return out.str();
}

}  // namespace cks
