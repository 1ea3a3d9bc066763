#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "cks/errors.hpp"

namespace cks::cli {

namespace {

// One serializable RunConfig member. Keys match the long flag names.
struct Field {
  const char* key;
  std::function<Json(const RunConfig&)> get;
  std::function<void(RunConfig&, const Json&)> set;
};

template <typename T>
Field field(const char* key, T RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return Json(c.*member); },
          [member](RunConfig& c, const Json& j) { c.*member = j.get<T>(); }};
}

template <typename T>
Field field(const char* key, std::optional<T> RunConfig::*member) {
  return {key,
          [member](const RunConfig& c) { return (c.*member) ? Json(*(c.*member)) : Json(nullptr); },
          [member](RunConfig& c, const Json& j) {
            if (j.is_null()) {
              (c.*member).reset();
            } else {
              c.*member = j.get<T>();
            }
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("command", &RunConfig::command),
      field("action", &RunConfig::action),
      field("family", &RunConfig::family),
      field("beta", &RunConfig::beta),
      field("k", &RunConfig::k),
      field("n-max", &RunConfig::n_max),
      field("log-values", &RunConfig::log_values),
      field("d", &RunConfig::d),
      field("lambda", &RunConfig::lambda),
      field("p", &RunConfig::p),
      field("q", &RunConfig::q),
      field("a", &RunConfig::a),
      field("directions", &RunConfig::directions),
      field("phases", &RunConfig::phases),
      field("radii", &RunConfig::radii),
      field("max-radius", &RunConfig::max_radius),
      field("grid-seed", &RunConfig::grid_seed),
      field("refine", &RunConfig::refine),
      field("phi", &RunConfig::phi),
      field("seed", &RunConfig::seed),
      field("degree", &RunConfig::degree),
      field("nnz", &RunConfig::nnz),
      field("mode", &RunConfig::mode),
      field("k-scale", &RunConfig::k_scale),
      field("lemma-directions", &RunConfig::lemma_directions),
      field("egf", &RunConfig::egf),
      field("table", &RunConfig::table),
      field("r", &RunConfig::r),
      field("r-min", &RunConfig::r_min),
      field("r-max", &RunConfig::r_max),
      field("r-points", &RunConfig::r_points),
      field("n-lo", &RunConfig::n_lo),
      field("n-hi", &RunConfig::n_hi),
      field("conditions", &RunConfig::conditions),
      field("window-lo", &RunConfig::window_lo),
      field("window-hi", &RunConfig::window_hi),
      field("implications", &RunConfig::implications),
      field("x-max", &RunConfig::x_max),
      field("x-points", &RunConfig::x_points),
      field("gap-tolerance", &RunConfig::gap_tolerance),
      field("tail-tolerance", &RunConfig::tail_tolerance),
      field("out", &RunConfig::out),
      field("format", &RunConfig::format),
  };
  return table;
}

// A report plus whether the checked bound held (exit code 4 otherwise).
struct Output {
  std::string text;
  bool pass = true;
};

// The config goes last so the results lead the report.
std::string dump(const RunConfig& c, Json j) {
  j["config"] = to_json(c);
  return j.dump(2) + "\n";
}

bool want_csv(const RunConfig& c) {
  if (c.format == "csv") return true;
  if (c.format == "json") return false;
  throw ValidationError("--format must be json or csv, got '" + c.format + "'");
}

Json header(const RunConfig& c) { return Json{{"command", c.command}}; }

int resolved_n_max(const RunConfig& c, int fallback) {
  const int n = c.n_max ? *c.n_max : default_n_max(fallback);
  if (n < 1) throw ValidationError("n_max must be >= 1");
  return n;
}

bool n_max_pinned(const RunConfig& c) { return c.n_max.has_value() || std::getenv("CKS_NMAX") != nullptr; }

WeightSequence build_weights(const RunConfig& c, int n_max) {
  switch (weight_kind_from_string(c.family)) {
    case WeightKind::constant: return make_constant(n_max);
    case WeightKind::factorial_power: return make_factorial_power(c.beta, n_max);
    case WeightKind::bell: return make_bell(c.k, n_max);
    case WeightKind::custom:
      if (c.log_values.empty()) throw ValidationError("custom family needs --log-values");
      return make_custom(c.log_values);
  }
  throw ValidationError("unknown family");
}

SpaceModel build_model(const RunConfig& c, int default_d) {
  if (!c.lambda.empty()) {
    if (c.d && *c.d != static_cast<int>(c.lambda.size())) {
      throw ValidationError("--d disagrees with the length of --lambda");
    }
    return SpaceModel(c.lambda);
  }
  const int d = c.d.value_or(default_d);
  if (d < 1) throw ValidationError("--d must be >= 1");
  return SpaceModel::default_model(d);
}

EgfMode egf_mode(const std::string& name) {
  if (name == "alpha") return EgfMode::alpha;
  if (name == "inverse" || name == "one_over_alpha") return EgfMode::one_over_alpha;
  throw ValidationError("--egf must be alpha or inverse, got '" + name + "'");
}

// Explicit --r values win; otherwise a log-spaced grid with exact endpoints.
std::vector<double> r_grid(const RunConfig& c, double lo, double hi, int points) {
  if (!c.r.empty()) return c.r;
  lo = c.r_min.value_or(lo);
  hi = c.r_max.value_or(hi);
  points = c.r_points.value_or(points);
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw ValidationError("r grid needs 0 < r-min <= r-max and r-points >= 1");
  if (points == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ChaosExpansion load_or_draw_phi(const RunConfig& c) {
  if (!c.phi.empty()) {
    std::ifstream in(c.phi);
    if (!in) throw ValidationError("cannot read --phi file '" + c.phi + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("--phi file is not valid JSON: " + std::string(e.what()));
    }
    return expansion_from_json(j);
  }
  if (c.degree < 0 || c.nnz < 1) throw ValidationError("--degree must be >= 0 and --nnz >= 1");
  std::mt19937_64 rng(c.seed);
  return random_sparse_expansion(build_model(c, 3), c.degree, c.nnz, rng);
}

GridSpec grid_spec(const RunConfig& c) {
  return GridSpec{c.directions, c.phases, c.radii, c.max_radius, c.grid_seed, c.refine};
}

double min_margin(const ConditionReport& r) {
  double worst = std::numeric_limits<double>::infinity();
  for (double m : r.margins) worst = std::min(worst, m);
  return worst;
}

Output cmd_weights(const RunConfig& c) {
  const WeightSequence ws = build_weights(c, resolved_n_max(c, kDefaultNMax));
  if (want_csv(c)) {
    std::ostringstream out;
    out << "n,log_alpha,alpha\n";
    for (int n = 0; n <= ws.n_max(); ++n) {
      out << n << ',' << format_double(ws.log_alpha(n)) << ',' << format_double(ws.alpha(n)) << '\n';
    }
    return {out.str()};
  }
  Json j = header(c);
  j["weights"] = to_json(ws);
  Json alpha = Json::array();
  for (int n = 0; n <= ws.n_max(); ++n) alpha.push_back(json_number(ws.alpha(n)));
  j["alpha"] = std::move(alpha);
  return {dump(c, j)};
}

Output cmd_genfun(const RunConfig& c) {
  const WeightSequence ws = build_weights(c, resolved_n_max(c, kDefaultNMax));
  const bool csv = want_csv(c);
  if (c.table == "theta") {
    if (c.n_lo < 0 || c.n_hi < c.n_lo) throw ValidationError("theta table needs 0 <= n-lo <= n-hi");
    if (csv) return {theta_csv(ws, c.n_lo, c.n_hi)};
    const GenFunEval inverse(ws, EgfMode::one_over_alpha);
    Json rows = Json::array();
    for (int n = c.n_lo; n <= c.n_hi; ++n) {
      const InfRatioResult ir = inf_ratio(inverse, n);
      const double lt = log_theta(ws, inverse, n);
      rows.push_back({{"n", n},
                      {"log_theta", json_number(lt)},
                      {"theta_root", json_number(n > 0 ? std::exp(lt / n) : std::exp(lt))},
                      {"r_star", json_number(ir.r_star)}});
    }
    Json j = header(c);
    j["table"] = "theta";
    j["rows"] = std::move(rows);
    return {dump(c, j)};
  }
  if (c.table != "grid") throw ValidationError("--table must be grid or theta, got '" + c.table + "'");
  const GenFunEval gf(ws, egf_mode(c.egf));
  const std::vector<double> grid = r_grid(c, 0.01, 10.0, 20);
  if (csv) return {egf_grid_csv(gf, grid)};
  Json rows = Json::array();
  for (double r : grid) {
    const EgfValue v = gf.eval(r);
    rows.push_back({{"r", r},
                    {"log_value", json_number(v.log_value)},
                    {"log_tail_bound", json_number(v.log_tail_bound)},
                    {"rel_tail", json_number(v.rel_tail)},
                    {"last_index", v.last_index}});
  }
  Json j = header(c);
  j["egf"] = std::string(to_string(gf.mode()));
  j["rows"] = std::move(rows);
  return {dump(c, j)};
}

Output cmd_conditions(const RunConfig& c) {
  const WeightSequence ws = build_weights(c, resolved_n_max(c, kDefaultNMax));
  const Window window{c.window_lo, c.window_hi};
  std::vector<Condition> which;
  if (c.conditions.empty()) {
    which = {Condition::A1, Condition::A2, Condition::A2t, Condition::B1,
             Condition::B1t, Condition::B2, Condition::B2t, Condition::B3};
  } else {
    for (const std::string& name : c.conditions) which.push_back(condition_from_string(name));
  }
  std::vector<ConditionReport> reports;
  for (Condition cond : which) reports.push_back(check_condition(ws, cond, window));

  if (want_csv(c)) {
    std::ostringstream out;
    out << "condition,verdict,fail_at,limsup_estimate,min_margin\n";
    for (const ConditionReport& r : reports) {
      out << to_string(r.condition) << ',' << to_string(r.verdict) << ',';
      if (r.fail_at) out << *r.fail_at;
      out << ',';
      if (r.limsup_estimate) out << format_double(*r.limsup_estimate);
      out << ',';
      if (!r.margins.empty()) out << format_double(min_margin(r));
      out << '\n';
    }
    return {out.str()};
  }
  Json j = header(c);
  Json list = Json::array();
  for (const ConditionReport& r : reports) {
    std::string csv_path;
    // With --out the margin vectors go to sidecar CSVs next to the report.
    if (!c.out.empty() && !r.margins.empty()) {
      csv_path = c.out + "." + std::string(to_string(r.condition)) + ".margins.csv";
      std::ofstream f(csv_path);
      if (!f) throw ValidationError("cannot write '" + csv_path + "'");
      f << margins_csv(r);
    }
    list.push_back(to_json(r, csv_path));
  }
  j["reports"] = std::move(list);
  if (c.implications) {
    Json imps = Json::array();
    for (const ImplicationCheck& ic : check_implications(ws, window)) {
      imps.push_back({{"antecedent", to_string(ic.antecedent)},
                      {"consequent", to_string(ic.consequent)},
                      {"antecedent_verdict", to_string(ic.antecedent_report.verdict)},
                      {"consequent_verdict", to_string(ic.consequent_report.verdict)},
                      {"violated", ic.violated}});
    }
    j["implications"] = std::move(imps);
  }
  return {dump(c, j)};
}

Output cmd_model(const RunConfig& c) {
  const SpaceModel model = build_model(c, 3);
  if (want_csv(c)) {
    std::ostringstream out;
    out << "j,lambda\n";
    for (int i = 0; i < model.dim(); ++i) out << i << ',' << format_double(model.lambda(i)) << '\n';
    return {out.str()};
  }
  Json j = header(c);
  j["d"] = model.dim();
  Json lambda = Json::array();
  for (double l : model.lambdas()) lambda.push_back(l);
  j["lambda"] = std::move(lambda);
  j["rho"] = model.rho();
  const double step = hs_norm(model, c.p + 1, c.p);
  j["hs_norm_step"] = step;
  j["hs_norm_step_below_one"] = step < 1.0;
  Json ladder = Json::array();
  for (int s = 1; s <= 3; ++s) ladder.push_back({{"q", c.p + s}, {"p", c.p}, {"hs_norm", hs_norm(model, c.p + s, c.p)}});
  j["ladder"] = std::move(ladder);
  return {dump(c, j)};
}

Output verify_eq21(const RunConfig& c) {
  // The d = 2 model keeps the Bell-2 case (degree ~1300 at |xi|^2 = 5) enumerable.
  const SpaceModel model = build_model(c, 2);
  if (c.x_points < 1 || !(c.x_max >= 0.0)) throw ValidationError("eq21 needs x-points >= 1 and x-max >= 0");
  std::mt19937_64 rng(c.grid_seed);
  CPoint direction = random_point(model.dim(), rng);
  const double unit = norm_p(model, direction, c.p);
  for (Complex& z : direction.entries) z /= unit;

  int n_max = resolved_n_max(c, kDefaultNMax);
  const bool pinned = n_max_pinned(c);
  constexpr int kAutoCeiling = 6400;
  for (;;) {
    try {
      const WeightSequence ws = build_weights(c, n_max);
      Json rows = Json::array();
      double worst = 0.0;
      for (int i = 0; i < c.x_points; ++i) {
        const double x = c.x_points == 1 ? c.x_max : c.x_max * i / (c.x_points - 1);
        CPoint xi = direction;
        for (Complex& z : xi.entries) z *= std::sqrt(x);
        const Eq21Check check = verify_2_1(model, xi, c.p, ws);
        worst = std::max(worst, check.rel_gap);
        Json row = to_json(check);
        row.erase("check");
        Json full{{"x", x}};
        full.update(row);
        rows.push_back(std::move(full));
      }
      const bool pass = worst <= c.gap_tolerance;
      if (want_csv(c)) {
        std::ostringstream out;
        out << "x,rel_gap,degree_used,rel_tail\n";
        for (const Json& row : rows) {
          out << format_double(row["x"].get<double>()) << ',' << row["rel_gap"].dump() << ','
              << row["degree_used"].get<int>() << ',' << row["rel_tail"].dump() << '\n';
        }
        return {out.str(), pass};
      }
      Json j = header(c);
      j["check"] = "eq21";
      j["d"] = model.dim();
      j["n_max_used"] = n_max;
      j["rows"] = std::move(rows);
      j["max_rel_gap"] = worst;
      j["pass"] = pass;
      return {dump(c, j), pass};
    } catch (const TailNotCertified&) {
      if (pinned || n_max >= kAutoCeiling) throw;
      n_max *= 2;
    }
  }
}

Output verify_growth_cmd(const RunConfig& c) {
  const ChaosExpansion phi = load_or_draw_phi(c);
  const WeightSequence ws = build_weights(c, resolved_n_max(c, kDefaultNMax));
  const BoundMode mode = bound_mode_from_string(c.mode);
  const double a = c.a.value_or(1.0);
  const RigorousBound bound =
      mode == BoundMode::test ? rigorous_K_test(phi, a, c.p, ws) : rigorous_K_generalized(phi, a, c.p, ws);
  GrowthBoundSpec spec = bound.spec;
  spec.K *= c.k_scale;
  const VerificationReport report = verify_growth(phi, spec, ws, grid_spec(c));
  if (want_csv(c)) throw ValidationError("verify growth has no CSV form; use --format json");
  Json j = header(c);
  j["report"] = to_json(report);
  j["K_rigorous"] = json_number(bound.spec.K);
  j["K_from_index"] = bound.q;
  j["pass"] = report.pass;
  return {dump(c, j), report.pass};
}

Output verify_lemma1(const RunConfig& c) {
  const ChaosExpansion phi = load_or_draw_phi(c);
  const WeightSequence ws = build_weights(c, resolved_n_max(c, kDefaultNMax));
  if (want_csv(c)) throw ValidationError("verify lemma1 has no CSV form; use --format json");
  const Lemma1Report report =
      run_lemma1_check(phi, ws, c.a.value_or(0.1), c.p, c.q, c.lemma_directions, c.grid_seed);
  const bool pass = report.norm_bound_holds && report.coefficient_bounds_hold;
  Json j = header(c);
  j["report"] = to_json(report);
  j["pass"] = pass;
  return {dump(c, j), pass};
}

Json envelope_row(const KsEnvelope& e) {
  Json row = to_json(e);
  row.erase("beta");
  return row;
}

Output verify_ks(const RunConfig& c) {
  const std::vector<double> grid = r_grid(c, 0.01, 100.0, 40);
  Json rows = Json::array();
  bool pass = true;
  std::ostringstream csv;
  csv << "r,sandwich_e,sandwich_f,rel_tail\n";
  for (double r : grid) {
    const KsEnvelope e = ks_envelopes(c.beta, r);
    const bool ok = e.sandwich_e && e.sandwich_f && e.rel_tail <= c.tail_tolerance;
    pass = pass && ok;
    csv << format_double(r) << ',' << e.sandwich_e << ',' << e.sandwich_f << ',' << format_double(e.rel_tail) << '\n';
    rows.push_back(envelope_row(e));
  }
  if (want_csv(c)) return {csv.str(), pass};
  Json j = header(c);
  j["check"] = "ks";
  j["beta"] = c.beta;
  j["rows"] = std::move(rows);
  j["pass"] = pass;
  return {dump(c, j), pass};
}

Output envelopes_ks(const RunConfig& c) {
  const std::vector<double> grid = r_grid(c, 0.01, 100.0, 40);
  std::vector<KsEnvelope> envs;
  for (double r : grid) envs.push_back(ks_envelopes(c.beta, r));
  if (want_csv(c)) {
    std::ostringstream out;
    out << "r,log_lower_e,log_g_alpha,log_upper_e,log_lower_f,log_g_inverse,log_upper_f,rel_tail\n";
    for (const KsEnvelope& e : envs) {
      out << format_double(e.r) << ',' << format_double(e.log_lower_e) << ',' << format_double(e.log_g_alpha) << ','
          << format_double(e.log_upper_e) << ',' << format_double(e.log_lower_f) << ','
          << format_double(e.log_g_inverse) << ',' << format_double(e.log_upper_f) << ','
          << format_double(e.rel_tail) << '\n';
    }
    return {out.str()};
  }
  Json rows = Json::array();
  for (const KsEnvelope& e : envs) rows.push_back(envelope_row(e));
  Json j = header(c);
  j["envelope"] = "ks";
  j["beta"] = c.beta;
  j["rows"] = std::move(rows);
  return {dump(c, j)};
}

Output envelopes_bell(const RunConfig& c) {
  const std::vector<double> grid = r_grid(c, std::exp(2.0), 1e4, 41);
  const double a = c.a.value_or(1.0);
  const std::vector<BellEnvelopeRow> rows = bell_envelope_scan(c.k, grid, a, resolved_n_max(c, 2000));
  if (want_csv(c)) return {bell_envelope_csv(rows)};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  Json list = Json::array();
  for (const BellEnvelopeRow& row : rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    list.push_back({{"r", row.r},
                    {"log_g_inverse", json_number(row.log_g_inverse)},
                    {"lhs", json_number(row.lhs)},
                    {"rhs", json_number(row.rhs)},
                    {"ratio", json_number(row.ratio)},
                    {"rel_tail", json_number(row.rel_tail)}});
  }
  Json j = header(c);
  j["envelope"] = "bell";
  j["k"] = c.k;
  j["a"] = a;
  j["rows"] = std::move(list);
  j["min_ratio"] = json_number(lo);
  j["max_ratio"] = json_number(hi);
  j["spread"] = json_number(hi / lo);
  return {dump(c, j)};
}

Output dispatch(const RunConfig& c) {
  if (c.command == "weights") return cmd_weights(c);
  if (c.command == "genfun") return cmd_genfun(c);
  if (c.command == "conditions") return cmd_conditions(c);
  if (c.command == "model") return cmd_model(c);
  if (c.command == "verify") {
    if (c.action == "eq21") return verify_eq21(c);
    if (c.action == "growth") return verify_growth_cmd(c);
    if (c.action == "lemma1") return verify_lemma1(c);
    if (c.action == "ks") return verify_ks(c);
    throw ValidationError("verify needs one of eq21, growth, lemma1, ks");
  }
  if (c.command == "envelopes") {
    if (c.action == "ks") return envelopes_ks(c);
    if (c.action == "bell") return envelopes_bell(c);
    throw ValidationError("envelopes needs one of ks, bell");
  }
  throw ValidationError("no command given");
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--family,--kind", c.family, "constant | factorial_power | bell | custom");
  app.add_option("--beta", c.beta, "exponent of (n!)^beta");
  app.add_option("--k", c.k, "Bell order");
  app.add_option("--n-max,--n", c.n_max, "stored terms (default: CKS_NMAX or per-command)");
  app.add_option("--log-values", c.log_values, "ln alpha(0..N) for the custom family")->delimiter(',');
  app.add_option("--d", c.d, "model dimension");
  app.add_option("--lambda", c.lambda, "model ladder lambda_0..lambda_{d-1}")->delimiter(',');
  app.add_option("--p", c.p, "norm index");
  app.add_option("--q", c.q, "target index of the reconstruction bound");
  app.add_option("--a", c.a, "growth constant a");
  app.add_option("--directions", c.directions);
  app.add_option("--phases", c.phases);
  app.add_option("--radii", c.radii);
  app.add_option("--max-radius", c.max_radius);
  app.add_option("--grid-seed", c.grid_seed);
  app.add_flag("--refine,!--no-refine", c.refine);
  app.add_option("--phi", c.phi, "chaos expansion JSON (default: seeded random instance)");
  app.add_option("--seed", c.seed, "seed of the random instance");
  app.add_option("--degree", c.degree, "max degree of the random instance");
  app.add_option("--nnz", c.nnz, "nonzero entries of the random instance");
  app.add_option("--mode", c.mode, "test | generalized");
  app.add_option("--k-scale", c.k_scale, "multiplies the rigorous K");
  app.add_option("--lemma-directions", c.lemma_directions);
  app.add_option("--egf", c.egf, "alpha | inverse");
  app.add_option("--table", c.table, "grid | theta");
  app.add_option("--r", c.r, "explicit r values")->delimiter(',');
  app.add_option("--r-min", c.r_min);
  app.add_option("--r-max", c.r_max);
  app.add_option("--r-points", c.r_points);
  app.add_option("--n-lo", c.n_lo);
  app.add_option("--n-hi", c.n_hi);
  app.add_option("--condition", c.conditions, "A1 A2 A2t B1 B1t B2 B2t B3 (default: all)")->delimiter(',');
  app.add_option("--window-lo", c.window_lo);
  app.add_option("--window-hi", c.window_hi);
  app.add_flag("--implications", c.implications);
  app.add_option("--x-max", c.x_max, "largest |xi|_p^2 for eq21");
  app.add_option("--x-points", c.x_points);
  app.add_option("--gap-tolerance", c.gap_tolerance);
  app.add_option("--tail-tolerance", c.tail_tolerance);
  app.add_option("--out", c.out, "write the report here instead of stdout");
  app.add_option("--format", c.format, "json | csv");
}

void load_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  apply_config(j, c);
}

}  // namespace

Json to_json(const RunConfig& cfg) {
  Json j = Json::object();
  for (const Field& f : fields()) j[f.key] = f.get(cfg);
  return j;
}

void apply_config(const Json& j, RunConfig& cfg) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(fields().begin(), fields().end(),
                                 [&key](const Field& f) { return key == f.key; });
    if (it == fields().end()) throw ValidationError("unknown config key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
}

int default_n_max(int fallback) {
  const char* env = std::getenv("CKS_NMAX");
  if (env == nullptr) return fallback;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 1'000'000) {
    throw ValidationError("CKS_NMAX must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<int>(v);
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"Weighted Fock-space numerics: weights, generating functions, conditions, verification", "cks"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.add_option("--config", config_path, "JSON file whose keys override the flags");
  add_options(app, cfg);

  app.add_subcommand("weights", "weight sequence alpha(0..N)");
  app.add_subcommand("genfun", "ln G on an r grid, or the ln Theta(n) table");
  app.add_subcommand("conditions", "window verdicts for the eight conditions");
  app.add_subcommand("model", "ladder and Hilbert-Schmidt norms of the space model");
  CLI::App* verify = app.add_subcommand("verify", "instance-level checks");
  for (const char* name : {"eq21", "growth", "lemma1", "ks"}) verify->add_subcommand(name)->fallthrough();
  verify->require_subcommand(1);
  CLI::App* envelopes = app.add_subcommand("envelopes", "plot-ready envelope tables");
  for (const char* name : {"ks", "bell"}) envelopes->add_subcommand(name)->fallthrough();
  envelopes->require_subcommand(1);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    for (CLI::App* leaf : sub->get_subcommands()) cfg.action = leaf->get_name();
  }

  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
    const Output result = dispatch(cfg);
    if (cfg.out.empty()) {
      out << result.text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw ValidationError("cannot write '" + cfg.out + "'");
      f << result.text;
    }
    if (!result.pass) {
      err << "bound check failed\n";
      return kBoundFailure;
    }
    return kOk;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const NotAdmissible& e) {
    err << "not admissible: " << e.what() << '\n';
    return kValidation;
  } catch (const DegreeOverflow& e) {
    err << "degree overflow: " << e.what() << '\n';
    return kValidation;
  } catch (const TailNotCertified& e) {
    err << "tail not certified: " << e.what() << '\n';
    return kTailNotCertified;
  } catch (const OverflowError& e) {
    err << "overflow: " << e.what() << '\n';
    return kTailNotCertified;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace cks::cli
