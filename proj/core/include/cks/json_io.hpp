#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>

#include "cks/characterize.hpp"
#include "cks/conditions.hpp"
#include "cks/fockmodel.hpp"
#include "cks/genfun.hpp"
#include "cks/weights.hpp"

namespace cks {

using Json = nlohmann::ordered_json;

/// {"kind", "beta"?, "k"?, "n_max", "log_alpha"}. Doubles are written with
/// round-trip precision, so from_json(to_json(w)) reproduces every bit.
Json to_json(const WeightSequence& ws);
WeightSequence weights_from_json(const Json& j);

/// Margins go to the CSV at margins_csv_path when given (recorded as "margins_csv"),
/// otherwise inline as "margins".
Json to_json(const ConditionReport& report, const std::string& margins_csv_path = {});

/// {"d", "lambda", "N", "tensors": [{"degree", "log_scale"?, "entries": [{"idx", "re", "im"}]}]}.
Json to_json(const ChaosExpansion& phi);
ChaosExpansion expansion_from_json(const Json& j);

Json to_json(const CPoint& xi);
CPoint point_from_json(const Json& j);

Json to_json(const VerificationReport& report);
Json to_json(const Lemma1Report& report);
Json to_json(const KsEnvelope& env);
Json to_json(const Eq21Check& check);

/// "index,value,tail_bound" rows of ln(gamma_n r^n) for n <= last, then the tail bound.
std::string genfun_csv(const GenFunEval& gf, double r, int last);
/// "index,value,tail_bound" with index = r, value = ln G(r) and the log tail bound.
std::string egf_grid_csv(const GenFunEval& gf, std::span<const double> r_grid);
/// "index,value,tail_bound" with index = n, value = ln Theta(n) and the log tail
/// bound of G_{1/alpha} at the minimizer.
std::string theta_csv(const WeightSequence& ws, int n_lo, int n_hi);
std::string margins_csv(const ConditionReport& report);
std::string bell_envelope_csv(std::span<const BellEnvelopeRow> rows);

/// JSON has no infinities; non-finite values become the strings "inf", "-inf", "nan".
Json json_number(double x);

}  // namespace cks
