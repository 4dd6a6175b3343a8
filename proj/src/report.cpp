#include "subkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace subkit {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json letters_json(const AlphabetDecl& alphabet, const std::vector<Letter>& letters) {
  Json out = Json::array();
  for (const auto& a : letters) out.push_back(format_letter(alphabet, a));
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string spec_hash(const SubstitutionSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : pretty_print(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json envelope(const std::string& command, const SubstitutionSpec& spec, const Json& config, std::uint64_t seed,
              Json result) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["spec_hash"] = spec_hash(spec);
  j["alphabet"] = spec.alphabet.family_name();
  j["seed"] = seed;
  j["config"] = config;
  j["result"] = std::move(result);
  return j;
}

Json to_json(const AlphabetDecl& alphabet, const Letter& a) { return format_letter(alphabet, a); }

Json to_json(const SubstitutionSpec& spec, const LengthStats& s) {
  return {{"k", s.k},
          {"min", s.min},
          {"max", s.max},
          {"argmin", format_letter(spec.alphabet, s.argmin)},
          {"argmax", format_letter(spec.alphabet, s.argmax)},
          {"exact", s.exact},
          {"window", s.window},
          {"letters_scanned", s.letters_scanned}};
}

Json to_json(const TruncationScheme& scheme, const LanguageTable& t) {
  Json j;
  j["n"] = t.n;
  j["P"] = t.power;
  j["form"] = t.form;
  j["exact"] = t.exact;
  j["count"] = t.words.size();
  j["cutoff"] = scheme.cutoff();
  if (t.cross_check) j["cross_check"] = *t.cross_check;
  j["words"] = t.tokens(scheme);
  return j;
}

Json to_json(const SpectralReport& r, const TruncationScheme& scheme) {
  Json j;
  j["rEstimate"] = number(r.r_estimate);
  j["rLower"] = number(r.r_lower);
  j["rUpper"] = number(r.r_upper);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["residuals"] = {{"right", number(r.right_residual)}, {"left", number(r.left_residual)}};
  j["meanErgodicOnly"] = r.mean_ergodic_only;
  j["oscillationPeriod"] = r.oscillation_period;
  j["exactLength"] = r.exact_length;
  j["exactMeasure"] = r.exact_measure;
  j["normalization"] = r.normalization;
  j["measureNormalizedByLength"] = r.measure_normalized_by_length;
  Json classes = Json::array();
  for (const auto& a : scheme.representatives()) classes.push_back(format_letter(scheme.alphabet(), a));
  j["classes"] = std::move(classes);
  j["lengthFunction"] = vector_json(r.length);
  j["eigenmeasure"] = vector_json(r.measure);
  j["frequencies"] = vector_json(r.frequencies);
  return j;
}

Json to_json(const SecondEigenvalue& r2) {
  return {{"value", number(r2.value)},
          {"lower", number(r2.lower)},
          {"upper", number(r2.upper)},
          {"method", r2.method},
          {"truncationDependent", r2.truncation_dependent}};
}

Json to_json(const SpectrumAnalysis& a) {
  Json j = to_json(a.report, a.op.scheme());
  j["cutoff"] = a.op.scheme().cutoff();
  j["size"] = a.op.size();
  j["r2Estimate"] = to_json(a.r2);
  Json bounds = Json::array();
  for (const auto& b : a.bounds)
    bounds.push_back({{"n", b.n},
                      {"min", b.min_length},
                      {"max", b.max_length},
                      {"lower", number(b.lower)},
                      {"upper", number(b.upper)},
                      {"exact", b.exact}});
  j["bounds"] = std::move(bounds);
  if (a.report2) {
    Json second;
    second["cutoff"] = a.op2->scheme().cutoff();
    second["rEstimate"] = number(a.report2->r_estimate);
    second["converged"] = a.report2->converged;
    if (a.r2_second) second["r2Estimate"] = to_json(*a.r2_second);
    j["secondCutoff"] = std::move(second);
  }
  if (a.stability) {
    const auto& s = *a.stability;
    j["cutoffStability"] = {{"rChange", number(s.r_change)},
                            {"lengthChange", number(s.length_change)},
                            {"measureChange", number(s.measure_change)},
                            {"r2Change", s.r2_change ? number(*s.r2_change) : Json(nullptr)},
                            {"r2ThreeDigits", s.r2_three_digits},
                            {"stable", s.stable}};
  }
  return j;
}

Json to_json(const AlphabetDecl& alphabet, const PrimitivityCertificate& c) {
  Json j;
  j["verdict"] = c.verdict;
  j["exact"] = c.exact;
  j["eps"] = c.eps;
  j["netSize"] = c.net_size;
  j["p"] = c.p ? Json(*c.p) : Json(nullptr);
  j["pChecked"] = c.p_checked;
  j["lettersChecked"] = c.letters_checked;
  j["checkedLetters"] = c.checked_letters;
  j["net"] = letters_json(alphabet, c.net);
  if (c.counter_letter) j["counterLetter"] = format_letter(alphabet, *c.counter_letter);
  if (c.missed_net_point) j["missedNetPoint"] = format_letter(alphabet, *c.missed_net_point);
  return j;
}

Json to_json(const AlphabetDecl& alphabet, const IrreducibilityReport& r) {
  Json j;
  j["verdict"] = r.verdict;
  j["exact"] = r.exact;
  j["label"] = r.label;
  j["power"] = r.power;
  j["classes"] = r.classes;
  j["components"] = r.components;
  if (!r.witness.empty()) {
    j["witness"] = letters_json(alphabet, r.witness);
    j["witnessKind"] = r.witness_kind;
  }
  return j;
}

Json to_json(const AlphabetDecl& alphabet, const QuasiCompactReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"k", l.k},
                      {"CkP", l.c_k},
                      {"argmax", format_letter(alphabet, l.argmax)},
                      {"rLowerPowK", number(l.r_lower_pow_k)},
                      {"condition1", l.condition1},
                      {"condition2", l.condition2}});
  return {{"verdict", r.verdict},
          {"P", letters_json(alphabet, r.P)},
          {"isolatedOnly", r.isolated_only},
          {"rLower", number(r.r_lower)},
          {"exact", r.exact},
          {"k", r.passing_k ? Json(*r.passing_k) : Json(nullptr)},
          {"levels", std::move(levels)}};
}

Json to_json(const EquicontinuityReport& r) {
  return {{"verdict", r.verdict},
          {"columns", r.column_descriptions},
          {"columnIsometric", r.column_isometric},
          {"familySizes", r.family_sizes},
          {"saturated", r.saturated},
          {"depth", r.depth_reached},
          {"epsGrid", r.eps_grid},
          {"modulus", r.modulus},
          {"sampleLetters", r.sample_letters}};
}

Json to_json(const LengthDiagnostics& d) {
  Json j;
  j["verdict"] = d.verdict;
  j["cutoffs"] = {d.cutoff, d.cutoff2};
  j["r"] = {number(d.r), number(d.r2nd)};
  j["converged"] = d.converged;
  j["minLength"] = number(d.min_length);
  j["maxMinRatio"] = {number(d.ratio), number(d.ratio2)};
  j["lengthChange"] = number(d.length_change);
  if (d.core_size) {
    j["core"] = {{"size", d.core_size},
                 {"r", number(d.core_r)},
                 {"log10MaxMinRatio", {number(d.core_log10_ratio), number(d.core_log10_ratio2)}},
                 {"tailRatios", d.tail_ratios}};
  }
  j["note"] = d.note;
  return j;
}

Json to_json(const DiscrepancyReport& r) {
  Json j;
  j["weights"] = r.weights.size();
  j["r"] = number(r.r);
  j["r2"] = number(r.r2);
  j["logR2"] = number(r.log_r2);
  j["epsTol"] = r.eps_tol;
  j["fitWindow"] = {r.fit_from, r.fit_to};
  j["fittedSlope"] = r.fitted_slope ? number(*r.fitted_slope) : Json(nullptr);
  j["slopeLimit"] = r.r2 > 0 ? number(std::log(r.r2 * (1 + r.eps_tol))) : Json(nullptr);
  j["fitConstant"] = number(r.fit_constant);
  j["exactZero"] = r.exact_zero;
  j["pass"] = r.pass;
  j["crossChecked"] = r.cross_checked;
  j["crossCheckFailures"] = r.cross_check_failures;
  j["spectralConverged"] = r.spectral_converged;
  j["spectralStable"] = r.spectral_stable;
  j["r2ThreeDigits"] = r.r2_three_digits;
  Json sup = Json::array();
  for (double x : r.sup_gap) sup.push_back(number(x));
  j["supGap"] = std::move(sup);
  return j;
}

std::string convergence_csv(const ConvergenceDiagnostics& d) {
  std::ostringstream out;
  out << "n";
  for (const auto& name : d.names) out << ",strongGap_" << name;
  out << ",uniformGap,cesaroGap\n";
  for (std::size_t n = 0; n < d.uniform_gaps.size(); ++n) {
    out << n;
    for (const auto& g : d.strong_gaps) out << ',' << fmt(g[n]);
    out << ',' << fmt(d.uniform_gaps[n]) << ',' << fmt(n < d.cesaro_gaps.size() ? d.cesaro_gaps[n] : 0.0) << '\n';
  }
  return out.str();
}

std::string discrepancy_csv(const DiscrepancyReport& r) {
  std::ostringstream out;
  out << "n,supGap,bound\n";
  for (std::size_t n = 0; n < r.sup_gap.size(); ++n)
    out << n << ',' << fmt(r.sup_gap[n]) << ',' << fmt(n < r.bound.size() ? r.bound[n] : 0.0) << '\n';
  return out.str();
}

}  // namespace subkit
