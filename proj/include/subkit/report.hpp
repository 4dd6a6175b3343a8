#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "subkit/criteria.hpp"
#include "subkit/discrepancy.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"
#include "subkit/language.hpp"
#include "subkit/operator.hpp"

namespace subkit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// FNV-1a of the canonical text form, as 16 hex digits.
std::string spec_hash(const SubstitutionSpec& spec);

/// {schema, command, spec_hash, seed, config, result}.
Json envelope(const std::string& command, const SubstitutionSpec& spec, const Json& config, std::uint64_t seed,
              Json result);

Json to_json(const AlphabetDecl& alphabet, const Letter& a);
Json to_json(const SubstitutionSpec& spec, const LengthStats& stats);
Json to_json(const TruncationScheme& scheme, const LanguageTable& table);
Json to_json(const SpectrumAnalysis& analysis);
Json to_json(const SpectralReport& report, const TruncationScheme& scheme);
Json to_json(const SecondEigenvalue& r2);
Json to_json(const AlphabetDecl& alphabet, const PrimitivityCertificate& cert);
Json to_json(const AlphabetDecl& alphabet, const IrreducibilityReport& rep);
Json to_json(const AlphabetDecl& alphabet, const QuasiCompactReport& rep);
Json to_json(const EquicontinuityReport& rep);
Json to_json(const LengthDiagnostics& d);
Json to_json(const DiscrepancyReport& rep);

/// n, strongGap_<f> for each panel function, uniformGap, cesaroGap.
std::string convergence_csv(const ConvergenceDiagnostics& d);

/// n, supGap, bound.
std::string discrepancy_csv(const DiscrepancyReport& rep);

}  // namespace subkit
