#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subkit/alphabet.hpp"
#include "subkit/dsl.hpp"
#include "subkit/letter.hpp"

namespace subkit {

// ---------------------------------------------------------------------------
// Primitivity
// ---------------------------------------------------------------------------

struct PrimitivityOptions {
  double eps = 0.2;
  unsigned p_max = 20;
  std::size_t sample_size = 64;  // random letters on top of the exactness window
  std::uint64_t seed = 1;
  std::size_t max_set_size = 200000;
};

struct PrimitivityCertificate {
  /// Finite alphabets: "certified" / "refuted". Infinite alphabets:
  /// "certified-at-eps" / "refuted-up-to-pMax" / "undetermined".
  std::string verdict;
  bool exact = false;
  double eps = 0.0;
  std::size_t net_size = 0;
  std::optional<unsigned> p;  // smallest working power
  unsigned p_checked = 0;     // powers examined
  std::size_t letters_checked = 0;
  std::string checked_letters;  // description of the sample
  std::vector<Letter> net;
  std::vector<Letter> sample;
  // a counterexample at the largest power examined, when refuted
  std::optional<Letter> counter_letter;
  std::optional<Letter> missed_net_point;
};

PrimitivityCertificate check_primitivity(const SubstitutionSpec& spec, const PrimitivityOptions& options = {});

/// Re-checks a certificate: every net point is within eps of some letter of
/// ρ^p(a) for every sampled a.
bool verify_primitivity(const SubstitutionSpec& spec, const PrimitivityCertificate& cert);

/// Classical test: some power of the Abelianisation is entrywise positive.
bool matrix_primitive(const SubstitutionSpec& spec);

// ---------------------------------------------------------------------------
// Irreducibility
// ---------------------------------------------------------------------------

struct IrreducibilityReport {
  std::string verdict;  // "irreducible" / "reducible"
  bool exact = false;   // finite alphabets; otherwise "at cutoff"
  std::string label;
  unsigned power = 1;
  std::size_t classes = 0;
  std::size_t components = 0;
  std::vector<Letter> witness;  // proper forward-closed subset when reducible
  std::string witness_kind;     // "eventual-range" / "terminal-component"
};

/// Strong connectivity of the letter digraph a → b iff b ◁ ρ^power(a), on the
/// classes of `scheme`.
IrreducibilityReport check_irreducibility(const SubstitutionSpec& spec, const TruncationScheme& scheme,
                                          unsigned power = 1);

// ---------------------------------------------------------------------------
// Quasi-compactness
// ---------------------------------------------------------------------------

struct QuasiCompactLevel {
  unsigned k = 0;
  std::uint64_t c_k = 0;
  Letter argmax;
  double r_lower_pow_k = 0.0;
  bool condition1 = false;
  bool condition2 = false;
};

struct QuasiCompactReport {
  std::vector<Letter> P;
  bool isolated_only = false;
  double r_lower = 0.0;
  bool exact = true;  // C_k exact (exactness window argument)
  std::vector<QuasiCompactLevel> levels;
  std::optional<unsigned> passing_k;
  std::string verdict;  // "quasi-compact" / "not-established"
};

/// C_k(P) = max_a #{b ◁ ρ^k(a) : b ∉ P} compared with rLower^k for k ≤ kMax.
/// Throws std::invalid_argument when P is empty or has foreign letters.
QuasiCompactReport quasi_compact_check(const SubstitutionSpec& spec, const std::vector<Letter>& P, unsigned k_max);

// ---------------------------------------------------------------------------
// Equicontinuity of the column semigroup
// ---------------------------------------------------------------------------

struct EquicontinuityOptions {
  unsigned depth = 12;
  std::vector<double> eps_grid{0.5, 0.25, 0.1, 0.05, 0.02};
  std::size_t max_family = 20000;
  std::int64_t circle_cutoff = 64;
};

struct EquicontinuityReport {
  std::string verdict;  // isometric-semigroup / equicontinuous-to-depth / not-equicontinuous-evidence /
                        // not-applicable / undetermined
  std::size_t columns = 0;
  std::vector<std::string> column_descriptions;
  std::vector<bool> column_isometric;
  std::vector<std::size_t> family_sizes;  // distinct maps of word length ≤ d, d = 1..depth
  bool saturated = false;                  // no new maps at the last depth
  unsigned depth_reached = 0;
  std::vector<double> eps_grid;
  std::vector<std::vector<double>> modulus;  // [depth-1][eps] worst d(f x, f y) over d(x,y) ≤ eps
  std::size_t sample_letters = 0;
};

EquicontinuityReport equicontinuity_check(const SubstitutionSpec& spec, const EquicontinuityOptions& options = {});

// ---------------------------------------------------------------------------
// Length functions
// ---------------------------------------------------------------------------

struct LengthDiagnostics {
  std::string verdict;  // positive-length-found / no-continuous-length-evidence / undetermined
  std::int64_t cutoff = 0;
  std::int64_t cutoff2 = 0;
  double r = 0.0;
  double r2nd = 0.0;  // r at the second cutoff
  bool converged = false;
  double min_length = 0.0;  // ℓ normalised to sup 1
  double ratio = 0.0;       // max/min of ℓ at cutoff
  double ratio2 = 0.0;      // same at cutoff2
  double length_change = 0.0;
  // analysis of the forward-closed core of finite letters
  std::size_t core_size = 0;
  double core_r = 0.0;
  long double core_ratio = 0.0L;
  long double core_ratio2 = 0.0L;
  double core_log10_ratio = 0.0;
  double core_log10_ratio2 = 0.0;
  std::vector<double> tail_ratios;  // ℓ(0,m)/ℓ(0,m−1) (pairs) or ℓ(m)/ℓ(m−1), last 5 m
  std::string note;
};

LengthDiagnostics length_function_diagnostics(const SubstitutionSpec& spec, std::int64_t cutoff = 64,
                                              std::int64_t cutoff2 = 128);

}  // namespace subkit
