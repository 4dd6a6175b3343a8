#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subkit/alphabet.hpp"
#include "subkit/letter.hpp"

namespace subkit {

// ---------------------------------------------------------------------------
// Rule AST
// ---------------------------------------------------------------------------

enum class CompareOp { Eq, Ne, Ge, Gt, Le, Lt };

/// `var op value`, or `var % modulus == value` when modulus > 0.
struct Condition {
  std::size_t var = 0;
  CompareOp op = CompareOp::Eq;
  std::int64_t value = 0;
  std::int64_t modulus = 0;

  bool holds(ExtNat v) const;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Conjunction of conditions; empty means `true`.
struct Guard {
  std::vector<Condition> conditions;
  friend bool operator==(const Guard&, const Guard&) = default;
};

/// One coordinate of a pattern or letter expression over N∞.
struct Component {
  enum class Kind { Literal, Infinity, Variable };
  Kind kind = Kind::Literal;
  std::int64_t value = 0;  // literal value, or offset added to the variable
  std::size_t var = 0;

  friend bool operator==(const Component&, const Component&) = default;
};

struct Pattern {
  enum class Kind { Symbol, Nat, Pair, Circle };
  Kind kind = Kind::Nat;
  std::int64_t symbol = 0;
  std::vector<Component> components;  // 1 for Nat, 2 for Pair; offsets are 0
  std::size_t var = 0;                // Circle

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Right-hand-side letter: literal symbol, affine N∞ components, or a circle
/// point `[x] + k·alpha` (the circle unit `1` is x-free with k = 0).
struct LetterExpr {
  enum class Kind { Symbol, Nat, Pair, Circle };
  Kind kind = Kind::Nat;
  std::int64_t symbol = 0;
  std::vector<Component> components;
  bool uses_var = false;
  std::int64_t alpha_multiple = 0;

  friend bool operator==(const LetterExpr&, const LetterExpr&) = default;
};

struct GuardedRule {
  Pattern pattern;
  Guard guard;
  std::vector<LetterExpr> rhs;
  std::vector<std::string> variables;
  int line = 0;

  friend bool operator==(const GuardedRule& a, const GuardedRule& b) {
    return a.pattern == b.pattern && a.guard == b.guard && a.rhs == b.rhs && a.variables == b.variables;
  }
};

/// Rule chosen for a letter. `limit` is set when the letter has an infinite
/// coordinate that was bound to a pattern variable (continuous extension).
struct RuleMatch {
  std::size_t rule = 0;
  bool limit = false;
  std::vector<ExtNat> bindings;
};

class SubstitutionSpec {
 public:
  AlphabetDecl alphabet;
  std::vector<GuardedRule> rules;
  std::size_t max_length = 0;
  std::vector<std::string> warnings;

  /// Largest constant appearing in guards and literal patterns (N∞ families).
  std::int64_t guard_bound() const { return guard_bound_; }
  /// lcm of guard moduli (1 when there are none).
  std::int64_t guard_period() const { return guard_period_; }
  /// Largest |c| over right-hand-side terms var ± c.
  std::int64_t max_offset() const { return max_offset_; }
  /// Largest literal value appearing anywhere in the rules.
  std::int64_t max_literal() const { return max_literal_; }

  std::optional<RuleMatch> match(const Letter& a) const;

  /// Right-hand side of the matched rule evaluated at `a`.
  Word evaluate(const Letter& a) const;

  bool is_constant_length() const;

  friend bool operator==(const SubstitutionSpec& a, const SubstitutionSpec& b) {
    return a.alphabet == b.alphabet && a.rules == b.rules && a.max_length == b.max_length;
  }

 private:
  friend class SpecBuilder;

  struct CellEntry {
    int rule = -1;
    bool limit = false;
  };

  std::size_t cell_of(ExtNat v) const;
  std::size_t cells_per_coordinate() const { return static_cast<std::size_t>(guard_bound_ + guard_period_ + 2); }

  std::int64_t guard_bound_ = 0;
  std::int64_t guard_period_ = 1;
  std::int64_t max_offset_ = 0;
  std::int64_t max_literal_ = 0;
  std::vector<CellEntry> cells_;            // N∞ families
  std::vector<int> symbol_rule_;            // finite family
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum class ErrorKind { Syntax, NonExhaustive, OverlappingGuards, NegativeLetter, Continuity, Alphabet };

std::string to_string(ErrorKind kind);

struct ParseError {
  int line = 0;
  int column = 0;
  ErrorKind kind = ErrorKind::Syntax;
  std::string message;
};

class ParseFailure : public std::runtime_error {
 public:
  explicit ParseFailure(std::vector<ParseError> errors);
  const std::vector<ParseError>& errors() const { return errors_; }
  bool has(ErrorKind kind) const;

 private:
  std::vector<ParseError> errors_;
};

struct ParseOptions {
  /// Reject specs whose `inf` images are not letterwise limits.
  bool check_continuity = true;
};

/// Parses the line-oriented rule language:
///
///   alphabet finite a b c | nat_inf | nat_inf2 | circle alpha=p/q | circle alpha=irrational
///   rule <pattern> [if <guard>] -> <letter-expr> ...
///
/// Throws ParseFailure carrying every error found.
SubstitutionSpec parse(std::string_view source, const ParseOptions& options = {});

/// Canonical text form; parse(pretty_print(s)) == s.
std::string pretty_print(const SubstitutionSpec& spec);

struct ContinuityDiagnostic {
  std::size_t rule = 0;
  int line = 0;
  std::size_t position = 0;  // 1-based rhs position, 0 for a length mismatch
  std::string message;
};

/// Checks that every image of a letter with an infinite coordinate is the
/// letterwise limit of the images of nearby finite letters, and that rhs
/// lengths agree in the limit.
std::vector<ContinuityDiagnostic> validate_continuity(const SubstitutionSpec& spec);

}  // namespace subkit
