#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subkit/alphabet.hpp"
#include "subkit/dsl.hpp"

namespace subkit {

/// A word over the fold classes of a truncation scheme.
using ClassWord = std::vector<std::size_t>;

struct LanguageTable {
  std::size_t n = 0;
  std::set<ClassWord> words;
  bool exact = true;       // false once a tail class occurs in some word
  unsigned power = 0;      // the P used
  std::string form;        // "union", "primitive" or "union-stabilized"
  std::optional<bool> cross_check;  // primitive form vs union form, small n only

  /// Words as sorted token strings over the representatives.
  std::vector<std::string> tokens(const TruncationScheme& scheme) const;
};

class NoValidPower : public std::runtime_error {
 public:
  NoValidPower(std::size_t n, unsigned max_power);
};

struct LanguageOptions {
  bool primitive = false;      // use S_n(ρ^P(L²)), cross-checked for n ≤ 4
  unsigned max_power = 40;     // give up looking for P beyond this
  unsigned two_letter_depth = 6;
  unsigned stabilization_levels = 4096;  // cap for the non-growing fallback
};

/// Folded 2-letter subwords of ρ^j(a), j ≤ depth, closed under
/// (u,v) ↦ 2-subwords of fold(ρ(u)ρ(v)).
LanguageTable two_letter_legal(const SubstitutionSpec& spec, const TruncationScheme& scheme, unsigned depth);

/// Legal words of length n: ⋃_{j ≤ P} S_n(ρ^j(A ∪ L²)) with P minimal such
/// that every supertile ρ^P(a) has at least n letters. When no such P exists
/// the union is taken over growing P until it is unchanged twice in a row
/// (form "union-stabilized").
LanguageTable legal_words(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t n,
                          const LanguageOptions& options = {});

/// Brute force over finite alphabets: length-n subwords of ρ^j(a) over all
/// letters a, j = 0, 1, ... until the set of subwords of length ≤ n is
/// unchanged for two consecutive j.
std::set<Word> oracle_legal_words(const SubstitutionSpec& spec, std::size_t n, unsigned max_level = 64);

/// Converts a class word back to representative letters.
Word class_word_letters(const TruncationScheme& scheme, const ClassWord& w);

struct RepetitivityResult {
  std::optional<std::size_t> N;
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t checked_up_to = 0;
  std::string note;
};

/// Smallest N ≤ NMax such that every legal N-word contains, for every legal
/// n-word u, a subword within eps of u.
RepetitivityResult repetitivity_probe(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t n,
                                      double eps, std::size_t n_max, const LanguageOptions& options = {});

}  // namespace subkit
