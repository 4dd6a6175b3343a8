#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "subkit/alphabet.hpp"
#include "subkit/dsl.hpp"
#include "subkit/letter.hpp"

namespace subkit {

inline constexpr std::uint64_t kDefaultExpansionBudget = 100'000'000;

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t estimated, std::uint64_t budget);
  std::uint64_t estimated() const { return estimated_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t estimated_;
  std::uint64_t budget_;
};

/// ρ(a). Throws std::out_of_range when no rule matches.
Word apply(const SubstitutionSpec& spec, const Letter& a);

/// ρ applied letterwise and concatenated.
Word apply_word(const SubstitutionSpec& spec, const Word& w);

/// ρ^k(a), refusing to materialise more than `budget` letters.
Word expand(const SubstitutionSpec& spec, const Letter& a, unsigned k, std::uint64_t budget = kDefaultExpansionBudget);

/// Calls `visit` on every letter of ρ^k(a) in order without materialising it.
void visit_expansion(const SubstitutionSpec& spec, const Letter& a, unsigned k,
                     const std::function<void(const Letter&)>& visit);

/// Saturating exact supertile lengths |ρ^k(a)|, memoised per (letter, level).
/// With a letter set P it instead counts the letters of ρ^k(a) outside P.
class LengthCounter {
 public:
  explicit LengthCounter(const SubstitutionSpec& spec);
  LengthCounter(const SubstitutionSpec& spec, std::set<Letter> excluded);

  std::uint64_t count(const Letter& a, unsigned k);

 private:
  struct Key {
    Letter letter;
    unsigned level;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept { return LetterHash{}(k.letter) * 31 + k.level; }
  };

  const SubstitutionSpec& spec_;
  std::optional<std::set<Letter>> excluded_;
  std::unordered_map<Key, std::uint64_t, KeyHash> memo_;
  std::unordered_map<Letter, Word, LetterHash> images_;
};

/// Letters whose behaviour under k levels of substitution is representative
/// of the whole alphabet: finitely many N∞ values up to the exactness window
/// W = K + k·c + L (guard bound, max offset, guard period) plus ∞, every
/// finite symbol, or the grid of a circle truncation.
struct ExactnessWindow {
  std::vector<Letter> letters;
  std::int64_t window = 0;
  bool exact = true;
};

ExactnessWindow exactness_window(const SubstitutionSpec& spec, unsigned k, std::int64_t extra_constant = 0,
                                 std::int64_t circle_cutoff = 64);

struct LengthStats {
  unsigned k = 0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  Letter argmin;
  Letter argmax;
  bool exact = false;
  std::int64_t window = 0;
  std::size_t letters_scanned = 0;
};

/// min / max of |ρ^k(a)| over the alphabet.
LengthStats supertile_length_stats(const SubstitutionSpec& spec, unsigned k);

enum class GrowthVerdict { Growing, EventuallyConstant, Undetermined };
std::string to_string(GrowthVerdict v);

struct GrowthReport {
  std::vector<std::uint64_t> lengths;  // |ρ^k(a)| for k = 0..kMax
  GrowthVerdict verdict = GrowthVerdict::Undetermined;
};

GrowthReport growth_probe(const SubstitutionSpec& spec, const Letter& a, unsigned k_max);

/// Finite alphabets only: does |ρ^k(a)| → ∞? Exact (graph criterion).
bool letter_grows(const SubstitutionSpec& spec, const Letter& a);

/// Column map ρ_i of a constant-length substitution.
struct Column {
  std::size_t position = 0;
  std::string description;  // per-rule expressions, e.g. "a->a, b->b"
};

std::optional<std::vector<Column>> columns(const SubstitutionSpec& spec);

/// ρ_i(a): letter `position` of ρ(a).
Letter apply_column(const SubstitutionSpec& spec, std::size_t position, const Letter& a);

/// ρ on fold classes: class indices of fold(ρ(representative i)).
std::vector<std::size_t> folded_image(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t i);

/// Thread-safe LRU cache of supertiles with a byte budget.
class SupertileCache {
 public:
  SupertileCache(const SubstitutionSpec& spec, std::size_t byte_budget);

  std::shared_ptr<const Word> get(const Letter& a, unsigned k);

  std::size_t bytes() const;
  std::size_t entries() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  using Key = std::pair<Letter, unsigned>;
  struct Entry {
    std::shared_ptr<const Word> word;
    std::list<Key>::iterator lru;
  };

  void insert_locked(const Key& key, std::shared_ptr<const Word> word);

  const SubstitutionSpec& spec_;
  std::size_t budget_;
  mutable std::mutex mutex_;
  std::map<Key, Entry> entries_;
  std::list<Key> lru_;
  std::size_t bytes_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace subkit
