#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subkit/letter.hpp"

namespace subkit {

enum class AlphabetFamily { Finite, NatInf, NatInf2, Circle };

/// Rotation angle of a circle alphabet, in turns. Rational angles are exact;
/// the irrational tag stands for the golden-mean rotation (√5 − 1)/2 and is
/// only ever handled through orbit counts k·α.
struct Rotation {
  bool irrational = false;
  std::int64_t p = 0;
  std::int64_t q = 1;

  double turns() const;
  friend bool operator==(const Rotation&, const Rotation&) = default;
};

struct AlphabetDecl {
  AlphabetFamily family = AlphabetFamily::Finite;
  std::vector<std::string> symbols;  // finite family only
  Rotation rotation;                 // circle family only

  static AlphabetDecl finite(std::vector<std::string> symbols);
  static AlphabetDecl nat_inf();
  static AlphabetDecl nat_inf2();
  static AlphabetDecl circle(Rotation rotation);

  /// Name of the metric realising the alphabet's topology.
  std::string metric_name() const;
  std::string family_name() const;

  friend bool operator==(const AlphabetDecl&, const AlphabetDecl&) = default;
};

class AlphabetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// True when `a` is a well-formed letter of the declared alphabet.
bool contains(const AlphabetDecl& alphabet, const Letter& a);

/// Position on the circle in turns, in [0, 1).
double circle_position(const AlphabetDecl& alphabet, const Letter& a);

/// Metric on letters. Finite: discrete; N∞: |1/(n+1) − 1/(m+1)|; pairs: max of
/// components; circle: arc length in turns. Throws AlphabetError for letters of
/// different families.
double distance(const AlphabetDecl& alphabet, const Letter& a, const Letter& b);

/// Letterwise maximum distance of two words of equal length.
double word_distance(const AlphabetDecl& alphabet, const Word& u, const Word& v);

/// A finite set of letters such that every letter is within eps of one of them.
std::vector<Letter> epsilon_net(const AlphabetDecl& alphabet, double eps);

bool is_isolated(const AlphabetDecl& alphabet, const Letter& a);

std::string format_letter(const AlphabetDecl& alphabet, const Letter& a);
std::string format_word(const AlphabetDecl& alphabet, const Word& w);
Letter parse_letter(const AlphabetDecl& alphabet, std::string_view token);
Word parse_word(const AlphabetDecl& alphabet, std::string_view text);

/// Continued-fraction convergents p/q of x with q ≤ max_q, in order.
std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double x, std::int64_t max_q);

/// Finite quotient of an alphabet: a list of representative letters and a fold
/// map sending every letter to the index of its representative.
///
/// N∞ at cutoff N folds n > N onto ∞; N∞² folds each coordinate independently;
/// a circle is replaced by the q-grid of a convergent p/q of its rotation, on
/// which the rotation acts exactly.
class TruncationScheme {
 public:
  static TruncationScheme build(const AlphabetDecl& alphabet, std::int64_t cutoff);

  const AlphabetDecl& alphabet() const { return alphabet_; }
  std::int64_t cutoff() const { return cutoff_; }
  std::size_t size() const { return representatives_.size(); }
  const std::vector<Letter>& representatives() const { return representatives_; }
  const Letter& representative(std::size_t i) const { return representatives_.at(i); }

  /// Grid rotation p/q for circle schemes.
  std::int64_t grid_p() const { return grid_p_; }
  std::int64_t grid_q() const { return grid_q_; }

  Letter fold(const Letter& a) const;
  std::size_t index_of(const Letter& a) const;

  /// The class of ∞ (or (∞,∞)) when the alphabet has one.
  std::optional<std::size_t> limit_class() const;

  /// True when class i stands for more than its representative.
  bool is_tail_class(std::size_t i) const;

  /// Largest distance from a folded letter to its representative (circle:
  /// grid letters of another resolution only; orbit points drift with k).
  double fold_resolution() const;

 private:
  std::size_t nat_index(ExtNat v) const;

  AlphabetDecl alphabet_;
  std::int64_t cutoff_ = 0;
  std::int64_t grid_p_ = 0;
  std::int64_t grid_q_ = 1;
  std::vector<Letter> representatives_;
};

Word fold_word(const TruncationScheme& scheme, const Word& w);

}  // namespace subkit
