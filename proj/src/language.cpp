#include "subkit/language.hpp"

#include <algorithm>
#include <map>

#include "subkit/engine.hpp"

namespace subkit {

namespace {

constexpr std::uint64_t kSeedBudget = 1'000'000;

class FoldedSubstitution {
 public:
  FoldedSubstitution(const SubstitutionSpec& spec, const TruncationScheme& scheme) {
    images_.resize(scheme.size());
    for (std::size_t i = 0; i < scheme.size(); ++i) images_[i] = folded_image(spec, scheme, i);
  }

  ClassWord apply(const ClassWord& w) const {
    ClassWord out;
    for (auto c : w) out.insert(out.end(), images_[c].begin(), images_[c].end());
    return out;
  }

 private:
  std::vector<ClassWord> images_;
};

void collect_subwords(const ClassWord& w, std::size_t n, std::set<ClassWord>& out) {
  if (w.size() < n) return;
  for (std::size_t i = 0; i + n <= w.size(); ++i) out.emplace(w.begin() + static_cast<std::ptrdiff_t>(i),
                                                              w.begin() + static_cast<std::ptrdiff_t>(i + n));
}

bool has_tail(const TruncationScheme& scheme, const std::set<ClassWord>& words) {
  for (const auto& w : words)
    for (auto c : w)
      if (scheme.is_tail_class(c)) return true;
  return false;
}

}  // namespace

std::vector<std::string> LanguageTable::tokens(const TruncationScheme& scheme) const {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(format_word(scheme.alphabet(), class_word_letters(scheme, w)));
  std::sort(out.begin(), out.end());
  return out;
}

NoValidPower::NoValidPower(std::size_t n, unsigned max_power)
    : std::runtime_error("no power P <= " + std::to_string(max_power) + " has every supertile of length >= " +
                         std::to_string(n) + " (the substitution is not growing)") {}

Word class_word_letters(const TruncationScheme& scheme, const ClassWord& w) {
  Word out;
  for (auto c : w) out.push_back(scheme.representative(c));
  return out;
}

namespace {

// Words touching the cutoff class need the letters just above the cutoff
// unfolded, so N∞ tables are built at cutoff 2N and folded down.
bool refine(const TruncationScheme& scheme) {
  const auto f = scheme.alphabet().family;
  return f == AlphabetFamily::NatInf || f == AlphabetFamily::NatInf2;
}

TruncationScheme refined(const TruncationScheme& scheme) {
  return TruncationScheme::build(scheme.alphabet(), 2 * scheme.cutoff());
}

std::set<ClassWord> fold_down(const TruncationScheme& fine, const TruncationScheme& coarse, const std::set<ClassWord>& words) {
  std::set<ClassWord> out;
  for (const auto& w : words) {
    ClassWord f;
    for (auto c : w) f.push_back(coarse.index_of(fine.representative(c)));
    out.insert(std::move(f));
  }
  return out;
}

LanguageTable two_letter_legal_at(const SubstitutionSpec& spec, const TruncationScheme& scheme, unsigned depth) {
  LanguageTable t;
  t.n = 2;
  t.power = depth;
  t.form = "closure";
  // seeds from actual supertiles of the representatives
  for (const auto& a : scheme.representatives()) {
    LengthCounter lengths(spec);
    Word w{a};
    for (unsigned j = 1; j <= depth; ++j) {
      if (lengths.count(a, j) > kSeedBudget) break;
      w = apply_word(spec, w);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) t.words.insert({scheme.index_of(w[i]), scheme.index_of(w[i + 1])});
    }
  }
  // closure under substitution of known 2-words
  FoldedSubstitution rho(spec, scheme);
  std::vector<ClassWord> todo(t.words.begin(), t.words.end());
  while (!todo.empty()) {
    auto w = todo.back();
    todo.pop_back();
    auto img = rho.apply(w);
    for (std::size_t i = 0; i + 1 < img.size(); ++i) {
      ClassWord pair{img[i], img[i + 1]};
      if (t.words.insert(pair).second) todo.push_back(pair);
    }
  }
  t.exact = !has_tail(scheme, t.words);
  return t;
}

unsigned minimal_power(const SubstitutionSpec& spec, std::size_t n, unsigned max_power) {
  for (unsigned p = 0; p <= max_power; ++p) {
    if (p == 0 && n <= 1) return 0;
    if (p == 0) continue;
    if (supertile_length_stats(spec, p).min >= n) return p;
  }
  throw NoValidPower(n, max_power);
}

std::set<ClassWord> union_form(const FoldedSubstitution& rho, const TruncationScheme& scheme,
                               const std::set<ClassWord>& two, std::size_t n, unsigned P) {
  std::set<ClassWord> out;
  std::vector<ClassWord> base;
  for (std::size_t c = 0; c < scheme.size(); ++c) base.push_back({c});
  base.insert(base.end(), two.begin(), two.end());
  for (auto w : base) {
    for (unsigned j = 0; j <= P; ++j) {
      collect_subwords(w, n, out);
      if (j < P) w = rho.apply(w);
    }
  }
  return out;
}

std::set<ClassWord> primitive_form(const FoldedSubstitution& rho, const std::set<ClassWord>& two, std::size_t n,
                                   unsigned P) {
  std::set<ClassWord> out;
  for (auto w : two) {
    for (unsigned j = 0; j < P; ++j) w = rho.apply(w);
    collect_subwords(w, n, out);
  }
  return out;
}

LanguageTable legal_words_at(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t n,
                             const LanguageOptions& options) {
  LanguageTable t;
  t.n = n;
  FoldedSubstitution rho(spec, scheme);
  try {
    t.power = minimal_power(spec, n, options.max_power);
  } catch (const NoValidPower&) {
    // some letter never reaches length n: iterate the union form until the
    // subwords of every length up to n are unchanged for two consecutive levels
    const auto two = two_letter_legal_at(spec, scheme, options.two_letter_depth).words;
    std::set<ClassWord> cur(two.begin(), two.end());
    for (std::size_t c = 0; c < scheme.size(); ++c) cur.insert({c});
    std::vector<std::set<ClassWord>> by_length(n + 1);
    std::size_t last = 0;
    unsigned stable = 0;
    const unsigned levels = std::max<unsigned>(options.max_power, options.stabilization_levels);
    for (unsigned P = 0; P <= levels && stable < 2; ++P) {
      std::size_t total = 0, letters = 0;
      for (std::size_t m = 1; m <= n; ++m) {
        for (const auto& w : cur) collect_subwords(w, m, by_length[m]);
        total += by_length[m].size();
      }
      stable = P > 0 && total == last ? stable + 1 : 0;
      last = total;
      t.power = P;
      std::set<ClassWord> next;
      for (const auto& w : cur) {
        auto img = rho.apply(w);
        letters += img.size();
        next.insert(std::move(img));
      }
      if (letters > 50'000'000) break;
      cur = std::move(next);
    }
    if (stable < 2) throw NoValidPower(n, levels);
    t.words = std::move(by_length[n]);
    t.form = "union-stabilized";
    t.exact = !has_tail(scheme, t.words);
    return t;
  }
  const auto two = two_letter_legal_at(spec, scheme, std::max(options.two_letter_depth, t.power)).words;
  if (options.primitive && n >= 2) {
    t.form = "primitive";
    t.words = primitive_form(rho, two, n, t.power);
    if (n <= 4) t.cross_check = t.words == union_form(rho, scheme, two, n, t.power);
  } else {
    t.form = "union";
    t.words = union_form(rho, scheme, two, n, t.power);
  }
  t.exact = !has_tail(scheme, t.words);
  return t;
}

}  // namespace

LanguageTable two_letter_legal(const SubstitutionSpec& spec, const TruncationScheme& scheme, unsigned depth) {
  if (!refine(scheme)) return two_letter_legal_at(spec, scheme, depth);
  const auto fine = refined(scheme);
  auto t = two_letter_legal_at(spec, fine, depth);
  t.words = fold_down(fine, scheme, t.words);
  t.exact = !has_tail(scheme, t.words);
  return t;
}

LanguageTable legal_words(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t n,
                          const LanguageOptions& options) {
  if (n == 0) throw std::invalid_argument("word length must be at least 1");
  if (!refine(scheme)) return legal_words_at(spec, scheme, n, options);
  const auto fine = refined(scheme);
  auto t = legal_words_at(spec, fine, n, options);
  t.words = fold_down(fine, scheme, t.words);
  t.exact = !has_tail(scheme, t.words);
  return t;
}

std::set<Word> oracle_legal_words(const SubstitutionSpec& spec, std::size_t n, unsigned max_level) {
  if (spec.alphabet.family != AlphabetFamily::Finite) throw std::invalid_argument("oracle needs a finite alphabet");
  std::set<Word> all;  // subwords of length ≤ n
  std::vector<Word> level;
  for (std::size_t i = 0; i < spec.alphabet.symbols.size(); ++i) level.push_back({Letter::symbol(static_cast<std::int64_t>(i))});
  unsigned stable = 0;
  for (unsigned j = 0; j <= max_level && stable < 2; ++j) {
    const auto before = all.size();
    for (const auto& w : level)
      for (std::size_t len = 1; len <= n; ++len)
        for (std::size_t i = 0; i + len <= w.size(); ++i) all.emplace(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + len));
    stable = all.size() == before && j > 0 ? stable + 1 : 0;
    std::uint64_t total = 0;
    for (auto& w : level) {
      w = apply_word(spec, w);
      total += w.size();
    }
    if (total > 50'000'000) break;
  }
  std::set<Word> out;
  for (const auto& w : all)
    if (w.size() == n) out.insert(w);
  return out;
}

RepetitivityResult repetitivity_probe(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t n,
                                      double eps, std::size_t n_max, const LanguageOptions& options) {
  RepetitivityResult r;
  r.n = n;
  r.eps = eps;
  const auto small = legal_words(spec, scheme, n, options);
  std::vector<Word> targets;
  for (const auto& u : small.words) targets.push_back(class_word_letters(scheme, u));
  for (std::size_t N = n; N <= n_max; ++N) {
    r.checked_up_to = N;
    const auto big = legal_words(spec, scheme, N, options);
    bool all_ok = true;
    for (const auto& cw : big.words) {
      const auto w = class_word_letters(scheme, cw);
      for (const auto& u : targets) {
        bool found = false;
        for (std::size_t i = 0; i + n <= w.size() && !found; ++i) {
          Word sub(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + n));
          found = word_distance(spec.alphabet, sub, u) < eps;
        }
        if (!found) {
          all_ok = false;
          break;
        }
      }
      if (!all_ok) break;
    }
    if (all_ok) {
      r.N = N;
      return r;
    }
  }
  r.note = "no N <= " + std::to_string(n_max) + " works";
  return r;
}

}  // namespace subkit
