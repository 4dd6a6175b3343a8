#include "doctest.h"

#include <random>

#include "subkit/bundled.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"
#include "subkit/language.hpp"

using namespace subkit;

namespace {

SubstitutionSpec bundled(const char* name) { return parse(find_bundled(name)->source); }

std::set<std::string> as_strings(const SubstitutionSpec& spec, const std::set<Word>& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(format_word(spec.alphabet, w));
  return out;
}

std::set<std::string> as_strings(const TruncationScheme& s, const LanguageTable& t) {
  auto v = t.tokens(s);
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("two-letter legal words") {
  auto fib = bundled("fibonacci");
  auto s = TruncationScheme::build(fib.alphabet, 8);
  CHECK(as_strings(s, two_letter_legal(fib, s, 4)) == std::set<std::string>{"a a", "a b", "b a"});
  auto dbl = bundled("doubling");
  auto sd = TruncationScheme::build(dbl.alphabet, 8);
  CHECK(as_strings(sd, two_letter_legal(dbl, sd, 4)) == std::set<std::string>{"a a"});
  auto nr = bundled("not_realised");
  auto sn = TruncationScheme::build(nr.alphabet, 8);
  auto t = two_letter_legal(nr, sn, 4);
  CHECK(as_strings(sn, t) == std::set<std::string>{"a a", "a b"});
  CHECK(t.exact);
}

TEST_CASE("legal words examples") {
  auto fib = bundled("fibonacci");
  auto s = TruncationScheme::build(fib.alphabet, 8);
  auto t3 = legal_words(fib, s, 3);
  CHECK(as_strings(s, t3) == std::set<std::string>{"a a b", "a b a", "b a a", "b a b"});
  auto dbl = bundled("doubling");
  auto sd = TruncationScheme::build(dbl.alphabet, 8);
  CHECK(as_strings(sd, legal_words(dbl, sd, 5)) == std::set<std::string>{"a a a a a"});

  // a -> a never reaches length 2, so the union is iterated until it settles
  auto nr = bundled("not_realised");
  auto sn = TruncationScheme::build(nr.alphabet, 4);
  for (std::size_t n = 2; n <= 5; ++n) {
    auto t = legal_words(nr, sn, n);
    CHECK(t.form == "union-stabilized");
    std::set<std::string> oracle;
    for (const auto& w : oracle_legal_words(nr, n)) oracle.insert(format_word(nr.alphabet, w));
    CHECK(as_strings(sn, t) == oracle);
  }
  CHECK(as_strings(sn, legal_words(nr, sn, 3)) == std::set<std::string>{"a a a", "a a b"});
  LanguageOptions tight;
  tight.max_power = 1;
  tight.stabilization_levels = 1;
  CHECK_THROWS_AS(legal_words(nr, sn, 3, tight), NoValidPower);
  auto ng = bundled("nongrowing");
  auto t = legal_words(ng, TruncationScheme::build(ng.alphabet, 4), 2);
  CHECK(t.form == "union-stabilized");
  CHECK_FALSE(t.words.empty());
}

TEST_CASE("quasi-compact example folded at N=6 agrees with brute-force supertiles") {
  auto qc = bundled("qc");
  auto s = TruncationScheme::build(qc.alphabet, 6);
  auto t = legal_words(qc, s, 2);
  auto words = as_strings(s, t);
  for (const char* w : {"0 1", "1 0", "0 0", "0 2", "1 3", "2 4"}) CHECK(words.count(w) == 1);
  // consecutive letters inside 0 (n-1) (n+1) differ by 2, and images start with 0
  CHECK(words.count("2 3") == 0);
  CHECK_FALSE(t.exact);
  // folded 2-subwords of level-8 supertiles of the representatives
  std::set<ClassWord> brute;
  for (const auto& a : s.representatives()) {
    for (unsigned k = 0; k <= 8; ++k) {
      Word w = expand(qc, a, k);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) brute.insert({s.index_of(w[i]), s.index_of(w[i + 1])});
    }
  }
  for (const auto& w : brute) CHECK(t.words.count(w) == 1);
}

TEST_CASE("oracle equivalence on Fibonacci and Thue-Morse") {
  for (const char* name : {"fibonacci", "thue_morse"}) {
    auto spec = bundled(name);
    auto s = TruncationScheme::build(spec.alphabet, 4);
    for (std::size_t n = 1; n <= 6; ++n) {
      auto t = legal_words(spec, s, n);
      CHECK(t.exact);
      CHECK(as_strings(s, t) == as_strings(spec, oracle_legal_words(spec, n)));
    }
  }
}

TEST_CASE("primitive form cross-check") {
  auto fib = bundled("fibonacci");
  auto s = TruncationScheme::build(fib.alphabet, 4);
  LanguageOptions opts;
  opts.primitive = true;
  for (std::size_t n = 2; n <= 4; ++n) {
    auto t = legal_words(fib, s, n, opts);
    REQUIRE(t.cross_check.has_value());
    CHECK(*t.cross_check);
    CHECK(t.form == "primitive");
  }
}

TEST_CASE("closure properties") {
  for (const char* name : {"fibonacci", "thue_morse", "nonCL", "qc", "circle", "swap"}) {
    auto spec = bundled(name);
    auto s = TruncationScheme::build(spec.alphabet, 8);
    std::map<std::size_t, LanguageTable> tables;
    for (std::size_t n = 1; n <= 4; ++n) tables[n] = legal_words(spec, s, n);
    for (std::size_t n = 2; n <= 4; ++n) {
      for (const auto& w : tables[n].words) {
        ClassWord a(w.begin(), w.end() - 1), b(w.begin() + 1, w.end());
        CHECK(tables[n - 1].words.count(a) == 1);
        CHECK(tables[n - 1].words.count(b) == 1);
        // substitution closure, on words whose letters are their own representatives
        bool tail = false;
        for (auto c : w) tail = tail || s.is_tail_class(c);
        if (tail) continue;
        ClassWord img;
        for (auto c : w) {
          auto part = folded_image(spec, s, c);
          img.insert(img.end(), part.begin(), part.end());
        }
        for (std::size_t i = 0; i + n <= img.size(); ++i)
          CHECK(tables[n].words.count(ClassWord(img.begin() + static_cast<std::ptrdiff_t>(i),
                                                img.begin() + static_cast<std::ptrdiff_t>(i + n))) == 1);
      }
    }
  }
}

TEST_CASE("truncation monotonicity on the quasi-compact example") {
  auto qc = bundled("qc");
  auto coarse = TruncationScheme::build(qc.alphabet, 8);
  auto fine = TruncationScheme::build(qc.alphabet, 16);
  for (std::size_t n = 1; n <= 4; ++n) {
    auto tc = legal_words(qc, coarse, n);
    auto tf = legal_words(qc, fine, n);
    std::set<ClassWord> image;
    for (const auto& w : tf.words) {
      ClassWord f;
      for (auto c : w) f.push_back(coarse.index_of(fine.representative(c)));
      image.insert(f);
    }
    CHECK(image == tc.words);
  }
}

TEST_CASE("repetitivity probe") {
  auto fib = bundled("fibonacci");
  auto s = TruncationScheme::build(fib.alphabet, 4);
  auto r = repetitivity_probe(fib, s, 1, 0.5, 8);
  REQUIRE(r.N.has_value());
  CHECK(*r.N == 3);
  auto dbl = bundled("doubling");
  auto sd = TruncationScheme::build(dbl.alphabet, 4);
  for (std::size_t n = 1; n <= 4; ++n) CHECK(repetitivity_probe(dbl, sd, n, 0.5, 8).N == std::optional<std::size_t>(n));
  auto swap = bundled("swap");
  auto ss = TruncationScheme::build(swap.alphabet, 4);
  CHECK_FALSE(repetitivity_probe(swap, ss, 1, 0.5, 6).N.has_value());
}
