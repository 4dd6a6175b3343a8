#include "doctest.h"

#include <random>
#include <thread>

#include "subkit/bundled.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"

using namespace subkit;

namespace {

SubstitutionSpec bundled(const char* name) { return parse(find_bundled(name)->source); }

std::string show(const SubstitutionSpec& s, const Word& w) { return format_word(s.alphabet, w); }

}  // namespace

TEST_CASE("apply examples") {
  auto qc = bundled("qc");
  CHECK(show(qc, apply(qc, Letter::nat(1))) == "0 0 2");
  auto nonCL = bundled("nonCL");
  CHECK(show(nonCL, apply(nonCL, Letter::inf())) == "0 inf inf");
  auto id = parse("alphabet finite a\nrule a -> a\n");
  CHECK(show(id, apply(id, Letter::symbol(0))) == "a");
}

TEST_CASE("expand examples") {
  auto qc = bundled("qc");
  auto w = expand(qc, Letter::nat(0), 2);
  CHECK(show(qc, w) == "0 1 0 0 2");
  CHECK(w.size() == 5);
  auto fib = bundled("fibonacci");
  CHECK(show(fib, expand(fib, Letter::symbol(0), 3)) == "a b a a b");
  CHECK(show(fib, expand(fib, Letter::symbol(1), 0)) == "b");
  CHECK_THROWS_AS(expand(fib, Letter::symbol(0), 40, 1000), BudgetExceeded);
}

TEST_CASE("cocycle identity and streaming agree with materialised expansion") {
  for (const auto& b : bundled_specs()) {
    auto spec = parse(b.source);
    auto window = exactness_window(spec, 2);
    for (std::size_t i = 0; i < window.letters.size(); i += std::max<std::size_t>(1, window.letters.size() / 12)) {
      const auto& a = window.letters[i];
      for (unsigned j = 0; j <= 4; ++j)
        for (unsigned k = 0; j + k <= 6 && k <= 4; ++k) {
          Word lhs = expand(spec, a, j + k);
          Word rhs;
          for (const auto& x : expand(spec, a, j)) {
            auto part = expand(spec, x, k);
            rhs.insert(rhs.end(), part.begin(), part.end());
          }
          CHECK(lhs == rhs);
          CHECK(lhs.size() <= static_cast<std::size_t>(std::pow(spec.max_length, j + k)) + 0);
        }
      Word streamed;
      visit_expansion(spec, a, 5, [&](const Letter& x) { streamed.push_back(x); });
      CHECK(streamed == expand(spec, a, 5));
      LengthCounter counter(spec);
      CHECK(counter.count(a, 5) == streamed.size());
    }
  }
}

TEST_CASE("supertile length statistics") {
  auto qc = bundled("qc");
  auto s2 = supertile_length_stats(qc, 2);
  CHECK(s2.min == 5);
  CHECK(s2.max == 8);
  CHECK(s2.exact);
  auto nonCL = bundled("nonCL");
  auto s1 = supertile_length_stats(nonCL, 1);
  CHECK(s1.min == 3);
  CHECK(s1.max == 4);
  auto tm = bundled("thue_morse");
  for (unsigned k = 1; k <= 6; ++k) {
    auto s = supertile_length_stats(tm, k);
    CHECK(s.min == (1u << k));
    CHECK(s.max == (1u << k));
  }
  auto circle = bundled("circle");
  CHECK(supertile_length_stats(circle, 3).min == 8);
}

TEST_CASE("exactness window agrees with a wider brute-force scan") {
  for (const char* name : {"nonCL", "qc", "nongrowing", "tripled"}) {
    auto spec = parse(find_bundled(name)->source);
    for (unsigned k = 1; k <= 4; ++k) {
      auto stats = supertile_length_stats(spec, k);
      LengthCounter counter(spec);
      std::uint64_t lo = UINT64_MAX, hi = 0;
      const std::int64_t wide = stats.window + 25;
      for (std::int64_t x = 0; x <= wide; ++x) {
        if (spec.alphabet.family == AlphabetFamily::NatInf) {
          auto n = counter.count(Letter::nat(x), k);
          lo = std::min(lo, n);
          hi = std::max(hi, n);
        } else {
          for (std::int64_t y = 0; y <= wide; ++y) {
            auto n = counter.count(Letter::pair(x, y), k);
            lo = std::min(lo, n);
            hi = std::max(hi, n);
          }
        }
      }
      CHECK(lo >= stats.min);
      CHECK(hi <= stats.max);
    }
  }
}

TEST_CASE("growth probe") {
  auto ng = bundled("nongrowing");
  auto g = growth_probe(ng, Letter::pair(2, 0), 10);
  CHECK(g.verdict == GrowthVerdict::EventuallyConstant);
  CHECK(g.lengths.back() == 3);
  auto id = parse("alphabet finite a\nrule a -> a\n");
  auto gi = growth_probe(id, Letter::symbol(0), 5);
  CHECK(gi.verdict == GrowthVerdict::EventuallyConstant);
  CHECK(gi.lengths == std::vector<std::uint64_t>(6, 1));
  auto nonCL = bundled("nonCL");
  auto gn = growth_probe(nonCL, Letter::nat(0), 6);
  CHECK(gn.verdict == GrowthVerdict::Growing);
  for (std::size_t i = 1; i < gn.lengths.size(); ++i) CHECK(gn.lengths[i] > gn.lengths[i - 1]);
}

TEST_CASE("exact growth test on finite alphabets") {
  auto nr = bundled("not_realised");
  CHECK_FALSE(letter_grows(nr, Letter::symbol(0)));
  CHECK(letter_grows(nr, Letter::symbol(1)));
  auto fib = bundled("fibonacci");
  CHECK(letter_grows(fib, Letter::symbol(1)));
  // a -> b, b -> a: a permutation never grows; c -> a c grows linearly
  auto perm = parse("alphabet finite a b c\nrule a -> b\nrule b -> a\nrule c -> a c\n");
  CHECK_FALSE(letter_grows(perm, Letter::symbol(0)));
  CHECK(letter_grows(perm, Letter::symbol(2)));
  // agreement with lengths on random finite substitutions
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::string src = "alphabet finite a b c d\n";
    const char* names[] = {"a", "b", "c", "d"};
    for (int i = 0; i < 4; ++i) {
      src += std::string("rule ") + names[i] + " ->";
      int len = 1 + static_cast<int>(rng() % 3);
      if (rng() % 2) len = 1;
      for (int j = 0; j < len; ++j) src += std::string(" ") + names[rng() % 4];
      src += "\n";
    }
    auto spec = parse(src);
    LengthCounter counter(spec);
    for (int i = 0; i < 4; ++i) {
      bool grows = letter_grows(spec, Letter::symbol(i));
      // bounded lengths are constant after a transient of at most 4 levels
      bool increased = counter.count(Letter::symbol(i), 60) > counter.count(Letter::symbol(i), 30);
      CHECK(grows == increased);
    }
  }
}

TEST_CASE("columns") {
  auto circle = bundled("circle");
  auto cols = columns(circle);
  REQUIRE(cols.has_value());
  REQUIRE(cols->size() == 2);
  CHECK((*cols)[0].description == "x -> x");
  CHECK((*cols)[1].description == "x -> x+alpha");
  CHECK_FALSE(columns(bundled("fibonacci")).has_value());
  auto tm = bundled("thue_morse");
  auto tcols = columns(tm);
  REQUIRE(tcols.has_value());
  CHECK((*tcols)[0].description == "a -> a, b -> b");
  CHECK((*tcols)[1].description == "a -> b, b -> a");
  CHECK(apply_column(tm, 1, Letter::symbol(0)) == Letter::symbol(1));
}

TEST_CASE("folding commutes with expansion below the cutoff") {
  auto nonCL = bundled("nonCL");
  auto scheme = TruncationScheme::build(nonCL.alphabet, 20);
  for (std::int64_t n = 0; n <= 10; ++n) {
    auto word = expand(nonCL, Letter::nat(n), 4);
    std::vector<std::size_t> cls{scheme.index_of(Letter::nat(n))};
    for (int level = 0; level < 4; ++level) {
      std::vector<std::size_t> next;
      for (auto c : cls) {
        auto img = folded_image(nonCL, scheme, c);
        next.insert(next.end(), img.begin(), img.end());
      }
      cls = next;
    }
    REQUIRE(cls.size() == word.size());
    for (std::size_t i = 0; i < cls.size(); ++i) CHECK(cls[i] == scheme.index_of(word[i]));
  }
}

TEST_CASE("supertile cache: equality with recomputation, eviction and threads") {
  auto fib = bundled("fibonacci");
  SupertileCache cache(fib, 4096);
  for (unsigned k = 0; k <= 12; ++k) CHECK(*cache.get(Letter::symbol(0), k) == expand(fib, Letter::symbol(0), k));
  CHECK(cache.bytes() <= 4096);
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&, t] {
      for (unsigned k = 0; k <= 10; ++k) {
        auto a = Letter::symbol((t + k) % 2);
        if (*cache.get(a, k) != expand(fib, a, k)) ++mismatches;
      }
    });
  for (auto& w : workers) w.join();
  CHECK(mismatches == 0);
  CHECK(cache.hits() > 0);
}
