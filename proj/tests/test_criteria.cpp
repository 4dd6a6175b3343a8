#include "doctest.h"

#include <cmath>
#include <random>

#include "subkit/bundled.hpp"
#include "subkit/criteria.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"
#include "subkit/operator.hpp"

using namespace subkit;

namespace {

SubstitutionSpec bundled(const char* name) { return parse(find_bundled(name)->source); }

TruncationScheme scheme_for(const SubstitutionSpec& spec, std::int64_t cutoff = 16) {
  return TruncationScheme::build(spec.alphabet, cutoff);
}

std::set<std::string> names(const SubstitutionSpec& spec, const std::vector<Letter>& letters) {
  std::set<std::string> out;
  for (const auto& a : letters) out.insert(format_letter(spec.alphabet, a));
  return out;
}

/// Random finite substitution with every letter of `n` mapped to 1..3 letters.
SubstitutionSpec random_finite(std::mt19937_64& rng, std::size_t n) {
  std::string src = "alphabet finite";
  for (std::size_t i = 0; i < n; ++i) src += std::string(" ") + static_cast<char>('a' + i);
  src += "\n";
  std::uniform_int_distribution<std::size_t> len(1, 3), letter(0, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    src += std::string("rule ") + static_cast<char>('a' + i) + " ->";
    for (std::size_t k = len(rng); k > 0; --k) src += std::string(" ") + static_cast<char>('a' + letter(rng));
    src += "\n";
  }
  return parse(src);
}

}  // namespace

TEST_CASE("primitivity on finite alphabets") {
  auto fib = check_primitivity(bundled("fibonacci"));
  CHECK(fib.verdict == "certified");
  CHECK(fib.exact);
  REQUIRE(fib.p);
  CHECK(*fib.p == 2);
  CHECK(verify_primitivity(bundled("fibonacci"), fib));

  auto swap = check_primitivity(bundled("swap"));
  CHECK(swap.verdict == "refuted");
  CHECK_FALSE(swap.p);
  CHECK(swap.counter_letter);

  CHECK(check_primitivity(bundled("thue_morse")).verdict == "certified");
  CHECK(check_primitivity(bundled("eventual")).verdict == "refuted");
  CHECK(check_primitivity(bundled("not_realised")).verdict == "refuted");
  CHECK(check_primitivity(bundled("doubling")).verdict == "certified");
}

TEST_CASE("primitivity on infinite alphabets") {
  PrimitivityOptions o;
  o.eps = 0.2;
  o.p_max = 20;
  auto spec = bundled("nonCL");
  auto cert = check_primitivity(spec, o);
  CHECK(cert.verdict == "certified-at-eps");
  REQUIRE(cert.p);
  CHECK(*cert.p <= 20);
  CHECK(cert.net_size > 0);
  CHECK(verify_primitivity(spec, cert));

  CHECK(check_primitivity(bundled("qc"), o).verdict == "certified-at-eps");
  CHECK(check_primitivity(bundled("circle"), o).verdict == "certified-at-eps");
  // (0,0) is a fixed letter: its supertiles never leave it
  CHECK(check_primitivity(bundled("nongrowing"), o).verdict == "refuted-up-to-pMax");

  // same seed, same certificate
  auto again = check_primitivity(spec, o);
  CHECK(again.sample == cert.sample);
  CHECK(again.p == cert.p);
}

TEST_CASE("primitivity agrees with the matrix test on random substitutions") {
  std::mt19937_64 rng(7);
  int primitive = 0;
  for (int t = 0; t < 200; ++t) {
    auto spec = random_finite(rng, 2 + static_cast<std::size_t>(t % 3));
    CAPTURE(pretty_print(spec));
    auto cert = check_primitivity(spec);
    const bool m = matrix_primitive(spec);
    CHECK((cert.verdict == "certified") == m);
    if (!m) continue;
    ++primitive;
    CHECK(verify_primitivity(spec, cert));
    // primitive implies growing letters and irreducibility of every power
    for (std::size_t i = 0; i < spec.alphabet.symbols.size(); ++i)
      CHECK(letter_grows(spec, Letter::symbol(static_cast<std::int64_t>(i))));
    for (unsigned k = 1; k <= 4; ++k) CHECK(check_irreducibility(spec, scheme_for(spec), k).verdict == "irreducible");
  }
  CHECK(primitive > 20);
}

TEST_CASE("primitive substitutions have growing probes") {
  for (const char* name : {"fibonacci", "thue_morse", "doubling"}) {
    auto spec = bundled(name);
    for (std::size_t i = 0; i < spec.alphabet.symbols.size(); ++i)
      CHECK(growth_probe(spec, Letter::symbol(static_cast<std::int64_t>(i)), 10).verdict == GrowthVerdict::Growing);
  }
}

TEST_CASE("irreducibility") {
  auto ev = bundled("eventual");
  auto r = check_irreducibility(ev, scheme_for(ev));
  CHECK(r.verdict == "reducible");
  CHECK(r.exact);
  CHECK(r.witness_kind == "eventual-range");
  CHECK(names(ev, r.witness) == std::set<std::string>{"b", "c"});

  auto fib = bundled("fibonacci");
  CHECK(check_irreducibility(fib, scheme_for(fib)).verdict == "irreducible");
  auto sw = bundled("swap");
  CHECK(check_irreducibility(sw, scheme_for(sw)).verdict == "irreducible");
  // ρ² of the swap splits into a ↦ aaaa, b ↦ bbbb
  CHECK(check_irreducibility(sw, scheme_for(sw), 2).verdict == "reducible");

  auto single = parse("alphabet finite a\nrule a -> a\n");
  CHECK(check_irreducibility(single, scheme_for(single)).verdict == "irreducible");

  auto nr = bundled("not_realised");
  auto w = check_irreducibility(nr, scheme_for(nr));
  CHECK(w.verdict == "reducible");
  CHECK(names(nr, w.witness) == std::set<std::string>{"a"});

  auto non_cl = bundled("nonCL");
  auto t = check_irreducibility(non_cl, scheme_for(non_cl));
  CHECK(t.verdict == "irreducible");
  CHECK_FALSE(t.exact);
  CHECK(t.label == "at cutoff 16");
}

TEST_CASE("quasi-compactness numbers") {
  auto qc = bundled("qc");
  auto r1 = quasi_compact_check(qc, {Letter::nat(0)}, 1);
  REQUIRE(r1.levels.size() == 1);
  CHECK(r1.levels[0].c_k == 2);
  CHECK(r1.isolated_only);
  CHECK(r1.r_lower == doctest::Approx(std::sqrt(5.0)));
  CHECK(r1.levels[0].condition1);
  CHECK_FALSE(r1.levels[0].condition2);
  CHECK(r1.verdict == "quasi-compact");

  auto r2 = quasi_compact_check(qc, {Letter::nat(0), Letter::nat(1)}, 2);
  REQUIRE(r2.levels.size() == 2);
  CHECK(r2.levels[1].c_k == 4);
  CHECK(r2.levels[1].r_lower_pow_k == doctest::Approx(5.0));
  CHECK(r2.levels[1].condition1);

  auto fib = bundled("fibonacci");
  auto all = quasi_compact_check(fib, {Letter::symbol(0), Letter::symbol(1)}, 3);
  for (const auto& l : all.levels) CHECK(l.c_k == 0);
  CHECK(all.verdict == "quasi-compact");

  CHECK_THROWS_AS(quasi_compact_check(qc, {Letter::symbol(0)}, 1), std::invalid_argument);
  CHECK_THROWS_AS(quasi_compact_check(qc, {}, 1), std::invalid_argument);
}

TEST_CASE("quasi-compactness is monotone in P") {
  auto spec = bundled("nonCL");
  std::vector<Letter> P;
  std::vector<std::uint64_t> previous;
  for (std::int64_t v = 0; v <= 6; ++v) {
    P.push_back(Letter::nat(v));
    auto r = quasi_compact_check(spec, P, 3);
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
      if (!previous.empty()) CHECK(r.levels[k].c_k <= previous[k]);
    }
    previous.clear();
    for (const auto& l : r.levels) previous.push_back(l.c_k);
    CHECK(r.verdict == "quasi-compact");
  }
}

TEST_CASE("quasi-compact and primitive implies uniform convergence at the truncation") {
  for (const char* name : {"fibonacci", "thue_morse"}) {
    CAPTURE(name);
    auto spec = bundled(name);
    std::vector<Letter> P;
    for (std::size_t i = 0; i < spec.alphabet.symbols.size(); ++i) P.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
    REQUIRE(quasi_compact_check(spec, P, 2).verdict == "quasi-compact");
    REQUIRE(check_primitivity(spec).verdict == "certified");
    auto op = TruncatedOperator::build(spec, scheme_for(spec));
    auto rep = power_iteration(op);
    auto d = convergence_diagnostics(op, rep, default_panel(op, rep), 60);
    CHECK(d.uniform);
  }
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    auto spec = random_finite(rng, 3);
    if (!matrix_primitive(spec)) continue;
    CAPTURE(pretty_print(spec));
    auto op = TruncatedOperator::build(spec, scheme_for(spec));
    auto rep = power_iteration(op);
    auto d = convergence_diagnostics(op, rep, default_panel(op, rep), 200);
    CHECK(d.uniform);
  }
}

TEST_CASE("equicontinuity of column semigroups") {
  auto circle = equicontinuity_check(bundled("circle"));
  CHECK(circle.verdict == "isometric-semigroup");
  CHECK(circle.columns == 2);
  CHECK(circle.column_descriptions[0] == "x -> x");

  CHECK(equicontinuity_check(bundled("thue_morse")).verdict == "isometric-semigroup");
  CHECK(equicontinuity_check(bundled("fibonacci")).verdict == "not-applicable");
  CHECK(equicontinuity_check(bundled("nonCL")).verdict == "not-applicable");

  auto unit = equicontinuity_check(bundled("circle_unit"));
  CHECK(unit.verdict == "equicontinuous-to-depth");
  CHECK(unit.family_sizes.back() > unit.family_sizes.front());
  CHECK_FALSE(unit.column_isometric[0]);

  // n ↦ n+1 and n ↦ 0 only ever contract towards ∞ or collapse
  auto shift = parse("alphabet nat_inf\nrule n -> (n+1) 0\nrule inf -> inf 0\n");
  auto s = equicontinuity_check(shift);
  CHECK(s.verdict != "isometric-semigroup");
  CHECK(s.verdict != "not-applicable");
}

TEST_CASE("length function diagnostics") {
  auto non_cl = length_function_diagnostics(bundled("nonCL"));
  CHECK(non_cl.verdict == "positive-length-found");
  CHECK(non_cl.r == doctest::Approx(3.0 + 1.0 / std::sqrt(2.0)));

  auto dbl = length_function_diagnostics(bundled("doubling"));
  CHECK(dbl.verdict == "positive-length-found");

  auto tripled = length_function_diagnostics(bundled("tripled"));
  CHECK(tripled.verdict == "no-continuous-length-evidence");
  CHECK(tripled.core_r == doctest::Approx(2.0));
  REQUIRE(tripled.tail_ratios.size() == 5);
  for (double x : tripled.tail_ratios) CHECK(x == doctest::Approx(1.5));
  CHECK(tripled.core_log10_ratio2 > tripled.core_log10_ratio);
}
