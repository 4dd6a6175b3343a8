#include "doctest.h"

#include "subkit/bundled.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"

using namespace subkit;

namespace {

const char* kNonCL =
    "# comment line\n"
    "alphabet nat_inf\n"
    "rule 0 -> 0 0 0 1\n"
    "rule n if n>=1 -> 0 (n-1) (n+1)   # trailing comment\n"
    "rule inf -> 0 inf inf\n";

ParseFailure parse_failure(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseFailure& f) {
    return f;
  }
  FAIL("expected a parse failure for: " << text);
  return ParseFailure({});
}

}  // namespace

TEST_CASE("nonCL parses with three rules and max length 4") {
  auto spec = parse(kNonCL);
  CHECK(spec.alphabet.family == AlphabetFamily::NatInf);
  CHECK(spec.rules.size() == 3);
  CHECK(spec.max_length == 4);
  CHECK(spec.warnings.empty());
  CHECK(validate_continuity(spec).empty());
}

TEST_CASE("identity on a one-letter alphabet") {
  auto spec = parse("alphabet finite a\nrule a -> a\n");
  CHECK(spec.rules.size() == 1);
  CHECK(spec.max_length == 1);
  CHECK(format_word(spec.alphabet, apply(spec, Letter::symbol(0))) == "a");
}

TEST_CASE("negative letter reachable under the guard") {
  auto f = parse_failure("alphabet nat_inf\nrule 0 -> 0\nrule n if n>=1 -> (n-2) 0\nrule inf -> inf 0\n");
  REQUIRE(f.has(ErrorKind::NegativeLetter));
  bool mentions = false;
  for (const auto& e : f.errors())
    if (e.kind == ErrorKind::NegativeLetter) {
      CHECK(e.line == 3);
      mentions = e.message.find("n=1") != std::string::npos;
    }
  CHECK(mentions);
}

TEST_CASE("continuity: limit of n+1 is inf, not 0") {
  ParseOptions lax{.check_continuity = false};
  auto spec = parse("alphabet nat_inf\nrule 0 -> 0 0\nrule n if n>=1 -> 0 (n+1)\nrule inf -> 0 0\n", lax);
  auto diags = validate_continuity(spec);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].position == 2);
  CHECK(diags[0].line == 4);
  auto f = parse_failure("alphabet nat_inf\nrule 0 -> 0 0\nrule n if n>=1 -> 0 (n+1)\nrule inf -> 0 0\n");
  CHECK(f.has(ErrorKind::Continuity));
}

TEST_CASE("continuity: rhs length depending on parity is flagged") {
  ParseOptions lax{.check_continuity = false};
  auto spec = parse(
      "alphabet nat_inf\n"
      "rule n if n%2==0 -> n n n\n"
      "rule n if n%2==1 -> n n n n\n"
      "rule inf -> inf inf inf\n",
      lax);
  auto diags = validate_continuity(spec);
  REQUIRE(!diags.empty());
  bool length_flag = false;
  for (const auto& d : diags) length_flag = length_flag || d.position == 0;
  CHECK(length_flag);
}

TEST_CASE("syntax errors carry line and column") {
  auto f = parse_failure("alphabet nat_inf\nrule 0 -> 0 $\n");
  REQUIRE(f.errors().size() >= 1);
  CHECK(f.errors()[0].kind == ErrorKind::Syntax);
  CHECK(f.errors()[0].line == 2);
  CHECK(f.errors()[0].column == 13);
  CHECK(parse_failure("rule a -> a\n").has(ErrorKind::Syntax));
  CHECK(parse_failure("alphabet finite a\nrule a a\n").has(ErrorKind::Syntax));
  CHECK(parse_failure("alphabet finite a\nrule a ->\n").has(ErrorKind::Syntax));
  CHECK(parse_failure("alphabet nat_inf\nrule n -> m\n").has(ErrorKind::Syntax));
}

TEST_CASE("coverage errors") {
  CHECK(parse_failure("alphabet finite a b\nrule a -> a\n").has(ErrorKind::NonExhaustive));
  CHECK(parse_failure("alphabet finite a\nrule a -> a\nrule a -> a a\n").has(ErrorKind::OverlappingGuards));
  CHECK(parse_failure("alphabet nat_inf\nrule n if n>=2 -> n\nrule inf -> inf\n").has(ErrorKind::NonExhaustive));
  CHECK(parse_failure("alphabet nat_inf\nrule n if n>=1 -> n\nrule n if n<=3 -> n\nrule inf -> inf\n")
            .has(ErrorKind::OverlappingGuards));
}

TEST_CASE("alphabet declaration checks") {
  CHECK(parse_failure("alphabet finite a a\nrule a -> a\n").has(ErrorKind::Alphabet));
  CHECK(parse_failure("alphabet circle alpha=2/4\nrule x -> x\n").has(ErrorKind::Alphabet));
  CHECK(parse_failure("alphabet circle alpha=1/0\nrule x -> x\n").has(ErrorKind::Alphabet));
  CHECK(parse_failure("alphabet hyperbolic\n").has(ErrorKind::Alphabet));
  auto spec = parse("alphabet circle alpha=3/8\nrule x -> x x+alpha\n");
  CHECK(spec.alphabet.rotation.p == 3);
  CHECK(spec.alphabet.rotation.q == 8);
}

TEST_CASE("an inf variable binding is a limit match") {
  auto spec = parse("alphabet nat_inf\nrule 0 -> 0 1\nrule n if n>=1 -> 0 (n-1) (n+1)\n");
  auto m = spec.match(Letter::inf());
  REQUIRE(m.has_value());
  CHECK(m->limit);
  CHECK(format_word(spec.alphabet, apply(spec, Letter::inf())) == "0 inf inf");
}

TEST_CASE("pair patterns and cross-coordinate variables") {
  auto spec = parse(find_bundled("nongrowing")->source);
  CHECK(format_word(spec.alphabet, apply(spec, Letter::pair(3, 0))) == "(2,3) (0,3)");
  CHECK(format_word(spec.alphabet, apply(spec, Letter::pair(3, 2))) == "(3,1)");
  CHECK(format_word(spec.alphabet, apply(spec, Letter::pair(kInfinity, 0))) == "(inf,inf) (0,inf)");
  CHECK(format_word(spec.alphabet, apply(spec, Letter::pair(kInfinity, kInfinity))) == "(inf,inf)");
}

TEST_CASE("circle expressions") {
  auto spec = parse("alphabet circle alpha=irrational\nrule x -> 1 x+alpha x-2alpha 2*alpha (-alpha)\n");
  auto w = apply(spec, Letter::orbit(5));
  CHECK(format_word(spec.alphabet, w) == "orbit:0 orbit:6 orbit:3 orbit:2 orbit:-1");
  auto g = apply(spec, Letter::grid(3, 89));
  CHECK(format_word(spec.alphabet, g) == "grid:0/89 grid:58/89 grid:71/89 grid:21/89 grid:34/89");
}

TEST_CASE("pretty print round-trips every bundled spec and several variants") {
  std::vector<std::string> sources;
  for (const auto& b : bundled_specs()) sources.push_back(b.source);
  sources.push_back("alphabet nat_inf\nrule n if n<5 -> (n+2) 7\nrule n if n>=5 -> (n-5) inf\nrule inf -> inf inf\n");
  sources.push_back("alphabet circle alpha=5/13\nrule y -> y-alpha 1 3alpha\n");
  for (const auto& src : sources) {
    auto spec = parse(src);
    auto printed = pretty_print(spec);
    auto again = parse(printed);
    CHECK(again == spec);
    CHECK(pretty_print(again) == printed);
  }
}

TEST_CASE("evaluated letters stay in the alphabet") {
  for (const auto& b : bundled_specs()) {
    auto spec = parse(b.source);
    auto window = exactness_window(spec, 3);
    for (const auto& a : window.letters)
      for (const auto& x : apply(spec, a)) CHECK(contains(spec.alphabet, x));
  }
}
