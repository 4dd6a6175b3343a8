#include "subkit/bundled.hpp"

#include <algorithm>

namespace subkit {

const std::vector<BundledSpec>& bundled_specs() {
  static const std::vector<BundledSpec> specs{
      {"nonCL", "Non-constant-length substitution on N-infinity",
       "Example \"non-CL\": \"0 -> 0 0 0 1\", \"yields lambda = 3 + 1/sqrt2\"",
       "alphabet nat_inf\n"
       "rule 0 -> 0 0 0 1\n"
       "rule n if n>=1 -> 0 (n-1) (n+1)\n"
       "rule inf -> 0 inf inf\n"},
      {"qc", "Quasi-compact substitution on N-infinity",
       "Example \"quasi-compact\": \"|rho^2(0)| = |01002| = 5\", \"r >= sqrt5 > 2\"",
       "alphabet nat_inf\n"
       "rule 0 -> 0 1\n"
       "rule n if n>=1 -> 0 (n-1) (n+1)\n"
       "rule inf -> 0 inf inf\n"},
      {"nongrowing", "Non-growing substitution on N-infinity squared",
       "Example \"non-growing\": \"every letter is eventually constant under substitution\"",
       "alphabet nat_inf2\n"
       "rule (0,0) -> (0,0)\n"
       "rule (n,m) if m>0 -> (n,m-1)\n"
       "rule (n,0) if n>0 -> (n-1,n) (0,n)\n"},
      {"tripled", "Tripled non-growing variant without a length function",
       "Tripled variant of Example \"non-growing\": \"admits no continuous and non-zero length function\", "
       "\"l(n,m) = (3/2) l(n,m-1)\"",
       "alphabet nat_inf2\n"
       "rule (0,0) -> (0,0) (0,0)\n"
       "rule (n,m) if m>0 -> (n,m-1) (n,m-1) (n,m-1)\n"
       "rule (n,0) if n>0 -> (n-1,n) (n-1,n) (n-1,n) (0,n) (0,n) (0,n)\n"},
      {"circle", "Constant-length substitution on the circle",
       "Example \"CL-S1\": \"z -> z alpha z\"; Example \"CL not qc\": \"T^n(f)(0) = 1\"",
       "alphabet circle alpha=irrational\n"
       "rule x -> x x+alpha\n"},
      {"circle_unit", "Quasi-compact circle substitution",
       "Circle example \"rho(x) = 1 alpha x\": \"every rho^1(x) contains a letter of P\"",
       "alphabet circle alpha=irrational\n"
       "rule x -> 1 x+alpha\n"},
      {"not_realised", "Language not realised by a fixed point",
       "Example \"language not realised\": \"L(rho) = {a^n, a^n b}\"",
       "alphabet finite a b\n"
       "rule a -> a\n"
       "rule b -> a b\n"},
      {"swap", "Irreducible but non-primitive swap",
       "\"irreducible (but non-primitive) substitution\", \"T^2n = I and T^2n+1 = T\"",
       "alphabet finite a b\n"
       "rule a -> b b\n"
       "rule b -> a a\n"},
      {"eventual", "Reducible substitution with eventual range {b,c}",
       "\"restrict the substitution to its eventual range B = {b,c}\"",
       "alphabet finite a b c\n"
       "rule a -> b c\n"
       "rule b -> b b\n"
       "rule c -> c c\n"},
      {"fibonacci", "Fibonacci substitution", "Classical primitive example, Abelianisation [[1,1],[1,0]]",
       "alphabet finite a b\n"
       "rule a -> a b\n"
       "rule b -> a\n"},
      {"thue_morse", "Thue-Morse substitution", "Classical constant-length example, columns id and swap",
       "alphabet finite a b\n"
       "rule a -> a b\n"
       "rule b -> b a\n"},
      {"doubling", "Doubling substitution on one letter", "Trivial example a -> a a, r = 2",
       "alphabet finite a\n"
       "rule a -> a a\n"},
  };
  return specs;
}

const BundledSpec* find_bundled(const std::string& name) {
  const auto& specs = bundled_specs();
  auto it = std::find_if(specs.begin(), specs.end(), [&](const BundledSpec& s) { return s.name == name; });
  return it == specs.end() ? nullptr : &*it;
}

std::string bundled_file_text(const BundledSpec& spec) {
  return "# " + spec.name + ": " + spec.title + "\n# " + spec.provenance + "\n" + spec.source;
}

}  // namespace subkit
