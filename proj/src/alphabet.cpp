#include "subkit/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace subkit {

namespace {

constexpr double kGoldenTurns = 0.6180339887498948482;

double frac(double x) { return x - std::floor(x); }

double nat_coordinate(ExtNat n) { return is_infinite(n) ? 0.0 : 1.0 / (static_cast<double>(n) + 1.0); }

double nat_distance(ExtNat a, ExtNat b) { return std::abs(nat_coordinate(a) - nat_coordinate(b)); }

std::int64_t positive_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::string format_ext(ExtNat v) { return is_infinite(v) ? "inf" : std::to_string(v); }

ExtNat parse_ext(std::string_view s) {
  if (s == "inf") return kInfinity;
  if (s.empty()) throw AlphabetError("empty natural");
  ExtNat v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw AlphabetError("not a natural: " + std::string(s));
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

double Rotation::turns() const {
  if (irrational) return kGoldenTurns;
  return static_cast<double>(p) / static_cast<double>(q);
}

AlphabetDecl AlphabetDecl::finite(std::vector<std::string> symbols) {
  AlphabetDecl d;
  d.family = AlphabetFamily::Finite;
  d.symbols = std::move(symbols);
  return d;
}

AlphabetDecl AlphabetDecl::nat_inf() {
  AlphabetDecl d;
  d.family = AlphabetFamily::NatInf;
  return d;
}

AlphabetDecl AlphabetDecl::nat_inf2() {
  AlphabetDecl d;
  d.family = AlphabetFamily::NatInf2;
  return d;
}

AlphabetDecl AlphabetDecl::circle(Rotation rotation) {
  AlphabetDecl d;
  d.family = AlphabetFamily::Circle;
  d.rotation = rotation;
  return d;
}

std::string AlphabetDecl::metric_name() const {
  switch (family) {
    case AlphabetFamily::Finite: return "discrete";
    case AlphabetFamily::NatInf: return "one-point-compactification |1/(n+1)-1/(m+1)|";
    case AlphabetFamily::NatInf2: return "max of one-point-compactification metrics";
    case AlphabetFamily::Circle: return "arc length in turns";
  }
  return "";
}

std::string AlphabetDecl::family_name() const {
  switch (family) {
    case AlphabetFamily::Finite: return "finite";
    case AlphabetFamily::NatInf: return "nat_inf";
    case AlphabetFamily::NatInf2: return "nat_inf2";
    case AlphabetFamily::Circle: return "circle";
  }
  return "";
}

bool contains(const AlphabetDecl& alphabet, const Letter& a) {
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      return a.kind() == Letter::Kind::Symbol && a.first() >= 0 &&
             a.first() < static_cast<std::int64_t>(alphabet.symbols.size());
    case AlphabetFamily::NatInf:
      return a.kind() == Letter::Kind::Nat && a.first() >= 0;
    case AlphabetFamily::NatInf2:
      return a.kind() == Letter::Kind::Pair && a.first() >= 0 && a.second() >= 0;
    case AlphabetFamily::Circle:
      if (a.kind() == Letter::Kind::CircleOrbit) return true;
      return a.kind() == Letter::Kind::CircleGrid && a.second() >= 1 && a.first() >= 0 && a.first() < a.second();
  }
  return false;
}

double circle_position(const AlphabetDecl& alphabet, const Letter& a) {
  if (a.kind() == Letter::Kind::CircleGrid) return static_cast<double>(a.first()) / static_cast<double>(a.second());
  if (a.kind() == Letter::Kind::CircleOrbit) {
    if (!alphabet.rotation.irrational) {
      // exact on the rational grid
      const auto& r = alphabet.rotation;
      return static_cast<double>(positive_mod(a.first() * r.p, r.q)) / static_cast<double>(r.q);
    }
    // k·β mod 1 computed as k·β − round(k·β) keeps the error proportional to
    // |k|·ulp(β) rather than to the magnitude of k·β.
    long double kb = static_cast<long double>(a.first()) * 0.6180339887498948482045868343656L;
    return static_cast<double>(kb - std::floor(kb));
  }
  throw AlphabetError("not a circle letter");
}

double distance(const AlphabetDecl& alphabet, const Letter& a, const Letter& b) {
  if (!contains(alphabet, a) || !contains(alphabet, b)) throw AlphabetError("letters from mixed or foreign families");
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      return a == b ? 0.0 : 1.0;
    case AlphabetFamily::NatInf:
      return nat_distance(a.first(), b.first());
    case AlphabetFamily::NatInf2:
      return std::max(nat_distance(a.first(), b.first()), nat_distance(a.second(), b.second()));
    case AlphabetFamily::Circle: {
      double d = frac(circle_position(alphabet, a) - circle_position(alphabet, b));
      return std::min(d, 1.0 - d);
    }
  }
  return 0.0;
}

double word_distance(const AlphabetDecl& alphabet, const Word& u, const Word& v) {
  if (u.size() != v.size()) throw AlphabetError("word lengths differ");
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, distance(alphabet, u[i], v[i]));
  return d;
}

std::vector<Letter> epsilon_net(const AlphabetDecl& alphabet, double eps) {
  if (!(eps > 0.0)) throw AlphabetError("eps must be positive");
  std::vector<Letter> net;
  auto nat_net = [eps] {
    // n >= ceil(1/eps) has 1/(n+1) < eps, i.e. lies within eps of ∞
    const auto m = static_cast<std::int64_t>(std::ceil(1.0 / eps));
    std::vector<ExtNat> values;
    for (std::int64_t n = 0; n < m; ++n) values.push_back(n);
    values.push_back(kInfinity);
    return values;
  };
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      for (std::size_t i = 0; i < alphabet.symbols.size(); ++i) net.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
      break;
    case AlphabetFamily::NatInf:
      for (ExtNat n : nat_net()) net.push_back(Letter::nat(n));
      break;
    case AlphabetFamily::NatInf2: {
      auto values = nat_net();
      for (ExtNat a : values)
        for (ExtNat b : values) net.push_back(Letter::pair(a, b));
      break;
    }
    case AlphabetFamily::Circle: {
      const auto m = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(1.0 / (2.0 * eps))));
      for (std::int64_t j = 0; j < m; ++j) net.push_back(Letter::grid(j, m));
      break;
    }
  }
  return net;
}

bool is_isolated(const AlphabetDecl& alphabet, const Letter& a) {
  switch (alphabet.family) {
    case AlphabetFamily::Finite: return true;
    case AlphabetFamily::NatInf: return !is_infinite(a.first());
    case AlphabetFamily::NatInf2: return !a.has_infinity();
    case AlphabetFamily::Circle: return false;
  }
  return false;
}

std::string format_letter(const AlphabetDecl& alphabet, const Letter& a) {
  switch (a.kind()) {
    case Letter::Kind::Symbol:
      if (a.first() >= 0 && a.first() < static_cast<std::int64_t>(alphabet.symbols.size()))
        return alphabet.symbols[static_cast<std::size_t>(a.first())];
      return "?" + std::to_string(a.first());
    case Letter::Kind::Nat: return format_ext(a.first());
    case Letter::Kind::Pair: return "(" + format_ext(a.first()) + "," + format_ext(a.second()) + ")";
    case Letter::Kind::CircleOrbit: return "orbit:" + std::to_string(a.first());
    case Letter::Kind::CircleGrid: return "grid:" + std::to_string(a.first()) + "/" + std::to_string(a.second());
  }
  return "?";
}

std::string format_word(const AlphabetDecl& alphabet, const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += format_letter(alphabet, w[i]);
  }
  return out;
}

Letter parse_letter(const AlphabetDecl& alphabet, std::string_view token) {
  Letter a;
  switch (alphabet.family) {
    case AlphabetFamily::Finite: {
      auto it = std::find(alphabet.symbols.begin(), alphabet.symbols.end(), token);
      if (it == alphabet.symbols.end()) throw AlphabetError("unknown symbol: " + std::string(token));
      a = Letter::symbol(it - alphabet.symbols.begin());
      break;
    }
    case AlphabetFamily::NatInf:
      a = Letter::nat(parse_ext(token));
      break;
    case AlphabetFamily::NatInf2: {
      if (token.size() < 5 || token.front() != '(' || token.back() != ')')
        throw AlphabetError("expected (a,b): " + std::string(token));
      auto inner = token.substr(1, token.size() - 2);
      auto comma = inner.find(',');
      if (comma == std::string_view::npos) throw AlphabetError("expected (a,b): " + std::string(token));
      a = Letter::pair(parse_ext(inner.substr(0, comma)), parse_ext(inner.substr(comma + 1)));
      break;
    }
    case AlphabetFamily::Circle: {
      auto parse_int = [&](std::string_view s) {
        if (s.empty()) throw AlphabetError("bad circle letter: " + std::string(token));
        bool neg = s.front() == '-';
        std::int64_t v = parse_ext(neg ? s.substr(1) : s);
        return neg ? -v : v;
      };
      if (token == "1" || token == "0") {  // the base point, written 1 or 0
        a = Letter::orbit(0);
      } else if (token.rfind("orbit:", 0) == 0) {
        a = Letter::orbit(parse_int(token.substr(6)));
      } else if (token.rfind("grid:", 0) == 0) {
        auto rest = token.substr(5);
        auto slash = rest.find('/');
        if (slash == std::string_view::npos) throw AlphabetError("expected grid:j/q: " + std::string(token));
        a = Letter::grid(parse_int(rest.substr(0, slash)), parse_int(rest.substr(slash + 1)));
      } else {
        throw AlphabetError("bad circle letter: " + std::string(token));
      }
      break;
    }
  }
  if (!contains(alphabet, a)) throw AlphabetError("letter outside alphabet: " + std::string(token));
  return a;
}

Word parse_word(const AlphabetDecl& alphabet, std::string_view text) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) w.push_back(parse_letter(alphabet, tok));
  return w;
}

std::vector<std::pair<std::int64_t, std::int64_t>> convergents(double x, std::int64_t max_q) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p = static_cast<std::int64_t>(std::floor(x)), q = 1;
  double rest = x - std::floor(x);
  out.emplace_back(p, q);
  for (int iter = 0; iter < 64 && rest > 1e-15; ++iter) {
    double inv = 1.0 / rest;
    auto a = static_cast<std::int64_t>(std::floor(inv));
    rest = inv - static_cast<double>(a);
    std::int64_t pn = a * p + p_prev, qn = a * q + q_prev;
    if (qn > max_q) break;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    out.emplace_back(p, q);
  }
  return out;
}

TruncationScheme TruncationScheme::build(const AlphabetDecl& alphabet, std::int64_t cutoff) {
  TruncationScheme s;
  s.alphabet_ = alphabet;
  s.cutoff_ = cutoff;
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      for (std::size_t i = 0; i < alphabet.symbols.size(); ++i)
        s.representatives_.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
      break;
    case AlphabetFamily::NatInf:
      if (cutoff < 1) throw AlphabetError("cutoff must be at least 1");
      for (std::int64_t n = 0; n <= cutoff; ++n) s.representatives_.push_back(Letter::nat(n));
      s.representatives_.push_back(Letter::inf());
      break;
    case AlphabetFamily::NatInf2: {
      if (cutoff < 1) throw AlphabetError("cutoff must be at least 1");
      std::vector<ExtNat> values;
      for (std::int64_t n = 0; n <= cutoff; ++n) values.push_back(n);
      values.push_back(kInfinity);
      for (ExtNat a : values)
        for (ExtNat b : values) s.representatives_.push_back(Letter::pair(a, b));
      break;
    }
    case AlphabetFamily::Circle: {
      if (alphabet.rotation.irrational) {
        // smallest convergent denominator reaching the cutoff
        auto cs = convergents(alphabet.rotation.turns(), std::int64_t{1} << 40);
        auto it = std::find_if(cs.begin(), cs.end(), [&](auto& c) { return c.second >= cutoff; });
        if (it == cs.end()) throw AlphabetError("cutoff too large for circle truncation");
        s.grid_p_ = it->first;
        s.grid_q_ = it->second;
      } else {
        s.grid_p_ = alphabet.rotation.p;
        s.grid_q_ = alphabet.rotation.q;
      }
      s.cutoff_ = s.grid_q_;
      for (std::int64_t j = 0; j < s.grid_q_; ++j) s.representatives_.push_back(Letter::grid(j, s.grid_q_));
      break;
    }
  }
  return s;
}

std::size_t TruncationScheme::nat_index(ExtNat v) const {
  return (is_infinite(v) || v > cutoff_) ? static_cast<std::size_t>(cutoff_ + 1) : static_cast<std::size_t>(v);
}

std::size_t TruncationScheme::index_of(const Letter& a) const {
  switch (alphabet_.family) {
    case AlphabetFamily::Finite: return static_cast<std::size_t>(a.first());
    case AlphabetFamily::NatInf: return nat_index(a.first());
    case AlphabetFamily::NatInf2:
      return nat_index(a.first()) * static_cast<std::size_t>(cutoff_ + 2) + nat_index(a.second());
    case AlphabetFamily::Circle:
      if (a.kind() == Letter::Kind::CircleOrbit) return static_cast<std::size_t>(positive_mod(a.first() * grid_p_, grid_q_));
      if (a.second() == grid_q_) return static_cast<std::size_t>(a.first());
      {
        double pos = static_cast<double>(a.first()) / static_cast<double>(a.second());
        return static_cast<std::size_t>(positive_mod(std::llround(pos * static_cast<double>(grid_q_)), grid_q_));
      }
  }
  return 0;
}

Letter TruncationScheme::fold(const Letter& a) const { return representatives_.at(index_of(a)); }

std::optional<std::size_t> TruncationScheme::limit_class() const {
  switch (alphabet_.family) {
    case AlphabetFamily::NatInf: return static_cast<std::size_t>(cutoff_ + 1);
    case AlphabetFamily::NatInf2: return size() - 1;
    default: return std::nullopt;
  }
}

bool TruncationScheme::is_tail_class(std::size_t i) const {
  switch (alphabet_.family) {
    case AlphabetFamily::Finite: return false;
    case AlphabetFamily::NatInf:
    case AlphabetFamily::NatInf2: return representatives_.at(i).has_infinity();
    case AlphabetFamily::Circle: return alphabet_.rotation.irrational;
  }
  return false;
}

double TruncationScheme::fold_resolution() const {
  switch (alphabet_.family) {
    case AlphabetFamily::Finite: return 0.0;
    case AlphabetFamily::NatInf:
    case AlphabetFamily::NatInf2: return 1.0 / static_cast<double>(cutoff_ + 2);
    case AlphabetFamily::Circle: return 0.5 / static_cast<double>(grid_q_);
  }
  return 0.0;
}

Word fold_word(const TruncationScheme& scheme, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const auto& a : w) out.push_back(scheme.fold(a));
  return out;
}

}  // namespace subkit
