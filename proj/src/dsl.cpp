#include "subkit/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace subkit {

// ---------------------------------------------------------------------------
// Semantics
// ---------------------------------------------------------------------------

bool Condition::holds(ExtNat v) const {
  if (is_infinite(v)) {
    if (modulus > 0) return false;
    return op == CompareOp::Ge || op == CompareOp::Gt || op == CompareOp::Ne;
  }
  if (modulus > 0) return v % modulus == value;
  switch (op) {
    case CompareOp::Eq: return v == value;
    case CompareOp::Ne: return v != value;
    case CompareOp::Ge: return v >= value;
    case CompareOp::Gt: return v > value;
    case CompareOp::Le: return v <= value;
    case CompareOp::Lt: return v < value;
  }
  return false;
}

std::size_t SubstitutionSpec::cell_of(ExtNat v) const {
  if (is_infinite(v)) return static_cast<std::size_t>(guard_bound_ + guard_period_ + 1);
  if (v <= guard_bound_) return static_cast<std::size_t>(v);
  return static_cast<std::size_t>(guard_bound_ + 1 + (v - guard_bound_ - 1) % guard_period_);
}

std::optional<RuleMatch> SubstitutionSpec::match(const Letter& a) const {
  if (!contains(alphabet, a)) return std::nullopt;
  switch (alphabet.family) {
    case AlphabetFamily::Finite: {
      int r = symbol_rule_.at(static_cast<std::size_t>(a.first()));
      if (r < 0) return std::nullopt;
      return RuleMatch{static_cast<std::size_t>(r), false, {}};
    }
    case AlphabetFamily::Circle:
      if (rules.empty()) return std::nullopt;
      return RuleMatch{0, false, {}};
    case AlphabetFamily::NatInf:
    case AlphabetFamily::NatInf2: {
      const bool pair = alphabet.family == AlphabetFamily::NatInf2;
      std::vector<ExtNat> coords{a.first()};
      if (pair) coords.push_back(a.second());
      std::size_t idx = cell_of(coords[0]);
      if (pair) idx = idx * cells_per_coordinate() + cell_of(coords[1]);
      const auto& entry = cells_.at(idx);
      if (entry.rule < 0) return std::nullopt;
      RuleMatch m{static_cast<std::size_t>(entry.rule), entry.limit, {}};
      const auto& rule = rules[m.rule];
      m.bindings.assign(rule.variables.size(), 0);
      for (std::size_t i = 0; i < rule.pattern.components.size(); ++i) {
        const auto& c = rule.pattern.components[i];
        if (c.kind == Component::Kind::Variable) m.bindings[c.var] = coords[i];
      }
      return m;
    }
  }
  return std::nullopt;
}

namespace {

ExtNat eval_component(const Component& c, const std::vector<ExtNat>& bindings) {
  switch (c.kind) {
    case Component::Kind::Literal: return c.value;
    case Component::Kind::Infinity: return kInfinity;
    case Component::Kind::Variable: return shifted(bindings.at(c.var), c.value);
  }
  return 0;
}

std::int64_t positive_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

Letter eval_circle(const AlphabetDecl& alphabet, const LetterExpr& e, const Letter& x) {
  const auto& rot = alphabet.rotation;
  if (x.kind() == Letter::Kind::CircleGrid) {
    const std::int64_t q = x.second();
    std::int64_t step = 0;
    if (!rot.irrational && rot.q == q) {
      step = rot.p;
    } else {
      step = std::llround(rot.turns() * static_cast<double>(q));
    }
    std::int64_t base = e.uses_var ? x.first() : 0;
    return Letter::grid(positive_mod(base + e.alpha_multiple * step, q), q);
  }
  // orbit points k·α
  std::int64_t base = e.uses_var ? x.first() : 0;
  if (!rot.irrational) return Letter::grid(positive_mod((base + e.alpha_multiple) * rot.p, rot.q), rot.q);
  return Letter::orbit(base + e.alpha_multiple);
}

Word eval_rule(const SubstitutionSpec& spec, const GuardedRule& rule, const std::vector<ExtNat>& bindings,
               const Letter& a) {
  Word w;
  w.reserve(rule.rhs.size());
  for (const auto& e : rule.rhs) {
    switch (e.kind) {
      case LetterExpr::Kind::Symbol: w.push_back(Letter::symbol(e.symbol)); break;
      case LetterExpr::Kind::Nat: w.push_back(Letter::nat(eval_component(e.components[0], bindings))); break;
      case LetterExpr::Kind::Pair:
        w.push_back(Letter::pair(eval_component(e.components[0], bindings), eval_component(e.components[1], bindings)));
        break;
      case LetterExpr::Kind::Circle: w.push_back(eval_circle(spec.alphabet, e, a)); break;
    }
  }
  return w;
}

}  // namespace

Word SubstitutionSpec::evaluate(const Letter& a) const {
  auto m = match(a);
  if (!m) throw std::out_of_range("no rule matches letter " + format_letter(alphabet, a));
  return eval_rule(*this, rules[m->rule], m->bindings, a);
}

bool SubstitutionSpec::is_constant_length() const {
  if (rules.empty()) return false;
  return std::all_of(rules.begin(), rules.end(), [&](const GuardedRule& r) { return r.rhs.size() == rules[0].rhs.size(); });
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

std::string to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::NonExhaustive: return "non-exhaustive";
    case ErrorKind::OverlappingGuards: return "overlapping-guards";
    case ErrorKind::NegativeLetter: return "negative-letter";
    case ErrorKind::Continuity: return "continuity";
    case ErrorKind::Alphabet: return "alphabet";
  }
  return "unknown";
}

namespace {

std::string summarize(const std::vector<ParseError>& errors) {
  std::ostringstream out;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) out << "; ";
    out << errors[i].line << ":" << errors[i].column << ": " << to_string(errors[i].kind) << ": " << errors[i].message;
  }
  return out.str();
}

}  // namespace

ParseFailure::ParseFailure(std::vector<ParseError> errors)
    : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

bool ParseFailure::has(ErrorKind kind) const {
  return std::any_of(errors_.begin(), errors_.end(), [&](const ParseError& e) { return e.kind == kind; });
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, Int, LParen, RParen, Comma, Plus, Minus, Star, Percent, Arrow, Cmp, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int column = 0;
  std::int64_t value = 0;
};

struct LexError {
  int column;
  std::string message;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view line, std::vector<LexError>& errors) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t v = 0;
      bool overflow = false;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
        if (v > (std::int64_t{1} << 40)) overflow = true;
        v = v * 10 + (line[j] - '0');
        ++j;
      }
      if (overflow) errors.push_back({col, "integer literal too large"});
      // identifiers may start with a digit only in finite alphabets (e.g. symbol `0a`)
      if (j < line.size() && ident_char(line[j]) && !std::isdigit(static_cast<unsigned char>(line[j]))) {
        std::size_t k = j;
        while (k < line.size() && ident_char(line[k])) ++k;
        std::string word(line.substr(i, k - i));
        if (word.substr(j - i) == "alpha") {
          out.push_back({Tok::Int, std::string(line.substr(i, j - i)), col, v});
          out.push_back({Tok::Ident, "alpha", static_cast<int>(j) + 1, 0});
        } else {
          out.push_back({Tok::Ident, word, col, 0});
        }
        i = k;
        continue;
      }
      out.push_back({Tok::Int, std::string(line.substr(i, j - i)), col, v});
      i = j;
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col, 0});
      i = j;
      continue;
    }
    auto two = line.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", col, 0});
      i += 2;
      continue;
    }
    if (two == ">=" || two == "<=" || two == "==" || two == "!=") {
      out.push_back({Tok::Cmp, std::string(two), col, 0});
      i += 2;
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", col, 0}); break;
      case ')': out.push_back({Tok::RParen, ")", col, 0}); break;
      case ',': out.push_back({Tok::Comma, ",", col, 0}); break;
      case '+': out.push_back({Tok::Plus, "+", col, 0}); break;
      case '-': out.push_back({Tok::Minus, "-", col, 0}); break;
      case '*': out.push_back({Tok::Star, "*", col, 0}); break;
      case '%': out.push_back({Tok::Percent, "%", col, 0}); break;
      case '>':
      case '<': out.push_back({Tok::Cmp, std::string(1, c), col, 0}); break;
      default: errors.push_back({col, std::string("unexpected character '") + c + "'"}); break;
    }
    ++i;
  }
  out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1, 0});
  return out;
}

// Linear form  [±var] + k·alpha + c  (or inf) as written in a letter expression.
struct LinearForm {
  bool infinity = false;
  std::optional<std::string> var;
  int var_sign = 0;
  std::int64_t alpha = 0;
  std::int64_t constant = 0;
  bool constant_seen = false;
  int column = 0;
};

struct RawExpr {
  std::vector<LinearForm> components;
  bool parenthesized = false;
  int column = 0;
};

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words{"rule", "if", "and", "inf", "alpha", "true", "alphabet"};
  return words;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

}  // namespace

class SpecBuilder {
 public:
  SubstitutionSpec spec;
  std::vector<ParseError> errors;
  int alphabet_line = 0;

  void error(int line, int column, ErrorKind kind, std::string message) {
    errors.push_back({line, column, kind, std::move(message)});
  }

  void parse_alphabet(const std::string& text, int line) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    alphabet_line = line;
    if (words.size() < 2) {
      error(line, 1, ErrorKind::Syntax, "expected alphabet family");
      return;
    }
    const auto& fam = words[1];
    if (fam == "finite") {
      std::vector<std::string> symbols(words.begin() + 2, words.end());
      if (symbols.empty()) error(line, 1, ErrorKind::Alphabet, "finite alphabet needs at least one symbol");
      std::set<std::string> seen;
      for (const auto& s : symbols) {
        if (!std::all_of(s.begin(), s.end(), ident_char) || reserved_words().count(s))
          error(line, column_of(text, s), ErrorKind::Alphabet, "invalid symbol name '" + s + "'");
        if (!seen.insert(s).second) error(line, column_of(text, s), ErrorKind::Alphabet, "duplicate symbol '" + s + "'");
      }
      spec.alphabet = AlphabetDecl::finite(symbols);
    } else if (fam == "nat_inf") {
      spec.alphabet = AlphabetDecl::nat_inf();
    } else if (fam == "nat_inf2") {
      spec.alphabet = AlphabetDecl::nat_inf2();
    } else if (fam == "circle") {
      std::string rest;
      for (std::size_t i = 2; i < words.size(); ++i) rest += words[i];
      if (rest.rfind("alpha=", 0) != 0) {
        error(line, 1, ErrorKind::Alphabet, "circle alphabet needs alpha=<p>/<q> or alpha=irrational");
        return;
      }
      auto value = rest.substr(6);
      Rotation rot;
      if (value == "irrational") {
        rot.irrational = true;
      } else {
        auto slash = value.find('/');
        try {
          if (slash == std::string::npos) throw std::invalid_argument("missing /");
          rot.p = std::stoll(value.substr(0, slash));
          rot.q = std::stoll(value.substr(slash + 1));
        } catch (const std::exception&) {
          error(line, 1, ErrorKind::Alphabet, "bad rotation '" + value + "'");
          return;
        }
        if (rot.q < 1 || rot.p < 0 || std::gcd(rot.p, rot.q) != 1)
          error(line, 1, ErrorKind::Alphabet, "rotation p/q needs q >= 1 and gcd(p,q) = 1");
        if (rot.q >= 1) rot.p %= rot.q;
      }
      spec.alphabet = AlphabetDecl::circle(rot);
    } else {
      error(line, column_of(text, fam), ErrorKind::Alphabet, "unknown alphabet family '" + fam + "'");
    }
  }

  static int column_of(const std::string& text, const std::string& needle) {
    auto pos = text.find(needle);
    return pos == std::string::npos ? 1 : static_cast<int>(pos) + 1;
  }

  // -- rule parsing --------------------------------------------------------

  struct Cursor {
    const std::vector<Token>& toks;
    std::size_t i = 0;
    const Token& peek() const { return toks[i]; }
    const Token& next() { return toks[i < toks.size() - 1 ? i++ : i]; }
    bool at(Tok k) const { return toks[i].kind == k; }
    bool at_ident(std::string_view s) const { return toks[i].kind == Tok::Ident && toks[i].text == s; }
  };

  struct Failed {};

  [[noreturn]] void fail(int line, const Token& t, const std::string& message) {
    error(line, t.column, ErrorKind::Syntax, message);
    throw Failed{};
  }

  void parse_rule(const std::vector<Token>& toks, int line) {
    Cursor cur{toks};
    cur.next();  // "rule"
    GuardedRule rule;
    rule.line = line;
    try {
      parse_pattern(cur, rule, line);
      if (cur.at_ident("if")) {
        cur.next();
        parse_guard(cur, rule, line);
      }
      if (!cur.at(Tok::Arrow)) fail(line, cur.peek(), "expected '->'");
      cur.next();
      if (cur.at(Tok::End)) fail(line, cur.peek(), "rule needs a non-empty right-hand side");
      while (!cur.at(Tok::End)) parse_rhs_letter(cur, rule, line);
    } catch (const Failed&) {
      return;
    }
    spec.rules.push_back(std::move(rule));
  }

  std::size_t new_variable(GuardedRule& rule, const Token& t, int line) {
    if (reserved_words().count(t.text)) fail(line, t, "reserved word '" + t.text + "' used as variable");
    if (std::find(rule.variables.begin(), rule.variables.end(), t.text) != rule.variables.end())
      fail(line, t, "variable '" + t.text + "' repeated in pattern");
    rule.variables.push_back(t.text);
    return rule.variables.size() - 1;
  }

  Component parse_pattern_component(Cursor& cur, GuardedRule& rule, int line) {
    const Token& t = cur.next();
    if (t.kind == Tok::Int) return {Component::Kind::Literal, t.value, 0};
    if (t.kind == Tok::Ident && t.text == "inf") return {Component::Kind::Infinity, 0, 0};
    if (t.kind == Tok::Ident) return {Component::Kind::Variable, 0, new_variable(rule, t, line)};
    fail(line, t, "expected natural, 'inf' or variable in pattern");
  }

  void parse_pattern(Cursor& cur, GuardedRule& rule, int line) {
    auto& p = rule.pattern;
    switch (spec.alphabet.family) {
      case AlphabetFamily::Finite: {
        const Token& t = cur.next();
        p.kind = Pattern::Kind::Symbol;
        p.symbol = symbol_index(t, line);
        break;
      }
      case AlphabetFamily::NatInf:
        p.kind = Pattern::Kind::Nat;
        p.components.push_back(parse_pattern_component(cur, rule, line));
        break;
      case AlphabetFamily::NatInf2:
        p.kind = Pattern::Kind::Pair;
        if (!cur.at(Tok::LParen)) fail(line, cur.peek(), "expected '(' in pair pattern");
        cur.next();
        p.components.push_back(parse_pattern_component(cur, rule, line));
        if (!cur.at(Tok::Comma)) fail(line, cur.peek(), "expected ',' in pair pattern");
        cur.next();
        p.components.push_back(parse_pattern_component(cur, rule, line));
        if (!cur.at(Tok::RParen)) fail(line, cur.peek(), "expected ')' in pair pattern");
        cur.next();
        break;
      case AlphabetFamily::Circle: {
        const Token& t = cur.next();
        if (t.kind != Tok::Ident || reserved_words().count(t.text)) fail(line, t, "circle rules take a variable pattern");
        p.kind = Pattern::Kind::Circle;
        p.var = new_variable(rule, t, line);
        break;
      }
    }
  }

  std::int64_t symbol_index(const Token& t, int line) {
    const auto& syms = spec.alphabet.symbols;
    if (t.kind != Tok::Ident && t.kind != Tok::Int) fail(line, t, "expected a symbol");
    auto it = std::find(syms.begin(), syms.end(), t.text);
    if (it == syms.end()) fail(line, t, "unknown symbol '" + t.text + "'");
    return it - syms.begin();
  }

  std::size_t lookup_variable(const GuardedRule& rule, const Token& t, int line) {
    auto it = std::find(rule.variables.begin(), rule.variables.end(), t.text);
    if (it == rule.variables.end()) fail(line, t, "unknown variable '" + t.text + "'");
    return static_cast<std::size_t>(it - rule.variables.begin());
  }

  void parse_guard(Cursor& cur, GuardedRule& rule, int line) {
    if (cur.at_ident("true")) {
      cur.next();
      return;
    }
    while (true) {
      const Token& vt = cur.next();
      if (vt.kind != Tok::Ident) fail(line, vt, "expected variable in guard");
      Condition c;
      c.var = lookup_variable(rule, vt, line);
      if (cur.at(Tok::Percent)) {
        cur.next();
        const Token& mt = cur.next();
        if (mt.kind != Tok::Int || mt.value < 1) fail(line, mt, "expected positive modulus");
        c.modulus = mt.value;
      }
      const Token& op = cur.next();
      if (op.kind != Tok::Cmp) fail(line, op, "expected comparison operator");
      static const std::map<std::string, CompareOp> ops{{"==", CompareOp::Eq}, {"!=", CompareOp::Ne},
                                                        {">=", CompareOp::Ge}, {">", CompareOp::Gt},
                                                        {"<=", CompareOp::Le}, {"<", CompareOp::Lt}};
      c.op = ops.at(op.text);
      const Token& val = cur.next();
      if (val.kind != Tok::Int) fail(line, val, "guards compare against integer constants");
      c.value = val.value;
      if (c.modulus > 0 && (c.op != CompareOp::Eq || c.value >= c.modulus))
        fail(line, op, "modular guards take the form var % m == r with 0 <= r < m");
      rule.guard.conditions.push_back(c);
      if (!cur.at_ident("and")) break;
      cur.next();
    }
  }

  LinearForm parse_linear(Cursor& cur, bool allow_leading_sign, int line) {
    LinearForm f;
    f.column = cur.peek().column;
    int sign = 1;
    if (cur.at(Tok::Minus) || cur.at(Tok::Plus)) {
      if (!allow_leading_sign) fail(line, cur.peek(), "letter expression cannot start with a sign");
      sign = cur.next().kind == Tok::Minus ? -1 : 1;
    }
    while (true) {
      parse_term(cur, f, sign, line);
      if (cur.at(Tok::Plus) || cur.at(Tok::Minus)) {
        sign = cur.next().kind == Tok::Minus ? -1 : 1;
        continue;
      }
      break;
    }
    return f;
  }

  void parse_term(Cursor& cur, LinearForm& f, int sign, int line) {
    const Token& t = cur.next();
    if (t.kind == Tok::Int) {
      if (cur.at(Tok::Star)) {
        cur.next();
        if (!cur.at_ident("alpha")) fail(line, cur.peek(), "expected 'alpha' after '*'");
      }
      if (cur.at_ident("alpha")) {
        cur.next();
        f.alpha += sign * t.value;
        return;
      }
      f.constant += sign * t.value;
      f.constant_seen = true;
      return;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "alpha") {
        f.alpha += sign;
        return;
      }
      if (t.text == "inf") {
        if (sign < 0) fail(line, t, "'-inf' is not a letter");
        f.infinity = true;
        return;
      }
      if (f.var) fail(line, t, "at most one variable per coordinate");
      f.var = t.text;
      f.var_sign = sign;
      return;
    }
    fail(line, t, "expected letter expression");
  }

  RawExpr parse_raw(Cursor& cur, int line) {
    RawExpr e;
    e.column = cur.peek().column;
    if (cur.at(Tok::LParen)) {
      cur.next();
      e.parenthesized = true;
      e.components.push_back(parse_linear(cur, true, line));
      if (cur.at(Tok::Comma)) {
        cur.next();
        e.components.push_back(parse_linear(cur, true, line));
      }
      if (!cur.at(Tok::RParen)) fail(line, cur.peek(), "expected ')'");
      cur.next();
      return e;
    }
    e.components.push_back(parse_linear(cur, false, line));
    return e;
  }

  Component to_nat_component(const LinearForm& f, const GuardedRule& rule, int line) {
    Token at{Tok::Ident, "", f.column, 0};
    if (f.alpha != 0) fail(line, at, "'alpha' only appears in circle alphabets");
    if (f.infinity) {
      if (f.var) fail(line, at, "cannot combine 'inf' with a variable");
      return {Component::Kind::Infinity, 0, 0};
    }
    if (f.var) {
      if (f.var_sign != 1) fail(line, at, "variables enter with coefficient +1");
      Token vt{Tok::Ident, *f.var, f.column, 0};
      return {Component::Kind::Variable, f.constant, lookup_variable(rule, vt, line)};
    }
    if (f.constant < 0) {
      error(line, f.column, ErrorKind::NegativeLetter, "literal letter " + std::to_string(f.constant) + " is negative");
      throw Failed{};
    }
    return {Component::Kind::Literal, f.constant, 0};
  }

  void parse_rhs_letter(Cursor& cur, GuardedRule& rule, int line) {
    LetterExpr e;
    switch (spec.alphabet.family) {
      case AlphabetFamily::Finite: {
        const Token& t = cur.next();
        e.kind = LetterExpr::Kind::Symbol;
        e.symbol = symbol_index(t, line);
        break;
      }
      case AlphabetFamily::NatInf: {
        RawExpr raw = parse_raw(cur, line);
        if (raw.components.size() != 1) fail(line, cur.peek(), "pair expression in a nat_inf alphabet");
        e.kind = LetterExpr::Kind::Nat;
        e.components.push_back(to_nat_component(raw.components[0], rule, line));
        break;
      }
      case AlphabetFamily::NatInf2: {
        int column = cur.peek().column;
        RawExpr raw = parse_raw(cur, line);
        if (raw.components.size() != 2) fail(line, Token{Tok::LParen, "", column, 0}, "expected pair expression (a,b)");
        e.kind = LetterExpr::Kind::Pair;
        e.components.push_back(to_nat_component(raw.components[0], rule, line));
        e.components.push_back(to_nat_component(raw.components[1], rule, line));
        break;
      }
      case AlphabetFamily::Circle: {
        RawExpr raw = parse_raw(cur, line);
        Token at{Tok::Ident, "", raw.column, 0};
        if (raw.components.size() != 1) fail(line, at, "pair expression in a circle alphabet");
        const auto& f = raw.components[0];
        if (f.infinity) fail(line, at, "'inf' is not a circle letter");
        e.kind = LetterExpr::Kind::Circle;
        e.alpha_multiple = f.alpha;
        if (f.var) {
          if (f.var_sign != 1) fail(line, at, "variables enter with coefficient +1");
          Token vt{Tok::Ident, *f.var, f.column, 0};
          lookup_variable(rule, vt, line);
          e.uses_var = true;
          if (f.constant != 0) fail(line, at, "circle expressions are x + k*alpha");
        } else if (f.constant_seen && !(f.constant == 1 && f.alpha == 0)) {
          fail(line, at, "the only circle constant is the unit '1'");
        } else if (!f.constant_seen && f.alpha == 0) {
          fail(line, at, "empty circle expression");
        }
        break;
      }
    }
    rule.rhs.push_back(std::move(e));
  }

  // -- semantic checks -----------------------------------------------------

  void compute_bounds() {
    std::int64_t bound = 0, period = 1, offset = 0, literal = 0;
    for (const auto& r : spec.rules) {
      for (const auto& c : r.pattern.components)
        if (c.kind == Component::Kind::Literal) {
          bound = std::max(bound, c.value);
          literal = std::max(literal, c.value);
        }
      for (const auto& c : r.guard.conditions) {
        if (c.modulus > 0) {
          period = std::lcm(period, c.modulus);
        } else {
          bound = std::max(bound, c.value);
          literal = std::max(literal, c.value);
        }
      }
      for (const auto& e : r.rhs)
        for (const auto& c : e.components) {
          if (c.kind == Component::Kind::Variable) offset = std::max(offset, std::abs(c.value));
          if (c.kind == Component::Kind::Literal) literal = std::max(literal, c.value);
        }
    }
    if (period > 4096) {
      error(alphabet_line, 1, ErrorKind::Syntax, "guard moduli have lcm above 4096");
      period = 1;
    }
    spec.guard_bound_ = bound;
    spec.guard_period_ = period;
    spec.max_offset_ = offset;
    spec.max_literal_ = literal;
    spec.max_length = 0;
    for (const auto& r : spec.rules) spec.max_length = std::max(spec.max_length, r.rhs.size());
  }

  // Smallest finite value of `var` admitted by the rule's own pattern and guard.
  std::optional<std::int64_t> min_value(const GuardedRule& rule, std::size_t var) const {
    const std::int64_t limit = spec.guard_bound_ + spec.guard_period_;
    for (std::int64_t v = 0; v <= limit; ++v) {
      bool ok = std::all_of(rule.guard.conditions.begin(), rule.guard.conditions.end(),
                            [&](const Condition& c) { return c.var != var || c.holds(v); });
      if (ok) return v;
    }
    return std::nullopt;
  }

  void check_negative_letters() {
    for (const auto& rule : spec.rules) {
      for (std::size_t pos = 0; pos < rule.rhs.size(); ++pos) {
        for (const auto& c : rule.rhs[pos].components) {
          if (c.kind != Component::Kind::Variable || c.value >= 0) continue;
          auto lo = min_value(rule, c.var);
          if (lo && *lo + c.value < 0) {
            error(rule.line, 1, ErrorKind::NegativeLetter,
                  "negative letter reachable at " + rule.variables[c.var] + "=" + std::to_string(*lo) + " (position " +
                      std::to_string(pos + 1) + " evaluates to " + std::to_string(*lo + c.value) + ")");
          }
        }
      }
    }
  }

  void build_finite_table() {
    const auto n = spec.alphabet.symbols.size();
    spec.symbol_rule_.assign(n, -1);
    for (std::size_t i = 0; i < spec.rules.size(); ++i) {
      const auto& r = spec.rules[i];
      if (!r.guard.conditions.empty()) error(r.line, 1, ErrorKind::Syntax, "finite alphabets take unguarded rules");
      auto& slot = spec.symbol_rule_[static_cast<std::size_t>(r.pattern.symbol)];
      if (slot >= 0) {
        error(r.line, 1, ErrorKind::OverlappingGuards,
              "symbol '" + spec.alphabet.symbols[static_cast<std::size_t>(r.pattern.symbol)] + "' already has a rule on line " +
                  std::to_string(spec.rules[static_cast<std::size_t>(slot)].line));
      } else {
        slot = static_cast<int>(i);
      }
    }
    for (std::size_t s = 0; s < n; ++s)
      if (spec.symbol_rule_[s] < 0)
        error(alphabet_line, 1, ErrorKind::NonExhaustive, "no rule for symbol '" + spec.alphabet.symbols[s] + "'");
  }

  void check_circle() {
    if (spec.rules.size() != 1) {
      error(spec.rules.empty() ? alphabet_line : spec.rules[1].line, 1,
            spec.rules.empty() ? ErrorKind::NonExhaustive : ErrorKind::OverlappingGuards,
            "circle alphabets take exactly one rule `x -> ...`");
      return;
    }
    if (!spec.rules[0].guard.conditions.empty())
      error(spec.rules[0].line, 1, ErrorKind::Syntax, "circle rules are unguarded");
  }

  // Cell c of one coordinate stands for the value c when c <= K + L, else ∞.
  ExtNat cell_value(std::size_t c) const {
    auto v = static_cast<std::int64_t>(c);
    return v <= spec.guard_bound_ + spec.guard_period_ ? v : kInfinity;
  }

  // 0 = no match, 1 = explicit match, 2 = match through a variable bound to ∞.
  int match_cell(const GuardedRule& rule, const std::vector<ExtNat>& values) const {
    bool limit = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& c = rule.pattern.components[i];
      switch (c.kind) {
        case Component::Kind::Literal:
          if (values[i] != c.value) return 0;
          break;
        case Component::Kind::Infinity:
          if (!is_infinite(values[i])) return 0;
          break;
        case Component::Kind::Variable:
          if (is_infinite(values[i])) limit = true;
          for (const auto& cond : rule.guard.conditions)
            if (cond.var == c.var && !cond.holds(values[i])) return 0;
          break;
      }
    }
    return limit ? 2 : 1;
  }

  void build_cell_table() {
    const bool pair = spec.alphabet.family == AlphabetFamily::NatInf2;
    const std::size_t per = spec.cells_per_coordinate();
    const std::size_t total = pair ? per * per : per;
    spec.cells_.assign(total, {});
    std::set<std::pair<std::size_t, std::size_t>> reported_overlaps;
    bool reported_gap = false;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<ExtNat> values;
      if (pair) {
        values = {cell_value(idx / per), cell_value(idx % per)};
      } else {
        values = {cell_value(idx)};
      }
      std::vector<std::size_t> explicit_matches, limit_matches;
      for (std::size_t r = 0; r < spec.rules.size(); ++r) {
        int m = match_cell(spec.rules[r], values);
        if (m == 1) explicit_matches.push_back(r);
        if (m == 2) limit_matches.push_back(r);
      }
      const std::string letter = format_letter(spec.alphabet, pair ? Letter::pair(values[0], values[1]) : Letter::nat(values[0]));
      if (explicit_matches.size() > 1) {
        auto key = std::make_pair(explicit_matches[0], explicit_matches[1]);
        if (reported_overlaps.insert(key).second)
          error(spec.rules[key.second].line, 1, ErrorKind::OverlappingGuards,
                "rules on lines " + std::to_string(spec.rules[key.first].line) + " and " +
                    std::to_string(spec.rules[key.second].line) + " both match " + letter);
        spec.cells_[idx] = {static_cast<int>(explicit_matches[0]), false};
      } else if (explicit_matches.size() == 1) {
        spec.cells_[idx] = {static_cast<int>(explicit_matches[0]), false};
      } else if (!limit_matches.empty()) {
        if (limit_matches.size() > 1)
          spec.warnings.push_back("first-match tie-break used for " + letter + " (rules on lines " +
                                  std::to_string(spec.rules[limit_matches[0]].line) + " and " +
                                  std::to_string(spec.rules[limit_matches[1]].line) + ")");
        spec.cells_[idx] = {static_cast<int>(limit_matches[0]), true};
      } else if (!reported_gap) {
        reported_gap = true;
        error(alphabet_line, 1, ErrorKind::NonExhaustive, "no rule matches letter " + letter);
      }
    }
  }

  void finish(const ParseOptions& options) {
    compute_bounds();
    switch (spec.alphabet.family) {
      case AlphabetFamily::Finite: build_finite_table(); break;
      case AlphabetFamily::Circle: check_circle(); break;
      case AlphabetFamily::NatInf:
      case AlphabetFamily::NatInf2:
        check_negative_letters();
        build_cell_table();
        break;
    }
    if (errors.empty() && options.check_continuity) {
      for (const auto& d : validate_continuity(spec))
        error(d.line, 1, ErrorKind::Continuity, d.message);
    }
  }
};

SubstitutionSpec parse(std::string_view source, const ParseOptions& options) {
  SpecBuilder b;
  bool have_alphabet = false;
  std::istringstream in{std::string(source)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string text = raw.substr(0, hash);
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    std::istringstream words(text);
    std::string head;
    words >> head;
    if (head == "alphabet") {
      if (have_alphabet) {
        b.error(line, 1, ErrorKind::Syntax, "duplicate alphabet declaration");
        continue;
      }
      have_alphabet = true;
      b.parse_alphabet(text, line);
      continue;
    }
    std::vector<LexError> lex_errors;
    auto toks = lex(text, lex_errors);
    for (const auto& e : lex_errors) b.error(line, e.column, ErrorKind::Syntax, e.message);
    if (!lex_errors.empty()) continue;
    if (toks[0].kind == Tok::Ident && toks[0].text == "rule") {
      if (!have_alphabet) {
        b.error(line, 1, ErrorKind::Syntax, "rule before alphabet declaration");
        continue;
      }
      b.parse_rule(toks, line);
      continue;
    }
    b.error(line, toks[0].column, ErrorKind::Syntax, "expected 'alphabet' or 'rule'");
  }
  if (!have_alphabet) b.error(1, 1, ErrorKind::Syntax, "missing alphabet declaration");
  if (b.errors.empty()) b.finish(options);
  if (!b.errors.empty()) throw ParseFailure(std::move(b.errors));
  return std::move(b.spec);
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace {

std::string format_component(const Component& c, const GuardedRule& rule) {
  switch (c.kind) {
    case Component::Kind::Literal: return std::to_string(c.value);
    case Component::Kind::Infinity: return "inf";
    case Component::Kind::Variable: {
      std::string s = rule.variables[c.var];
      if (c.value > 0) s += "+" + std::to_string(c.value);
      if (c.value < 0) s += "-" + std::to_string(-c.value);
      return s;
    }
  }
  return "";
}

std::string format_alpha(std::int64_t k) {
  if (k == 1) return "alpha";
  return std::to_string(k) + "*alpha";
}

std::string format_expr(const LetterExpr& e, const GuardedRule& rule, const AlphabetDecl& alphabet) {
  switch (e.kind) {
    case LetterExpr::Kind::Symbol: return alphabet.symbols[static_cast<std::size_t>(e.symbol)];
    case LetterExpr::Kind::Nat: {
      const auto& c = e.components[0];
      auto s = format_component(c, rule);
      if (c.kind == Component::Kind::Variable && c.value != 0) return "(" + s + ")";
      return s;
    }
    case LetterExpr::Kind::Pair:
      return "(" + format_component(e.components[0], rule) + "," + format_component(e.components[1], rule) + ")";
    case LetterExpr::Kind::Circle: {
      if (!e.uses_var) {
        if (e.alpha_multiple == 0) return "1";
        if (e.alpha_multiple > 0) return format_alpha(e.alpha_multiple);
        return "(-" + format_alpha(-e.alpha_multiple) + ")";
      }
      std::string s = rule.variables[rule.pattern.var];
      if (e.alpha_multiple > 0) s += "+" + format_alpha(e.alpha_multiple);
      if (e.alpha_multiple < 0) s += "-" + format_alpha(-e.alpha_multiple);
      return s;
    }
  }
  return "";
}

std::string format_pattern(const GuardedRule& rule, const AlphabetDecl& alphabet) {
  const auto& p = rule.pattern;
  switch (p.kind) {
    case Pattern::Kind::Symbol: return alphabet.symbols[static_cast<std::size_t>(p.symbol)];
    case Pattern::Kind::Nat: return format_component(p.components[0], rule);
    case Pattern::Kind::Pair:
      return "(" + format_component(p.components[0], rule) + "," + format_component(p.components[1], rule) + ")";
    case Pattern::Kind::Circle: return rule.variables[p.var];
  }
  return "";
}

std::string format_condition(const Condition& c, const GuardedRule& rule) {
  static const char* names[] = {"==", "!=", ">=", ">", "<=", "<"};
  std::string s = rule.variables[c.var];
  if (c.modulus > 0) s += "%" + std::to_string(c.modulus);
  return s + names[static_cast<int>(c.op)] + std::to_string(c.value);
}

}  // namespace

std::string pretty_print(const SubstitutionSpec& spec) {
  std::ostringstream out;
  const auto& a = spec.alphabet;
  out << "alphabet ";
  switch (a.family) {
    case AlphabetFamily::Finite:
      out << "finite";
      for (const auto& s : a.symbols) out << ' ' << s;
      break;
    case AlphabetFamily::NatInf: out << "nat_inf"; break;
    case AlphabetFamily::NatInf2: out << "nat_inf2"; break;
    case AlphabetFamily::Circle:
      out << "circle alpha=";
      if (a.rotation.irrational) {
        out << "irrational";
      } else {
        out << a.rotation.p << '/' << a.rotation.q;
      }
      break;
  }
  out << '\n';
  for (const auto& r : spec.rules) {
    out << "rule " << format_pattern(r, a);
    if (!r.guard.conditions.empty()) {
      out << " if ";
      for (std::size_t i = 0; i < r.guard.conditions.size(); ++i) {
        if (i) out << " and ";
        out << format_condition(r.guard.conditions[i], r);
      }
    }
    out << " ->";
    for (const auto& e : r.rhs) out << ' ' << format_expr(e, r, a);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Continuity
// ---------------------------------------------------------------------------

std::vector<ContinuityDiagnostic> validate_continuity(const SubstitutionSpec& spec) {
  std::vector<ContinuityDiagnostic> out;
  const auto fam = spec.alphabet.family;
  if (fam != AlphabetFamily::NatInf && fam != AlphabetFamily::NatInf2) return out;
  const bool pair = fam == AlphabetFamily::NatInf2;
  const std::size_t dims = pair ? 2 : 1;
  const std::int64_t K = spec.guard_bound();
  const std::int64_t L = spec.guard_period();

  // Finite values standing for each cell of one coordinate, plus ∞.
  std::vector<std::vector<ExtNat>> cell_members;
  for (std::int64_t v = 0; v <= K; ++v) cell_members.push_back({v});
  for (std::int64_t r = 0; r < L; ++r) cell_members.push_back({K + 1 + r, K + 1 + r + L});
  cell_members.push_back({kInfinity});
  const std::size_t per = cell_members.size();

  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  auto make_letter = [&](const std::vector<ExtNat>& v) { return pair ? Letter::pair(v[0], v[1]) : Letter::nat(v[0]); };

  const std::size_t total = pair ? per * per : per;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<std::size_t> cells = pair ? std::vector<std::size_t>{idx / per, idx % per} : std::vector<std::size_t>{idx};
    std::vector<std::size_t> inf_coords;
    for (std::size_t i = 0; i < dims; ++i)
      if (cells[i] == per - 1) inf_coords.push_back(i);
    if (inf_coords.empty()) continue;

    // every member combination of the finite coordinates of p
    std::vector<std::vector<ExtNat>> bases{{}};
    for (std::size_t i = 0; i < dims; ++i) {
      std::vector<std::vector<ExtNat>> next;
      for (const auto& b : bases)
        for (ExtNat v : cell_members[cells[i]]) {
          auto nb = b;
          nb.push_back(v);
          next.push_back(nb);
        }
      bases = std::move(next);
    }

    for (const auto& p_values : bases) {
      const Letter p = make_letter(p_values);
      auto pm = spec.match(p);
      if (!pm) continue;
      const Word p_image = spec.evaluate(p);
      // approach p along every non-empty subset T of its infinite coordinates
      for (std::size_t mask = 1; mask < (std::size_t{1} << inf_coords.size()); ++mask) {
        std::vector<std::size_t> T;
        for (std::size_t j = 0; j < inf_coords.size(); ++j)
          if (mask & (std::size_t{1} << j)) T.push_back(inf_coords[j]);
        std::size_t combos = 1;
        for (std::size_t j = 0; j < T.size(); ++j) combos *= static_cast<std::size_t>(L);
        for (std::size_t combo = 0; combo < combos; ++combo) {
          auto q_values = p_values;
          std::size_t rest = combo;
          for (std::size_t t : T) {
            q_values[t] = K + 1 + static_cast<std::int64_t>(rest % static_cast<std::size_t>(L));
            rest /= static_cast<std::size_t>(L);
          }
          const Letter q = make_letter(q_values);
          auto qm = spec.match(q);
          if (!qm) continue;
          const auto& q_rule = spec.rules[qm->rule];
          auto bindings = qm->bindings;
          for (std::size_t t : T) {
            const auto& c = q_rule.pattern.components[t];
            if (c.kind == Component::Kind::Variable) bindings[c.var] = kInfinity;
          }
          // limit of the images of q as the T coordinates tend to ∞
          Word limit;
          for (const auto& e : q_rule.rhs) {
            std::vector<ExtNat> v;
            for (const auto& c : e.components) {
              switch (c.kind) {
                case Component::Kind::Literal: v.push_back(c.value); break;
                case Component::Kind::Infinity: v.push_back(kInfinity); break;
                case Component::Kind::Variable: v.push_back(shifted(bindings[c.var], c.value)); break;
              }
            }
            limit.push_back(make_letter(v));
          }
          const auto& p_rule = spec.rules[pm->rule];
          if (limit.size() != p_image.size()) {
            if (seen.insert({pm->rule, qm->rule, 0}).second)
              out.push_back({pm->rule, p_rule.line, 0,
                             "image of " + format_letter(spec.alphabet, p) + " has length " +
                                 std::to_string(p_image.size()) + " but rule on line " + std::to_string(q_rule.line) +
                                 " gives length " + std::to_string(limit.size()) +
                                 " arbitrarily close to it (rhs length is not eventually constant)"});
            continue;
          }
          for (std::size_t i = 0; i < limit.size(); ++i) {
            if (limit[i] == p_image[i]) continue;
            if (seen.insert({pm->rule, qm->rule, i + 1}).second)
              out.push_back({pm->rule, p_rule.line, i + 1,
                             "position " + std::to_string(i + 1) + " of the image of " +
                                 format_letter(spec.alphabet, p) + " is " + format_letter(spec.alphabet, p_image[i]) +
                                 " but the limit along rule on line " + std::to_string(q_rule.line) + " is " +
                                 format_letter(spec.alphabet, limit[i])});
          }
        }
      }
    }
  }
  return out;
}

}  // namespace subkit
