#include "subkit/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "subkit/engine.hpp"
#include "subkit/operator.hpp"

namespace subkit {

namespace {

using LetterSet = std::unordered_set<Letter, LetterHash>;

/// Distinct letters of ρ(a), memoised.
class ImageLetters {
 public:
  explicit ImageLetters(const SubstitutionSpec& spec) : spec_(spec) {}

  const std::vector<Letter>& operator()(const Letter& a) {
    auto it = memo_.find(a);
    if (it != memo_.end()) return it->second;
    auto img = spec_.evaluate(a);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    return memo_.emplace(a, std::move(img)).first->second;
  }

 private:
  const SubstitutionSpec& spec_;
  std::unordered_map<Letter, std::vector<Letter>, LetterHash> memo_;
};

LetterSet step(ImageLetters& images, const LetterSet& s) {
  LetterSet out;
  for (const auto& a : s)
    for (const auto& b : images(a)) out.insert(b);
  return out;
}

/// First net point not within eps of any letter of s.
std::optional<Letter> uncovered(const AlphabetDecl& alphabet, const std::vector<Letter>& net, const LetterSet& s,
                                double eps) {
  for (const auto& b : net) {
    if (s.count(b)) continue;
    bool hit = false;
    for (const auto& a : s)
      if (distance(alphabet, a, b) < eps) {
        hit = true;
        break;
      }
    if (!hit) return b;
  }
  return std::nullopt;
}

std::vector<Letter> primitivity_sample(const SubstitutionSpec& spec, const PrimitivityOptions& o, std::string& desc) {
  const auto& alphabet = spec.alphabet;
  auto window = exactness_window(spec, o.p_max);
  std::vector<Letter> sample = window.letters;
  std::mt19937_64 rng(o.seed);
  std::set<Letter> seen(sample.begin(), sample.end());
  const std::int64_t hi = std::max<std::int64_t>(4 * window.window, 64);
  std::uniform_int_distribution<std::int64_t> value(0, hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto ext = [&]() -> ExtNat { return coin(rng) < 0.1 ? kInfinity : value(rng); };
  std::size_t added = 0;
  for (std::size_t i = 0; i < o.sample_size; ++i) {
    Letter a;
    switch (alphabet.family) {
      case AlphabetFamily::Finite: return sample;
      case AlphabetFamily::NatInf: a = Letter::nat(ext()); break;
      case AlphabetFamily::NatInf2: a = Letter::pair(ext(), ext()); break;
      case AlphabetFamily::Circle: {
        const std::int64_t q = alphabet.rotation.irrational ? 997 : alphabet.rotation.q;
        a = Letter::grid(std::uniform_int_distribution<std::int64_t>(0, q - 1)(rng), q);
        break;
      }
    }
    if (seen.insert(a).second) {
      sample.push_back(a);
      ++added;
    }
  }
  desc = std::to_string(window.letters.size()) + " window letters (window " + std::to_string(window.window) + ") + " +
         std::to_string(added) + " random letters (seed " + std::to_string(o.seed) + ")";
  return sample;
}

}  // namespace

// ---------------------------------------------------------------------------
// Primitivity
// ---------------------------------------------------------------------------

PrimitivityCertificate check_primitivity(const SubstitutionSpec& spec, const PrimitivityOptions& options) {
  PrimitivityCertificate cert;
  const auto& alphabet = spec.alphabet;
  cert.eps = options.eps;
  ImageLetters images(spec);

  if (alphabet.family == AlphabetFamily::Finite) {
    cert.exact = true;
    const std::size_t n = alphabet.symbols.size();
    for (std::size_t i = 0; i < n; ++i) cert.net.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
    cert.sample = cert.net;
    cert.net_size = n;
    cert.letters_checked = n;
    cert.checked_letters = "all " + std::to_string(n) + " letters";
    // Wielandt: a primitive n×n pattern has a positive power at (n−1)²+1
    const unsigned limit = std::max<unsigned>(options.p_max, static_cast<unsigned>((n - 1) * (n - 1) + 1));
    std::vector<LetterSet> sets(n);
    for (std::size_t i = 0; i < n; ++i) sets[i] = {cert.net[i]};
    for (unsigned p = 1; p <= limit; ++p) {
      cert.p_checked = p;
      bool all = true;
      for (std::size_t i = 0; i < n; ++i) {
        sets[i] = step(images, sets[i]);
        if (sets[i].size() != n && all) {
          all = false;
          cert.counter_letter = cert.net[i];
          cert.missed_net_point = uncovered(alphabet, cert.net, sets[i], 0.5);
        }
      }
      if (all) {
        cert.p = p;
        cert.verdict = "certified";
        cert.counter_letter.reset();
        cert.missed_net_point.reset();
        return cert;
      }
    }
    cert.verdict = "refuted";
    return cert;
  }

  cert.net = epsilon_net(alphabet, options.eps);
  cert.net_size = cert.net.size();
  cert.sample = primitivity_sample(spec, options, cert.checked_letters);
  cert.letters_checked = cert.sample.size();

  // ok[p−1] stays true while every sampled letter covers the net at power p
  std::vector<bool> ok(options.p_max, true);
  std::vector<std::pair<Letter, Letter>> counter(options.p_max);
  bool truncated = false;
  for (const auto& a : cert.sample) {
    LetterSet s{a};
    for (unsigned p = 1; p <= options.p_max; ++p) {
      s = step(images, s);
      if (s.size() > options.max_set_size) {
        truncated = true;
        for (unsigned q = p; q <= options.p_max; ++q) ok[q - 1] = false;
        break;
      }
      if (!ok[p - 1]) continue;
      if (auto miss = uncovered(alphabet, cert.net, s, options.eps)) {
        ok[p - 1] = false;
        counter[p - 1] = {a, *miss};
      }
    }
  }
  cert.p_checked = options.p_max;
  for (unsigned p = 1; p <= options.p_max; ++p)
    if (ok[p - 1]) {
      cert.p = p;
      cert.verdict = "certified-at-eps";
      return cert;
    }
  if (truncated) {
    cert.verdict = "undetermined";
    return cert;
  }
  cert.verdict = "refuted-up-to-pMax";
  cert.counter_letter = counter.back().first;
  cert.missed_net_point = counter.back().second;
  return cert;
}

bool verify_primitivity(const SubstitutionSpec& spec, const PrimitivityCertificate& cert) {
  if (!cert.p) return false;
  ImageLetters images(spec);
  const double eps = cert.exact ? 0.5 : cert.eps;
  for (const auto& a : cert.sample) {
    LetterSet s{a};
    for (unsigned i = 0; i < *cert.p; ++i) s = step(images, s);
    if (uncovered(spec.alphabet, cert.net, s, eps)) return false;
  }
  return true;
}

bool matrix_primitive(const SubstitutionSpec& spec) {
  if (spec.alphabet.family != AlphabetFamily::Finite) throw std::invalid_argument("matrix test needs a finite alphabet");
  const std::size_t n = spec.alphabet.symbols.size();
  using Pattern = std::vector<std::vector<bool>>;
  Pattern a(n, std::vector<bool>(n, false));
  for (std::size_t j = 0; j < n; ++j)
    for (const auto& b : spec.evaluate(Letter::symbol(static_cast<std::int64_t>(j))))
      a[static_cast<std::size_t>(b.first())][j] = true;
  Pattern power = a;
  const std::size_t limit = (n - 1) * (n - 1) + 1;
  for (std::size_t k = 1; k <= limit; ++k) {
    bool positive = true;
    for (const auto& row : power)
      for (bool x : row) positive = positive && x;
    if (positive) return true;
    Pattern next(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        if (power[i][l])
          for (std::size_t j = 0; j < n; ++j)
            if (a[l][j]) next[i][j] = true;
    power = std::move(next);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Irreducibility
// ---------------------------------------------------------------------------

namespace {

using Graph = std::vector<std::vector<std::size_t>>;

/// Kosaraju with explicit stacks; returns the component id of every vertex.
std::vector<std::size_t> strong_components(const Graph& g, std::size_t& count) {
  const std::size_t n = g.size();
  Graph rev(n);
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : g[v]) rev[w].push_back(v);

  std::vector<std::size_t> order;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = true;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < g[v].size()) {
        auto w = g[v][i++];
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> comp(n, static_cast<std::size_t>(-1));
  count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != static_cast<std::size_t>(-1)) continue;
    std::vector<std::size_t> todo{*it};
    comp[*it] = count;
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      for (auto w : rev[v])
        if (comp[w] == static_cast<std::size_t>(-1)) {
          comp[w] = count;
          todo.push_back(w);
        }
    }
    ++count;
  }
  return comp;
}

Graph class_graph(const SubstitutionSpec& spec, const TruncationScheme& scheme, unsigned power) {
  const std::size_t n = scheme.size();
  Graph one(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto img = folded_image(spec, scheme, i);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    one[i] = std::move(img);
  }
  Graph g = one;
  for (unsigned k = 1; k < power; ++k) {
    Graph next(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::size_t> s;
      for (auto j : g[i]) s.insert(one[j].begin(), one[j].end());
      next[i].assign(s.begin(), s.end());
    }
    g = std::move(next);
  }
  return g;
}

}  // namespace

IrreducibilityReport check_irreducibility(const SubstitutionSpec& spec, const TruncationScheme& scheme,
                                          unsigned power) {
  IrreducibilityReport rep;
  rep.power = power;
  rep.exact = spec.alphabet.family == AlphabetFamily::Finite;
  rep.label = rep.exact ? "exact" : "at cutoff " + std::to_string(scheme.cutoff());
  const auto g = class_graph(spec, scheme, power);
  const std::size_t n = g.size();
  rep.classes = n;
  std::size_t count = 0;
  const auto comp = strong_components(g, count);
  rep.components = count;
  if (count <= 1) {
    rep.verdict = "irreducible";
    return rep;
  }
  rep.verdict = "reducible";

  // eventual range: S ← letters of ρ(S) from S = everything, until stable
  std::vector<bool> s(n, true);
  for (;;) {
    std::vector<bool> next(n, false);
    for (std::size_t v = 0; v < n; ++v)
      if (s[v])
        for (auto w : g[v]) next[w] = true;
    if (next == s) break;
    s = std::move(next);
  }
  const auto size = static_cast<std::size_t>(std::count(s.begin(), s.end(), true));
  if (size > 0 && size < n) {
    rep.witness_kind = "eventual-range";
    for (std::size_t v = 0; v < n; ++v)
      if (s[v]) rep.witness.push_back(scheme.representative(v));
    return rep;
  }
  // otherwise the smallest terminal component
  std::vector<bool> terminal(count, true);
  std::vector<std::size_t> comp_size(count, 0);
  for (std::size_t v = 0; v < n; ++v) {
    ++comp_size[comp[v]];
    for (auto w : g[v])
      if (comp[w] != comp[v]) terminal[comp[v]] = false;
  }
  std::size_t best = count;
  for (std::size_t c = 0; c < count; ++c)
    if (terminal[c] && (best == count || comp_size[c] < comp_size[best])) best = c;
  rep.witness_kind = "terminal-component";
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] == best) rep.witness.push_back(scheme.representative(v));
  return rep;
}

// ---------------------------------------------------------------------------
// Quasi-compactness
// ---------------------------------------------------------------------------

QuasiCompactReport quasi_compact_check(const SubstitutionSpec& spec, const std::vector<Letter>& P, unsigned k_max) {
  if (P.empty()) throw std::invalid_argument("P must not be empty");
  const auto& alphabet = spec.alphabet;
  QuasiCompactReport rep;
  rep.P = P;
  std::set<Letter> pset;
  std::int64_t extra = 0;
  rep.isolated_only = true;
  const bool circle = alphabet.family == AlphabetFamily::Circle;
  const auto scheme = circle ? std::optional(TruncationScheme::build(alphabet, 64)) : std::nullopt;
  for (const auto& a : P) {
    if (!contains(alphabet, a)) throw std::invalid_argument("letter " + format_letter(alphabet, a) + " is not in the alphabet");
    rep.isolated_only = rep.isolated_only && is_isolated(alphabet, a);
    pset.insert(circle ? scheme->fold(a) : a);
    if (a.kind() == Letter::Kind::Nat && !is_infinite(a.first())) extra = std::max(extra, a.first());
    if (a.kind() == Letter::Kind::Pair) {
      if (!is_infinite(a.first())) extra = std::max(extra, a.first());
      if (!is_infinite(a.second())) extra = std::max(extra, a.second());
    }
  }
  rep.exact = !circle;
  const auto bounds = spectral_radius_bounds(spec, std::max(2u, k_max));
  rep.r_lower = bounds.back().best_lower;

  LengthCounter counter(spec, pset);
  for (unsigned k = 1; k <= k_max; ++k) {
    QuasiCompactLevel level;
    level.k = k;
    auto window = exactness_window(spec, k, extra);
    bool first = true;
    for (const auto& a : window.letters) {
      const auto c = counter.count(a, k);
      if (first || c > level.c_k) {
        level.c_k = c;
        level.argmax = a;
        first = false;
      }
    }
    level.r_lower_pow_k = std::pow(rep.r_lower, k);
    const double c = static_cast<double>(level.c_k);
    level.condition1 = rep.isolated_only && c < level.r_lower_pow_k;
    level.condition2 = 2.0 * c < level.r_lower_pow_k;
    if (!rep.passing_k && (level.condition1 || level.condition2)) rep.passing_k = k;
    rep.levels.push_back(level);
  }
  rep.verdict = rep.passing_k ? "quasi-compact" : "not-established";
  return rep;
}

// ---------------------------------------------------------------------------
// Equicontinuity
// ---------------------------------------------------------------------------

namespace {

std::vector<Letter> equicontinuity_sample(const SubstitutionSpec& spec, const EquicontinuityOptions& o) {
  const auto& alphabet = spec.alphabet;
  std::vector<Letter> out;
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      for (std::size_t i = 0; i < alphabet.symbols.size(); ++i) out.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
      break;
    case AlphabetFamily::NatInf:
      for (std::int64_t v = 0; v <= 40; ++v) out.push_back(Letter::nat(v));
      out.push_back(Letter::inf());
      break;
    case AlphabetFamily::NatInf2: {
      std::vector<ExtNat> values;
      for (std::int64_t v = 0; v <= 12; ++v) values.push_back(v);
      values.push_back(kInfinity);
      for (auto x : values)
        for (auto y : values) out.push_back(Letter::pair(x, y));
      break;
    }
    case AlphabetFamily::Circle: out = TruncationScheme::build(alphabet, o.circle_cutoff).representatives(); break;
  }
  return out;
}

}  // namespace

EquicontinuityReport equicontinuity_check(const SubstitutionSpec& spec, const EquicontinuityOptions& options) {
  EquicontinuityReport rep;
  rep.eps_grid = options.eps_grid;
  auto cols = columns(spec);
  if (!cols) {
    rep.verdict = "not-applicable";
    return rep;
  }
  const auto& alphabet = spec.alphabet;
  rep.columns = cols->size();
  for (const auto& c : *cols) rep.column_descriptions.push_back(c.description);

  const auto sample = equicontinuity_sample(spec, options);
  rep.sample_letters = sample.size();
  const double max_eps = options.eps_grid.empty() ? 0.0 : *std::max_element(options.eps_grid.begin(), options.eps_grid.end());
  struct Near {
    std::size_t x, y;
    double d;
  };
  std::vector<Near> pairs;
  for (std::size_t x = 0; x < sample.size(); ++x)
    for (std::size_t y = x + 1; y < sample.size(); ++y) {
      const double d = distance(alphabet, sample[x], sample[y]);
      if (d <= max_eps) pairs.push_back({x, y, d});
    }

  using Table = std::vector<Letter>;
  auto apply_col = [&](std::size_t c, const Table& t) {
    Table out;
    out.reserve(t.size());
    for (const auto& a : t) out.push_back(apply_column(spec, c, a));
    return out;
  };
  auto modulus_of = [&](const Table& t, std::vector<double>& m) {
    for (const auto& pr : pairs) {
      const double d = distance(alphabet, t[pr.x], t[pr.y]);
      for (std::size_t e = 0; e < options.eps_grid.size(); ++e)
        if (pr.d <= options.eps_grid[e]) m[e] = std::max(m[e], d);
    }
  };

  bool all_isometric = true;
  std::set<Table> family;
  std::vector<Table> frontier;
  for (std::size_t c = 0; c < cols->size(); ++c) {
    Table t = apply_col(c, sample);
    bool iso = true;
    for (std::size_t x = 0; x < sample.size() && iso; ++x)
      for (std::size_t y = x + 1; y < sample.size(); ++y)
        if (std::abs(distance(alphabet, t[x], t[y]) - distance(alphabet, sample[x], sample[y])) > 1e-12) {
          iso = false;
          break;
        }
    rep.column_isometric.push_back(iso);
    all_isometric = all_isometric && iso;
    if (family.insert(t).second) frontier.push_back(std::move(t));
  }

  std::vector<double> modulus(options.eps_grid.size(), 0.0);
  for (const auto& t : frontier) modulus_of(t, modulus);
  rep.family_sizes.push_back(family.size());
  rep.modulus.push_back(modulus);
  rep.depth_reached = 1;
  bool overflow = false;
  for (unsigned d = 2; d <= options.depth && !frontier.empty(); ++d) {
    std::vector<Table> next;
    for (const auto& t : frontier)
      for (std::size_t c = 0; c < cols->size(); ++c) {
        Table u = apply_col(c, t);
        if (family.insert(u).second) {
          modulus_of(u, modulus);
          next.push_back(std::move(u));
        }
      }
    frontier = std::move(next);
    rep.family_sizes.push_back(family.size());
    rep.modulus.push_back(modulus);
    rep.depth_reached = d;
    if (family.size() > options.max_family) {
      overflow = true;
      break;
    }
  }
  rep.saturated = frontier.empty();

  if (all_isometric) {
    rep.verdict = "isometric-semigroup";
  } else if (rep.saturated) {
    rep.verdict = "equicontinuous-to-depth";  // finitely many continuous maps
  } else if (overflow) {
    rep.verdict = "undetermined";
  } else {
    const auto& last = rep.modulus.back();
    const auto& half = rep.modulus[(rep.modulus.size() - 1) / 2];
    bool degrading = false;
    for (std::size_t e = 0; e < last.size(); ++e) degrading = degrading || last[e] > half[e] + 1e-9;
    rep.verdict = degrading ? "not-equicontinuous-evidence" : "equicontinuous-to-depth";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Length functions
// ---------------------------------------------------------------------------

namespace {

struct CoreVector {
  std::vector<std::size_t> classes;  // indices into the scheme
  std::vector<long double> values;   // sup-normalised
  long double r = 0.0L;
  bool converged = false;
};

/// Classes with finite representatives whose forward orbit in the truncated
/// digraph never reaches a tail or limit class.
std::vector<std::size_t> finite_core(const SubstitutionSpec& spec, const TruncationScheme& scheme, Graph& g) {
  const std::size_t n = scheme.size();
  g = class_graph(spec, scheme, 1);
  std::vector<bool> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = !scheme.is_tail_class(i) && !scheme.representative(i).has_infinity();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i]) continue;
      for (auto j : g[i])
        if (!in[j]) {
          in[i] = false;
          changed = true;
          break;
        }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) out.push_back(i);
  return out;
}

CoreVector core_vector(const SubstitutionSpec& spec, const TruncationScheme& scheme) {
  CoreVector cv;
  Graph g;
  cv.classes = finite_core(spec, scheme, g);
  const std::size_t m = cv.classes.size();
  if (m == 0) return cv;
  std::vector<std::size_t> local(scheme.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < m; ++i) local[cv.classes[i]] = i;
  // row i: local indices of fold(ρ(rep)), with multiplicity
  std::vector<std::vector<std::size_t>> rows(m);
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : folded_image(spec, scheme, cv.classes[i])) rows[i].push_back(local[j]);

  std::vector<long double> v(m, 1.0L), w(m);
  // Long double: entries spread over hundreds of decades on the tripled example.
  for (std::size_t it = 0; it < 200000; ++it) {
    long double top = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      long double s = 0.0L;
      for (auto j : rows[i]) s += v[j];
      w[i] = s;
      top = std::max(top, s);
    }
    if (top == 0.0L) break;
    long double diff = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] /= top;
      diff = std::max(diff, std::fabs(w[i] - v[i]));
    }
    v.swap(w);
    cv.r = top;
    if (diff <= 1e-15L) {
      cv.converged = true;
      break;
    }
  }
  cv.values = std::move(v);
  return cv;
}

long double core_ratio(const CoreVector& cv) {
  long double lo = 0.0L, hi = 0.0L;
  bool first = true;
  for (auto x : cv.values) {
    if (first || x < lo) lo = x;
    if (first || x > hi) hi = x;
    first = false;
  }
  return lo > 0.0L ? hi / lo : std::numeric_limits<long double>::infinity();
}

double ratio_of(const Eigen::VectorXd& l) {
  const double lo = l.minCoeff(), hi = l.maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

LengthDiagnostics length_function_diagnostics(const SubstitutionSpec& spec, std::int64_t cutoff, std::int64_t cutoff2) {
  LengthDiagnostics d;
  d.cutoff = cutoff;
  d.cutoff2 = cutoff2;
  const auto s1 = TruncationScheme::build(spec.alphabet, cutoff);
  const auto s2 = TruncationScheme::build(spec.alphabet, cutoff2);
  const auto op1 = TruncatedOperator::build(spec, s1);
  const auto op2 = TruncatedOperator::build(spec, s2);
  const auto rep1 = power_iteration(op1);
  const auto rep2 = power_iteration(op2);
  d.r = rep1.r_estimate;
  d.r2nd = rep2.r_estimate;
  d.converged = rep1.converged && rep2.converged;
  const double m1 = rep1.length.lpNorm<Eigen::Infinity>();
  const double m2 = rep2.length.lpNorm<Eigen::Infinity>();
  d.min_length = m1 > 0 ? rep1.length.minCoeff() / m1 : 0.0;
  d.ratio = ratio_of(rep1.length);
  d.ratio2 = ratio_of(rep2.length);
  for (auto [i, j] : common_classes(s1, s2))
    d.length_change = std::max(d.length_change, std::abs(rep1.length[static_cast<Eigen::Index>(i)] / m1 -
                                                         rep2.length[static_cast<Eigen::Index>(j)] / m2));
  const double min2 = m2 > 0 ? rep2.length.minCoeff() / m2 : 0.0;
  const bool positive = d.min_length > 1e-9 && min2 > 1e-9;
  const bool bounded = std::isfinite(d.ratio) && std::abs(d.ratio2 - d.ratio) <= 1e-3 * d.ratio;
  if (d.converged && positive && bounded && d.length_change <= 1e-4) {
    d.verdict = "positive-length-found";
    d.note = "strictly positive eigenfunction, stable between cutoffs";
    return d;
  }

  const auto c1 = core_vector(spec, s1);
  d.core_size = c1.classes.size();
  if (c1.classes.empty()) {
    d.verdict = "undetermined";
    d.note = positive ? "eigenfunction not stable between cutoffs" : "eigenfunction vanishes somewhere; no finite core";
    return d;
  }
  const auto c2 = core_vector(spec, s2);
  d.core_r = static_cast<double>(c1.r);
  d.core_ratio = core_ratio(c1);
  d.core_ratio2 = core_ratio(c2);
  d.core_log10_ratio = static_cast<double>(std::log10(d.core_ratio));
  d.core_log10_ratio2 = static_cast<double>(std::log10(d.core_ratio2));

  // growth of the core vector along the last tail classes of the truncation
  auto value_at = [&](const Letter& a) -> std::optional<long double> {
    const auto idx = s1.index_of(a);
    auto it = std::find(c1.classes.begin(), c1.classes.end(), idx);
    if (it == c1.classes.end()) return std::nullopt;
    return c1.values[static_cast<std::size_t>(it - c1.classes.begin())];
  };
  for (std::int64_t m = cutoff - 4; m <= cutoff; ++m) {
    const bool pairs = spec.alphabet.family == AlphabetFamily::NatInf2;
    auto a = value_at(pairs ? Letter::pair(0, m) : Letter::nat(m));
    auto b = value_at(pairs ? Letter::pair(0, m - 1) : Letter::nat(m - 1));
    if (a && b && *b > 0.0L) d.tail_ratios.push_back(static_cast<double>(*a / *b));
  }

  // ratio growing with the cutoff: the core eigenvector is unbounded
  if (d.core_log10_ratio2 > d.core_log10_ratio + std::log10(1.5)) {
    d.verdict = "no-continuous-length-evidence";
    d.note = "core eigenvector max/min grows from 10^" + std::to_string(d.core_log10_ratio) + " to 10^" +
             std::to_string(d.core_log10_ratio2) + " when the cutoff doubles";
  } else {
    d.verdict = "undetermined";
    d.note = "core eigenvector bounded between cutoffs";
  }
  return d;
}

}  // namespace subkit
