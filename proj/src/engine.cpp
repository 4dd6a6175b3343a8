#include "subkit/engine.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace subkit {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

BudgetExceeded::BudgetExceeded(std::uint64_t estimated, std::uint64_t budget)
    : std::runtime_error("expansion needs " + std::to_string(estimated) + " letters, budget is " +
                         std::to_string(budget)),
      estimated_(estimated),
      budget_(budget) {}

Word apply(const SubstitutionSpec& spec, const Letter& a) { return spec.evaluate(a); }

Word apply_word(const SubstitutionSpec& spec, const Word& w) {
  Word out;
  for (const auto& a : w) {
    auto img = spec.evaluate(a);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

Word expand(const SubstitutionSpec& spec, const Letter& a, unsigned k, std::uint64_t budget) {
  LengthCounter lengths(spec);
  const auto n = lengths.count(a, k);
  if (n > budget) throw BudgetExceeded(n, budget);
  Word w{a};
  for (unsigned level = 0; level < k; ++level) w = apply_word(spec, w);
  return w;
}

void visit_expansion(const SubstitutionSpec& spec, const Letter& a, unsigned k,
                     const std::function<void(const Letter&)>& visit) {
  if (k == 0) {
    visit(a);
    return;
  }
  // explicit stack of (image, position) frames, one per level
  struct Frame {
    Word image;
    std::size_t pos = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({spec.evaluate(a), 0});
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.pos == top.image.size()) {
      stack.pop_back();
      continue;
    }
    const Letter b = top.image[top.pos++];
    if (stack.size() == k) {
      visit(b);
    } else {
      stack.push_back({spec.evaluate(b), 0});
    }
  }
}

// ---------------------------------------------------------------------------

LengthCounter::LengthCounter(const SubstitutionSpec& spec) : spec_(spec) {}

LengthCounter::LengthCounter(const SubstitutionSpec& spec, std::set<Letter> excluded)
    : spec_(spec), excluded_(std::move(excluded)) {}

std::uint64_t LengthCounter::count(const Letter& a, unsigned k) {
  if (k == 0) return excluded_ ? (excluded_->count(a) ? 0 : 1) : 1;
  Key key{a, k};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  auto img_it = images_.find(a);
  if (img_it == images_.end()) img_it = images_.emplace(a, spec_.evaluate(a)).first;
  const Word image = img_it->second;  // copy: recursion may rehash images_
  std::uint64_t total = 0;
  if (!excluded_ && k == 1) {
    total = image.size();
  } else {
    for (const auto& b : image) total = sat_add(total, count(b, k - 1));
  }
  memo_.emplace(key, total);
  return total;
}

// ---------------------------------------------------------------------------

ExactnessWindow exactness_window(const SubstitutionSpec& spec, unsigned k, std::int64_t extra_constant,
                                 std::int64_t circle_cutoff) {
  ExactnessWindow w;
  const auto& alphabet = spec.alphabet;
  switch (alphabet.family) {
    case AlphabetFamily::Finite:
      for (std::size_t i = 0; i < alphabet.symbols.size(); ++i) w.letters.push_back(Letter::symbol(static_cast<std::int64_t>(i)));
      break;
    case AlphabetFamily::Circle: {
      auto scheme = TruncationScheme::build(alphabet, circle_cutoff);
      w.letters = scheme.representatives();
      w.window = scheme.grid_q();
      break;
    }
    case AlphabetFamily::NatInf:
    case AlphabetFamily::NatInf2: {
      const std::int64_t bound = std::max(spec.guard_bound(), extra_constant);
      w.window = bound + static_cast<std::int64_t>(k) * spec.max_offset() + spec.guard_period();
      std::vector<ExtNat> values;
      for (std::int64_t v = 0; v <= w.window; ++v) values.push_back(v);
      values.push_back(kInfinity);
      if (alphabet.family == AlphabetFamily::NatInf) {
        for (auto v : values) w.letters.push_back(Letter::nat(v));
      } else {
        for (auto x : values)
          for (auto y : values) w.letters.push_back(Letter::pair(x, y));
      }
      break;
    }
  }
  return w;
}

LengthStats supertile_length_stats(const SubstitutionSpec& spec, unsigned k) {
  LengthStats s;
  s.k = k;
  if (spec.alphabet.family == AlphabetFamily::Circle) {
    // a single rule: every letter has the same supertile length
    std::uint64_t len = 1;
    for (unsigned i = 0; i < k; ++i) len *= spec.rules.at(0).rhs.size();
    s.min = s.max = len;
    s.argmin = s.argmax = Letter::orbit(0);
    s.exact = true;
    s.letters_scanned = 1;
    return s;
  }
  auto window = exactness_window(spec, k);
  LengthCounter counter(spec);
  bool first = true;
  for (const auto& a : window.letters) {
    auto len = counter.count(a, k);
    if (first || len < s.min) {
      s.min = len;
      s.argmin = a;
    }
    if (first || len > s.max) {
      s.max = len;
      s.argmax = a;
    }
    first = false;
  }
  s.exact = window.exact;
  s.window = window.window;
  s.letters_scanned = window.letters.size();
  return s;
}

std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::Growing: return "growing";
    case GrowthVerdict::EventuallyConstant: return "eventually-constant";
    case GrowthVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

GrowthReport growth_probe(const SubstitutionSpec& spec, const Letter& a, unsigned k_max) {
  GrowthReport r;
  LengthCounter counter(spec);
  for (unsigned k = 0; k <= k_max; ++k) r.lengths.push_back(counter.count(a, k));
  const auto n = r.lengths.size();
  if (n >= 3) {
    const auto x = r.lengths[n - 3], y = r.lengths[n - 2], z = r.lengths[n - 1];
    if (x == y && y == z) {
      r.verdict = GrowthVerdict::EventuallyConstant;
    } else if (x < y && y < z && x >= 2) {
      r.verdict = GrowthVerdict::Growing;
    }
  }
  return r;
}

bool letter_grows(const SubstitutionSpec& spec, const Letter& a) {
  if (spec.alphabet.family != AlphabetFamily::Finite) throw std::invalid_argument("letter_grows needs a finite alphabet");
  const std::size_t n = spec.alphabet.symbols.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> image_len(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto img = spec.evaluate(Letter::symbol(static_cast<std::int64_t>(i)));
    image_len[i] = img.size();
    for (const auto& b : img) succ[i].push_back(static_cast<std::size_t>(b.first()));
  }
  auto reach = [&](std::size_t from) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo{from};
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      for (auto w : succ[v])
        if (!seen[w]) {
          seen[w] = true;
          todo.push_back(w);
        }
    }
    return seen;  // vertices reachable in at least one step
  };
  const auto from_a = reach(static_cast<std::size_t>(a.first()));
  for (std::size_t v = 0; v < n; ++v) {
    bool reachable = v == static_cast<std::size_t>(a.first()) || from_a[v];
    if (!reachable || image_len[v] < 2) continue;
    if (reach(v)[v]) return true;  // v lies on a cycle and its image has ≥ 2 letters
  }
  return false;
}

std::optional<std::vector<Column>> columns(const SubstitutionSpec& spec) {
  if (!spec.is_constant_length()) return std::nullopt;
  std::vector<Column> out;
  const std::size_t L = spec.rules.at(0).rhs.size();
  for (std::size_t i = 0; i < L; ++i) {
    SubstitutionSpec single = spec;
    for (auto& r : single.rules) r.rhs = {r.rhs[i]};
    std::istringstream text(pretty_print(single));
    std::string line, desc;
    std::getline(text, line);  // alphabet line
    while (std::getline(text, line)) {
      if (line.rfind("rule ", 0) == 0) line = line.substr(5);
      if (!desc.empty()) desc += ", ";
      desc += line;
    }
    out.push_back({i, desc});
  }
  return out;
}

Letter apply_column(const SubstitutionSpec& spec, std::size_t position, const Letter& a) {
  return spec.evaluate(a).at(position);
}

std::vector<std::size_t> folded_image(const SubstitutionSpec& spec, const TruncationScheme& scheme, std::size_t i) {
  std::vector<std::size_t> out;
  for (const auto& b : spec.evaluate(scheme.representative(i))) out.push_back(scheme.index_of(b));
  return out;
}

// ---------------------------------------------------------------------------

SupertileCache::SupertileCache(const SubstitutionSpec& spec, std::size_t byte_budget)
    : spec_(spec), budget_(byte_budget) {}

namespace {
std::size_t word_bytes(const Word& w) { return w.size() * sizeof(Letter) + 64; }
}  // namespace

std::shared_ptr<const Word> SupertileCache::get(const Letter& a, unsigned k) {
  const Key key{a, k};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.lru);
      ++hits_;
      return it->second.word;
    }
    ++misses_;
  }
  // build from the next lower level, which is usually cached
  std::shared_ptr<const Word> word;
  if (k == 0) {
    word = std::make_shared<const Word>(Word{a});
  } else {
    auto lower = get(a, k - 1);
    word = std::make_shared<const Word>(apply_word(spec_, *lower));
  }
  std::lock_guard lock(mutex_);
  if (!entries_.count(key)) insert_locked(key, word);
  return word;
}

void SupertileCache::insert_locked(const Key& key, std::shared_ptr<const Word> word) {
  const auto size = word_bytes(*word);
  if (size > budget_) return;
  while (bytes_ + size > budget_ && !lru_.empty()) {
    auto victim = lru_.back();
    lru_.pop_back();
    auto it = entries_.find(victim);
    bytes_ -= word_bytes(*it->second.word);
    entries_.erase(it);
  }
  lru_.push_front(key);
  entries_.emplace(key, Entry{std::move(word), lru_.begin()});
  bytes_ += size;
}

std::size_t SupertileCache::bytes() const {
  std::lock_guard lock(mutex_);
  return bytes_;
}
std::size_t SupertileCache::entries() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}
std::size_t SupertileCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}
std::size_t SupertileCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

}  // namespace subkit
