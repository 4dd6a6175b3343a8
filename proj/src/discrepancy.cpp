#include "subkit/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subkit/engine.hpp"

namespace subkit {

double expected(const SpectralReport& report, const Eigen::VectorXd& f, std::size_t a, unsigned n) {
  if (report.length.size() == 0) throw std::invalid_argument("spectral data unavailable");
  return std::pow(report.r_estimate, n) * report.length[static_cast<Eigen::Index>(a)] * report.measure.dot(f);
}

ActualValue actual(const SubstitutionSpec& spec, const TruncatedOperator& op, const Eigen::VectorXd& f, std::size_t a,
                   unsigned n, std::uint64_t budget) {
  ActualValue v;
  Eigen::VectorXd g = f;
  for (unsigned k = 0; k < n; ++k) g = op.apply(g);
  v.matrix = g[static_cast<Eigen::Index>(a)];

  const auto& scheme = op.scheme();
  const Letter start = scheme.representative(a);
  LengthCounter lengths(spec);
  if (lengths.count(start, n) > budget) {
    v.budget_exceeded = true;
    return v;
  }
  Word w{start};
  for (unsigned level = 0; level < n; ++level) {
    for (const auto& b : w)
      if (scheme.fold(b) != b) return v;  // folding happens inside the supertile
    w = apply_word(spec, w);
  }
  double sum = 0.0;
  for (const auto& b : w) sum += f[static_cast<Eigen::Index>(scheme.index_of(b))];
  v.direct = sum;
  v.agree = std::abs(sum - v.matrix) <= 1e-9 * std::max(1.0, std::abs(sum));
  return v;
}

std::vector<TestFunction> indicator_panel(const TruncatedOperator& op) {
  const auto n = op.size();
  const auto& scheme = op.scheme();
  std::vector<std::size_t> picks;
  if (n <= 64) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
  } else {
    for (std::size_t i = 0; i < 63; ++i) picks.push_back(i * (n - 1) / 62);
    if (auto lc = scheme.limit_class()) picks.push_back(*lc);
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  }
  std::vector<TestFunction> panel;
  for (auto i : picks) {
    TestFunction f{"1[" + format_letter(scheme.alphabet(), scheme.representative(i)) + "]",
                   Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), false};
    f.values[static_cast<Eigen::Index>(i)] = 1.0;
    panel.push_back(std::move(f));
  }
  return panel;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

DiscrepancyReport decay_fit(const SubstitutionSpec& spec, const SpectrumAnalysis& analysis,
                            const std::vector<TestFunction>& panel, const DiscrepancyOptions& options) {
  DiscrepancyReport rep;
  const auto& op = analysis.op;
  const auto& sr = analysis.report;
  const auto size = op.size();
  rep.r = sr.r_estimate;
  rep.r2 = analysis.r2.value;
  rep.log_r2 = rep.r2 > 0 ? std::log(rep.r2) : -std::numeric_limits<double>::infinity();
  rep.eps_tol = options.eps_tol;
  rep.spectral_converged = sr.converged;
  rep.spectral_stable = analysis.stability && analysis.stability->stable;
  rep.r2_three_digits = analysis.stability && analysis.stability->r2_three_digits;
  rep.sup_gap.assign(options.n_max + 1, 0.0);

  const double ell_max = sr.length.lpNorm<Eigen::Infinity>();
  const unsigned check_to = options.cross_check ? std::min(options.n_max, 6u) : 0;
  std::vector<std::vector<Eigen::VectorXd>> low;  // Mⁿf for n ≤ check_to
  for (std::size_t w = 0; w < panel.size(); ++w) {
    const auto& f = panel[w].values;
    rep.weights.push_back(panel[w].name);
    std::vector<double> gaps(options.n_max + 1, 0.0);
    const double mean = sr.measure.dot(f);
    low.emplace_back();
    Eigen::VectorXd g = f;  // Mⁿf
    for (unsigned n = 0; n <= options.n_max; ++n) {
      if (n <= check_to) low.back().push_back(g);
      const double rn = std::pow(rep.r, n);
      for (std::size_t a = 0; a < size; ++a) {
        const auto A = static_cast<Eigen::Index>(a);
        const double e = rn * sr.length[A] * mean;
        const double act = g[A];
        const double gap = std::abs(e - act);
        gaps[n] = std::max(gaps[n], gap);
        if (options.keep_table) rep.table.push_back({w, a, n, e, act, gap});
      }
      if (n < options.n_max) g = op.apply(g);
    }
    for (unsigned n = 0; n <= options.n_max; ++n) rep.sup_gap[n] = std::max(rep.sup_gap[n], gaps[n]);
    rep.weight_gaps.push_back(std::move(gaps));
  }

  if (check_to > 0) {
    // direct supertiles, expanded once per letter and shared by the panel
    const auto& scheme = op.scheme();
    for (std::size_t a = 0; a < size; ++a) {
      Word word{scheme.representative(a)};
      for (unsigned n = 1; n <= check_to; ++n) {
        bool own = std::all_of(word.begin(), word.end(), [&](const Letter& b) { return scheme.fold(b) == b; });
        if (!own) break;
        word = apply_word(spec, word);
        if (word.size() > 200'000) break;
        std::vector<std::size_t> counts;
        counts.reserve(word.size());
        for (const auto& b : word) counts.push_back(scheme.index_of(b));
        for (std::size_t w = 0; w < panel.size(); ++w) {
          double sum = 0.0;
          for (auto c : counts) sum += panel[w].values[static_cast<Eigen::Index>(c)];
          const double m = low[w][n][static_cast<Eigen::Index>(a)];
          ++rep.cross_checked;
          if (std::abs(sum - m) > 1e-9 * std::max(1.0, std::abs(sum))) ++rep.cross_check_failures;
        }
      }
    }
  }

  rep.exact_zero = true;
  for (unsigned n = 0; n <= options.n_max; ++n)
    if (rep.sup_gap[n] > 1e-8 * std::pow(rep.r, n) * ell_max) rep.exact_zero = false;

  rep.fit_to = options.n_max;
  rep.fit_from = options.n_max - (options.n_max + 1) / 2;
  std::vector<double> xs, ys;
  bool zero_in_window = false;
  for (unsigned n = rep.fit_from; n <= rep.fit_to; ++n) {
    if (rep.sup_gap[n] <= 0.0) {
      zero_in_window = true;
      break;
    }
    xs.push_back(n);
    ys.push_back(std::log(rep.sup_gap[n]));
  }
  const double rate = rep.r2 * (1.0 + options.eps_tol);
  if (!rep.exact_zero && !zero_in_window && xs.size() >= 2) {
    rep.fitted_slope = least_squares_slope(xs, ys);
    rep.pass = rate > 0 && *rep.fitted_slope <= std::log(rate);
  } else {
    rep.pass = rep.exact_zero || zero_in_window;
  }
  for (unsigned n = rep.fit_from; n <= rep.fit_to && rate > 0; ++n)
    rep.fit_constant = std::max(rep.fit_constant, rep.sup_gap[n] / std::pow(rate, n));
  for (unsigned n = 0; n <= options.n_max; ++n) rep.bound.push_back(rep.fit_constant * std::pow(rate, n));
  return rep;
}

}  // namespace subkit
