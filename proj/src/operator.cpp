#include "subkit/operator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "subkit/engine.hpp"

namespace subkit {

TruncatedOperator TruncatedOperator::build(const SubstitutionSpec& spec, const TruncationScheme& scheme) {
  TruncatedOperator op;
  op.scheme_ = scheme;
  const auto n = scheme.size();
  std::vector<Eigen::Triplet<double>> triplets;
  op.lengths_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto img = folded_image(spec, scheme, j);
    op.lengths_[j] = img.size();
    for (auto i : img) triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), 1.0);
  }
  op.m_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  op.m_.setFromTriplets(triplets.begin(), triplets.end());  // duplicates are summed
  op.m_.makeCompressed();
  op.mt_ = op.m_.transpose();
  op.mt_.makeCompressed();
  return op;
}

Eigen::MatrixXd TruncatedOperator::counts() const { return Eigen::MatrixXd(m_.transpose()); }

std::vector<RadiusBound> spectral_radius_bounds(const SubstitutionSpec& spec, unsigned n_max) {
  std::vector<RadiusBound> out;
  double best_lower = 0.0, best_upper = std::numeric_limits<double>::infinity();
  for (unsigned n = 1; n <= n_max; ++n) {
    auto stats = supertile_length_stats(spec, n);
    RadiusBound b;
    b.n = n;
    b.min_length = stats.min;
    b.max_length = stats.max;
    b.lower = std::pow(static_cast<double>(stats.min), 1.0 / n);
    b.upper = std::pow(static_cast<double>(stats.max), 1.0 / n);
    best_lower = std::max(best_lower, b.lower);
    best_upper = std::min(best_upper, b.upper);
    b.best_lower = best_lower;
    b.best_upper = best_upper;
    b.exact = stats.exact;
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Power iteration
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd start_vector(std::size_t n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double x = static_cast<double>(i) * 0.6180339887498949;
    v[static_cast<Eigen::Index>(i)] = 1.0 + 0.25 * (x - std::floor(x));
  }
  return v;
}

/// One side of the simultaneous iteration.
struct Side {
  Eigen::VectorXd v;
  double growth = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  bool done = false;
  std::size_t period = 0;
  std::deque<Eigen::VectorXd> history;
};

constexpr std::size_t kMaxPeriod = 8;

/// Period p ≤ 8 with ‖v_k − v_{k−p}‖ ≪ ‖v_k − v_{k−1}‖, or 0.
std::size_t detect_period(const std::deque<Eigen::VectorXd>& h, double norm_scale) {
  if (h.size() < kMaxPeriod + 1) return 0;
  const auto& cur = h.back();
  const double d1 = (cur - h[h.size() - 2]).lpNorm<Eigen::Infinity>() / norm_scale;
  if (d1 < 1e-8) return 0;
  for (std::size_t p = 2; p <= kMaxPeriod; ++p) {
    const double dp = (cur - h[h.size() - 1 - p]).lpNorm<Eigen::Infinity>() / norm_scale;
    if (dp < 1e-3 * d1) return p;
  }
  return 0;
}

}  // namespace

SpectralReport power_iteration(const TruncatedOperator& op, const PowerIterationOptions& options) {
  SpectralReport rep;
  const auto n = op.size();
  const auto N = static_cast<Eigen::Index>(n);
  if (n == 0) return rep;

  Side right, left;
  right.v = start_vector(n);
  right.v /= right.v.lpNorm<Eigen::Infinity>();
  left.v = start_vector(n);
  left.v /= left.v.sum();

  // the period test runs every 32 steps on the 9 iterates just before it
  auto checks = [](std::size_t it) { return it >= 32 && it % 32 == 0; };
  auto records = [](std::size_t it) { return it >= 24 && (it % 32 >= 24 || it % 32 == 0); };
  std::size_t it = 0;
  for (; it < options.max_iter && !(right.done && left.done); ++it) {
    if (!right.done) {
      Eigen::VectorXd w = op.apply(right.v);
      const double g = w.lpNorm<Eigen::Infinity>();
      if (g == 0.0) {  // nilpotent
        right.growth = 0.0;
        right.residual = 0.0;
        right.done = true;
      } else {
        w /= g;
        // decaying components would otherwise end up as slow subnormals
        if (it % 32 == 0) w = (w.array().abs() < 1e-200).select(0.0, w);
        right.growth = g;
        right.residual = g * (w - right.v).lpNorm<Eigen::Infinity>();
        right.v = std::move(w);
        if (records(it)) right.history.push_back(right.v);
        if (right.residual < options.tol) {
          right.done = true;
        } else if (checks(it)) {
          right.period = detect_period(right.history, 1.0);
          if (right.period) right.done = true;
          right.history.clear();
        }
      }
    }
    if (!left.done) {
      Eigen::VectorXd w = op.apply_adjoint(left.v);
      const double g = w.sum();
      if (g == 0.0) {
        left.growth = 0.0;
        left.residual = 0.0;
        left.done = true;
      } else {
        w /= g;
        if (it % 32 == 0) w = (w.array().abs() < 1e-200).select(0.0, w);
        left.growth = g;
        left.residual = g * (w - left.v).lpNorm<1>();
        left.v = std::move(w);
        if (records(it)) left.history.push_back(left.v);
        if (left.residual < options.tol) {
          left.done = true;
        } else if (checks(it)) {
          left.period = detect_period(left.history, 1.0 / static_cast<double>(n));
          if (left.period) left.done = true;
          left.history.clear();
        }
      }
    }
  }
  rep.iterations = it;

  // Periodic peripheral spectrum: average over one period (Cesàro mean).
  auto period_average = [&](Side& s, bool adjoint) {
    const std::size_t p = s.period;
    Eigen::VectorXd x = s.v;
    double log_growth = 0.0;
    std::vector<Eigen::VectorXd> orbit{x};
    for (std::size_t i = 1; i <= p; ++i) {
      x = adjoint ? op.apply_adjoint(x) : op.apply(x);
      orbit.push_back(x);
    }
    const double ratio = adjoint ? orbit[p].sum() / orbit[0].sum()
                                 : orbit[p].lpNorm<Eigen::Infinity>() / orbit[0].lpNorm<Eigen::Infinity>();
    log_growth = std::log(ratio) / static_cast<double>(p);
    const double r = std::exp(log_growth);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(N);
    for (std::size_t i = 0; i < p; ++i) acc += orbit[i] / std::pow(r, static_cast<double>(i));
    s.v = acc;
    s.growth = r;
  };
  if (right.period) period_average(right, false);
  if (left.period) period_average(left, true);
  rep.oscillation_period = std::max(right.period, left.period);
  rep.mean_ergodic_only = rep.oscillation_period > 0;

  Eigen::VectorXd ell = right.v;
  Eigen::VectorXd mu = left.v;

  // Exact eigenvectors when all row sums (or column sums) of M coincide.
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(N);
  const Eigen::VectorXd row_sums = op.apply(ones);
  const Eigen::VectorXd col_sums = op.apply_adjoint(ones);
  double r = right.growth;
  if ((row_sums.array() == row_sums[0]).all() && row_sums[0] > 0) {
    ell = ones;
    r = row_sums[0];
    rep.exact_length = true;
  }
  if ((col_sums.array() == col_sums[0]).all() && col_sums[0] > 0) {
    mu = ones;
    if (!rep.exact_length) r = col_sums[0];
    rep.exact_measure = true;
  }

  // normalisation of ℓ
  const auto limit = op.scheme().limit_class();
  const double ell_max = ell.lpNorm<Eigen::Infinity>();
  if (limit && ell_max > 0 && ell[static_cast<Eigen::Index>(*limit)] > 1e-12 * ell_max) {
    ell /= ell[static_cast<Eigen::Index>(*limit)];
    rep.normalization = "limit-class";
  } else if (ell_max > 0) {
    ell /= ell_max;
    rep.normalization = "sup";
  }
  if (mu.sum() > 0) mu /= mu.sum();
  rep.frequencies = mu;
  const double pairing = mu.dot(ell);
  if (pairing > 1e-14 * ell.lpNorm<Eigen::Infinity>()) {
    mu /= pairing;
  } else {
    rep.measure_normalized_by_length = false;
  }

  // two-sided Rayleigh quotient refines r unless it is known exactly
  if (!rep.exact_length && !rep.exact_measure && rep.measure_normalized_by_length) {
    const double q = mu.dot(op.apply(ell)) / mu.dot(ell);
    if (std::isfinite(q) && q > 0) r = q;
  }
  rep.r_estimate = r;
  rep.length = ell;
  rep.measure = mu;
  const double ln = ell.lpNorm<Eigen::Infinity>();
  const double mn = mu.lpNorm<1>();
  rep.right_residual = ln > 0 ? (op.apply(ell) - r * ell).lpNorm<Eigen::Infinity>() / ln : 0.0;
  rep.left_residual = mn > 0 ? (op.apply_adjoint(mu) - r * mu).lpNorm<1>() / mn : 0.0;
  rep.converged = rep.right_residual < options.tol && rep.left_residual < options.tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Second eigenvalue
// ---------------------------------------------------------------------------

std::vector<std::complex<double>> dense_eigenvalues(const TruncatedOperator& op) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(op.dense(), false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

SecondEigenvalue second_eigenvalue(const TruncatedOperator& op, const SpectralReport& report) {
  SecondEigenvalue s;
  s.truncation_dependent = op.scheme().alphabet().family == AlphabetFamily::Circle;
  const auto n = op.size();
  const double r = report.r_estimate;
  if (n <= 1) {
    s.method = "none";
    return s;
  }
  if (n <= 600) {
    auto ev = dense_eigenvalues(op);
    std::size_t closest = 0;
    for (std::size_t i = 1; i < ev.size(); ++i)
      if (std::abs(ev[i] - r) < std::abs(ev[closest] - r)) closest = i;
    double best = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i)
      if (i != closest) best = std::max(best, std::abs(ev[i]));
    s.value = s.lower = s.upper = best;
    s.method = "dense-eigensolver";
    return s;
  }
  // deflated power iteration on M − r ℓ μᵀ
  const Eigen::VectorXd& ell = report.length;
  const Eigen::VectorXd& mu = report.measure;
  Eigen::VectorXd w = start_vector(n);
  for (Eigen::Index i = 0; i < w.size(); i += 2) w[i] = -w[i];  // break positivity
  w -= ell * mu.dot(w);
  w /= w.norm();
  std::vector<double> growth;
  for (int it = 0; it < 3000; ++it) {
    Eigen::VectorXd x = op.apply(w) - r * ell * mu.dot(w);
    x -= ell * mu.dot(x);  // re-project against round-off
    const double g = x.norm();
    if (g == 0.0) {
      growth.push_back(0.0);
      break;
    }
    growth.push_back(g);
    w = x / g;
  }
  std::vector<double> est;
  for (std::size_t k = 0; k + 1 < growth.size(); ++k) est.push_back(std::sqrt(growth[k] * growth[k + 1]));
  if (est.empty()) est.push_back(0.0);
  const std::size_t tail = std::min<std::size_t>(est.size(), 200);
  auto lo = std::min_element(est.end() - static_cast<std::ptrdiff_t>(tail), est.end());
  auto hi = std::max_element(est.end() - static_cast<std::ptrdiff_t>(tail), est.end());
  s.lower = *lo;
  s.upper = *hi;
  s.value = est.back();
  s.method = "deflated-power";
  return s;
}

// ---------------------------------------------------------------------------
// Convergence diagnostics
// ---------------------------------------------------------------------------

std::vector<TestFunction> default_panel(const TruncatedOperator& op, const SpectralReport& report) {
  std::vector<TestFunction> panel;
  const auto n = op.size();
  const auto N = static_cast<Eigen::Index>(n);
  const auto& scheme = op.scheme();
  const auto& alphabet = scheme.alphabet();
  if (alphabet.family == AlphabetFamily::Circle) {
    const double q = static_cast<double>(scheme.grid_q());
    for (int k = 1; k <= 3; ++k) {
      TestFunction c{"cos" + std::to_string(k), Eigen::VectorXd(N), true};
      TestFunction s{"sin" + std::to_string(k), Eigen::VectorXd(N), true};
      for (Eigen::Index j = 0; j < N; ++j) {
        const double x = 2.0 * std::numbers::pi * k * static_cast<double>(j) / q;
        c.values[j] = std::cos(x);
        s.values[j] = std::sin(x);
      }
      panel.push_back(std::move(c));
      panel.push_back(std::move(s));
    }
    TestFunction bump{"bump", Eigen::VectorXd(N), true};
    for (Eigen::Index j = 0; j < N; ++j)
      bump.values[j] = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / q));
    panel.push_back(std::move(bump));
  } else {
    // indicators: all classes when few, else a spread sample plus the limit class
    std::vector<std::size_t> picks;
    if (n <= 16) {
      for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
    } else {
      for (std::size_t i = 0; i < 8; ++i) picks.push_back(i * (n - 1) / 8);
      if (auto lc = scheme.limit_class()) picks.push_back(*lc);
      std::sort(picks.begin(), picks.end());
      picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    }
    for (auto i : picks) {
      TestFunction f{"1[" + format_letter(alphabet, scheme.representative(i)) + "]", Eigen::VectorXd::Zero(N), false};
      f.values[static_cast<Eigen::Index>(i)] = 1.0;
      panel.push_back(std::move(f));
    }
  }
  panel.push_back({"one", Eigen::VectorXd::Ones(N), false});
  if (report.length.size() == N) {
    const double m = report.length.lpNorm<Eigen::Infinity>();
    panel.push_back({"length", m > 0 ? Eigen::VectorXd(report.length / m) : report.length, false});
  }
  return panel;
}

TestFunction circle_spike(const TruncatedOperator& op, std::size_t n) {
  const auto& s = op.scheme();
  if (s.alphabet().family != AlphabetFamily::Circle) throw std::invalid_argument("spike functions live on circle grids");
  TestFunction f{"spike" + std::to_string(n), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size())), false};
  for (std::size_t j = 0; j <= n; ++j) {
    const auto idx = (static_cast<std::int64_t>(j) * s.grid_p()) % s.grid_q();
    f.values[static_cast<Eigen::Index>(idx)] = 1.0;
  }
  return f;
}

bool sequence_converging(const std::vector<double>& gaps, double tol) {
  if (gaps.empty()) return false;
  if (gaps.back() < tol) return true;
  const std::size_t n = gaps.size();
  if (n < 8) return false;
  const std::size_t q = n / 4;
  const double second = *std::max_element(gaps.begin() + static_cast<std::ptrdiff_t>(q),
                                          gaps.begin() + static_cast<std::ptrdiff_t>(2 * q));
  const double last = *std::max_element(gaps.end() - static_cast<std::ptrdiff_t>(q), gaps.end());
  return last < 0.5 * second;
}

ConvergenceDiagnostics convergence_diagnostics(const TruncatedOperator& op, const SpectralReport& report,
                                               const std::vector<TestFunction>& panel, std::size_t n_max,
                                               double tol) {
  ConvergenceDiagnostics d;
  const auto n = op.size();
  const auto N = static_cast<Eigen::Index>(n);
  const double r = report.r_estimate;
  const Eigen::VectorXd& ell = report.length;
  const Eigen::VectorXd& mu = report.measure;
  if (r <= 0.0) {
    d.verdict = "none";
    return d;
  }

  for (const auto& f : panel) {
    d.names.push_back(f.name);
    const double mean = mu.dot(f.values);
    Eigen::VectorXd g = f.values;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(N);
    std::vector<double> strong, cesaro{0.0};
    for (std::size_t k = 0; k <= n_max; ++k) {
      strong.push_back((g - mean * ell).lpNorm<Eigen::Infinity>());
      if (k < n_max) {
        sum += g;
        cesaro.push_back((sum / static_cast<double>(k + 1) - mean * ell).lpNorm<Eigen::Infinity>());
        g = op.apply(g) / r;
      }
    }
    cesaro[0] = cesaro.size() > 1 ? cesaro[1] : 0.0;
    d.strong_gaps.push_back(std::move(strong));
    d.strong_cesaro_gaps.push_back(std::move(cesaro));
  }

  // Rows of Tⁿ are columns of (Tᵀ)ⁿ; iterate a block of unit vectors.
  std::vector<std::size_t> rows;
  if (op.dense_recommended()) {
    for (std::size_t i = 0; i < n; ++i) rows.push_back(i);
  } else {
    d.uniform_exact = false;
    const std::size_t want = 256;
    for (std::size_t i = 0; i < want; ++i) rows.push_back(i * (n - 1) / (want - 1));
    if (auto lc = op.scheme().limit_class()) rows.push_back(*lc);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }
  d.rows_used = rows.size();
  const auto R = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(N, R);
  for (Eigen::Index c = 0; c < R; ++c) Y(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(c)]), c) = 1.0;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, R);
  // P restricted to the chosen rows: column c is ℓ_i μ
  auto gap = [&](const Eigen::MatrixXd& X) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < R; ++c) {
      const double li = ell[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(c)])];
      worst = std::max(worst, (X.col(c) - li * mu).lpNorm<1>());
    }
    return worst;
  };
  const Eigen::SparseMatrix<double> Mt = op.M().transpose();
  for (std::size_t k = 0; k <= n_max; ++k) {
    d.uniform_gaps.push_back(gap(Y));
    if (k < n_max) {
      S += Y;
      d.cesaro_gaps.push_back(gap(S / static_cast<double>(k + 1)));
      Y = (Mt * Y) / r;
    }
  }
  d.cesaro_gaps.insert(d.cesaro_gaps.begin(), d.cesaro_gaps.empty() ? 0.0 : d.cesaro_gaps.front());

  d.uniform = sequence_converging(d.uniform_gaps, tol);
  d.strong = std::all_of(d.strong_gaps.begin(), d.strong_gaps.end(),
                         [&](const std::vector<double>& g) { return sequence_converging(g, tol); });
  d.mean_ergodic = sequence_converging(d.cesaro_gaps, tol);
  d.verdict = d.uniform ? "uniform" : d.strong ? "strong" : d.mean_ergodic ? "mean-ergodic" : "none";
  return d;
}

std::vector<SpikeWitness> circle_spike_witness(const TruncatedOperator& op, const SpectralReport& report,
                                               std::size_t n_max) {
  std::vector<SpikeWitness> out;
  const double r = report.r_estimate;
  for (std::size_t n = 0; n <= n_max; ++n) {
    auto f = circle_spike(op, n);
    Eigen::VectorXd g = f.values;
    for (std::size_t k = 0; k < n; ++k) g = op.apply(g) / r;
    SpikeWitness w;
    w.n = n;
    w.value_at_zero = g[0];
    w.mean = report.measure.dot(f.values);
    w.lower_bound = std::abs(w.value_at_zero - w.mean * report.length[0]);
    out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analysis at two cutoffs
// ---------------------------------------------------------------------------

bool same_three_digits(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m == 0.0) return true;
  const double unit = std::pow(10.0, std::floor(std::log10(m)) - 2.0);
  return std::abs(a - b) <= 0.5 * unit;
}

std::vector<std::pair<std::size_t, std::size_t>> common_classes(const TruncationScheme& coarse,
                                                                 const TruncationScheme& fine) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& a = coarse.alphabet();
  if (a.family == AlphabetFamily::Circle && coarse.grid_q() != fine.grid_q()) return out;
  const std::int64_t half = coarse.cutoff() / 2;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto& rep = coarse.representative(i);
    bool inside = true;
    if (a.family == AlphabetFamily::NatInf) inside = is_infinite(rep.first()) || rep.first() <= half;
    if (a.family == AlphabetFamily::NatInf2)
      inside = (is_infinite(rep.first()) || rep.first() <= half) && (is_infinite(rep.second()) || rep.second() <= half);
    if (inside) out.emplace_back(i, fine.index_of(rep));
  }
  return out;
}

SpectrumAnalysis analyze_spectrum(const SubstitutionSpec& spec, const SpectrumOptions& options) {
  SpectrumAnalysis a;
  auto scheme = TruncationScheme::build(spec.alphabet, options.cutoff);
  a.op = TruncatedOperator::build(spec, scheme);
  a.report = power_iteration(a.op, options.power);
  a.bounds = spectral_radius_bounds(spec, options.bounds_n_max);
  if (!a.bounds.empty()) {
    a.report.r_lower = a.bounds.back().best_lower;
    a.report.r_upper = a.bounds.back().best_upper;
  }
  a.r2 = second_eigenvalue(a.op, a.report);
  if (options.cutoff2 > 0) {
    auto scheme2 = TruncationScheme::build(spec.alphabet, options.cutoff2);
    a.op2 = TruncatedOperator::build(spec, scheme2);
    a.report2 = power_iteration(*a.op2, options.power);
    a.report2->r_lower = a.report.r_lower;
    a.report2->r_upper = a.report.r_upper;
    a.r2_second = second_eigenvalue(*a.op2, *a.report2);
    CutoffStability st;
    st.r_change = std::abs(a.report.r_estimate - a.report2->r_estimate) / std::max(a.report.r_estimate, 1e-300);
    const double lmax = a.report.length.lpNorm<Eigen::Infinity>();
    for (auto [i, j] : common_classes(scheme, scheme2)) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      st.length_change = std::max(st.length_change, std::abs(a.report.length[I] - a.report2->length[J]) / lmax);
      st.measure_change += std::abs(a.report.frequencies[I] - a.report2->frequencies[J]);
    }
    st.r2_change = std::abs(a.r2.value - a.r2_second->value) / std::max(a.r2.value, 1e-300);
    st.r2_three_digits = same_three_digits(a.r2.value, a.r2_second->value);
    st.stable = st.r_change <= options.stability_tol && st.length_change <= options.stability_tol &&
                st.measure_change <= options.stability_tol;
    a.stability = st;
  }
  return a;
}

}  // namespace subkit
