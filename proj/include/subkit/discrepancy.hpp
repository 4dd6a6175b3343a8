#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subkit/dsl.hpp"
#include "subkit/operator.hpp"

namespace subkit {

/// Exp(f, a, n) = rⁿ ℓ(a) μ(f) from truncated spectral data.
double expected(const SpectralReport& report, const Eigen::VectorXd& f, std::size_t a, unsigned n);

struct ActualValue {
  double matrix = 0.0;          // (Mⁿf)(a)
  std::optional<double> direct;  // Σ f(b) over b ◁ ρⁿ(a), when cross-checkable
  bool budget_exceeded = false;
  bool agree = true;
};

/// Act(f, a, n). The direct sum is computed when every letter of the
/// supertiles below level n is its own representative and ρⁿ(a) fits the
/// budget; then it must equal the matrix value.
ActualValue actual(const SubstitutionSpec& spec, const TruncatedOperator& op, const Eigen::VectorXd& f, std::size_t a,
                   unsigned n, std::uint64_t budget = 2'000'000);

/// Indicators of fold classes (every class up to 64, else an even spread
/// including the limit class).
std::vector<TestFunction> indicator_panel(const TruncatedOperator& op);

struct DiscrepancyEntry {
  std::size_t weight = 0;
  std::size_t letter = 0;  // class index
  unsigned n = 0;
  double exp = 0.0;
  double act = 0.0;
  double gap = 0.0;
};

struct DiscrepancyOptions {
  unsigned n_max = 12;
  double eps_tol = 0.1;
  bool keep_table = true;
  bool cross_check = true;
};

struct DiscrepancyReport {
  std::vector<std::string> weights;
  std::vector<DiscrepancyEntry> table;
  std::vector<double> sup_gap;                   // n = 0..nMax
  std::vector<std::vector<double>> weight_gaps;  // [weight][n]
  unsigned fit_from = 0;
  unsigned fit_to = 0;
  std::optional<double> fitted_slope;  // absent when the gaps vanish
  double fit_constant = 0.0;           // C in supGap(n) ≤ C (r₂(1+eps))ⁿ on the window
  std::vector<double> bound;           // C (r₂(1+eps))ⁿ
  double r = 0.0;
  double r2 = 0.0;
  double log_r2 = 0.0;
  double eps_tol = 0.0;
  bool exact_zero = false;
  bool pass = false;
  std::size_t cross_checked = 0;
  std::size_t cross_check_failures = 0;
  bool spectral_converged = false;
  bool spectral_stable = false;
  bool r2_three_digits = false;
};

DiscrepancyReport decay_fit(const SubstitutionSpec& spec, const SpectrumAnalysis& analysis,
                            const std::vector<TestFunction>& panel, const DiscrepancyOptions& options = {});

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace subkit
