#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subkit/alphabet.hpp"
#include "subkit/dsl.hpp"

namespace subkit {

/// The substitution operator (Mf)(a) = Σ_{b ◁ ρ(a)} f(b) on functions that
/// are constant on the fold classes of a truncation scheme.
class TruncatedOperator {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  static TruncatedOperator build(const SubstitutionSpec& spec, const TruncationScheme& scheme);

  const TruncationScheme& scheme() const { return scheme_; }
  std::size_t size() const { return lengths_.size(); }

  /// Row j holds the class counts of fold(ρ(representative j)).
  const Sparse& M() const { return m_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return m_ * f; }
  /// μ ↦ μM, as a column vector (Mᵀμ).
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& mu) const { return mt_ * mu; }

  /// Count matrix A(i,j) = #class i in ρ(rep j), i.e. Mᵀ, densely.
  Eigen::MatrixXd counts() const;
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m_); }

  /// |ρ(representative j)|, the column sums of the count matrix.
  const std::vector<std::size_t>& image_lengths() const { return lengths_; }

  bool dense_recommended() const { return size() <= 2000; }

 private:
  TruncationScheme scheme_;
  Sparse m_;
  Sparse mt_;  // Mᵀ, stored row-major for fast adjoint products
  std::vector<std::size_t> lengths_;
};

struct RadiusBound {
  unsigned n = 0;
  std::uint64_t min_length = 0;
  std::uint64_t max_length = 0;
  double lower = 0.0;       // min^{1/n}
  double upper = 0.0;       // max^{1/n}
  double best_lower = 0.0;  // running max of lower
  double best_upper = 0.0;  // running min of upper
  bool exact = false;
};

/// min_a |ρⁿ(a)| ≤ rⁿ ≤ max_a |ρⁿ(a)| for n = 1..nMax.
std::vector<RadiusBound> spectral_radius_bounds(const SubstitutionSpec& spec, unsigned n_max);

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct SpectralReport {
  double r_estimate = 0.0;
  double r_lower = 0.0;  // from supertile lengths, when computed
  double r_upper = 0.0;
  Eigen::VectorXd length;       // ℓ, ℓ(limit class) = 1 when present, else sup = 1
  Eigen::VectorXd measure;      // μ, μ·ℓ = 1
  Eigen::VectorXd frequencies;  // ν = μ / Σμ
  bool converged = false;
  std::size_t iterations = 0;
  double right_residual = 0.0;  // ‖Mℓ − rℓ‖∞ / ‖ℓ‖∞
  double left_residual = 0.0;   // ‖μM − rμ‖₁ / ‖μ‖₁
  bool mean_ergodic_only = false;
  std::size_t oscillation_period = 0;
  bool exact_length = false;    // M𝟙 = L𝟙: ℓ = 𝟙 and r = L exactly
  bool exact_measure = false;   // 𝟙ᵀM = c𝟙ᵀ: μ uniform
  std::string normalization;    // "limit-class" or "sup"
  bool measure_normalized_by_length = true;
};

/// Simultaneous right/left power iteration with oscillation detection.
SpectralReport power_iteration(const TruncatedOperator& op, const PowerIterationOptions& options = {});

struct SecondEigenvalue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string method;  // "dense-eigensolver", "deflated-power", "none"
  bool truncation_dependent = false;
};

/// Spectral radius of M on the kernel of μ.
SecondEigenvalue second_eigenvalue(const TruncatedOperator& op, const SpectralReport& report);

/// All eigenvalues of the truncation, for small sizes (oracle and tests).
std::vector<std::complex<double>> dense_eigenvalues(const TruncatedOperator& op);

struct TestFunction {
  std::string name;
  Eigen::VectorXd values;
  bool smooth = false;
};

/// Class indicators (a sample for large truncations), 𝟙, ℓ, and for circle
/// truncations the Fourier modes cos/sin(2πkx), k = 1..3, and a bump.
std::vector<TestFunction> default_panel(const TruncatedOperator& op, const SpectralReport& report);

/// Indicator of the grid points {j·p mod q : j = 0..n} of a circle truncation.
TestFunction circle_spike(const TruncatedOperator& op, std::size_t n);

struct ConvergenceDiagnostics {
  std::vector<std::string> names;
  std::vector<std::vector<double>> strong_gaps;         // [f][n], n = 0..nMax
  std::vector<std::vector<double>> strong_cesaro_gaps;  // [f][n], n = 1..nMax at index n
  std::vector<double> uniform_gaps;                     // ‖Tⁿ − ℓμᵀ‖∞
  std::vector<double> cesaro_gaps;                      // ‖Aₙ − ℓμᵀ‖∞
  bool uniform_exact = true;  // false when only a subset of rows was used
  std::size_t rows_used = 0;
  bool uniform = false;
  bool strong = false;
  bool mean_ergodic = false;
  std::string verdict;  // "uniform", "strong", "mean-ergodic", "none"
};

/// True when the sequence is below tol at the end or its last quarter is
/// at most half of its second quarter.
bool sequence_converging(const std::vector<double>& gaps, double tol);

ConvergenceDiagnostics convergence_diagnostics(const TruncatedOperator& op, const SpectralReport& report,
                                               const std::vector<TestFunction>& panel, std::size_t n_max,
                                               double tol = 1e-6);

struct SpikeWitness {
  std::size_t n = 0;
  double value_at_zero = 0.0;  // Tⁿf_n(0)
  double mean = 0.0;           // μ(f_n)
  double lower_bound = 0.0;    // |Tⁿf_n(0) − μ(f_n)ℓ(0)|, a lower bound for ‖Tⁿ − P‖
};

/// Non-uniform convergence witness on circle truncations.
std::vector<SpikeWitness> circle_spike_witness(const TruncatedOperator& op, const SpectralReport& report,
                                               std::size_t n_max);

struct SpectrumOptions {
  std::int64_t cutoff = 64;
  std::int64_t cutoff2 = 128;  // 0 disables the stability run
  PowerIterationOptions power;
  unsigned bounds_n_max = 8;
  double stability_tol = 1e-4;
};

struct CutoffStability {
  double r_change = 0.0;
  double length_change = 0.0;
  double measure_change = 0.0;
  std::optional<double> r2_change;
  bool stable = false;
  bool r2_three_digits = false;
};

struct SpectrumAnalysis {
  TruncatedOperator op;
  SpectralReport report;
  SecondEigenvalue r2;
  std::vector<RadiusBound> bounds;
  std::optional<TruncatedOperator> op2;
  std::optional<SpectralReport> report2;
  std::optional<SecondEigenvalue> r2_second;
  std::optional<CutoffStability> stability;
};

/// Class pairs (i, j) of `coarse` and `fine` sharing a representative that
/// lies in the lower half of the coarse truncation (plus the limit class).
std::vector<std::pair<std::size_t, std::size_t>> common_classes(const TruncationScheme& coarse,
                                                                 const TruncationScheme& fine);

SpectrumAnalysis analyze_spectrum(const SubstitutionSpec& spec, const SpectrumOptions& options = {});

/// Agreement to three significant digits.
bool same_three_digits(double a, double b);

}  // namespace subkit
