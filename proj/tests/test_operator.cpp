#include "doctest.h"

#include <cmath>
#include <numbers>

#include "subkit/bundled.hpp"
#include "subkit/dsl.hpp"
#include "subkit/engine.hpp"
#include "subkit/operator.hpp"

using namespace subkit;

namespace {

SubstitutionSpec bundled(const char* name) { return parse(find_bundled(name)->source); }

TruncatedOperator op_for(const SubstitutionSpec& spec, std::int64_t cutoff) {
  return TruncatedOperator::build(spec, TruncationScheme::build(spec.alphabet, cutoff));
}

const double kPhi = std::numbers::phi;
const double kS = 1.0 / std::numbers::sqrt2;

}  // namespace

TEST_CASE("Fibonacci operator is the Abelianisation") {
  auto op = op_for(bundled("fibonacci"), 8);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 1, 1, 0;
  CHECK(op.counts() == expected);
  CHECK(op.dense() == expected);
  CHECK(op.image_lengths() == std::vector<std::size_t>{2, 1});
}

TEST_CASE("doubling operator") {
  auto op = op_for(bundled("doubling"), 8);
  REQUIRE(op.size() == 1);
  CHECK(op.dense()(0, 0) == 2.0);
  auto rep = power_iteration(op);
  CHECK(rep.r_estimate == 2.0);
  CHECK(rep.exact_length);
  CHECK(rep.length[0] == 1.0);
  CHECK(rep.measure[0] == doctest::Approx(1.0));
  CHECK(rep.frequencies[0] == doctest::Approx(1.0));
  auto r2 = second_eigenvalue(op, rep);
  CHECK(r2.value == 0.0);
  CHECK(r2.method == "none");
}

TEST_CASE("non-CL operator columns") {
  auto spec = bundled("nonCL");
  auto op = op_for(spec, 16);
  auto A = op.counts();
  const auto inf = *op.scheme().limit_class();
  CHECK(A(0, 1) == 2);  // 1 -> 0 0 2
  for (Eigen::Index n = 2; n < 16; ++n) {
    CHECK(A(0, n) == 1);
    CHECK(A(n - 1, n) == 1);
    CHECK(A(n + 1, n) == 1);
    CHECK(A.col(n).sum() == 3);
  }
  CHECK(A(0, 0) == 3);
  CHECK(A(1, 0) == 1);
  CHECK(A(0, static_cast<Eigen::Index>(inf)) == 1);
  CHECK(A(static_cast<Eigen::Index>(inf), static_cast<Eigen::Index>(inf)) == 2);
}

TEST_CASE("Fibonacci spectral data") {
  auto op = op_for(bundled("fibonacci"), 8);
  auto rep = power_iteration(op);
  CHECK(rep.converged);
  CHECK(rep.r_estimate == doctest::Approx(kPhi).epsilon(1e-12));
  CHECK(rep.normalization == "sup");
  CHECK(rep.length[0] == doctest::Approx(1.0));
  CHECK(rep.length[1] == doctest::Approx(1.0 / kPhi));
  CHECK(rep.frequencies[0] == doctest::Approx(1.0 / kPhi));
  CHECK(rep.frequencies[1] == doctest::Approx(1.0 / (kPhi * kPhi)));
  CHECK(rep.measure.dot(rep.length) == doctest::Approx(1.0));
  auto r2 = second_eigenvalue(op, rep);
  CHECK(r2.value == doctest::Approx(kPhi - 1.0).epsilon(1e-10));
  CHECK(r2.method == "dense-eigensolver");
}

TEST_CASE("non-CL closed forms") {
  auto spec = bundled("nonCL");
  const double lambda = 3.0 + kS;
  auto rep64 = power_iteration(op_for(spec, 64));
  CHECK(rep64.converged);
  CHECK(std::abs(rep64.r_estimate - lambda) < 1e-6);
  CHECK(rep64.normalization == "limit-class");

  auto op = op_for(spec, 128);
  auto rep = power_iteration(op);
  REQUIRE(rep.converged);
  for (int j = 0; j <= 20; ++j) {
    const double q = std::pow(1.0 - kS, j);
    CHECK(std::abs(rep.frequencies[j] - kS * q) < 1e-6);
    CHECK(std::abs(rep.length[j] - (1.0 + kS * q)) < 1e-6);
  }
  const double r = rep.r_estimate;
  for (int j = 2; j <= 20; ++j) {
    const auto& nu = rep.frequencies;
    const auto& l = rep.length;
    CHECK(std::abs(nu[j] - (r * nu[j - 1] - nu[j - 2])) < 1e-8);
    CHECK(std::abs(l[j] - (r * l[j - 1] - l[j - 2] - l[0])) < 1e-8);
  }
}

TEST_CASE("column sums and powers of the operator count supertile letters") {
  for (const char* name : {"nonCL", "qc", "fibonacci", "thue_morse", "eventual", "nongrowing"}) {
    CAPTURE(name);
    auto spec = bundled(name);
    auto op = op_for(spec, 24);
    auto A = op.counts();
    for (std::size_t j = 0; j < op.size(); ++j)
      CHECK(A.col(static_cast<Eigen::Index>(j)).sum() == static_cast<double>(op.image_lengths()[j]));
    LengthCounter lengths(spec);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.size()));
    for (unsigned n = 1; n <= 6; ++n) {
      v = op.apply(v);
      // letters whose n-supertile cannot reach the fold boundary
      for (std::size_t j = 0; j < op.size(); ++j) {
        const auto& a = op.scheme().representative(j);
        bool inside = true;
        if (spec.alphabet.family == AlphabetFamily::NatInf) inside = is_infinite(a.first()) || a.first() + n < 24;
        if (spec.alphabet.family == AlphabetFamily::NatInf2)
          inside = !is_infinite(a.first()) && !is_infinite(a.second()) && a.first() + a.second() + 2 * n < 24;
        if (!inside) continue;
        CHECK(v[static_cast<Eigen::Index>(j)] == static_cast<double>(lengths.count(a, n)));
      }
    }
  }
}

TEST_CASE("radius bounds") {
  auto b = spectral_radius_bounds(bundled("qc"), 2);
  CHECK(b[1].min_length == 5);
  CHECK(b[1].max_length == 8);
  CHECK(b[1].lower == doctest::Approx(std::sqrt(5.0)));
  CHECK(b[1].upper == doctest::Approx(std::sqrt(8.0)));
  auto f = spectral_radius_bounds(bundled("fibonacci"), 5);
  CHECK(f[4].lower == doctest::Approx(std::pow(8.0, 0.2)));
  CHECK(f[4].upper == doctest::Approx(std::pow(13.0, 0.2)));
  for (std::size_t i = 1; i < f.size(); ++i) {
    CHECK(f[i].best_lower >= f[i - 1].best_lower);
    CHECK(f[i].best_upper <= f[i - 1].best_upper);
  }
  auto tm = spectral_radius_bounds(bundled("thue_morse"), 4);
  for (const auto& x : tm) {
    CHECK(x.lower == doctest::Approx(2.0));
    CHECK(x.upper == doctest::Approx(2.0));
  }
}

TEST_CASE("sandwich and residuals on bundled specs") {
  for (const auto& b : bundled_specs()) {
    CAPTURE(b.name);
    auto spec = parse(b.source);
    auto rep = power_iteration(op_for(spec, 64));
    for (const auto& bound : spectral_radius_bounds(spec, 8)) {
      CHECK(bound.lower - rep.r_estimate <= 1e-9);
      CHECK(rep.r_estimate - bound.upper <= 1e-9);
    }
  }
  for (const char* name : {"nonCL", "qc", "fibonacci", "thue_morse", "doubling", "circle", "circle_unit"}) {
    CAPTURE(name);
    auto rep = power_iteration(op_for(bundled(name), 64));
    CHECK(rep.converged);
    CHECK(rep.right_residual < 1e-9);
    CHECK(rep.left_residual < 1e-9);
    CHECK(rep.measure.dot(rep.length) == doctest::Approx(1.0));
    CHECK(rep.length.minCoeff() >= 0.0);
    CHECK(rep.measure.minCoeff() >= -1e-15);
  }
}

TEST_CASE("power iteration agrees with a full eigensolve") {
  for (const char* name : {"nonCL", "qc", "fibonacci", "eventual", "circle_unit"}) {
    CAPTURE(name);
    auto op = op_for(bundled(name), 20);
    auto rep = power_iteration(op);
    double rho = 0.0;
    for (auto z : dense_eigenvalues(op)) rho = std::max(rho, std::abs(z));
    CHECK(rep.r_estimate == doctest::Approx(rho).epsilon(1e-8));
  }
}

TEST_CASE("swap oscillates") {
  auto op = op_for(bundled("swap"), 8);
  auto rep = power_iteration(op);
  CHECK(rep.mean_ergodic_only);
  CHECK(rep.oscillation_period == 2);
  CHECK(rep.r_estimate == 2.0);
  CHECK(rep.length[0] == doctest::Approx(rep.length[1]));
  CHECK(rep.frequencies[0] == doctest::Approx(0.5));
  auto r2 = second_eigenvalue(op, rep);
  CHECK(r2.value == doctest::Approx(2.0));

  auto d = convergence_diagnostics(op, rep, default_panel(op, rep), 20);
  CHECK_FALSE(d.uniform);
  CHECK_FALSE(d.strong);
  CHECK(d.mean_ergodic);
  CHECK(d.verdict == "mean-ergodic");
}

TEST_CASE("Fibonacci converges uniformly") {
  auto op = op_for(bundled("fibonacci"), 8);
  auto rep = power_iteration(op);
  auto d = convergence_diagnostics(op, rep, default_panel(op, rep), 60);
  CHECK(d.uniform);
  CHECK(d.verdict == "uniform");
  CHECK(d.uniform_exact);
  // gaps shrink like (φ−1)/φ per step
  const double rate = (kPhi - 1.0) / kPhi;
  CHECK(d.uniform_gaps[9] / d.uniform_gaps[8] == doctest::Approx(rate).epsilon(1e-6));
  // the uniform gap dominates every normalised strong gap
  for (std::size_t f = 0; f < d.names.size(); ++f)
    for (std::size_t n = 0; n < d.uniform_gaps.size(); ++n) CHECK(d.strong_gaps[f][n] <= d.uniform_gaps[n] + 1e-12);
}

TEST_CASE("circle spike witness") {
  auto spec = bundled("circle");
  auto op = op_for(spec, 64);
  REQUIRE(op.scheme().grid_q() == 89);
  REQUIRE(op.scheme().grid_p() == 55);
  auto rep = power_iteration(op);
  CHECK(rep.r_estimate == 2.0);
  CHECK(rep.exact_length);
  CHECK(rep.exact_measure);
  for (const auto& w : circle_spike_witness(op, rep, 20)) {
    CAPTURE(w.n);
    CHECK(w.value_at_zero == 1.0);
    CHECK(w.mean == doctest::Approx(static_cast<double>(w.n + 1) / 89.0).epsilon(1e-12));
    CHECK(w.lower_bound >= 1.0 - static_cast<double>(w.n + 1) / 89.0 - 1e-12);
  }
  auto panel = default_panel(op, rep);
  auto d = convergence_diagnostics(op, rep, panel, 30);
  CHECK_FALSE(d.uniform);
  for (std::size_t f = 0; f < panel.size(); ++f) {
    if (!panel[f].smooth) continue;
    CAPTURE(panel[f].name);
    for (std::size_t n = 6; n < d.strong_gaps[f].size(); ++n) CHECK(d.strong_gaps[f][n] < d.strong_gaps[f][n - 1]);
  }
  CHECK(second_eigenvalue(op, rep).truncation_dependent);
}

TEST_CASE("sequence convergence verdicts") {
  CHECK(sequence_converging({1, 0.5, 0.25, 0.1, 0.01, 1e-3, 1e-5, 1e-7}, 1e-6));
  CHECK_FALSE(sequence_converging({1, 0.5, 1, 0.5, 1, 0.5, 1, 0.5, 1, 0.5, 1, 0.5}, 1e-6));
  CHECK_FALSE(sequence_converging({}, 1e-6));
}

TEST_CASE("three significant digits") {
  CHECK(same_three_digits(2.0001, 2.0003));
  CHECK(same_three_digits(1.2345, 1.2349));
  CHECK_FALSE(same_three_digits(1.234, 1.240));
  CHECK(same_three_digits(0.0, 0.0));
}

TEST_CASE("analysis at two cutoffs") {
  auto a = analyze_spectrum(bundled("nonCL"));
  REQUIRE(a.stability);
  CHECK(a.stability->stable);
  CHECK(a.report.r_lower <= a.report.r_estimate + 1e-9);
  CHECK(a.report.r_estimate <= a.report.r_upper + 1e-9);
  CHECK(a.r2.value < a.report.r_estimate);
}
