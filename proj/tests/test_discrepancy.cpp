#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "subkit/bundled.hpp"
#include "subkit/discrepancy.hpp"
#include "subkit/engine.hpp"

using namespace subkit;

namespace {

SubstitutionSpec bundled(const char* name) { return parse(find_bundled(name)->source); }

SpectrumAnalysis analysis_for(const SubstitutionSpec& spec, std::int64_t cutoff = 64, std::int64_t cutoff2 = 0) {
  SpectrumOptions o;
  o.cutoff = cutoff;
  o.cutoff2 = cutoff2;
  return analyze_spectrum(spec, o);
}

}  // namespace

TEST_CASE("expected and actual on small cases") {
  auto qc = bundled("qc");
  auto a = analysis_for(qc);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(a.op.size()));
  auto v = actual(qc, a.op, one, a.op.scheme().index_of(Letter::nat(0)), 2);
  CHECK(v.matrix == 5.0);
  REQUIRE(v.direct);
  CHECK(*v.direct == 5.0);
  CHECK(v.agree);

  // Exp(ℓ, a, n) = rⁿ ℓ(a)
  for (unsigned n = 0; n <= 5; ++n)
    CHECK(expected(a.report, a.report.length, 3, n) ==
          doctest::Approx(std::pow(a.report.r_estimate, n) * a.report.length[3]));

  // Act(𝟙, a, n) = |ρⁿ(a)|
  LengthCounter lengths(qc);
  for (std::size_t i = 0; i < 10; ++i)
    for (unsigned n = 1; n <= 5; ++n) {
      auto x = actual(qc, a.op, one, i, n);
      CHECK(x.matrix == static_cast<double>(lengths.count(a.op.scheme().representative(i), n)));
    }
}

TEST_CASE("linearity of the discrepancy") {
  auto spec = bundled("nonCL");
  auto a = analysis_for(spec);
  const auto n = static_cast<Eigen::Index>(a.op.size());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd f(n), g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f[i] = u(rng);
      g[i] = u(rng);
    }
    const double alpha = u(rng), beta = u(rng);
    Eigen::VectorXd h = alpha * f + beta * g;
    for (std::size_t x : {0ul, 5ul, 30ul, static_cast<std::size_t>(n - 1)})
      for (unsigned k = 0; k <= 8; ++k) {
        auto d = [&](const Eigen::VectorXd& w) { return expected(a.report, w, x, k) - actual(spec, a.op, w, x, k).matrix; };
        const double scale = std::pow(a.report.r_estimate, k);
        CHECK(std::abs(d(h) - (alpha * d(f) + beta * d(g))) <= 1e-9 * scale);
      }
  }
}

TEST_CASE("zero on the eigenline") {
  auto spec = bundled("nonCL");
  auto a = analysis_for(spec);
  std::vector<TestFunction> panel{{"length", a.report.length, false}};
  DiscrepancyOptions o;
  o.n_max = 10;
  auto rep = decay_fit(spec, a, panel, o);
  CHECK(rep.exact_zero);
  CHECK(rep.pass);
  CHECK_FALSE(rep.fitted_slope);
  for (const auto& e : rep.table)
    CHECK(e.gap <= 1e-8 * std::pow(a.report.r_estimate, e.n) * a.report.length[static_cast<Eigen::Index>(e.letter)]);
}

TEST_CASE("Fibonacci decay rate") {
  auto spec = bundled("fibonacci");
  auto a = analysis_for(spec, 8);
  Eigen::VectorXd f(2);
  f << 1.0, 0.0;
  f -= a.report.frequencies[0] * Eigen::VectorXd::Ones(2);
  DiscrepancyOptions o;
  o.n_max = 12;
  auto rep = decay_fit(spec, a, {{"a-mean", f, false}}, o);
  REQUIRE(rep.fitted_slope);
  CHECK(*rep.fitted_slope == doctest::Approx(std::log(std::numbers::phi - 1.0)).epsilon(1e-4));
  CHECK(rep.pass);
  CHECK(rep.cross_checked > 0);
  CHECK(rep.cross_check_failures == 0);
}

TEST_CASE("non-CL indicator panel decays at the spectral gap") {
  auto spec = bundled("nonCL");
  auto a = analyze_spectrum(spec);
  auto rep = decay_fit(spec, a, indicator_panel(a.op));
  CHECK(rep.fit_from == 6);
  CHECK(rep.fit_to == 12);
  REQUIRE(rep.fitted_slope);
  CHECK(rep.pass);
  CHECK(rep.r2_three_digits);
  CHECK(rep.cross_check_failures == 0);
  CHECK(rep.cross_checked > 0);
  for (unsigned n = rep.fit_from; n <= rep.fit_to; ++n) CHECK(rep.sup_gap[n] <= rep.bound[n] * (1 + 1e-12));
}

TEST_CASE("least squares slope") {
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(least_squares_slope({1, 2}, {4, 1}) == doctest::Approx(-3.0));
}
