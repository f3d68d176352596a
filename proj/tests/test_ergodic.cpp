#include "doctest.h"
#include "helpers.hpp"

#include "hfh/ergodic.hpp"
#include "hfh/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

using namespace hfh;
using hfh::test::simpson;

namespace {

const std::vector<double> kWindows = {3.7, 7.3, 15.1, 31.9};

}  // namespace

TEST_CASE("every fixture converges at rate C / a, checked on a held-out window") {
  const auto fixtures = builtin_ergodic_fixtures();
  REQUIRE(fixtures.size() == 12);
  for (const ErgodicFixture& fx : fixtures) {
    CAPTURE(fx.name);
    const WindowAverageResult r = fx.run(kWindows);
    CHECK(std::abs(r.analytic_limit - fx.expected_limit) < 1e-12);
    for (std::size_t i = 0; i < kWindows.size(); ++i) {
      CHECK(std::abs(r.values[i] - r.analytic_limit) * kWindows[i] <= r.decay_constant + 1e-12);
    }
    const double held_out = 2.0 * kWindows.back();
    CHECK(std::abs(r.evaluate(held_out) - r.analytic_limit) * held_out <= r.decay_constant + 1e-12);
  }
}

TEST_CASE("resonant fixtures are exact on whole common periods") {
  for (const ErgodicFixture& fx : builtin_ergodic_fixtures()) {
    if (!fx.exact_on_integer_windows) continue;
    CAPTURE(fx.name);
    const WindowAverageResult r = fx.run({1.0, 2.0, 3.0, 7.0, 50.0});
    for (const cd& v : r.values) CHECK(std::abs(v - r.analytic_limit) < 1e-12);
  }
}

TEST_CASE("closed-form window averages match quadrature") {
  // (1/a) int_0^a f(x) e^{i b x} dx
  const auto f = PeriodicSignal1D::cosine(1.0) + PeriodicSignal1D::sine(1.0, 2, 0.5);
  const double b = std::sqrt(2.0);
  const WindowAverageResult r = avg_modulated_1d(f, b, kWindows);
  for (std::size_t i = 0; i < kWindows.size(); ++i) {
    const double a = kWindows[i];
    const cd q = simpson([&](double x) { return f.value(x) * std::polar(1.0, b * x); }, 0.0, a, 1 << 14) / a;
    CHECK(std::abs(r.values[i] - q) < 1e-10);
  }

  const auto g = PeriodicSignal1D::cosine(std::sqrt(3.0), 1, 2.0);
  const WindowAverageResult p = avg_product_periodic(PeriodicSignal1D::sine(1.0), g, kWindows);
  for (std::size_t i = 0; i < kWindows.size(); ++i) {
    const double a = kWindows[i];
    const cd q = simpson([&](double x) { return PeriodicSignal1D::sine(1.0).value(x) * g.value(x); }, 0.0, a,
                         1 << 14) /
                 a;
    CHECK(std::abs(p.values[i] - q) < 1e-10);
  }
}

TEST_CASE("two-dimensional box averages match quadrature") {
  const Cell cell({1.0, 0.5});
  FourierField f = FourierField::constant(cell, 0.5, 1);
  std::vector<cd> c(f.coefficients().begin(), f.coefficients().end());
  c[static_cast<std::size_t>(f.modes().flat({{1, -1, 0}}))] = cd(0.3, 0.1);
  c[static_cast<std::size_t>(f.modes().flat({{0, 1, 0}}))] = 0.2;
  f = FourierField(cell, 1, std::move(c));
  const std::vector<double> lambda = {0.7, -1.9};
  const WindowAverageResult r = avg_modulated_dd(f, lambda, {2.3});
  const double a = 2.3;
  const cd q = simpson(
                   [&](double x) {
                     return simpson(
                         [&](double y) {
                           const double xi[] = {x, y};
                           return f.value(xi) * std::polar(1.0, lambda[0] * x + lambda[1] * y);
                         },
                         0.0, a, 512);
                   },
                   0.0, a, 512) /
               (a * a);
  CHECK(std::abs(r.values[0] - q) < 1e-9);
  CHECK(std::abs(r.analytic_limit) < 1e-15);
}

TEST_CASE("derivative products are products with the derivative") {
  const auto f = PeriodicSignal1D::sine(1.0) + PeriodicSignal1D::cosine(1.0, 3, 0.25);
  for (const auto& g : {PeriodicSignal1D::cosine(std::sqrt(2.0)), PeriodicSignal1D::cosine(1.0, 3)}) {
    const auto lhs = avg_derivative_product(f, g, kWindows);
    const auto rhs = avg_product_periodic(f.derivative(), g, kWindows);
    for (std::size_t i = 0; i < kWindows.size(); ++i) CHECK(std::abs(lhs.values[i] - rhs.values[i]) < 1e-12);
    CHECK(std::abs(lhs.analytic_limit - rhs.analytic_limit) < 1e-12);
  }
  // f' g with matching harmonics: (d/dx cos 6 pi x) * sin 6 pi x averages to -3 pi.
  const auto r = avg_derivative_product(PeriodicSignal1D::cosine(1.0, 3), PeriodicSignal1D::sine(1.0, 3), {1.0});
  CHECK(std::abs(r.analytic_limit - cd(-3.0 * kPi, 0.0)) < 1e-12);
}

TEST_CASE("rational classification") {
  auto half = rational_approximation(0.5);
  REQUIRE(half);
  CHECK(half->p == 1);
  CHECK(half->q == 2);
  auto neg = rational_approximation(-0.75);
  REQUIRE(neg);
  CHECK(neg->p == -3);
  CHECK(neg->q == 4);
  // No denominator up to 1000 gets within 1e-12 of pi.
  CHECK_FALSE(rational_approximation(kPi, 1e-12, 1000));
  CHECK_FALSE(rational_approximation(std::nan("")));
  const auto pi = rational_approximation(kPi);
  REQUIRE(pi);
  CHECK(std::abs(kPi - static_cast<double>(pi->p) / static_cast<double>(pi->q)) < kErgodicTol);
}

TEST_CASE("preconditions and csv") {
  CHECK_THROWS_AS(avg_product_periodic(PeriodicSignal1D::constant(1.0, 1.0), PeriodicSignal1D::cosine(2.0), kWindows),
                  ValidationError);
  CHECK_THROWS_AS(avg_modulated_1d(PeriodicSignal1D::cosine(1.0), 1.0, {2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(avg_modulated_1d(PeriodicSignal1D::cosine(1.0), 1.0, {0.0}), ValidationError);
  CHECK_THROWS_AS(PeriodicSignal1D::cosine(1.0) + PeriodicSignal1D::cosine(2.0), ValidationError);

  std::ostringstream out;
  write_window_csv(out, avg_modulated_1d(PeriodicSignal1D::cosine(1.0), 1.0, {1.0, 2.0}));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "window,re_avg,im_avg,abs_err_vs_limit");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
