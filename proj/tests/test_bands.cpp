#include "doctest.h"
#include "helpers.hpp"

#include "hfh/bands.hpp"
#include "hfh/check.hpp"
#include "hfh/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

using namespace hfh;
using hfh::test::kvec;

TEST_CASE("constant medium dispersion is exact") {
  const Medium m = fixtures::constant_medium();
  const DispersionTable t = sweep_path(m, kvec({0.1}), kvec({3.0}), 50, 1, 16);
  REQUIRE(t.points.size() == 50);
  for (const auto& p : t.points) CHECK(std::abs(p.omega - p.k(0)) < 1e-10);
  CHECK(t.points.front().k(0) == 0.1);
  CHECK(std::abs(t.points.back().k(0) - 3.0) < 1e-15);
  for (double k : {0.1, 1.0, 2.5, 3.0}) {
    CHECK(std::abs(group_velocity_fd(m, kvec({k}), 1, 0.0, 16).velocity(0) - 1.0) < 1e-8);
  }
}

TEST_CASE("observed slopes respect the lipschitz bound") {
  const Medium m = fixtures::two_phase_medium(8);
  for (int band : {1, 2, 3}) {
    const DispersionTable t = sweep_path(m, kvec({-3.0}), kvec({3.0}), 61, band, 16);
    CHECK(t.observed_lipschitz <= t.lipschitz_bound);
    // sqrt(max a / min b) over the truncated series; Gibbs overshoot lifts it above 2.
    CHECK(t.lipschitz_bound >= 2.0);
  }
  const DispersionTable s = sweep_path(Medium{fixtures::mathieu_medium()}, kvec({0.0}), kvec({3.0}), 5, 1, 16);
  CHECK(std::isinf(s.lipschitz_bound));
}

TEST_CASE("group velocity is odd in k for real media") {
  for (const Medium& m : {Medium{fixtures::two_phase_medium(8)}, Medium{fixtures::mathieu_medium()},
                          Medium{fixtures::coupled_vector_medium(8)}}) {
    for (double k : {0.3 * kPi, 0.5 * kPi, 0.7 * kPi}) {
      for (int band : {1, 2}) {
        const auto plus = group_velocity_fd(m, kvec({k}), band, 0.0, 16);
        const auto minus = group_velocity_fd(m, kvec({-k}), band, 0.0, 16);
        CHECK(std::abs(plus.velocity(0) + minus.velocity(0)) < 1e-8);
        CHECK(plus.richardson_gap < kRichardsonTol);
      }
    }
  }
}

TEST_CASE("group velocity matches a secant of the swept band") {
  const Medium m = fixtures::two_phase_medium(8);
  const double k = 1.2, dk = 1e-3;
  const double left = solve_mode(m, kvec({k - dk}), 2, 16).omega;
  const double right = solve_mode(m, kvec({k + dk}), 2, 16).omega;
  const double secant = (right - left) / (2.0 * dk);
  CHECK(std::abs(group_velocity_fd(m, kvec({k}), 2, 0.0, 16).velocity(0) - secant) < 1e-5);
}

TEST_CASE("2D group velocity has one component per axis") {
  const Medium m = fixtures::constant_medium(2, 1);
  const auto g = group_velocity_fd(m, kvec({0.6, 0.8}), 1, 0.0, 4);
  CHECK(std::abs(g.velocity(0) - 0.6) < 1e-8);
  CHECK(std::abs(g.velocity(1) - 0.8) < 1e-8);
}

TEST_CASE("degenerate stencils are refused") {
  // Bands 1 and 2 of a constant medium cross at the zone edge.
  CHECK_THROWS_AS(group_velocity_fd(fixtures::constant_medium(), kvec({kPi}), 1, 0.0, 16), NumericalError);
}

TEST_CASE("sweep preconditions") {
  const Medium m = fixtures::two_phase_medium(8);
  CHECK_THROWS_AS(sweep_path(m, kvec({0.1}), kvec({1.0}), 1, 1, 16), ValidationError);
  CHECK_THROWS_AS(sweep_path(m, kvec({0.1}), kvec({1.0, 2.0}), 5, 1, 16), ValidationError);
  CHECK(default_fd_step(Cell({2.0, 0.5})) == doctest::Approx(1e-4 * 2.0 * kPi / 0.5));
}

TEST_CASE("dispersion csv layout") {
  const DispersionTable t = sweep_path(fixtures::constant_medium(2, 1), kvec({0.1, 0.2}), kvec({0.3, 0.4}), 3, 1, 4);
  std::ostringstream out;
  write_dispersion_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k_1,k_2,omega,band,gap");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
