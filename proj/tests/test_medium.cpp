#include "doctest.h"
#include "helpers.hpp"

#include "hfh/check.hpp"
#include "hfh/errors.hpp"
#include "hfh/medium.hpp"

#include <cmath>
#include <random>

using namespace hfh;
using hfh::test::scalar;

TEST_CASE("mode set is lexicographic with the last axis fastest") {
  const ModeSet modes(2, 1);
  CHECK(modes.size() == 9);
  CHECK(modes.at(0) == MultiIndex{{-1, -1, 0}});
  CHECK(modes.at(1) == MultiIndex{{-1, 0, 0}});
  CHECK(modes.at(3) == MultiIndex{{0, -1, 0}});
  for (std::size_t f = 0; f < modes.size(); ++f) CHECK(modes.flat(modes.at(f)) == static_cast<std::ptrdiff_t>(f));
  CHECK_FALSE(modes.contains(MultiIndex{{2, 0, 0}}));
}

TEST_CASE("indicator coefficients match brute-force quadrature") {
  // Midpoint rule on 2^16 points; the indicator is resolved exactly up to one cell.
  for (int n : {-3, 0, 1, 5}) {
    const double lo = 0.2, hi = 0.65, lambda = 1.3;
    const int samples = 1 << 16;
    cd sum{0.0, 0.0};
    for (int i = 0; i < samples; ++i) {
      const double x = (i + 0.5) * lambda / samples;
      if (x >= lo && x < hi) sum += std::polar(1.0, -2.0 * kPi * n * x / lambda);
    }
    sum /= static_cast<double>(samples);
    CHECK(std::abs(indicator_coefficient(lo, hi, lambda, n) - sum) < 5e-5);
  }
}

TEST_CASE("two-phase coefficients are exact") {
  const ScalarMedium m = fixtures::two_phase_medium(8);
  const FourierField& a = m.a(0, 0);
  CHECK(std::abs(a[MultiIndex{}] - cd(2.5, 0.0)) < 1e-15);
  CHECK(std::abs(a[MultiIndex{{1, 0, 0}}] - cd(0.0, 3.0 / kPi)) < 1e-15);
  // Even harmonics of a half-cell indicator vanish.
  CHECK(std::abs(a[MultiIndex{{2, 0, 0}}]) < 1e-15);
  CHECK(a.is_conjugate_symmetric(0.0));
}

TEST_CASE("real random fields are conjugate symmetric coefficientwise") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarMedium m = fixtures::random_scalar_medium(rng, 1 + trial % 2);
    CHECK(m.b.is_conjugate_symmetric(0.0));
    for (int i = 0; i < m.a.rows(); ++i)
      for (int j = 0; j < m.a.cols(); ++j) CHECK(m.a(i, j).is_conjugate_symmetric(0.0));
    CHECK(m.a.is_symmetric());
  }
}

TEST_CASE("sampling and forward transform round-trip") {
  std::mt19937_64 rng(2);
  for (int dims : {1, 2, 3}) {
    const Cell cell(std::vector<double>(static_cast<std::size_t>(dims), 0.7));
    FourierSpec spec;
    spec.terms.push_back({MultiIndex{}, Eigen::MatrixXcd::Constant(1, 1, 1.0)});
    MultiIndex n;
    n[dims - 1] = 1;
    spec.terms.push_back({n, Eigen::MatrixXcd::Constant(1, 1, cd(0.2, -0.1))});
    spec.terms.push_back({-n, Eigen::MatrixXcd::Constant(1, 1, cd(0.2, 0.1))});
    const FourierField f = field_from_spec(spec, cell, 2, 1, 1)(0, 0);
    const std::vector<int> res(static_cast<std::size_t>(dims), 6);
    const FourierField g = fourier_from_samples(sample_on_grid(f, res), res, cell, 2);
    for (std::size_t i = 0; i < f.modes().size(); ++i) {
      CHECK(std::abs(f.coefficients()[i] - g.coefficients()[i]) < 1e-12);
    }
  }
}

TEST_CASE("point values sum the series") {
  const ScalarMedium m = fixtures::smooth_medium();
  for (double x : {0.0, 0.13, 0.5, 0.91}) {
    const double xi[] = {x};
    CHECK(std::abs(m.a(0, 0).value(xi) - (2.0 + std::cos(2.0 * kPi * x))) < 1e-14);
  }
  const FourierField da = m.a(0, 0).derivative(0);
  const double xi[] = {0.2};
  CHECK(std::abs(da.value(xi) + 2.0 * kPi * std::sin(2.0 * kPi * 0.2)) < 1e-13);
}

TEST_CASE("maxwell tensor is pair-symmetric and reproduces the curl-curl form") {
  const Cell cell({1.0, 1.0, 1.0});
  FourierSpec mu;
  Eigen::MatrixXcd base = Eigen::MatrixXcd::Identity(3, 3) * 2.0;
  base(1, 2) = base(2, 1) = 0.4;
  mu.terms.push_back({MultiIndex{}, base});
  Eigen::MatrixXcd ripple = Eigen::MatrixXcd::Constant(3, 3, 0.05);
  mu.terms.push_back({MultiIndex{{0, 1, 0}}, ripple});
  mu.terms.push_back({MultiIndex{{0, -1, 0}}, ripple});
  const MatrixField inv = field_from_spec(mu, cell, 1, 3, 3);
  const MatrixField a = maxwell_tensor_from_permeability(inv);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      for (std::size_t f = 0; f < a(r, c).modes().size(); ++f) {
        CHECK(a(r, c).coefficients()[f] == a(c, r).coefficients()[f]);
      }
  // Identity permeability: a_ijkl = -(d_ik d_jl - d_il d_jk).
  FourierSpec id;
  id.terms.push_back({MultiIndex{}, Eigen::MatrixXcd::Identity(3, 3)});
  const MatrixField ai = maxwell_tensor_from_permeability(field_from_spec(id, cell, 0, 3, 3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double expected = -((i == k && j == l ? 1.0 : 0.0) - (i == l && j == k ? 1.0 : 0.0));
          CHECK(ai(i * 3 + j, k * 3 + l)[MultiIndex{}] == cd(expected, 0.0));
        }
}

TEST_CASE("schrodinger magnetic block must be divergence free") {
  std::mt19937_64 rng(3);
  const SchrodingerMedium ok = fixtures::random_schrodinger_medium(rng, 2);
  const std::span<const FourierField> spatial(ok.blocks.b_block.data() + 1, ok.magnetic.size());
  CHECK(divergence_residual(spatial) < 1e-12);

  // Phi_1 varying along x has a nonzero divergence.
  FourierSpec bad;
  bad.terms.push_back({MultiIndex{{1, 0, 0}}, Eigen::MatrixXcd::Constant(1, 1, 0.3)});
  bad.terms.push_back({MultiIndex{{-1, 0, 0}}, Eigen::MatrixXcd::Constant(1, 1, 0.3)});
  const std::vector<FieldSpec> phi = {bad, PiecewiseSpec{scalar(0.0), {}}};
  CHECK_THROWS_AS(build_schrodinger_medium(0.5, 1.0, PiecewiseSpec{scalar(0.0), {}}, phi, Cell({1.0, 1.0}), 1),
                  ValidationError);
}

TEST_CASE("validation rejects inadmissible media") {
  const Cell cell({1.0});
  SUBCASE("negative stiffness") {
    CHECK_THROWS_AS(build_scalar_medium(PiecewiseSpec{scalar(-1.0), {}}, PiecewiseSpec{scalar(1.0), {}}, cell, 2),
                    ValidationError);
  }
  SUBCASE("non-positive density") {
    CHECK_THROWS_AS(build_scalar_medium(PiecewiseSpec{scalar(1.0), {}}, PiecewiseSpec{scalar(0.0), {}}, cell, 2),
                    ValidationError);
  }
  SUBCASE("complex-valued field") {
    FourierSpec a;
    a.terms.push_back({MultiIndex{}, Eigen::MatrixXcd::Constant(1, 1, 2.0)});
    a.terms.push_back({MultiIndex{{1, 0, 0}}, Eigen::MatrixXcd::Constant(1, 1, 0.3)});
    CHECK_THROWS_AS(build_scalar_medium(a, PiecewiseSpec{scalar(1.0), {}}, cell, 2), ValidationError);
  }
  SUBCASE("asymmetric tensor") {
    Eigen::MatrixXd a(2, 2);
    a << 2.0, 0.3, 0.1, 2.0;
    CHECK_THROWS_AS(build_scalar_medium(PiecewiseSpec{a, {}}, PiecewiseSpec{scalar(1.0), {}}, Cell({1.0, 1.0}), 1),
                    ValidationError);
  }
  SUBCASE("region outside the cell") {
    CHECK_THROWS_AS(build_scalar_medium(PiecewiseSpec{scalar(1.0), {Region{{0.5}, {1.5}, scalar(2.0)}}},
                                        PiecewiseSpec{scalar(1.0), {}}, cell, 2),
                    ValidationError);
  }
}

TEST_CASE("fingerprint tracks every coefficient") {
  const Medium a = fixtures::two_phase_medium(8);
  const Medium b = fixtures::two_phase_medium(8);
  const Medium c = fixtures::two_phase_medium(9);
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(a) != fingerprint(c));
  CHECK(family_of(Medium{fixtures::mathieu_medium()}) == Family::schrodinger);
}
