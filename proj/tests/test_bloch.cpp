#include "doctest.h"
#include "helpers.hpp"

#include "hfh/bloch.hpp"
#include "hfh/check.hpp"
#include "hfh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hfh;
using hfh::test::kvec;
using hfh::test::scalar;

namespace {

// Bloch-periodic fourth-order finite differences for -psi'' + V psi on [0, 1).
Eigen::VectorXd mathieu_fd_energies(double k, int points, int count) {
  const double h = 1.0 / points;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(points, points);
  const double stencil[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  for (int j = 0; j < points; ++j) {
    for (int s = -2; s <= 2; ++s) {
      int col = j + s;
      cd phase{1.0, 0.0};
      if (col >= points) {
        col -= points;
        phase = std::polar(1.0, k);
      } else if (col < 0) {
        col += points;
        phase = std::polar(1.0, -k);
      }
      H(j, col) += -stencil[s + 2] / (12.0 * h * h) * phase;
    }
    H(j, j) += 2.0 * std::cos(2.0 * kPi * j * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(count);
}

}  // namespace

TEST_CASE("constant medium bands are folded free dispersion") {
  const Medium m = fixtures::constant_medium(1, 1);
  for (double k : {0.1, 1.3, 3.0, -2.2}) {
    const auto modes = solve_bands(assemble_operator(m, kvec({k}), 8), 4);
    std::vector<double> exact;
    for (int n = -6; n <= 6; ++n) exact.push_back(std::abs(k + 2.0 * kPi * n));
    std::sort(exact.begin(), exact.end());
    for (std::size_t b = 0; b < modes.size(); ++b) CHECK(std::abs(modes[b].omega - exact[b]) < 1e-12);
  }
  const Medium m2 = fixtures::constant_medium(2, 1);
  const BlochMode first = solve_mode(m2, kvec({0.4, -0.9}), 1, 4);
  CHECK(std::abs(first.omega - std::hypot(0.4, 0.9)) < 1e-12);
}

TEST_CASE("stiffness entries match dense quadrature of the weak form") {
  // a(x) = 2 + cos(2 pi x) evaluated directly, not through its Fourier table.
  const ScalarMedium medium = fixtures::smooth_medium();
  const double k = 0.83;
  const BlochOperator op = assemble_wave_operator(medium, kvec({k}), 6);
  const int points = 1024;
  for (std::size_t p = 0; p < op.basis.size(); p += 3) {
    for (std::size_t s = 0; s < op.basis.size(); s += 2) {
      const double qp = op.wavevector(p)(0);
      const double qs = op.wavevector(s)(0);
      cd integral{0.0, 0.0};
      for (int i = 0; i < points; ++i) {
        const double x = static_cast<double>(i) / points;
        // conj(d/dx e^{i qp x}) a(x) d/dx e^{i qs x}
        integral += qp * qs * (2.0 + std::cos(2.0 * kPi * x)) * std::polar(1.0, (qs - qp) * x);
      }
      integral /= static_cast<double>(points);
      const auto ip = static_cast<Eigen::Index>(p), is = static_cast<Eigen::Index>(s);
      CHECK(std::abs(op.stiffness(ip, is) - integral) < 1e-9 * std::max(1.0, std::abs(qp * qs)));
      CHECK(std::abs(op.mass(ip, is) - (p == s ? 1.0 : 0.0)) < 1e-15);
    }
  }
}

TEST_CASE("mathieu energies agree with an independent finite-difference solver") {
  const Medium m = fixtures::mathieu_medium();
  for (double k : {0.0, 0.3 * kPi, 0.5 * kPi, kPi}) {
    const auto modes = solve_bands(assemble_operator(m, kvec({k}), 16), 3);
    const Eigen::VectorXd fd = mathieu_fd_energies(k, 512, 3);
    for (int b = 0; b < 3; ++b) {
      CHECK(std::abs(modes[static_cast<std::size_t>(b)].omega - fd(b)) < 1e-6 * std::max(1.0, std::abs(fd(b))));
    }
  }
}

TEST_CASE("constant magnetic potential is a pure gauge shift") {
  // With the e^2 Phi^2 / (2m) term absent from the operator, E_Phi(k) = E_0(k - e Phi) - e^2 Phi^2 / (2m).
  FourierSpec v;
  v.terms.push_back({MultiIndex{{1, 0, 0}}, Eigen::MatrixXcd::Constant(1, 1, 1.0)});
  v.terms.push_back({MultiIndex{{-1, 0, 0}}, Eigen::MatrixXcd::Constant(1, 1, 1.0)});
  const double phi = 0.3, mass = 0.5, charge = 1.0;
  const Medium gauged = build_schrodinger_medium(mass, charge, v, {PiecewiseSpec{scalar(phi), {}}}, Cell({1.0}), 1);
  const Medium plain = fixtures::mathieu_medium();
  for (double k : {0.2, 0.5 * kPi, 2.5}) {
    for (int band : {1, 2, 3}) {
      const double shifted = solve_mode(plain, kvec({k - charge * phi}), band, 16).omega;
      CHECK(std::abs(solve_mode(gauged, kvec({k}), band, 16).omega -
                     (shifted - charge * charge * phi * phi / (2.0 * mass))) < 1e-10);
    }
  }
}

TEST_CASE("decoupled vector components give the union of scalar spectra") {
  Eigen::MatrixXd a(2, 2), b = Eigen::MatrixXd::Identity(2, 2);
  a << 1.0, 0.0, 0.0, 4.0;
  const Medium m = build_vector_medium(2, PiecewiseSpec{a, {}}, PiecewiseSpec{b, {}}, Cell({1.0}), 1);
  const auto modes = solve_bands(assemble_operator(m, kvec({0.3}), 8), 3);
  CHECK(std::abs(modes[0].omega - 0.3) < 1e-12);
  CHECK(std::abs(modes[1].omega - 0.6) < 1e-12);
  CHECK(std::abs(modes[2].omega - (2.0 * kPi - 0.3)) < 1e-12);
}

TEST_CASE("assembled operators are hermitian on random media") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<Medium, Eigen::VectorXd>> cases = {
        {fixtures::random_scalar_medium(rng, 1), kvec({fixtures::uniform(rng) * 6.0 - 3.0})},
        {fixtures::random_scalar_medium(rng, 2), kvec({fixtures::uniform(rng), -fixtures::uniform(rng)})},
        {fixtures::random_vector_medium(rng), kvec({fixtures::uniform(rng) * 3.0})},
        {fixtures::random_schrodinger_medium(rng, 1), kvec({fixtures::uniform(rng) * 3.0})},
        {fixtures::random_schrodinger_medium(rng, 2), kvec({fixtures::uniform(rng), 2.0})}};
    for (const auto& [m, k] : cases) {
      const BlochOperator op = assemble_operator(m, k, k.size() == 1 ? 16 : 4);
      CHECK(hermiticity_defect(op.stiffness) < 1e-12);
      CHECK(hermiticity_defect(op.mass) < 1e-12);
    }
  }
}

TEST_CASE("returned modes are normalized eigenpairs with a fixed phase") {
  for (const Medium& m : {Medium{fixtures::two_phase_medium(8)}, Medium{fixtures::coupled_vector_medium(8)},
                          Medium{fixtures::mathieu_medium()}}) {
    const BlochOperator op = assemble_operator(m, kvec({0.77}), 16);
    for (const BlochMode& mode : solve_bands(op, 4)) {
      const Eigen::VectorXcd r = op.stiffness * mode.v0 - mode.eigenvalue * (op.mass * mode.v0);
      CHECK(r.norm() < 1e-9 * std::max(1.0, std::abs(mode.eigenvalue)));
      CHECK(std::abs(mode.v0.dot(op.mass * mode.v0) - 1.0) < 1e-12);
      Eigen::Index big = 0;
      mode.v0.cwiseAbs().maxCoeff(&big);
      CHECK(mode.v0(big).imag() == 0.0);
      CHECK(mode.v0(big).real() > 0.0);
    }
  }
}

TEST_CASE("time reversal for real media") {
  for (const Medium& m : {Medium{fixtures::two_phase_medium(8)}, Medium{fixtures::mathieu_medium()},
                          Medium{fixtures::coupled_vector_medium(8)}}) {
    for (double k : {0.21, 1.7, 2.9}) {
      const auto plus = solve_bands(assemble_operator(m, kvec({k}), 16), 3);
      const auto minus = solve_bands(assemble_operator(m, kvec({-k}), 16), 3);
      for (std::size_t b = 0; b < 3; ++b) CHECK(std::abs(plus[b].omega - minus[b].omega) < 1e-10);
    }
  }
}

TEST_CASE("reciprocal-lattice shifts leave the spectrum unchanged") {
  const Medium m = fixtures::two_phase_medium(8);
  const auto base = solve_bands(assemble_operator(m, kvec({0.9}), 16), 3);
  for (int shift : {-2, 1, 3}) {
    const auto moved = solve_bands(assemble_operator(m, kvec({0.9 + 2.0 * kPi * shift}), 16), 3);
    for (std::size_t b = 0; b < 3; ++b) CHECK(std::abs(base[b].omega - moved[b].omega) < 1e-10);
  }
}

TEST_CASE("doubling the cutoff converges smooth media") {
  const Medium m = fixtures::smooth_medium();
  for (double k : {0.0, 1.1, kPi}) {
    const auto coarse = solve_bands(assemble_operator(m, kvec({k}), 16), 3);
    const auto fine = solve_bands(assemble_operator(m, kvec({k}), 32), 3);
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(std::abs(coarse[b].omega - fine[b].omega) < 1e-8 * std::max(1.0, fine[b].omega));
    }
  }
}

TEST_CASE("bloch value sums the plane waves") {
  const Medium m = fixtures::constant_medium(1, 1);
  const BlochMode mode = solve_mode(m, kvec({0.7}), 1, 4);
  const double xi[] = {0.37};
  CHECK(std::abs(mode.bloch_value(xi) - std::polar(1.0, 0.7 * 0.37)) < 1e-14);
  CHECK(std::abs(mode.amplitude(xi) - 1.0) < 1e-14);
}

TEST_CASE("solver preconditions") {
  const Medium m = fixtures::two_phase_medium(8);
  CHECK_THROWS_AS(solve_mode(m, kvec({0.5}), 0, 16), ValidationError);
  CHECK_THROWS_AS(solve_mode(m, kvec({0.5, 0.1}), 1, 16), ValidationError);
  CHECK_THROWS_AS(assemble_operator(m, kvec({0.5}), 0), ValidationError);
  CHECK(assemble_operator(m, kvec({0.5}), 4).warnings.size() == 1);
  CHECK(assemble_operator(m, kvec({0.5}), 16).warnings.empty());
  // Band 1 and 2 touch at the zone edge of a constant medium.
  const BlochMode edge = solve_mode(fixtures::constant_medium(1, 1), kvec({kPi}), 1, 8);
  CHECK_FALSE(check_nondegenerate(edge));
}
