#pragma once

// Plane-wave Galerkin discretisation of the Bloch cell problems.
//
// The cell-periodic amplitude is expanded as V(xi) = sum_n v_n exp(i G_n . xi)
// with G_n = 2 pi n / lambda, so the full spatial Bloch function is
// W(xi) = sum_n v_n exp(i (k + G_n) . xi). Matrix entries therefore carry the
// shifted wavevectors k + G_n:
//
//   wave:        A_pn = (k + G_p) . a_{p-n} (k + G_n),   B_pn = b_{p-n}
//   schrodinger: H_pn = (k+G_p).(-a')_{p-n}(k+G_n) + i (b - b^*)_{p-n}.(k+G_n) - c_{p-n}
//
// The retained indices form a box of half-width cutoff centred on the lattice
// point nearest -k, so solves at k and k + G use the same wavevectors.

#include "hfh/medium.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace hfh {

struct BlochOperator {
  Family family;
  Eigen::VectorXd k;
  Cell cell;
  int cutoff;
  int components;
  std::vector<MultiIndex> basis;
  Eigen::MatrixXcd stiffness;
  Eigen::MatrixXcd mass;
  std::uint64_t medium_id;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return stiffness.rows(); }
  // k + G_n for plane wave p.
  Eigen::VectorXd wavevector(std::size_t p) const;
};

struct BlochMode {
  Family family;
  Eigen::VectorXd k;
  double omega;       // frequency (wave families) or energy (schrodinger)
  double eigenvalue;  // omega^2 for wave families, omega for schrodinger
  int band;           // 1-based
  Eigen::VectorXcd v0;
  std::vector<MultiIndex> basis;
  int components;
  Cell cell;
  double gap;
  double residual;
  std::uint64_t medium_id;

  std::size_t basis_size() const { return basis.size(); }
  cd coefficient(int component, std::size_t p) const {
    return v0(static_cast<Eigen::Index>(static_cast<std::size_t>(component) * basis.size() + p));
  }
  Eigen::VectorXd wavevector(std::size_t p) const;
  // W(xi) for one component.
  cd bloch_value(std::span<const double> xi, int component = 0) const;
  // |V0(xi)| = |W(xi)|.
  double amplitude(std::span<const double> xi, int component = 0) const {
    return std::abs(bloch_value(xi, component));
  }
};

BlochOperator assemble_wave_operator(const ScalarMedium& medium,
                                     const Eigen::VectorXd& k, int cutoff);
BlochOperator assemble_vector_operator(const VectorMedium& medium,
                                       const Eigen::VectorXd& k, int cutoff);
BlochOperator assemble_schrodinger_operator(const SchrodingerMedium& medium,
                                            const Eigen::VectorXd& k, int cutoff);
BlochOperator assemble_operator(const Medium& medium, const Eigen::VectorXd& k,
                                int cutoff);

std::vector<BlochMode> solve_bands(const BlochOperator& op, int n_bands);

// Solves and returns the requested 1-based band at k.
BlochMode solve_mode(const Medium& medium, const Eigen::VectorXd& k, int band,
                     int cutoff);

double default_gap_tol(double omega);
bool check_nondegenerate(const BlochMode& mode, double gap_tol);
bool check_nondegenerate(const BlochMode& mode);

// max |M - M^dagger|
double hermiticity_defect(const Eigen::MatrixXcd& m);

}  // namespace hfh
