#pragma once

// Homogenized transport coefficients and cross-wave coupling averages.
//
// Every cell integral is a finite sum over Fourier coefficients. Modes are
// written in "carrier" form U(xi0, xi') = sum_n u_n exp(i q_n . xi') exp(i theta xi0)
// with q_n = sigma (k + G_n). The wave families use the conjugated Bloch
// function (sigma = -1, u_n = conj(v_n), theta = +omega); the Schrodinger
// family uses the Bloch function itself (sigma = +1, theta = -E).

#include "hfh/bloch.hpp"
#include "hfh/medium.hpp"

#include <Eigen/Dense>

#include <ostream>
#include <vector>

namespace hfh {

// Scalar: (d+1) x (d+1) with C_00 = -b and the spatial block a.
// Vector: (n(d+1)) x (n(d+1)) with row (i,j) -> i (d+1) + j.
struct SpacetimeMatrix {
  Family family;
  int components;
  int dims;
  MatrixField entries;

  const FourierField& c(int i, int j) const { return entries(i, j); }
  const FourierField& c(int i, int j, int k, int l) const {
    return entries(i * (dims + 1) + j, k * (dims + 1) + l);
  }
};

SpacetimeMatrix build_spacetime_matrix(const Medium& medium);

struct EffectiveCoefficients {
  Family family;
  Eigen::VectorXd k;
  double omega;
  int band;
  Eigen::VectorXcd d;  // d_0 ... d_d
  Eigen::VectorXd v;   // Re(d_j / d_0)
  double max_imag_ratio;
};

inline constexpr double kMinOmega = 1e-8;
inline constexpr double kMinD0 = 1e-10;

EffectiveCoefficients effective_coefficients_scalar(const BlochMode& mode,
                                                    const ScalarMedium& medium);
EffectiveCoefficients effective_coefficients_vector(const BlochMode& mode,
                                                    const VectorMedium& medium);
EffectiveCoefficients effective_coefficients_schrodinger(const BlochMode& mode,
                                                         const SchrodingerMedium& medium);
EffectiveCoefficients effective_coefficients(const BlochMode& mode, const Medium& medium);

// Transport PDE f_t + v . grad f = 0 with solutions h(s . x - t), s . v = 1.
struct EnvelopeEquation {
  Eigen::VectorXd coefficients;  // (1, v_1, ..., v_d)
  Eigen::VectorXd velocity;
  double speed;                  // signed in 1D, |v| otherwise
  Eigen::VectorXd direction;
  Eigen::VectorXd slowness;
};

EnvelopeEquation envelope_equation(const EffectiveCoefficients& coeffs);

// --- coupling -------------------------------------------------------------

inline constexpr double kResonanceTol = 1e-9;

bool are_equivalent(const BlochMode& m1, const BlochMode& m2);

struct CouplingEntry {
  int n;
  int j;
  int p;  // 1-based, the conjugated mode
  int l;  // 1-based
  cd average;
};

struct CouplingSeries {
  int j;
  int p;
  int l;
  cd limit;
  double slope;     // log-log decay slope; -inf when the series vanishes identically
  bool vanishing;
};

struct CouplingReport {
  Eigen::VectorXd k;
  double omega1;
  int band1;
  Eigen::VectorXd m;
  double omega2;
  int band2;
  double time_window;
  bool resonant;
  bool equivalent;
  // min_c |W2 - c W1| / |W2| over matching wavevectors; NaN unless resonant.
  double multiple_defect;
  std::vector<CouplingEntry> entries;  // ordered by (n, j, p, l)
  std::vector<CouplingSeries> series;  // ordered by (j, p, l)

  // Largest |limit| over cross terms l != p.
  double max_cross_limit() const;
  // Largest (least negative) slope over non-vanishing cross terms.
  double worst_cross_slope() const;
};

// time_window <= 0 selects 2 pi / max(omega1, omega2, 1).
CouplingReport coupling_coefficients(const BlochMode& mode1, const BlochMode& mode2,
                                     const Medium& medium,
                                     const std::vector<int>& supercell_counts,
                                     double time_window = 0.0);

// Average of the coefficient integrand over [0, T n] x n Lambda.
Eigen::MatrixXcd supercell_average(const BlochMode& mode1, const BlochMode& mode2,
                                   const ScalarMedium& medium, int n, double time_window);

void write_effective_csv(std::ostream& out, const EffectiveCoefficients& coeffs);
void write_coupling_csv(std::ostream& out, const CouplingReport& report);

}  // namespace hfh
