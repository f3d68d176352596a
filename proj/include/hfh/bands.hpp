#pragma once

#include "hfh/bloch.hpp"

#include <Eigen/Dense>

#include <ostream>
#include <vector>

namespace hfh {

struct DispersionPoint {
  Eigen::VectorXd k;
  double omega;
  double gap;
  bool degenerate;
};

struct DispersionTable {
  Family family;
  int band;
  std::vector<DispersionPoint> points;
  // Largest |omega(k_{i+1}) - omega(k_i)| / |k_{i+1} - k_i| along the path.
  double observed_lipschitz;
  // sqrt(max a / min b) for wave families, +inf for schrodinger.
  double lipschitz_bound;
};

DispersionTable sweep_path(const Medium& medium, const Eigen::VectorXd& k_start,
                           const Eigen::VectorXd& k_end, int samples, int band,
                           int cutoff);

// 1e-4 * 2 pi / lambda_min
double default_fd_step(const Cell& cell);

struct GroupVelocityEstimate {
  Eigen::VectorXd velocity;  // Richardson-extrapolated central difference
  Eigen::VectorXd coarse;    // step h
  Eigen::VectorXd fine;      // step h/2
  double step;
  double richardson_gap;     // max |coarse - fine|
};

inline constexpr double kRichardsonTol = 1e-6;

// Central differences of omega_band at k along each axis with steps h and h/2.
// Throws NumericalError if the two disagree by more than tol or if any stencil
// point is degenerate. h <= 0 selects default_fd_step.
GroupVelocityEstimate group_velocity_fd(const Medium& medium, const Eigen::VectorXd& k,
                                        int band, double h, int cutoff,
                                        double tol = kRichardsonTol);

// Header `k_1,...,k_d,omega,band,gap`.
void write_dispersion_csv(std::ostream& out, const DispersionTable& table);

}  // namespace hfh
