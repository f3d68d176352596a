#pragma once

// Direct fine-grid evolution of b(x/eps) u_tt = (a(x/eps) u_x)_x in 1D and
// envelope extraction for comparison with the homogenized transport speed.
//
// The packet is u = h(x) Ubar(x/eps) exp(i omega t / eps) with Ubar = conj(W),
// so the carrier is the decaying-phase Bloch wave V0(xi) exp(-i k xi).

#include "hfh/bloch.hpp"
#include "hfh/medium.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hfh {

struct EnvelopeSpec {
  enum class Kind { gaussian, constant } kind = Kind::gaussian;
  double center = 2.5;
  double width = 0.5;

  double value(double x) const;
  double derivative(double x) const;
};

struct GridSpec {
  double domain = 8.0;       // slow units; must hold a whole number of eps-cells
  int points_per_cell = 64;  // >= 16
};

inline constexpr int kMinPointsPerCell = 16;
inline constexpr double kMaxCfl = 0.9;
inline constexpr double kUnstableDrift = 1e-4;

struct WavePacketIC {
  double epsilon;
  Eigen::VectorXd k;
  double omega;
  int band;
  std::uint64_t medium_id;
  EnvelopeSpec envelope;
  double group_velocity;  // used in the transport correction of u_t
  bool transport_correction;
  double domain;
  int points_per_cell;
  int cells;
  double dx;
  Eigen::VectorXd x;
  Eigen::VectorXcd carrier;  // Ubar(x_j / eps)
  Eigen::VectorXd a_half;    // a at x_{j+1/2}
  Eigen::VectorXd b_node;    // b at x_j
  Eigen::VectorXcd u0;
  Eigen::VectorXcd ut0;
};

// group_velocity is supplied by the caller (effective or finite-difference value).
WavePacketIC build_wavepacket_ic(const BlochMode& mode, const ScalarMedium& medium, double epsilon,
                                 const EnvelopeSpec& envelope, const GridSpec& grid,
                                 double group_velocity, bool transport_correction = true);

struct EnvelopeFrame {
  double t;
  std::vector<double> x;       // eps-cell centers
  std::vector<double> abs_f0;  // |cell average of u / (Ubar e^{i omega t/eps})|
};

struct SimulationRecord {
  WavePacketIC ic;
  double dt;
  double cfl;
  long steps;
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> fields;
  std::vector<double> energy;
  double energy_drift;
  bool unstable;
  int masked_points;
  std::vector<EnvelopeFrame> envelope_frames;
  double measured_speed;
  double predicted_speed;
  double relative_error;
  double fit_residual;
};

// frames >= 2 snapshots are stored at evenly spaced steps including t = 0 and t_final.
SimulationRecord run_fdtd_1d(const WavePacketIC& ic, double t_final, double cfl, int frames = 41);

// One leapfrog-consistent energy; exposed for tests.
double discrete_energy(const WavePacketIC& ic, const Eigen::VectorXcd& u_next,
                       const Eigen::VectorXcd& u_now, double dt);

std::vector<EnvelopeFrame> extract_envelope(const SimulationRecord& record, const BlochMode& mode,
                                            double epsilon, int* masked_points = nullptr);

struct VelocityFit {
  double speed;
  double intercept;
  double residual;  // max |centroid - fit|
  std::vector<double> centroids;
};

VelocityFit measure_packet_velocity(const std::vector<EnvelopeFrame>& frames);

// Runs, extracts and measures; fills the envelope and speed fields.
SimulationRecord simulate_packet(const BlochMode& mode, const ScalarMedium& medium, double epsilon,
                                 const EnvelopeSpec& envelope, const GridSpec& grid,
                                 double group_velocity, double t_final, double cfl,
                                 bool transport_correction = true);

void write_frames_csv(std::ostream& out, const SimulationRecord& record);
void write_envelope_csv(std::ostream& out, const EnvelopeFrame& frame);

}  // namespace hfh
