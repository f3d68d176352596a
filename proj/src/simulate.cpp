#include "hfh/simulate.hpp"

#include "hfh/errors.hpp"
#include "hfh/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hfh {

namespace {

constexpr double kMaskFraction = 0.1;

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) < tol; }

// (a u_x)_x / b on the periodic staggered grid.
void apply_operator(const WavePacketIC& ic, const Eigen::VectorXcd& u, Eigen::VectorXcd& out) {
  const Eigen::Index n = u.size();
  const double inv_dx2 = 1.0 / (ic.dx * ic.dx);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp = j + 1 == n ? 0 : j + 1;
    const Eigen::Index jm = j == 0 ? n - 1 : j - 1;
    const cd flux_r = ic.a_half(j) * (u(jp) - u(j));
    const cd flux_l = ic.a_half(jm) * (u(j) - u(jm));
    out(j) = (flux_r - flux_l) * (inv_dx2 / ic.b_node(j));
  }
}

}  // namespace

double EnvelopeSpec::value(double x) const {
  if (kind == Kind::constant) return 1.0;
  const double s = (x - center) / width;
  return std::exp(-0.5 * s * s);
}

double EnvelopeSpec::derivative(double x) const {
  if (kind == Kind::constant) return 0.0;
  return -(x - center) / (width * width) * value(x);
}

WavePacketIC build_wavepacket_ic(const BlochMode& mode, const ScalarMedium& medium, double epsilon,
                                 const EnvelopeSpec& envelope, const GridSpec& grid,
                                 double group_velocity, bool transport_correction) {
  if (mode.family != Family::scalar_wave || mode.cell.dims() != 1) {
    throw UnsupportedError("simulate: only 1D scalar wave media are supported");
  }
  if (mode.medium_id != fingerprint(Medium{medium})) {
    throw ValidationError("simulate: mode was solved on a different medium");
  }
  if (!check_nondegenerate(mode)) throw ValidationError("simulate: mode is degenerate");
  if (!(epsilon > 0.0) || epsilon > 0.125) throw ValidationError("simulate: epsilon must lie in (0, 1/8]");
  if (grid.points_per_cell < kMinPointsPerCell) {
    std::ostringstream msg;
    msg << "simulate: grid too coarse; need at least " << kMinPointsPerCell
        << " points per cell (dx <= " << fmt17(epsilon * mode.cell.length(0) / kMinPointsPerCell) << ")";
    throw ValidationError(msg.str());
  }
  const double lambda = mode.cell.length(0);
  const double cells_real = grid.domain / (epsilon * lambda);
  if (!(grid.domain > 0.0) || !near_integer(cells_real, 1e-9 * std::max(1.0, cells_real))) {
    throw ValidationError("simulate: domain must hold a whole number of eps-cells");
  }
  const int cells = static_cast<int>(std::lround(cells_real));
  const double k = mode.k(0);
  if (envelope.kind == EnvelopeSpec::Kind::gaussian) {
    if (!(envelope.width > 0.0) || envelope.center - 4.0 * envelope.width < 0.0 ||
        envelope.center + 4.0 * envelope.width > grid.domain) {
      throw ValidationError("simulate: envelope must start at least 4 widths inside the domain");
    }
  } else if (!near_integer(k * cells * lambda / (2.0 * kPi), 1e-9)) {
    throw ValidationError("simulate: a constant envelope needs a carrier periodic on the domain");
  }

  const int p_cell = grid.points_per_cell;
  const auto n = static_cast<Eigen::Index>(cells) * p_cell;
  WavePacketIC ic{epsilon, mode.k, mode.omega, mode.band, mode.medium_id, envelope, group_velocity,
                  transport_correction, grid.domain, p_cell, cells, grid.domain / static_cast<double>(n),
                  Eigen::VectorXd(n), Eigen::VectorXcd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
                  Eigen::VectorXcd(n), Eigen::VectorXcd(n)};

  // One cell of samples, tiled with the Bloch phase of each cell.
  std::vector<cd> w_cell(static_cast<std::size_t>(p_cell));
  std::vector<double> a_cell(static_cast<std::size_t>(p_cell)), b_cell(static_cast<std::size_t>(p_cell));
  for (int p = 0; p < p_cell; ++p) {
    const double xi = p * lambda / p_cell;
    const double xi_half = (p + 0.5) * lambda / p_cell;
    const auto ps = static_cast<std::size_t>(p);
    w_cell[ps] = mode.bloch_value(std::span<const double>(&xi, 1));
    a_cell[ps] = medium.a(0, 0).value(std::span<const double>(&xi_half, 1)).real();
    b_cell[ps] = medium.b.value(std::span<const double>(&xi, 1)).real();
  }
  for (int c = 0; c < cells; ++c) {
    const cd bloch_phase = std::polar(1.0, -k * c * lambda);
    for (int p = 0; p < p_cell; ++p) {
      const Eigen::Index j = static_cast<Eigen::Index>(c) * p_cell + p;
      const auto ps = static_cast<std::size_t>(p);
      ic.x(j) = static_cast<double>(j) * ic.dx;
      ic.carrier(j) = std::conj(w_cell[ps]) * bloch_phase;
      ic.a_half(j) = a_cell[ps];
      ic.b_node(j) = b_cell[ps];
    }
  }
  if (ic.a_half.minCoeff() <= 0.0 || ic.b_node.minCoeff() <= 0.0) {
    throw ValidationError("simulate: sampled medium is not positive on the grid");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = envelope.value(ic.x(j));
    ic.u0(j) = h * ic.carrier(j);
    ic.ut0(j) = cd{0.0, mode.omega / epsilon} * ic.u0(j);
    if (transport_correction) ic.ut0(j) -= group_velocity * envelope.derivative(ic.x(j)) * ic.carrier(j);
  }
  return ic;
}

double discrete_energy(const WavePacketIC& ic, const Eigen::VectorXcd& u_next,
                       const Eigen::VectorXcd& u_now, double dt) {
  const Eigen::Index n = u_now.size();
  double kinetic = 0.0, potential = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp = j + 1 == n ? 0 : j + 1;
    kinetic += ic.b_node(j) * std::norm((u_next(j) - u_now(j)) / dt);
    const cd g_next = (u_next(jp) - u_next(j)) / ic.dx;
    const cd g_now = (u_now(jp) - u_now(j)) / ic.dx;
    potential += ic.a_half(j) * (g_next * std::conj(g_now)).real();
  }
  return (kinetic + potential) * ic.dx;
}

SimulationRecord run_fdtd_1d(const WavePacketIC& ic, double t_final, double cfl, int frames) {
  if (!(cfl > 0.0) || cfl > kMaxCfl) throw ValidationError("simulate: cfl must lie in (0, 0.9]");
  if (!(t_final > 0.0)) throw ValidationError("simulate: t_final must be positive");
  if (frames < 2) throw ValidationError("simulate: need at least two frames");
  if (ic.envelope.kind == EnvelopeSpec::Kind::gaussian) {
    const double end = ic.envelope.center + ic.group_velocity * t_final;
    if (end - 4.0 * ic.envelope.width < 0.0 || end + 4.0 * ic.envelope.width > ic.domain) {
      throw ValidationError("simulate: packet would leave the domain before t_final");
    }
  }

  const double c_max = std::sqrt(ic.a_half.maxCoeff() / ic.b_node.minCoeff());
  const long steps = std::max(1L, static_cast<long>(std::ceil(t_final * c_max / (cfl * ic.dx))));
  const double dt = t_final / static_cast<double>(steps);

  std::vector<long> frame_steps;
  for (int i = 0; i < frames; ++i) {
    frame_steps.push_back(std::lround(static_cast<double>(i) * steps / (frames - 1)));
  }

  SimulationRecord rec{ic, dt, cfl, steps, {}, {}, {}, 0.0, false, 0, {}, 0.0, 0.0, 0.0, 0.0};
  const Eigen::Index n = ic.u0.size();
  Eigen::VectorXcd acc(n);
  // Complex arithmetic with a real operator evolves the real and imaginary parts independently.
  Eigen::VectorXcd u_prev = ic.u0;
  apply_operator(ic, u_prev, acc);
  Eigen::VectorXcd u_cur = ic.u0 + dt * ic.ut0 + (0.5 * dt * dt) * acc;
  const double e_first = discrete_energy(ic, u_cur, u_prev, dt);

  std::size_t next_frame = 0;
  auto capture = [&](long step, const Eigen::VectorXcd& u, double energy) {
    while (next_frame < frame_steps.size() && frame_steps[next_frame] == step) {
      rec.times.push_back(static_cast<double>(step) * dt);
      rec.fields.push_back(u);
      rec.energy.push_back(energy);
      ++next_frame;
    }
  };
  capture(0, u_prev, e_first);

  Eigen::VectorXcd u_next(n);
  for (long step = 1; step <= steps; ++step) {
    if (next_frame < frame_steps.size() && frame_steps[next_frame] == step) {
      capture(step, u_cur, discrete_energy(ic, u_cur, u_prev, dt));
      if (!u_cur.allFinite()) {
        rec.unstable = true;
        break;
      }
    }
    if (step == steps) break;
    apply_operator(ic, u_cur, acc);
    u_next = 2.0 * u_cur - u_prev + (dt * dt) * acc;
    u_prev.swap(u_cur);
    u_cur.swap(u_next);
  }

  for (double e : rec.energy) {
    rec.energy_drift = std::max(rec.energy_drift, std::abs(e - e_first) / std::abs(e_first));
  }
  if (!std::isfinite(rec.energy_drift) || rec.energy_drift > kUnstableDrift) rec.unstable = true;
  return rec;
}

std::vector<EnvelopeFrame> extract_envelope(const SimulationRecord& record, const BlochMode& mode,
                                            double epsilon, int* masked_points) {
  const WavePacketIC& ic = record.ic;
  if (mode.medium_id != ic.medium_id || mode.k.size() != ic.k.size() ||
      (mode.k - ic.k).cwiseAbs().maxCoeff() > 1e-12 || std::abs(mode.omega - ic.omega) > 1e-12 ||
      std::abs(epsilon - ic.epsilon) > 1e-15) {
    throw ValidationError("envelope: mode or epsilon does not match the recorded carrier");
  }
  const Eigen::VectorXd amp = ic.carrier.cwiseAbs();
  const double threshold = kMaskFraction * amp.maxCoeff();
  int masked = 0;
  for (Eigen::Index j = 0; j < amp.size(); ++j) masked += amp(j) < threshold ? 1 : 0;
  if (masked_points != nullptr) *masked_points = masked;

  const double cell_width = ic.domain / ic.cells;
  std::vector<EnvelopeFrame> out;
  for (std::size_t f = 0; f < record.fields.size(); ++f) {
    const double t = record.times[f];
    const cd phase = std::polar(1.0, ic.omega * t / epsilon);
    EnvelopeFrame frame{t, {}, {}};
    for (int c = 0; c < ic.cells; ++c) {
      cd sum{0.0, 0.0};
      int count = 0;
      for (int p = 0; p < ic.points_per_cell; ++p) {
        const Eigen::Index j = static_cast<Eigen::Index>(c) * ic.points_per_cell + p;
        if (amp(j) < threshold) continue;
        sum += record.fields[f](j) / (ic.carrier(j) * phase);
        ++count;
      }
      frame.x.push_back((c + 0.5) * cell_width);
      frame.abs_f0.push_back(count > 0 ? std::abs(sum) / count : 0.0);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

VelocityFit measure_packet_velocity(const std::vector<EnvelopeFrame>& frames) {
  if (frames.size() < 5) throw ValidationError("velocity: need at least 5 frames");
  VelocityFit fit{0.0, 0.0, 0.0, {}};
  std::vector<double> t;
  for (const auto& fr : frames) {
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < fr.x.size(); ++i) {
      const double w = fr.abs_f0[i] * fr.abs_f0[i];
      mass += w;
      moment += w * fr.x[i];
    }
    if (!(mass > 0.0)) throw NumericalError("velocity: envelope mass vanished at t = " + fmt17(fr.t));
    const double lo = fr.x.front(), hi = fr.x.back();
    const double centroid = moment / mass;
    const double margin = 0.05 * (hi - lo);
    if (centroid < lo + margin || centroid > hi - margin) {
      throw NumericalError("velocity: centroid left the measurement window at t = " + fmt17(fr.t));
    }
    fit.centroids.push_back(centroid);
    t.push_back(fr.t);
  }
  const auto m = static_cast<double>(t.size());
  double st = 0, sx = 0, stt = 0, stx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sx += fit.centroids[i];
    stt += t[i] * t[i];
    stx += t[i] * fit.centroids[i];
  }
  fit.speed = (m * stx - st * sx) / (m * stt - st * st);
  fit.intercept = (sx - fit.speed * st) / m;
  for (std::size_t i = 0; i < t.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(fit.centroids[i] - (fit.intercept + fit.speed * t[i])));
  }
  return fit;
}

SimulationRecord simulate_packet(const BlochMode& mode, const ScalarMedium& medium, double epsilon,
                                 const EnvelopeSpec& envelope, const GridSpec& grid,
                                 double group_velocity, double t_final, double cfl,
                                 bool transport_correction) {
  const WavePacketIC ic =
      build_wavepacket_ic(mode, medium, epsilon, envelope, grid, group_velocity, transport_correction);
  SimulationRecord rec = run_fdtd_1d(ic, t_final, cfl);
  rec.envelope_frames = extract_envelope(rec, mode, epsilon, &rec.masked_points);
  const VelocityFit fit = measure_packet_velocity(rec.envelope_frames);
  rec.measured_speed = fit.speed;
  rec.predicted_speed = group_velocity;
  rec.relative_error = std::abs(fit.speed - group_velocity) / std::abs(group_velocity);
  rec.fit_residual = fit.residual;
  return rec;
}

void write_frames_csv(std::ostream& out, const SimulationRecord& record) {
  out << "t,centroid,mass,peak\n";
  for (const auto& fr : record.envelope_frames) {
    double mass = 0.0, moment = 0.0, peak = 0.0;
    const double width = fr.x.size() > 1 ? fr.x[1] - fr.x[0] : 1.0;
    for (std::size_t i = 0; i < fr.x.size(); ++i) {
      const double w = fr.abs_f0[i] * fr.abs_f0[i];
      mass += w * width;
      moment += w * width * fr.x[i];
      peak = std::max(peak, fr.abs_f0[i]);
    }
    out << fmt17(fr.t) << "," << fmt17(mass > 0.0 ? moment / mass : 0.0) << "," << fmt17(mass)
        << "," << fmt17(peak) << "\n";
  }
}

void write_envelope_csv(std::ostream& out, const EnvelopeFrame& frame) {
  out << "x,abs_f0\n";
  for (std::size_t i = 0; i < frame.x.size(); ++i) {
    out << fmt17(frame.x[i]) << "," << fmt17(frame.abs_f0[i]) << "\n";
  }
}

}  // namespace hfh
