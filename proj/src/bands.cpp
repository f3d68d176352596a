#include "hfh/bands.hpp"

#include "hfh/errors.hpp"
#include "hfh/io.hpp"
#include "hfh/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hfh {

namespace {

MatrixField negated(const MatrixField& m) {
  std::vector<FourierField> entries;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) entries.push_back(m(i, j) * cd{-1.0, 0.0});
  return MatrixField(m.rows(), m.cols(), std::move(entries));
}

double wave_speed_bound(const Medium& medium) {
  if (const auto* s = std::get_if<ScalarMedium>(&medium)) {
    const double a_max = -min_eigenvalue_on_grid(negated(s->a));
    const double b_min = min_eigenvalue_on_grid(MatrixField(1, 1, {s->b}));
    return std::sqrt(a_max / b_min);
  }
  if (const auto* v = std::get_if<VectorMedium>(&medium)) {
    const double a_max = -min_eigenvalue_on_grid(negated(v->a));
    const double b_min = min_eigenvalue_on_grid(v->b);
    return std::sqrt(a_max / b_min);
  }
  return std::numeric_limits<double>::infinity();
}

std::string describe_k(const Eigen::VectorXd& k) {
  std::ostringstream s;
  s << "(";
  for (Eigen::Index i = 0; i < k.size(); ++i) s << (i ? ", " : "") << fmt17(k(i));
  s << ")";
  return s.str();
}

}  // namespace

DispersionTable sweep_path(const Medium& medium, const Eigen::VectorXd& k_start,
                           const Eigen::VectorXd& k_end, int samples, int band,
                           int cutoff) {
  if (samples < 2) throw ValidationError("sweep: samples must be >= 2");
  if (band < 1) throw ValidationError("sweep: band must be >= 1");
  const int d = cell_of(medium).dims();
  if (k_start.size() != d || k_end.size() != d) {
    throw ValidationError("sweep: k endpoints must match the cell dimension");
  }

  std::vector<DispersionPoint> points(static_cast<std::size_t>(samples));
  parallel_for(points.size(), [&](std::size_t i) {
    const double t = static_cast<double>(i) / (samples - 1);
    const Eigen::VectorXd k = (1.0 - t) * k_start + t * k_end;
    const BlochMode mode = solve_mode(medium, k, band, cutoff);
    points[i] = DispersionPoint{k, mode.omega, mode.gap, !check_nondegenerate(mode)};
  });

  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double dk = (points[i + 1].k - points[i].k).norm();
    if (dk > 0.0) lip = std::max(lip, std::abs(points[i + 1].omega - points[i].omega) / dk);
  }
  return DispersionTable{family_of(medium), band, std::move(points), lip,
                         wave_speed_bound(medium)};
}

double default_fd_step(const Cell& cell) { return 1e-4 * (2.0 * kPi / cell.min_length()); }

GroupVelocityEstimate group_velocity_fd(const Medium& medium, const Eigen::VectorXd& k,
                                        int band, double h, int cutoff, double tol) {
  const Cell& cell = cell_of(medium);
  const int d = cell.dims();
  if (k.size() != d) throw ValidationError("group velocity: k must match the cell dimension");
  if (h <= 0.0) h = default_fd_step(cell);

  auto omega_at = [&](const Eigen::VectorXd& kp) {
    const BlochMode mode = solve_mode(medium, kp, band, cutoff);
    if (!check_nondegenerate(mode)) {
      throw NumericalError("group velocity: stencil point k = " + describe_k(kp) +
                           " is degenerate (gap " + fmt17(mode.gap) + ")");
    }
    return mode.omega;
  };

  omega_at(k);
  // Stencil order: axis-major, then (+h, -h, +h/2, -h/2).
  std::vector<Eigen::VectorXd> stencil;
  for (int j = 0; j < d; ++j) {
    for (double s : {h, -h, 0.5 * h, -0.5 * h}) {
      Eigen::VectorXd kp = k;
      kp(j) += s;
      stencil.push_back(kp);
    }
  }
  std::vector<double> omega(stencil.size());
  parallel_for(stencil.size(), [&](std::size_t i) { omega[i] = omega_at(stencil[i]); });

  GroupVelocityEstimate est{Eigen::VectorXd(d), Eigen::VectorXd(d), Eigen::VectorXd(d), h, 0.0};
  for (int j = 0; j < d; ++j) {
    const auto o = static_cast<std::size_t>(4 * j);
    est.coarse(j) = (omega[o] - omega[o + 1]) / (2.0 * h);
    est.fine(j) = (omega[o + 2] - omega[o + 3]) / h;
    est.velocity(j) = (4.0 * est.fine(j) - est.coarse(j)) / 3.0;
  }
  est.richardson_gap = (est.coarse - est.fine).cwiseAbs().maxCoeff();
  if (est.richardson_gap > tol) {
    throw NumericalError("group velocity: Richardson check failed at k = " + describe_k(k) +
                         " (|v(h) - v(h/2)| = " + fmt17(est.richardson_gap) + ")");
  }
  return est;
}

void write_dispersion_csv(std::ostream& out, const DispersionTable& table) {
  const auto d = table.points.empty() ? 0 : table.points.front().k.size();
  for (Eigen::Index i = 0; i < d; ++i) out << "k_" << (i + 1) << ",";
  out << "omega,band,gap\n";
  for (const auto& p : table.points) {
    for (Eigen::Index i = 0; i < d; ++i) out << fmt17(p.k(i)) << ",";
    out << fmt17(p.omega) << "," << table.band << ","
        << (std::isfinite(p.gap) ? fmt17(p.gap) : std::string("inf")) << "\n";
  }
}

}  // namespace hfh
