#include "hfh/effective.hpp"

#include "hfh/errors.hpp"
#include "hfh/io.hpp"
#include "hfh/parallel.hpp"
#include "hfh/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hfh {

namespace {

constexpr cd kI{0.0, 1.0};

struct Carrier {
  int sigma;
  Eigen::MatrixXcd u;  // components x plane waves
  Eigen::MatrixXd q;   // plane waves x d
  std::vector<MultiIndex> basis;
  double theta;
};

Carrier make_carrier(const BlochMode& mode) {
  const int sigma = mode.family == Family::schrodinger ? 1 : -1;
  const auto np = static_cast<Eigen::Index>(mode.basis_size());
  Carrier c{sigma, Eigen::MatrixXcd(mode.components, np), Eigen::MatrixXd(np, mode.cell.dims()),
            mode.basis, sigma < 0 ? mode.omega : -mode.omega};
  for (Eigen::Index p = 0; p < np; ++p) {
    const auto ps = static_cast<std::size_t>(p);
    for (int comp = 0; comp < mode.components; ++comp) {
      const cd v = mode.coefficient(comp, ps);
      c.u(comp, p) = sigma < 0 ? std::conj(v) : v;
    }
    c.q.row(p) = (sigma * mode.wavevector(ps)).transpose();
  }
  return c;
}

// Fourier index m with G_m = q_a - q_b inside one carrier.
MultiIndex diagonal_index(const Carrier& c, std::size_t a, std::size_t b) {
  const MultiIndex diff = c.basis[a] - c.basis[b];
  return c.sigma < 0 ? -diff : diff;
}

void check_mode(const BlochMode& mode, const Medium& medium, Family family) {
  if (mode.family != family) throw ValidationError("effective: mode family does not match the medium");
  if (mode.medium_id != fingerprint(medium)) {
    throw ValidationError("effective: mode was solved on a different medium");
  }
  if (!check_nondegenerate(mode)) {
    throw ValidationError("effective: mode is degenerate (gap " + fmt17(mode.gap) + ")");
  }
  if (family != Family::schrodinger && std::abs(mode.omega) < kMinOmega) {
    throw ValidationError("effective: |omega| < 1e-8; transport coefficients are undefined");
  }
}

EffectiveCoefficients finish(const BlochMode& mode, Eigen::VectorXcd d) {
  if (std::abs(d(0)) < kMinD0) {
    throw NumericalError("effective: |d_0| = " + fmt17(std::abs(d(0))) + " is below 1e-10");
  }
  const auto dims = d.size() - 1;
  Eigen::VectorXd v(dims);
  double imag = 0.0;
  for (Eigen::Index j = 0; j < dims; ++j) {
    const cd ratio = d(j + 1) / d(0);
    v(j) = ratio.real();
    imag = std::max(imag, std::abs(ratio.imag()));
  }
  return EffectiveCoefficients{mode.family, mode.k, mode.omega, mode.band, std::move(d), std::move(v), imag};
}

FourierField zero_field(const Cell& cell) { return FourierField(cell, 0); }

}  // namespace

SpacetimeMatrix build_spacetime_matrix(const Medium& medium) {
  const Cell& cell = cell_of(medium);
  const int d = cell.dims();
  if (const auto* s = std::get_if<ScalarMedium>(&medium)) {
    std::vector<FourierField> e;
    for (int i = 0; i <= d; ++i) {
      for (int j = 0; j <= d; ++j) {
        if (i == 0 && j == 0) e.push_back(s->b * cd{-1.0, 0.0});
        else if (i == 0 || j == 0) e.push_back(zero_field(cell));
        else e.push_back(s->a(i - 1, j - 1));
      }
    }
    return SpacetimeMatrix{Family::scalar_wave, 1, d, MatrixField(d + 1, d + 1, std::move(e))};
  }
  if (const auto* v = std::get_if<VectorMedium>(&medium)) {
    const int n = v->components;
    const int r = n * (d + 1);
    std::vector<FourierField> e;
    e.reserve(static_cast<std::size_t>(r * r));
    for (int row = 0; row < r; ++row) {
      for (int col = 0; col < r; ++col) {
        const int i = row / (d + 1), j = row % (d + 1);
        const int k = col / (d + 1), l = col % (d + 1);
        if (j == 0 && l == 0) e.push_back(v->b(i, k) * cd{-1.0, 0.0});
        else if (j == 0 || l == 0) e.push_back(zero_field(cell));
        else e.push_back(v->a_ijkl(i, j - 1, k, l - 1));
      }
    }
    return SpacetimeMatrix{Family::vector_wave, n, d, MatrixField(r, r, std::move(e))};
  }
  throw UnsupportedError("spacetime matrix: defined for the wave families only");
}

EffectiveCoefficients effective_coefficients_scalar(const BlochMode& mode,
                                                    const ScalarMedium& medium) {
  check_mode(mode, Medium{medium}, Family::scalar_wave);
  const Carrier c = make_carrier(mode);
  const int d = mode.cell.dims();
  const auto np = c.basis.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d + 1);
  for (std::size_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < np; ++b) {
      const MultiIndex m = diagonal_index(c, a, b);
      const cd w = std::conj(c.u(0, static_cast<Eigen::Index>(a))) * c.u(0, static_cast<Eigen::Index>(b));
      if (w == cd{0.0, 0.0}) continue;
      out(0) += w * medium.b[m];
      for (int j = 0; j < d; ++j) {
        cd acc{0.0, 0.0};
        for (int i = 0; i < d; ++i) {
          acc += medium.a(i, j)[m] * (c.q(static_cast<Eigen::Index>(a), i) + c.q(static_cast<Eigen::Index>(b), i));
        }
        out(j + 1) += w * acc;
      }
    }
  }
  out(0) *= -2.0 * kI * c.theta;
  out.tail(d) *= kI;
  return finish(mode, std::move(out));
}

EffectiveCoefficients effective_coefficients_vector(const BlochMode& mode,
                                                    const VectorMedium& medium) {
  check_mode(mode, Medium{medium}, Family::vector_wave);
  const Carrier c = make_carrier(mode);
  const int d = mode.cell.dims();
  const int nc = medium.components;
  const auto np = c.basis.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d + 1);
  for (std::size_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < np; ++b) {
      const MultiIndex m = diagonal_index(c, a, b);
      const auto ea = static_cast<Eigen::Index>(a), eb = static_cast<Eigen::Index>(b);
      for (int i = 0; i < nc; ++i) {
        for (int k = 0; k < nc; ++k) {
          const cd w = std::conj(c.u(i, ea)) * c.u(k, eb);
          if (w == cd{0.0, 0.0}) continue;
          out(0) += w * medium.b(i, k)[m];
          for (int l = 0; l < d; ++l) {
            cd acc{0.0, 0.0};
            for (int j = 0; j < d; ++j) {
              acc += medium.a_ijkl(i, j, k, l)[m] * c.q(ea, j) +
                     medium.a_ijkl(i, l, k, j)[m] * c.q(eb, j);
            }
            out(l + 1) += w * acc;
          }
        }
      }
    }
  }
  out(0) *= -2.0 * kI * c.theta;
  out.tail(d) *= kI;
  return finish(mode, std::move(out));
}

EffectiveCoefficients effective_coefficients_schrodinger(const BlochMode& mode,
                                                         const SchrodingerMedium& medium) {
  check_mode(mode, Medium{medium}, Family::schrodinger);
  const Carrier c = make_carrier(mode);
  const SchrodingerBlocks& blk = medium.blocks;
  const int d = mode.cell.dims();
  const auto np = c.basis.size();
  // Slot 0 is time; its "wavevector" is theta for every plane wave.
  auto q_slot = [&](Eigen::Index p, int i) { return i == 0 ? c.theta : c.q(p, i - 1); };
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d + 1);
  for (std::size_t a = 0; a < np; ++a) {
    for (std::size_t b = 0; b < np; ++b) {
      const auto ea = static_cast<Eigen::Index>(a), eb = static_cast<Eigen::Index>(b);
      const cd w = std::conj(c.u(0, ea)) * c.u(0, eb);
      if (w == cd{0.0, 0.0}) continue;
      const MultiIndex m = diagonal_index(c, a, b);
      for (int j = 0; j <= d; ++j) {
        cd acc{0.0, 0.0};
        // The a block is constant, so only the diagonal plane-wave pairs see it.
        if (a == b) {
          for (int i = 0; i <= d; ++i) acc += kI * blk.a_block(i, j) * (q_slot(ea, i) + q_slot(eb, i));
        }
        // Magnetic and time coupling (b_j - b_j^*) U.
        const FourierField& bj = blk.b_block[static_cast<std::size_t>(j)];
        acc += bj[m] - std::conj(bj[-m]);
        out(j) += w * acc;
      }
    }
  }
  return finish(mode, std::move(out));
}

EffectiveCoefficients effective_coefficients(const BlochMode& mode, const Medium& medium) {
  if (const auto* s = std::get_if<ScalarMedium>(&medium)) return effective_coefficients_scalar(mode, *s);
  if (const auto* v = std::get_if<VectorMedium>(&medium)) return effective_coefficients_vector(mode, *v);
  return effective_coefficients_schrodinger(mode, std::get<SchrodingerMedium>(medium));
}

EnvelopeEquation envelope_equation(const EffectiveCoefficients& coeffs) {
  if (coeffs.d.size() == 0 || std::abs(coeffs.d(0)) < kMinD0) {
    throw NumericalError("envelope: |d_0| is below 1e-10");
  }
  const auto dims = coeffs.v.size();
  EnvelopeEquation eq;
  eq.coefficients.resize(dims + 1);
  eq.coefficients(0) = 1.0;
  eq.coefficients.tail(dims) = coeffs.v;
  eq.velocity = coeffs.v;
  const double norm = coeffs.v.norm();
  eq.speed = dims == 1 ? coeffs.v(0) : norm;
  if (norm > 0.0) {
    eq.direction = dims == 1 ? Eigen::VectorXd::Ones(1) : Eigen::VectorXd(coeffs.v / norm);
    eq.slowness = coeffs.v / (norm * norm);
  } else {
    eq.direction = Eigen::VectorXd::Zero(dims);
    eq.slowness = Eigen::VectorXd::Constant(dims, std::numeric_limits<double>::infinity());
  }
  return eq;
}

// --- coupling -------------------------------------------------------------

namespace {

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) < tol; }

bool lattice_shift(const Eigen::VectorXd& k, const Eigen::VectorXd& m, const Cell& cell) {
  if (k.size() != m.size()) return false;
  for (int i = 0; i < cell.dims(); ++i) {
    if (!near_integer((k(i) - m(i)) * cell.length(i) / (2.0 * kPi), kResonanceTol)) return false;
  }
  return true;
}

struct Term {
  MultiIndex m;
  Eigen::VectorXd g;
  cd b;
  Eigen::MatrixXcd a;
};

std::vector<Term> medium_terms(const ScalarMedium& medium) {
  const Cell& cell = medium.b.cell();
  const int d = cell.dims();
  const ModeSet modes(d, std::max(medium.a.cutoff(), medium.b.cutoff()));
  std::vector<Term> terms;
  for (std::size_t f = 0; f < modes.size(); ++f) {
    const MultiIndex m = modes.at(f);
    Term t{m, cell.reciprocal(m), medium.b[m], Eigen::MatrixXcd(d, d)};
    bool any = t.b != cd{0.0, 0.0};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        t.a(i, j) = medium.a(i, j)[m];
        any = any || t.a(i, j) != cd{0.0, 0.0};
      }
    if (any) terms.push_back(std::move(t));
  }
  return terms;
}

// Average over [0, T n] x n Lambda of conj(U_x) (2 C_ij d_i U_y + d_i C_ij U_y).
// With n = 0 the analytic limit is returned instead: only phase-free terms survive.
Eigen::VectorXcd pair_average(const Carrier& x, const Carrier& y, const std::vector<Term>& terms,
                              const Cell& cell, int n, double window) {
  const int d = cell.dims();
  const double dtheta = y.theta - x.theta;
  const bool limit = n == 0;
  const double scale = std::max({1.0, std::abs(x.theta), std::abs(y.theta)});
  cd time;
  if (limit) {
    time = std::abs(dtheta) < kResonanceTol * scale ? cd{1.0, 0.0} : cd{0.0, 0.0};
  } else {
    time = window_mean(dtheta * window * n);
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d + 1);
  if (time == cd{0.0, 0.0}) return out;
  for (Eigen::Index a = 0; a < x.q.rows(); ++a) {
    const cd ua = std::conj(x.u(0, a));
    if (ua == cd{0.0, 0.0}) continue;
    for (Eigen::Index b = 0; b < y.q.rows(); ++b) {
      const cd w = ua * y.u(0, b);
      if (w == cd{0.0, 0.0}) continue;
      for (const Term& t : terms) {
        cd box{1.0, 0.0};
        for (int i = 0; i < d && box != cd{0.0, 0.0}; ++i) {
          const double kappa = y.q(b, i) + t.g(i) - x.q(a, i);
          if (limit) {
            if (std::abs(kappa * cell.length(i) / (2.0 * kPi)) >= kResonanceTol) box = 0.0;
          } else {
            box *= window_mean(kappa * n * cell.length(i));
          }
        }
        if (box == cd{0.0, 0.0}) continue;
        const cd f = w * box;
        out(0) += f * (-2.0 * kI * y.theta) * t.b;
        for (int j = 0; j < d; ++j) {
          cd acc{0.0, 0.0};
          for (int i = 0; i < d; ++i) acc += t.a(i, j) * (2.0 * y.q(b, i) + t.g(i));
          out(j + 1) += f * kI * acc;
        }
      }
    }
  }
  return out * time;
}

double fit_slope(const std::vector<double>& n, const std::vector<double>& value) {
  const auto count = static_cast<double>(n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double lx = std::log(n[i]), ly = std::log(value[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

// Relative distance of W2 from the line through W1, matching plane waves by wavevector.
double scalar_multiple_defect(const BlochMode& m1, const BlochMode& m2) {
  const Cell& cell = m1.cell;
  MultiIndex shift;
  for (int i = 0; i < cell.dims(); ++i) {
    shift[i] = static_cast<int>(std::lround((m2.k(i) - m1.k(i)) * cell.length(i) / (2.0 * kPi)));
  }
  cd overlap{0.0, 0.0};
  double w1_norm = 0.0, w2_norm = 0.0;
  std::vector<std::pair<cd, cd>> pairs;
  for (std::size_t b = 0; b < m2.basis_size(); ++b) {
    const cd w2 = m2.coefficient(0, b);
    w2_norm += std::norm(w2);
    cd w1{0.0, 0.0};
    const MultiIndex target = m2.basis[b] + shift;
    for (std::size_t a = 0; a < m1.basis_size(); ++a) {
      if (m1.basis[a] == target) {
        w1 = m1.coefficient(0, a);
        break;
      }
    }
    pairs.emplace_back(w1, w2);
    overlap += std::conj(w1) * w2;
    w1_norm += std::norm(w1);
  }
  if (w1_norm == 0.0 || w2_norm == 0.0) return 1.0;
  const cd c = overlap / w1_norm;
  double residual = 0.0;
  for (const auto& [w1, w2] : pairs) residual += std::norm(w2 - c * w1);
  return std::sqrt(residual / w2_norm);
}

}  // namespace

bool are_equivalent(const BlochMode& m1, const BlochMode& m2) {
  return std::abs(m1.omega - m2.omega) < kResonanceTol && m1.cell == m2.cell &&
         lattice_shift(m1.k, m2.k, m1.cell);
}

double CouplingReport::max_cross_limit() const {
  double worst = 0.0;
  for (const auto& s : series)
    if (s.l != s.p) worst = std::max(worst, std::abs(s.limit));
  return worst;
}

double CouplingReport::worst_cross_slope() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    if (s.l != s.p && !s.vanishing) worst = std::max(worst, s.slope);
  return worst;
}

Eigen::MatrixXcd supercell_average(const BlochMode& mode1, const BlochMode& mode2,
                                   const ScalarMedium& medium, int n, double time_window) {
  if (mode1.family != Family::scalar_wave || mode2.family != Family::scalar_wave) {
    throw UnsupportedError("coupling: only the scalar wave family is supported");
  }
  const Carrier c[2] = {make_carrier(mode1), make_carrier(mode2)};
  const auto terms = medium_terms(medium);
  const int d = mode1.cell.dims();
  // Column (p - 1) * 2 + (l - 1).
  Eigen::MatrixXcd out(d + 1, 4);
  for (int p = 0; p < 2; ++p)
    for (int l = 0; l < 2; ++l)
      out.col(p * 2 + l) = pair_average(c[p], c[l], terms, mode1.cell, n, time_window);
  return out;
}

CouplingReport coupling_coefficients(const BlochMode& mode1, const BlochMode& mode2,
                                     const Medium& medium,
                                     const std::vector<int>& supercell_counts,
                                     double time_window) {
  const auto* scalar = std::get_if<ScalarMedium>(&medium);
  if (scalar == nullptr) throw UnsupportedError("coupling: only the scalar wave family is supported");
  const std::uint64_t id = fingerprint(medium);
  if (mode1.medium_id != id || mode2.medium_id != id) {
    throw ValidationError("coupling: modes were solved on different media");
  }
  if (supercell_counts.size() < 2) throw ValidationError("coupling: need at least two supercells");
  for (std::size_t i = 0; i < supercell_counts.size(); ++i) {
    if (supercell_counts[i] < 1 || (i > 0 && supercell_counts[i] <= supercell_counts[i - 1])) {
      throw ValidationError("coupling: supercell counts must be positive and increasing");
    }
  }
  if (time_window <= 0.0) {
    time_window = 2.0 * kPi / std::max({std::abs(mode1.omega), std::abs(mode2.omega), 1.0});
  }

  const int d = mode1.cell.dims();
  const bool resonant = are_equivalent(mode1, mode2);
  const double defect = resonant ? scalar_multiple_defect(mode1, mode2)
                                 : std::numeric_limits<double>::quiet_NaN();
  CouplingReport report{mode1.k, mode1.omega, mode1.band, mode2.k, mode2.omega, mode2.band,
                        time_window, resonant, resonant, defect, {}, {}};

  std::vector<Eigen::MatrixXcd> averages(supercell_counts.size());
  parallel_for(averages.size(), [&](std::size_t i) {
    averages[i] = supercell_average(mode1, mode2, *scalar, supercell_counts[i], time_window);
  });
  const Eigen::MatrixXcd limit = supercell_average(mode1, mode2, *scalar, 0, time_window);

  double scale = 1.0;
  for (const auto& avg : averages) scale = std::max(scale, avg.cwiseAbs().maxCoeff());

  for (std::size_t i = 0; i < averages.size(); ++i)
    for (int j = 0; j <= d; ++j)
      for (int p = 1; p <= 2; ++p)
        for (int l = 1; l <= 2; ++l)
          report.entries.push_back({supercell_counts[i], j, p, l, averages[i](j, (p - 1) * 2 + (l - 1))});

  std::vector<double> ns;
  for (int n : supercell_counts) ns.push_back(n);
  for (int j = 0; j <= d; ++j)
    for (int p = 1; p <= 2; ++p)
      for (int l = 1; l <= 2; ++l) {
        const Eigen::Index col = (p - 1) * 2 + (l - 1);
        std::vector<double> mags;
        double biggest = 0.0;
        for (const auto& avg : averages) {
          mags.push_back(std::abs(avg(j, col)));
          biggest = std::max(biggest, mags.back());
        }
        const bool vanishing = biggest < 1e-12 * scale;
        bool positive = true;
        for (double v : mags) positive = positive && v > 0.0;
        const double slope = vanishing || !positive ? -std::numeric_limits<double>::infinity()
                                                    : fit_slope(ns, mags);
        report.series.push_back({j, p, l, limit(j, col), slope, vanishing});
      }
  return report;
}

void write_effective_csv(std::ostream& out, const EffectiveCoefficients& coeffs) {
  out << "j,re_d,im_d,v\n";
  for (Eigen::Index j = 0; j < coeffs.d.size(); ++j) {
    const double v = j == 0 ? 1.0 : coeffs.v(j - 1);
    out << j << "," << fmt17(coeffs.d(j).real()) << "," << fmt17(coeffs.d(j).imag()) << ","
        << fmt17(v) << "\n";
  }
}

void write_coupling_csv(std::ostream& out, const CouplingReport& report) {
  out << "n,j,p,l,re_avg,im_avg,abs_avg\n";
  for (const auto& e : report.entries) {
    out << e.n << "," << e.j << "," << e.p << "," << e.l << "," << fmt17(e.average.real()) << ","
        << fmt17(e.average.imag()) << "," << fmt17(std::abs(e.average)) << "\n";
  }
}

}  // namespace hfh
