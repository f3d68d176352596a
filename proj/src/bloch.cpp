#include "hfh/bloch.hpp"

#include "hfh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hfh {

namespace {

constexpr double kNegativeEigenTol = 1e-10;

// The box [-cutoff, cutoff]^d shifted to the lattice point nearest -k, so that
// k and k + G see the same set of wavevectors k + G_n.
std::vector<MultiIndex> plane_wave_basis(const Cell& cell, const Eigen::VectorXd& k, int cutoff) {
  MultiIndex centre;
  for (int i = 0; i < cell.dims(); ++i) {
    centre[i] = -static_cast<int>(std::lround(k(i) * cell.length(i) / (2.0 * kPi)));
  }
  const ModeSet modes(cell.dims(), cutoff);
  std::vector<MultiIndex> basis;
  basis.reserve(modes.size());
  for (std::size_t f = 0; f < modes.size(); ++f) basis.push_back(modes.at(f) + centre);
  return basis;
}

Eigen::MatrixXd shifted_wavevectors(const Cell& cell, const Eigen::VectorXd& k,
                                    const std::vector<MultiIndex>& basis) {
  Eigen::MatrixXd q(static_cast<Eigen::Index>(basis.size()), cell.dims());
  for (std::size_t p = 0; p < basis.size(); ++p) {
    q.row(static_cast<Eigen::Index>(p)) = (k + cell.reciprocal(basis[p])).transpose();
  }
  return q;
}

void check_k(const Cell& cell, const Eigen::VectorXd& k) {
  if (k.size() != cell.dims()) {
    throw ValidationError("wavevector dimension does not match the cell");
  }
  if (!k.allFinite()) throw ValidationError("wavevector must be finite");
}

void check_operator_cutoff(int cutoff, int medium_cutoff, std::vector<std::string>& warnings) {
  if (cutoff < 1) throw ValidationError("operator cutoff must be >= 1");
  if (medium_cutoff > cutoff) {
    std::ostringstream msg;
    msg << "medium cutoff " << medium_cutoff << " exceeds operator cutoff " << cutoff
        << "; medium modes beyond 2*" << cutoff << " are truncated";
    warnings.push_back(msg.str());
  }
}

cd conj_coefficient(const FourierField& f, const MultiIndex& n) {
  // Fourier coefficient of conj(f) at n.
  return std::conj(f[-n]);
}

// Copies the upper triangle onto the lower one so the pencil is Hermitian to the bit.
void mirror_upper(Eigen::MatrixXcd& m) {
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    m(p, p) = cd{m(p, p).real(), 0.0};
    for (Eigen::Index s = p + 1; s < m.cols(); ++s) m(s, p) = std::conj(m(p, s));
  }
}

}  // namespace

Eigen::VectorXd BlochOperator::wavevector(std::size_t p) const {
  return k + cell.reciprocal(basis[p]);
}

Eigen::VectorXd BlochMode::wavevector(std::size_t p) const {
  return k + cell.reciprocal(basis[p]);
}

cd BlochMode::bloch_value(std::span<const double> xi, int component) const {
  cd sum{0.0, 0.0};
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const Eigen::VectorXd q = wavevector(p);
    double phase = 0.0;
    for (int i = 0; i < cell.dims(); ++i) phase += q(i) * xi[static_cast<std::size_t>(i)];
    sum += coefficient(component, p) * std::polar(1.0, phase);
  }
  return sum;
}

BlochOperator assemble_wave_operator(const ScalarMedium& medium,
                                     const Eigen::VectorXd& k, int cutoff) {
  const Cell& cell = medium.b.cell();
  check_k(cell, k);
  std::vector<std::string> warnings;
  check_operator_cutoff(cutoff, std::max(medium.a.cutoff(), medium.b.cutoff()), warnings);

  const int d = cell.dims();
  auto basis = plane_wave_basis(cell, k, cutoff);
  const Eigen::MatrixXd q = shifted_wavevectors(cell, k, basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd a_mat(n, n);
  Eigen::MatrixXcd b_mat(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index s = 0; s < n; ++s) {
      const MultiIndex diff = basis[static_cast<std::size_t>(p)] - basis[static_cast<std::size_t>(s)];
      cd acc{0.0, 0.0};
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc += q(p, i) * medium.a(i, j)[diff] * q(s, j);
      a_mat(p, s) = acc;
      b_mat(p, s) = medium.b[diff];
    }
  }
  mirror_upper(a_mat);
  mirror_upper(b_mat);
  return BlochOperator{Family::scalar_wave, k, cell, cutoff, 1, std::move(basis),
                       std::move(a_mat), std::move(b_mat),
                       fingerprint(Medium{medium}), std::move(warnings)};
}

BlochOperator assemble_vector_operator(const VectorMedium& medium,
                                       const Eigen::VectorXd& k, int cutoff) {
  const Cell& cell = medium.b.cell();
  check_k(cell, k);
  std::vector<std::string> warnings;
  check_operator_cutoff(cutoff, std::max(medium.a.cutoff(), medium.b.cutoff()), warnings);

  const int d = cell.dims();
  const int nc = medium.components;
  auto basis = plane_wave_basis(cell, k, cutoff);
  const Eigen::MatrixXd q = shifted_wavevectors(cell, k, basis);
  const auto np = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index n = np * nc;
  Eigen::MatrixXcd a_mat = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd b_mat = Eigen::MatrixXcd::Zero(n, n);
  for (int ci = 0; ci < nc; ++ci)
    for (int ck = 0; ck < nc; ++ck)
      for (Eigen::Index p = 0; p < np; ++p)
        for (Eigen::Index s = 0; s < np; ++s) {
          const MultiIndex diff =
              basis[static_cast<std::size_t>(p)] - basis[static_cast<std::size_t>(s)];
          cd acc{0.0, 0.0};
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) {
              acc += q(p, j) * medium.a_ijkl(ci, j, ck, l)[diff] * q(s, l);
            }
          a_mat(ci * np + p, ck * np + s) = acc;
          b_mat(ci * np + p, ck * np + s) = medium.b(ci, ck)[diff];
        }
  mirror_upper(a_mat);
  mirror_upper(b_mat);
  return BlochOperator{Family::vector_wave, k, cell, cutoff, nc, std::move(basis),
                       std::move(a_mat), std::move(b_mat),
                       fingerprint(Medium{medium}), std::move(warnings)};
}

BlochOperator assemble_schrodinger_operator(const SchrodingerMedium& medium,
                                            const Eigen::VectorXd& k, int cutoff) {
  const Cell& cell = medium.potential.cell();
  check_k(cell, k);
  validate(medium);
  std::vector<std::string> warnings;
  check_operator_cutoff(cutoff, cutoff_of(Medium{medium}), warnings);

  const SchrodingerBlocks& blk = medium.blocks;
  const int d = cell.dims();
  for (int j = 0; j <= d; ++j) {
    if (blk.a_block(0, j) != 0.0 || blk.a_block(j, 0) != 0.0) {
      throw ValidationError("schrodinger: a block must have a vanishing time row");
    }
  }
  // The time slot of b - b^* must be a nonzero constant: it isolates omega.
  const FourierField& b0 = blk.b_block.front();
  for (std::size_t f = 0; f < b0.coefficients().size(); ++f) {
    if (b0.modes().at(f) != MultiIndex{} && b0.coefficients()[f] != cd{0.0, 0.0}) {
      throw ValidationError("schrodinger: time component of b must be constant");
    }
  }
  const cd beta = b0[MultiIndex{}] - std::conj(b0[MultiIndex{}]);
  const cd time_factor = cd{0.0, 1.0} * beta;
  if (std::abs(time_factor) == 0.0) {
    throw ValidationError("schrodinger: time component of b is real; no energy term");
  }

  auto basis = plane_wave_basis(cell, k, cutoff);
  const Eigen::MatrixXd q = shifted_wavevectors(cell, k, basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index s = 0; s < n; ++s) {
      const MultiIndex diff = basis[static_cast<std::size_t>(p)] - basis[static_cast<std::size_t>(s)];
      cd acc{0.0, 0.0};
      if (diff == MultiIndex{}) {
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) acc -= q(p, i) * blk.a_block(i + 1, j + 1) * q(s, j);
      }
      for (int j = 0; j < d; ++j) {
        const FourierField& bj = blk.b_block[static_cast<std::size_t>(j + 1)];
        const cd skew = bj[diff] - conj_coefficient(bj, diff);
        acc += cd{0.0, 1.0} * skew * q(s, j);
      }
      acc -= blk.c_block[diff];
      h(p, s) = acc / time_factor;
    }
  }
  Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  return BlochOperator{Family::schrodinger, k, cell, cutoff, 1, std::move(basis),
                       std::move(h), std::move(identity),
                       fingerprint(Medium{medium}), std::move(warnings)};
}

BlochOperator assemble_operator(const Medium& medium, const Eigen::VectorXd& k,
                                int cutoff) {
  if (const auto* s = std::get_if<ScalarMedium>(&medium)) return assemble_wave_operator(*s, k, cutoff);
  if (const auto* v = std::get_if<VectorMedium>(&medium)) return assemble_vector_operator(*v, k, cutoff);
  return assemble_schrodinger_operator(std::get<SchrodingerMedium>(medium), k, cutoff);
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<BlochMode> solve_bands(const BlochOperator& op, int n_bands) {
  if (op.family == Family::vector_wave && op.cell.dims() == 3) {
    throw UnsupportedError("3D vector eigensolves are not supported (assembly only)");
  }
  if (n_bands < 1 || n_bands > op.size()) {
    throw ValidationError("n_bands must lie in [1, basis size]");
  }

  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  if (op.family == Family::schrodinger) {
    const Eigen::MatrixXcd h = 0.5 * (op.stiffness + op.stiffness.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
      throw NumericalError("Hermitian eigensolver failed to converge");
    }
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
  } else {
    const Eigen::MatrixXcd a = 0.5 * (op.stiffness + op.stiffness.adjoint());
    const Eigen::MatrixXcd b = 0.5 * (op.mass + op.mass.adjoint());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, b);
    if (es.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bs(b, Eigen::EigenvaluesOnly);
      std::ostringstream msg;
      msg << "generalized eigensolver failed; mass matrix eigenvalue range ["
          << bs.eigenvalues().minCoeff() << ", " << bs.eigenvalues().maxCoeff() << "]";
      throw NumericalError(msg.str());
    }
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
    if (evals(0) < -kNegativeEigenTol) {
      std::ostringstream msg;
      msg << "ellipticity violation: negative eigenvalue " << evals(0);
      throw ValidationError(msg.str());
    }
  }

  const bool wave = op.family != Family::schrodinger;
  const Eigen::Index total = evals.size();
  Eigen::VectorXd freq(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    freq(i) = wave ? std::sqrt(std::max(evals(i), 0.0)) : evals(i);
  }

  std::vector<BlochMode> modes;
  modes.reserve(static_cast<std::size_t>(n_bands));
  for (int band = 0; band < n_bands; ++band) {
    Eigen::VectorXcd v = evecs.col(band);
    const double norm = std::sqrt(std::abs(v.dot(op.mass * v)));
    v /= norm;
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::conj(v(big)) / std::abs(v(big));
    v(big) = cd{v(big).real(), 0.0};

    double gap = std::numeric_limits<double>::infinity();
    if (band > 0) gap = std::min(gap, freq(band) - freq(band - 1));
    if (band + 1 < total) gap = std::min(gap, freq(band + 1) - freq(band));

    const double residual =
        (op.stiffness * v - evals(band) * (op.mass * v)).norm() / v.norm();
    modes.push_back(BlochMode{op.family, op.k, freq(band), evals(band), band + 1,
                              std::move(v), op.basis, op.components, op.cell, gap,
                              residual, op.medium_id});
  }
  return modes;
}

BlochMode solve_mode(const Medium& medium, const Eigen::VectorXd& k, int band,
                     int cutoff) {
  if (band < 1) throw ValidationError("band index must be >= 1");
  const BlochOperator op = assemble_operator(medium, k, cutoff);
  auto modes = solve_bands(op, std::min<int>(band + 1, static_cast<int>(op.size())));
  return modes[static_cast<std::size_t>(band - 1)];
}

double default_gap_tol(double omega) { return 1e-6 * std::max(1.0, std::abs(omega)); }

bool check_nondegenerate(const BlochMode& mode, double gap_tol) {
  return mode.gap > gap_tol;
}

bool check_nondegenerate(const BlochMode& mode) {
  return check_nondegenerate(mode, default_gap_tol(mode.omega));
}

}  // namespace hfh
