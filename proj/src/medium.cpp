#include "hfh/medium.hpp"

#include "hfh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace hfh {

namespace {

constexpr double kPositivityTol = 1e-10;
constexpr double kRealTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Applies a dense (out x in) matrix along one axis of a row-major tensor.
std::vector<cd> transform_axis(const std::vector<cd>& in,
                               std::vector<std::size_t>& shape, int axis,
                               const Eigen::MatrixXcd& op) {
  const auto a = static_cast<std::size_t>(axis);
  std::size_t outer = 1;
  for (std::size_t i = 0; i < a; ++i) outer *= shape[i];
  std::size_t inner = 1;
  for (std::size_t i = a + 1; i < shape.size(); ++i) inner *= shape[i];
  const auto n_in = static_cast<std::size_t>(op.cols());
  const auto n_out = static_cast<std::size_t>(op.rows());

  std::vector<cd> out(outer * n_out * inner, cd{0.0, 0.0});
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < n_out; ++r) {
      cd* dst = &out[(o * n_out + r) * inner];
      for (std::size_t c = 0; c < n_in; ++c) {
        const cd w = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        const cd* src = &in[(o * n_in + c) * inner];
        for (std::size_t t = 0; t < inner; ++t) dst[t] += w * src[t];
      }
    }
  }
  shape[a] = n_out;
  return out;
}

Eigen::MatrixXd expand_value(const Eigen::MatrixXd& v, int rows, int cols,
                             const char* what) {
  if (v.rows() == rows && v.cols() == cols) return v;
  if (v.rows() == 1 && v.cols() == 1 && rows == cols) {
    return v(0, 0) * Eigen::MatrixXd::Identity(rows, cols);
  }
  std::ostringstream msg;
  msg << what << ": expected a " << rows << "x" << cols
      << " value (or a scalar for an isotropic field), got " << v.rows() << "x"
      << v.cols();
  throw ValidationError(msg.str());
}

Eigen::MatrixXcd expand_value(const Eigen::MatrixXcd& v, int rows, int cols,
                              const char* what) {
  if (v.rows() == rows && v.cols() == cols) return v;
  if (v.rows() == 1 && v.cols() == 1 && rows == cols) {
    return v(0, 0) * Eigen::MatrixXcd::Identity(rows, cols);
  }
  std::ostringstream msg;
  msg << what << ": expected a " << rows << "x" << cols << " value, got "
      << v.rows() << "x" << v.cols();
  throw ValidationError(msg.str());
}

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) {
        std::ostringstream msg;
        msg << what << ": matrix value is not symmetric (entry " << i << "," << j
            << ")";
        throw ValidationError(msg.str());
      }
}

void require_real_fields(const MatrixField& f, const char* what) {
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j)
      if (!f(i, j).is_conjugate_symmetric(kRealTol)) {
        std::ostringstream msg;
        msg << what << "(" << i << "," << j
            << ") is not real: Fourier data violate c_{-n} = conj(c_n)";
        throw ValidationError(msg.str());
      }
}

bool regions_overlap(const Region& r, const Region& s) {
  for (std::size_t i = 0; i < r.lo.size(); ++i) {
    if (std::min(r.hi[i], s.hi[i]) <= std::max(r.lo[i], s.lo[i])) return false;
  }
  return true;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void hash_field(std::uint64_t& h, const FourierField& f) {
  const int cutoff = f.cutoff();
  hash_bytes(h, &cutoff, sizeof cutoff);
  for (const cd& c : f.coefficients()) {
    const double re = c.real() == 0.0 ? 0.0 : c.real();
    const double im = c.imag() == 0.0 ? 0.0 : c.imag();
    hash_bytes(h, &re, sizeof re);
    hash_bytes(h, &im, sizeof im);
  }
}

void hash_matrix(std::uint64_t& h, const MatrixField& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) hash_field(h, m(i, j));
}

}  // namespace

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r;
  for (int i = 0; i < kMaxDims; ++i) r[i] = a[i] - b[i];
  return r;
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex r;
  for (int i = 0; i < kMaxDims; ++i) r[i] = a[i] + b[i];
  return r;
}

MultiIndex operator-(const MultiIndex& a) {
  MultiIndex r;
  for (int i = 0; i < kMaxDims; ++i) r[i] = -a[i];
  return r;
}

// --- Cell -------------------------------------------------------------------

Cell::Cell(std::vector<double> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty() || lengths_.size() > static_cast<std::size_t>(kMaxDims)) {
    throw ValidationError("cell: dimension must be 1, 2 or 3");
  }
  for (double l : lengths_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ValidationError("cell: every side length must be finite and > 0");
    }
  }
}

double Cell::volume() const {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

double Cell::min_length() const {
  return *std::min_element(lengths_.begin(), lengths_.end());
}

double Cell::reciprocal(int axis, int n) const {
  return 2.0 * kPi * n / length(axis);
}

Eigen::VectorXd Cell::reciprocal(const MultiIndex& n) const {
  Eigen::VectorXd g(dims());
  for (int i = 0; i < dims(); ++i) g(i) = reciprocal(i, n[i]);
  return g;
}

// --- ModeSet ----------------------------------------------------------------

ModeSet::ModeSet(int dims, int cutoff)
    : dims_(dims),
      cutoff_(cutoff),
      size_(ipow(static_cast<std::size_t>(2 * cutoff + 1), dims)) {
  if (cutoff < 0) throw ValidationError("cutoff must be >= 0");
}

MultiIndex ModeSet::at(std::size_t flat) const {
  MultiIndex n;
  const auto width = static_cast<std::size_t>(2 * cutoff_ + 1);
  for (int axis = dims_ - 1; axis >= 0; --axis) {
    n[axis] = static_cast<int>(flat % width) - cutoff_;
    flat /= width;
  }
  return n;
}

std::ptrdiff_t ModeSet::flat(const MultiIndex& n) const {
  const std::ptrdiff_t width = 2 * cutoff_ + 1;
  std::ptrdiff_t f = 0;
  for (int axis = 0; axis < dims_; ++axis) {
    if (n[axis] < -cutoff_ || n[axis] > cutoff_) return -1;
    f = f * width + (n[axis] + cutoff_);
  }
  for (int axis = dims_; axis < kMaxDims; ++axis)
    if (n[axis] != 0) return -1;
  return f;
}

// --- FourierField -----------------------------------------------------------

FourierField::FourierField(Cell cell, int cutoff)
    : cell_(std::move(cell)),
      modes_(cell_.dims(), cutoff),
      coeffs_(modes_.size(), cd{0.0, 0.0}) {}

FourierField::FourierField(Cell cell, int cutoff, std::vector<cd> coefficients)
    : cell_(std::move(cell)),
      modes_(cell_.dims(), cutoff),
      coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != modes_.size()) {
    throw ValidationError("fourier field: coefficient count does not match cutoff");
  }
}

FourierField FourierField::constant(const Cell& cell, cd value, int cutoff) {
  FourierField f(cell, cutoff);
  MultiIndex zero;
  f.coeffs_[static_cast<std::size_t>(f.modes_.flat(zero))] = value;
  return f;
}

cd FourierField::operator[](const MultiIndex& n) const {
  const auto f = modes_.flat(n);
  return f < 0 ? cd{0.0, 0.0} : coeffs_[static_cast<std::size_t>(f)];
}

cd FourierField::value(std::span<const double> xi) const {
  cd sum{0.0, 0.0};
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    if (coeffs_[f] == cd{0.0, 0.0}) continue;
    const MultiIndex n = modes_.at(f);
    double phase = 0.0;
    for (int i = 0; i < dims(); ++i) phase += cell_.reciprocal(i, n[i]) * xi[static_cast<std::size_t>(i)];
    sum += coeffs_[f] * std::polar(1.0, phase);
  }
  return sum;
}

FourierField FourierField::derivative(int axis) const {
  std::vector<cd> out(coeffs_.size());
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    const MultiIndex n = modes_.at(f);
    out[f] = coeffs_[f] * cd{0.0, cell_.reciprocal(axis, n[axis])};
  }
  return FourierField(cell_, cutoff(), std::move(out));
}

FourierField FourierField::with_cutoff(int new_cutoff) const {
  FourierField out(cell_, new_cutoff);
  for (std::size_t f = 0; f < out.coeffs_.size(); ++f) {
    out.coeffs_[f] = (*this)[out.modes_.at(f)];
  }
  return out;
}

bool FourierField::is_conjugate_symmetric(double tol) const {
  const double scale = std::max(1.0, max_abs());
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    const cd mirror = coeffs_[coeffs_.size() - 1 - f];
    if (std::abs(mirror - std::conj(coeffs_[f])) > tol * scale) return false;
  }
  return true;
}

bool FourierField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cd& c) { return c == cd{0.0, 0.0}; });
}

double FourierField::max_abs() const {
  double m = 0.0;
  for (const cd& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

FourierField FourierField::operator+(const FourierField& other) const {
  if (!(cell_ == other.cell_)) throw ValidationError("fourier field: cell mismatch");
  const int n = std::max(cutoff(), other.cutoff());
  FourierField out(cell_, n);
  for (std::size_t f = 0; f < out.coeffs_.size(); ++f) {
    const MultiIndex idx = out.modes_.at(f);
    out.coeffs_[f] = (*this)[idx] + other[idx];
  }
  return out;
}

FourierField FourierField::operator*(cd scale) const {
  FourierField out = *this;
  for (cd& c : out.coeffs_) c *= scale;
  return out;
}

// --- MatrixField ------------------------------------------------------------

MatrixField::MatrixField(int rows, int cols, std::vector<FourierField> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows <= 0 || cols <= 0 ||
      entries_.size() != static_cast<std::size_t>(rows * cols)) {
    throw ValidationError("matrix field: entry count does not match shape");
  }
  for (const auto& e : entries_) {
    if (!(e.cell() == entries_.front().cell())) {
      throw ValidationError("matrix field: entries live on different cells");
    }
  }
}

int MatrixField::cutoff() const {
  int c = 0;
  for (const auto& e : entries_) c = std::max(c, e.cutoff());
  return c;
}

Eigen::MatrixXcd MatrixField::value(std::span<const double> xi) const {
  Eigen::MatrixXcd m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).value(xi);
  return m;
}

bool MatrixField::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i) {
    for (int j = i + 1; j < cols_; ++j) {
      const auto& x = (*this)(i, j);
      const auto& y = (*this)(j, i);
      const int n = std::max(x.cutoff(), y.cutoff());
      const ModeSet modes(x.dims(), n);
      for (std::size_t f = 0; f < modes.size(); ++f) {
        const MultiIndex idx = modes.at(f);
        if (x[idx] != y[idx]) return false;
      }
    }
  }
  return true;
}

// --- families and media -----------------------------------------------------

std::string_view to_string(Family family) {
  switch (family) {
    case Family::scalar_wave: return "scalar";
    case Family::vector_wave: return "vector";
    case Family::schrodinger: return "schrodinger";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "scalar") return Family::scalar_wave;
  if (name == "vector") return Family::vector_wave;
  if (name == "schrodinger") return Family::schrodinger;
  throw ValidationError("unknown equation family '" + std::string(name) +
                        "' (expected scalar, vector or schrodinger)");
}

const FourierField& VectorMedium::a_ijkl(int i, int j, int k, int l) const {
  const int d = a.cell().dims();
  return a(i * d + j, k * d + l);
}

Family family_of(const Medium& medium) {
  return std::visit(overloaded{
                        [](const ScalarMedium&) { return Family::scalar_wave; },
                        [](const VectorMedium&) { return Family::vector_wave; },
                        [](const SchrodingerMedium&) { return Family::schrodinger; },
                    },
                    medium);
}

const Cell& cell_of(const Medium& medium) {
  return std::visit(overloaded{
                        [](const ScalarMedium& m) -> const Cell& { return m.b.cell(); },
                        [](const VectorMedium& m) -> const Cell& { return m.b.cell(); },
                        [](const SchrodingerMedium& m) -> const Cell& {
                          return m.potential.cell();
                        },
                    },
                    medium);
}

int cutoff_of(const Medium& medium) {
  return std::visit(
      overloaded{
          [](const ScalarMedium& m) { return std::max(m.a.cutoff(), m.b.cutoff()); },
          [](const VectorMedium& m) { return std::max(m.a.cutoff(), m.b.cutoff()); },
          [](const SchrodingerMedium& m) {
            int c = m.potential.cutoff();
            for (const auto& f : m.magnetic) c = std::max(c, f.cutoff());
            return c;
          },
      },
      medium);
}

std::uint64_t fingerprint(const Medium& medium) {
  std::uint64_t h = 14695981039346656037ULL;
  const auto family = static_cast<int>(family_of(medium));
  hash_bytes(h, &family, sizeof family);
  for (double l : cell_of(medium).lengths()) hash_bytes(h, &l, sizeof l);
  std::visit(overloaded{
                 [&](const ScalarMedium& m) {
                   hash_matrix(h, m.a);
                   hash_field(h, m.b);
                 },
                 [&](const VectorMedium& m) {
                   hash_bytes(h, &m.components, sizeof m.components);
                   hash_matrix(h, m.a);
                   hash_matrix(h, m.b);
                 },
                 [&](const SchrodingerMedium& m) {
                   hash_bytes(h, &m.mass, sizeof m.mass);
                   hash_bytes(h, &m.charge, sizeof m.charge);
                   hash_field(h, m.potential);
                   for (const auto& f : m.magnetic) hash_field(h, f);
                 },
             },
             medium);
  return h;
}

// --- specs --------------------------------------------------------------------

cd indicator_coefficient(double lo, double hi, double lambda, int n) {
  if (n == 0) return cd{(hi - lo) / lambda, 0.0};
  const double w = 2.0 * kPi * n / lambda;
  const cd num = std::polar(1.0, -w * hi) - std::polar(1.0, -w * lo);
  return num / cd{0.0, -2.0 * kPi * n};
}

MatrixField field_from_spec(const FieldSpec& spec, const Cell& cell, int cutoff,
                            int rows, int cols) {
  if (cutoff < 0) throw ValidationError("cutoff must be >= 0");
  const ModeSet modes(cell.dims(), cutoff);
  std::vector<std::vector<cd>> coeffs(static_cast<std::size_t>(rows * cols),
                                      std::vector<cd>(modes.size(), cd{0.0, 0.0}));

  if (const auto* pw = std::get_if<PiecewiseSpec>(&spec)) {
    const Eigen::MatrixXd bg = expand_value(pw->background, rows, cols, "background");
    if (rows == cols) require_symmetric(bg, "background");
    std::vector<Eigen::MatrixXd> values;
    for (const Region& r : pw->regions) {
      if (static_cast<int>(r.lo.size()) != cell.dims() ||
          static_cast<int>(r.hi.size()) != cell.dims()) {
        throw ValidationError("region: lo/hi must have one entry per cell axis");
      }
      for (int i = 0; i < cell.dims(); ++i) {
        const auto a = static_cast<std::size_t>(i);
        if (!(r.lo[a] < r.hi[a]) || r.lo[a] < 0.0 || r.hi[a] > cell.length(i) * (1 + 1e-12)) {
          throw ValidationError("region: need 0 <= lo < hi <= cell length on every axis");
        }
      }
      values.push_back(expand_value(r.value, rows, cols, "region value"));
      if (rows == cols) require_symmetric(values.back(), "region value");
    }
    for (std::size_t i = 0; i < pw->regions.size(); ++i)
      for (std::size_t j = i + 1; j < pw->regions.size(); ++j)
        if (regions_overlap(pw->regions[i], pw->regions[j]))
          throw ValidationError("regions overlap; piecewise phases must be disjoint");

    const MultiIndex zero;
    // Half of the box is computed, the mirror half is its exact conjugate.
    for (std::size_t f = 0; f < modes.size(); ++f) {
      const std::size_t mirror = modes.size() - 1 - f;
      if (mirror < f) {
        for (auto& c : coeffs) c[f] = std::conj(c[mirror]);
        continue;
      }
      const MultiIndex n = modes.at(f);
      std::vector<cd> shape_factor(pw->regions.size());
      for (std::size_t r = 0; r < pw->regions.size(); ++r) {
        cd prod{1.0, 0.0};
        for (int ax = 0; ax < cell.dims(); ++ax) {
          const auto a = static_cast<std::size_t>(ax);
          prod *= indicator_coefficient(pw->regions[r].lo[a], pw->regions[r].hi[a],
                                        cell.length(ax), n[ax]);
        }
        shape_factor[r] = prod;
      }
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
          cd c = (n == zero) ? cd{bg(i, j), 0.0} : cd{0.0, 0.0};
          for (std::size_t r = 0; r < values.size(); ++r) {
            c += (values[r](i, j) - bg(i, j)) * shape_factor[r];
          }
          if (n == zero) c = cd{c.real(), 0.0};
          coeffs[static_cast<std::size_t>(i * cols + j)][f] = c;
        }
      }
    }
  } else {
    const auto& fs = std::get<FourierSpec>(spec);
    std::vector<bool> seen(modes.size(), false);
    for (const FourierTerm& t : fs.terms) {
      const auto f = modes.flat(t.n);
      if (f < 0) {
        throw ValidationError("fourier term lies outside the declared cutoff");
      }
      if (seen[static_cast<std::size_t>(f)]) {
        throw ValidationError("fourier table lists the same multi-index twice");
      }
      seen[static_cast<std::size_t>(f)] = true;
      const Eigen::MatrixXcd v = expand_value(t.value, rows, cols, "fourier term");
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          coeffs[static_cast<std::size_t>(i * cols + j)][static_cast<std::size_t>(f)] = v(i, j);
    }
  }

  std::vector<FourierField> entries;
  entries.reserve(coeffs.size());
  for (auto& c : coeffs) entries.emplace_back(cell, cutoff, std::move(c));
  return MatrixField(rows, cols, std::move(entries));
}

ScalarMedium build_scalar_medium(const FieldSpec& a, const FieldSpec& b,
                                 const Cell& cell, int cutoff) {
  if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
  const int d = cell.dims();
  MatrixField af = field_from_spec(a, cell, cutoff, d, d);
  MatrixField bf = field_from_spec(b, cell, cutoff, 1, 1);
  ScalarMedium m{std::move(af), bf(0, 0)};
  validate(m);
  return m;
}

VectorMedium build_vector_medium(int components, const FieldSpec& a,
                                 const FieldSpec& b, const Cell& cell,
                                 int cutoff) {
  if (components < 1 || components > 3) {
    throw ValidationError("vector medium: 1 to 3 components supported");
  }
  if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
  const int nd = components * cell.dims();
  VectorMedium m{components, field_from_spec(a, cell, cutoff, nd, nd),
                 field_from_spec(b, cell, cutoff, components, components)};
  validate(m);
  return m;
}

SchrodingerBlocks schrodinger_blocks(double mass, double charge,
                                     const FourierField& potential,
                                     const std::vector<FourierField>& magnetic) {
  const Cell& cell = potential.cell();
  const int d = cell.dims();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + 1, d + 1);
  for (int i = 1; i <= d; ++i) a(i, i) = -1.0 / (2.0 * mass);
  std::vector<FourierField> b;
  b.push_back(FourierField::constant(cell, cd{0.0, -0.5}));
  for (const auto& phi : magnetic) b.push_back(phi * cd{0.0, charge / (2.0 * mass)});
  return SchrodingerBlocks{std::move(a), std::move(b), potential * cd{-charge, 0.0}};
}

SchrodingerMedium build_schrodinger_medium(double mass, double charge,
                                           const FieldSpec& potential,
                                           const std::vector<FieldSpec>& magnetic,
                                           const Cell& cell, int cutoff) {
  if (!(mass > 0.0)) throw ValidationError("schrodinger: mass must be > 0");
  if (cutoff < 1) throw ValidationError("cutoff must be >= 1");
  const int d = cell.dims();
  FourierField v = field_from_spec(potential, cell, cutoff, 1, 1)(0, 0);
  std::vector<FourierField> phi;
  if (magnetic.empty()) {
    for (int i = 0; i < d; ++i) phi.emplace_back(cell, cutoff);
  } else {
    if (static_cast<int>(magnetic.size()) != d) {
      throw ValidationError("schrodinger: magnetic potential needs one component per axis");
    }
    for (const auto& s : magnetic) phi.push_back(field_from_spec(s, cell, cutoff, 1, 1)(0, 0));
  }
  SchrodingerBlocks blocks = schrodinger_blocks(mass, charge, v, phi);
  SchrodingerMedium m{mass, charge, std::move(v), std::move(phi), std::move(blocks)};
  validate(m);
  return m;
}

MatrixField maxwell_tensor_from_permeability(const MatrixField& mu_inverse) {
  if (mu_inverse.rows() != 3 || mu_inverse.cols() != 3 || mu_inverse.cell().dims() != 3) {
    throw ValidationError("maxwell: mu^-1 must be a 3x3 field on a 3D cell");
  }
  if (!mu_inverse.is_symmetric()) {
    throw ValidationError("maxwell: mu^-1 is not symmetric");
  }
  require_real_fields(mu_inverse, "mu^-1");
  if (min_eigenvalue_on_grid(mu_inverse) <= kPositivityTol) {
    throw ValidationError("maxwell: mu^-1 is not positive definite on the sample grid");
  }
  auto levi = [](int i, int j, int k) {
    return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
  };
  const Cell& cell = mu_inverse.cell();
  const int n = mu_inverse.cutoff();
  std::vector<FourierField> entries;
  entries.reserve(81);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          FourierField acc(cell, n);
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
              const double s = levi(i, j, p) * levi(k, l, q);
              if (s != 0.0) acc = acc + mu_inverse(p, q).with_cutoff(n) * cd{-s, 0.0};
            }
          entries.push_back(std::move(acc));
        }
  return MatrixField(9, 9, std::move(entries));
}

double divergence_residual(std::span<const FourierField> spatial) {
  if (spatial.empty()) return 0.0;
  const Cell& cell = spatial.front().cell();
  int n = 0;
  for (const auto& f : spatial) n = std::max(n, f.cutoff());
  const ModeSet modes(cell.dims(), n);
  double worst = 0.0;
  for (std::size_t f = 0; f < modes.size(); ++f) {
    const MultiIndex idx = modes.at(f);
    cd div{0.0, 0.0};
    for (int j = 0; j < cell.dims(); ++j) {
      div += cd{0.0, cell.reciprocal(j, idx[j])} * spatial[static_cast<std::size_t>(j)][idx];
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

// --- validation ---------------------------------------------------------------

double min_eigenvalue_on_grid(const MatrixField& field) {
  const Cell& cell = field.cell();
  const int n = field.cutoff();
  std::vector<int> res(static_cast<std::size_t>(cell.dims()), 4 * (2 * n + 1));
  std::vector<std::vector<cd>> samples;
  for (int i = 0; i < field.rows(); ++i)
    for (int j = 0; j < field.cols(); ++j)
      samples.push_back(sample_on_grid(field(i, j), res));
  const std::size_t points = samples.front().size();
  double lowest = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd m(field.rows(), field.cols());
  for (std::size_t p = 0; p < points; ++p) {
    for (int i = 0; i < field.rows(); ++i)
      for (int j = 0; j < field.cols(); ++j)
        m(i, j) = samples[static_cast<std::size_t>(i * field.cols() + j)][p].real();
    if (m.rows() == 1) {
      lowest = std::min(lowest, m(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
      lowest = std::min(lowest, es.eigenvalues()(0));
    }
  }
  return lowest;
}

void validate(const ScalarMedium& m) {
  const int d = m.b.dims();
  if (m.a.rows() != d || m.a.cols() != d) {
    throw ValidationError("scalar medium: a must be d x d");
  }
  if (!(m.a.cell() == m.b.cell())) throw ValidationError("scalar medium: a and b cells differ");
  if (!m.a.is_symmetric()) throw ValidationError("scalar medium: a is not symmetric");
  require_real_fields(m.a, "a");
  if (!m.b.is_conjugate_symmetric(kRealTol)) {
    throw ValidationError("scalar medium: b is not real");
  }
  if (min_eigenvalue_on_grid(m.a) <= kPositivityTol) {
    throw ValidationError("scalar medium: a is not positive definite on the sample grid");
  }
  if (min_eigenvalue_on_grid(MatrixField(1, 1, {m.b})) <= kPositivityTol) {
    throw ValidationError("scalar medium: b is not positive on the sample grid");
  }
}

void validate(const VectorMedium& m) {
  const int d = m.b.cell().dims();
  const int nd = m.components * d;
  if (m.a.rows() != nd || m.a.cols() != nd || m.b.rows() != m.components ||
      m.b.cols() != m.components) {
    throw ValidationError("vector medium: a must be (n d) x (n d) and b n x n");
  }
  if (!(m.a.cell() == m.b.cell())) throw ValidationError("vector medium: a and b cells differ");
  if (!m.a.is_symmetric()) throw ValidationError("vector medium: a_ijkl != a_klij");
  if (!m.b.is_symmetric()) throw ValidationError("vector medium: b is not symmetric");
  require_real_fields(m.a, "a");
  require_real_fields(m.b, "b");
  if (min_eigenvalue_on_grid(m.b) <= kPositivityTol) {
    throw ValidationError("vector medium: b is not positive definite on the sample grid");
  }
  // Elastic-type tensors are only semidefinite on (n d)-space.
  if (min_eigenvalue_on_grid(m.a) < -kPositivityTol) {
    throw ValidationError("vector medium: a is not positive semidefinite on the sample grid");
  }
}

void validate(const SchrodingerMedium& m) {
  const Cell& cell = m.potential.cell();
  if (!(m.mass > 0.0)) throw ValidationError("schrodinger: mass must be > 0");
  if (static_cast<int>(m.magnetic.size()) != cell.dims()) {
    throw ValidationError("schrodinger: magnetic potential needs one component per axis");
  }
  if (!m.potential.is_conjugate_symmetric(kRealTol)) {
    throw ValidationError("schrodinger: potential V is not real");
  }
  for (const auto& phi : m.magnetic) {
    if (!(phi.cell() == cell)) throw ValidationError("schrodinger: cell mismatch");
    if (!phi.is_conjugate_symmetric(kRealTol)) {
      throw ValidationError("schrodinger: magnetic potential is not real");
    }
  }
  const std::span<const FourierField> spatial(m.blocks.b_block.data() + 1, m.magnetic.size());
  if (divergence_residual(spatial) >= 1e-12) {
    throw ValidationError("schrodinger: b block is not divergence-free");
  }
}

void validate(const Medium& medium) {
  std::visit([](const auto& m) { validate(m); }, medium);
}

// --- sampling -------------------------------------------------------------------

std::vector<cd> sample_on_grid(const FourierField& field, std::span<const int> resolution) {
  const int d = field.dims();
  const int n = field.cutoff();
  if (static_cast<int>(resolution.size()) != d) {
    throw ValidationError("sample_on_grid: one resolution per axis required");
  }
  for (int r : resolution) {
    if (r < 2 * n + 1) {
      throw ValidationError("sample_on_grid: resolution below 2*cutoff+1 aliases retained modes");
    }
  }
  std::vector<std::size_t> shape(static_cast<std::size_t>(d),
                                 static_cast<std::size_t>(2 * n + 1));
  std::vector<cd> data(field.coefficients().begin(), field.coefficients().end());
  for (int ax = 0; ax < d; ++ax) {
    const int r = resolution[static_cast<std::size_t>(ax)];
    Eigen::MatrixXcd op(r, 2 * n + 1);
    for (int x = 0; x < r; ++x)
      for (int k = -n; k <= n; ++k) {
        // Reduce k*x mod r so the phase stays exact for large grids.
        const long m = (static_cast<long>(k) * x) % r;
        op(x, k + n) = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / r);
      }
    data = transform_axis(data, shape, ax, op);
  }
  return data;
}

FourierField fourier_from_samples(std::span<const cd> samples,
                                  std::span<const int> resolution,
                                  const Cell& cell, int cutoff) {
  const int d = cell.dims();
  if (static_cast<int>(resolution.size()) != d) {
    throw ValidationError("fourier_from_samples: one resolution per axis required");
  }
  std::vector<std::size_t> shape;
  std::size_t total = 1;
  for (int r : resolution) {
    if (r < 2 * cutoff + 1) {
      throw ValidationError("fourier_from_samples: resolution below 2*cutoff+1");
    }
    shape.push_back(static_cast<std::size_t>(r));
    total *= static_cast<std::size_t>(r);
  }
  if (samples.size() != total) throw ValidationError("fourier_from_samples: sample count mismatch");
  std::vector<cd> data(samples.begin(), samples.end());
  for (int ax = 0; ax < d; ++ax) {
    const int r = resolution[static_cast<std::size_t>(ax)];
    Eigen::MatrixXcd op(2 * cutoff + 1, r);
    for (int k = -cutoff; k <= cutoff; ++k)
      for (int x = 0; x < r; ++x) {
        const long m = (static_cast<long>(k) * x) % r;
        op(k + cutoff, x) = std::polar(1.0 / r, -2.0 * kPi * static_cast<double>(m) / r);
      }
    data = transform_axis(data, shape, ax, op);
  }
  return FourierField(cell, cutoff, std::move(data));
}

}  // namespace hfh
