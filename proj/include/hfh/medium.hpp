#pragma once

// Cell-periodic coefficient fields stored as truncated Fourier series
//
//   f(xi) = sum_n c_n exp(2 pi i n . (xi / lambda)),   n in [-N, N]^d
//
// with c_n = (1/|cell|) int_cell f(xi) exp(-2 pi i n . (xi / lambda)) dxi.
// Fields are immutable once built; all media share one rectangular cell.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hfh {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxDims = 3;

struct MultiIndex {
  std::array<int, kMaxDims> n{};

  int& operator[](int axis) { return n[static_cast<std::size_t>(axis)]; }
  int operator[](int axis) const { return n[static_cast<std::size_t>(axis)]; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a);

class Cell {
 public:
  explicit Cell(std::vector<double> lengths);

  int dims() const { return static_cast<int>(lengths_.size()); }
  double length(int axis) const { return lengths_[static_cast<std::size_t>(axis)]; }
  std::span<const double> lengths() const { return lengths_; }
  double volume() const;
  double min_length() const;
  // 2 pi n / lambda_axis
  double reciprocal(int axis, int n) const;
  Eigen::VectorXd reciprocal(const MultiIndex& n) const;

  friend bool operator==(const Cell&, const Cell&) = default;

 private:
  std::vector<double> lengths_;
};

// The index box [-cutoff, cutoff]^dims in lexicographic order, last axis fastest.
class ModeSet {
 public:
  ModeSet(int dims, int cutoff);

  int dims() const { return dims_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return size_; }
  MultiIndex at(std::size_t flat) const;
  // -1 when n lies outside the box.
  std::ptrdiff_t flat(const MultiIndex& n) const;
  bool contains(const MultiIndex& n) const { return flat(n) >= 0; }

 private:
  int dims_;
  int cutoff_;
  std::size_t size_;
};

class FourierField {
 public:
  FourierField(Cell cell, int cutoff);
  FourierField(Cell cell, int cutoff, std::vector<cd> coefficients);

  static FourierField constant(const Cell& cell, cd value, int cutoff = 0);

  const Cell& cell() const { return cell_; }
  int dims() const { return cell_.dims(); }
  int cutoff() const { return modes_.cutoff(); }
  const ModeSet& modes() const { return modes_; }
  std::span<const cd> coefficients() const { return coeffs_; }

  // Zero outside the stored box.
  cd operator[](const MultiIndex& n) const;
  cd value(std::span<const double> xi) const;
  FourierField derivative(int axis) const;
  // Truncates or zero-pads.
  FourierField with_cutoff(int cutoff) const;
  bool is_conjugate_symmetric(double tol) const;
  bool is_zero() const;
  double max_abs() const;

  FourierField operator+(const FourierField& other) const;
  FourierField operator*(cd scale) const;

 private:
  Cell cell_;
  ModeSet modes_;
  std::vector<cd> coeffs_;
};

class MatrixField {
 public:
  MatrixField(int rows, int cols, std::vector<FourierField> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const FourierField& operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * cols_ + j)];
  }
  const Cell& cell() const { return entries_.front().cell(); }
  int cutoff() const;
  Eigen::MatrixXcd value(std::span<const double> xi) const;
  // Exact coefficient equality of (i,j) and (j,i).
  bool is_symmetric() const;

 private:
  int rows_;
  int cols_;
  std::vector<FourierField> entries_;
};

enum class Family { scalar_wave, vector_wave, schrodinger };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// -div(a grad u) + b u_tt = 0 with a symmetric d x d, b scalar.
struct ScalarMedium {
  MatrixField a;
  FourierField b;
};

// a_ijkl stored as an (n d) x (n d) matrix field, row (i,j) -> i*d + j.
struct VectorMedium {
  int components;
  MatrixField a;
  MatrixField b;

  const FourierField& a_ijkl(int i, int j, int k, int l) const;
};

// Blocks of the constitutive matrix [a b; b^* c] over (d/dt, grad', 1):
//   a = diag(0, -I/(2m)), b = (-i/2, i e Phi/(2m)), c = -e V.
struct SchrodingerBlocks {
  Eigen::MatrixXd a_block;
  std::vector<FourierField> b_block;
  FourierField c_block;
};

struct SchrodingerMedium {
  double mass;
  double charge;
  FourierField potential;
  std::vector<FourierField> magnetic;
  SchrodingerBlocks blocks;
};

using Medium = std::variant<ScalarMedium, VectorMedium, SchrodingerMedium>;

Family family_of(const Medium& medium);
const Cell& cell_of(const Medium& medium);
int cutoff_of(const Medium& medium);
// Stable 64-bit digest of the cell and every stored coefficient.
std::uint64_t fingerprint(const Medium& medium);

// --- field specifications -------------------------------------------------

// Axis-aligned box [lo, hi) inside the cell carrying a constant matrix value.
struct Region {
  std::vector<double> lo;
  std::vector<double> hi;
  Eigen::MatrixXd value;
};

struct PiecewiseSpec {
  Eigen::MatrixXd background;
  std::vector<Region> regions;
};

struct FourierTerm {
  MultiIndex n;
  Eigen::MatrixXcd value;
};

struct FourierSpec {
  std::vector<FourierTerm> terms;
};

using FieldSpec = std::variant<PiecewiseSpec, FourierSpec>;

// Exact Fourier coefficients of the indicator of [lo, hi) on a period lambda.
cd indicator_coefficient(double lo, double hi, double lambda, int n);

MatrixField field_from_spec(const FieldSpec& spec, const Cell& cell, int cutoff,
                            int rows, int cols);

// a may be 1x1 (isotropic) or d x d.
ScalarMedium build_scalar_medium(const FieldSpec& a, const FieldSpec& b,
                                 const Cell& cell, int cutoff);
VectorMedium build_vector_medium(int components, const FieldSpec& a,
                                 const FieldSpec& b, const Cell& cell,
                                 int cutoff);
// magnetic holds d scalar specs, one per spatial component of Phi.
SchrodingerMedium build_schrodinger_medium(double mass, double charge,
                                           const FieldSpec& potential,
                                           const std::vector<FieldSpec>& magnetic,
                                           const Cell& cell, int cutoff);
SchrodingerBlocks schrodinger_blocks(double mass, double charge,
                                     const FourierField& potential,
                                     const std::vector<FourierField>& magnetic);

// a_ijkl = -e_ijp e_klq (mu^-1)_pq for a 3x3 field on a 3D cell.
MatrixField maxwell_tensor_from_permeability(const MatrixField& mu_inverse);

// Largest modal divergence residual |sum_j (2 pi i n_j / lambda_j) b_j,n|.
double divergence_residual(std::span<const FourierField> spatial_components);

// --- validation -----------------------------------------------------------

void validate(const ScalarMedium& medium);
void validate(const VectorMedium& medium);
void validate(const SchrodingerMedium& medium);
void validate(const Medium& medium);

// Smallest eigenvalue of the real part of a symmetric matrix field over the
// positivity grid of 4 (2 cutoff + 1) points per axis.
double min_eigenvalue_on_grid(const MatrixField& field);

// --- sampling ---------------------------------------------------------------

// Samples on the uniform grid x_j = j lambda / resolution, last axis fastest.
std::vector<cd> sample_on_grid(const FourierField& field,
                               std::span<const int> resolution);
// Forward DFT of grid samples back to a cutoff box.
FourierField fourier_from_samples(std::span<const cd> samples,
                                  std::span<const int> resolution,
                                  const Cell& cell, int cutoff);

}  // namespace hfh
