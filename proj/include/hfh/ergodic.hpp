#pragma once

// Window averages of quasi-periodic signals built from finite Fourier tables.
// Every window integral is closed-form: (1/a) int_0^a e^{i kappa x} dx.

#include "hfh/medium.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace hfh {

inline constexpr double kErgodicTol = 1e-9;
inline constexpr long kMaxDenominator = 1000000;

// f(x) = sum_n c_n exp(2 pi i n x / T)
struct PeriodicSignal1D {
  double period;
  std::vector<std::pair<int, cd>> harmonics;

  static PeriodicSignal1D constant(double period, cd value);
  static PeriodicSignal1D cosine(double period, int n = 1, double amplitude = 1.0);
  static PeriodicSignal1D sine(double period, int n = 1, double amplitude = 1.0);

  cd coefficient(int n) const;
  cd value(double x) const;
  cd mean() const { return coefficient(0); }
  PeriodicSignal1D derivative() const;
  PeriodicSignal1D operator+(const PeriodicSignal1D& other) const;
};

struct Rational {
  long p;
  long q;
};

// Smallest-denominator continued-fraction convergent within tol of x, if any
// with q <= max_denominator.
std::optional<Rational> rational_approximation(double x, double tol = kErgodicTol,
                                               long max_denominator = kMaxDenominator);

struct WindowAverageResult {
  std::vector<double> windows;
  std::vector<cd> values;
  cd analytic_limit;
  double decay_constant;  // |value(a) - limit| <= decay_constant / a
  bool resonant;
  std::string classification;
  // Evaluate the same average at another window (used for held-out checks).
  std::function<cd(double)> evaluate;
};

WindowAverageResult avg_modulated_1d(const PeriodicSignal1D& f, double b,
                                     const std::vector<double>& windows);
WindowAverageResult avg_product_periodic(const PeriodicSignal1D& f, const PeriodicSignal1D& g,
                                         const std::vector<double>& windows);
WindowAverageResult avg_derivative_product(const PeriodicSignal1D& f, const PeriodicSignal1D& g,
                                           const std::vector<double>& windows);
// Boxes are cubes [0, a]^d; the field's cell supplies the periods T_i.
WindowAverageResult avg_modulated_dd(const FourierField& f, const std::vector<double>& lambda,
                                     const std::vector<double>& windows);

void write_window_csv(std::ostream& out, const WindowAverageResult& result);

struct ErgodicFixture {
  std::string name;
  cd expected_limit;
  // Windows that are whole common periods, where the average is exact.
  bool exact_on_integer_windows;
  std::function<WindowAverageResult(const std::vector<double>&)> run;
};

std::vector<ErgodicFixture> builtin_ergodic_fixtures();

}  // namespace hfh
