#include "hfh/ergodic.hpp"

#include "hfh/errors.hpp"
#include "hfh/io.hpp"
#include "hfh/window.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace hfh {

namespace {

bool near_integer(double x) { return std::abs(x - std::round(x)) < kErgodicTol; }

// One exponential A exp(i kappa . x); "kept" terms make up the analytic limit.
struct Term {
  cd amplitude;
  std::vector<double> kappa;
  bool kept;
};

WindowAverageResult assemble(std::vector<Term> terms, const std::vector<double>& windows,
                             bool resonant, std::string classification) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0) || (i > 0 && windows[i] <= windows[i - 1])) {
      throw ValidationError("window averages: windows must be positive and strictly increasing");
    }
  }
  auto shared = std::make_shared<const std::vector<Term>>(std::move(terms));
  auto evaluate = [shared](double a) {
    cd sum{0.0, 0.0};
    for (const Term& t : *shared) {
      cd factor = t.amplitude;
      for (double k : t.kappa) factor *= window_mean(k * a);
      sum += factor;
    }
    return sum;
  };

  cd limit{0.0, 0.0};
  double bound = 0.0;
  for (const Term& t : *shared) {
    if (t.kept) {
      limit += t.amplitude;
      continue;
    }
    // |prod_i mean_i| <= |mean_i| <= 2 / (|kappa_i| a) on the fastest axis.
    double fastest = 0.0;
    for (double k : t.kappa) fastest = std::max(fastest, std::abs(k));
    if (fastest > 0.0) bound += 2.0 * std::abs(t.amplitude) / fastest;
  }

  WindowAverageResult r{windows, {}, limit, bound, resonant, std::move(classification), evaluate};
  for (double a : windows) r.values.push_back(evaluate(a));
  return r;
}

std::string fmt_ratio(const char* what, double x) {
  std::ostringstream s;
  s << what << "=" << fmt17(x);
  return s.str();
}

}  // namespace

PeriodicSignal1D PeriodicSignal1D::constant(double period, cd value) {
  return PeriodicSignal1D{period, {{0, value}}};
}

PeriodicSignal1D PeriodicSignal1D::cosine(double period, int n, double amplitude) {
  return PeriodicSignal1D{period, {{-n, 0.5 * amplitude}, {n, 0.5 * amplitude}}};
}

PeriodicSignal1D PeriodicSignal1D::sine(double period, int n, double amplitude) {
  return PeriodicSignal1D{period, {{-n, cd{0.0, 0.5 * amplitude}}, {n, cd{0.0, -0.5 * amplitude}}}};
}

cd PeriodicSignal1D::coefficient(int n) const {
  cd c{0.0, 0.0};
  for (const auto& [m, v] : harmonics)
    if (m == n) c += v;
  return c;
}

cd PeriodicSignal1D::value(double x) const {
  cd s{0.0, 0.0};
  for (const auto& [n, c] : harmonics) s += c * std::polar(1.0, 2.0 * kPi * n * x / period);
  return s;
}

PeriodicSignal1D PeriodicSignal1D::derivative() const {
  PeriodicSignal1D d{period, {}};
  for (const auto& [n, c] : harmonics) {
    if (n != 0) d.harmonics.emplace_back(n, c * cd{0.0, 2.0 * kPi * n / period});
  }
  return d;
}

PeriodicSignal1D PeriodicSignal1D::operator+(const PeriodicSignal1D& other) const {
  if (other.period != period) throw ValidationError("periodic signal: periods differ");
  PeriodicSignal1D s = *this;
  s.harmonics.insert(s.harmonics.end(), other.harmonics.begin(), other.harmonics.end());
  return s;
}

std::optional<Rational> rational_approximation(double x, double tol, long max_denominator) {
  if (!std::isfinite(x)) return std::nullopt;
  const double sign = x < 0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  // Convergents h_n / k_n of the continued fraction of ax.
  long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  double rest = ax;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(rest);
    if (a > 1e12) break;
    const long ai = static_cast<long>(a);
    const long h = ai * h0 + h1;
    const long k = ai * k0 + k1;
    if (k > max_denominator) break;
    if (std::abs(ax - static_cast<double>(h) / static_cast<double>(k)) < tol) {
      return Rational{static_cast<long>(sign) * h, k};
    }
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    const double frac = rest - a;
    if (frac <= 0.0) break;
    rest = 1.0 / frac;
  }
  return std::nullopt;
}

WindowAverageResult avg_modulated_1d(const PeriodicSignal1D& f, double b,
                                     const std::vector<double>& windows) {
  if (!(f.period > 0.0)) throw ValidationError("periodic signal: period must be positive");
  const double r = f.period * b / (2.0 * kPi);
  const bool resonant = near_integer(r);
  const long target = -std::lround(r);
  std::vector<Term> terms;
  for (const auto& [n, c] : f.harmonics) {
    terms.push_back({c, {2.0 * kPi * n / f.period + b}, resonant && n == target});
  }
  return assemble(std::move(terms), windows, resonant,
                  (resonant ? "resonant " : "non-resonant ") + fmt_ratio("Tb/2pi", r));
}

WindowAverageResult avg_product_periodic(const PeriodicSignal1D& f, const PeriodicSignal1D& g,
                                         const std::vector<double>& windows) {
  if (!(f.period > 0.0) || !(g.period > 0.0)) {
    throw ValidationError("periodic signal: period must be positive");
  }
  if (std::abs(f.mean()) > 1e-14) {
    throw ValidationError("product average: f must have zero mean");
  }
  const double ratio = f.period / g.period;
  const auto rat = rational_approximation(ratio);
  std::vector<Term> terms;
  for (const auto& [n, cf] : f.harmonics) {
    for (const auto& [m, cg] : g.harmonics) {
      // n / T1 + m / T2 vanishes iff n q + m p = 0 when T1 / T2 = p / q.
      const bool kept = rat && static_cast<long>(n) * rat->q + static_cast<long>(m) * rat->p == 0;
      terms.push_back({cf * cg, {2.0 * kPi * (n / f.period + m / g.period)}, kept});
    }
  }
  std::string cls = fmt_ratio("T1/T2", ratio);
  if (rat) {
    cls = "rational " + std::to_string(rat->p) + "/" + std::to_string(rat->q) + " common period " +
          fmt17(static_cast<double>(rat->q) * f.period) + " " + cls;
  } else {
    cls = "incommensurate " + cls;
  }
  return assemble(std::move(terms), windows, rat.has_value(), std::move(cls));
}

WindowAverageResult avg_derivative_product(const PeriodicSignal1D& f, const PeriodicSignal1D& g,
                                           const std::vector<double>& windows) {
  return avg_product_periodic(f.derivative(), g, windows);
}

WindowAverageResult avg_modulated_dd(const FourierField& f, const std::vector<double>& lambda,
                                     const std::vector<double>& windows) {
  const Cell& cell = f.cell();
  const int d = cell.dims();
  if (static_cast<int>(lambda.size()) != d) {
    throw ValidationError("modulated average: lambda must match the cell dimension");
  }
  bool resonant = true;
  MultiIndex target;
  std::ostringstream cls;
  for (int i = 0; i < d; ++i) {
    const double r = cell.length(i) * lambda[static_cast<std::size_t>(i)] / (2.0 * kPi);
    resonant = resonant && near_integer(r);
    target[i] = -static_cast<int>(std::lround(r));
    cls << (i ? " " : "") << fmt17(r);
  }
  std::vector<Term> terms;
  const ModeSet& modes = f.modes();
  for (std::size_t idx = 0; idx < modes.size(); ++idx) {
    const cd c = f.coefficients()[idx];
    if (c == cd{0.0, 0.0}) continue;
    const MultiIndex n = modes.at(idx);
    std::vector<double> kappa;
    for (int i = 0; i < d; ++i) kappa.push_back(cell.reciprocal(i, n[i]) + lambda[static_cast<std::size_t>(i)]);
    terms.push_back({c, std::move(kappa), resonant && n == target});
  }
  return assemble(std::move(terms), windows, resonant,
                  (resonant ? "resonant T*lambda/2pi=(" : "non-resonant T*lambda/2pi=(") + cls.str() + ")");
}

void write_window_csv(std::ostream& out, const WindowAverageResult& result) {
  out << "window,re_avg,im_avg,abs_err_vs_limit\n";
  for (std::size_t i = 0; i < result.windows.size(); ++i) {
    const cd v = result.values[i];
    out << fmt17(result.windows[i]) << "," << fmt17(v.real()) << "," << fmt17(v.imag()) << ","
        << fmt17(std::abs(v - result.analytic_limit)) << "\n";
  }
}

std::vector<ErgodicFixture> builtin_ergodic_fixtures() {
  using W = const std::vector<double>&;
  const double root2 = std::sqrt(2.0);
  const auto cos1 = PeriodicSignal1D::cosine(1.0);
  const auto sin1 = PeriodicSignal1D::sine(1.0);
  const auto one = PeriodicSignal1D::constant(1.0, 1.0);
  const PeriodicSignal1D down{1.0, {{-1, 1.0}}};
  const Cell unit2({1.0, 1.0});

  std::vector<ErgodicFixture> fx;
  fx.push_back({"modulated_1d/const_b2pi", 0.0, true,
                [=](W w) { return avg_modulated_1d(one, 2.0 * kPi, w); }});
  fx.push_back({"modulated_1d/downshift_b2pi", 1.0, true,
                [=](W w) { return avg_modulated_1d(down, 2.0 * kPi, w); }});
  fx.push_back({"modulated_1d/const_b1", 0.0, false,
                [=](W w) { return avg_modulated_1d(one, 1.0, w); }});
  fx.push_back({"modulated_1d/two_harmonics_broot2", 0.0, false, [=](W w) {
                  const auto f = cos1 + PeriodicSignal1D::sine(1.0, 2, 0.5);
                  return avg_modulated_1d(f, root2, w);
                }});
  fx.push_back({"product/cos_vs_cos_root2", 0.0, false, [=](W w) {
                  return avg_product_periodic(cos1, PeriodicSignal1D::cosine(root2), w);
                }});
  fx.push_back({"product/cos_self", 0.5, true,
                [=](W w) { return avg_product_periodic(cos1, cos1, w); }});
  fx.push_back({"product/cos_vs_half_frequency", 0.0, true, [=](W w) {
                  return avg_product_periodic(cos1, PeriodicSignal1D::cosine(2.0), w);
                }});
  fx.push_back({"derivative/sin_vs_cos_root2", 0.0, false, [=](W w) {
                  return avg_derivative_product(sin1, PeriodicSignal1D::cosine(root2), w);
                }});
  fx.push_back({"derivative/sin_self", 0.0, true,
                [=](W w) { return avg_derivative_product(sin1, sin1, w); }});
  fx.push_back({"modulated_2d/const_axis1_resonant", 0.0, true, [=](W w) {
                  return avg_modulated_dd(FourierField::constant(unit2, 1.0, 1), {2.0 * kPi, 0.0}, w);
                }});
  fx.push_back({"modulated_2d/zero_lambda_mean", 2.0, true, [=](W w) {
                  // f = 2 + cos(2 pi x) cos(2 pi y)
                  FourierField f = FourierField::constant(unit2, 2.0, 1);
                  std::vector<cd> c(f.coefficients().begin(), f.coefficients().end());
                  for (int sx : {-1, 1})
                    for (int sy : {-1, 1}) c[static_cast<std::size_t>(f.modes().flat({{sx, sy, 0}}))] = 0.25;
                  return avg_modulated_dd(FourierField(unit2, 1, std::move(c)), {0.0, 0.0}, w);
                }});
  fx.push_back({"modulated_2d/axis2_nonresonant", 0.0, false, [=](W w) {
                  FourierField f(unit2, 1);
                  std::vector<cd> c(f.coefficients().begin(), f.coefficients().end());
                  c[static_cast<std::size_t>(f.modes().flat({{-1, 0, 0}}))] = 1.0;
                  return avg_modulated_dd(FourierField(unit2, 1, std::move(c)), {2.0 * kPi, 1.0}, w);
                }});
  return fx;
}

}  // namespace hfh
