#include "hfh/check.hpp"

#include "hfh/bands.hpp"
#include "hfh/bloch.hpp"
#include "hfh/effective.hpp"
#include "hfh/ergodic.hpp"
#include "hfh/errors.hpp"
#include "hfh/io.hpp"
#include "hfh/simulate.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace hfh {

namespace fixtures {

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

Eigen::MatrixXcd cscalar(cd v) { return Eigen::MatrixXcd::Constant(1, 1, v); }

MultiIndex index1(int n) { return MultiIndex{{n, 0, 0}}; }

// Adds the term at n and its conjugate mirror at -n.
void add_real_term(FourierSpec& spec, const MultiIndex& n, const Eigen::MatrixXcd& value) {
  spec.terms.push_back({n, value});
  spec.terms.push_back({-n, value.conjugate()});
}

cd random_complex(std::mt19937_64& rng, double scale) {
  return {scale * (2.0 * uniform(rng) - 1.0), scale * (2.0 * uniform(rng) - 1.0)};
}

// Mean `mean` plus a few random real harmonics with total amplitude below mean / 2.
FourierSpec random_positive_scalar(std::mt19937_64& rng, int dims, double mean) {
  FourierSpec spec;
  spec.terms.push_back({MultiIndex{}, cscalar(mean)});
  const ModeSet modes(dims, 1);
  for (std::size_t f = modes.size() / 2 + 1; f < modes.size(); ++f) {
    add_real_term(spec, modes.at(f), cscalar(random_complex(rng, 0.08 * mean)));
  }
  return spec;
}

}  // namespace

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ScalarMedium constant_medium(int dims, int cutoff) {
  const Cell cell(std::vector<double>(static_cast<std::size_t>(dims), 1.0));
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(dims, dims);
  return build_scalar_medium(PiecewiseSpec{one, {}}, PiecewiseSpec{scalar(1.0), {}}, cell, cutoff);
}

ScalarMedium two_phase_medium(int cutoff) {
  const Cell cell({1.0});
  return build_scalar_medium(PiecewiseSpec{scalar(1.0), {Region{{0.5}, {1.0}, scalar(4.0)}}},
                             PiecewiseSpec{scalar(1.0), {}}, cell, cutoff);
}

ScalarMedium smooth_medium() {
  FourierSpec a;
  a.terms.push_back({index1(0), cscalar(2.0)});
  add_real_term(a, index1(1), cscalar(0.5));
  return build_scalar_medium(a, PiecewiseSpec{scalar(1.0), {}}, Cell({1.0}), 1);
}

SchrodingerMedium mathieu_medium() {
  FourierSpec v;
  add_real_term(v, index1(1), cscalar(1.0));
  return build_schrodinger_medium(0.5, 1.0, v, {PiecewiseSpec{scalar(0.0), {}}}, Cell({1.0}), 1);
}

VectorMedium coupled_vector_medium(int cutoff) {
  Eigen::MatrixXd a1(2, 2), a2(2, 2), b(2, 2);
  a1 << 1.0, 0.5, 0.5, 2.0;
  a2 << 4.0, 0.5, 0.5, 1.5;
  b << 1.0, 0.2, 0.2, 1.5;
  return build_vector_medium(2, PiecewiseSpec{a1, {Region{{0.5}, {1.0}, a2}}}, PiecewiseSpec{b, {}},
                             Cell({1.0}), cutoff);
}

ScalarMedium random_scalar_medium(std::mt19937_64& rng, int dims) {
  const Cell cell(std::vector<double>(static_cast<std::size_t>(dims), 1.0));
  FourierSpec a;
  a.terms.push_back({MultiIndex{}, Eigen::MatrixXcd::Identity(dims, dims) * 3.0});
  const ModeSet modes(dims, 1);
  for (std::size_t f = modes.size() / 2 + 1; f < modes.size(); ++f) {
    Eigen::MatrixXcd m(dims, dims);
    for (int i = 0; i < dims; ++i)
      for (int j = i; j < dims; ++j) m(i, j) = m(j, i) = random_complex(rng, 0.1);
    add_real_term(a, modes.at(f), m);
  }
  return build_scalar_medium(a, random_positive_scalar(rng, dims, 2.0), cell, 1);
}

VectorMedium random_vector_medium(std::mt19937_64& rng) {
  const Cell cell({1.0});
  FourierSpec a, b;
  Eigen::MatrixXcd a0(2, 2), b0(2, 2);
  a0 << 3.0, 0.4, 0.4, 2.5;
  b0 << 2.0, 0.3, 0.3, 1.5;
  a.terms.push_back({MultiIndex{}, a0});
  b.terms.push_back({MultiIndex{}, b0});
  Eigen::MatrixXcd da(2, 2), db(2, 2);
  da(0, 0) = random_complex(rng, 0.2);
  da(1, 1) = random_complex(rng, 0.2);
  da(0, 1) = da(1, 0) = random_complex(rng, 0.1);
  db(0, 0) = random_complex(rng, 0.1);
  db(1, 1) = random_complex(rng, 0.1);
  db(0, 1) = db(1, 0) = random_complex(rng, 0.05);
  add_real_term(a, index1(1), da);
  add_real_term(b, index1(1), db);
  return build_vector_medium(2, a, b, cell, 1);
}

SchrodingerMedium random_schrodinger_medium(std::mt19937_64& rng, int dims) {
  const Cell cell(std::vector<double>(static_cast<std::size_t>(dims), 1.0));
  FourierSpec v;
  const ModeSet modes(dims, 1);
  for (std::size_t f = modes.size() / 2 + 1; f < modes.size(); ++f) {
    add_real_term(v, modes.at(f), cscalar(random_complex(rng, 1.0)));
  }
  std::vector<FieldSpec> phi;
  if (dims == 1) {
    phi.push_back(PiecewiseSpec{scalar(2.0 * uniform(rng) - 1.0), {}});
  } else {
    // Phi_1 depends on y only and Phi_2 on x only, so div Phi = 0.
    for (int axis = 0; axis < 2; ++axis) {
      FourierSpec p;
      MultiIndex n;
      n[1 - axis] = 1;
      p.terms.push_back({MultiIndex{}, cscalar(0.3 * (2.0 * uniform(rng) - 1.0))});
      add_real_term(p, n, cscalar(random_complex(rng, 0.3)));
      phi.push_back(p);
    }
  }
  return build_schrodinger_medium(0.5, 1.0, v, phi, cell, 1);
}

}  // namespace fixtures

namespace {

using Results = std::vector<CheckResult>;

Eigen::VectorXd kvec(std::initializer_list<double> values) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) k(i++) = v;
  return k;
}

// Passes when value <= tol; NaN always fails.
void record(Results& out, std::string name, double value, double tol, std::string detail = {}) {
  out.push_back({std::move(name), value <= tol, value, tol, std::move(detail)});
}

// Exceptions inside one group become a single failed entry instead of aborting the suite.
void guarded(Results& out, const std::string& group, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    out.push_back({group, false, std::numeric_limits<double>::quiet_NaN(), 0.0,
                   std::string("exception: ") + e.what()});
  }
}

double max_coefficient_gap(const FourierField& f, const FourierField& g) {
  double gap = 0.0;
  const ModeSet& modes = f.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    gap = std::max(gap, std::abs(f[modes.at(i)] - g[modes.at(i)]));
  }
  return gap;
}

void check_medium(Results& out) {
  guarded(out, "medium/two_phase_coefficients", [&] {
    const ScalarMedium m = fixtures::two_phase_medium(8);
    const FourierField& a = m.a(0, 0);
    const double err = std::max(std::abs(a[MultiIndex{}] - cd(2.5, 0.0)),
                                std::abs(a[MultiIndex{{1, 0, 0}}] - cd(0.0, 3.0 / kPi)));
    record(out, "medium/two_phase_coefficients", err, 1e-14);
    double mirror = 0.0;
    for (int n = -8; n <= 8; ++n) {
      mirror = std::max(mirror, std::abs(a[MultiIndex{{-n, 0, 0}}] - std::conj(a[MultiIndex{{n, 0, 0}}])));
    }
    record(out, "medium/conjugate_symmetry", mirror, 1e-15);
    record(out, "medium/positivity", -min_eigenvalue_on_grid(m.a), -0.5, "min eigenvalue of a must be >= 1/2");
  });

  guarded(out, "medium/sampling_round_trip", [&] {
    std::mt19937_64 rng(11);
    double err = 0.0;
    for (int dims : {1, 2}) {
      const ScalarMedium m = fixtures::random_scalar_medium(rng, dims);
      const std::vector<int> res(static_cast<std::size_t>(dims), 8);
      const auto samples = sample_on_grid(m.b, res);
      err = std::max(err, max_coefficient_gap(fourier_from_samples(samples, res, m.b.cell(), 1), m.b));
    }
    record(out, "medium/sampling_round_trip", err, 1e-12);
  });

  guarded(out, "medium/maxwell_symmetry", [&] {
    std::mt19937_64 rng(12);
    FourierSpec mu;
    Eigen::MatrixXcd base = Eigen::MatrixXcd::Identity(3, 3) * 2.0;
    base(0, 1) = base(1, 0) = 0.3;
    mu.terms.push_back({MultiIndex{}, base});
    for (const MultiIndex& n : {MultiIndex{{1, 0, 0}}, MultiIndex{{0, 1, 1}}}) {
      Eigen::MatrixXcd d(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) d(i, j) = d(j, i) = fixtures::uniform(rng) * 0.1;
      mu.terms.push_back({n, d});
      mu.terms.push_back({-n, d.conjugate()});
    }
    const Cell cell({1.0, 1.0, 1.0});
    const MatrixField a = maxwell_tensor_from_permeability(field_from_spec(mu, cell, 1, 3, 3));
    double gap = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) gap = std::max(gap, max_coefficient_gap(a(i, j), a(j, i)));
    record(out, "medium/maxwell_symmetry", gap, 0.0, "exact a_ijkl = a_klij");
  });

  guarded(out, "medium/divergence_free", [&] {
    std::mt19937_64 rng(13);
    const SchrodingerMedium m = fixtures::random_schrodinger_medium(rng, 2);
    const std::span<const FourierField> spatial(m.blocks.b_block.data() + 1, m.magnetic.size());
    record(out, "medium/divergence_free", divergence_residual(spatial), 1e-12);
  });
}

// Random media with random k; both halves of every generalized pencil.
void check_hermiticity(Results& out) {
  guarded(out, "bloch/hermiticity", [&] {
    std::mt19937_64 rng(21);
    auto random_k = [&](int dims) {
      Eigen::VectorXd k(dims);
      for (int i = 0; i < dims; ++i) k(i) = (2.0 * fixtures::uniform(rng) - 1.0) * kPi;
      return k;
    };
    std::vector<std::pair<Medium, int>> cases;
    for (int t = 0; t < 3; ++t) {
      cases.emplace_back(fixtures::random_scalar_medium(rng, 1), 16);
      cases.emplace_back(fixtures::random_scalar_medium(rng, 2), 4);
      cases.emplace_back(fixtures::random_vector_medium(rng), 8);
      cases.emplace_back(fixtures::random_schrodinger_medium(rng, 1), 16);
      cases.emplace_back(fixtures::random_schrodinger_medium(rng, 2), 4);
    }
    cases.emplace_back(fixtures::two_phase_medium(8), 16);
    cases.emplace_back(fixtures::coupled_vector_medium(8), 16);
    cases.emplace_back(fixtures::mathieu_medium(), 16);
    double worst = 0.0;
    for (const auto& [medium, cutoff] : cases) {
      const BlochOperator op = assemble_operator(medium, random_k(cell_of(medium).dims()), cutoff);
      worst = std::max({worst, hermiticity_defect(op.stiffness), hermiticity_defect(op.mass)});
    }
    record(out, "bloch/hermiticity", worst, 1e-12, std::to_string(cases.size()) + " operators");
  });
}

void check_modes(Results& out) {
  guarded(out, "bloch/residual_normalization", [&] {
    double residual = 0.0;
    double norm = 0.0;
    const std::vector<std::pair<Medium, Eigen::VectorXd>> cases = {
        {fixtures::two_phase_medium(8), kvec({0.4 * kPi})},
        {fixtures::coupled_vector_medium(8), kvec({0.7 * kPi})},
        {fixtures::mathieu_medium(), kvec({0.3 * kPi})},
        {fixtures::constant_medium(2, 1), kvec({0.3, -0.8})},
    };
    for (const auto& [medium, k] : cases) {
      const BlochOperator op = assemble_operator(medium, k, k.size() == 1 ? 16 : 4);
      for (const BlochMode& m : solve_bands(op, 4)) {
        residual = std::max(residual, m.residual / std::max(1.0, std::abs(m.eigenvalue)));
        norm = std::max(norm, std::abs(m.v0.dot(op.mass * m.v0) - 1.0));
      }
    }
    record(out, "bloch/mode_residual", residual, 1e-9);
    record(out, "bloch/mode_normalization", norm, 1e-12);
  });

  guarded(out, "bloch/time_reversal", [&] {
    double gap = 0.0;
    for (const Medium& medium : {Medium{fixtures::two_phase_medium(8)}, Medium{fixtures::mathieu_medium()},
                                 Medium{fixtures::coupled_vector_medium(8)}}) {
      const auto plus = solve_bands(assemble_operator(medium, kvec({0.37 * kPi}), 16), 3);
      const auto minus = solve_bands(assemble_operator(medium, kvec({-0.37 * kPi}), 16), 3);
      for (std::size_t b = 0; b < 3; ++b) gap = std::max(gap, std::abs(plus[b].omega - minus[b].omega));
    }
    record(out, "bloch/time_reversal", gap, 1e-10);
  });

  guarded(out, "bloch/cutoff_doubling", [&] {
    const Medium medium = fixtures::smooth_medium();
    const auto coarse = solve_bands(assemble_operator(medium, kvec({0.4 * kPi}), 16), 3);
    const auto fine = solve_bands(assemble_operator(medium, kvec({0.4 * kPi}), 32), 3);
    double rel = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      rel = std::max(rel, std::abs(coarse[b].omega - fine[b].omega) / std::abs(fine[b].omega));
    }
    record(out, "bloch/cutoff_doubling", rel, 1e-8);
  });
}

void check_bands(Results& out) {
  guarded(out, "bands/constant_medium", [&] {
    const Medium medium = fixtures::constant_medium();
    const DispersionTable table = sweep_path(medium, kvec({0.1}), kvec({3.0}), 30, 1, 16);
    double err = 0.0;
    for (const auto& p : table.points) err = std::max(err, std::abs(p.omega - p.k(0)));
    record(out, "bands/constant_dispersion", err, 1e-10);
    const auto g = group_velocity_fd(medium, kvec({1.0}), 1, 0.0, 16);
    record(out, "bands/constant_group_velocity", std::abs(g.velocity(0) - 1.0), 1e-8);
    record(out, "bands/lipschitz_bound", table.observed_lipschitz - table.lipschitz_bound, 1e-9);
  });

  guarded(out, "bands/odd_symmetry", [&] {
    const Medium medium = fixtures::two_phase_medium(8);
    double gap = 0.0;
    double richardson = 0.0;
    for (int band : {1, 2}) {
      const auto plus = group_velocity_fd(medium, kvec({0.3 * kPi}), band, 0.0, 16);
      const auto minus = group_velocity_fd(medium, kvec({-0.3 * kPi}), band, 0.0, 16);
      gap = std::max(gap, std::abs(plus.velocity(0) + minus.velocity(0)));
      richardson = std::max({richardson, plus.richardson_gap, minus.richardson_gap});
    }
    record(out, "bands/odd_symmetry", gap, 1e-8);
    record(out, "bands/richardson", richardson, kRichardsonTol);
  });
}

void check_effective(Results& out) {
  guarded(out, "effective/identity", [&] {
    struct Case {
      std::string name;
      Medium medium;
      std::vector<int> bands;
    };
    const std::vector<Case> cases = {{"scalar", fixtures::two_phase_medium(8), {1, 2}},
                                     {"schrodinger", fixtures::mathieu_medium(), {1, 2}},
                                     {"vector", fixtures::coupled_vector_medium(8), {1, 2}}};
    for (const Case& c : cases) {
      double identity = 0.0;
      double d0 = 0.0;
      double imag = 0.0;
      for (double kk : {0.3 * kPi, 0.5 * kPi, 0.7 * kPi}) {
        for (int band : c.bands) {
          const BlochMode mode = solve_mode(c.medium, kvec({kk}), band, 16);
          const EffectiveCoefficients e = effective_coefficients(mode, c.medium);
          const auto g = group_velocity_fd(c.medium, kvec({kk}), band, 0.0, 16);
          identity = std::max(identity, std::abs(e.v(0) - g.velocity(0)));
          imag = std::max(imag, e.max_imag_ratio);
          if (c.name != "schrodinger") d0 = std::max(d0, std::abs(e.d(0) - cd(0.0, -2.0 * mode.omega)));
        }
      }
      record(out, "effective/identity_" + c.name, identity, 1e-6);
      record(out, "effective/imag_ratio_" + c.name, imag, 1e-6);
      if (c.name != "schrodinger") record(out, "effective/d0_" + c.name, d0, 1e-9);
    }
  });

  guarded(out, "effective/phase_invariance", [&] {
    std::mt19937_64 rng(31);
    const std::vector<Medium> media = {fixtures::random_scalar_medium(rng, 1),
                                       fixtures::random_scalar_medium(rng, 2),
                                       fixtures::random_vector_medium(rng),
                                       fixtures::random_schrodinger_medium(rng, 1)};
    std::vector<BlochMode> modes;
    for (const Medium& m : media) {
      const Eigen::VectorXd k = cell_of(m).dims() == 1 ? kvec({0.45 * kPi}) : kvec({0.45 * kPi, 0.2});
      modes.push_back(solve_mode(m, k, 1, cell_of(m).dims() == 1 ? 16 : 4));
    }
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t which = static_cast<std::size_t>(trial) % modes.size();
      const EffectiveCoefficients base = effective_coefficients(modes[which], media[which]);
      BlochMode rotated = modes[which];
      rotated.v0 *= std::polar(1.0, 2.0 * kPi * fixtures::uniform(rng));
      const EffectiveCoefficients e = effective_coefficients(rotated, media[which]);
      for (Eigen::Index j = 1; j < e.d.size(); ++j) {
        worst = std::max(worst, std::abs(e.d(j) / e.d(0) - base.d(j) / base.d(0)));
      }
    }
    record(out, "effective/phase_invariance", worst, 1e-12, "100 trials");
  });
}

void check_coupling(Results& out) {
  guarded(out, "effective/non_coupling", [&] {
    const Medium medium = fixtures::two_phase_medium(8);
    const std::vector<int> counts = {4, 8, 16, 32};
    const BlochMode b1 = solve_mode(medium, kvec({kPi / 2}), 1, 16);
    struct Pair {
      std::string name;
      BlochMode second;
    };
    const std::vector<Pair> pairs = {
        {"bands_1_2", solve_mode(medium, kvec({kPi / 2}), 2, 16)},
        {"bands_1_3", solve_mode(medium, kvec({kPi / 2}), 3, 16)},
    };
    const BlochMode plus = solve_mode(medium, kvec({kPi / 3}), 1, 16);
    const BlochMode minus = solve_mode(medium, kvec({-kPi / 3}), 1, 16);
    auto judge = [&](const std::string& name, const CouplingReport& r) {
      record(out, "effective/non_coupling_limit_" + name, r.max_cross_limit(), 1e-6);
      record(out, "effective/non_coupling_slope_" + name, r.worst_cross_slope(), -0.9);
      record(out, "effective/non_resonant_" + name, r.resonant ? 1.0 : 0.0, 0.0);
    };
    for (const Pair& p : pairs) judge(p.name, coupling_coefficients(b1, p.second, medium, counts));
    judge("k_plus_minus", coupling_coefficients(plus, minus, medium, counts));

    const BlochMode shifted = solve_mode(medium, kvec({kPi / 2 + 2 * kPi}), 1, 16);
    const CouplingReport res = coupling_coefficients(b1, shifted, medium, counts);
    record(out, "effective/resonant_equivalent", res.equivalent ? 0.0 : 1.0, 0.0);
    record(out, "effective/resonant_multiple", res.multiple_defect, 1e-8);

    const CouplingReport self = coupling_coefficients(b1, b1, medium, counts);
    const EffectiveCoefficients e = effective_coefficients(b1, medium);
    double collapse = 0.0;
    for (const CouplingEntry& entry : self.entries) {
      if (entry.p == 1 && entry.l == 1) collapse = std::max(collapse, std::abs(entry.average - e.d(entry.j)));
    }
    record(out, "effective/supercell_collapse", collapse, 1e-10);
  });
}

void check_ergodic(Results& out) {
  // Deliberately off the common periods so the C / a bound is exercised.
  const std::vector<double> windows = {3.7, 7.3, 15.1, 31.9};
  const double held_out = 2.0 * windows.back();
  const std::vector<double> whole = {1.0, 2.0, 3.0, 5.0, 8.0};
  for (const ErgodicFixture& fx : builtin_ergodic_fixtures()) {
    guarded(out, "ergodic/" + fx.name, [&] {
      const WindowAverageResult r = fx.run(windows);
      double excess = 0.0;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        excess = std::max(excess, std::abs(r.values[i] - r.analytic_limit) * windows[i] - r.decay_constant);
      }
      const double held = std::abs(r.evaluate(held_out) - r.analytic_limit) * held_out - r.decay_constant;
      record(out, "ergodic/" + fx.name + "/limit", std::abs(r.analytic_limit - fx.expected_limit), 1e-12);
      record(out, "ergodic/" + fx.name + "/decay_bound", std::max(excess, held), 1e-12,
             "C=" + fmt17(r.decay_constant));
      if (fx.exact_on_integer_windows) {
        const WindowAverageResult exact = fx.run(whole);
        double err = 0.0;
        for (const cd& v : exact.values) err = std::max(err, std::abs(v - exact.analytic_limit));
        record(out, "ergodic/" + fx.name + "/integer_windows", err, 1e-12);
      }
    });
  }

  guarded(out, "ergodic/derivative_consistency", [&] {
    const auto f = PeriodicSignal1D::sine(1.0) + PeriodicSignal1D::cosine(1.0, 3, 0.25);
    const auto g = PeriodicSignal1D::cosine(std::sqrt(2.0));
    const auto lhs = avg_derivative_product(f, g, windows);
    const auto rhs = avg_product_periodic(f.derivative(), g, windows);
    double gap = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i) gap = std::max(gap, std::abs(lhs.values[i] - rhs.values[i]));
    record(out, "ergodic/derivative_consistency", gap, 1e-12);
  });
}

void check_simulate(Results& out) {
  guarded(out, "simulate/short_run", [&] {
    const ScalarMedium medium = fixtures::two_phase_medium(8);
    const BlochMode mode = solve_mode(Medium{medium}, kvec({kPi / 2}), 1, 32);
    const double vg = group_velocity_fd(Medium{medium}, kvec({kPi / 2}), 1, 0.0, 32).velocity(0);
    GridSpec grid;
    grid.points_per_cell = 32;
    const SimulationRecord rec = simulate_packet(mode, medium, 1.0 / 8.0, EnvelopeSpec{}, grid, vg, 1.0, 0.5);
    record(out, "simulate/energy_drift", rec.energy_drift, 1e-6);
    record(out, "simulate/speed_error", rec.relative_error, 0.02, "eps=1/8, short run");
  });
}

}  // namespace

std::vector<CheckResult> run_invariant_suite() {
  Results out;
  check_medium(out);
  check_hermiticity(out);
  check_modes(out);
  check_bands(out);
  check_effective(out);
  check_coupling(out);
  check_ergodic(out);
  check_simulate(out);
  return out;
}

void write_check_report(std::ostream& out, const std::vector<CheckResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << fmt17(r.value)
        << " tol=" << fmt17(r.tolerance);
    if (!r.detail.empty()) out << " " << r.detail;
    out << "\n";
    failed += r.passed ? 0 : 1;
  }
  out << "summary: " << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
      << " passed\n";
}

}  // namespace hfh
