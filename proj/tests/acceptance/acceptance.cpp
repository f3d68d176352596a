// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path-to-hfh> <config-dir>

#include "hfh/bands.hpp"
#include "hfh/check.hpp"
#include "hfh/config.hpp"
#include "hfh/effective.hpp"
#include "hfh/ergodic.hpp"
#include "hfh/simulate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hfh;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Eigen::VectorXd kvec(double k) { return Eigen::VectorXd::Constant(1, k); }

int failures = 0;

// Exceptions count as failures; runtime limits are part of the verdict.
void criterion(int id, const std::string& title, double limit_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0.0 && seconds > limit_seconds) {
    v.pass = false;
    v.detail += " over time limit " + fmt(limit_seconds) + " s";
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS " : "FAIL ") << id << " " << title << ": " << v.detail << " (" << fmt(seconds)
            << " s)" << std::endl;
}

std::string config_dir;
std::string hfh_path;

double max_coefficient_gap(const FourierField& f, const FourierField& g) {
  double gap = 0.0;
  for (std::size_t i = 0; i < f.modes().size(); ++i) {
    gap = std::max(gap, std::abs(f[f.modes().at(i)] - g[f.modes().at(i)]));
  }
  return gap;
}

MediumConfig load(const std::string& name) { return load_medium_config(config_dir + "/" + name); }

Verdict constant_exactness() {
  const MediumConfig cfg = load("constant.json");
  const DispersionTable t = sweep_path(cfg.medium, kvec(0.1), kvec(3.0), 50, 1, cfg.operator_cutoff);
  double worst = 0.0;
  for (const auto& p : t.points) worst = std::max(worst, std::abs(p.omega - p.k(0)));
  double gv = 0.0;
  for (const auto& p : t.points) {
    const auto g = group_velocity_fd(cfg.medium, p.k, 1, 0.0, cfg.operator_cutoff);
    gv = std::max(gv, std::abs(g.velocity(0) - 1.0));
  }
  return {worst < 1e-10 && gv < 1e-8, "max|w-k|=" + fmt(worst) + " max|v_fd-1|=" + fmt(gv)};
}

Verdict transport_identity() {
  double worst = 0.0;
  for (const char* name : {"two_phase.json", "mathieu.json", "coupled_vector.json"}) {
    const MediumConfig cfg = load(name);
    const int cutoff = std::max(cfg.operator_cutoff, 16);
    for (double k : {0.3 * kPi, 0.5 * kPi, 0.7 * kPi}) {
      for (int band : {1, 2}) {
        const BlochMode mode = solve_mode(cfg.medium, kvec(k), band, cutoff);
        const EffectiveCoefficients e = effective_coefficients(mode, cfg.medium);
        const auto g = group_velocity_fd(cfg.medium, kvec(k), band, 0.0, cutoff);
        worst = std::max(worst, std::abs(e.v(0) - g.velocity(0)));
      }
    }
  }
  return {worst < 1e-6, "max|Re(d1/d0)-v_fd|=" + fmt(worst) + " over 18 modes"};
}

Verdict non_coupling() {
  const MediumConfig cfg = load("two_phase.json");
  const Medium& m = cfg.medium;
  const std::vector<int> counts = {4, 8, 16, 32};
  const BlochMode base = solve_mode(m, kvec(kPi / 2), 1, 16);
  struct Pair {
    std::string label;
    BlochMode first;
    BlochMode second;
  };
  const std::vector<Pair> pairs = {
      {"bands 1/2 at pi/2", base, solve_mode(m, kvec(kPi / 2), 2, 16)},
      {"band 1 at +-pi/3", solve_mode(m, kvec(kPi / 3), 1, 16), solve_mode(m, kvec(-kPi / 3), 1, 16)},
      {"bands 1/3 at pi/2", base, solve_mode(m, kvec(kPi / 2), 3, 16)},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const Pair& p : pairs) {
    const CouplingReport r = coupling_coefficients(p.first, p.second, m, counts);
    const bool pass = !r.resonant && r.worst_cross_slope() <= -0.9 && r.max_cross_limit() < 1e-6;
    ok = ok && pass;
    detail << p.label << " slope=" << fmt(r.worst_cross_slope()) << " limit=" << fmt(r.max_cross_limit()) << "; ";
  }
  const CouplingReport shifted =
      coupling_coefficients(base, solve_mode(m, kvec(kPi / 2 + 2.0 * kPi), 1, 16), m, counts);
  ok = ok && shifted.resonant && shifted.equivalent;
  detail << "k+2pi equivalent=" << (shifted.equivalent ? "yes" : "no");
  return {ok, detail.str()};
}

Verdict collapse() {
  double worst = 0.0;
  const MediumConfig cfg = load("two_phase.json");
  for (int band : {1, 2, 3}) {
    const BlochMode mode = solve_mode(cfg.medium, kvec(0.8), band, 16);
    const EffectiveCoefficients e = effective_coefficients(mode, cfg.medium);
    const CouplingReport r = coupling_coefficients(mode, mode, cfg.medium, {1, 2, 4, 8, 16, 32});
    for (const CouplingEntry& entry : r.entries) {
      if (entry.p == 1 && entry.l == 1) worst = std::max(worst, std::abs(entry.average - e.d(entry.j)));
    }
  }
  return {worst < 1e-10, "max|self average - cell value|=" + fmt(worst)};
}

Verdict averaging_lemmas() {
  const std::vector<double> windows = {3.7, 7.3, 15.1, 31.9};
  const double held_out = 2.0 * windows.back();
  int passed = 0, total = 0;
  double worst_ratio = 0.0, worst_integer = 0.0;
  for (const ErgodicFixture& fx : builtin_ergodic_fixtures()) {
    ++total;
    const WindowAverageResult r = fx.run(windows);
    bool ok = std::abs(r.analytic_limit - fx.expected_limit) < 1e-12;
    std::vector<double> all = windows;
    all.push_back(held_out);
    for (double a : all) {
      const double scaled = std::abs(r.evaluate(a) - r.analytic_limit) * a;
      ok = ok && scaled <= r.decay_constant + 1e-12;
      if (r.decay_constant > 0.0) worst_ratio = std::max(worst_ratio, scaled / r.decay_constant);
    }
    if (fx.exact_on_integer_windows) {
      for (double a : {1.0, 2.0, 3.0, 5.0, 8.0}) {
        const double gap = std::abs(r.evaluate(a) - r.analytic_limit);
        worst_integer = std::max(worst_integer, gap);
        ok = ok && gap < 1e-12;
      }
    }
    passed += ok ? 1 : 0;
  }
  return {passed == total && total == 12, std::to_string(passed) + "/" + std::to_string(total) +
                                              " fixtures, max a|err|/C=" + fmt(worst_ratio) +
                                              " max integer-window gap=" + fmt(worst_integer)};
}

Verdict envelope_transport() {
  const MediumConfig cfg = load("two_phase.json");
  const auto& medium = std::get<ScalarMedium>(cfg.medium);
  const Eigen::VectorXd k = kvec(kPi / 2);
  const int cutoff = 32;
  const BlochMode mode = solve_mode(cfg.medium, k, 1, cutoff);
  const double fd = group_velocity_fd(cfg.medium, k, 1, 0.0, cutoff).velocity(0);
  EnvelopeSpec envelope;
  envelope.center = 2.5;
  envelope.width = 0.5;
  GridSpec grid;
  grid.domain = 8.0;
  grid.points_per_cell = 64;
  std::vector<double> errors;
  double drift = 0.0;
  for (double eps : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    const SimulationRecord rec = simulate_packet(mode, medium, eps, envelope, grid, fd, 2.0, 0.5);
    errors.push_back(std::abs(rec.measured_speed - fd) / std::abs(fd));
    drift = std::max(drift, rec.energy_drift);
  }
  const bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
  return {errors[2] < 0.02 && monotone && drift < 1e-6,
          "rel err eps=1/8,1/16,1/32: " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " + fmt(errors[2]) +
              " drift=" + fmt(drift)};
}

Verdict structural_invariants() {
  double hermitian = 0.0, d0 = 0.0, maxwell = 0.0, phase = 0.0;
  std::mt19937_64 rng(2024);
  std::vector<std::pair<Medium, Eigen::VectorXd>> operators;
  for (const char* name : {"constant.json", "two_phase.json", "mathieu.json", "coupled_vector.json"}) {
    operators.emplace_back(load(name).medium, kvec(1.3));
  }
  operators.emplace_back(load("square_inclusion_2d.json").medium, Eigen::Vector2d(0.7, -0.3));
  for (int t = 0; t < 5; ++t) {
    operators.emplace_back(fixtures::random_scalar_medium(rng, 1), kvec(3.0 * fixtures::uniform(rng)));
    operators.emplace_back(fixtures::random_scalar_medium(rng, 2), Eigen::Vector2d(0.4, 1.1));
    operators.emplace_back(fixtures::random_vector_medium(rng), kvec(3.0 * fixtures::uniform(rng)));
    operators.emplace_back(fixtures::random_schrodinger_medium(rng, 1), kvec(3.0 * fixtures::uniform(rng)));
    operators.emplace_back(fixtures::random_schrodinger_medium(rng, 2), Eigen::Vector2d(-0.9, 0.2));
  }
  for (const auto& [m, k] : operators) {
    const BlochOperator op = assemble_operator(m, k, k.size() == 1 ? 16 : 4);
    hermitian = std::max({hermitian, hermiticity_defect(op.stiffness), hermiticity_defect(op.mass)});
  }

  // a_ijkl = eps_ipk eps_jql mu^{-1}_pq from a random symmetric field.
  FourierSpec mu;
  Eigen::MatrixXcd base = Eigen::MatrixXcd::Identity(3, 3) * 2.0;
  mu.terms.push_back({MultiIndex{}, base});
  Eigen::MatrixXcd d(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) d(i, j) = d(j, i) = 0.1 * fixtures::uniform(rng);
  mu.terms.push_back({MultiIndex{{1, 1, 0}}, d});
  mu.terms.push_back({MultiIndex{{-1, -1, 0}}, d.conjugate()});
  const MatrixField a = maxwell_tensor_from_permeability(field_from_spec(mu, Cell({1.0, 1.0, 1.0}), 1, 3, 3));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) maxwell = std::max(maxwell, max_coefficient_gap(a(i, j), a(j, i)));

  for (int trial = 0; trial < 100; ++trial) {
    const Medium m = trial % 2 == 0 ? Medium{fixtures::random_scalar_medium(rng, 1)}
                                    : Medium{fixtures::random_vector_medium(rng)};
    const BlochMode mode = solve_mode(m, kvec(0.2 + 2.5 * fixtures::uniform(rng)), 1 + trial % 3, 16);
    const EffectiveCoefficients e = effective_coefficients(mode, m);
    d0 = std::max(d0, std::abs(e.d(0) - cd(0.0, -2.0 * mode.omega)));
    BlochMode turned = mode;
    turned.v0 *= std::polar(1.0, 2.0 * kPi * fixtures::uniform(rng));
    const EffectiveCoefficients t = effective_coefficients(turned, m);
    phase = std::max(phase, std::abs(e.d(1) / e.d(0) - t.d(1) / t.d(0)));
  }
  const bool ok = hermitian < 1e-12 && d0 < 1e-9 && maxwell == 0.0 && phase < 1e-12;
  return {ok, "hermiticity=" + fmt(hermitian) + " d0=" + fmt(d0) + " maxwell=" + fmt(maxwell) +
                  " phase=" + fmt(phase) + " (100 trials)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Runs every example command twice into separate directories and compares all files.
Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "hfh_acceptance";
  fs::remove_all(root);
  const std::string two_phase = config_dir + "/two_phase.json";
  auto commands = [&](const fs::path& dir) {
    const std::string d = dir.string();
    return std::vector<std::string>{
        "check --out " + d + "/check.txt",
        "bands --config " + two_phase + " --k-start 0.1 --k-end 3.04 --samples 50 --band 1 --out " + d + "/bands.csv",
        "groupvel --config " + two_phase + " --k 1.5708 --band 1 --out " + d + "/groupvel.csv",
        "effective --config " + two_phase + " --k 1.5708 --band 1 --out " + d + "/effective.csv --json " + d +
            "/effective.json",
        "couple --config " + two_phase + " --k 1.5708 --m 1.0 --bands 1,1 --supercells 4,8,16,32 --out " + d +
            "/couple.csv --json " + d + "/couple.json",
        "ergodic --fixture all --out " + d + "/ergodic.csv --out-dir " + d + "/ergodic",
        "simulate --config " + two_phase + " --k 1.5708 --epsilon 0.125 --out-dir " + d + "/simulate",
    };
  };
  for (const char* run : {"a", "b"}) {
    fs::create_directories(root / run);
    for (const std::string& c : commands(root / run)) {
      const std::string line = "\"" + hfh_path + "\" " + c + " > " + (root / run / "stdout.txt").string();
      if (std::system(line.c_str()) != 0) return {false, "command failed: hfh " + c};
    }
    fs::remove(root / run / "stdout.txt");
  }
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const fs::path twin = root / "b" / fs::relative(entry.path(), root / "a");
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
      return {false, "outputs differ: " + fs::relative(entry.path(), root / "a").string()};
    }
  }
  fs::remove_all(root);
  return {files > 0, std::to_string(files) + " files byte-identical across two runs of 7 commands"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <path-to-hfh> <config-dir>\n";
    return 64;
  }
  hfh_path = argv[1];
  config_dir = argv[2];

  criterion(1, "constant-medium exactness", 1.0, constant_exactness);
  criterion(2, "transport identity", 30.0, transport_identity);
  criterion(3, "non-coupling", 60.0, non_coupling);
  criterion(4, "supercell collapse", 0.0, collapse);
  criterion(5, "averaging lemmas", 0.0, averaging_lemmas);
  criterion(6, "envelope transport", 120.0, envelope_transport);
  criterion(7, "structural invariants", 0.0, structural_invariants);
  criterion(8, "determinism", 0.0, determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
