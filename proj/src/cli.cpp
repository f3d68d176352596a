#include "hfh/cli.hpp"

#include "hfh/bands.hpp"
#include "hfh/bloch.hpp"
#include "hfh/check.hpp"
#include "hfh/config.hpp"
#include "hfh/effective.hpp"
#include "hfh/ergodic.hpp"
#include "hfh/errors.hpp"
#include "hfh/io.hpp"
#include "hfh/simulate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace hfh {

using nlohmann::json;

std::string digest_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

namespace {

// JSON with every float in %.17g; non-finite numbers become null.
void write_json(std::ostream& out, const json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << json(it.key()).dump() << ": ";
        write_json(out, it.value(), indent + 2);
      }
      out << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      const bool nested = std::any_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out << (nested ? "[\n" + pad : "[");
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << (nested ? ",\n" + pad : ", ");
        write_json(out, j[i], indent + 2);
      }
      out << (nested ? "\n" + close + "]" : "]");
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? fmt17(x) : std::string("null"));
      return;
    }
    default:
      out << j.dump();
  }
}

json complex_json(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Everything a command needs to stamp its artifacts.
struct Invocation {
  std::string command;
  json options = json::object();
  json config;  // null for commands without a medium
  std::string digest;

  std::string header() const {
    return std::string("# hfh ") + kToolVersion + " config_digest=" + digest + "\n";
  }
  json meta() const {
    return json{{"tool", "hfh"}, {"version", kToolVersion}, {"command", command},
                {"config_digest", digest}};
  }
  void seal() {
    digest = digest_hex(json{{"command", command}, {"config", config}, {"options", options},
                             {"version", kToolVersion}}
                            .dump());
  }
};

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open output file '" + path + "'");
  body(file);
  if (!file) throw ValidationError("failed writing output file '" + path + "'");
}

void emit_json(const std::string& path, std::ostream& fallback, const json& j) {
  emit(path, fallback, [&](std::ostream& o) {
    write_json(o, j);
    o << "\n";
  });
}

Eigen::VectorXd to_k(const std::vector<double>& values, int dims, const std::string& flag) {
  if (static_cast<int>(values.size()) != dims) {
    throw ValidationError(flag + " needs " + std::to_string(dims) + " comma-separated component(s), got " +
                          std::to_string(values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), dims);
}

// Options that only pick output locations stay out of the digest.
bool is_output_option(const std::string& name) {
  return name == "--out" || name == "--json" || name == "--out-dir" || name == "--config";
}

json collect_options(const CLI::App& sub) {
  json opts = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_name();
    if (opt->count() == 0 || name == "--help" || is_output_option(name)) continue;
    std::string joined;
    for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
    opts[name] = joined;
  }
  return opts;
}

}  // namespace

// --- commands ---------------------------------------------------------------

namespace {

struct MediumArgs {
  std::string config;
  int cutoff = 0;  // operator cutoff; 0 takes the config value
};

struct Loaded {
  MediumConfig cfg;
  int cutoff;
  int dims;
};

Loaded load(const MediumArgs& args, Invocation& inv) {
  MediumConfig cfg = load_medium_config(args.config);
  const int cutoff = args.cutoff > 0 ? args.cutoff : cfg.operator_cutoff;
  inv.config = cfg.source;
  inv.seal();
  const int dims = cell_of(cfg.medium).dims();
  return Loaded{std::move(cfg), cutoff, dims};
}

struct BandsArgs {
  MediumArgs medium;
  std::vector<double> k_start, k_end;
  int samples = 50;
  int band = 1;
  std::string out;
};

int cmd_bands(const BandsArgs& a, Invocation& inv, std::ostream& out) {
  const Loaded l = load(a.medium, inv);
  const DispersionTable table =
      sweep_path(l.cfg.medium, to_k(a.k_start, l.dims, "--k-start"), to_k(a.k_end, l.dims, "--k-end"),
                 a.samples, a.band, l.cutoff);
  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header();
    write_dispersion_csv(o, table);
  });
  return kExitOk;
}

struct GroupvelArgs {
  MediumArgs medium;
  std::vector<double> k;
  int band = 1;
  double h = 0.0;
  std::string out;
};

int cmd_groupvel(const GroupvelArgs& a, Invocation& inv, std::ostream& out) {
  const Loaded l = load(a.medium, inv);
  const auto g = group_velocity_fd(l.cfg.medium, to_k(a.k, l.dims, "--k"), a.band, a.h, l.cutoff);
  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header() << "axis,velocity,coarse,fine,step,richardson_gap\n";
    for (Eigen::Index i = 0; i < g.velocity.size(); ++i) {
      o << i + 1 << "," << fmt17(g.velocity(i)) << "," << fmt17(g.coarse(i)) << "," << fmt17(g.fine(i))
        << "," << fmt17(g.step) << "," << fmt17(g.richardson_gap) << "\n";
    }
  });
  return kExitOk;
}

struct EffectiveArgs {
  MediumArgs medium;
  std::vector<double> k;
  int band = 1;
  std::string out;
  std::string json_out;
};

int cmd_effective(const EffectiveArgs& a, Invocation& inv, std::ostream& out) {
  const Loaded l = load(a.medium, inv);
  const Eigen::VectorXd k = to_k(a.k, l.dims, "--k");
  const BlochMode mode = solve_mode(l.cfg.medium, k, a.band, l.cutoff);
  const EffectiveCoefficients e = effective_coefficients(mode, l.cfg.medium);
  const EnvelopeEquation env = envelope_equation(e);

  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header();
    write_effective_csv(o, e);
  });
  if (a.json_out.empty()) return kExitOk;

  json d = json::array();
  for (Eigen::Index j = 0; j < e.d.size(); ++j) d.push_back(complex_json(e.d(j)));
  json j{{"meta", inv.meta()},
         {"family", std::string(to_string(e.family))},
         {"k", vector_json(k)},
         {"band", e.band},
         {"omega", e.omega},
         {"gap", mode.gap},
         {"d", d},
         {"v", vector_json(e.v)},
         {"max_imag_ratio", e.max_imag_ratio},
         {"envelope", {{"speed", env.speed}, {"direction", vector_json(env.direction)},
                       {"slowness", vector_json(env.slowness)}}}};
  // Independent finite-difference check of the same velocity.
  try {
    const auto g = group_velocity_fd(l.cfg.medium, k, a.band, 0.0, l.cutoff);
    j["group_velocity_fd"] = vector_json(g.velocity);
    j["identity_gap"] = (e.v - g.velocity).cwiseAbs().maxCoeff();
  } catch (const NumericalError& ex) {
    j["group_velocity_fd"] = nullptr;
    j["group_velocity_fd_error"] = ex.what();
  }
  emit_json(a.json_out, out, j);
  return kExitOk;
}

struct CoupleArgs {
  MediumArgs medium;
  std::vector<double> k, m;
  std::vector<int> bands = {1, 1};
  std::vector<int> supercells = {4, 8, 16, 32};
  double time_window = 0.0;
  std::string out;
  std::string json_out;
};

json slope_json(double slope) {
  if (std::isinf(slope)) return slope < 0 ? "-inf" : "inf";
  return slope;
}

int cmd_couple(const CoupleArgs& a, Invocation& inv, std::ostream& out) {
  const Loaded l = load(a.medium, inv);
  if (a.bands.size() != 2) throw ValidationError("--bands needs two band indices, e.g. 1,2");
  const BlochMode m1 = solve_mode(l.cfg.medium, to_k(a.k, l.dims, "--k"), a.bands[0], l.cutoff);
  const BlochMode m2 = solve_mode(l.cfg.medium, to_k(a.m, l.dims, "--m"), a.bands[1], l.cutoff);
  const CouplingReport r = coupling_coefficients(m1, m2, l.cfg.medium, a.supercells, a.time_window);

  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header();
    write_coupling_csv(o, r);
  });

  json series = json::array();
  for (const CouplingSeries& s : r.series) {
    series.push_back({{"j", s.j}, {"p", s.p}, {"l", s.l}, {"limit", complex_json(s.limit)},
                      {"slope", slope_json(s.slope)}, {"vanishing", s.vanishing}});
  }
  const json j{{"meta", inv.meta()},
               {"k", vector_json(r.k)},
               {"m", vector_json(r.m)},
               {"omega1", r.omega1},
               {"omega2", r.omega2},
               {"bands", {r.band1, r.band2}},
               {"time_window", r.time_window},
               {"supercells", a.supercells},
               {"resonant", r.resonant},
               {"equivalent", r.equivalent},
               {"multiple_defect", r.multiple_defect},
               {"max_cross_limit", r.max_cross_limit()},
               {"worst_cross_slope", slope_json(r.worst_cross_slope())},
               {"series", series}};
  if (!a.json_out.empty()) emit_json(a.json_out, out, j);
  if (!a.out.empty() && a.json_out.empty()) {
    out << inv.header() << "resonant=" << r.resonant << " equivalent=" << r.equivalent
        << " max_cross_limit=" << fmt17(r.max_cross_limit())
        << " worst_cross_slope=" << fmt17(r.worst_cross_slope()) << "\n";
  }
  return kExitOk;
}

struct ErgodicArgs {
  std::string fixture = "all";
  std::vector<double> windows = {4.5, 9.5, 19.5, 39.5};
  std::string out;
  std::string out_dir;
};

std::string file_stem(const std::string& name) {
  std::string stem = name;
  for (char& c : stem)
    if (c == '/') c = '_';
  return stem;
}

int cmd_ergodic(const ErgodicArgs& a, Invocation& inv, std::ostream& out) {
  inv.seal();
  for (double w : a.windows) {
    if (!(w > 0.0)) throw ValidationError("--windows must be positive");
  }
  std::vector<ErgodicFixture> chosen;
  for (auto& fx : builtin_ergodic_fixtures()) {
    if (a.fixture == "all" || a.fixture == fx.name) chosen.push_back(std::move(fx));
  }
  if (chosen.empty()) throw ValidationError("unknown ergodic fixture '" + a.fixture + "'");

  if (chosen.size() == 1) {
    const WindowAverageResult r = chosen.front().run(a.windows);
    emit(a.out, out, [&](std::ostream& o) {
      o << inv.header();
      write_window_csv(o, r);
    });
    return kExitOk;
  }

  if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);
  std::vector<WindowAverageResult> results;
  for (const auto& fx : chosen) {
    results.push_back(fx.run(a.windows));
    if (!a.out_dir.empty()) {
      emit((std::filesystem::path(a.out_dir) / (file_stem(fx.name) + ".csv")).string(), out,
           [&](std::ostream& o) {
             o << inv.header();
             write_window_csv(o, results.back());
           });
    }
  }
  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header() << "fixture,classification,re_limit,im_limit,decay_constant,max_scaled_error\n";
    for (std::size_t f = 0; f < chosen.size(); ++f) {
      const WindowAverageResult& r = results[f];
      double scaled = 0.0;
      for (std::size_t i = 0; i < r.windows.size(); ++i) {
        scaled = std::max(scaled, std::abs(r.values[i] - r.analytic_limit) * r.windows[i]);
      }
      o << chosen[f].name << "," << r.classification << "," << fmt17(r.analytic_limit.real()) << ","
        << fmt17(r.analytic_limit.imag()) << "," << fmt17(r.decay_constant) << "," << fmt17(scaled) << "\n";
    }
  });
  return kExitOk;
}

struct SimulateArgs {
  MediumArgs medium;
  std::vector<double> k;
  int band = 1;
  double epsilon = 1.0 / 32.0;
  double center = 2.5;
  double width = 0.5;
  bool constant_envelope = false;
  double domain = 8.0;
  int points_per_cell = 64;
  double t_final = 2.0;
  double cfl = 0.5;
  int frames = 41;
  bool no_transport_correction = false;
  bool sensitivity = false;
  std::string out_dir;
};

json simulation_json(const SimulationRecord& r) {
  return json{{"measured_speed", r.measured_speed}, {"predicted_speed", r.predicted_speed},
              {"relative_error", r.relative_error}, {"fit_residual", r.fit_residual},
              {"energy_drift", r.energy_drift},     {"unstable", r.unstable},
              {"masked_points", r.masked_points},   {"transport_correction", r.ic.transport_correction}};
}

int cmd_simulate(const SimulateArgs& a, Invocation& inv, std::ostream& out) {
  const Loaded l = load(a.medium, inv);
  const auto* medium = std::get_if<ScalarMedium>(&l.cfg.medium);
  if (medium == nullptr || l.dims != 1) {
    throw UnsupportedError("simulate supports 1D scalar media only");
  }
  const Eigen::VectorXd k = to_k(a.k, 1, "--k");
  const BlochMode mode = solve_mode(l.cfg.medium, k, a.band, l.cutoff);
  const EffectiveCoefficients e = effective_coefficients(mode, l.cfg.medium);
  const double vg = e.v(0);

  EnvelopeSpec env;
  env.kind = a.constant_envelope ? EnvelopeSpec::Kind::constant : EnvelopeSpec::Kind::gaussian;
  env.center = a.center;
  env.width = a.width;
  GridSpec grid{a.domain, a.points_per_cell};

  const WavePacketIC ic = build_wavepacket_ic(mode, *medium, a.epsilon, env, grid, vg, !a.no_transport_correction);
  SimulationRecord rec = run_fdtd_1d(ic, a.t_final, a.cfl, a.frames);
  int masked = 0;
  rec.envelope_frames = extract_envelope(rec, mode, a.epsilon, &masked);
  rec.masked_points = masked;
  if (!a.constant_envelope) {
    const VelocityFit fit = measure_packet_velocity(rec.envelope_frames);
    rec.measured_speed = fit.speed;
    rec.fit_residual = fit.residual;
    rec.predicted_speed = vg;
    rec.relative_error = std::abs(fit.speed - vg) / std::abs(vg);
  }

  json meta{{"meta", inv.meta()},
            {"epsilon", a.epsilon},
            {"k", vector_json(k)},
            {"band", a.band},
            {"omega", mode.omega},
            {"grid", {{"domain", ic.domain}, {"points_per_cell", ic.points_per_cell}, {"cells", ic.cells},
                      {"dx", ic.dx}}},
            {"envelope", {{"kind", a.constant_envelope ? "constant" : "gaussian"}, {"center", env.center},
                          {"width", env.width}}},
            {"dt", rec.dt},
            {"cfl", rec.cfl},
            {"steps", rec.steps},
            {"t_final", a.t_final},
            {"result", simulation_json(rec)}};
  try {
    meta["group_velocity_fd"] = group_velocity_fd(l.cfg.medium, k, a.band, 0.0, l.cutoff).velocity(0);
  } catch (const NumericalError& ex) {
    meta["group_velocity_fd"] = nullptr;
    meta["group_velocity_fd_error"] = ex.what();
  }
  if (a.sensitivity && !a.constant_envelope) {
    // Same run with the other initial-velocity protocol.
    const SimulationRecord alt = simulate_packet(mode, *medium, a.epsilon, env, grid, vg, a.t_final, a.cfl,
                                                 a.no_transport_correction);
    meta["sensitivity"] = simulation_json(alt);
  }

  if (a.out_dir.empty()) {
    out << inv.header();
    write_frames_csv(out, rec);
  } else {
    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);
    emit((dir / "frames.csv").string(), out, [&](std::ostream& o) {
      o << inv.header();
      write_frames_csv(o, rec);
    });
    for (std::size_t f = 0; f < rec.envelope_frames.size(); ++f) {
      std::ostringstream name;
      name << "envelope_" << std::setw(3) << std::setfill('0') << f << ".csv";
      emit((dir / name.str()).string(), out, [&](std::ostream& o) {
        o << inv.header();
        write_envelope_csv(o, rec.envelope_frames[f]);
      });
    }
    emit_json((dir / "meta.json").string(), out, meta);
    out << inv.header() << "measured_speed=" << fmt17(rec.measured_speed) << " predicted_speed=" << fmt17(vg)
        << " relative_error=" << fmt17(rec.relative_error) << " energy_drift=" << fmt17(rec.energy_drift)
        << "\n";
  }
  if (rec.unstable) {
    throw NumericalError("run flagged unstable: relative energy drift " + fmt17(rec.energy_drift));
  }
  return kExitOk;
}

struct CheckArgs {
  std::string out;
};

int cmd_check(const CheckArgs& a, Invocation& inv, std::ostream& out) {
  inv.seal();
  const std::vector<CheckResult> results = run_invariant_suite();
  emit(a.out, out, [&](std::ostream& o) {
    o << inv.header();
    write_check_report(o, results);
  });
  for (const auto& r : results)
    if (!r.passed) return kExitNumerical;
  return kExitOk;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-frequency homogenization toolkit", "hfh"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  auto add_medium = [](CLI::App* sub, MediumArgs& m) {
    sub->add_option("--config", m.config, "medium descriptor (JSON)")->required();
    sub->add_option("--cutoff", m.cutoff, "plane-wave cutoff of the Bloch operator (default from config)")
        ->check(CLI::PositiveNumber);
  };

  BandsArgs bands;
  auto* s_bands = app.add_subcommand("bands", "dispersion relation along a straight k path");
  add_medium(s_bands, bands.medium);
  s_bands->add_option("--k-start", bands.k_start, "path start, comma-separated")->required()->delimiter(',');
  s_bands->add_option("--k-end", bands.k_end, "path end, comma-separated")->required()->delimiter(',');
  s_bands->add_option("--samples", bands.samples, "points on the path")->check(CLI::Range(2, 100000));
  s_bands->add_option("--band", bands.band, "1-based band index")->check(CLI::PositiveNumber);
  s_bands->add_option("--out", bands.out, "CSV path (default stdout)");

  GroupvelArgs gv;
  auto* s_gv = app.add_subcommand("groupvel", "finite-difference group velocity with Richardson check");
  add_medium(s_gv, gv.medium);
  s_gv->add_option("--k", gv.k, "wavevector, comma-separated")->required()->delimiter(',');
  s_gv->add_option("--band", gv.band, "1-based band index")->check(CLI::PositiveNumber);
  s_gv->add_option("--step", gv.h, "difference step (default 1e-4 * 2 pi / lambda_min)");
  s_gv->add_option("--out", gv.out, "CSV path (default stdout)");

  EffectiveArgs eff;
  auto* s_eff = app.add_subcommand("effective", "homogenized transport coefficients of one Bloch mode");
  add_medium(s_eff, eff.medium);
  s_eff->add_option("--k", eff.k, "wavevector, comma-separated")->required()->delimiter(',');
  s_eff->add_option("--band", eff.band, "1-based band index")->check(CLI::PositiveNumber);
  s_eff->add_option("--out", eff.out, "CSV path (default stdout)");
  s_eff->add_option("--json", eff.json_out, "JSON summary path");

  CoupleArgs cpl;
  auto* s_cpl = app.add_subcommand("couple", "supercell coupling averages between two Bloch modes");
  add_medium(s_cpl, cpl.medium);
  s_cpl->add_option("--k", cpl.k, "first wavevector")->required()->delimiter(',');
  s_cpl->add_option("--m", cpl.m, "second wavevector")->required()->delimiter(',');
  s_cpl->add_option("--bands", cpl.bands, "band pair, e.g. 1,2")->delimiter(',')->expected(2);
  s_cpl->add_option("--supercells", cpl.supercells, "supercell counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  s_cpl->add_option("--time-window", cpl.time_window, "time window T (default 2 pi / max(omega, 1))");
  s_cpl->add_option("--out", cpl.out, "CSV path (default stdout)");
  s_cpl->add_option("--json", cpl.json_out, "JSON summary path");

  ErgodicArgs erg;
  auto* s_erg = app.add_subcommand("ergodic", "window averages of the built-in averaging fixtures");
  s_erg->add_option("--fixture", erg.fixture, "fixture name or 'all'");
  s_erg->add_option("--windows", erg.windows, "window lengths")->delimiter(',');
  s_erg->add_option("--out", erg.out, "CSV path (default stdout)");
  s_erg->add_option("--out-dir", erg.out_dir, "per-fixture CSVs when running all fixtures");

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "fine-grid wave packet run in 1D");
  add_medium(s_sim, sim.medium);
  s_sim->add_option("--k", sim.k, "carrier wavevector")->required()->delimiter(',');
  s_sim->add_option("--band", sim.band, "1-based band index")->check(CLI::PositiveNumber);
  s_sim->add_option("--epsilon", sim.epsilon, "scale separation, 0 < eps <= 1/8")->check(CLI::Range(1e-6, 0.125));
  s_sim->add_option("--center", sim.center, "Gaussian center (slow units)");
  s_sim->add_option("--width", sim.width, "Gaussian width (slow units)")->check(CLI::PositiveNumber);
  s_sim->add_flag("--constant-envelope", sim.constant_envelope, "h = 1 (plane-wave run)");
  s_sim->add_option("--domain", sim.domain, "periodic domain length (slow units)")->check(CLI::PositiveNumber);
  s_sim->add_option("--points-per-cell", sim.points_per_cell, "grid points per eps-cell")
      ->check(CLI::Range(kMinPointsPerCell, 1 << 16));
  s_sim->add_option("--t-final", sim.t_final, "final time")->check(CLI::PositiveNumber);
  s_sim->add_option("--cfl", sim.cfl, "Courant number")->check(CLI::Range(1e-3, kMaxCfl));
  s_sim->add_option("--frames", sim.frames, "stored snapshots")->check(CLI::Range(5, 10000));
  s_sim->add_flag("--no-transport-correction", sim.no_transport_correction, "naive omega-only initial velocity");
  s_sim->add_flag("--sensitivity", sim.sensitivity, "also run the other initialization and report both");
  s_sim->add_option("--out-dir", sim.out_dir, "directory for frames.csv, envelope_*.csv, meta.json");

  CheckArgs chk;
  auto* s_chk = app.add_subcommand("check", "run every module's invariant suite");
  s_chk->add_option("--out", chk.out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hfh: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Invocation inv;
  inv.command = chosen->get_name();
  inv.options = collect_options(*chosen);

  try {
    if (chosen == s_bands) return cmd_bands(bands, inv, out);
    if (chosen == s_gv) return cmd_groupvel(gv, inv, out);
    if (chosen == s_eff) return cmd_effective(eff, inv, out);
    if (chosen == s_cpl) return cmd_couple(cpl, inv, out);
    if (chosen == s_erg) return cmd_ergodic(erg, inv, out);
    if (chosen == s_sim) return cmd_simulate(sim, inv, out);
    return cmd_check(chk, inv, out);
  } catch (const ValidationError& e) {
    err << "hfh " << inv.command << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const UnsupportedError& e) {
    err << "hfh " << inv.command << ": unsupported: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "hfh " << inv.command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hfh " << inv.command << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "hfh " << inv.command << ": internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace hfh
