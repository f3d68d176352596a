#include "hfh/config.hpp"

#include "hfh/errors.hpp"

#include <fstream>
#include <sstream>

namespace hfh {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ValidationError("schema error at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path + "/" + key, "missing required key");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
  return out;
}

cd complex_number(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_object()) {
    const double re = j.contains("re") ? number(j["re"], path + "/re") : 0.0;
    const double im = j.contains("im") ? number(j["im"], path + "/im") : 0.0;
    return {re, im};
  }
  schema_error(path, "expected a number or {\"re\", \"im\"}");
}

// Scalars become 1x1; arrays of rows become matrices.
Eigen::MatrixXcd complex_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) return Eigen::MatrixXcd::Constant(1, 1, complex_number(j, path));
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0 || !j[0].is_array()) schema_error(path, "expected a matrix as an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) schema_error(rp, "ragged matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_number(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
    }
  }
  return m;
}

Eigen::MatrixXd real_matrix(const json& j, const std::string& path) {
  const Eigen::MatrixXcd m = complex_matrix(j, path);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) schema_error(path, "piecewise values must be real");
  return m.real();
}

FieldSpec field_spec(const json& j, const std::string& default_type, int dims, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected a field object");
  const std::string type = j.contains("type") ? j["type"].get<std::string>() : default_type;
  if (type == "piecewise") {
    PiecewiseSpec spec{real_matrix(require(j, "background", path), path + "/background"), {}};
    if (j.contains("regions")) {
      const json& regions = j["regions"];
      if (!regions.is_array()) schema_error(path + "/regions", "expected an array");
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const std::string rp = path + "/regions/" + std::to_string(i);
        Region r{numbers(require(regions[i], "lo", rp), rp + "/lo"),
                 numbers(require(regions[i], "hi", rp), rp + "/hi"),
                 real_matrix(require(regions[i], "value", rp), rp + "/value")};
        if (static_cast<int>(r.lo.size()) != dims || static_cast<int>(r.hi.size()) != dims) {
          schema_error(rp, "lo and hi must have one entry per cell axis");
        }
        spec.regions.push_back(std::move(r));
      }
    }
    return spec;
  }
  if (type == "fourier") {
    FourierSpec spec;
    const json& terms = require(j, "terms", path);
    if (!terms.is_array()) schema_error(path + "/terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = path + "/terms/" + std::to_string(i);
      const json& n = require(terms[i], "n", tp);
      if (!n.is_array() || static_cast<int>(n.size()) != dims) schema_error(tp + "/n", "need one index per axis");
      FourierTerm t{MultiIndex{}, complex_matrix(require(terms[i], "value", tp), tp + "/value")};
      for (int a = 0; a < dims; ++a) t.n[a] = integer(n[static_cast<std::size_t>(a)], tp + "/n/" + std::to_string(a));
      spec.terms.push_back(std::move(t));
    }
    return spec;
  }
  schema_error(path + "/type", "unknown field type '" + type + "' (piecewise | fourier)");
}

FieldSpec zero_spec() { return PiecewiseSpec{Eigen::MatrixXd::Zero(1, 1), {}}; }

template <class F>
auto with_context(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

int default_operator_cutoff(int dims, int medium_cutoff) {
  return dims == 1 ? std::max(16, 2 * medium_cutoff) : std::max(4, medium_cutoff);
}

MediumConfig medium_from_json(const json& j) {
  if (!j.is_object()) schema_error("", "expected a medium object");
  const std::vector<double> lengths = numbers(require(j, "cell", ""), "/cell");
  if (lengths.empty() || lengths.size() > static_cast<std::size_t>(kMaxDims)) {
    schema_error("/cell", "cell must have 1 to 3 side lengths");
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0)) schema_error("/cell/" + std::to_string(i), "side lengths must be positive");
  }
  const Cell cell(lengths);
  const int dims = cell.dims();
  const int cutoff = integer(require(j, "cutoff", ""), "/cutoff");
  if (cutoff < 1) schema_error("/cutoff", "cutoff must be >= 1");
  const json& kind_j = require(j, "kind", "");
  if (!kind_j.is_string()) schema_error("/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  const json& spec = require(j, "spec", "");
  if (!spec.is_object()) schema_error("/spec", "expected an object");
  const std::string type = spec.contains("type") ? spec["type"].get<std::string>() : "piecewise";

  int op_cutoff = default_operator_cutoff(dims, cutoff);
  if (j.contains("operator_cutoff")) {
    op_cutoff = integer(j["operator_cutoff"], "/operator_cutoff");
    if (op_cutoff < 1) schema_error("/operator_cutoff", "must be >= 1");
  }

  Family family;
  try {
    family = family_from_string(kind);
  } catch (const ValidationError&) {
    schema_error("/kind", "unknown kind '" + kind + "' (scalar | vector | schrodinger)");
  }

  Medium medium = with_context("/spec", [&]() -> Medium {
    switch (family) {
      case Family::scalar_wave:
        return build_scalar_medium(field_spec(require(spec, "a", "/spec"), type, dims, "/spec/a"),
                                   field_spec(require(spec, "b", "/spec"), type, dims, "/spec/b"), cell,
                                   cutoff);
      case Family::vector_wave: {
        const int n = integer(require(spec, "components", "/spec"), "/spec/components");
        return build_vector_medium(n, field_spec(require(spec, "a", "/spec"), type, dims, "/spec/a"),
                                   field_spec(require(spec, "b", "/spec"), type, dims, "/spec/b"), cell,
                                   cutoff);
      }
      case Family::schrodinger: {
        const double mass = spec.contains("mass") ? number(spec["mass"], "/spec/mass") : 0.5;
        const double charge = spec.contains("charge") ? number(spec["charge"], "/spec/charge") : 1.0;
        const FieldSpec v = spec.contains("V") ? field_spec(spec["V"], type, dims, "/spec/V") : zero_spec();
        std::vector<FieldSpec> phi;
        if (spec.contains("Phi")) {
          const json& p = spec["Phi"];
          if (!p.is_array() || static_cast<int>(p.size()) != dims) {
            schema_error("/spec/Phi", "expected one field per cell axis");
          }
          for (int a = 0; a < dims; ++a) {
            phi.push_back(field_spec(p[static_cast<std::size_t>(a)], type, dims, "/spec/Phi/" + std::to_string(a)));
          }
        } else {
          phi.assign(static_cast<std::size_t>(dims), zero_spec());
        }
        return build_schrodinger_medium(mass, charge, v, phi, cell, cutoff);
      }
    }
    throw ValidationError("unreachable medium kind");
  });
  return MediumConfig{std::move(medium), cutoff, op_cutoff, j};
}

MediumConfig load_medium_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("schema error at /: malformed JSON in '" + path + "': " + e.what());
  }
  try {
    return medium_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema error: ") + e.what());
  }
}

}  // namespace hfh
