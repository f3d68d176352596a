#pragma once

// JSON medium descriptors.
//
//   {"cell": [1.0], "kind": "scalar", "cutoff": 8,
//    "spec": {"type": "piecewise",
//             "a": {"background": 1, "regions": [{"lo": [0.5], "hi": [1.0], "value": 4}]},
//             "b": {"background": 1}}}
//
// kind "vector" adds "components" and matrix values; kind "schrodinger" uses
// "mass", "charge", "V" and "Phi" (one field per axis) inside spec. A field may
// override the spec-wide "type"; Fourier fields list {"n": [..], "value": v}
// where v is a number, {"re": x, "im": y}, or a matrix of those.

#include "hfh/medium.hpp"

#include "json.hpp"

#include <string>

namespace hfh {

struct MediumConfig {
  Medium medium;
  int cutoff;
  int operator_cutoff;
  nlohmann::json source;
};

MediumConfig medium_from_json(const nlohmann::json& j);
MediumConfig load_medium_config(const std::string& path);

// 2 * medium cutoff in 1D (at least 16), the medium cutoff in 2D (at least 4).
int default_operator_cutoff(int dims, int medium_cutoff);

}  // namespace hfh
