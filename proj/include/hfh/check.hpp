#pragma once

// Built-in fixture media and the invariant suite behind `hfh check`.

#include "hfh/medium.hpp"

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace hfh {

namespace fixtures {

// a = b = 1 on the unit cell (or unit square).
ScalarMedium constant_medium(int dims = 1, int cutoff = 1);
// a = 1 on [0, 1/2), 4 on [1/2, 1); b = 1.
ScalarMedium two_phase_medium(int cutoff = 8);
// a = 2 + cos(2 pi x); b = 1.
ScalarMedium smooth_medium();
// V = 2 cos(2 pi x), Phi = 0, m = 1/2, e = 1.
SchrodingerMedium mathieu_medium();
// Two coupled components with constant off-diagonal stiffness.
VectorMedium coupled_vector_medium(int cutoff = 8);

// Portable uniform draw in [0, 1) from a 64-bit engine.
double uniform(std::mt19937_64& rng);
ScalarMedium random_scalar_medium(std::mt19937_64& rng, int dims);
VectorMedium random_vector_medium(std::mt19937_64& rng);
SchrodingerMedium random_schrodinger_medium(std::mt19937_64& rng, int dims);

}  // namespace fixtures

struct CheckResult {
  std::string name;  // module/property
  bool passed;
  double value;
  double tolerance;
  std::string detail;
};

std::vector<CheckResult> run_invariant_suite();
void write_check_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace hfh
