#pragma once

#include "hfh/medium.hpp"

#include <Eigen/Dense>

#include <functional>
#include <initializer_list>

namespace hfh::test {

inline Eigen::VectorXd kvec(std::initializer_list<double> values) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) k(i++) = v;
  return k;
}

inline Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// Composite Simpson on [lo, hi] with an even number of intervals.
inline cd simpson(const std::function<cd(double)>& f, double lo, double hi, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (hi - lo) / intervals;
  cd sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return sum * (h / 3.0);
}

}  // namespace hfh::test
