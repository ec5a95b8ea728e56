#pragma once

#include <functional>

namespace pacekit {

struct QuadratureConfig {
  double abs_tol = 1e-8;
  int max_depth = 40;
};

// Adaptive Simpson on [a, b]. Throws quadrature_non_convergence when some
// subinterval still misses its share of the tolerance at max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& config = {});

}  // namespace pacekit
