#pragma once

// Plane-wave reflection at a Robin boundary v = k p (x = L) in a unit medium.
// A right-going pulse w+ = (p + v)/2 is launched, recorded at t1, and the
// left-going w- = (p - v)/2 it produces is recorded at t2 after reflection.

#include "evo/solver.hpp"

#include <vector>

namespace evo {

struct ReflectionSetup {
  double L = 1.0;
  int np = 512;
  double x_c = 0.3;
  double t_c = 0.3;
  double sigma_t = 0.02;
  double sigma_x = 0.02;
  double t1 = 0.5;
  double t2 = 1.5;
  double dt = 1.0 / 512.0;
  double t_end = 6.0;
  double rho = 3.0;
};

struct ReflectionResult {
  double k = 0.0;
  double R_measured = 0.0;
  double R_analytic = 0.0;
  double abs_error = 0.0;
  /// 1 - E_-(t2)/E_+(t1).
  double absorbed_fraction = 0.0;
};

inline double robin_reflection(double k) { return (1.0 - k) / (1.0 + k); }

/// Problem with M = I, g(z) = k z, n.alpha = 0 at x = 0 and 1 at x = L, and
/// the source f_p = f_v (purely right-going).
EvoProblem reflection_problem(double k, const ReflectionSetup& setup);
ReflectionResult measure_reflection(double k, const ReflectionSetup& setup);
std::vector<ReflectionResult> sweep_reflection(const std::vector<double>& ks, const ReflectionSetup& setup);

}  // namespace evo
