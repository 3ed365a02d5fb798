#include "evo/reflection.hpp"

#include "evo/error.hpp"

#include <cmath>

namespace evo {

namespace {

double gauss(double x, double sigma) {
  const double v = std::exp(-0.5 * x * x / (sigma * sigma));
  return v < 1e-16 ? 0.0 : v;
}

// Linear interpolation of cell values at position x (zero outside the cells).
double interp_cells(const SpatialDiscretization& sd, const RVector& w, double x) {
  const double u = x / sd.dx() - 0.5;
  if (u < 0.0 || u > sd.np() - 1) return 0.0;
  const int i = std::min(static_cast<int>(std::floor(u)), sd.np() - 2);
  const double a = u - i;
  return (1.0 - a) * w(i) + a * w(i + 1);
}

}  // namespace

EvoProblem reflection_problem(double k, const ReflectionSetup& st) {
  if (k < 0.0) throw PreconditionError("reflection: k must be nonnegative");
  const auto n = static_cast<std::size_t>(std::lround(st.t_end / st.dt));
  const WeightedGrid grid(0.0, st.dt, n, st.rho);
  SpatialDiscretization sd(st.L, st.np);
  BoundaryLaw bl = BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({0.0, k}, {}, {}), sd, 0.0, 1.0);
  WeightedSignal p = WeightedSignal::zeros(grid, sd.np());
  WeightedSignal v = WeightedSignal::zeros(grid, sd.nv());
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = gauss(grid.time(j) - st.t_c, st.sigma_t);
    if (phi == 0.0) continue;
    const auto r = static_cast<Eigen::Index>(j);
    for (int i = 0; i < sd.np(); ++i) p.mutable_values()(r, i) = phi * gauss(sd.x_cell(i) - st.x_c, st.sigma_x);
    for (int i = 0; i < sd.nv(); ++i) v.mutable_values()(r, i) = phi * gauss(sd.x_face(i) - st.x_c, st.sigma_x);
  }
  return {grid, sd, AcousticMedium{}, std::move(bl), reduced_from_fields(sd, p, v)};
}

ReflectionResult measure_reflection(double k, const ReflectionSetup& st) {
  const EvoProblem prob = reflection_problem(k, st);
  const SolveReport rep = solve_frequency(prob);
  const SpatialDiscretization& sd = prob.sd;
  const WeightedSignal full = expand_state(sd, prob.bl, rep.U);
  const long j1 = grid_steps(prob.grid, st.t1);
  const long j2 = grid_steps(prob.grid, st.t2);
  const int np = sd.np();
  auto characteristic = [&](long j, double sign) {
    RVector w(np);
    for (int i = 0; i < np; ++i) {
      const double pc = full.values()(j, i).real();
      const double vc = 0.5 * (full.values()(j, np + i).real() + full.values()(j, np + i + 1).real());
      w(i) = 0.5 * (pc + sign * vc);
    }
    return w;
  };
  const RVector wp = characteristic(j1, 1.0);
  const RVector wm = characteristic(j2, -1.0);
  const double x1 = st.x_c + st.t1 - st.t_c;
  const double x2 = 2.0 * st.L - (st.x_c + st.t2 - st.t_c);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < np; ++i) {
    const double mirror = interp_cells(sd, wp, x1 + x2 - sd.x_cell(i));
    num += wm(i) * mirror;
    den += mirror * mirror;
  }
  if (!(den > 0.0)) throw PreconditionError("reflection: incident pulse not resolved at t1");
  ReflectionResult out;
  out.k = k;
  out.R_measured = num / den;
  out.R_analytic = robin_reflection(k);
  out.abs_error = std::abs(out.R_measured - out.R_analytic);
  out.absorbed_fraction = 1.0 - wm.squaredNorm() / wp.squaredNorm();
  return out;
}

std::vector<ReflectionResult> sweep_reflection(const std::vector<double>& ks, const ReflectionSetup& setup) {
  std::vector<ReflectionResult> out;
  out.reserve(ks.size());
  for (double k : ks) out.push_back(measure_reflection(k, setup));
  return out;
}

}  // namespace evo
