#pragma once

// Test-side oracles and scenario builders. Everything here is computed from
// definitions, independently of the library code paths it is compared with.

#include "evo/solver.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace evo::test {

/// Truncated Gaussian supported on (c - w, c + w), equal to 1 at c.
double bump(double t, double c, double w);
double bump_dt(double t, double c, double w);

/// sum_j dt e^{-2 rho t_j} |u_j|^2 by a plain loop.
double quad_norm2(const WeightedSignal& u);
cplx quad_inner(const WeightedSignal& u, const WeightedSignal& w);
/// ||u||_rho restricted to samples with t_j < a.
double quad_norm_before(const WeightedSignal& u, double a);

/// Forward transform from its defining sum, O(n^2):
/// u^(s_k) = dt/sqrt(2 pi) sum_j e^{-(i s_k + rho) t_j} u_j.
CMatrix naive_forward(const WeightedSignal& u);

/// int_{-inf}^{t} e^{lambda (t - tau)} exp(-(tau - c)^2/(2 sigma^2)) dtau, real lambda.
double gauss_exp_convolution(double t, double c, double sigma, double lambda);

/// Random smooth signal: a sum of modulated bumps of random sign and phase,
/// support inside [lo, hi].
WeightedSignal random_smooth(const WeightedGrid& grid, Eigen::Index dim, std::mt19937_64& rng, double lo, double hi);

/// Reduced state sampled from continuous fields p(x, t), v(x, t).
WeightedSignal sample_fields(const SpatialDiscretization& sd, const WeightedGrid& grid,
                             const std::function<double(double, double)>& p,
                             const std::function<double(double, double)>& v);

/// Scalar rational function with one pole.
RationalMatrixFunction one_pole(cplx pole, cplx residue);

/// Problem with a separable source bump(t) * cos(3x) on p and half of it on v.
EvoProblem bump_problem(const WeightedGrid& grid, int np, AcousticMedium medium, BoundaryLaw bl, double t_c = 0.5,
                        double width = 0.15);

struct ScenarioCase {
  std::string label;
  AcousticMedium medium;
  RationalMatrixFunction g;
  double alpha_left = 1.0;
  double alpha_right = 1.0;
};

/// Admissible media and boundary laws: constant and memory laws, Neumann,
/// Robin and memory boundaries, varying profiles.
std::vector<ScenarioCase> admissible_cases(int count, std::uint64_t seed);

}  // namespace evo::test
