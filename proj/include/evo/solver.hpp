#pragma once

// (d0 M(d0^{-1}) + A) U = f for the 1D acoustic system on the reduced state:
// an exact per-frequency solver and a causal implicit Euler time stepper.

#include "evo/acoustic.hpp"
#include "evo/material_law.hpp"

#include <string>

namespace evo {

/// Block-diagonal law: one scalar law on every pressure cell, one on every
/// interior velocity face.
struct AcousticMedium {
  MaterialLaw pressure = MaterialLaw::identity(1);
  MaterialLaw velocity = MaterialLaw::identity(1);

  double gamma0() const;
  double mu0(double rho, int n_samples = 2048) const;
  /// Smallest holomorphy radius of the two laws.
  double r() const;
};

struct EvoProblem {
  WeightedGrid grid;
  SpatialDiscretization sd;
  AcousticMedium medium;
  BoundaryLaw bl;
  /// Source on the reduced state (2 np - 1 columns).
  WeightedSignal f;

  EvoProblem(WeightedGrid grid, SpatialDiscretization sd, AcousticMedium medium, BoundaryLaw bl, WeightedSignal f);

  /// Min of the law radii and the boundary law radius.
  double r() const;
  double gamma0() const { return medium.gamma0(); }
  double mu0() const { return medium.mu0(grid.rho()); }
  double beta0() const { return grid.rho() * gamma0() - mu0(); }
  /// Same problem on another weight (the source samples are kept).
  EvoProblem with_rho(double rho) const;
  EvoProblem with_source(WeightedSignal f) const;
};

/// rho = 2 mu0/gamma0 + 1/(2r) + 1 for the composite problem.
double select_rho(const AcousticMedium& medium, const BoundaryLaw& bl);

/// Checks rho > 1/(2r), beta0 > 0, source shape and zero padding; throws
/// PreconditionError or ShapeError otherwise.
void validate(const EvoProblem& prob);

struct SolveReport {
  explicit SolveReport(WeightedSignal u) : U(std::move(u)) {}

  WeightedSignal U;
  double residual_rel = 0.0;
  bool residual_absolute = false;
  double beta0 = 0.0;
  double gamma0 = 0.0;
  double mu0 = 0.0;
  double rho = 0.0;
  /// ||U||_rho / ||f||_rho.
  double energy_ratio = 0.0;
  /// ||chi_{< T - dt} U|| / ||f|| with T the start of the source support.
  double causality_leak = 0.0;
  /// 1e-6 - causality_leak.
  double causality_margin = 0.0;
  double max_condition_number = 0.0;
  double wall_time = 0.0;
  std::string method;

  bool energy_bound_ok(double slack = 0.02) const;
};

/// Symbol (is+rho) M(1/(is+rho)) + A(s) on the reduced state.
Tridiagonal system_matrix(const EvoProblem& prob, double s);

/// (d0 M + A) U and its H_rho adjoint, applied per frequency.
WeightedSignal apply_operator(const EvoProblem& prob, const WeightedSignal& U);
WeightedSignal apply_operator_adjoint(const EvoProblem& prob, const WeightedSignal& U);

/// d0 M(d0^{-1}) alone on the reduced state, and its adjoint.
WeightedSignal apply_d0M_reduced(const EvoProblem& prob, const WeightedSignal& U);
WeightedSignal apply_d0M_reduced_adjoint(const EvoProblem& prob, const WeightedSignal& U);

/// ||(d0 M + A) U - f|| / ||f||; the absolute value when f = 0 (flag set).
double residual(const EvoProblem& prob, const WeightedSignal& U, bool* absolute = nullptr);

/// Spectral oracle: U_hat(s) = [(is+rho) M(1/(is+rho)) + A(s)]^{-1} f_hat(s).
SolveReport solve_frequency(const EvoProblem& prob);
/// Solution of the spectral system without validation or diagnostics.
WeightedSignal solve_frequency_raw(const EvoProblem& prob, double* max_cond = nullptr);

/// Implicit Euler from rest at t0 with sub-step dt_sub (must divide dt);
/// sources between grid samples are interpolated linearly.
SolveReport solve_timestep(const EvoProblem& prob, double dt_sub = 0.0);

/// Relative leakage ||chi_{< T - dt} U|| / ||f|| for the support start T of f.
double causality_leak(const WeightedSignal& f, const WeightedSignal& U);

std::string format_report(const SolveReport& rep);

}  // namespace evo
