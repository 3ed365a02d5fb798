#pragma once

// 1D staggered discretization of A = ((0, div), (grad, 0)) on (0, L) with the
// impedance boundary law n.a(d0^{-1}) d0 p = n.v, a(z, x) = alpha(x) g(z).
//
// Pressure lives on np cell centres, velocity on nv = np+1 faces. The boundary
// velocities are eliminated, leaving the reduced state
//   [p_0, v_1, p_1, v_2, ..., v_{np-1}, p_{np-1}]      (2 np - 1 unknowns)
// in which A(s) is tridiagonal.

#include "evo/fourier_laplace.hpp"
#include "evo/rational.hpp"

#include <Eigen/SparseCore>

#include <functional>

namespace evo {

using SpMat = Eigen::SparseMatrix<double>;

class SpatialDiscretization {
 public:
  SpatialDiscretization(double L, int np);

  double L() const { return L_; }
  int np() const { return np_; }
  int nv() const { return np_ + 1; }
  double dx() const { return dx_; }
  double x_cell(int i) const { return (i + 0.5) * dx_; }
  double x_face(int j) const { return j * dx_; }

  /// (np x nv): (v_{i+1} - v_i)/dx.
  const SpMat& D_div() const { return D_div_; }
  /// (nv x np): (p_j - p_{j-1})/dx on interior faces, zero rows on the boundary.
  const SpMat& D_grad() const { return D_grad_; }
  const SpMat& W_p() const { return W_p_; }
  const SpMat& W_v() const { return W_v_; }
  /// Boundary coupling of the summation-by-parts identity (np x nv).
  const SpMat& B() const { return B_; }
  /// || W_p D_div + D_grad^T W_v - B ||_max.
  double sbp_residual() const;

  int reduced_size() const { return 2 * np_ - 1; }
  static int p_index(int i) { return 2 * i; }
  /// Interior faces only, 1 <= j <= np-1.
  static int v_index(int j) { return 2 * j - 1; }

 private:
  double L_;
  int np_;
  double dx_;
  SpMat D_div_, D_grad_, W_p_, W_v_, B_;
};

/// a(z, x) = alpha(x) g(z) with scalar g. The boundary symbol
/// Y(p) = p g(1/p) must be proper, i.e. g(0) = 0.
class BoundaryLaw {
 public:
  BoundaryLaw(RationalMatrixFunction g, RVector alpha, RVector div_alpha);

  /// alpha linear with alpha(0) = -n_alpha_left, alpha(L) = n_alpha_right.
  static BoundaryLaw linear_profile(RationalMatrixFunction g, const SpatialDiscretization& sd, double n_alpha_left = 1.0,
                                    double n_alpha_right = 1.0);
  /// alpha sampled from a function at faces, div alpha from its derivative at cells.
  static BoundaryLaw from_profile(RationalMatrixFunction g, const SpatialDiscretization& sd,
                                  const std::function<double(double)>& alpha,
                                  const std::function<double(double)>& dalpha);
  /// g(z) = k z with alpha = n at both ends: v_b = k p_b.
  static BoundaryLaw robin(double k, const SpatialDiscretization& sd);
  /// g = 0: v_b = 0.
  static BoundaryLaw neumann(const SpatialDiscretization& sd);

  const RationalMatrixFunction& g() const { return g_; }
  const RVector& alpha() const { return alpha_; }
  const RVector& div_alpha() const { return div_alpha_; }
  const LaplaceSymbol& Y_symbol() const { return Y_; }
  /// n.alpha at x = 0 (outer normal -1) and x = L.
  double n_alpha_left() const { return -alpha_(0); }
  double n_alpha_right() const { return alpha_(alpha_.size() - 1); }
  double r() const { return g_.max_radius(); }

  /// (is+rho) g(1/(is+rho)); PoleError naming s if a pole is hit.
  cplx Y(double s, double rho) const;
  /// min over s and both ends of Re[(n.alpha)_b Y(s)].
  double passivity_margin(double rho, const RVector& freqs) const;

 private:
  RationalMatrixFunction g_;
  RVector alpha_;
  RVector div_alpha_;
  LaplaceSymbol Y_;
};

class Tridiagonal {
 public:
  explicit Tridiagonal(int n = 0) : lower(n > 0 ? n - 1 : 0), diag(n), upper(n > 0 ? n - 1 : 0) {
    lower.setZero();
    diag.setZero();
    upper.setZero();
  }
  int size() const { return static_cast<int>(diag.size()); }
  CVector operator*(const CVector& x) const;
  Tridiagonal adjoint() const;
  CMatrix dense() const;
  Tridiagonal& add_diagonal(const CVector& d);

  CVector lower;  // A(i+1, i)
  CVector diag;
  CVector upper;  // A(i, i+1)
};

struct ReducedOperator {
  Tridiagonal A;
  /// Elimination map: v_0 = left * p_0, v_np = right * p_{np-1}.
  cplx left;
  cplx right;
};

/// A(s) on the reduced state.
ReducedOperator assemble_A_freq(const SpatialDiscretization& sd, const BoundaryLaw& bl, double s, double rho);
/// A(s)^H, the symbol of A^*; its boundary relation is v_b = -alpha_b conj(Y) p_b.
ReducedOperator assemble_Astar_freq(const SpatialDiscretization& sd, const BoundaryLaw& bl, double s, double rho);

/// A applied per frequency to a reduced-state signal.
WeightedSignal apply_A_time(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U);
WeightedSignal apply_Astar_time(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U);
/// Direct (D_div v, D_grad p) on a full stacked (p, v) signal of size np + nv.
WeightedSignal apply_A_full(const SpatialDiscretization& sd, const WeightedSignal& U);

/// Full stacked (p on cells, v on all faces) from a reduced state, boundary
/// velocities reconstructed through the boundary law.
WeightedSignal expand_state(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U);
/// Reduced state from a full stacked signal (boundary velocities dropped).
WeightedSignal reduce_state(const SpatialDiscretization& sd, const WeightedSignal& U_full);
/// Reduced state from cell pressures (np columns) and face velocities (nv columns).
WeightedSignal reduced_from_fields(const SpatialDiscretization& sd, const WeightedSignal& p, const WeightedSignal& v);

/// Re of int_{t<=cut} <grad p | d0 a p> + <p | div d0 a p> e^{-2 rho t} dt for
/// cell pressures p (np columns). By summation by parts only the two boundary
/// cells contribute.
double boundary_sign_functional(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& p,
                                double cut = 0.0);

/// Weighted norm over the interior cells of
/// div(alpha q) - (div alpha) q - alpha . grad q,  q = g(d0^{-1}) p.
double product_rule_residual(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& p);

}  // namespace evo
