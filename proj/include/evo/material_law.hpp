#pragma once

// Material laws M(z) = M0 + z M1(z) and their functional calculus
// M(d0^{-1}) = L_rho^* M(1/(is+rho)) L_rho.

#include "evo/rational.hpp"

#include <functional>

namespace evo {

class MaterialLaw {
 public:
  /// r defaults to (just below) the largest admissible radius of M1; it must
  /// never exceed it.
  MaterialLaw(CMatrix M0, RationalMatrixFunction M1, double r = 0.0);

  static MaterialLaw identity(Eigen::Index dim);
  static MaterialLaw scalar(double m0, RationalMatrixFunction M1 = RationalMatrixFunction(1), double r = 0.0);

  Eigen::Index dim() const { return M0_.rows(); }
  const CMatrix& M0() const { return M0_; }
  const RationalMatrixFunction& M1() const { return M1_; }
  double r() const { return r_; }
  /// Smallest weight for which the calculus is defined, 1/(2r).
  double rho_min() const { return 1.0 / (2.0 * r_); }

  bool in_ball(cplx z) const { return std::abs(z - r_) < r_; }

  /// M0 + z M1(z); DomainError outside B(r,r), PoleError at a pole.
  CMatrix eval(cplx z) const;
  /// M evaluated at z without the ball check (poles still rejected).
  CMatrix eval_unchecked(cplx z) const;
  /// Frequency symbol (is+rho) M(1/(is+rho)) = p M0 + M1(1/p).
  CMatrix symbol(double s, double rho) const;
  /// M1(1/(is+rho)).
  CMatrix memory_symbol_at(double s, double rho) const;

  /// Adjoint law M*(z) = M(conj z)^H (M0 Hermitian is preserved).
  MaterialLaw adjoint() const;

 private:
  CMatrix M0_;
  RationalMatrixFunction M1_;
  double r_;
};

/// M(d0^{-1}) u. Requires rho > 1/(2r).
WeightedSignal apply(const MaterialLaw& M, const WeightedSignal& u);
/// M(d0^{-1})^* u, multiplier M(1/(is+rho))^H.
WeightedSignal apply_adjoint(const MaterialLaw& M, const WeightedSignal& u);
/// d0 M(d0^{-1}) u.
WeightedSignal apply_d0M(const MaterialLaw& M, const WeightedSignal& u);

/// F(d0^{-1}) u for a raw rational function (M0 = 0 allowed), provided the
/// image circle of 1/(is+rho) avoids the poles of F.
WeightedSignal apply_rational(const RationalMatrixFunction& F, const WeightedSignal& u);
/// F(d0^{-1}) u for any holomorphic F given as a callable.
WeightedSignal apply_function(const std::function<CMatrix(cplx)>& F, Eigen::Index out_dim, const WeightedSignal& u);

/// Smallest eigenvalue of M0; InvariantError if not positive.
double gamma0(const MaterialLaw& M);
/// 1.05 * max ||M1(z)||_2 over n_samples points of the circle
/// z = (1 + e^{i theta})/(2 rho), the closure of {1/(is+rho)}.
double mu0(const MaterialLaw& M, double rho, int n_samples = 2048);
double mu0_of(const RationalMatrixFunction& M1, double rho, int n_samples = 2048);
/// rho gamma0 - mu0; negative means rho must be raised.
double beta0(const MaterialLaw& M, double rho, int n_samples = 2048);
/// 2 mu0/gamma0 + 1/(2r) + 1 with mu0 taken at rho = 1/(2r) + 1; mu0 does
/// not increase with rho, so the returned weight satisfies both constraints.
double select_rho(const MaterialLaw& M);

/// Spectral norm of a small matrix.
double spectral_norm(const CMatrix& A);

}  // namespace evo
