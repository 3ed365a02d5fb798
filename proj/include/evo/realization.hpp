#pragma once

// State-space realizations D + H (pI - F)^{-1} G of proper Laplace symbols,
// and their implicit Euler steppers.

#include "evo/rational.hpp"

namespace evo {

struct StateSpaceRealization {
  CMatrix F;  // N x N
  CMatrix G;  // N x d
  CMatrix H;  // d x N
  CMatrix D;  // d x d

  Eigen::Index order() const { return F.rows(); }
  Eigen::Index dim() const { return D.rows(); }
  /// D + H (pI - F)^{-1} G.
  CMatrix response(cplx p) const;
  /// H e^{Ft} G for t >= 0 (the direct term D is the delta part and is omitted).
  CMatrix impulse_response(double t) const;
  /// Largest real part of an eigenvalue of F (-inf when N = 0).
  double spectral_abscissa() const;
};

/// Modal realization: one block q_m I_d per pole and an integrator chain for
/// the p^{-k} terms. Throws PreconditionError when an eigenvalue of F has real
/// part >= rho.
StateSpaceRealization realize(const LaplaceSymbol& symbol, double rho);

/// Implicit Euler for x' = F x + G u, y = H x + D u on several independent
/// channels (columns of u). One step gives
///   y^{n+1} = gain u^{n+1} + history(x^n).
class KernelStepper {
 public:
  KernelStepper(const StateSpaceRealization& ss, double dt, Eigen::Index channels);

  const CMatrix& gain() const { return gain_; }
  /// H (I - dt F)^{-1} x^n, shape d x channels.
  CMatrix history() const;
  /// Advance with the new input u^{n+1} (d x channels).
  void advance(const CMatrix& u_next);
  void reset();
  const CMatrix& state() const { return x_; }

 private:
  CMatrix Phi_;    // (I - dt F)^{-1}
  CMatrix PhiG_;   // dt Phi G
  CMatrix HPhi_;
  CMatrix gain_;
  CMatrix x_;
};

}  // namespace evo
