#pragma once

// Matrix-valued rational functions of z (the variable of d0^{-1}) and their
// proper symbols in the Laplace variable p = is + rho, with z = 1/p.

#include "evo/signal.hpp"

#include <limits>
#include <vector>

namespace evo {

/// F(z) = sum_k C_k z^k + sum_m R_m / (z - p_m), simple poles, none at z = 0.
class RationalMatrixFunction {
 public:
  explicit RationalMatrixFunction(Eigen::Index dim = 1);
  RationalMatrixFunction(std::vector<CMatrix> poly, std::vector<cplx> poles, std::vector<CMatrix> residues);

  static RationalMatrixFunction constant(const CMatrix& c);
  /// Scalar convenience constructor.
  static RationalMatrixFunction scalar(std::vector<cplx> poly, std::vector<cplx> poles, std::vector<cplx> residues);

  Eigen::Index dim() const { return dim_; }
  const std::vector<CMatrix>& poly() const { return poly_; }
  const std::vector<cplx>& poles() const { return poles_; }
  const std::vector<CMatrix>& residues() const { return residues_; }
  bool is_zero() const;

  /// Throws PoleError when z sits on a pole.
  CMatrix operator()(cplx z) const;
  /// Scalar value; requires dim() == 1.
  cplx scalar_at(cplx z) const;

  /// F*(z) = F(conj z)^H.
  RationalMatrixFunction adjoint() const;
  /// z F(z), still in partial-fraction form.
  RationalMatrixFunction times_z() const;
  RationalMatrixFunction operator*(cplx a) const;
  RationalMatrixFunction operator+(const RationalMatrixFunction& other) const;

  /// Supremum of r with every pole outside the closed ball B(r,r).
  double max_radius() const;
  bool holomorphic_on_ball(double r) const { return r < max_radius(); }

 private:
  void validate() const;

  Eigen::Index dim_;
  std::vector<CMatrix> poly_;
  std::vector<cplx> poles_;
  std::vector<CMatrix> residues_;
};

/// Proper symbol in p: D + sum_m c_m/(p - q_m) + sum_{k>=1} e_k p^{-k}.
struct LaplaceSymbol {
  CMatrix D;
  std::vector<cplx> q;
  std::vector<CMatrix> c;
  /// integ[k-1] multiplies p^{-k}.
  std::vector<CMatrix> integ;

  Eigen::Index dim() const { return D.rows(); }
  CMatrix operator()(cplx p) const;
};

/// Symbol of F(d0^{-1}): p -> F(1/p).
LaplaceSymbol memory_symbol(const RationalMatrixFunction& f);
/// Symbol of d0 F(d0^{-1}): p -> p F(1/p). Requires F(0) = 0, otherwise the
/// symbol grows like p and ImproperKernelError is thrown.
LaplaceSymbol derivative_symbol(const RationalMatrixFunction& f, double tol = 1e-12);

/// [N/N] Pade approximant of exp(-h/z) (the multiplier exp(-h d0), a delay
/// by h), as a scalar rational function of z.
RationalMatrixFunction pade_delay(double h, int order);

struct PowerSeriesFit {
  RationalMatrixFunction f;
  /// Max abs deviation on the fit circle.
  double residual;
};

/// Least-squares fit of a(z) = sum_k a_k (z - r)^k onto the given poles plus a
/// polynomial of degree poly_degree, sampled on |z - r| = 0.9 r.
PowerSeriesFit fit_power_series(const std::vector<cplx>& coeffs, double r, const std::vector<cplx>& poles,
                                int poly_degree, int samples = 256);

}  // namespace evo
