#pragma once

// Discrete Fourier-Laplace transform L_rho on the periodic window of a
// WeightedGrid, and the multipliers it diagonalizes (d0, its inverse, shifts).

#include "evo/signal.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace evo {

/// Values of L_rho u at the frequencies s_k = (k - floor(n/2))*ds, ds = 2 pi/(n dt).
class SpectralSignal {
 public:
  SpectralSignal(WeightedGrid grid, CMatrix values);

  const WeightedGrid& grid() const { return grid_; }
  double rho() const { return grid_.rho(); }
  std::size_t size() const { return grid_.n(); }
  Eigen::Index dim() const { return values_.cols(); }
  double ds() const;
  double freq(std::size_t k) const;
  RVector freqs() const;

  const CMatrix& values() const { return values_; }
  CMatrix& mutable_values() { return values_; }

 private:
  WeightedGrid grid_;
  CMatrix values_;
};

/// Frequency grid implied by a time grid, increasing.
RVector frequencies(const WeightedGrid& grid);
/// Laplace variable is + rho.
inline cplx laplace_var(double s, double rho) { return {rho, s}; }

SpectralSignal forward(const WeightedSignal& u);
WeightedSignal inverse(const SpectralSignal& uh, const WeightedGrid& grid);

/// L_rho^* m(s) L_rho for a scalar symbol.
WeightedSignal apply_multiplier(const WeightedSignal& u, const std::function<cplx(double)>& m);
/// L_rho^* M(s) L_rho for a matrix symbol of shape (out_dim x u.dim()).
/// Frequencies are processed in parallel; M must be safe to call concurrently.
WeightedSignal apply_matrix_multiplier(const WeightedSignal& u, Eigen::Index out_dim,
                                       const std::function<CMatrix(double)>& m);

struct DerivativeResult {
  WeightedSignal value;
  /// False when the weighted last sample is not small: the periodic
  /// derivative then sees a jump at the window end.
  bool decays;
  double end_ratio;
};

WeightedSignal d0_apply(const WeightedSignal& u);
DerivativeResult d0_apply_checked(const WeightedSignal& u, double tol = 1e-8);
/// Adjoint of d0 in H_rho: multiplier -is + rho.
WeightedSignal d0_adjoint_apply(const WeightedSignal& u);
WeightedSignal d0_inv_apply(const WeightedSignal& u);

/// Multiplier exp((is+rho) h), the spectral form of translate(u, h).
WeightedSignal translate_spectral(const WeightedSignal& u, double h);

/// P_n: keep frequencies with |s_k| <= band, zero the rest.
WeightedSignal band_project(const WeightedSignal& u, double band);

struct PaddingReport {
  bool empty = true;
  double support_start = 0.0;
  double support_end = 0.0;
  /// Zero samples between the end of the support and the end of the period.
  double pad = 0.0;
  double support_length = 0.0;
  /// exp(-rho pad): relative size of the wrap-around contribution.
  double leak_bound = 0.0;
  bool adequate = true;
};

/// Support of u (samples above rel_tol of the largest weighted sample).
PaddingReport padding_report(const WeightedSignal& u, double rel_tol = 1e-14);
/// Throws PreconditionError unless pad >= support length.
PaddingReport require_padding(const WeightedSignal& u, double rel_tol = 1e-14);

void write_spectral_csv(std::ostream& os, const SpectralSignal& uh);

}  // namespace evo
