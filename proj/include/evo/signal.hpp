#pragma once

// Discrete representation of the exponentially weighted space H_rho(R, C^d):
// uniform time grids, weighted inner products, cutoffs and translations.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

namespace evo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Uniform time grid t_j = t0 + j*dt, j < n, carrying the weight rho.
class WeightedGrid {
 public:
  WeightedGrid(double t0, double dt, std::size_t n, double rho);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  std::size_t n() const { return n_; }
  double rho() const { return rho_; }

  double time(std::size_t j) const { return t0_ + dt_ * static_cast<double>(j); }
  double last_time() const { return time(n_ - 1); }
  /// Length of the periodic window used by the transform.
  double period() const { return dt_ * static_cast<double>(n_); }
  /// Quadrature weight dt*exp(-2 rho t_j) of sample j.
  double weight(std::size_t j) const;

  WeightedGrid with_rho(double rho) const { return {t0_, dt_, n_, rho}; }

  /// Equal up to relative rounding in t0, dt and rho.
  bool compatible(const WeightedGrid& other) const;

 private:
  double t0_;
  double dt_;
  std::size_t n_;
  double rho_;
};

/// n samples of a C^d valued function on a WeightedGrid. Row j holds u(t_j).
class WeightedSignal {
 public:
  WeightedSignal(WeightedGrid grid, CMatrix values);
  static WeightedSignal zeros(const WeightedGrid& grid, Eigen::Index dim);
  /// Samples f(t_j) for a function returning a d-vector.
  static WeightedSignal sample(const WeightedGrid& grid, Eigen::Index dim,
                               const std::function<CVector(double)>& f);

  const WeightedGrid& grid() const { return grid_; }
  Eigen::Index dim() const { return values_.cols(); }
  std::size_t size() const { return grid_.n(); }
  const CMatrix& values() const { return values_; }
  CMatrix& mutable_values() { return values_; }

  cplx operator()(std::size_t j, Eigen::Index c) const { return values_(static_cast<Eigen::Index>(j), c); }

  WeightedSignal& operator+=(const WeightedSignal& other);
  WeightedSignal& operator-=(const WeightedSignal& other);
  WeightedSignal& operator*=(cplx a);

 private:
  WeightedGrid grid_;
  CMatrix values_;
};

WeightedSignal operator+(WeightedSignal a, const WeightedSignal& b);
WeightedSignal operator-(WeightedSignal a, const WeightedSignal& b);
WeightedSignal operator*(cplx a, WeightedSignal u);

/// Throws ShapeError unless u and w share grid and dimension.
void require_same_shape(const WeightedSignal& u, const WeightedSignal& w, const char* what);

/// <u|w>_rho = sum_j dt e^{-2 rho t_j} u_j^H w_j, linear in the second factor.
/// This is the trapezoid rule on the periodic window [t0, t0 + n dt).
cplx rho_inner(const WeightedSignal& u, const WeightedSignal& w);
double rho_norm(const WeightedSignal& u);

/// chi_{t <= a}(m0) u: samples with t_j <= a are kept, later ones zeroed.
WeightedSignal truncate_before(const WeightedSignal& u, double a);

/// (tau_h u)(t) = u(t + h). h must be an integer multiple of dt; samples
/// shifted in from outside the window are zero.
WeightedSignal translate(const WeightedSignal& u, double h);

/// psi(m0) u: pointwise multiplication by a real function of time.
WeightedSignal time_multiply(const std::function<double(double)>& psi, const WeightedSignal& u);

/// Number of grid steps represented by h; throws PreconditionError when h is
/// not a multiple of dt.
long grid_steps(const WeightedGrid& grid, double h);

void write_signal_csv(std::ostream& os, const WeightedSignal& u);
void write_signal_csv(const std::string& path, const WeightedSignal& u);
/// Reads the CSV written by write_signal_csv; the grid is rebuilt from the t column.
WeightedSignal read_signal_csv(const std::string& path, double rho);

}  // namespace evo
