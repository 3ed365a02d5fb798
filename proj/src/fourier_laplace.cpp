#include "evo/fourier_laplace.hpp"

#include "evo/error.hpp"
#include "evo/parallel.hpp"

#include <fftw3.h>

#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>

namespace evo {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// In-place batched transform of the columns of a column-major n x d buffer.
void fft_columns(CMatrix& buf, int sign) {
  const int n = static_cast<int>(buf.rows());
  const int howmany = static_cast<int>(buf.cols());
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_many_dft(1, &n, howmany, data, nullptr, 1, n, data, nullptr, 1, n, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw: plan creation failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(plan);
}

long kmin(std::size_t n) { return -static_cast<long>(n / 2); }

std::size_t bin(long m, std::size_t n) {
  const long nn = static_cast<long>(n);
  return static_cast<std::size_t>(((m % nn) + nn) % nn);
}

}  // namespace

SpectralSignal::SpectralSignal(WeightedGrid grid, CMatrix values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != grid_.n()) throw ShapeError("SpectralSignal: row count != n");
  if (values_.cols() < 1) throw ShapeError("SpectralSignal: dimension must be positive");
  if (!values_.allFinite()) throw InvariantError("SpectralSignal: non-finite value");
}

double SpectralSignal::ds() const { return 2.0 * std::numbers::pi / grid_.period(); }

double SpectralSignal::freq(std::size_t k) const {
  return static_cast<double>(kmin(grid_.n()) + static_cast<long>(k)) * ds();
}

RVector SpectralSignal::freqs() const { return frequencies(grid_); }

RVector frequencies(const WeightedGrid& grid) {
  const double ds = 2.0 * std::numbers::pi / grid.period();
  RVector s(static_cast<Eigen::Index>(grid.n()));
  for (std::size_t k = 0; k < grid.n(); ++k)
    s(static_cast<Eigen::Index>(k)) = static_cast<double>(kmin(grid.n()) + static_cast<long>(k)) * ds;
  return s;
}

SpectralSignal forward(const WeightedSignal& u) {
  const auto& g = u.grid();
  const std::size_t n = g.n();
  CMatrix buf(u.values().rows(), u.dim());
  for (std::size_t j = 0; j < n; ++j)
    buf.row(static_cast<Eigen::Index>(j)) = std::exp(-g.rho() * g.time(j)) * u.values().row(static_cast<Eigen::Index>(j));
  fft_columns(buf, FFTW_FORWARD);
  const RVector s = frequencies(g);
  const double scale = g.dt() / std::sqrt(2.0 * std::numbers::pi);
  CMatrix out(buf.rows(), buf.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const cplx phase = scale * std::exp(cplx(0.0, -s(kk) * g.t0()));
    out.row(kk) = phase * buf.row(static_cast<Eigen::Index>(bin(kmin(n) + static_cast<long>(k), n)));
  }
  return {g, std::move(out)};
}

WeightedSignal inverse(const SpectralSignal& uh, const WeightedGrid& grid) {
  if (!uh.grid().compatible(grid)) throw ShapeError("inverse: spectral signal does not match the grid");
  const std::size_t n = grid.n();
  const RVector s = frequencies(grid);
  CMatrix buf(uh.values().rows(), uh.dim());
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    buf.row(static_cast<Eigen::Index>(bin(kmin(n) + static_cast<long>(k), n))) =
        std::exp(cplx(0.0, s(kk) * grid.t0())) * uh.values().row(kk);
  }
  fft_columns(buf, FFTW_BACKWARD);
  const double scale = std::sqrt(2.0 * std::numbers::pi) / grid.period();
  for (std::size_t j = 0; j < n; ++j)
    buf.row(static_cast<Eigen::Index>(j)) *= scale * std::exp(grid.rho() * grid.time(j));
  return {grid, std::move(buf)};
}

WeightedSignal apply_multiplier(const WeightedSignal& u, const std::function<cplx(double)>& m) {
  SpectralSignal uh = forward(u);
  for (std::size_t k = 0; k < uh.size(); ++k) uh.mutable_values().row(static_cast<Eigen::Index>(k)) *= m(uh.freq(k));
  return inverse(uh, u.grid());
}

WeightedSignal apply_matrix_multiplier(const WeightedSignal& u, Eigen::Index out_dim,
                                       const std::function<CMatrix(double)>& m) {
  const SpectralSignal uh = forward(u);
  CMatrix out(uh.values().rows(), out_dim);
  parallel_for(uh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const CMatrix mk = m(uh.freq(k));
    if (mk.rows() != out_dim || mk.cols() != u.dim()) throw ShapeError("apply_matrix_multiplier: symbol shape mismatch");
    out.row(kk) = (mk * uh.values().row(kk).transpose()).transpose();
  });
  return inverse(SpectralSignal(u.grid(), std::move(out)), u.grid());
}

WeightedSignal d0_apply(const WeightedSignal& u) {
  const double rho = u.grid().rho();
  return apply_multiplier(u, [rho](double s) { return laplace_var(s, rho); });
}

DerivativeResult d0_apply_checked(const WeightedSignal& u, double tol) {
  const auto& g = u.grid();
  double peak = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j)
    peak = std::max(peak, std::exp(-g.rho() * g.time(j)) * u.values().row(static_cast<Eigen::Index>(j)).norm());
  const double last = std::exp(-g.rho() * g.last_time()) * u.values().row(u.values().rows() - 1).norm();
  const double ratio = peak > 0.0 ? last / peak : 0.0;
  return {d0_apply(u), ratio <= tol, ratio};
}

WeightedSignal d0_adjoint_apply(const WeightedSignal& u) {
  const double rho = u.grid().rho();
  return apply_multiplier(u, [rho](double s) { return cplx(rho, -s); });
}

WeightedSignal d0_inv_apply(const WeightedSignal& u) {
  const double rho = u.grid().rho();
  return apply_multiplier(u, [rho](double s) { return 1.0 / laplace_var(s, rho); });
}

WeightedSignal translate_spectral(const WeightedSignal& u, double h) {
  grid_steps(u.grid(), h);
  const double rho = u.grid().rho();
  return apply_multiplier(u, [rho, h](double s) { return std::exp(laplace_var(s, rho) * h); });
}

WeightedSignal band_project(const WeightedSignal& u, double band) {
  return apply_multiplier(u, [band](double s) { return std::abs(s) <= band * (1.0 + 1e-14) ? cplx(1.0) : cplx(0.0); });
}

PaddingReport padding_report(const WeightedSignal& u, double rel_tol) {
  const auto& g = u.grid();
  PaddingReport rep;
  double peak = 0.0;
  for (Eigen::Index j = 0; j < u.values().rows(); ++j) peak = std::max(peak, u.values().row(j).norm());
  if (peak == 0.0) return rep;
  long first = -1;
  long last = -1;
  for (Eigen::Index j = 0; j < u.values().rows(); ++j) {
    if (u.values().row(j).norm() > rel_tol * peak) {
      if (first < 0) first = static_cast<long>(j);
      last = static_cast<long>(j);
    }
  }
  rep.empty = false;
  rep.support_start = g.time(static_cast<std::size_t>(first));
  rep.support_end = g.time(static_cast<std::size_t>(last));
  rep.support_length = rep.support_end - rep.support_start + g.dt();
  rep.pad = g.t0() + g.period() - rep.support_end - g.dt();
  rep.leak_bound = std::exp(-g.rho() * rep.pad);
  rep.adequate = rep.pad >= rep.support_length - 1e-9 * g.dt();
  return rep;
}

PaddingReport require_padding(const WeightedSignal& u, double rel_tol) {
  PaddingReport rep = padding_report(u, rel_tol);
  if (!rep.adequate)
    throw PreconditionError("insufficient zero padding: pad " + std::to_string(rep.pad) + " < support length " +
                            std::to_string(rep.support_length) + " (wrap-around would break causality)");
  return rep;
}

void write_spectral_csv(std::ostream& os, const SpectralSignal& uh) {
  os << "s";
  for (Eigen::Index c = 0; c < uh.dim(); ++c) os << ", re_" << c << ", im_" << c;
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < uh.size(); ++k) {
    os << uh.freq(k);
    for (Eigen::Index c = 0; c < uh.dim(); ++c) {
      const cplx z = uh.values()(static_cast<Eigen::Index>(k), c);
      os << ", " << z.real() << ", " << z.imag();
    }
    os << '\n';
  }
}

}  // namespace evo
