#include "evo/solver.hpp"

#include "evo/error.hpp"
#include "evo/parallel.hpp"
#include "evo/realization.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace evo {

namespace {

// LU factorization of a tridiagonal matrix with partial pivoting (zgttrf).
struct TridiagonalLU {
  CVector dl, d, du, du2;
  std::vector<lapack_int> ipiv;
  double rcond = 0.0;

  explicit TridiagonalLU(const Tridiagonal& T, bool estimate_condition) {
    const lapack_int n = T.size();
    dl = T.lower;
    d = T.diag;
    du = T.upper;
    du2.resize(std::max<lapack_int>(n - 2, 1));
    ipiv.resize(static_cast<std::size_t>(n));
    double anorm = 0.0;
    if (estimate_condition) {
      for (lapack_int j = 0; j < n; ++j) {
        double col = std::abs(T.diag(j));
        if (j > 0) col += std::abs(T.upper(j - 1));
        if (j + 1 < n) col += std::abs(T.lower(j));
        anorm = std::max(anorm, col);
      }
    }
    const lapack_int info = LAPACKE_zgttrf(n, dl.data(), d.data(), du.data(), du2.data(), ipiv.data());
    if (info != 0) throw SingularSystemError("tridiagonal factorization failed (info " + std::to_string(info) + ")");
    if (estimate_condition) {
      const lapack_int cinfo = LAPACKE_zgtcon('1', n, dl.data(), d.data(), du.data(), du2.data(), ipiv.data(), anorm, &rcond);
      if (cinfo != 0) rcond = 0.0;
    }
  }

  void solve(CVector& b) const {
    const auto n = static_cast<lapack_int>(d.size());
    const lapack_int info = LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), d.data(), du.data(), du2.data(),
                                           ipiv.data(), b.data(), n);
    if (info != 0) throw SingularSystemError("tridiagonal solve failed (info " + std::to_string(info) + ")");
  }
};

CVector law_diagonal(const EvoProblem& prob, double s) {
  const double rho = prob.grid.rho();
  const int n = prob.sd.reduced_size();
  const cplx mp = prob.medium.pressure.symbol(s, rho)(0, 0);
  const cplx mv = prob.medium.velocity.symbol(s, rho)(0, 0);
  CVector d(n);
  for (int k = 0; k < n; ++k) d(k) = (k % 2 == 0) ? mp : mv;
  return d;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void fill_diagnostics(const EvoProblem& prob, SolveReport& rep) {
  rep.rho = prob.grid.rho();
  rep.gamma0 = prob.gamma0();
  rep.mu0 = prob.mu0();
  rep.beta0 = rep.rho * rep.gamma0 - rep.mu0;
  const double fn = rho_norm(prob.f);
  rep.energy_ratio = fn > 0.0 ? rho_norm(rep.U) / fn : 0.0;
  rep.residual_rel = residual(prob, rep.U, &rep.residual_absolute);
  rep.causality_leak = causality_leak(prob.f, rep.U);
  rep.causality_margin = 1e-6 - rep.causality_leak;
}

}  // namespace

double AcousticMedium::gamma0() const { return std::min(evo::gamma0(pressure), evo::gamma0(velocity)); }

double AcousticMedium::mu0(double rho, int n_samples) const {
  return std::max(evo::mu0(pressure, rho, n_samples), evo::mu0(velocity, rho, n_samples));
}

double AcousticMedium::r() const { return std::min(pressure.r(), velocity.r()); }

EvoProblem::EvoProblem(WeightedGrid grid_, SpatialDiscretization sd_, AcousticMedium medium_, BoundaryLaw bl_,
                       WeightedSignal f_)
    : grid(grid_), sd(std::move(sd_)), medium(std::move(medium_)), bl(std::move(bl_)), f(std::move(f_)) {
  if (medium.pressure.dim() != 1 || medium.velocity.dim() != 1)
    throw ShapeError("AcousticMedium: pressure and velocity laws must be scalar");
}

double EvoProblem::r() const { return std::min(medium.r(), bl.r()); }

EvoProblem EvoProblem::with_rho(double rho) const {
  const WeightedGrid g = grid.with_rho(rho);
  return {g, sd, medium, bl, WeightedSignal(g, f.values())};
}

EvoProblem EvoProblem::with_source(WeightedSignal f_new) const { return {grid, sd, medium, bl, std::move(f_new)}; }

double select_rho(const AcousticMedium& medium, const BoundaryLaw& bl) {
  const double r = std::min(medium.r(), bl.r());
  const double base = 1.0 / (2.0 * r) + 1.0;
  return 2.0 * medium.mu0(base) / medium.gamma0() + 1.0 / (2.0 * r) + 1.0;
}

void validate(const EvoProblem& prob) {
  if (prob.f.dim() != prob.sd.reduced_size())
    throw ShapeError("source has " + std::to_string(prob.f.dim()) + " components, reduced state needs " +
                     std::to_string(prob.sd.reduced_size()));
  if (!prob.f.grid().compatible(prob.grid)) throw ShapeError("source grid differs from the problem grid");
  if (prob.bl.alpha().size() != prob.sd.nv()) throw ShapeError("boundary profile built for a different grid");
  const double rho = prob.grid.rho();
  const double r = prob.r();
  if (!(rho > 1.0 / (2.0 * r))) {
    std::ostringstream os;
    os << "rho = " << rho << " must exceed 1/(2r) = " << 1.0 / (2.0 * r);
    throw PreconditionError(os.str());
  }
  const double g0 = prob.gamma0();
  const double m0 = prob.mu0();
  if (!(rho * g0 - m0 > 0.0)) {
    std::ostringstream os;
    os << "beta0 = rho*gamma0 - mu0 = " << rho * g0 - m0 << " <= 0: rho = " << rho << " must exceed mu0/gamma0 = "
       << m0 / g0 << " (mu0 = " << m0 << ", gamma0 = " << g0 << ")";
    throw PreconditionError(os.str());
  }
  require_padding(prob.f);
}

bool SolveReport::energy_bound_ok(double slack) const {
  if (!(beta0 > 0.0)) return false;
  return energy_ratio <= (1.0 + slack) / beta0;
}

Tridiagonal system_matrix(const EvoProblem& prob, double s) {
  Tridiagonal T = assemble_A_freq(prob.sd, prob.bl, s, prob.grid.rho()).A;
  T.add_diagonal(law_diagonal(prob, s));
  return T;
}

WeightedSignal apply_operator(const EvoProblem& prob, const WeightedSignal& U) {
  if (U.dim() != prob.sd.reduced_size()) throw ShapeError("apply_operator: expected reduced state");
  const SpectralSignal uh = forward(U);
  CMatrix out(uh.values().rows(), uh.dim());
  parallel_for(uh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.row(kk) = (system_matrix(prob, uh.freq(k)) * CVector(uh.values().row(kk).transpose())).transpose();
  });
  return inverse(SpectralSignal(U.grid(), std::move(out)), U.grid());
}

WeightedSignal apply_operator_adjoint(const EvoProblem& prob, const WeightedSignal& U) {
  if (U.dim() != prob.sd.reduced_size()) throw ShapeError("apply_operator_adjoint: expected reduced state");
  const SpectralSignal uh = forward(U);
  CMatrix out(uh.values().rows(), uh.dim());
  parallel_for(uh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.row(kk) = (system_matrix(prob, uh.freq(k)).adjoint() * CVector(uh.values().row(kk).transpose())).transpose();
  });
  return inverse(SpectralSignal(U.grid(), std::move(out)), U.grid());
}

namespace {

WeightedSignal apply_law_diagonal(const EvoProblem& prob, const WeightedSignal& U, bool adjoint) {
  if (U.dim() != prob.sd.reduced_size()) throw ShapeError("apply_d0M_reduced: expected reduced state");
  SpectralSignal uh = forward(U);
  for (std::size_t k = 0; k < uh.size(); ++k) {
    const CVector d = adjoint ? CVector(law_diagonal(prob, uh.freq(k)).conjugate()) : law_diagonal(prob, uh.freq(k));
    auto row = uh.mutable_values().row(static_cast<Eigen::Index>(k));
    row = row.cwiseProduct(d.transpose());
  }
  return inverse(uh, U.grid());
}

}  // namespace

WeightedSignal apply_d0M_reduced(const EvoProblem& prob, const WeightedSignal& U) {
  return apply_law_diagonal(prob, U, false);
}

WeightedSignal apply_d0M_reduced_adjoint(const EvoProblem& prob, const WeightedSignal& U) {
  return apply_law_diagonal(prob, U, true);
}

double residual(const EvoProblem& prob, const WeightedSignal& U, bool* absolute) {
  require_same_shape(U, prob.f, "residual");
  const SpectralSignal uh = forward(U);
  const SpectralSignal fh = forward(prob.f);
  std::vector<double> acc(uh.size(), 0.0);
  parallel_for(uh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const CVector r = system_matrix(prob, uh.freq(k)) * CVector(uh.values().row(kk).transpose()) -
                      CVector(fh.values().row(kk).transpose());
    acc[k] = r.squaredNorm();
  });
  double num = 0.0;
  for (double a : acc) num += a;
  num = std::sqrt(num * uh.ds());
  const double fn = rho_norm(prob.f);
  if (absolute) *absolute = (fn == 0.0);
  return fn > 0.0 ? num / fn : num;
}

double causality_leak(const WeightedSignal& f, const WeightedSignal& U) {
  const PaddingReport pr = padding_report(f, 0.0);
  const double fn = rho_norm(f);
  if (pr.empty) return fn > 0.0 ? 0.0 : rho_norm(U);
  const double pre = rho_norm(truncate_before(U, pr.support_start - 1.5 * f.grid().dt()));
  return pre / fn;
}

WeightedSignal solve_frequency_raw(const EvoProblem& prob, double* max_cond) {
  const SpectralSignal fh = forward(prob.f);
  CMatrix out(fh.values().rows(), fh.dim());
  std::vector<double> cond(fh.size(), 0.0);
  const bool want_cond = max_cond != nullptr;
  parallel_for(fh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double s = fh.freq(k);
    TridiagonalLU lu(system_matrix(prob, s), want_cond);
    if (want_cond) {
      if (!(lu.rcond > 1e-300)) {
        std::ostringstream os;
        os << "system matrix (is+rho)M + A(s) is singular at s = " << s << " (beta0 <= 0 or inadmissible law)";
        throw SingularSystemError(os.str());
      }
      cond[k] = 1.0 / lu.rcond;
    }
    CVector b = fh.values().row(kk).transpose();
    lu.solve(b);
    out.row(kk) = b.transpose();
  });
  if (max_cond) {
    *max_cond = 0.0;
    for (double c : cond) *max_cond = std::max(*max_cond, c);
  }
  return inverse(SpectralSignal(prob.grid, std::move(out)), prob.grid);
}

SolveReport solve_frequency(const EvoProblem& prob) {
  const auto t_start = std::chrono::steady_clock::now();
  validate(prob);
  double cond = 0.0;
  SolveReport rep(solve_frequency_raw(prob, &cond));
  rep.method = "frequency";
  rep.max_condition_number = cond;
  fill_diagnostics(prob, rep);
  rep.wall_time = seconds_since(t_start);
  return rep;
}

SolveReport solve_timestep(const EvoProblem& prob, double dt_sub) {
  const auto t_start = std::chrono::steady_clock::now();
  validate(prob);
  const WeightedGrid& g = prob.grid;
  if (dt_sub <= 0.0) dt_sub = g.dt();
  const long nsub = std::lround(g.dt() / dt_sub);
  if (nsub < 1 || std::abs(nsub * dt_sub - g.dt()) > 1e-9 * g.dt())
    throw PreconditionError("solve_timestep: dt_sub = " + std::to_string(dt_sub) + " must divide dt = " + std::to_string(g.dt()));
  const double h = g.dt() / static_cast<double>(nsub);
  const double rho = g.rho();
  const SpatialDiscretization& sd = prob.sd;
  const int np = sd.np();
  const int n = sd.reduced_size();
  const double idx = 1.0 / sd.dx();

  const StateSpaceRealization ssp = realize(memory_symbol(prob.medium.pressure.M1()), rho);
  const StateSpaceRealization ssv = realize(memory_symbol(prob.medium.velocity.M1()), rho);
  const StateSpaceRealization ssy = realize(prob.bl.Y_symbol(), rho);
  KernelStepper kp(ssp, h, np);
  KernelStepper kv(ssv, h, np - 1);
  KernelStepper ky(ssy, h, 2);
  const cplx m0p = prob.medium.pressure.M0()(0, 0);
  const cplx m0v = prob.medium.velocity.M0()(0, 0);
  const cplx a0 = prob.bl.alpha()(0);
  const cplx aL = prob.bl.alpha()(sd.nv() - 1);

  Tridiagonal K(n);
  K.upper.setConstant(idx);
  K.lower.setConstant(-idx);
  for (int k = 0; k < n; ++k) K.diag(k) = (k % 2 == 0) ? m0p / h + kp.gain()(0, 0) : m0v / h + kv.gain()(0, 0);
  K.diag(0) += -a0 * ky.gain()(0, 0) * idx;
  K.diag(n - 1) += aL * ky.gain()(0, 0) * idx;
  const TridiagonalLU lu(K, true);

  CMatrix U = CMatrix::Zero(static_cast<Eigen::Index>(g.n()), n);
  CVector x = CVector::Zero(n);
  CMatrix up(1, np), uv(1, np - 1), ub(1, 2);
  const CMatrix& F = prob.f.values();
  const long total = static_cast<long>(g.n() - 1) * nsub;
  for (long m = 1; m <= total; ++m) {
    const long j0 = (m - 1) / nsub;
    const double w = static_cast<double>(m - j0 * nsub) / static_cast<double>(nsub);
    CVector rhs = ((1.0 - w) * F.row(j0) + w * F.row(j0 + 1)).transpose();
    const CMatrix hp = kp.history();
    const CMatrix hv = kv.history();
    const CMatrix hb = ky.history();
    for (int k = 0; k < n; ++k) {
      if (k % 2 == 0)
        rhs(k) += m0p / h * x(k) - hp(0, k / 2);
      else
        rhs(k) += m0v / h * x(k) - hv(0, (k - 1) / 2);
    }
    rhs(0) += a0 * hb(0, 0) * idx;
    rhs(n - 1) -= aL * hb(0, 1) * idx;
    lu.solve(rhs);
    x = rhs;
    for (int i = 0; i < np; ++i) up(0, i) = x(2 * i);
    for (int j = 0; j + 1 < np; ++j) uv(0, j) = x(2 * j + 1);
    ub(0, 0) = x(0);
    ub(0, 1) = x(n - 1);
    kp.advance(up);
    kv.advance(uv);
    ky.advance(ub);
    if (m % nsub == 0) U.row(m / nsub) = x.transpose();
  }
  SolveReport rep(WeightedSignal(g, std::move(U)));
  rep.method = "timestep";
  rep.max_condition_number = lu.rcond > 0.0 ? 1.0 / lu.rcond : std::numeric_limits<double>::infinity();
  fill_diagnostics(prob, rep);
  rep.wall_time = seconds_since(t_start);
  return rep;
}

std::string format_report(const SolveReport& rep) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "method: " << rep.method << '\n';
  os << "rho: " << rep.rho << '\n';
  os << "gamma0: " << rep.gamma0 << '\n';
  os << "mu0: " << rep.mu0 << '\n';
  os << "beta0: " << rep.beta0 << '\n';
  os << "energy_ratio: " << rep.energy_ratio << '\n';
  os << "energy_bound: " << (rep.beta0 > 0.0 ? 1.0 / rep.beta0 : std::numeric_limits<double>::infinity()) << '\n';
  os << "energy_bound_ok: " << (rep.energy_bound_ok() ? "yes" : "no") << '\n';
  os << "residual_rel: " << rep.residual_rel << (rep.residual_absolute ? " (absolute, f = 0)" : "") << '\n';
  os << "causality_leak: " << rep.causality_leak << '\n';
  os << "causality_margin: " << rep.causality_margin << '\n';
  os << "max_condition_number: " << rep.max_condition_number << '\n';
  os << "wall_time: " << rep.wall_time << '\n';
  return os.str();
}

}  // namespace evo
