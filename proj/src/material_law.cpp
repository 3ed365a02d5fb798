#include "evo/material_law.hpp"

#include "evo/error.hpp"
#include "evo/fourier_laplace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace evo {

namespace {

void require_rho(double rho, double r, const char* what) {
  if (!(rho > 1.0 / (2.0 * r))) {
    std::ostringstream os;
    os << what << ": rho = " << rho << " must exceed 1/(2r) = " << 1.0 / (2.0 * r);
    throw PreconditionError(os.str());
  }
}

}  // namespace

double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  if (A.size() == 1) return std::abs(A(0, 0));
  Eigen::JacobiSVD<CMatrix> svd(A);
  return svd.singularValues()(0);
}

MaterialLaw::MaterialLaw(CMatrix M0, RationalMatrixFunction M1, double r)
    : M0_(std::move(M0)), M1_(std::move(M1)), r_(r) {
  if (M0_.rows() != M0_.cols()) throw ShapeError("MaterialLaw: M0 must be square");
  if (M1_.dim() != M0_.rows()) throw ShapeError("MaterialLaw: M1 and M0 dimensions differ");
  if (!M0_.allFinite()) throw InvariantError("MaterialLaw: M0 not finite");
  if ((M0_ - M0_.adjoint()).norm() > 1e-12 * std::max(1.0, M0_.norm()))
    throw InvariantError("MaterialLaw: M0 is not Hermitian");
  const double rmax = M1_.max_radius();
  if (r_ <= 0.0) {
    r_ = std::isfinite(rmax) ? 0.99 * rmax : 1e6;
  } else if (!(r_ < rmax)) {
    std::ostringstream os;
    os << "MaterialLaw: a pole of M1 lies in the closed ball B(r,r) for r = " << r_ << " (largest admissible r is " << rmax
       << ")";
    throw PoleError(os.str());
  }
  gamma0(*this);
}

MaterialLaw MaterialLaw::identity(Eigen::Index dim) {
  return {CMatrix::Identity(dim, dim), RationalMatrixFunction(dim)};
}

MaterialLaw MaterialLaw::scalar(double m0, RationalMatrixFunction M1, double r) {
  return {CMatrix::Constant(1, 1, m0), std::move(M1), r};
}

CMatrix MaterialLaw::eval_unchecked(cplx z) const { return M0_ + z * M1_(z); }

CMatrix MaterialLaw::eval(cplx z) const {
  if (!in_ball(z)) {
    std::ostringstream os;
    os << "MaterialLaw::eval: z = " << z << " outside B(r,r), r = " << r_;
    throw DomainError(os.str());
  }
  return eval_unchecked(z);
}

CMatrix MaterialLaw::symbol(double s, double rho) const {
  const cplx p = laplace_var(s, rho);
  return p * M0_ + M1_(1.0 / p);
}

CMatrix MaterialLaw::memory_symbol_at(double s, double rho) const { return M1_(1.0 / laplace_var(s, rho)); }

MaterialLaw MaterialLaw::adjoint() const { return {M0_.adjoint(), M1_.adjoint(), r_}; }

WeightedSignal apply(const MaterialLaw& M, const WeightedSignal& u) {
  require_rho(u.grid().rho(), M.r(), "apply");
  if (u.dim() != M.dim()) throw ShapeError("apply: signal and law dimensions differ");
  const double rho = u.grid().rho();
  return apply_matrix_multiplier(u, M.dim(), [&](double s) { return M.eval(1.0 / laplace_var(s, rho)); });
}

WeightedSignal apply_adjoint(const MaterialLaw& M, const WeightedSignal& u) {
  require_rho(u.grid().rho(), M.r(), "apply_adjoint");
  if (u.dim() != M.dim()) throw ShapeError("apply_adjoint: signal and law dimensions differ");
  const double rho = u.grid().rho();
  return apply_matrix_multiplier(u, M.dim(), [&](double s) {
    return CMatrix(M.eval(1.0 / laplace_var(s, rho)).adjoint());
  });
}

WeightedSignal apply_d0M(const MaterialLaw& M, const WeightedSignal& u) {
  require_rho(u.grid().rho(), M.r(), "apply_d0M");
  if (u.dim() != M.dim()) throw ShapeError("apply_d0M: signal and law dimensions differ");
  const double rho = u.grid().rho();
  return apply_matrix_multiplier(u, M.dim(), [&](double s) { return M.symbol(s, rho); });
}

WeightedSignal apply_rational(const RationalMatrixFunction& F, const WeightedSignal& u) {
  // The image circle of 1/(is+rho) is B(1/(2rho), 1/(2rho)); it must be pole free.
  require_rho(u.grid().rho(), F.max_radius(), "apply_rational");
  return apply_function([&F](cplx z) { return F(z); }, F.dim(), u);
}

WeightedSignal apply_function(const std::function<CMatrix(cplx)>& F, Eigen::Index out_dim, const WeightedSignal& u) {
  const double rho = u.grid().rho();
  return apply_matrix_multiplier(u, out_dim, [&](double s) { return F(1.0 / laplace_var(s, rho)); });
}

double gamma0(const MaterialLaw& M) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M.M0(), Eigen::EigenvaluesOnly);
  const double g = es.eigenvalues().minCoeff();
  if (!(g > 0.0)) {
    std::ostringstream os;
    os << "MaterialLaw: M0 is not positive definite (smallest eigenvalue " << g << ")";
    throw InvariantError(os.str());
  }
  return g;
}

double mu0_of(const RationalMatrixFunction& M1, double rho, int n_samples) {
  if (n_samples < 8) throw PreconditionError("mu0: need at least 8 samples");
  if (M1.is_zero()) return 0.0;
  double mx = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n_samples;
    const cplx z = (1.0 + std::exp(cplx(0.0, th))) / (2.0 * rho);
    const double v = spectral_norm(M1(z));
    if (!std::isfinite(v)) throw InvariantError("mu0: M1 unbounded on the sampled circle");
    mx = std::max(mx, v);
  }
  return 1.05 * mx;
}

double mu0(const MaterialLaw& M, double rho, int n_samples) {
  require_rho(rho, M.r(), "mu0");
  return mu0_of(M.M1(), rho, n_samples);
}

double beta0(const MaterialLaw& M, double rho, int n_samples) { return rho * gamma0(M) - mu0(M, rho, n_samples); }

double select_rho(const MaterialLaw& M) {
  const double base = M.rho_min() + 1.0;
  return 2.0 * mu0(M, base) / gamma0(M) + M.rho_min() + 1.0;
}

}  // namespace evo
