#include "evo/realization.hpp"

#include "evo/error.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

namespace evo {

CMatrix StateSpaceRealization::response(cplx p) const {
  if (order() == 0) return D;
  const CMatrix R = p * CMatrix::Identity(order(), order()) - F;
  return D + H * R.partialPivLu().solve(G);
}

CMatrix StateSpaceRealization::impulse_response(double t) const {
  if (t < 0.0) return CMatrix::Zero(dim(), dim());
  if (order() == 0) return CMatrix::Zero(dim(), dim());
  const CMatrix E = (F * t).exp();
  return H * E * G;
}

double StateSpaceRealization::spectral_abscissa() const {
  if (order() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::ComplexEigenSolver<CMatrix> es(F, false);
  return es.eigenvalues().real().maxCoeff();
}

StateSpaceRealization realize(const LaplaceSymbol& symbol, double rho) {
  const Eigen::Index d = symbol.dim();
  const auto M = static_cast<Eigen::Index>(symbol.q.size());
  const auto K = static_cast<Eigen::Index>(symbol.integ.size());
  const Eigen::Index N = (M + K) * d;
  StateSpaceRealization ss{CMatrix::Zero(N, N), CMatrix::Zero(N, d), CMatrix::Zero(d, N), symbol.D};
  const CMatrix I = CMatrix::Identity(d, d);
  for (Eigen::Index m = 0; m < M; ++m) {
    const cplx q = symbol.q[static_cast<std::size_t>(m)];
    if (!(q.real() < rho)) {
      std::ostringstream os;
      os << "realize: mode " << q << " has real part >= rho = " << rho << "; the kernel is not stable in the weighted space";
      throw PreconditionError(os.str());
    }
    ss.F.block(m * d, m * d, d, d) = q * I;
    ss.G.block(m * d, 0, d, d) = I;
    ss.H.block(0, m * d, d, d) = symbol.c[static_cast<std::size_t>(m)];
  }
  // Integrator chain: y_1' = u, y_k' = y_{k-1}; y_k has symbol p^{-k}.
  const Eigen::Index off = M * d;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (k == 0)
      ss.G.block(off, 0, d, d) = I;
    else
      ss.F.block(off + k * d, off + (k - 1) * d, d, d) = I;
    ss.H.block(0, off + k * d, d, d) = symbol.integ[static_cast<std::size_t>(k)];
  }
  return ss;
}

KernelStepper::KernelStepper(const StateSpaceRealization& ss, double dt, Eigen::Index channels) {
  if (!(dt > 0.0)) throw PreconditionError("KernelStepper: dt must be positive");
  const Eigen::Index N = ss.order();
  Phi_ = (CMatrix::Identity(N, N) - dt * ss.F).inverse();
  PhiG_ = dt * Phi_ * ss.G;
  HPhi_ = ss.H * Phi_;
  gain_ = ss.D + ss.H * PhiG_;
  x_ = CMatrix::Zero(N, channels);
}

CMatrix KernelStepper::history() const { return HPhi_ * x_; }

void KernelStepper::advance(const CMatrix& u_next) {
  if (x_.rows() == 0) return;
  x_ = Phi_ * x_ + PhiG_ * u_next;
}

void KernelStepper::reset() { x_.setZero(); }

}  // namespace evo
