#include "evo/acoustic.hpp"

#include "evo/error.hpp"
#include "evo/material_law.hpp"
#include "evo/parallel.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace evo {

namespace {

using Trip = Eigen::Triplet<double>;

SpMat from_triplets(int rows, int cols, const std::vector<Trip>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Face values of a cell field: interior faces average, boundary faces copy.
CVector cells_to_faces(const CVector& q) {
  const auto np = q.size();
  CVector f(np + 1);
  f(0) = q(0);
  f(np) = q(np - 1);
  for (Eigen::Index j = 1; j < np; ++j) f(j) = 0.5 * (q(j - 1) + q(j));
  return f;
}

}  // namespace

SpatialDiscretization::SpatialDiscretization(double L, int np) : L_(L), np_(np), dx_(0.0) {
  if (!(L > 0.0)) throw InvariantError("SpatialDiscretization: L must be positive");
  if (np < 4) throw InvariantError("SpatialDiscretization: need np >= 4 cells");
  dx_ = L / np;
  const int nv = np + 1;
  std::vector<Trip> t;
  for (int i = 0; i < np; ++i) {
    t.emplace_back(i, i, -1.0 / dx_);
    t.emplace_back(i, i + 1, 1.0 / dx_);
  }
  D_div_ = from_triplets(np, nv, t);
  t.clear();
  for (int j = 1; j < np; ++j) {
    t.emplace_back(j, j - 1, -1.0 / dx_);
    t.emplace_back(j, j, 1.0 / dx_);
  }
  D_grad_ = from_triplets(nv, np, t);
  t.clear();
  for (int i = 0; i < np; ++i) t.emplace_back(i, i, dx_);
  W_p_ = from_triplets(np, np, t);
  t.clear();
  for (int j = 0; j < nv; ++j) t.emplace_back(j, j, (j == 0 || j == np) ? 0.5 * dx_ : dx_);
  W_v_ = from_triplets(nv, nv, t);
  B_ = from_triplets(np, nv, {Trip(0, 0, -1.0), Trip(np - 1, np, 1.0)});
  const double res = sbp_residual();
  if (res > 1e-13) throw InvariantError("SpatialDiscretization: summation-by-parts identity violated by " + std::to_string(res));
}

double SpatialDiscretization::sbp_residual() const {
  const SpMat R = W_p_ * D_div_ + SpMat(D_grad_.transpose()) * W_v_ - B_;
  double mx = 0.0;
  for (int k = 0; k < R.outerSize(); ++k)
    for (SpMat::InnerIterator it(R, k); it; ++it) mx = std::max(mx, std::abs(it.value()));
  return mx;
}

BoundaryLaw::BoundaryLaw(RationalMatrixFunction g, RVector alpha, RVector div_alpha)
    : g_(std::move(g)), alpha_(std::move(alpha)), div_alpha_(std::move(div_alpha)) {
  if (g_.dim() != 1) throw ShapeError("BoundaryLaw: g must be scalar");
  if (alpha_.size() < 5 || div_alpha_.size() != alpha_.size() - 1)
    throw ShapeError("BoundaryLaw: alpha must live on nv faces and div_alpha on nv-1 cells");
  if (!alpha_.allFinite() || !div_alpha_.allFinite()) throw InvariantError("BoundaryLaw: non-finite profile");
  Y_ = derivative_symbol(g_);
}

BoundaryLaw BoundaryLaw::linear_profile(RationalMatrixFunction g, const SpatialDiscretization& sd, double n_alpha_left,
                                        double n_alpha_right) {
  const double a0 = -n_alpha_left;
  const double a1 = n_alpha_right;
  RVector alpha(sd.nv());
  for (int j = 0; j < sd.nv(); ++j) alpha(j) = a0 + (a1 - a0) * sd.x_face(j) / sd.L();
  RVector div = RVector::Constant(sd.np(), (a1 - a0) / sd.L());
  return {std::move(g), std::move(alpha), std::move(div)};
}

BoundaryLaw BoundaryLaw::from_profile(RationalMatrixFunction g, const SpatialDiscretization& sd,
                                      const std::function<double(double)>& alpha,
                                      const std::function<double(double)>& dalpha) {
  RVector a(sd.nv());
  RVector d(sd.np());
  for (int j = 0; j < sd.nv(); ++j) a(j) = alpha(sd.x_face(j));
  for (int i = 0; i < sd.np(); ++i) d(i) = dalpha(sd.x_cell(i));
  return {std::move(g), std::move(a), std::move(d)};
}

BoundaryLaw BoundaryLaw::robin(double k, const SpatialDiscretization& sd) {
  return linear_profile(RationalMatrixFunction::scalar({0.0, k}, {}, {}), sd);
}

BoundaryLaw BoundaryLaw::neumann(const SpatialDiscretization& sd) { return linear_profile(RationalMatrixFunction(1), sd); }

cplx BoundaryLaw::Y(double s, double rho) const {
  const cplx p = laplace_var(s, rho);
  try {
    return Y_(p)(0, 0);
  } catch (const PoleError&) {
    std::ostringstream os;
    os << "boundary law has a pole at frequency s = " << s << " (rho = " << rho << ")";
    throw PoleError(os.str());
  }
}

double BoundaryLaw::passivity_margin(double rho, const RVector& freqs) const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < freqs.size(); ++k) {
    const cplx y = Y(freqs(k), rho);
    m = std::min({m, (n_alpha_left() * y).real(), (n_alpha_right() * y).real()});
  }
  return m;
}

CVector Tridiagonal::operator*(const CVector& x) const {
  const int n = size();
  if (x.size() != n) throw ShapeError("Tridiagonal: vector size mismatch");
  CVector y = diag.cwiseProduct(x);
  for (int i = 0; i + 1 < n; ++i) {
    y(i) += upper(i) * x(i + 1);
    y(i + 1) += lower(i) * x(i);
  }
  return y;
}

Tridiagonal Tridiagonal::adjoint() const {
  Tridiagonal t(size());
  t.diag = diag.conjugate();
  t.lower = upper.conjugate();
  t.upper = lower.conjugate();
  return t;
}

CMatrix Tridiagonal::dense() const {
  const int n = size();
  CMatrix m = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = diag(i);
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = upper(i);
    m(i + 1, i) = lower(i);
  }
  return m;
}

Tridiagonal& Tridiagonal::add_diagonal(const CVector& d) {
  if (d.size() != size()) throw ShapeError("Tridiagonal: diagonal size mismatch");
  diag += d;
  return *this;
}

ReducedOperator assemble_A_freq(const SpatialDiscretization& sd, const BoundaryLaw& bl, double s, double rho) {
  if (bl.alpha().size() != sd.nv()) throw ShapeError("assemble_A_freq: boundary law built for another grid");
  const int n = sd.reduced_size();
  const double h = 1.0 / sd.dx();
  const cplx y = bl.Y(s, rho);
  ReducedOperator op{Tridiagonal(n), bl.alpha()(0) * y, bl.alpha()(sd.nv() - 1) * y};
  // Row order alternates p (even) and v (odd); the div/grad stencils become
  // +-1/dx on the off-diagonals.
  for (int k = 0; k + 1 < n; ++k) {
    if (k % 2 == 0) {
      op.A.upper(k) = h;   // p_i row, v_{i+1}
      op.A.lower(k) = -h;  // v_{i+1} row, p_i
    } else {
      op.A.upper(k) = h;   // v_j row, p_j
      op.A.lower(k) = -h;  // p_j row, v_j
    }
  }
  op.A.diag(0) = -op.left * h;
  op.A.diag(n - 1) = op.right * h;
  return op;
}

ReducedOperator assemble_Astar_freq(const SpatialDiscretization& sd, const BoundaryLaw& bl, double s, double rho) {
  ReducedOperator op = assemble_A_freq(sd, bl, s, rho);
  op.A = op.A.adjoint();
  op.left = -std::conj(op.left);
  op.right = -std::conj(op.right);
  return op;
}

namespace {

WeightedSignal apply_reduced(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U, bool star) {
  if (U.dim() != sd.reduced_size())
    throw ShapeError("apply_A: expected reduced state of size " + std::to_string(sd.reduced_size()));
  const double rho = U.grid().rho();
  const SpectralSignal uh = forward(U);
  CMatrix out(uh.values().rows(), uh.dim());
  parallel_for(uh.size(), [&](std::size_t k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double s = uh.freq(k);
    const ReducedOperator op = star ? assemble_Astar_freq(sd, bl, s, rho) : assemble_A_freq(sd, bl, s, rho);
    out.row(kk) = (op.A * CVector(uh.values().row(kk).transpose())).transpose();
  });
  return inverse(SpectralSignal(U.grid(), std::move(out)), U.grid());
}

}  // namespace

WeightedSignal apply_A_time(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U) {
  return apply_reduced(sd, bl, U, false);
}

WeightedSignal apply_Astar_time(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U) {
  return apply_reduced(sd, bl, U, true);
}

WeightedSignal apply_A_full(const SpatialDiscretization& sd, const WeightedSignal& U) {
  const int np = sd.np();
  const int nv = sd.nv();
  if (U.dim() != np + nv) throw ShapeError("apply_A_full: expected stacked (p, v) of size np + nv");
  const CMatrix& X = U.values();
  CMatrix out(X.rows(), np + nv);
  const SpMat Dd = sd.D_div();
  const SpMat Dg = sd.D_grad();
  out.leftCols(np) = (Dd * X.rightCols(nv).transpose()).transpose();
  out.rightCols(nv) = (Dg * X.leftCols(np).transpose()).transpose();
  return {U.grid(), std::move(out)};
}

WeightedSignal expand_state(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& U) {
  const int np = sd.np();
  const int nv = sd.nv();
  if (U.dim() != sd.reduced_size()) throw ShapeError("expand_state: expected reduced state");
  const double rho = U.grid().rho();
  const SpectralSignal uh = forward(U);
  CMatrix out = CMatrix::Zero(uh.values().rows(), np + nv);
  for (std::size_t k = 0; k < uh.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const cplx y = bl.Y(uh.freq(k), rho);
    for (int i = 0; i < np; ++i) out(kk, i) = uh.values()(kk, SpatialDiscretization::p_index(i));
    for (int j = 1; j < np; ++j) out(kk, np + j) = uh.values()(kk, SpatialDiscretization::v_index(j));
    out(kk, np) = bl.alpha()(0) * y * out(kk, 0);
    out(kk, np + np) = bl.alpha()(nv - 1) * y * out(kk, np - 1);
  }
  return inverse(SpectralSignal(U.grid(), std::move(out)), U.grid());
}

WeightedSignal reduce_state(const SpatialDiscretization& sd, const WeightedSignal& U_full) {
  const int np = sd.np();
  if (U_full.dim() != np + sd.nv()) throw ShapeError("reduce_state: expected stacked (p, v)");
  CMatrix out(U_full.values().rows(), sd.reduced_size());
  for (int i = 0; i < np; ++i) out.col(SpatialDiscretization::p_index(i)) = U_full.values().col(i);
  for (int j = 1; j < np; ++j) out.col(SpatialDiscretization::v_index(j)) = U_full.values().col(np + j);
  return {U_full.grid(), std::move(out)};
}

WeightedSignal reduced_from_fields(const SpatialDiscretization& sd, const WeightedSignal& p, const WeightedSignal& v) {
  if (p.dim() != sd.np() || v.dim() != sd.nv()) throw ShapeError("reduced_from_fields: field sizes do not match the grid");
  if (!p.grid().compatible(v.grid())) throw ShapeError("reduced_from_fields: grid mismatch");
  CMatrix full(p.values().rows(), sd.np() + sd.nv());
  full << p.values(), v.values();
  return reduce_state(sd, WeightedSignal(p.grid(), std::move(full)));
}

double boundary_sign_functional(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& p,
                                double cut) {
  if (p.dim() != sd.np()) throw ShapeError("boundary_sign_functional: expected np cell pressures");
  const double rho = p.grid().rho();
  const WeightedSignal q = apply_multiplier(p, [&](double s) { return bl.Y(s, rho); });
  const SpMat& Dg = sd.D_grad();
  const SpMat& Dd = sd.D_div();
  const SpMat& Wv = sd.W_v();
  const SpMat& Wp = sd.W_p();
  const auto& g = p.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (g.time(j) > cut + 1e-9 * g.dt()) continue;
    const auto r = static_cast<Eigen::Index>(j);
    const CVector pj = p.values().row(r).transpose();
    const CVector w = bl.alpha().cast<cplx>().cwiseProduct(cells_to_faces(q.values().row(r).transpose()));
    const CVector gp = Dg * pj;
    const CVector dw = Dd * w;
    const cplx val = gp.dot(Wv * w) + pj.dot(Wp * dw);
    acc += g.weight(j) * val.real();
  }
  return acc;
}

double product_rule_residual(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedSignal& p) {
  if (p.dim() != sd.np()) throw ShapeError("product_rule_residual: expected np cell pressures");
  const int np = sd.np();
  if (!(p.grid().rho() > 0.5 / bl.r())) throw PreconditionError("product_rule_residual: rho must exceed 1/(2r) of g");
  // The scalar law acts on every cell channel.
  const auto& gl = bl.g();
  const WeightedSignal q = apply_function(
      [&gl, np](cplx z) { return CMatrix(gl(z)(0, 0) * CMatrix::Identity(np, np)); }, np, p);
  const double h = 1.0 / sd.dx();
  const RVector& a = bl.alpha();
  const RVector& da = bl.div_alpha();
  const auto& g = q.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const CVector qj = q.values().row(static_cast<Eigen::Index>(j)).transpose();
    const CVector qf = cells_to_faces(qj);
    double row = 0.0;
    for (int i = 1; i + 1 < np; ++i) {
      const cplx div_aq = (a(i + 1) * qf(i + 1) - a(i) * qf(i)) * h;
      const cplx a_grad = 0.5 * (a(i) * (qj(i) - qj(i - 1)) + a(i + 1) * (qj(i + 1) - qj(i))) * h;
      row += std::norm(div_aq - da(i) * qj(i) - a_grad);
    }
    acc += g.weight(j) * sd.dx() * row;
  }
  return std::sqrt(acc);
}

}  // namespace evo
