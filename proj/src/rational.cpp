#include "evo/rational.hpp"

#include "evo/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

namespace evo {

namespace {

std::string fmt(cplx z) {
  std::ostringstream os;
  os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  return os.str();
}

}  // namespace

RationalMatrixFunction::RationalMatrixFunction(Eigen::Index dim) : dim_(dim) {
  if (dim < 1) throw ShapeError("RationalMatrixFunction: dimension must be positive");
}

RationalMatrixFunction::RationalMatrixFunction(std::vector<CMatrix> poly, std::vector<cplx> poles,
                                               std::vector<CMatrix> residues)
    : dim_(0), poly_(std::move(poly)), poles_(std::move(poles)), residues_(std::move(residues)) {
  if (!poly_.empty())
    dim_ = poly_.front().rows();
  else if (!residues_.empty())
    dim_ = residues_.front().rows();
  else
    throw ShapeError("RationalMatrixFunction: cannot infer dimension from empty data");
  validate();
}

void RationalMatrixFunction::validate() const {
  if (poles_.size() != residues_.size()) throw ShapeError("RationalMatrixFunction: poles and residues differ in count");
  for (const auto& c : poly_)
    if (c.rows() != dim_ || c.cols() != dim_) throw ShapeError("RationalMatrixFunction: coefficient not dim x dim");
  for (const auto& r : residues_)
    if (r.rows() != dim_ || r.cols() != dim_) throw ShapeError("RationalMatrixFunction: residue not dim x dim");
  for (std::size_t m = 0; m < poles_.size(); ++m) {
    const cplx p = poles_[m];
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw InvariantError("non-finite pole");
    if (p == 0.0) throw PoleError("pole at z = 0 is not allowed (d0^{-1} is not invertible there)");
    for (std::size_t l = 0; l < m; ++l)
      if (std::abs(p - poles_[l]) < 1e-8 * std::abs(p))
        throw PoleError("nearly coincident poles " + fmt(poles_[l]) + " and " + fmt(p) + "; repeated poles are unsupported");
  }
}

RationalMatrixFunction RationalMatrixFunction::constant(const CMatrix& c) {
  if (c.rows() != c.cols()) throw ShapeError("constant: matrix must be square");
  return {{c}, {}, {}};
}

RationalMatrixFunction RationalMatrixFunction::scalar(std::vector<cplx> poly, std::vector<cplx> poles,
                                                      std::vector<cplx> residues) {
  std::vector<CMatrix> pc;
  std::vector<CMatrix> rc;
  for (cplx c : poly) pc.push_back(CMatrix::Constant(1, 1, c));
  for (cplx r : residues) rc.push_back(CMatrix::Constant(1, 1, r));
  if (pc.empty() && rc.empty()) return RationalMatrixFunction(1);
  if (pc.empty()) pc.push_back(CMatrix::Zero(1, 1));
  return {std::move(pc), std::move(poles), std::move(rc)};
}

bool RationalMatrixFunction::is_zero() const {
  for (const auto& c : poly_)
    if (c.norm() != 0.0) return false;
  for (const auto& r : residues_)
    if (r.norm() != 0.0) return false;
  return true;
}

CMatrix RationalMatrixFunction::operator()(cplx z) const {
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (std::size_t k = poly_.size(); k-- > 0;) out = out * z + poly_[k];
  for (std::size_t m = 0; m < poles_.size(); ++m) {
    const cplx dz = z - poles_[m];
    if (std::abs(dz) <= 1e-14 * std::max(1.0, std::abs(poles_[m])))
      throw PoleError("evaluation at pole z = " + fmt(poles_[m]));
    out += residues_[m] / dz;
  }
  return out;
}

cplx RationalMatrixFunction::scalar_at(cplx z) const {
  if (dim_ != 1) throw ShapeError("scalar_at on a matrix-valued function");
  return (*this)(z)(0, 0);
}

RationalMatrixFunction RationalMatrixFunction::adjoint() const {
  RationalMatrixFunction out(dim_);
  for (const auto& c : poly_) out.poly_.push_back(c.adjoint());
  for (cplx p : poles_) out.poles_.push_back(std::conj(p));
  for (const auto& r : residues_) out.residues_.push_back(r.adjoint());
  return out;
}

RationalMatrixFunction RationalMatrixFunction::times_z() const {
  // z R/(z-p) = R + p R/(z-p)
  RationalMatrixFunction out(dim_);
  CMatrix c0 = CMatrix::Zero(dim_, dim_);
  for (const auto& r : residues_) c0 += r;
  out.poly_.push_back(c0);
  for (const auto& c : poly_) out.poly_.push_back(c);
  out.poles_ = poles_;
  for (std::size_t m = 0; m < poles_.size(); ++m) out.residues_.push_back(poles_[m] * residues_[m]);
  return out;
}

RationalMatrixFunction RationalMatrixFunction::operator*(cplx a) const {
  RationalMatrixFunction out = *this;
  for (auto& c : out.poly_) c *= a;
  for (auto& r : out.residues_) r *= a;
  return out;
}

RationalMatrixFunction RationalMatrixFunction::operator+(const RationalMatrixFunction& other) const {
  if (other.dim_ != dim_) throw ShapeError("RationalMatrixFunction::operator+: dimension mismatch");
  RationalMatrixFunction out(dim_);
  const std::size_t deg = std::max(poly_.size(), other.poly_.size());
  for (std::size_t k = 0; k < deg; ++k) {
    CMatrix c = CMatrix::Zero(dim_, dim_);
    if (k < poly_.size()) c += poly_[k];
    if (k < other.poly_.size()) c += other.poly_[k];
    out.poly_.push_back(c);
  }
  out.poles_ = poles_;
  out.residues_ = residues_;
  for (std::size_t m = 0; m < other.poles_.size(); ++m) {
    bool merged = false;
    for (std::size_t l = 0; l < out.poles_.size(); ++l) {
      if (std::abs(out.poles_[l] - other.poles_[m]) <= 1e-14 * std::abs(other.poles_[m])) {
        out.residues_[l] += other.residues_[m];
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.poles_.push_back(other.poles_[m]);
      out.residues_.push_back(other.residues_[m]);
    }
  }
  out.validate();
  return out;
}

double RationalMatrixFunction::max_radius() const {
  // |p - r| > r  <=>  r < 1 / (2 Re(1/p)) whenever Re(1/p) > 0.
  double r = std::numeric_limits<double>::infinity();
  for (cplx p : poles_) {
    const double w = (1.0 / p).real();
    if (w > 0.0) r = std::min(r, 1.0 / (2.0 * w));
  }
  return r;
}

CMatrix LaplaceSymbol::operator()(cplx p) const {
  CMatrix out = D;
  for (std::size_t m = 0; m < q.size(); ++m) {
    const cplx dp = p - q[m];
    if (std::abs(dp) <= 1e-14 * std::max(1.0, std::abs(q[m]))) throw PoleError("symbol evaluated at its pole");
    out += c[m] / dp;
  }
  cplx pk = 1.0;
  for (const auto& e : integ) {
    pk /= p;
    out += pk * e;
  }
  return out;
}

LaplaceSymbol memory_symbol(const RationalMatrixFunction& f) {
  const Eigen::Index d = f.dim();
  LaplaceSymbol s;
  s.D = f.poly().empty() ? CMatrix::Zero(d, d) : f.poly().front();
  for (std::size_t m = 0; m < f.poles().size(); ++m) {
    const cplx q = 1.0 / f.poles()[m];
    s.D -= f.residues()[m] * q;
    s.q.push_back(q);
    s.c.push_back(-f.residues()[m] * q * q);
  }
  for (std::size_t k = 1; k < f.poly().size(); ++k) s.integ.push_back(f.poly()[k]);
  return s;
}

LaplaceSymbol derivative_symbol(const RationalMatrixFunction& f, double tol) {
  const Eigen::Index d = f.dim();
  const CMatrix f0 = f(0.0);
  double scale = 0.0;
  for (const auto& c : f.poly()) scale = std::max(scale, c.norm());
  for (std::size_t m = 0; m < f.poles().size(); ++m) scale = std::max(scale, (f.residues()[m] / f.poles()[m]).norm());
  if (f0.norm() > tol * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "kernel d0 F(d0^{-1}) is improper: F(0) = " << f0.norm()
       << " != 0 makes the symbol grow like p; apply the d0^{-1} reduction first (write F(z) = z G(z))";
    throw ImproperKernelError(os.str());
  }
  LaplaceSymbol s;
  s.D = f.poly().size() > 1 ? f.poly()[1] : CMatrix::Zero(d, d);
  for (std::size_t m = 0; m < f.poles().size(); ++m) {
    const cplx q = 1.0 / f.poles()[m];
    s.D -= f.residues()[m] * q * q;
    s.q.push_back(q);
    s.c.push_back(-f.residues()[m] * q * q * q);
  }
  for (std::size_t k = 2; k < f.poly().size(); ++k) s.integ.push_back(f.poly()[k]);
  return s;
}

RationalMatrixFunction pade_delay(double h, int order) {
  if (!(h > 0.0)) throw PreconditionError("pade_delay: h must be positive");
  if (order < 1 || order > 16) throw PreconditionError("pade_delay: order must be in [1, 16]");
  const int n = order;
  // P(x) = sum_k a_k x^k, exp(-x) ~ P(-x)/P(x).
  std::vector<double> a(static_cast<std::size_t>(n) + 1);
  a[0] = 1.0;
  for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k) + 1] = a[static_cast<std::size_t>(k)] * (n - k) / ((2.0 * n - k) * (k + 1));
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -a[static_cast<std::size_t>(i)] / a[static_cast<std::size_t>(n)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
  if (es.info() != Eigen::Success) throw Error("pade_delay: root finding failed");
  auto poly_at = [&](cplx x) {
    cplx v = 0.0;
    for (int k = n; k >= 0; --k) v = v * x + a[static_cast<std::size_t>(k)];
    return v;
  };
  auto dpoly_at = [&](cplx x) {
    cplx v = 0.0;
    for (int k = n; k >= 1; --k) v = v * x + static_cast<double>(k) * a[static_cast<std::size_t>(k)];
    return v;
  };
  // Symbol in p: (-1)^n + sum c/(p - q), q = x_r/h, c = P(-x_r)/(h P'(x_r)).
  cplx constant = (n % 2 == 0) ? 1.0 : -1.0;
  std::vector<cplx> poles;
  std::vector<cplx> residues;
  for (int i = 0; i < n; ++i) {
    const cplx x = es.eigenvalues()(i);
    const cplx q = x / h;
    const cplx c = poly_at(-x) / (h * dpoly_at(x));
    constant -= c / q;
    poles.push_back(1.0 / q);
    residues.push_back(-c / (q * q));
  }
  return RationalMatrixFunction::scalar({constant}, poles, residues);
}

PowerSeriesFit fit_power_series(const std::vector<cplx>& coeffs, double r, const std::vector<cplx>& poles,
                                int poly_degree, int samples) {
  if (!(r > 0.0)) throw PreconditionError("fit_power_series: r must be positive");
  if (coeffs.empty()) throw PreconditionError("fit_power_series: no coefficients");
  if (poly_degree < 0) throw PreconditionError("fit_power_series: negative degree");
  const int nb = poly_degree + 1 + static_cast<int>(poles.size());
  if (samples < 2 * nb) throw PreconditionError("fit_power_series: too few samples");
  Eigen::MatrixXcd A(samples, nb);
  Eigen::VectorXcd b(samples);
  for (int i = 0; i < samples; ++i) {
    const double th = 2.0 * std::numbers::pi * i / samples;
    const cplx w = 0.9 * r * std::exp(cplx(0.0, th));
    const cplx z = r + w;
    cplx val = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) val = val * w + coeffs[k];
    b(i) = val;
    cplx zk = 1.0;
    for (int k = 0; k <= poly_degree; ++k) {
      A(i, k) = zk;
      zk *= z;
    }
    for (std::size_t m = 0; m < poles.size(); ++m) A(i, poly_degree + 1 + static_cast<int>(m)) = 1.0 / (z - poles[m]);
  }
  const Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
  std::vector<cplx> poly(x.data(), x.data() + poly_degree + 1);
  std::vector<cplx> res(x.data() + poly_degree + 1, x.data() + nb);
  PowerSeriesFit out{RationalMatrixFunction::scalar(poly, poles, res), (A * x - b).cwiseAbs().maxCoeff()};
  return out;
}

}  // namespace evo
