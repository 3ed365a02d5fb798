#include "evo/signal.hpp"

#include "evo/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace evo {

namespace {

bool close_rel(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Tolerance used when comparing grid times with cut points.
double time_slack(const WeightedGrid& g) { return 1e-9 * g.dt(); }

}  // namespace

WeightedGrid::WeightedGrid(double t0, double dt, std::size_t n, double rho)
    : t0_(t0), dt_(dt), n_(n), rho_(rho) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvariantError("WeightedGrid: dt must be positive");
  if (n < 2) throw InvariantError("WeightedGrid: need at least 2 samples");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvariantError("WeightedGrid: rho must be positive");
  if (!std::isfinite(t0)) throw InvariantError("WeightedGrid: t0 must be finite");
}

double WeightedGrid::weight(std::size_t j) const { return dt_ * std::exp(-2.0 * rho_ * time(j)); }

bool WeightedGrid::compatible(const WeightedGrid& other) const {
  return n_ == other.n_ && close_rel(dt_, other.dt_) && close_rel(rho_, other.rho_) &&
         std::abs(t0_ - other.t0_) <= 1e-12 * std::max(1.0, std::abs(t0_)) + 1e-9 * dt_;
}

WeightedSignal::WeightedSignal(WeightedGrid grid, CMatrix values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != grid_.n())
    throw ShapeError("WeightedSignal: value rows " + std::to_string(values_.rows()) +
                     " != grid size " + std::to_string(grid_.n()));
  if (values_.cols() < 1) throw ShapeError("WeightedSignal: dimension must be positive");
  if (!values_.allFinite()) throw InvariantError("WeightedSignal: non-finite sample");
}

WeightedSignal WeightedSignal::zeros(const WeightedGrid& grid, Eigen::Index dim) {
  return {grid, CMatrix::Zero(static_cast<Eigen::Index>(grid.n()), dim)};
}

WeightedSignal WeightedSignal::sample(const WeightedGrid& grid, Eigen::Index dim,
                                      const std::function<CVector(double)>& f) {
  CMatrix v(static_cast<Eigen::Index>(grid.n()), dim);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const CVector x = f(grid.time(j));
    if (x.size() != dim) throw ShapeError("WeightedSignal::sample: wrong sample dimension");
    v.row(static_cast<Eigen::Index>(j)) = x.transpose();
  }
  return {grid, std::move(v)};
}

void require_same_shape(const WeightedSignal& u, const WeightedSignal& w, const char* what) {
  if (!u.grid().compatible(w.grid())) throw ShapeError(std::string(what) + ": grid mismatch");
  if (u.dim() != w.dim())
    throw ShapeError(std::string(what) + ": dimension mismatch " + std::to_string(u.dim()) + " vs " +
                     std::to_string(w.dim()));
}

WeightedSignal& WeightedSignal::operator+=(const WeightedSignal& other) {
  require_same_shape(*this, other, "operator+");
  values_ += other.values_;
  return *this;
}

WeightedSignal& WeightedSignal::operator-=(const WeightedSignal& other) {
  require_same_shape(*this, other, "operator-");
  values_ -= other.values_;
  return *this;
}

WeightedSignal& WeightedSignal::operator*=(cplx a) {
  values_ *= a;
  return *this;
}

WeightedSignal operator+(WeightedSignal a, const WeightedSignal& b) { return a += b; }
WeightedSignal operator-(WeightedSignal a, const WeightedSignal& b) { return a -= b; }
WeightedSignal operator*(cplx a, WeightedSignal u) { return u *= a; }

cplx rho_inner(const WeightedSignal& u, const WeightedSignal& w) {
  require_same_shape(u, w, "rho_inner");
  const auto& g = u.grid();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    acc += g.weight(j) * u.values().row(r).dot(w.values().row(r));
  }
  return acc;
}

double rho_norm(const WeightedSignal& u) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j)
    acc += g.weight(j) * u.values().row(static_cast<Eigen::Index>(j)).squaredNorm();
  return std::sqrt(acc);
}

WeightedSignal truncate_before(const WeightedSignal& u, double a) {
  CMatrix v = u.values();
  const auto& g = u.grid();
  for (std::size_t j = 0; j < g.n(); ++j)
    if (g.time(j) > a + time_slack(g)) v.row(static_cast<Eigen::Index>(j)).setZero();
  return {g, std::move(v)};
}

long grid_steps(const WeightedGrid& grid, double h) {
  const double m = h / grid.dt();
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(m)))
    throw PreconditionError("translation h=" + std::to_string(h) + " is not a multiple of dt=" +
                            std::to_string(grid.dt()));
  return static_cast<long>(r);
}

WeightedSignal translate(const WeightedSignal& u, double h) {
  const long m = grid_steps(u.grid(), h);
  const auto n = static_cast<long>(u.size());
  CMatrix v = CMatrix::Zero(n, u.dim());
  for (long j = 0; j < n; ++j) {
    const long src = j + m;
    if (src >= 0 && src < n) v.row(j) = u.values().row(src);
  }
  return {u.grid(), std::move(v)};
}

WeightedSignal time_multiply(const std::function<double(double)>& psi, const WeightedSignal& u) {
  CMatrix v = u.values();
  for (std::size_t j = 0; j < u.size(); ++j) v.row(static_cast<Eigen::Index>(j)) *= psi(u.grid().time(j));
  return {u.grid(), std::move(v)};
}

void write_signal_csv(std::ostream& os, const WeightedSignal& u) {
  os << "t";
  for (Eigen::Index c = 0; c < u.dim(); ++c) os << ", re_" << c << ", im_" << c;
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t j = 0; j < u.size(); ++j) {
    os << u.grid().time(j);
    for (Eigen::Index c = 0; c < u.dim(); ++c) {
      const cplx z = u(j, c);
      os << ", " << z.real() << ", " << z.imag();
    }
    os << '\n';
  }
}

void write_signal_csv(const std::string& path, const WeightedSignal& u) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_signal_csv(os, u);
}

WeightedSignal read_signal_csv(const std::string& path, double rho) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error(path + ": empty file");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (...) {
        throw Error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() < 3 || vals.size() % 2 == 0)
      throw Error(path + ":" + std::to_string(lineno) + ": expected t followed by re/im pairs");
    if (!rows.empty() && vals.size() != rows.front().size() + 1)
      throw Error(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    times.push_back(vals.front());
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  if (times.size() < 2) throw Error(path + ": need at least two rows");
  const double dt = times[1] - times[0];
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::abs(times[j] - times[0] - dt * static_cast<double>(j)) > 1e-9 * std::max(1.0, std::abs(times[j])))
      throw Error(path + ": time column is not uniform at row " + std::to_string(j + 2));
  const auto dim = static_cast<Eigen::Index>(rows.front().size() / 2);
  CMatrix v(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (Eigen::Index c = 0; c < dim; ++c)
      v(static_cast<Eigen::Index>(j), c) = {rows[j][2 * c], rows[j][2 * c + 1]};
  return {WeightedGrid(times[0], dt, times.size(), rho), std::move(v)};
}

}  // namespace evo
