#include "support.hpp"

#include <cmath>
#include <numbers>

namespace evo::test {

// Gaussian with sigma = w / kBumpScale, set to zero below 1e-16 so that the
// support is (c - w, c + w) and the spectrum decays like exp(-s^2 sigma^2 / 2).
constexpr double kBumpScale = 8.6;

double bump(double t, double c, double w) {
  const double x = kBumpScale * (t - c) / w;
  const double v = std::exp(-0.5 * x * x);
  return v < 1e-16 ? 0.0 : v;
}

double bump_dt(double t, double c, double w) {
  const double sigma = w / kBumpScale;
  return -(t - c) / (sigma * sigma) * bump(t, c, w);
}

double quad_norm2(const WeightedSignal& u) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double w = g.dt() * std::exp(-2.0 * g.rho() * g.time(j));
    for (Eigen::Index c = 0; c < u.dim(); ++c) acc += w * std::norm(u(j, c));
  }
  return acc;
}

cplx quad_inner(const WeightedSignal& u, const WeightedSignal& w) {
  const auto& g = u.grid();
  cplx acc = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double wt = g.dt() * std::exp(-2.0 * g.rho() * g.time(j));
    for (Eigen::Index c = 0; c < u.dim(); ++c) acc += wt * std::conj(u(j, c)) * w(j, c);
  }
  return acc;
}

double quad_norm_before(const WeightedSignal& u, double a) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t j = 0; j < g.n() && g.time(j) < a; ++j) {
    const double w = g.dt() * std::exp(-2.0 * g.rho() * g.time(j));
    for (Eigen::Index c = 0; c < u.dim(); ++c) acc += w * std::norm(u(j, c));
  }
  return std::sqrt(acc);
}

CMatrix naive_forward(const WeightedSignal& u) {
  const auto& g = u.grid();
  const auto n = static_cast<long>(g.n());
  const double ds = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dt());
  CMatrix out = CMatrix::Zero(n, u.dim());
  for (long k = 0; k < n; ++k) {
    const double s = static_cast<double>(k - n / 2) * ds;
    for (long j = 0; j < n; ++j) {
      const double t = g.time(static_cast<std::size_t>(j));
      const cplx e = std::exp(-cplx(g.rho(), s) * t) * g.dt() / std::sqrt(2.0 * std::numbers::pi);
      out.row(k) += e * u.values().row(j);
    }
  }
  return out;
}

double gauss_exp_convolution(double t, double c, double sigma, double lambda) {
  const double s = t - c;
  return sigma * std::sqrt(std::numbers::pi / 2.0) * std::exp(lambda * s + 0.5 * lambda * lambda * sigma * sigma) *
         std::erfc(-(s + lambda * sigma * sigma) / (sigma * std::sqrt(2.0)));
}

WeightedSignal random_smooth(const WeightedGrid& grid, Eigen::Index dim, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Term {
    double c, w, f;
    cplx a;
  };
  std::vector<std::vector<Term>> terms(static_cast<std::size_t>(dim));
  for (auto& col : terms) {
    for (int m = 0; m < 3; ++m) {
      const double w = (0.3 + 0.2 * U(rng)) * (hi - lo) / 2.0;
      const double c = lo + w + (hi - lo - 2.0 * w) * U(rng);
      col.push_back({c, w, 6.0 * U(rng), std::polar(0.5 + U(rng), 6.28 * U(rng))});
    }
  }
  return WeightedSignal::sample(grid, dim, [&](double t) {
    CVector x(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      cplx acc = 0.0;
      for (const auto& tm : terms[static_cast<std::size_t>(d)])
        acc += tm.a * bump(t, tm.c, tm.w) * std::exp(kI * (tm.f * (t - tm.c)));
      x(d) = acc;
    }
    return x;
  });
}

WeightedSignal sample_fields(const SpatialDiscretization& sd, const WeightedGrid& grid,
                             const std::function<double(double, double)>& p,
                             const std::function<double(double, double)>& v) {
  return WeightedSignal::sample(grid, sd.reduced_size(), [&](double t) {
    CVector x(sd.reduced_size());
    for (int i = 0; i < sd.np(); ++i) x(SpatialDiscretization::p_index(i)) = p(sd.x_cell(i), t);
    for (int j = 1; j < sd.np(); ++j) x(SpatialDiscretization::v_index(j)) = v(sd.x_face(j), t);
    return x;
  });
}

RationalMatrixFunction one_pole(cplx pole, cplx residue) { return RationalMatrixFunction::scalar({}, {pole}, {residue}); }

EvoProblem bump_problem(const WeightedGrid& grid, int np, AcousticMedium medium, BoundaryLaw bl, double t_c,
                        double width) {
  SpatialDiscretization sd(1.0, np);
  auto f = sample_fields(
      sd, grid, [&](double x, double t) { return bump(t, t_c, width) * std::cos(3.0 * x); },
      [&](double x, double t) { return 0.5 * bump(t, t_c, width) * std::cos(3.0 * x); });
  return {grid, sd, std::move(medium), std::move(bl), std::move(f)};
}

std::vector<ScenarioCase> admissible_cases(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<ScenarioCase> out;
  for (int i = 0; i < count; ++i) {
    ScenarioCase c;
    const double m0p = 0.5 + 1.5 * U(rng);
    const double m0v = 0.5 + 1.5 * U(rng);
    RationalMatrixFunction M1p(1), M1v(1);
    // Memory poles on the negative real axis or in complex-conjugate pairs.
    if (i % 3 != 0) M1p = one_pole(-(0.5 + 2.0 * U(rng)), 0.2 + 0.8 * U(rng));
    if (i % 4 == 1) {
      const cplx q(-(1.0 + U(rng)), 0.5 + U(rng));
      const cplx r(0.3 * U(rng), 0.1);
      M1v = RationalMatrixFunction::scalar({}, {q, std::conj(q)}, {r, std::conj(r)});
    }
    c.medium.pressure = MaterialLaw::scalar(m0p, M1p);
    c.medium.velocity = MaterialLaw::scalar(m0v, M1v);
    switch (i % 4) {
      case 0:
        c.g = RationalMatrixFunction(1);
        c.label = "neumann";
        break;
      case 1:
        c.g = RationalMatrixFunction::scalar({0.0, 0.25 + 2.0 * U(rng)}, {}, {});
        c.label = "robin";
        break;
      case 2: {
        // z (a + b/(z - q)) with q < 0 and a, b >= 0. Its symbol
        // a + b p/(1 + |q| p) has positive real part for Re p > 0.
        const double q = -(0.5 + U(rng));
        const double b = 0.5 * U(rng);
        c.g = RationalMatrixFunction::scalar({b / std::abs(q) + 0.2 * U(rng)}, {q}, {b}).times_z();
        c.label = "memory boundary";
        break;
      }
      default:
        c.g = RationalMatrixFunction::scalar({0.0, 0.5 + U(rng)}, {}, {});
        c.alpha_left = 0.5 + U(rng);
        c.alpha_right = 0.5 + U(rng);
        c.label = "robin, linear profile";
        break;
    }
    c.label += " #" + std::to_string(i);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace evo::test
