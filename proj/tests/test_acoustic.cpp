#include "evo/acoustic.hpp"
#include "evo/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace evo;
using evo::test::bump;
using std::numbers::pi;

namespace {

WeightedSignal random_cells(const SpatialDiscretization& sd, const WeightedGrid& g, std::mt19937_64& rng, double lo,
                            double hi) {
  auto amp = test::random_smooth(g, 1, rng, lo, hi);
  std::normal_distribution<double> N;
  std::vector<double> c(4);
  for (auto& x : c) x = N(rng);
  return WeightedSignal::sample(g, sd.np(), [&](double t) {
    CVector x(sd.np());
    const auto j = static_cast<std::size_t>(std::lround((t - g.t0()) / g.dt()));
    for (int i = 0; i < sd.np(); ++i) {
      const double xx = sd.x_cell(i);
      x(i) = amp(j, 0) * (c[0] + c[1] * std::cos(pi * xx) + c[2] * std::sin(2 * pi * xx) + c[3] * xx * xx);
    }
    return x;
  });
}

}  // namespace

TEST_SUITE("acoustic") {
  TEST_CASE("grid construction and the summation-by-parts identity") {
    CHECK_THROWS_AS(SpatialDiscretization(1.0, 3), InvariantError);
    CHECK_THROWS_AS(SpatialDiscretization(0.0, 8), InvariantError);
    for (int np : {4, 37, 512}) {
      SpatialDiscretization sd(2.0, np);
      CHECK(sd.sbp_residual() <= 1e-13);
      CHECK(sd.dx() == doctest::Approx(2.0 / np));
      CHECK(sd.reduced_size() == 2 * np - 1);
      // Direct assembly of the boundary matrix: -1 at (0, 0), +1 at (np-1, nv-1).
      Eigen::MatrixXd B = Eigen::MatrixXd(sd.W_p() * sd.D_div()) + Eigen::MatrixXd(sd.D_grad()).transpose() * Eigen::MatrixXd(sd.W_v());
      Eigen::MatrixXd Bref = Eigen::MatrixXd::Zero(np, np + 1);
      Bref(0, 0) = -1.0;
      Bref(np - 1, np) = 1.0;
      CHECK((B - Bref).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  TEST_CASE("stencils are exact on linear and constant fields") {
    SpatialDiscretization sd(1.0, 4);
    Eigen::VectorXd p(4);
    for (int i = 0; i < 4; ++i) p(i) = sd.x_cell(i);
    Eigen::VectorXd gp = sd.D_grad() * p;
    for (int j = 1; j < 4; ++j) CHECK(gp(j) == doctest::Approx(1.0).epsilon(1e-15));
    Eigen::VectorXd dv = sd.D_div() * Eigen::VectorXd::Constant(5, 3.0);
    for (int i = 1; i < 3; ++i) CHECK(std::abs(dv(i)) <= 1e-15);
  }

  TEST_CASE("Neumann boundary: skew operator with zero boundary velocity") {
    SpatialDiscretization sd(1.0, 16);
    auto bl = BoundaryLaw::neumann(sd);
    auto op = assemble_A_freq(sd, bl, 3.0, 1.0);
    CHECK(op.left == cplx(0.0));
    CHECK(op.right == cplx(0.0));
    CMatrix A = op.A.dense();
    CHECK((A + A.adjoint()).cwiseAbs().maxCoeff() <= 1e-13);
    auto star = assemble_Astar_freq(sd, bl, 3.0, 1.0);
    CHECK((star.A.dense() + A).cwiseAbs().maxCoeff() == 0.0);
    // Rows reproduce D_div and D_grad on the interior unknowns.
    Eigen::MatrixXd Dd(sd.D_div()), Dg(sd.D_grad());
    for (int i = 0; i < sd.np(); ++i)
      for (int j = 1; j < sd.np(); ++j) {
        CHECK(A(SpatialDiscretization::p_index(i), SpatialDiscretization::v_index(j)).real() == doctest::Approx(Dd(i, j)));
        CHECK(A(SpatialDiscretization::v_index(j), SpatialDiscretization::p_index(i)).real() == doctest::Approx(Dg(j, i)));
      }
  }

  TEST_CASE("Robin boundary eliminates to n.v = k p and its adjoint flips the sign") {
    SpatialDiscretization sd(1.0, 8);
    const double k = 0.7;
    auto bl = BoundaryLaw::robin(k, sd);
    for (double s : {0.0, 5.0, -120.0}) {
      auto op = assemble_A_freq(sd, bl, s, 2.0);
      CHECK(std::abs(op.left + k) < 1e-15);   // v_0 = -k p_0: outward normal is -1
      CHECK(std::abs(op.right - k) < 1e-15);  // v_L = k p_L
      auto star = assemble_Astar_freq(sd, bl, s, 2.0);
      CHECK(std::abs(star.left - k) < 1e-15);
      CHECK(std::abs(star.right + k) < 1e-15);
      CHECK((star.A.dense() - op.A.dense().adjoint()).norm() == 0.0);
    }
    CHECK(bl.passivity_margin(2.0, frequencies(WeightedGrid(0.0, 0.01, 256, 2.0))) == doctest::Approx(k));
  }

  TEST_CASE("improper boundary kernels and poles") {
    SpatialDiscretization sd(1.0, 8);
    CHECK_THROWS_AS(BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({1.0}, {}, {}), sd), ImproperKernelError);
    // Pole of g at z = 1/(rho + i s0) puts a pole of the symbol on the frequency s0.
    const double rho = 1.0, s0 = 2.0;
    const cplx q = 1.0 / cplx(rho, s0);
    auto g = test::one_pole(q, 1.0) + RationalMatrixFunction::scalar({1.0 / q}, {}, {});
    auto bl = BoundaryLaw::linear_profile(g, sd);
    CHECK_NOTHROW(bl.Y(0.0, rho));
    try {
      bl.Y(s0, rho);
      FAIL("expected a pole error");
    } catch (const PoleError& e) {
      CHECK(std::string(e.what()).find("s = 2") != std::string::npos);
    }
  }

  TEST_CASE("A on smooth Neumann-compatible fields is second-order consistent") {
    WeightedGrid g(0.0, 1.0 / 64, 256, 1.0);
    auto b = [](double t) { return bump(t, 1.5, 1.0); };
    double prev = 0.0;
    for (int np : {16, 32, 64, 128}) {
      SpatialDiscretization sd(1.0, np);
      auto bl = BoundaryLaw::neumann(sd);
      auto U = test::sample_fields(
          sd, g, [&](double x, double t) { return std::cos(pi * x) * b(t); },
          [&](double x, double t) { return std::sin(pi * x) * b(t); });
      auto exact = test::sample_fields(
          sd, g, [&](double x, double t) { return pi * std::cos(pi * x) * b(t); },
          [&](double x, double t) { return -pi * std::sin(pi * x) * b(t); });
      const double err = std::sqrt(sd.dx()) * rho_norm(apply_A_time(sd, bl, U) - exact);
      if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.1));
      prev = err;
    }
    SpatialDiscretization sd(1.0, 8);
    CHECK(apply_A_time(sd, BoundaryLaw::neumann(sd), WeightedSignal::zeros(g, sd.reduced_size())).values().isZero(0.0));
  }

  TEST_CASE("reduced and full representations agree") {
    std::mt19937_64 rng(1);
    SpatialDiscretization sd(1.0, 10);
    WeightedGrid g(0.0, 0.01, 256, 2.0);
    auto U = test::random_smooth(g, sd.reduced_size(), rng, 0.0, 1.2);
    // Neumann: the full operator with v_b = 0 is the reduced one.
    auto bl0 = BoundaryLaw::neumann(sd);
    auto full = expand_state(sd, bl0, U);
    CHECK(rho_norm(reduce_state(sd, full) - U) <= 1e-13 * rho_norm(U));
    CHECK(rho_norm(reduce_state(sd, apply_A_full(sd, full)) - apply_A_time(sd, bl0, U)) <= 1e-12 * rho_norm(U) / sd.dx());
    // Robin: the expanded boundary velocities obey v_b = alpha_b k p_b.
    auto bl = BoundaryLaw::robin(0.4, sd);
    auto fr = expand_state(sd, bl, U);
    const int np = sd.np();
    for (std::size_t j = 0; j < g.n(); j += 17) {
      CHECK(std::abs(fr(j, np) + 0.4 * fr(j, 0)) <= 1e-12);
      CHECK(std::abs(fr(j, np + np) - 0.4 * fr(j, np - 1)) <= 1e-12);
    }
    CHECK(rho_norm(reduce_state(sd, apply_A_full(sd, fr)) - apply_A_time(sd, bl, U)) <= 1e-12 * rho_norm(U) / sd.dx());
    auto p = WeightedSignal(g, CMatrix(fr.values().leftCols(np)));
    auto v = WeightedSignal(g, CMatrix(fr.values().rightCols(np + 1)));
    CHECK(rho_norm(reduced_from_fields(sd, p, v) - U) <= 1e-13 * rho_norm(U));
  }

  TEST_CASE("A and A* are adjoint in the space-time pairing") {
    std::mt19937_64 rng(2);
    SpatialDiscretization sd(1.0, 12);
    auto g = RationalMatrixFunction::scalar({0.2, 0.0, 0.5}, {-1.0, cplx(-0.5, 2.0)}, {-0.1, 0.0});
    g = g + RationalMatrixFunction::scalar({-g.scalar_at(0.0)}, {}, {});
    auto bl = BoundaryLaw::linear_profile(g, sd, 0.8, 1.3);
    WeightedGrid grid(0.0, 0.01, 256, 1.5);
    for (int i = 0; i < 4; ++i) {
      auto U = test::random_smooth(grid, sd.reduced_size(), rng, 0.0, 1.2);
      auto V = test::random_smooth(grid, sd.reduced_size(), rng, 0.0, 1.2);
      const cplx lhs = test::quad_inner(apply_A_time(sd, bl, U), V);
      const cplx rhs = test::quad_inner(U, apply_Astar_time(sd, bl, V));
      const double scale = rho_norm(apply_A_time(sd, bl, U)) * rho_norm(V);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * scale);
    }
  }

  TEST_CASE("boundary sign functional") {
    std::mt19937_64 rng(3);
    SpatialDiscretization sd(1.0, 16);
    WeightedGrid g(-1.0, 0.01, 512, 1.0);
    auto p = random_cells(sd, g, rng, -1.0, 1.5);
    CHECK(boundary_sign_functional(sd, BoundaryLaw::neumann(sd), p) == 0.0);
    // Interior support: the functional vanishes.
    auto interior = WeightedSignal::sample(g, sd.np(), [&](double t) {
      CVector x = CVector::Zero(sd.np());
      for (int i = 3; i < sd.np() - 3; ++i) x(i) = bump(sd.x_cell(i), 0.5, 0.3) * bump(t, 0.0, 0.8);
      return x;
    });
    auto mem = BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({-0.5, 1.0}, {-2.0}, {1.0}), sd);
    CHECK(std::abs(boundary_sign_functional(sd, mem, interior)) <= 1e-12);
    // Robin: k times the weighted boundary-cell energy up to the cut.
    const double k = 1.7;
    auto robin = BoundaryLaw::robin(k, sd);
    for (double cut : {0.0, 0.5}) {
      double oracle = 0.0;
      for (std::size_t j = 0; j < g.n(); ++j)
        if (g.time(j) <= cut) oracle += g.weight(j) * k * (std::norm(p(j, 0)) + std::norm(p(j, sd.np() - 1)));
      const double val = boundary_sign_functional(sd, robin, p, cut);
      CHECK(val >= 0.0);
      CHECK(val == doctest::Approx(oracle).epsilon(1e-10));
    }
    // g(z) = -z injects energy.
    auto bad = BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({0.0, -1.0}, {}, {}), sd);
    CHECK(boundary_sign_functional(sd, bad, p) < 0.0);
  }

  TEST_CASE("product rule residual") {
    WeightedGrid g(0.0, 1.0 / 64, 256, 1.0);
    auto gz = RationalMatrixFunction::scalar({0.0, 1.0}, {-1.0}, {0.5});
    gz = gz + RationalMatrixFunction::scalar({-gz.scalar_at(0.0)}, {}, {});
    auto pfun = [](double x, double t) { return std::cos(2.0 * x) * bump(t, 1.5, 1.0); };
    // Linear alpha with exact divergence: the three-term identity holds exactly.
    {
      SpatialDiscretization sd(1.0, 32);
      auto bl = BoundaryLaw::linear_profile(gz, sd, 0.5, 2.0);
      auto p = WeightedSignal::sample(g, sd.np(), [&](double t) {
        CVector x(sd.np());
        for (int i = 0; i < sd.np(); ++i) x(i) = pfun(sd.x_cell(i), t);
        return x;
      });
      CHECK(product_rule_residual(sd, bl, p) <= 1e-12);
    }
    double prev = 0.0;
    for (int np : {16, 32, 64, 128}) {
      SpatialDiscretization sd(1.0, np);
      auto bl = BoundaryLaw::from_profile(
          gz, sd, [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); }, [](double x) { return 1.5 * std::cos(3.0 * x); });
      auto p = WeightedSignal::sample(g, sd.np(), [&](double t) {
        CVector x(sd.np());
        for (int i = 0; i < sd.np(); ++i) x(i) = pfun(sd.x_cell(i), t);
        return x;
      });
      const double r = product_rule_residual(sd, bl, p);
      if (prev > 0.0) CHECK(std::log2(prev / r) == doctest::Approx(2.0).epsilon(0.1));
      prev = r;
    }
  }

  TEST_CASE("tridiagonal helper") {
    Tridiagonal T(3);
    T.lower << 1.0, 2.0;
    T.diag << 3.0, cplx(0.0, 1.0), 5.0;
    T.upper << cplx(1.0, 1.0), 7.0;
    CVector x(3);
    x << 1.0, cplx(0.0, 2.0), -1.0;
    CHECK((T * x - T.dense() * x).norm() < 1e-15);
    CHECK((T.adjoint().dense() - T.dense().adjoint()).norm() == 0.0);
    T.add_diagonal(CVector::Ones(3));
    CHECK(T.diag(0) == cplx(4.0));
    CHECK_THROWS_AS(T * CVector::Ones(2), ShapeError);
  }
}
