// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "evo/reflection.hpp"
#include "evo/verify.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace evo;
using evo::test::bump;
using std::numbers::pi;

namespace {

// Tolerances, fixed here so that a run cannot relax them.
constexpr double kParsevalTol = 1e-10;
constexpr double kPreSupportTol = 1e-8;
constexpr double kKernelOracleTol = 1e-8;
constexpr double kEnergySlack = 0.02;
constexpr double kCausalSlack = 1e-6;
constexpr double kStepperPreSupport = 1e-13;
constexpr double kReflectionTol = 0.02;
constexpr double kAbsorbedAtMatch = 0.999;
constexpr double kPairingTol = 1e-9;
constexpr double kLemmaTol = 1e-12;
constexpr double kRatioLo = 1.7, kRatioHi = 2.3;
constexpr double kOrderLo = 1.8, kOrderHi = 2.2;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

EvoProblem case_problem(const test::ScenarioCase& c, int np, const WeightedGrid& base, double rho, double t_c, double width) {
  SpatialDiscretization sd(1.0, np);
  auto bl = BoundaryLaw::linear_profile(c.g, sd, c.alpha_left, c.alpha_right);
  return test::bump_problem(base.with_rho(rho), np, c.medium, bl, t_c, width);
}

double case_rho(const test::ScenarioCase& c, int np) {
  SpatialDiscretization sd(1.0, np);
  return select_rho(c.medium, BoundaryLaw::linear_profile(c.g, sd, c.alpha_left, c.alpha_right));
}

// 1. L_rho is unitary: spectral energy equals the weighted quadrature norm.
void transform_unitarity(Outcome& o) {
  std::mt19937_64 rng(1001);
  const WeightedGrid g(0.0, 1.0 / 128, 1024, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto u = test::random_smooth(g, 2, rng, 0.0, 4.0);
    for (double rho : {0.5, 1.0, 2.0, 5.0}) {
      const WeightedSignal ur(g.with_rho(rho), u.values());
      const SpectralSignal uh = forward(ur);
      const double lhs = uh.ds() * uh.values().squaredNorm();
      const double rhs = test::quad_norm2(ur);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  }
  o.detail << "max relative Parseval defect " << worst << " over 50 signals x 4 rho (tol " << kParsevalTol << ")";
  o.require(worst <= kParsevalTol, "Parseval");
}

// 2. M(d0^{-1}) with one pole maps inputs supported in t >= T to outputs
// supported in t >= T; real poles are compared with the exponential kernel.
void law_causality(Outcome& o) {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double T = 2.0;
  const WeightedGrid g(0.0, 1.0 / 128, 1024, 4.0);
  double worst_leak = 0.0, worst_kernel = 0.0;
  for (int i = 0; i < 20; ++i) {
    const bool real_pole = i % 2 == 0;
    const cplx q(-(0.2 + 2.8 * U(rng)), real_pole ? 0.0 : 4.0 * (U(rng) - 0.5));
    const cplx r(0.2 + U(rng), real_pole ? 0.0 : U(rng) - 0.5);
    const double m0 = 0.5 + U(rng);
    const MaterialLaw M = MaterialLaw::scalar(m0, test::one_pole(q, r));
    const auto u = test::random_smooth(g, 1, rng, T, T + 1.5);
    const auto y = apply(M, u);
    worst_leak = std::max(worst_leak, test::quad_norm_before(y, T) / rho_norm(u));
    if (real_pole) {
      // M(z) = m0 + z r/(z - q): kernel m0 delta - (r/q) e^{t/q} for t > 0.
      const double c = T + 0.5, sigma = 0.05, lambda = 1.0 / q.real();
      auto gs = WeightedSignal::sample(g, 1, [&](double t) {
        const double v = std::exp(-0.5 * std::pow((t - c) / sigma, 2));
        return CVector::Constant(1, v < 1e-16 ? 0.0 : v);
      });
      auto exact = WeightedSignal::sample(g, 1, [&](double t) {
        const double v = std::exp(-0.5 * std::pow((t - c) / sigma, 2));
        return CVector::Constant(1, m0 * v - r.real() / q.real() * test::gauss_exp_convolution(t, c, sigma, lambda));
      });
      worst_kernel = std::max(worst_kernel, rho_norm(apply(M, gs) - exact) / rho_norm(exact));
    }
  }
  o.detail << "max pre-T mass/input " << worst_leak << " (tol " << kPreSupportTol << "), real-pole kernel error "
           << worst_kernel << " (tol " << kKernelOracleTol << ")";
  o.require(worst_leak <= kPreSupportTol, "pre-support mass");
  o.require(worst_kernel <= kKernelOracleTol, "kernel oracle");
}

// 3. ||U|| <= ||f||/beta0 on 20 admissible scenarios at rho0, 2 rho0, 4 rho0.
void well_posedness(Outcome& o) {
  const WeightedGrid base(0.0, 1.0 / 128, 1024, 1.0);
  double worst = -1e300;
  int solves = 0;
  for (const auto& c : test::admissible_cases(20, 1003)) {
    const double rho0 = case_rho(c, 16);
    for (double factor : {1.0, 2.0, 4.0}) {
      const auto prob = case_problem(c, 16, base, factor * rho0, 1.0, 0.5);
      const auto rep = solve_frequency(prob);
      // ratio * beta0 <= 1 + slack
      worst = std::max(worst, rep.energy_ratio * rep.beta0);
      ++solves;
    }
  }
  o.detail << "max beta0 ||U||/||f|| = " << worst << " over " << solves << " solves (limit " << 1.0 + kEnergySlack << ")";
  o.require(worst <= 1.0 + kEnergySlack, "energy bound");
}

// 4. Cutoff estimate for the spectral solution and exact causality of the stepper.
void solution_causality(Outcome& o) {
  const WeightedGrid base(0.0, 1.0 / 128, 1024, 1.0);  // rho P >= 24 below
  double worst = 1e300;
  for (const auto& c : test::admissible_cases(6, 1004)) {
    const double rho = std::max(3.0, case_rho(c, 16));
    const auto prob = case_problem(c, 16, base, rho, 1.5, 0.5);
    const auto r = check_causal_estimate(prob, 10, 7);
    worst = std::min(worst, r.margin);
  }
  double pre = 0.0;
  {
    const double T = 1.0;
    const auto c = test::admissible_cases(3, 1004)[2];
    const auto prob = case_problem(c, 16, WeightedGrid(0.0, 1.0 / 256, 1024, 1.0), case_rho(c, 16), T + 0.5, 0.5);
    const auto rep = solve_timestep(prob);
    for (std::size_t j = 0; j < prob.grid.n() && prob.grid.time(j) <= T; ++j)
      pre = std::max(pre, rep.U.values().row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff());
  }
  o.detail << "min cutoff margin " << worst << " (slack " << kCausalSlack << "), stepper pre-support max |U| " << pre
           << " (tol " << kStepperPreSupport << ")";
  o.require(worst >= -kCausalSlack, "cutoff estimate");
  o.require(pre <= kStepperPreSupport, "stepper causality");
}

// 5. Robin sweep against the plane-wave coefficient.
void reflection_sweep(Outcome& o) {
  const ReflectionSetup st;  // np = 512
  const std::vector<double> ks = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  const auto rs = sweep_reflection(ks, st);
  double worst = 0.0, absorbed = 0.0;
  for (const auto& r : rs) {
    // Plane wave in the unit medium: incident w+, reflected w- with v = k p at
    // the wall gives (1 - R) = k (1 + R).
    const double oracle = (1.0 - r.k) / (1.0 + r.k);
    worst = std::max(worst, std::abs(r.R_measured - oracle));
    if (r.k == 1.0) absorbed = r.absorbed_fraction;
    o.detail << "k=" << r.k << ":R=" << r.R_measured << " ";
  }
  o.detail << "| max |R - (1-k)/(1+k)| " << worst << " (tol " << kReflectionTol << "), absorbed at k=1 " << absorbed
           << " (min " << kAbsorbedAtMatch << ")";
  o.require(worst <= kReflectionTol, "reflection coefficient");
  o.require(absorbed >= kAbsorbedAtMatch, "absorption");
}

// 6. <A U|V> = <U|A* V> and the band-projector adjoint identity.
void adjoint_structure(Outcome& o) {
  const WeightedGrid base(0.0, 1.0 / 64, 256, 1.0);
  double pairing = 1e300, lemma = 1e300;
  for (const auto& c : test::admissible_cases(8, 1006)) {
    const auto prob = case_problem(c, 16, base, case_rho(c, 16), 1.0, 0.5);
    pairing = std::min(pairing, check_adjoint_pairing(prob, 8, 3).margin);
    lemma = std::min(lemma, check_adjoint_lemma(prob).margin);
  }
  o.detail << "pairing defect " << -pairing << " (tol " << kPairingTol << "), projector lemma defect " << -lemma
           << " (tol " << kLemmaTol << ")";
  o.require(pairing >= -kPairingTol, "pairing");
  o.require(lemma >= -kLemmaTol, "lemma");
}

// 7. Positivity and nonnegativity on admissible data; g(z) = -z must be caught.
void positivity_suite(Outcome& o) {
  const WeightedGrid base(0.0, 1.0 / 64, 512, 1.0);
  int failures = 0, checks = 0;
  for (const auto& c : test::admissible_cases(8, 1007)) {
    const auto prob = case_problem(c, 16, base, case_rho(c, 16), 1.0, 0.5);
    for (const auto& r : run_all(prob, {{"positivity_1", "a_nonnegative", "astar_nonnegative", "boundary_sign"}, 12, 5})) {
      ++checks;
      if (!r.passed()) {
        ++failures;
        o.detail << "[" << c.label << " " << r.name << " margin " << r.margin << "] ";
      }
    }
  }
  SpatialDiscretization sd(1.0, 16);
  const auto bad = BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({0.0, -1.0}, {}, {}), sd);
  const auto neg = check_boundary_sign(sd, bad, base.with_rho(2.0));
  o.detail << failures << " of " << checks << " admissible checks failed; g(z)=-z boundary margin " << neg.margin;
  o.require(failures == 0, "admissible checks");
  o.require(!neg.passed(), "negative test detected");
}

// 8a. Spectral vs time-stepped solution, halving dt three times.
void time_convergence(Outcome& o) {
  SpatialDiscretization sd(1.0, 32);
  AcousticMedium med;
  med.pressure = MaterialLaw::scalar(1.0, test::one_pole(-2.0, 0.5));
  med.velocity = MaterialLaw::scalar(2.0);
  const auto bl = BoundaryLaw::linear_profile(RationalMatrixFunction::scalar({0.5}, {-1.0}, {0.3}).times_z(), sd);
  std::vector<double> diffs;
  for (int level = 0; level < 4; ++level) {
    const double dt = 1.0 / (256 << level);
    const WeightedGrid g(0.0, dt, static_cast<std::size_t>(std::lround(2.0 / dt)), 4.0);
    auto f = test::sample_fields(
        sd, g, [](double x, double t) { return bump(t, 0.5, 0.43) * std::cos(3.0 * x); },
        [](double x, double t) { return 0.5 * bump(t, 0.5, 0.43) * std::cos(3.0 * x); });
    const EvoProblem prob(g, sd, med, bl, f);
    const auto a = solve_frequency(prob);
    const auto b = solve_timestep(prob);
    diffs.push_back(rho_norm(a.U - b.U) / rho_norm(a.U));
  }
  o.detail << "dt ratios";
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    const double ratio = diffs[i - 1] / diffs[i];
    o.detail << " " << ratio;
    o.require(ratio >= kRatioLo && ratio <= kRatioHi, "ratio in [1.7, 2.3]");
  }
}

// 8b. Manufactured solution p = cos(pi x) T(t), v = sin(pi x) S(t), sound-hard
// walls, pressure law 1 + z r/(z - q), velocity law 2.
void space_convergence(Outcome& o) {
  // A fast pole keeps the memory tail of f inside the window.
  const double q = -0.1, r = 0.08, mv = 2.0, sig = 0.1, cT = 1.0, cS = 1.1;
  auto G = [&](double t, double c) { return std::exp(-0.5 * std::pow((t - c) / sig, 2)); };
  auto Gd = [&](double t, double c) { return -(t - c) / (sig * sig) * G(t, c); };
  // d0 M(d0^{-1}) T = T' + M1(d0^{-1}) T, M1(d0^{-1}) T = -(r/q) T - (r/q^2) int e^{(t - tau)/q} T.
  auto memT = [&](double t) {
    return Gd(t, cT) - r / q * G(t, cT) - r / (q * q) * test::gauss_exp_convolution(t, cT, sig, 1.0 / q);
  };
  AcousticMedium med;
  med.pressure = MaterialLaw::scalar(1.0, test::one_pole(q, r));
  med.velocity = MaterialLaw::scalar(mv);
  const WeightedGrid g(0.0, 1.0 / 128, 2048, 3.0);  // window 16: the memory tail of f needs the padding
  std::vector<double> errs;
  for (int np : {16, 32, 64, 128}) {
    SpatialDiscretization sd(1.0, np);
    auto f = test::sample_fields(
        sd, g, [&](double x, double t) { return std::cos(pi * x) * (memT(t) + pi * G(t, cS)); },
        [&](double x, double t) { return std::sin(pi * x) * (mv * Gd(t, cS) - pi * G(t, cT)); });
    auto exact = test::sample_fields(
        sd, g, [&](double x, double t) { return std::cos(pi * x) * G(t, cT); },
        [&](double x, double t) { return std::sin(pi * x) * G(t, cS); });
    const EvoProblem prob(g, sd, med, BoundaryLaw::neumann(sd), f);
    const auto rep = solve_frequency(prob);
    errs.push_back(rho_norm(rep.U - exact) / rho_norm(exact));
  }
  o.detail << " | dx orders";
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    o.detail << " " << order;
    o.require(order >= kOrderLo && order <= kOrderHi, "order in [1.8, 2.2]");
  }
}

// 9. Three-term product rule residual with alpha = 1 + 0.5 sin 3x.
void product_rule(Outcome& o) {
  const WeightedGrid g(0.0, 1.0 / 64, 256, 1.0);
  const auto gz = RationalMatrixFunction::scalar({0.6, 0.0}, {-1.0}, {-0.6}).times_z();
  std::vector<double> res;
  for (int np : {16, 32, 64, 128}) {
    SpatialDiscretization sd(1.0, np);
    const auto bl = BoundaryLaw::from_profile(
        gz, sd, [](double x) { return 1.0 + 0.5 * std::sin(3.0 * x); }, [](double x) { return 1.5 * std::cos(3.0 * x); });
    const auto p = WeightedSignal::sample(g, np, [&](double t) {
      CVector x(np);
      for (int i = 0; i < np; ++i) x(i) = std::cos(2.0 * sd.x_cell(i)) * bump(t, 1.5, 1.0);
      return x;
    });
    res.push_back(product_rule_residual(sd, bl, p));
  }
  o.detail << "dx orders";
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double order = std::log2(res[i - 1] / res[i]);
    o.detail << " " << order;
    o.require(order >= kOrderLo && order <= kOrderHi, "order in [1.8, 2.2]");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "transform unitarity", transform_unitarity},
      {2, "material law causality", law_causality},
      {3, "well-posedness bound", well_posedness},
      {4, "solution causality", solution_causality},
      {5, "Robin reflection sweep", reflection_sweep},
      {6, "adjoint structure", adjoint_structure},
      {7, "positivity suite", positivity_suite},
      {8, "cross-solver and spatial convergence",
       [](Outcome& o) {
         time_convergence(o);
         space_convergence(o);
       }},
      {9, "product rule", product_rule},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
