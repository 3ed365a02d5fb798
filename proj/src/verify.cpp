#include "evo/verify.hpp"

#include "evo/error.hpp"
#include "evo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace evo {

namespace {

struct Sample {
  double value;
  std::string label;
};

// The three smallest values, for reproduction of failures.
std::string worst3(std::vector<Sample> v) {
  std::sort(v.begin(), v.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
  std::ostringstream os;
  os << std::setprecision(6) << "worst:";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, v.size()); ++i) os << " [" << v[i].label << " = " << v[i].value << "]";
  return os.str();
}

double min_value(const std::vector<Sample>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : v) m = std::min(m, s.value);
  return v.empty() ? 0.0 : m;
}

double bump(double t, double tc, double w) {
  const double a = (t - tc) / w;
  const double v = std::exp(-0.5 * a * a);
  return v < 1e-16 ? 0.0 : v;
}

double snap(const WeightedGrid& g, double t) {
  const double j = std::round((t - g.t0()) / g.dt());
  return g.t0() + j * g.dt();
}

Operator problem_operator(const EvoProblem& prob) {
  return [&prob](const WeightedSignal& U) { return apply_operator(prob, U); };
}

Operator problem_adjoint(const EvoProblem& prob) {
  return [&prob](const WeightedSignal& U) { return apply_operator_adjoint(prob, U); };
}

// Same laws and window on a 4-cell, 32-sample grid.
EvoProblem downsized(const EvoProblem& prob) {
  const WeightedGrid g(prob.grid.t0(), prob.grid.period() / 32.0, 32, prob.grid.rho());
  SpatialDiscretization sd(prob.sd.L(), 4);
  BoundaryLaw bl = BoundaryLaw::linear_profile(prob.bl.g(), sd, prob.bl.n_alpha_left(), prob.bl.n_alpha_right());
  return {g, sd, prob.medium, std::move(bl), WeightedSignal::zeros(g, sd.reduced_size())};
}

CheckResult failed(const std::string& name, const std::exception& e) {
  return {name, -std::numeric_limits<double>::infinity(), 0.0, std::string("error: ") + e.what()};
}

}  // namespace

double verification_cut(const WeightedGrid& g) {
  const double P = g.period();
  if (g.t0() + 0.2 * P <= 0.0 && 0.0 <= g.t0() + 0.5 * P) return 0.0;
  return snap(g, g.t0() + 0.35 * P);
}

double positivity_tolerance(const SpatialDiscretization& sd, const WeightedGrid& g) {
  return 1e-4 * (sd.dx() * sd.dx() + g.dt() + std::exp(-g.rho() * 0.5 * g.period()));
}

std::vector<TrialField> make_trials(const SpatialDiscretization& sd, const WeightedGrid& g, int n_trials,
                                    std::uint64_t seed, double cut) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = sd.reduced_size();
  const double P = g.period();
  const double t_hi = g.t0() + 0.5 * P;  // supports end before the middle of the window
  auto crandn = [&]() { return cplx(normal(rng), normal(rng)); };
  auto position = [&](int k) { return k % 2 == 0 ? sd.x_cell(k / 2) : sd.x_face((k + 1) / 2); };

  std::vector<TrialField> out;
  for (int trial = 0; trial < n_trials; ++trial) {
    const bool boundary = trial % 2 == 1;
    bool before = (trial / 2) % 2 == 0;
    // Spatial profile.
    CVector shape = CVector::Zero(n);
    if (boundary) {
      const double width = (2.0 + 2.0 * unif(rng)) * sd.dx();
      const cplx bl = crandn();
      const cplx br = crandn();
      for (int k = 0; k < n; ++k) {
        const double x = position(k);
        const double el = std::exp(-0.5 * x * x / (width * width));
        const double er = std::exp(-0.5 * (sd.L() - x) * (sd.L() - x) / (width * width));
        shape(k) = (k % 2 == 0 ? 1.0 : 0.3 * unif(rng)) * (bl * el + br * er);
      }
    } else {
      const int modes = 6;
      std::vector<cplx> cp(modes), cv(modes);
      for (int m = 0; m < modes; ++m) {
        const double decay = std::exp(-std::pow(m / 3.0, 2));
        cp[static_cast<std::size_t>(m)] = decay * crandn();
        cv[static_cast<std::size_t>(m)] = decay * crandn();
      }
      for (int k = 0; k < n; ++k) {
        const double x = position(k) / sd.L();
        cplx v = 0.0;
        for (int m = 0; m < modes; ++m)
          v += (k % 2 == 0) ? cp[static_cast<std::size_t>(m)] * std::cos(m * std::numbers::pi * x)
                            : cv[static_cast<std::size_t>(m)] * std::sin((m + 1) * std::numbers::pi * x);
        shape(k) = v;
      }
    }
    // Time profile.
    const double w_lo = 8.0 * g.dt();
    double w = w_lo + (std::max(w_lo, 0.03 * P) - w_lo) * unif(rng);
    double tc;
    const double room_before = cut - (g.t0() + 0.02 * P);
    if (before && room_before / 18.5 < 4.0 * g.dt()) before = false;
    if (before) {
      w = std::min(w, room_before / 18.5);
      const double lo = g.t0() + 0.02 * P + 9.0 * w;
      const double hi = cut - 9.0 * w;
      tc = lo + (hi - lo) * unif(rng);
    } else {
      w = std::min(w, std::max(w_lo, (t_hi - cut) / 11.0));
      tc = cut + (4.0 * unif(rng) - 2.0) * w;
      tc = std::min(tc, t_hi - 9.0 * w);
      tc = std::max(tc, g.t0() + 0.02 * P + 9.0 * w);
    }
    const cplx amp = crandn();
    CMatrix values(static_cast<Eigen::Index>(g.n()), n);
    for (std::size_t j = 0; j < g.n(); ++j)
      values.row(static_cast<Eigen::Index>(j)) = (amp * bump(g.time(j), tc, w)) * shape.transpose();
    std::ostringstream label;
    label << std::setprecision(4) << "trial " << trial << (boundary ? " boundary" : " smooth")
          << (before ? " before" : " straddle") << " tc=" << tc << " w=" << w;
    out.push_back({WeightedSignal(g, std::move(values)), label.str()});
  }
  return out;
}

CheckResult check_positivity_op(const std::string& name, const Operator& T, const Operator& T_adj, double beta0,
                                const std::vector<TrialField>& trials, double cut, double tol) {
  std::vector<Sample> fwd;
  std::vector<Sample> adj;
  for (const auto& tr : trials) {
    const double nrm2 = std::pow(rho_norm(tr.U), 2);
    if (nrm2 == 0.0) continue;
    const WeightedSignal chiU = truncate_before(tr.U, cut);
    const double lhs = rho_inner(chiU, T(tr.U)).real() - beta0 * std::pow(rho_norm(chiU), 2);
    fwd.push_back({lhs / nrm2, tr.label + " cut"});
    const double rhs = rho_inner(tr.U, T_adj(tr.U)).real() - beta0 * nrm2;
    adj.push_back({rhs / nrm2, tr.label + " adjoint"});
  }
  std::vector<Sample> all = fwd;
  all.insert(all.end(), adj.begin(), adj.end());
  std::ostringstream os;
  os << std::setprecision(6) << "beta0=" << beta0 << " cut=" << cut << " forward_min=" << min_value(fwd)
     << " adjoint_min=" << min_value(adj) << " trials=" << fwd.size() << "; " << worst3(all);
  return {name, min_value(all), tol, os.str()};
}

CheckResult check_positivity_1(const EvoProblem& prob, int n_trials, std::uint64_t seed) {
  const double cut = verification_cut(prob.grid);
  const auto trials = make_trials(prob.sd, prob.grid, n_trials, seed, cut);
  return check_positivity_op("positivity_1", problem_operator(prob), problem_adjoint(prob), prob.beta0(), trials, cut,
                             positivity_tolerance(prob.sd, prob.grid));
}

CheckResult check_positivity_equivalence_op(const Operator& T, double beta0, const std::vector<TrialField>& trials,
                                            double cut, double h) {
  const double shifts[3] = {-2.0 * h, 0.0, 2.0 * h};
  std::vector<Sample> gaps;
  int inconclusive = 0;
  std::ostringstream margins;
  margins << std::setprecision(10);
  for (const auto& tr : trials) {
    const auto& g = tr.U.grid();
    const double nrm2 = std::pow(rho_norm(tr.U), 2);
    if (nrm2 == 0.0) continue;
    const PaddingReport pr = padding_report(tr.U, 0.0);
    double m0 = 0.0;
    double m[3];
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      const double a = shifts[i];
      const double c = cut + a;
      // The shifted field or the cut must stay strictly inside the window.
      if (pr.support_start + a < g.t0() + g.dt() || pr.support_end + a > g.last_time() - g.dt() ||
          c <= g.t0() || c >= g.last_time()) {
        ok = false;
        break;
      }
      const WeightedSignal Ua = translate(tr.U, -a);
      const WeightedSignal chi = truncate_before(Ua, c);
      m[i] = (rho_inner(chi, T(Ua)).real() - beta0 * std::pow(rho_norm(chi), 2)) * std::exp(2.0 * g.rho() * a);
    }
    if (!ok) {
      ++inconclusive;
      continue;
    }
    m0 = m[1];
    const double gap = std::max(std::abs(m[0] - m0), std::abs(m[2] - m0)) / nrm2;
    gaps.push_back({-gap, tr.label});
    margins << " " << m[0] / nrm2 << "/" << m0 / nrm2 << "/" << m[2] / nrm2;
  }
  std::ostringstream os;
  os << "h=" << h << " reweighted margins (-2h/0/+2h):" << margins.str();
  if (gaps.empty()) os << " inconclusive: every trial leaves the window under translation";
  else if (inconclusive > 0) os << " (" << inconclusive << " trials inconclusive at the window edge)";
  os << "; " << worst3(gaps);
  return {"positivity_equivalence", gaps.empty() ? 0.0 : min_value(gaps), 1e-8, os.str()};
}

CheckResult check_positivity_equivalence(const EvoProblem& prob, int n_trials, std::uint64_t seed) {
  const double cut = verification_cut(prob.grid);
  const auto trials = make_trials(prob.sd, prob.grid, n_trials, seed + 17, cut);
  return check_positivity_equivalence_op(problem_operator(prob), prob.beta0(), trials, cut, 8.0 * prob.grid.dt());
}

CheckResult check_causal_estimate(const WeightedSignal& f, const WeightedSignal& U, double beta0,
                                  const std::vector<double>& cuts) {
  require_same_shape(f, U, "check_causal_estimate");
  const double fn = rho_norm(f);
  std::vector<Sample> s;
  for (double a : cuts) {
    const double lhs = rho_norm(truncate_before(f, a));
    const double rhs = beta0 * rho_norm(truncate_before(U, a));
    std::ostringstream label;
    label << std::setprecision(6) << "a=" << a;
    s.push_back({fn > 0.0 ? (lhs - rhs) / fn : lhs - rhs, label.str()});
  }
  std::ostringstream os;
  os << std::setprecision(6) << "beta0=" << beta0 << " cuts=" << cuts.size() << "; " << worst3(s);
  return {"causal_estimate", min_value(s), 1e-6, os.str()};
}

CheckResult check_causal_estimate(const EvoProblem& prob, int n_cuts, std::uint64_t seed) {
  const WeightedSignal U = solve_frequency(prob).U;
  std::mt19937_64 rng(seed + 101);
  std::uniform_real_distribution<double> unif(prob.grid.t0(), prob.grid.last_time());
  std::vector<double> cuts;
  for (int i = 0; i < n_cuts; ++i) cuts.push_back(unif(rng));
  return check_causal_estimate(prob.f, U, prob.beta0(), cuts);
}

CheckResult check_adjoint_lemma_op(const std::string& name, const Operator& T, const Operator& T_adj,
                                   const WeightedGrid& g, Eigen::Index dim, double band) {
  const auto n = static_cast<Eigen::Index>(g.n());
  const Eigen::Index N = n * dim;
  // Column idx = j*dim + c. In the basis scaled by sqrt(w_j) the H_rho adjoint
  // is the conjugate transpose.
  RVector sq(n);
  for (Eigen::Index j = 0; j < n; ++j) sq(j) = std::sqrt(g.weight(static_cast<std::size_t>(j)));
  auto dense = [&](const Operator& op) {
    CMatrix M(N, N);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t col) {
      const auto idx = static_cast<Eigen::Index>(col);
      CMatrix e = CMatrix::Zero(n, dim);
      e(idx / dim, idx % dim) = 1.0 / sq(idx / dim);
      const WeightedSignal y = op(WeightedSignal(g, std::move(e)));
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index c = 0; c < dim; ++c) M(j * dim + c, idx) = sq(j) * y.values()(j, c);
    });
    return M;
  };
  const CMatrix Tm = dense(T);
  const CMatrix Ta = dense(T_adj);
  const CMatrix Pm = dense([band](const WeightedSignal& u) { return band_project(u, band); });
  const CMatrix lhs = (Pm * Tm * Pm).adjoint();
  const CMatrix rhs = Pm * Ta * Pm;
  const double scale = std::max(Tm.norm(), 1e-300);
  const double err = (lhs - rhs).norm() / scale;
  const double proj_err = (Pm * Pm - Pm).norm() / std::max(1.0, Pm.norm()) + (Pm.adjoint() - Pm).norm() / std::max(1.0, Pm.norm());
  std::ostringstream os;
  os << std::setprecision(6) << name << ": rel_err=" << err << " projector_defect=" << proj_err << " band=" << band
     << " N=" << N;
  return {name, -std::max(err, proj_err), 1e-12, os.str()};
}

CheckResult check_adjoint_lemma(const EvoProblem& prob, double band) {
  const bool shrink = static_cast<Eigen::Index>(prob.grid.n()) * prob.sd.reduced_size() > 1536;
  const EvoProblem small = shrink ? downsized(prob) : prob;
  const double b = band >= 0.0 ? band : 0.25 * std::numbers::pi / small.grid.dt();
  const auto dim = small.sd.reduced_size();
  const CheckResult a = check_adjoint_lemma_op("A", [&](const WeightedSignal& u) { return apply_A_time(small.sd, small.bl, u); },
                                               [&](const WeightedSignal& u) { return apply_Astar_time(small.sd, small.bl, u); },
                                               small.grid, dim, b);
  const CheckResult m = check_adjoint_lemma_op("d0M", [&](const WeightedSignal& u) { return apply_d0M_reduced(small, u); },
                                               [&](const WeightedSignal& u) { return apply_d0M_reduced_adjoint(small, u); },
                                               small.grid, dim, b);
  std::string details = a.details + "; " + m.details;
  if (shrink) details += "; evaluated on a downsized clone (np=4, n=32, same laws, rho and window)";
  return {"adjoint_lemma", std::min(a.margin, m.margin), 1e-12, details};
}

CheckResult check_adjoint_pairing(const EvoProblem& prob, int n_trials, std::uint64_t seed) {
  const double cut = verification_cut(prob.grid);
  const auto us = make_trials(prob.sd, prob.grid, n_trials, seed + 301, cut);
  const auto vs = make_trials(prob.sd, prob.grid, n_trials, seed + 302, cut);
  std::vector<Sample> s;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const WeightedSignal AU = apply_A_time(prob.sd, prob.bl, us[i].U);
    const WeightedSignal AsV = apply_Astar_time(prob.sd, prob.bl, vs[i].U);
    const double scale = rho_norm(AU) * rho_norm(vs[i].U) + rho_norm(us[i].U) * rho_norm(AsV);
    const double err = std::abs(rho_inner(AU, vs[i].U) - rho_inner(us[i].U, AsV)) / std::max(scale, 1e-300);
    s.push_back({-err, us[i].label});
  }
  return {"adjoint_pairing", min_value(s), 1e-9, worst3(s)};
}

CheckResult check_boundary_sign(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedGrid& g,
                                int n_freq, int n_trials, std::uint64_t seed) {
  const double rho = g.rho();
  // Grid frequencies (subsampled) plus a logarithmic tail towards s = infinity.
  const RVector grid_s = frequencies(g);
  std::vector<double> sv;
  const int stride = std::max<int>(1, static_cast<int>(grid_s.size()) / std::max(1, n_freq));
  for (Eigen::Index k = 0; k < grid_s.size(); k += stride) sv.push_back(grid_s(k));
  for (int i = 0; i <= 40; ++i) {
    const double s = std::pow(10.0, -3.0 + 0.25 * i);
    sv.push_back(s);
    sv.push_back(-s);
  }
  const RVector freqs = Eigen::Map<RVector>(sv.data(), static_cast<Eigen::Index>(sv.size()));
  const double freq_margin = bl.passivity_margin(rho, freqs);

  const double cut = verification_cut(g);
  const auto trials = make_trials(sd, g, n_trials, seed + 401, cut);
  std::vector<Sample> s;
  for (const auto& tr : trials) {
    CMatrix pv(tr.U.values().rows(), sd.np());
    for (int i = 0; i < sd.np(); ++i) pv.col(i) = tr.U.values().col(SpatialDiscretization::p_index(i));
    const WeightedSignal p(g, std::move(pv));
    double eb = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
      if (g.time(j) > cut + 1e-9 * g.dt()) continue;
      const auto r = static_cast<Eigen::Index>(j);
      eb += g.weight(j) * (std::norm(p.values()(r, 0)) + std::norm(p.values()(r, sd.np() - 1)));
    }
    const double val = boundary_sign_functional(sd, bl, p, cut);
    if (eb > 1e-30 * std::pow(rho_norm(p), 2)) s.push_back({val / eb, tr.label});
  }
  const double fun_margin = s.empty() ? freq_margin : min_value(s);
  std::ostringstream os;
  os << std::setprecision(8) << "frequency_margin=" << freq_margin << " (" << freqs.size()
     << " samples) functional_margin=" << fun_margin << "; " << worst3(s);
  return {"boundary_sign", std::min(freq_margin, fun_margin), 1e-10, os.str()};
}

CheckResult check_energy_bound(const WeightedSignal& f, const WeightedSignal& U, double beta0) {
  const double fn = rho_norm(f);
  const double ratio = fn > 0.0 ? rho_norm(U) / fn : 0.0;
  std::ostringstream os;
  os << std::setprecision(8) << "energy_ratio=" << ratio << " 1/beta0=" << (beta0 > 0.0 ? 1.0 / beta0 : INFINITY);
  if (!(beta0 > 0.0)) return {"well_posedness", -INFINITY, 0.02, os.str() + " beta0 <= 0"};
  return {"well_posedness", 1.0 - beta0 * ratio, 0.02, os.str()};
}

CheckResult check_well_posedness(const EvoProblem& prob) {
  const SolveReport rep = solve_frequency(prob);
  CheckResult r = check_energy_bound(prob.f, rep.U, rep.beta0);
  std::ostringstream os;
  os << std::setprecision(6) << " residual_rel=" << rep.residual_rel << " max_cond=" << rep.max_condition_number;
  r.details += os.str();
  return r;
}

CheckResult check_a_nonnegative(const EvoProblem& prob, int n_trials, std::uint64_t seed) {
  const double cut = verification_cut(prob.grid);
  const auto trials = make_trials(prob.sd, prob.grid, n_trials, seed + 501, cut);
  std::vector<Sample> s;
  for (const auto& tr : trials) {
    const double nrm2 = std::pow(rho_norm(tr.U), 2);
    const double v = rho_inner(truncate_before(tr.U, cut), apply_A_time(prob.sd, prob.bl, tr.U)).real();
    s.push_back({v / nrm2, tr.label});
  }
  return {"a_nonnegative", min_value(s), positivity_tolerance(prob.sd, prob.grid), worst3(s)};
}

CheckResult check_astar_nonnegative(const EvoProblem& prob, int n_trials, std::uint64_t seed) {
  const double cut = verification_cut(prob.grid);
  const auto trials = make_trials(prob.sd, prob.grid, n_trials, seed + 601, cut);
  std::vector<Sample> s;
  for (const auto& tr : trials) {
    const double nrm2 = std::pow(rho_norm(tr.U), 2);
    const double v = rho_inner(tr.U, apply_Astar_time(prob.sd, prob.bl, tr.U)).real();
    s.push_back({v / nrm2, tr.label});
  }
  return {"astar_nonnegative", min_value(s), positivity_tolerance(prob.sd, prob.grid), worst3(s)};
}

std::vector<std::string> all_check_names() {
  return {"positivity_1",    "positivity_equivalence", "causal_estimate", "adjoint_lemma",    "adjoint_pairing",
          "boundary_sign",   "well_posedness",         "a_nonnegative",   "astar_nonnegative"};
}

std::vector<CheckResult> run_all(const EvoProblem& prob, const VerifyOptions& opts) {
  const std::vector<std::string> known = all_check_names();
  const std::vector<std::string> names = opts.checks.empty() ? known : opts.checks;
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw PreconditionError("unknown check '" + n + "'");
  std::vector<CheckResult> out(names.size());
  parallel_for(names.size(), [&](std::size_t i) {
    const std::string& n = names[i];
    try {
      if (n == "positivity_1") out[i] = check_positivity_1(prob, opts.trials, opts.seed);
      else if (n == "positivity_equivalence") out[i] = check_positivity_equivalence(prob, std::max(2, opts.trials / 2), opts.seed);
      else if (n == "causal_estimate") out[i] = check_causal_estimate(prob, 10, opts.seed);
      else if (n == "adjoint_lemma") out[i] = check_adjoint_lemma(prob);
      else if (n == "adjoint_pairing") out[i] = check_adjoint_pairing(prob, std::max(2, opts.trials / 2), opts.seed);
      else if (n == "boundary_sign") out[i] = check_boundary_sign(prob.sd, prob.bl, prob.grid, 512, opts.trials, opts.seed);
      else if (n == "well_posedness") out[i] = check_well_posedness(prob);
      else if (n == "a_nonnegative") out[i] = check_a_nonnegative(prob, opts.trials, opts.seed);
      else if (n == "astar_nonnegative") out[i] = check_astar_nonnegative(prob, opts.trials, opts.seed);
    } catch (const std::exception& e) {
      out[i] = failed(n, e);
    }
  });
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed(); });
}

void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& results) {
  os << "name, margin, tolerance, pass\n" << std::setprecision(17);
  for (const auto& r : results) os << r.name << ", " << r.margin << ", " << r.tolerance << ", " << (r.passed() ? 1 : 0) << '\n';
}

}  // namespace evo
