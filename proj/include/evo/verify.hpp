#pragma once

// Executable versions of the positivity, well-posedness, causality and
// adjoint estimates. Every check returns a margin; it passes when
// margin >= -tolerance.

#include "evo/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace evo {

struct CheckResult {
  std::string name;
  double margin = 0.0;
  double tolerance = 0.0;
  std::string details;

  bool passed() const { return margin >= -tolerance; }
};

using Operator = std::function<WeightedSignal(const WeightedSignal&)>;

struct TrialField {
  WeightedSignal U;
  std::string label;
};

/// Cut point used by the cutoff inequalities: 0 when it lies well inside the
/// window, otherwise a grid time at 35% of the window.
double verification_cut(const WeightedGrid& grid);

/// Seeded reduced-state trial fields: smooth Fourier modes or fields localized
/// at the boundary cells, times Gaussian bumps either supported before `cut`
/// or straddling it. All supports end before the middle of the window.
std::vector<TrialField> make_trials(const SpatialDiscretization& sd, const WeightedGrid& grid, int n_trials,
                                    std::uint64_t seed, double cut);

/// 1e-4 (dx^2 + dt + exp(-rho pad)), pad = half the window.
double positivity_tolerance(const SpatialDiscretization& sd, const WeightedGrid& grid);

/// min over trials of (Re<chi U|T U> - beta0 ||chi U||^2)/||U||^2 and of the
/// uncut adjoint analogue with T_adj.
CheckResult check_positivity_op(const std::string& name, const Operator& T, const Operator& T_adj, double beta0,
                                const std::vector<TrialField>& trials, double cut, double tol);
CheckResult check_positivity_1(const EvoProblem& prob, int n_trials = 12, std::uint64_t seed = 1);

/// Condition evaluated at cuts cut + a, a in {-2h, 0, 2h}, on translated
/// trials; margins reweighted by e^{2 rho a} must coincide.
CheckResult check_positivity_equivalence_op(const Operator& T, double beta0, const std::vector<TrialField>& trials,
                                            double cut, double h);
CheckResult check_positivity_equivalence(const EvoProblem& prob, int n_trials = 6, std::uint64_t seed = 1);

/// min over cuts of (||chi_a f|| - beta0 ||chi_a U||)/||f||.
CheckResult check_causal_estimate(const WeightedSignal& f, const WeightedSignal& U, double beta0,
                                  const std::vector<double>& cuts);
CheckResult check_causal_estimate(const EvoProblem& prob, int n_cuts = 10, std::uint64_t seed = 1);

/// -|| (P T P)^adj - P T_adj P || / ||T|| in the H_rho operator norm
/// (Frobenius), P the band projector |s| <= band, on dense space-time matrices.
CheckResult check_adjoint_lemma_op(const std::string& name, const Operator& T, const Operator& T_adj,
                                   const WeightedGrid& grid, Eigen::Index dim, double band);
/// Runs the lemma for A and d0 M; large problems use a downsized clone.
CheckResult check_adjoint_lemma(const EvoProblem& prob, double band = -1.0);

/// <A U|V> = <U|A* V> on random pairs, relative to ||A U|| ||V||.
CheckResult check_adjoint_pairing(const EvoProblem& prob, int n_trials = 8, std::uint64_t seed = 1);

/// min of the frequency passivity margin and of the boundary sign functional
/// normalized by the boundary-cell energy over random boundary-touching p.
CheckResult check_boundary_sign(const SpatialDiscretization& sd, const BoundaryLaw& bl, const WeightedGrid& grid,
                                int n_freq = 512, int n_trials = 8, std::uint64_t seed = 1);

/// 1 - beta0 ||U||/||f||, tolerance 0.02.
CheckResult check_energy_bound(const WeightedSignal& f, const WeightedSignal& U, double beta0);
CheckResult check_well_posedness(const EvoProblem& prob);

/// Re<chi U|A U>/||U||^2 over trials (cutoff at the verification cut).
CheckResult check_a_nonnegative(const EvoProblem& prob, int n_trials = 12, std::uint64_t seed = 1);
/// Re<U|A* U>/||U||^2 over trials, no cutoff.
CheckResult check_astar_nonnegative(const EvoProblem& prob, int n_trials = 12, std::uint64_t seed = 1);

struct VerifyOptions {
  /// Empty selects every check.
  std::vector<std::string> checks;
  int trials = 12;
  std::uint64_t seed = 1;
};

std::vector<std::string> all_check_names();
/// Runs the selected checks; an exception inside a check becomes a failed result.
std::vector<CheckResult> run_all(const EvoProblem& prob, const VerifyOptions& opts = {});
bool all_passed(const std::vector<CheckResult>& results);

void write_checks_csv(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace evo
