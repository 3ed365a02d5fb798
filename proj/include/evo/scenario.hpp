#pragma once

// Scenario files: a YAML tree describing grid, medium, boundary law, source,
// solver, checks and outputs. See README for the grammar.

#include "evo/error.hpp"
#include "evo/reflection.hpp"
#include "evo/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace evo {

/// Malformed or inconsistent configuration; line is 1-based (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line);
  int line() const { return line_; }

 private:
  int line_;
};

struct RationalSpec {
  std::vector<cplx> poly;
  std::vector<cplx> poles;
  std::vector<cplx> residues;
};

struct LawSpec {
  cplx M0 = 1.0;
  RationalSpec M1;
  double r = 0.0;  // 0: derived from the poles
};

struct BoundarySpec {
  /// "robin", "neumann" or "rational".
  std::string kind = "neumann";
  double k = 0.0;
  RationalSpec g;
  double alpha_left = 1.0;
  double alpha_right = 1.0;
};

struct SourceSpec {
  /// "gaussian", "csv" or "none".
  std::string kind = "gaussian";
  double t_c = 0.5;
  double width = 0.05;
  double x_c = 0.5;
  double x_width = 0.1;
  /// "p", "v" or "pv" (f_p = f_v, a right-going pulse).
  std::string component = "p";
  double amplitude = 1.0;
  std::string csv;
};

struct Scenario {
  double t0 = 0.0;
  double dt = 1.0 / 256.0;
  std::size_t n = 1024;
  std::optional<double> rho;  // empty: auto
  double L = 1.0;
  int np = 64;
  LawSpec pressure;
  LawSpec velocity;
  BoundarySpec boundary;
  SourceSpec source;
  std::string method = "frequency";
  int substeps = 1;
  bool checks_given = false;
  std::vector<std::string> checks;
  int trials = 12;
  std::uint64_t seed = 1;
  std::vector<double> sweep_k = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  double sweep_t1 = 0.5;
  double sweep_t2 = 1.5;
  std::string out_U = "U.csv";
  std::string out_report = "report.txt";
  std::string out_checks = "checks.csv";
  std::string out_sweep = "sweep.csv";
  /// Directory of the scenario file, used to resolve relative CSV paths.
  std::string base_dir = ".";
};

Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
/// YAML text that parses back to an equivalent scenario.
std::string dump_scenario(const Scenario& sc);

AcousticMedium build_medium(const Scenario& sc);
BoundaryLaw build_boundary(const Scenario& sc, const SpatialDiscretization& sd);
/// Resolves rho (auto applies the selection helper) and samples the source.
EvoProblem build_problem(const Scenario& sc);
ReflectionSetup build_reflection_setup(const Scenario& sc);

}  // namespace evo
