#include "evo/scenario.hpp"

#include "evo/verify.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace evo {

ConfigError::ConfigError(const std::string& msg, int line)
    : Error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

void allow_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> keys) {
  if (!n.IsMap()) throw ConfigError("section '" + section + "' must be a map", line_of(n));
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in section '" + section + "'", line_of(kv.first));
  }
}

template <class T>
T get(const YAML::Node& n, const std::string& what) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + what + "'", line_of(n));
  }
}

double get_positive(const YAML::Node& n, const std::string& what) {
  const double v = get<double>(n, what);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + what + "' must be positive", line_of(n));
  return v;
}

std::vector<cplx> complex_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) throw ConfigError("'" + what + "' must be a flat list of re, im pairs", line_of(n));
  if (n.size() % 2 != 0) throw ConfigError("'" + what + "' needs an even number of entries (re, im pairs)", line_of(n));
  std::vector<cplx> out;
  for (std::size_t i = 0; i < n.size(); i += 2) out.emplace_back(get<double>(n[i], what), get<double>(n[i + 1], what));
  return out;
}

RationalSpec rational_spec(const YAML::Node& n, const std::string& section) {
  RationalSpec r;
  if (n["poly"]) r.poly = complex_list(n["poly"], section + ".poly");
  if (n["poles"]) r.poles = complex_list(n["poles"], section + ".poles");
  if (n["residues"]) r.residues = complex_list(n["residues"], section + ".residues");
  if (r.poles.size() != r.residues.size())
    throw ConfigError(section + ": poles and residues must have the same length", line_of(n));
  return r;
}

LawSpec law_spec(const YAML::Node& n, const std::string& section) {
  allow_keys(n, section, {"M0", "poles", "residues", "poly", "r"});
  LawSpec l;
  if (n["M0"]) {
    const auto m = complex_list(n["M0"], section + ".M0");
    if (m.size() != 1) throw ConfigError(section + ".M0 must be [re, im]", line_of(n["M0"]));
    l.M0 = m.front();
  }
  l.M1 = rational_spec(n, section);
  if (n["r"]) l.r = get_positive(n["r"], section + ".r");
  return l;
}

RationalMatrixFunction to_function(const RationalSpec& r) { return RationalMatrixFunction::scalar(r.poly, r.poles, r.residues); }

void emit_complex_list(YAML::Emitter& e, const std::vector<cplx>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (cplx z : v) e << z.real() << z.imag();
  e << YAML::EndSeq;
}

void emit_rational(YAML::Emitter& e, const RationalSpec& r) {
  if (!r.poly.empty()) {
    e << YAML::Key << "poly" << YAML::Value;
    emit_complex_list(e, r.poly);
  }
  if (!r.poles.empty()) {
    e << YAML::Key << "poles" << YAML::Value;
    emit_complex_list(e, r.poles);
    e << YAML::Key << "residues" << YAML::Value;
    emit_complex_list(e, r.residues);
  }
}

void emit_law(YAML::Emitter& e, const LawSpec& l) {
  e << YAML::BeginMap << YAML::Key << "M0" << YAML::Value;
  emit_complex_list(e, {l.M0});
  emit_rational(e, l.M1);
  if (l.r > 0.0) e << YAML::Key << "r" << YAML::Value << l.r;
  e << YAML::EndMap;
}

double gauss(double x, double sigma) {
  const double v = std::exp(-0.5 * x * x / (sigma * sigma));
  return v < 1e-16 ? 0.0 : v;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  Scenario sc;
  sc.base_dir = base_dir;
  if (!root || root.IsNull()) throw ConfigError("empty scenario", 0);
  allow_keys(root, "top level", {"grid", "space", "material", "boundary", "source", "solver", "verify", "sweep", "outputs"});

  if (const auto g = root["grid"]) {
    allow_keys(g, "grid", {"t0", "dt", "n", "rho"});
    if (g["t0"]) sc.t0 = get<double>(g["t0"], "grid.t0");
    if (g["dt"]) sc.dt = get_positive(g["dt"], "grid.dt");
    if (g["n"]) {
      const long n = get<long>(g["n"], "grid.n");
      if (n < 2) throw ConfigError("grid.n must be at least 2", line_of(g["n"]));
      sc.n = static_cast<std::size_t>(n);
    }
    if (g["rho"]) {
      if (g["rho"].IsScalar() && g["rho"].Scalar() == "auto")
        sc.rho.reset();
      else
        sc.rho = get_positive(g["rho"], "grid.rho");
    }
  } else {
    throw ConfigError("missing section 'grid'", 0);
  }
  if (const auto s = root["space"]) {
    allow_keys(s, "space", {"L", "np"});
    if (s["L"]) sc.L = get_positive(s["L"], "space.L");
    if (s["np"]) {
      sc.np = get<int>(s["np"], "space.np");
      if (sc.np < 4) throw ConfigError("space.np must be at least 4", line_of(s["np"]));
    }
  }
  if (const auto m = root["material"]) {
    allow_keys(m, "material", {"p", "v"});
    if (m["p"]) sc.pressure = law_spec(m["p"], "material.p");
    if (m["v"]) sc.velocity = law_spec(m["v"], "material.v");
  }
  if (const auto b = root["boundary"]) {
    allow_keys(b, "boundary", {"g", "alpha"});
    if (const auto g = b["g"]) {
      if (g.IsScalar()) {
        std::string s = g.Scalar();
        if (s == "neumann" || s == "0") {
          sc.boundary.kind = "neumann";
        } else if (s.rfind("robin", 0) == 0) {
          const auto pos = s.find("k=");
          if (pos == std::string::npos) throw ConfigError("expected 'robin k=<value>'", line_of(g));
          try {
            std::size_t used = 0;
            sc.boundary.k = std::stod(s.substr(pos + 2), &used);
            if (pos + 2 + used != s.size()) throw std::invalid_argument("trailing");
          } catch (const std::exception&) {
            throw ConfigError("bad Robin coefficient in '" + s + "'", line_of(g));
          }
          sc.boundary.kind = "robin";
        } else {
          throw ConfigError("boundary.g must be 'neumann', 'robin k=<value>' or a map of poly/poles/residues", line_of(g));
        }
      } else {
        allow_keys(g, "boundary.g", {"poly", "poles", "residues"});
        sc.boundary.kind = "rational";
        sc.boundary.g = rational_spec(g, "boundary.g");
      }
    }
    if (const auto a = b["alpha"]) {
      allow_keys(a, "boundary.alpha", {"left", "right"});
      if (a["left"]) sc.boundary.alpha_left = get<double>(a["left"], "boundary.alpha.left");
      if (a["right"]) sc.boundary.alpha_right = get<double>(a["right"], "boundary.alpha.right");
    }
  }
  if (const auto s = root["source"]) {
    allow_keys(s, "source", {"gaussian", "csv", "none"});
    if (const auto gs = s["gaussian"]) {
      allow_keys(gs, "source.gaussian", {"t_c", "width", "x_c", "x_width", "component", "amplitude"});
      sc.source.kind = "gaussian";
      if (gs["t_c"]) sc.source.t_c = get<double>(gs["t_c"], "source.gaussian.t_c");
      if (gs["width"]) sc.source.width = get_positive(gs["width"], "source.gaussian.width");
      if (gs["x_c"]) sc.source.x_c = get<double>(gs["x_c"], "source.gaussian.x_c");
      if (gs["x_width"]) sc.source.x_width = get_positive(gs["x_width"], "source.gaussian.x_width");
      if (gs["component"]) {
        sc.source.component = get<std::string>(gs["component"], "source.gaussian.component");
        if (sc.source.component != "p" && sc.source.component != "v" && sc.source.component != "pv")
          throw ConfigError("source component must be p, v or pv", line_of(gs["component"]));
      }
      if (gs["amplitude"]) sc.source.amplitude = get<double>(gs["amplitude"], "source.gaussian.amplitude");
    } else if (s["csv"]) {
      sc.source.kind = "csv";
      sc.source.csv = get<std::string>(s["csv"], "source.csv");
    } else if (s["none"]) {
      sc.source.kind = "none";
    }
  }
  if (const auto s = root["solver"]) {
    allow_keys(s, "solver", {"method", "substeps"});
    if (s["method"]) {
      sc.method = get<std::string>(s["method"], "solver.method");
      if (sc.method != "frequency" && sc.method != "timestep")
        throw ConfigError("solver.method must be frequency or timestep", line_of(s["method"]));
    }
    if (s["substeps"]) {
      sc.substeps = get<int>(s["substeps"], "solver.substeps");
      if (sc.substeps < 1) throw ConfigError("solver.substeps must be >= 1", line_of(s["substeps"]));
    }
  }
  if (const auto v = root["verify"]) {
    allow_keys(v, "verify", {"checks", "trials", "seed"});
    if (v["checks"]) {
      if (!v["checks"].IsSequence()) throw ConfigError("verify.checks must be a list", line_of(v["checks"]));
      sc.checks_given = true;
      const auto names = all_check_names();
      for (const auto& c : v["checks"]) {
        const auto name = get<std::string>(c, "verify.checks");
        if (std::find(names.begin(), names.end(), name) == names.end())
          throw ConfigError("unknown check '" + name + "'", line_of(c));
        sc.checks.push_back(name);
      }
    }
    if (v["trials"]) sc.trials = get<int>(v["trials"], "verify.trials");
    if (v["seed"]) sc.seed = get<std::uint64_t>(v["seed"], "verify.seed");
  }
  if (const auto s = root["sweep"]) {
    allow_keys(s, "sweep", {"k", "t1", "t2"});
    if (s["k"]) {
      if (!s["k"].IsSequence()) throw ConfigError("sweep.k must be a list", line_of(s["k"]));
      sc.sweep_k.clear();
      for (const auto& k : s["k"]) sc.sweep_k.push_back(get<double>(k, "sweep.k"));
    }
    if (s["t1"]) sc.sweep_t1 = get<double>(s["t1"], "sweep.t1");
    if (s["t2"]) sc.sweep_t2 = get<double>(s["t2"], "sweep.t2");
  }
  if (const auto o = root["outputs"]) {
    allow_keys(o, "outputs", {"U", "report", "checks", "sweep"});
    if (o["U"]) sc.out_U = get<std::string>(o["U"], "outputs.U");
    if (o["report"]) sc.out_report = get<std::string>(o["report"], "outputs.report");
    if (o["checks"]) sc.out_checks = get<std::string>(o["checks"], "outputs.checks");
    if (o["sweep"]) sc.out_sweep = get<std::string>(o["sweep"], "outputs.sweep");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path, 0);
  std::stringstream ss;
  ss << is.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(ss.str(), dir.empty() ? "." : dir.string());
}

std::string dump_scenario(const Scenario& sc) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "t0" << YAML::Value << sc.t0 << YAML::Key << "dt" << YAML::Value << sc.dt;
  e << YAML::Key << "n" << YAML::Value << sc.n << YAML::Key << "rho" << YAML::Value;
  if (sc.rho) e << *sc.rho;
  else e << "auto";
  e << YAML::EndMap;
  e << YAML::Key << "space" << YAML::Value << YAML::BeginMap << YAML::Key << "L" << YAML::Value << sc.L << YAML::Key << "np"
    << YAML::Value << sc.np << YAML::EndMap;
  e << YAML::Key << "material" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "p" << YAML::Value;
  emit_law(e, sc.pressure);
  e << YAML::Key << "v" << YAML::Value;
  emit_law(e, sc.velocity);
  e << YAML::EndMap;
  e << YAML::Key << "boundary" << YAML::Value << YAML::BeginMap << YAML::Key << "g" << YAML::Value;
  if (sc.boundary.kind == "robin") {
    std::ostringstream os;
    os << std::setprecision(17) << "robin k=" << sc.boundary.k;
    e << os.str();
  } else if (sc.boundary.kind == "neumann") {
    e << "neumann";
  } else {
    e << YAML::BeginMap;
    emit_rational(e, sc.boundary.g);
    e << YAML::EndMap;
  }
  e << YAML::Key << "alpha" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "left" << YAML::Value
    << sc.boundary.alpha_left << YAML::Key << "right" << YAML::Value << sc.boundary.alpha_right << YAML::EndMap;
  e << YAML::EndMap;
  e << YAML::Key << "source" << YAML::Value << YAML::BeginMap;
  if (sc.source.kind == "gaussian") {
    e << YAML::Key << "gaussian" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "t_c" << YAML::Value << sc.source.t_c << YAML::Key << "width" << YAML::Value << sc.source.width;
    e << YAML::Key << "x_c" << YAML::Value << sc.source.x_c << YAML::Key << "x_width" << YAML::Value << sc.source.x_width;
    e << YAML::Key << "component" << YAML::Value << sc.source.component << YAML::Key << "amplitude" << YAML::Value
      << sc.source.amplitude;
    e << YAML::EndMap;
  } else if (sc.source.kind == "csv") {
    e << YAML::Key << "csv" << YAML::Value << sc.source.csv;
  } else {
    e << YAML::Key << "none" << YAML::Value << true;
  }
  e << YAML::EndMap;
  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap << YAML::Key << "method" << YAML::Value << sc.method
    << YAML::Key << "substeps" << YAML::Value << sc.substeps << YAML::EndMap;
  e << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
  if (sc.checks_given) {
    e << YAML::Key << "checks" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& c : sc.checks) e << c;
    e << YAML::EndSeq;
  }
  e << YAML::Key << "trials" << YAML::Value << sc.trials << YAML::Key << "seed" << YAML::Value << sc.seed << YAML::EndMap;
  e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap << YAML::Key << "k" << YAML::Value << YAML::Flow
    << sc.sweep_k << YAML::Key << "t1" << YAML::Value << sc.sweep_t1 << YAML::Key << "t2" << YAML::Value << sc.sweep_t2
    << YAML::EndMap;
  e << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap << YAML::Key << "U" << YAML::Value << sc.out_U << YAML::Key
    << "report" << YAML::Value << sc.out_report << YAML::Key << "checks" << YAML::Value << sc.out_checks << YAML::Key
    << "sweep" << YAML::Value << sc.out_sweep << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

AcousticMedium build_medium(const Scenario& sc) {
  auto law = [](const LawSpec& l, const char* which) {
    if (std::abs(l.M0.imag()) > 0.0 || !(l.M0.real() > 0.0))
      throw ConfigError(std::string("material.") + which + ".M0 must be real and positive for a scalar law", 0);
    return MaterialLaw::scalar(l.M0.real(), to_function(l.M1), l.r);
  };
  return {law(sc.pressure, "p"), law(sc.velocity, "v")};
}

BoundaryLaw build_boundary(const Scenario& sc, const SpatialDiscretization& sd) {
  RationalMatrixFunction g(1);
  if (sc.boundary.kind == "robin")
    g = RationalMatrixFunction::scalar({0.0, sc.boundary.k}, {}, {});
  else if (sc.boundary.kind == "rational")
    g = to_function(sc.boundary.g);
  return BoundaryLaw::linear_profile(g, sd, sc.boundary.alpha_left, sc.boundary.alpha_right);
}

EvoProblem build_problem(const Scenario& sc) {
  SpatialDiscretization sd(sc.L, sc.np);
  AcousticMedium medium = build_medium(sc);
  BoundaryLaw bl = build_boundary(sc, sd);
  const double rho = sc.rho ? *sc.rho : select_rho(medium, bl);
  const WeightedGrid grid(sc.t0, sc.dt, sc.n, rho);
  const int nr = sd.reduced_size();
  WeightedSignal f = WeightedSignal::zeros(grid, nr);
  if (sc.source.kind == "gaussian") {
    const bool use_p = sc.source.component != "v";
    const bool use_v = sc.source.component != "p";
    for (std::size_t j = 0; j < grid.n(); ++j) {
      const double phi = sc.source.amplitude * gauss(grid.time(j) - sc.source.t_c, sc.source.width);
      if (phi == 0.0) continue;
      for (int k = 0; k < nr; ++k) {
        const bool is_p = k % 2 == 0;
        if ((is_p && !use_p) || (!is_p && !use_v)) continue;
        const double x = is_p ? sd.x_cell(k / 2) : sd.x_face((k + 1) / 2);
        f.mutable_values()(static_cast<Eigen::Index>(j), k) = phi * gauss(x - sc.source.x_c, sc.source.x_width);
      }
    }
  } else if (sc.source.kind == "csv") {
    std::filesystem::path p(sc.source.csv);
    if (p.is_relative()) p = std::filesystem::path(sc.base_dir) / p;
    WeightedSignal raw = read_signal_csv(p.string(), rho);
    if (!raw.grid().compatible(grid)) throw ConfigError("source CSV time column does not match the grid section", 0);
    if (raw.dim() != nr)
      throw ConfigError("source CSV has " + std::to_string(raw.dim()) + " components, reduced state needs " + std::to_string(nr), 0);
    f = WeightedSignal(grid, raw.values());
  }
  return {grid, std::move(sd), std::move(medium), std::move(bl), std::move(f)};
}

ReflectionSetup build_reflection_setup(const Scenario& sc) {
  ReflectionSetup st;
  st.L = sc.L;
  st.np = sc.np;
  st.dt = sc.dt;
  st.t_end = sc.dt * static_cast<double>(sc.n);
  st.rho = sc.rho ? *sc.rho : 3.0;
  st.x_c = sc.source.x_c;
  st.t_c = sc.source.t_c;
  st.sigma_t = sc.source.width;
  st.sigma_x = sc.source.x_width;
  st.t1 = sc.sweep_t1;
  st.t2 = sc.sweep_t2;
  return st;
}

}  // namespace evo
