#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "locklab/errors.hpp"
#include "locklab/fem.hpp"
#include "locklab/homogeneous.hpp"
#include "locklab/io.hpp"
#include "locklab/materials.hpp"

namespace locklab {

/// Config-file problem: message carries "source:line: what".
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string kind = "neo-hookean";
  double mu0 = 1.0;
  double a = 0.0;
  bool has_a = false;
  double alpha = 0.0;
  double f = 0.0;

  bool operator==(const ModelConfig&) const = default;

  MaterialModel build() const {
    if (kind == "neo-hookean") {
      if (has_a || alpha != 0.0 || f != 0.0)
        throw ParameterError("neo-hookean takes no a, alpha or f");
      return MaterialModel::neo_hookean(mu0);
    }
    if (kind == "gent") {
      if (!has_a) throw ParameterError("gent requires the locking parameter a");
      if (alpha != 0.0 || f != 0.0)
        throw ParameterError("gent takes no alpha or f");
      return MaterialModel::gent(mu0, a);
    }
    if (kind == "kilian") {
      if (!has_a) throw ParameterError("kilian requires the locking parameter a");
      return MaterialModel::kilian(mu0, a, alpha, f);
    }
    throw ParameterError("unknown material kind '" + kind + "'");
  }
};

enum class CommandKind { Sweep, Path, Surface, Fem };

struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  bool set = false;
  bool operator==(const RangeSpec&) const = default;
};

struct SweepSpec {
  std::vector<CaseKind> kinds;
  int steps = 200;
  bool include_neo_hookean = false;
  RangeSpec shear_range;
  RangeSpec uniaxial_range;
  RangeSpec biaxial_range;
  bool operator==(const SweepSpec&) const = default;
};

struct PathSpec {
  std::string problem = "cube";  // cube | block
  double lambda_min = 1.0001;
  double lambda_max = 3.0;
  int steps = 140;
  bool include_neo_hookean = false;
  bool operator==(const PathSpec&) const = default;
};

struct SurfaceSpec {
  double lambda_min = 0.2;
  double lambda_max = 3.0;
  int steps = 121;
  bool operator==(const SurfaceSpec&) const = default;
};

struct FemSpec {
  std::string problem;  // single-element-traction | single-element-displacement |
                        // three-element-strip
  double traction_max = 0.0;
  double stretch_target = 0.0;
  double pull = 0.0;
  bool clamp_driven_face = true;
  bool operator==(const FemSpec&) const = default;
};

struct RunConfig {
  ModelConfig model;
  CommandKind command = CommandKind::Sweep;
  EvalMode mode = EvalMode::Guarded;
  SweepSpec sweep;
  PathSpec path;
  SurfaceSpec surface;
  FemSpec fem;
  fem::SolverConfig solver;
  std::string output_name = "run";

  bool operator==(const RunConfig&) const = default;

  /// Full semantic validation; throws ConfigError with a description.
  void validate() const {
    try {
      (void)model.build();
      if (command == CommandKind::Sweep) {
        if (sweep.kinds.empty()) throw ParameterError("sweep: no deformation kinds listed");
        if (sweep.steps < 2) throw ParameterError("sweep: steps must be >= 2");
        for (CaseKind k : sweep.kinds) {
          const RangeSpec& r = range_for(k);
          if (!r.set)
            throw ParameterError(std::string("sweep: missing range for kind '") +
                                 to_string(k) + "'");
          if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
            throw ParameterError("sweep: ranges must be finite with lo <= hi");
          if (k != CaseKind::SimpleShear && !(r.lo > 0.0))
            throw ParameterError("sweep: stretch ranges must be positive");
        }
      } else if (command == CommandKind::Path) {
        if (path.problem != "cube" && path.problem != "block")
          throw ParameterError("path: problem must be 'cube' or 'block'");
        if (path.steps < 2) throw ParameterError("path: steps must be >= 2");
        const double floor = path.problem == "cube" ? 1.0 : 0.0;
        if (!(path.lambda_min > floor && path.lambda_max > path.lambda_min) ||
            !std::isfinite(path.lambda_max))
          throw ParameterError("path: need " + std::string(path.problem == "cube"
                                                               ? "1 < lambda_min"
                                                               : "0 < lambda_min") +
                               " < lambda_max, finite");
      } else if (command == CommandKind::Surface) {
        if (surface.steps < 2) throw ParameterError("surface: steps must be >= 2");
        if (!(surface.lambda_min > 0.0 && surface.lambda_max > surface.lambda_min) ||
            !std::isfinite(surface.lambda_max))
          throw ParameterError("surface: need 0 < lambda_min < lambda_max, finite");
      } else {
        if (fem.problem == "single-element-traction") {
          if (!(fem.traction_max > 0.0) || !std::isfinite(fem.traction_max))
            throw ParameterError("fem: traction_max must be positive and finite");
        } else if (fem.problem == "single-element-displacement") {
          if (!(fem.stretch_target > 1.0) || !std::isfinite(fem.stretch_target))
            throw ParameterError("fem: stretch_target must exceed 1");
        } else if (fem.problem == "three-element-strip") {
          if (!(fem.pull > 0.0) || !std::isfinite(fem.pull))
            throw ParameterError("fem: pull must be positive and finite");
        } else {
          throw ParameterError("fem: unknown problem '" + fem.problem + "'");
        }
        solver.validate();
        if (model.f != 0.0) throw ParameterError("fem: requires f = 0");
      }
      if (output_name.empty()) throw ParameterError("output: name must not be empty");
    } catch (const ParameterError& pe) {
      throw ConfigError(pe.what());
    }
  }

  const RangeSpec& range_for(CaseKind k) const {
    switch (k) {
      case CaseKind::SimpleShear: return sweep.shear_range;
      case CaseKind::Uniaxial: return sweep.uniaxial_range;
      case CaseKind::Equibiaxial: return sweep.biaxial_range;
    }
    throw std::invalid_argument("unknown case kind");
  }
};

namespace cfgdetail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void fail(const std::string& src, int line, const std::string& what) {
  throw ConfigError(src + ":" + std::to_string(line) + ": " + what);
}

inline double parse_num(const std::string& src, int line, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  auto res = std::from_chars(b, e, out);
  if (res.ec != std::errc{} || res.ptr != e)
    fail(src, line, "expected a number, got '" + t + "'");
  return out;
}

inline int parse_int(const std::string& src, int line, const std::string& v) {
  const std::string t = trim(v);
  int out = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    fail(src, line, "expected an integer, got '" + t + "'");
  return out;
}

inline bool parse_bool(const std::string& src, int line, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true") return true;
  if (t == "false") return false;
  fail(src, line, "expected true/false, got '" + t + "'");
}

inline RangeSpec parse_range(const std::string& src, int line, const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) fail(src, line, "expected 'lo:hi', got '" + trim(v) + "'");
  RangeSpec r;
  r.lo = parse_num(src, line, v.substr(0, colon));
  r.hi = parse_num(src, line, v.substr(colon + 1));
  r.set = true;
  return r;
}

inline EvalMode parse_mode(const std::string& src, int line, const std::string& v) {
  const std::string t = trim(v);
  if (t == "guarded") return EvalMode::Guarded;
  if (t == "unguarded") return EvalMode::Unguarded;
  fail(src, line, "mode must be guarded or unguarded, got '" + t + "'");
}

inline std::vector<CaseKind> parse_kinds(const std::string& src, int line,
                                         const std::string& v) {
  std::vector<CaseKind> kinds;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t == "shear") kinds.push_back(CaseKind::SimpleShear);
    else if (t == "uniaxial") kinds.push_back(CaseKind::Uniaxial);
    else if (t == "biaxial") kinds.push_back(CaseKind::Equibiaxial);
    else fail(src, line, "unknown deformation kind '" + t + "'");
  }
  if (kinds.empty()) fail(src, line, "empty kind list");
  return kinds;
}

}  // namespace cfgdetail

/// Parse the sectioned key-value run configuration. Unknown sections or
/// keys are errors; diagnostics carry source name and line number.
inline RunConfig parse_config(const std::string& text, const std::string& source) {
  using namespace cfgdetail;
  RunConfig cfg;
  std::string section;
  bool have_command = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(source, line, "malformed section header");
      section = s.substr(1, s.size() - 2);
      const bool is_cmd = section == "sweep" || section == "path" ||
                          section == "surface" || section == "fem";
      if (is_cmd) {
        if (have_command) fail(source, line, "more than one command section");
        have_command = true;
        if (section == "sweep") cfg.command = CommandKind::Sweep;
        else if (section == "path") cfg.command = CommandKind::Path;
        else if (section == "surface") cfg.command = CommandKind::Surface;
        else cfg.command = CommandKind::Fem;
      } else if (section != "model" && section != "solver" && section != "output") {
        fail(source, line, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(source, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail(source, line, "key '" + key + "' outside any section");

    if (section == "model") {
      if (key == "kind") cfg.model.kind = val;
      else if (key == "mu0") cfg.model.mu0 = parse_num(source, line, val);
      else if (key == "a") { cfg.model.a = parse_num(source, line, val); cfg.model.has_a = true; }
      else if (key == "alpha") cfg.model.alpha = parse_num(source, line, val);
      else if (key == "f") cfg.model.f = parse_num(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [model]");
    } else if (section == "sweep") {
      if (key == "kinds") cfg.sweep.kinds = parse_kinds(source, line, val);
      else if (key == "steps") cfg.sweep.steps = parse_int(source, line, val);
      else if (key == "include_neo_hookean")
        cfg.sweep.include_neo_hookean = parse_bool(source, line, val);
      else if (key == "shear_range") cfg.sweep.shear_range = parse_range(source, line, val);
      else if (key == "uniaxial_range")
        cfg.sweep.uniaxial_range = parse_range(source, line, val);
      else if (key == "biaxial_range")
        cfg.sweep.biaxial_range = parse_range(source, line, val);
      else if (key == "mode") cfg.mode = parse_mode(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [sweep]");
    } else if (section == "path") {
      if (key == "problem") cfg.path.problem = val;
      else if (key == "lambda_min") cfg.path.lambda_min = parse_num(source, line, val);
      else if (key == "lambda_max") cfg.path.lambda_max = parse_num(source, line, val);
      else if (key == "steps") cfg.path.steps = parse_int(source, line, val);
      else if (key == "include_neo_hookean")
        cfg.path.include_neo_hookean = parse_bool(source, line, val);
      else if (key == "mode") cfg.mode = parse_mode(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [path]");
    } else if (section == "surface") {
      if (key == "lambda_min") cfg.surface.lambda_min = parse_num(source, line, val);
      else if (key == "lambda_max") cfg.surface.lambda_max = parse_num(source, line, val);
      else if (key == "steps") cfg.surface.steps = parse_int(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [surface]");
    } else if (section == "fem") {
      if (key == "problem") cfg.fem.problem = val;
      else if (key == "traction_max") cfg.fem.traction_max = parse_num(source, line, val);
      else if (key == "stretch_target")
        cfg.fem.stretch_target = parse_num(source, line, val);
      else if (key == "pull") cfg.fem.pull = parse_num(source, line, val);
      else if (key == "clamp_driven_face")
        cfg.fem.clamp_driven_face = parse_bool(source, line, val);
      else if (key == "mode") cfg.mode = parse_mode(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [fem]");
    } else if (section == "solver") {
      if (key == "kappa") cfg.solver.kappa = parse_num(source, line, val);
      else if (key == "newton_tol") cfg.solver.newton_tol = parse_num(source, line, val);
      else if (key == "max_iterations")
        cfg.solver.max_iterations = parse_int(source, line, val);
      else if (key == "initial_increment")
        cfg.solver.initial_increment = parse_num(source, line, val);
      else if (key == "min_increment") cfg.solver.min_increment = parse_num(source, line, val);
      else if (key == "max_increment") cfg.solver.max_increment = parse_num(source, line, val);
      else if (key == "cut_factor") cfg.solver.cut_factor = parse_num(source, line, val);
      else if (key == "growth_factor") cfg.solver.growth_factor = parse_num(source, line, val);
      else if (key == "stop_margin_fraction")
        cfg.solver.stop_margin_fraction = parse_num(source, line, val);
      else fail(source, line, "unknown key '" + key + "' in [solver]");
    } else if (section == "output") {
      if (key == "name") cfg.output_name = val;
      else fail(source, line, "unknown key '" + key + "' in [output]");
    }
  }
  if (!have_command)
    throw ConfigError(source + ": missing command section ([sweep], [path], [surface] or [fem])");
  cfg.solver.locking_mode = cfg.mode;
  return cfg;
}

/// Canonical serialization; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  const auto kv = [&out](const char* k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  const auto kvd = [&](const char* k, double v) { kv(k, format_double(v)); };
  const auto kvb = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };

  out += "[model]\n";
  kv("kind", cfg.model.kind);
  kvd("mu0", cfg.model.mu0);
  if (cfg.model.has_a) kvd("a", cfg.model.a);
  if (cfg.model.alpha != 0.0) kvd("alpha", cfg.model.alpha);
  if (cfg.model.f != 0.0) kvd("f", cfg.model.f);
  out += '\n';

  const char* mode = cfg.mode == EvalMode::Guarded ? "guarded" : "unguarded";
  switch (cfg.command) {
    case CommandKind::Sweep: {
      out += "[sweep]\n";
      std::string kinds;
      for (CaseKind k : cfg.sweep.kinds) {
        if (!kinds.empty()) kinds += ',';
        kinds += to_string(k);
      }
      kv("kinds", kinds);
      kv("steps", std::to_string(cfg.sweep.steps));
      kvb("include_neo_hookean", cfg.sweep.include_neo_hookean);
      const auto range = [&](const char* k, const RangeSpec& r) {
        if (r.set) kv(k, format_double(r.lo) + ":" + format_double(r.hi));
      };
      range("shear_range", cfg.sweep.shear_range);
      range("uniaxial_range", cfg.sweep.uniaxial_range);
      range("biaxial_range", cfg.sweep.biaxial_range);
      kv("mode", mode);
      break;
    }
    case CommandKind::Path:
      out += "[path]\n";
      kv("problem", cfg.path.problem);
      kvd("lambda_min", cfg.path.lambda_min);
      kvd("lambda_max", cfg.path.lambda_max);
      kv("steps", std::to_string(cfg.path.steps));
      kvb("include_neo_hookean", cfg.path.include_neo_hookean);
      kv("mode", mode);
      break;
    case CommandKind::Surface:
      out += "[surface]\n";
      kvd("lambda_min", cfg.surface.lambda_min);
      kvd("lambda_max", cfg.surface.lambda_max);
      kv("steps", std::to_string(cfg.surface.steps));
      break;
    case CommandKind::Fem:
      out += "[fem]\n";
      kv("problem", cfg.fem.problem);
      if (cfg.fem.traction_max != 0.0) kvd("traction_max", cfg.fem.traction_max);
      if (cfg.fem.stretch_target != 0.0) kvd("stretch_target", cfg.fem.stretch_target);
      if (cfg.fem.pull != 0.0) kvd("pull", cfg.fem.pull);
      kvb("clamp_driven_face", cfg.fem.clamp_driven_face);
      kv("mode", mode);
      out += "\n[solver]\n";
      kvd("kappa", cfg.solver.kappa);
      kvd("newton_tol", cfg.solver.newton_tol);
      kv("max_iterations", std::to_string(cfg.solver.max_iterations));
      kvd("initial_increment", cfg.solver.initial_increment);
      kvd("min_increment", cfg.solver.min_increment);
      kvd("max_increment", cfg.solver.max_increment);
      kvd("cut_factor", cfg.solver.cut_factor);
      kvd("growth_factor", cfg.solver.growth_factor);
      kvd("stop_margin_fraction", cfg.solver.stop_margin_fraction);
      break;
  }
  out += "\n[output]\n";
  kv("name", cfg.output_name);
  return out;
}

}  // namespace locklab
