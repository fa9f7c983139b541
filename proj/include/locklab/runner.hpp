#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "locklab/config.hpp"
#include "locklab/fem.hpp"
#include "locklab/homogeneous.hpp"
#include "locklab/io.hpp"
#include "locklab/paths.hpp"

namespace locklab {

struct RunOutcome {
  std::vector<std::string> files;
  std::string summary;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

namespace rundetail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Emitted stresses are per unit mu0 of the evaluated model, rescaled by the
// requested output modulus.
struct StressScale {
  double factor = 1.0;
  double operator()(double sigma) const { return sigma * factor; }
};

inline std::string run_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir,
                             std::vector<std::string>& files, double out_mu0) {
  const MaterialModel main_model = cfg.model.build();
  std::vector<MaterialModel> models{main_model};
  if (cfg.sweep.include_neo_hookean)
    models.push_back(MaterialModel::neo_hookean(cfg.model.mu0));

  CsvTable csv({"model", "kind", "control", "sigma11", "sigma22", "sigma33", "sigma12",
                "I1_bar", "locking_margin", "at_asymptote"});
  std::string notes;
  for (const MaterialModel& m : models) {
    const StressScale sc{out_mu0 / m.mu0()};
    for (CaseKind kind : cfg.sweep.kinds) {
      const RangeSpec& r = cfg.range_for(kind);
      for (double control : linspace(r.lo, r.hi, cfg.sweep.steps)) {
        ResponseSample s;
        try {
          s = case_response(m, kind, control, cfg.mode);
        } catch (const LockingViolation& lv) {
          notes += std::string(to_string(m.kind())) + " " + to_string(kind) +
                   ": sweep stopped at the locking bound (margin " +
                   format_double(lv.margin()) + ")\n";
          break;
        } catch (const EvaluationError&) {
          continue;  // grid point exactly on a derivative pole
        }
        csv.row() << to_string(m.kind()) << to_string(kind) << s.control
                  << sc(s.sigma11) << sc(s.sigma22) << sc(s.sigma33) << sc(s.sigma12)
                  << s.I1_bar << s.locking_margin << s.at_asymptote;
      }
    }
  }
  const auto path = out_dir / (cfg.output_name + ".csv");
  write_file(path, csv.str());
  files.push_back(path.string());
  return notes + "wrote " + path.string();
}

inline std::string run_path(const RunConfig& cfg, const std::filesystem::path& out_dir,
                            std::vector<std::string>& files, double out_mu0) {
  const MaterialModel main_model = cfg.model.build();
  std::vector<MaterialModel> models{main_model};
  if (cfg.path.include_neo_hookean)
    models.push_back(MaterialModel::neo_hookean(cfg.model.mu0));

  CsvTable csv({"model", "branch", "lambda1", "lambda2", "S_nominal", "sigma11",
                "locking_margin", "at_bifurcation"});
  std::string summary;
  for (const MaterialModel& m : models) {
    const StressScale sc{out_mu0 / m.mu0()};
    EquilibriumCurve curve;
    if (cfg.path.problem == "cube") {
      curve = cube_nontrivial_path(
          m, geometric_lambda_grid(cfg.path.lambda_min, cfg.path.lambda_max, cfg.path.steps),
          cfg.mode);
    } else {
      curve = block_plane_strain_path(
          m, linspace(cfg.path.lambda_min, cfg.path.lambda_max, cfg.path.steps), cfg.mode);
    }
    if (cfg.path.problem == "cube") {
      double s_hi = 2.5 * m.mu0();
      for (const PathSample& s : curve.samples) s_hi = std::max(s_hi, s.S_nominal);
      const EquilibriumCurve trivial =
          cube_trivial_path(m, linspace(0.0, s_hi, cfg.path.steps / 2 + 2));
      for (const PathSample& s : trivial.samples)
        csv.row() << to_string(m.kind()) << to_string(s.branch) << s.lambda1 << s.lambda2
                  << sc(s.S_nominal) << sc(s.sigma11) << s.locking_margin
                  << s.at_bifurcation;
      const BifurcationPoint bp = bifurcation_detect(trivial, curve);
      summary += std::string(to_string(m.kind())) +
                 ": non-trivial branch intercept S* = " + format_double(sc(bp.S_star)) +
                 " (offset from 2 mu0: " + format_double(bp.deviation) + ")\n";
    }
    for (const PathSample& s : curve.samples)
      csv.row() << to_string(m.kind()) << to_string(s.branch) << s.lambda1 << s.lambda2
                << sc(s.S_nominal) << sc(s.sigma11) << s.locking_margin << s.at_bifurcation;
    if (curve.locking_terminated)
      summary += std::string(to_string(m.kind())) + ": sweep stopped at the locking bound\n";
  }
  const auto path = out_dir / (cfg.output_name + ".csv");
  write_file(path, csv.str());
  files.push_back(path.string());
  return summary + "wrote " + path.string();
}

inline std::string run_surface(const RunConfig& cfg, const std::filesystem::path& out_dir,
                               std::vector<std::string>& files, double out_mu0) {
  const MaterialModel m = cfg.model.build();
  const StressScale sc{out_mu0 / m.mu0()};
  const auto grid = linspace(cfg.surface.lambda_min, cfg.surface.lambda_max,
                             cfg.surface.steps);
  const EnergySurface surf = energy_surface(m, grid, grid);
  CsvTable csv({"lambda1", "lambda2", "W", "in_domain"});
  for (std::size_t i = 0; i < surf.lambda1.size(); ++i)
    for (std::size_t j = 0; j < surf.lambda2.size(); ++j) {
      const std::size_t n = i * surf.lambda2.size() + j;
      csv.row() << surf.lambda1[i] << surf.lambda2[j] << sc(surf.energy[n])
                << (surf.in_domain[n] != 0);
    }
  const auto path = out_dir / (cfg.output_name + ".csv");
  write_file(path, csv.str());
  files.push_back(path.string());
  return "wrote " + path.string();
}

inline std::string run_fem(const RunConfig& cfg, const std::filesystem::path& out_dir,
                           std::vector<std::string>& files, double out_mu0) {
  const MaterialModel m = cfg.model.build();
  const StressScale sc{out_mu0 / m.mu0()};
  fem::SolverConfig solver = cfg.solver;
  solver.locking_mode = cfg.mode;

  fem::FemRunResult res;
  std::string control_name;
  if (cfg.fem.problem == "single-element-traction") {
    res = fem::run_single_element_traction(m, cfg.fem.traction_max, solver);
    control_name = "S_nominal";
  } else if (cfg.fem.problem == "single-element-displacement") {
    res = fem::run_single_element_displacement(m, cfg.fem.stretch_target, solver);
    control_name = "stretch";
  } else {
    res = fem::run_three_element_strip(m, cfg.fem.pull, solver, cfg.fem.clamp_driven_face);
    control_name = "pull";
  }

  const std::size_t nelem = res.history.empty() ? 0 : res.history.front().elements.size();
  std::vector<std::string> cols = {"increment",  "load_factor", "control",
                                   "lambda1",    "sigma11",     "max_le11",
                                   "min_margin", "max_bound",   "violated"};
  for (std::size_t e = 0; e < nelem; ++e) {
    const std::string p = "e" + std::to_string(e) + "_";
    cols.push_back(p + "max_le11");
    cols.push_back(p + "min_margin");
    cols.push_back(p + "pressure");
    cols.push_back(p + "violated");
  }
  CsvTable csv(cols);
  for (const fem::FemSample& s : res.history) {
    auto row = csv.row();
    const double control = control_name == "S_nominal" ? sc(s.control) : s.control;
    row << s.increment << s.load_factor << control << s.lambda1 << sc(s.sigma11)
        << s.max_le11 << s.min_margin << s.max_bound << s.violated;
    for (const fem::ElementSummary& es : s.elements)
      row << es.max_le11 << es.min_margin << sc(es.pressure) << es.violated;
  }
  const auto csv_path = out_dir / (cfg.output_name + ".csv");
  write_file(csv_path, csv.str());
  files.push_back(csv_path.string());

  const fem::FemSample& last = res.history.back();
  std::string rep;
  const auto kvline = [&rep](const std::string& k, const std::string& v) {
    rep += k + ": " + v + "\n";
  };
  kvline("case", cfg.output_name);
  kvline("model", std::string(to_string(m.kind())));
  kvline("mode", cfg.mode == EvalMode::Guarded ? "guarded" : "unguarded");
  kvline("problem", cfg.fem.problem);
  kvline("termination_reason", fem::to_string(res.termination.reason));
  kvline("termination_detail", res.termination.detail.empty() ? "-" : res.termination.detail);
  kvline("last_load_factor", format_double(res.termination.last_load_factor));
  kvline("increments", std::to_string(res.history.size() - 1));
  kvline("limiting_element", std::to_string(res.termination.limiting_element));
  kvline("limiting_margin", format_double(res.termination.limiting_margin));
  kvline("final_lambda1", format_double(last.lambda1));
  kvline("final_sigma11", format_double(sc(last.sigma11)));
  kvline("max_le11", format_double(last.max_le11));
  kvline("exp_max_le11", format_double(std::exp(last.max_le11)));
  kvline("max_bound_value", format_double(last.max_bound));
  kvline("min_locking_margin", format_double(last.min_margin));
  const auto rep_path = out_dir / (cfg.output_name + "_report.txt");
  write_file(rep_path, rep);
  files.push_back(rep_path.string());

  return "termination: " + std::string(fem::to_string(res.termination.reason)) +
         " at load factor " + format_double(res.termination.last_load_factor) + "\nwrote " +
         csv_path.string() + "\nwrote " + rep_path.string();
}

}  // namespace rundetail

/// Execute a validated run configuration, writing outputs under out_dir.
/// Stress-like outputs are nondimensional (per mu0) unless output_mu0
/// rescales them.
inline RunOutcome run_config(const RunConfig& cfg, const std::string& out_dir,
                             double output_mu0 = 1.0) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  RunOutcome outcome;
  switch (cfg.command) {
    case CommandKind::Sweep:
      outcome.summary = rundetail::run_sweep(cfg, out_dir, outcome.files, output_mu0);
      break;
    case CommandKind::Path:
      outcome.summary = rundetail::run_path(cfg, out_dir, outcome.files, output_mu0);
      break;
    case CommandKind::Surface:
      outcome.summary = rundetail::run_surface(cfg, out_dir, outcome.files, output_mu0);
      break;
    case CommandKind::Fem:
      outcome.summary = rundetail::run_fem(cfg, out_dir, outcome.files, output_mu0);
      break;
  }
  return outcome;
}

}  // namespace locklab
