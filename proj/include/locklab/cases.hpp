#pragma once

#include <string>
#include <vector>

#include "locklab/config.hpp"
#include "locklab/homogeneous.hpp"

namespace locklab {

struct CaseLibraryEntry {
  std::string name;
  std::string description;
  RunConfig config;
};

namespace casedetail {

inline ModelConfig kilian_cfg(double a, double mu0 = 1.0) {
  ModelConfig m;
  m.kind = "kilian";
  m.mu0 = mu0;
  m.a = a;
  m.has_a = true;
  return m;
}

inline ModelConfig gent_cfg(double a, double mu0 = 1.0) {
  ModelConfig m;
  m.kind = "gent";
  m.mu0 = mu0;
  m.a = a;
  m.has_a = true;
  return m;
}

// Sweep ranges stop 2% short of each locking asymptote.
inline void set_sweep_ranges(RunConfig& cfg) {
  const MaterialModel m = cfg.model.build();
  const auto shear = asymptote(m, CaseKind::SimpleShear);
  const auto uni = asymptote(m, CaseKind::Uniaxial);
  const auto bi = asymptote(m, CaseKind::Equibiaxial);
  cfg.sweep.shear_range = {0.0, 0.98 * shear[0], true};
  cfg.sweep.uniaxial_range = {1.02 * uni[0], 0.98 * uni[1], true};
  cfg.sweep.biaxial_range = {1.02 * bi[0], 0.98 * bi[1], true};
}

inline fem::SolverConfig single_element_solver() {
  fem::SolverConfig s;
  s.kappa = 1e9;
  s.newton_tol = 1e-6;
  s.initial_increment = 1e-4;
  s.min_increment = 1e-10;
  s.max_increment = 0.02;
  s.stop_margin_fraction = 1e-3;
  return s;
}

inline std::vector<CaseLibraryEntry> build_library() {
  std::vector<CaseLibraryEntry> lib;

  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Surface;
    c.surface = {0.2, 3.0, 141};
    c.output_name = "fig3-1";
    lib.push_back({"fig3-1", "stored-energy contour grid, Kilian a=5", c});
  }
  {
    RunConfig c;
    c.model = gent_cfg(5.0);
    c.command = CommandKind::Sweep;
    c.sweep.kinds = {CaseKind::Uniaxial, CaseKind::Equibiaxial, CaseKind::SimpleShear};
    c.sweep.steps = 240;
    c.sweep.include_neo_hookean = true;
    set_sweep_ranges(c);
    c.output_name = "fig4-1";
    lib.push_back(
        {"fig4-1", "uniaxial/biaxial/shear stress curves, Gent a=5 vs neo-Hookean", c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Sweep;
    c.sweep.kinds = {CaseKind::Uniaxial, CaseKind::Equibiaxial, CaseKind::SimpleShear};
    c.sweep.steps = 240;
    c.sweep.include_neo_hookean = true;
    set_sweep_ranges(c);
    c.output_name = "fig4-2";
    lib.push_back(
        {"fig4-2", "uniaxial/biaxial/shear stress curves, Kilian a=5 vs neo-Hookean", c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Path;
    c.path = {"cube", 1.0 + 1e-4, 3.0, 140, true};
    c.output_name = "fig4-3";
    lib.push_back({"fig4-3",
                   "dead-load cube equilibrium branches and bifurcation, Kilian a=5 vs "
                   "neo-Hookean",
                   c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Path;
    // plane-strain locking stretch: lambda^2 + 1/lambda^2 + 1 = a^2
    const double lock = bisect([](double l) { return l * l + 1.0 / (l * l) + 1.0 - 25.0; },
                               1.0, 6.0);
    c.path = {"block", 0.5, 0.98 * lock, 160, true};
    c.output_name = "fig4-4";
    lib.push_back({"fig4-4",
                   "plane-strain block stress-stretch path, Kilian a=5 vs neo-Hookean", c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Fem;
    c.fem.problem = "single-element-traction";
    c.fem.traction_max = 20000.0;
    c.solver = single_element_solver();
    c.output_name = "fig5-1";
    lib.push_back({"fig5-1",
                   "single element under prescribed dead-load traction, Kilian a=5", c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(5.0);
    c.command = CommandKind::Fem;
    c.fem.problem = "single-element-displacement";
    c.fem.stretch_target = 6.0;
    c.solver = single_element_solver();
    c.output_name = "fig5-2";
    lib.push_back({"fig5-2",
                   "single element under prescribed displacement, Kilian a=5", c});
  }
  {
    RunConfig c;
    c.model = kilian_cfg(3.0);
    c.command = CommandKind::Fem;
    c.fem.problem = "three-element-strip";
    c.fem.pull = 7.0;
    c.fem.clamp_driven_face = true;
    c.solver.kappa = 1e8;
    c.solver.newton_tol = 1e-7;
    c.solver.initial_increment = 2e-3;
    c.solver.min_increment = 1e-8;
    c.solver.max_increment = 0.01;
    c.solver.stop_margin_fraction = 1e-4;
    c.output_name = "fig5-3";
    lib.push_back({"fig5-3",
                   "three-element strip with nonhomogeneous locking, Kilian a=3", c});
  }
  for (CaseLibraryEntry& e : lib) e.config.solver.locking_mode = e.config.mode;
  return lib;
}

}  // namespace casedetail

inline const std::vector<CaseLibraryEntry>& case_library() {
  static const std::vector<CaseLibraryEntry> lib = casedetail::build_library();
  return lib;
}

inline const CaseLibraryEntry* find_case(const std::string& name) {
  for (const CaseLibraryEntry& e : case_library())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace locklab
