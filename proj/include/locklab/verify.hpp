#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "locklab/cases.hpp"
#include "locklab/fem.hpp"
#include "locklab/homogeneous.hpp"
#include "locklab/paths.hpp"

namespace locklab {

struct CheckResult {
  int id = 0;
  std::string label;
  std::string expected;
  std::string got;
  std::string tolerance;
  bool pass = false;
};

namespace verify_detail {

inline InvariantSet state_at(double i1_bar) {
  InvariantSet inv;
  inv.I1_bar = i1_bar;
  inv.I2_bar = i1_bar;  // irrelevant for f = 0 energies
  return inv;
}

/// Largest relative mismatch between analytic invariant derivatives and
/// central finite differences, over n states away from the natural state
/// and the locking bound. The energy validates the first derivative and
/// the first-derivative field validates the second, so the chain is
/// anchored in W. tamper scales the analytic first derivative, so a value
/// != 1 must make the check fail (negative control).
inline double derivative_fd_error(const MaterialModel& m, int n, unsigned seed,
                                  double tamper = 1.0) {
  const LockingLimit lim = locking_limit(m);
  const double hi = lim.bounded() ? lim.limit - 0.25 : 30.0;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(3.05, hi);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = dist(rng);
    const EnergyEval ev = energy(m, state_at(x));
    const EnergyEval evp = energy(m, state_at(x + h));
    const EnergyEval evm = energy(m, state_at(x - h));
    const double fd1 = (evp.W - evm.W) / (2.0 * h);
    const double d1 = ev.dW_dI1 * tamper;
    if (d1 != 0.0) worst = std::max(worst, std::abs(fd1 - d1) / std::abs(d1));
    const double fd2 = (evp.dW_dI1 - evm.dW_dI1) / (2.0 * h);
    if (ev.d2W_dI1I1 != 0.0)
      worst = std::max(worst, std::abs(fd2 - ev.d2W_dI1I1) / std::abs(ev.d2W_dI1I1));
  }
  return worst;
}

/// Largest relative mismatch between the closed-form case responses and the
/// general energy-derivative stress route, over n random in-domain controls.
inline double closed_vs_general_error(const MaterialModel& m, CaseKind kind, int n,
                                      unsigned seed) {
  double lo = 0.0, hi = 0.0;
  const auto roots = asymptote(m, kind);
  if (kind == CaseKind::SimpleShear) {
    hi = roots.empty() ? 2.0 : 0.97 * roots[0];
    lo = -hi;
  } else {
    lo = roots.empty() ? 0.35 : 1.02 * roots[0];
    hi = roots.empty() ? 2.50 : 0.98 * roots[1];
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  double worst = 0.0;
  const auto rel = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };
  for (int i = 0; i < n; ++i) {
    const double c = dist(rng);
    const ResponseSample s = case_response(m, kind, c);
    const StressState st = cauchy_stress_general(m, case_def_grad(kind, c), 0.0);
    switch (kind) {
      case CaseKind::SimpleShear:
        // deviatoric convention: the general route with p = 0 is directly
        // comparable component by component
        worst = std::max(worst, rel(st.cauchy(0, 1), s.sigma12));
        worst = std::max(worst, rel(st.cauchy(0, 0), s.sigma11));
        worst = std::max(worst, rel(st.cauchy(1, 1), s.sigma22));
        worst = std::max(worst, rel(st.cauchy(2, 2), s.sigma33));
        break;
      case CaseKind::Uniaxial:
        // lateral faces traction-free: p = s22 eliminates the pressure
        worst = std::max(worst, rel(st.cauchy(0, 0) - st.cauchy(1, 1), s.sigma11));
        break;
      case CaseKind::Equibiaxial:
        worst = std::max(worst, rel(st.cauchy(0, 0) - st.cauchy(2, 2), s.sigma11));
        break;
    }
  }
  return worst;
}

inline double tangent_fd_error(const fem::FemProblem& problem, const fem::FemState& state) {
  const fem::Assembly a0 = fem::assemble(problem, state);
  const Eigen::MatrixXd k = Eigen::MatrixXd(a0.tangent);
  const int n = static_cast<int>(state.u.size());
  Eigen::MatrixXd kfd(n, n);
  const double h = 1e-7;
  for (int d = 0; d < n; ++d) {
    fem::FemState sp = state, sm = state;
    sp.u[d] += h;
    sm.u[d] -= h;
    kfd.col(d) = (fem::assemble(problem, sp).f_int - fem::assemble(problem, sm).f_int) /
                 (2.0 * h);
  }
  return (k - kfd).cwiseAbs().maxCoeff() / kfd.cwiseAbs().maxCoeff();
}

inline std::string fmt(double v) { return format_double(v); }

inline CheckResult make(int id, const std::string& label, const std::string& expected,
                        const std::string& got, const std::string& tol, bool pass) {
  return CheckResult{id, label, expected, got, tol, pass};
}

}  // namespace verify_detail

/// Run the acceptance suite. Each entry prints as one pass/fail line; all
/// tolerances are fixed here.
inline std::vector<CheckResult> run_acceptance_checks() {
  using namespace verify_detail;
  std::vector<CheckResult> out;
  const double mu0 = 1.0;

  // 1. locking-stretch placement: analytic uniaxial root and the guarded
  //    single-element runs against the plane-strain bound.
  {
    const MaterialModel kil = MaterialModel::kilian(mu0, 5.0);
    const double uni_root = asymptote(kil, CaseKind::Uniaxial)[1];
    const double ps_root =
        bisect([](double l) { return l * l + 1.0 / (l * l) + 1.0 - 25.0; }, 1.0, 6.0);
    bool pass = std::abs(uni_root - 4.96) <= 0.01;

    const RunConfig fig51 = find_case("fig5-1")->config;
    const RunConfig fig52 = find_case("fig5-2")->config;
    fem::SolverConfig s1 = fig51.solver;
    const auto r1 = fem::run_single_element_traction(fig51.model.build(),
                                                     fig51.fem.traction_max, s1);
    const auto r2 = fem::run_single_element_displacement(fig52.model.build(),
                                                         fig52.fem.stretch_target,
                                                         fig52.solver);
    const double l1 = r1.history.back().lambda1;
    const double l2 = r2.history.back().lambda1;
    const bool in1 = l1 >= 0.98 * ps_root && l1 <= ps_root;
    const bool in2 = l2 >= 0.98 * ps_root && l2 <= ps_root;
    pass = pass && in1 && in2;
    out.push_back(make(
        1,
        "kilian a=5 locking stretch: uniaxial root vs the quoted 4.96; guarded "
        "single-element runs end within 2% below the applicable bound (candidates: "
        "uniaxial " +
            fmt(uni_root) + ", plane-strain " + fmt(ps_root) +
            "; the plane-strain one governs these boundary conditions)",
        "uniaxial root = 4.96; last stretches in [" + fmt(0.98 * ps_root) + ", " +
            fmt(ps_root) + "]",
        "|root - 4.96| = " + fmt(std::abs(uni_root - 4.96)) + "; traction run " + fmt(l1) +
            "; displacement run " + fmt(l2),
        "+-0.01 on the root; 2% window on the runs", pass));
  }

  // 2. bifurcation load of the dead-load cube.
  {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(1.0 + 1e-4 * std::pow(2.0, k));
    bool pass = true;
    std::string got;
    for (const MaterialModel& m :
         {MaterialModel::neo_hookean(mu0), MaterialModel::gent(mu0, 5.0),
          MaterialModel::kilian(mu0, 5.0)}) {
      const EquilibriumCurve nontrivial = cube_nontrivial_path(m, grid);
      const EquilibriumCurve trivial = cube_trivial_path(m, {0.0, 2.0 * mu0});
      const BifurcationPoint bp = bifurcation_detect(trivial, nontrivial);
      const double rel = std::abs(bp.S_star - 2.0 * mu0) / (2.0 * mu0);
      pass = pass && rel <= 1e-6;
      got += std::string(to_string(m.kind())) + " S* = " + fmt(bp.S_star) + "  ";
    }
    out.push_back(make(2, "equibiaxial dead-load cube: non-trivial branch intercept",
                       "S* = 2 mu0 for all three models", got, "1e-6 relative", pass));
  }

  // 3. three-element strip: guarded stops with one locked element at the
  //    plane-strain locking stretch; unguarded converges past the bound.
  {
    const RunConfig fig53 = find_case("fig5-3")->config;
    const MaterialModel m = fig53.model.build();
    const auto rg = fem::run_three_element_strip(m, fig53.fem.pull, fig53.solver,
                                                 fig53.fem.clamp_driven_face);
    const double expmax = std::exp(rg.history.back().max_le11);
    int locked = 0;
    for (const auto& es : rg.history.back().elements)
      if (es.min_margin < 0.01 * (9.0 - 3.0)) ++locked;
    const bool guard_ok = rg.termination.reason == fem::TerminationReason::LockingLimit &&
                          expmax >= 2.73 && expmax <= 2.83 && locked == 1;

    fem::SolverConfig unguarded = fig53.solver;
    unguarded.locking_mode = EvalMode::Unguarded;
    const auto ru = fem::run_three_element_strip(m, fig53.fem.pull, unguarded,
                                                 fig53.fem.clamp_driven_face);
    double max_bound = 0.0;
    for (const auto& s : ru.history) max_bound = std::max(max_bound, s.max_bound);
    const bool unguard_ok = max_bound > 9.0;

    out.push_back(make(3,
                       "three-element strip, kilian a=3: guarded run stops when one "
                       "element reaches its bound; unguarded run violates it",
                       "exp(max LE11) in [2.73, 2.83], exactly 1 locked element; "
                       "unguarded mixed invariant > 9",
                       "exp(max LE11) = " + fmt(expmax) + ", locked = " +
                           std::to_string(locked) + ", unguarded max = " + fmt(max_bound),
                       "interval check", guard_ok && unguard_ok));
  }

  // 4. closed-form responses agree with the general energy-derivative route.
  {
    bool pass = true;
    double worst = 0.0;
    unsigned seed = 42;
    for (const MaterialModel& m :
         {MaterialModel::neo_hookean(mu0), MaterialModel::gent(mu0, 5.0),
          MaterialModel::kilian(mu0, 5.0)}) {
      for (CaseKind kind :
           {CaseKind::SimpleShear, CaseKind::Uniaxial, CaseKind::Equibiaxial}) {
        worst = std::max(worst, closed_vs_general_error(m, kind, 1000, seed++));
      }
    }
    pass = worst <= 1e-10;
    out.push_back(make(4,
                       "closed-form shear/uniaxial/biaxial responses vs general stress "
                       "evaluation (1000 random in-domain samples per case per model)",
                       "agreement", "max relative mismatch = " + fmt(worst),
                       "1e-10 relative", pass));
  }

  // 5. derivative, tangent and Newton consistency.
  {
    double fd_worst = 0.0;
    unsigned seed = 7;
    for (const MaterialModel& m :
         {MaterialModel::neo_hookean(mu0), MaterialModel::gent(mu0, 5.0),
          MaterialModel::kilian(mu0, 5.0)})
      fd_worst = std::max(fd_worst, derivative_fd_error(m, 1000, seed++));

    fem::SolverConfig cfg;
    const auto problem =
        fem::make_single_element_displacement(MaterialModel::kilian(mu0, 5.0), 2.0, cfg);
    fem::FemState st = problem.initial_state();
    fem::solve_increment(problem, st, 1.0);
    const double tan_err = tangent_fd_error(problem, st);

    fem::SolverConfig ncfg;
    ncfg.kappa = 1e3;  // mild penalty keeps the deviatoric nonlinearity visible
    ncfg.newton_tol = 1e-12;
    ncfg.initial_increment = ncfg.max_increment = 1.0;
    ncfg.min_increment = 0.5;
    const auto nh_problem =
        fem::make_single_element_displacement(MaterialModel::neo_hookean(mu0), 2.2, ncfg);
    fem::FemState nst = nh_problem.initial_state();
    const auto rep = fem::solve_increment(nh_problem, nst, 1.0);
    bool quad = rep.converged && rep.iterations <= 8;
    bool quad_pair = false;
    for (std::size_t i = 0; i + 1 < rep.residual_norms.size(); ++i) {
      const double r0 = rep.residual_norms[i];
      const double r1 = rep.residual_norms[i + 1];
      if (r0 < 1e-2 && r0 > 1e-9 && r1 <= 50.0 * std::pow(r0, 1.9)) quad_pair = true;
    }
    quad = quad && quad_pair;

    const bool pass = fd_worst <= 1e-6 && tan_err <= 1e-4 && quad;
    out.push_back(make(5,
                       "energy derivatives vs finite differences; assembled tangent vs "
                       "finite-difference residual Jacobian; Newton convergence order",
                       "1e-6 / 1e-4 / quadratic tail",
                       "derivative error = " + fmt(fd_worst) + ", tangent error = " +
                           fmt(tan_err) + ", newton iterations = " +
                           std::to_string(rep.iterations),
                       "as stated", pass));
  }

  // 6. locking families recover the neo-Hookean energy as a grows.
  {
    const InvariantSet probe = invariants(DefGrad::simple_shear(1.0));  // I1_bar = 4
    const double w_nh = energy(MaterialModel::neo_hookean(mu0), probe).W;
    bool pass = true;
    std::string got;
    double prev_gent = 0.0, prev_kil = 0.0;
    int idx = 0;
    for (double a : {1e2, 1e4, 1e6}) {
      const double taylor = 1.1 / (2.0 * a);
      const double eg = std::abs(energy(MaterialModel::gent(mu0, a), probe).W - w_nh);
      const double ek = std::abs(energy(MaterialModel::kilian(mu0, a), probe).W - w_nh);
      pass = pass && eg <= taylor && ek <= taylor;
      if (idx > 0) pass = pass && eg < prev_gent && ek < prev_kil;
      prev_gent = eg;
      prev_kil = ek;
      ++idx;
      got += "a=" + fmt(a) + ": gent " + fmt(eg) + ", kilian " + fmt(ek) + "  ";
    }
    out.push_back(make(6, "neo-Hookean limit of the locking families at I1_bar = 4",
                       "|W - mu0/2| within the Taylor remainder bound, decreasing in a",
                       got, "1.1/(2a)", pass));
  }

  // 7. guarded invariant: converged states stay strictly inside the domain;
  //    guarded and unguarded histories coincide while in-domain.
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool pass = true;
    for (int trial = 0; trial < 6; ++trial) {
      const MaterialModel m = (trial % 2 == 0)
                                  ? MaterialModel::gent(mu0, 4.0 + 2.0 * u01(rng))
                                  : MaterialModel::kilian(mu0, 3.0 + 2.0 * u01(rng));
      fem::SolverConfig cfg;
      cfg.initial_increment = 0.02;
      fem::FemRunResult r;
      if (trial < 2)
        r = fem::run_single_element_traction(m, 0.5 + 1.5 * u01(rng), cfg);
      else if (trial < 4)
        r = fem::run_single_element_displacement(m, 1.3 + 0.6 * u01(rng), cfg);
      else
        r = fem::run_three_element_strip(m, 0.5 + 1.0 * u01(rng), cfg);
      for (const auto& s : r.history) pass = pass && s.min_margin > 0.0;
    }

    const MaterialModel m = MaterialModel::kilian(mu0, 5.0);
    fem::SolverConfig g;
    g.initial_increment = 0.02;
    fem::SolverConfig u = g;
    u.locking_mode = EvalMode::Unguarded;
    const auto rg = fem::run_single_element_displacement(m, 1.6, g);
    const auto ru = fem::run_single_element_displacement(m, 1.6, u);
    bool same = rg.history.size() == ru.history.size();
    double dev = 0.0;
    if (same)
      for (std::size_t i = 0; i < rg.history.size(); ++i) {
        dev = std::max(dev, std::abs(rg.history[i].lambda1 - ru.history[i].lambda1));
        dev = std::max(dev, std::abs(rg.history[i].sigma11 - ru.history[i].sigma11));
      }
    pass = pass && same && dev <= 1e-10;
    out.push_back(make(7,
                       "guarded runs never hold an out-of-domain quadrature point "
                       "(randomized ramps); modes agree while in-domain",
                       "all margins > 0; identical in-domain histories",
                       std::string("margins ok = ") + (pass ? "yes" : "no") +
                           ", mode deviation = " + fmt(dev),
                       "exact / 1e-10", pass));
  }

  // 8. unguarded displacement run continues past the locking stretch with
  //    flagged samples.
  {
    const RunConfig fig52 = find_case("fig5-2")->config;
    fem::SolverConfig u = fig52.solver;
    u.locking_mode = EvalMode::Unguarded;
    const auto r = fem::run_single_element_displacement(fig52.model.build(),
                                                        fig52.fem.stretch_target, u);
    int beyond = 0;
    bool flagged = true;
    for (const auto& s : r.history)
      if (s.lambda1 > 4.96) {
        ++beyond;
        flagged = flagged && s.violated;
      }
    const bool pass = beyond > 0 && flagged;
    out.push_back(make(8,
                       "unguarded displacement run skips the locking stretch and "
                       "continues with flagged samples",
                       "converged samples with stretch > 4.96, all flagged",
                       std::to_string(beyond) + " samples beyond, flags " +
                           (flagged ? "set" : "missing"),
                       "existence", pass));
  }

  return out;
}

}  // namespace locklab
