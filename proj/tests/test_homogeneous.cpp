#include <catch2/catch_amalgamated.hpp>

#include "locklab/homogeneous.hpp"
#include "locklab/verify.hpp"
#include "test_support.hpp"

using namespace locklab;
using Catch::Approx;

TEST_CASE("zero control gives zero stress") {
  for (const MaterialModel& m :
       {MaterialModel::neo_hookean(1.0), MaterialModel::gent(1.0, 5.0),
        MaterialModel::kilian(1.0, 5.0)}) {
    const ResponseSample sh = shear_response(m, 0.0);
    CHECK(sh.sigma12 == Approx(0.0).margin(1e-15));
    CHECK(sh.sigma11 == Approx(0.0).margin(1e-15));
    CHECK(uniaxial_response(m, 1.0).sigma11 == Approx(0.0).margin(1e-14));
    CHECK(biaxial_response(m, 1.0).sigma11 == Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("shear closed forms") {
  const ResponseSample gent = shear_response(MaterialModel::gent(1.0, 5.0), 1.0);
  CHECK(gent.sigma12 == Approx(1.25).epsilon(1e-14));
  CHECK(gent.sigma11 == Approx(2.0 / 3.0 * 1.25).epsilon(1e-13));
  CHECK(gent.sigma11 + gent.sigma22 + gent.sigma33 == Approx(0.0).margin(1e-14));

  const ResponseSample kil = shear_response(MaterialModel::kilian(1.0, 3.0), 1.0);
  CHECK(kil.sigma12 == Approx(1.0 / (1.0 - 1.0 / std::sqrt(6.0))).epsilon(1e-13));
}

TEST_CASE("uniaxial and biaxial closed forms match the general route") {
  const MaterialModel gent = MaterialModel::gent(1.0, 5.0);
  {
    const ResponseSample s = uniaxial_response(gent, 2.0);
    const StressState st = cauchy_stress_general(gent, DefGrad::uniaxial(2.0), 0.0);
    CHECK(s.sigma11 == Approx(st.cauchy(0, 0) - st.cauchy(1, 1)).epsilon(1e-12));
  }
  {
    const ResponseSample s = biaxial_response(gent, 1.5);
    const StressState st = cauchy_stress_general(gent, DefGrad::equibiaxial(1.5), 0.0);
    CHECK(s.sigma11 == Approx(st.cauchy(0, 0) - st.cauchy(2, 2)).epsilon(1e-12));
    CHECK(s.sigma22 == Approx(s.sigma11));
  }
}

TEST_CASE("closed forms agree with the general evaluation oracle") {
  unsigned seed = 1001;
  for (const MaterialModel& m :
       {MaterialModel::neo_hookean(1.0), MaterialModel::gent(1.0, 5.0),
        MaterialModel::kilian(1.0, 5.0)}) {
    for (CaseKind kind :
         {CaseKind::SimpleShear, CaseKind::Uniaxial, CaseKind::Equibiaxial}) {
      CHECK(verify_detail::closed_vs_general_error(m, kind, 300, seed++) <= 1e-10);
    }
  }
}

TEST_CASE("closed forms require the invariant-mixing-free parameter set") {
  CHECK_THROWS_AS(shear_response(MaterialModel::kilian(1.0, 5.0, 0.3, 0.0), 0.5),
                  ParameterError);
  CHECK_THROWS_AS(uniaxial_response(MaterialModel::kilian(1.0, 5.0, 0.0, 0.2), 1.2),
                  ParameterError);
}

TEST_CASE("asymptote placement") {
  const MaterialModel gent = MaterialModel::gent(1.0, 5.0);
  const MaterialModel kil = MaterialModel::kilian(1.0, 5.0);

  CHECK(asymptote(gent, CaseKind::SimpleShear)[0] == Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(asymptote(kil, CaseKind::SimpleShear)[0] == Approx(std::sqrt(22.0)).epsilon(1e-12));

  const auto uni = asymptote(kil, CaseKind::Uniaxial);
  REQUIRE(uni.size() == 2);
  CHECK(uni[0] < 1.0);
  CHECK(uni[1] == Approx(4.9595094830813389).epsilon(1e-10));
  CHECK(std::abs(4.96 - uni[1]) <= 0.01 * uni[1]);  // the quoted 4.96 value
  // roots satisfy the bounding constraint (bisection resolves the control
  // to 1e-12; the constraint slope is about ten)
  for (double r : uni) CHECK(case_i1_bar(CaseKind::Uniaxial, r) == Approx(25.0).margin(1e-10));

  // biaxial root against an independent bisection on the constraint
  const auto bi = asymptote(kil, CaseKind::Equibiaxial);
  const double oracle = bisect(
      [](double l) { return 2.0 * l * l + 1.0 / std::pow(l, 4) - 25.0; }, 1.0, 5.0);
  CHECK(bi[1] == Approx(oracle).epsilon(1e-12));

  CHECK(asymptote(MaterialModel::neo_hookean(1.0), CaseKind::Uniaxial).empty());
}

TEST_CASE("stress diverges monotonically toward each asymptote") {
  for (const MaterialModel& m :
       {MaterialModel::gent(1.0, 5.0), MaterialModel::kilian(1.0, 5.0)}) {
    for (CaseKind kind :
         {CaseKind::SimpleShear, CaseKind::Uniaxial, CaseKind::Equibiaxial}) {
      const auto roots = asymptote(m, kind);
      const double star = roots.back();
      const double base = kind == CaseKind::SimpleShear ? 0.0 : 1.0;
      double prev = 0.0;
      for (int k = 1; k <= 8; ++k) {
        const double control = star - (star - base) * std::pow(10.0, -k);
        const ResponseSample s = case_response(m, kind, control);
        const double mag = std::abs(kind == CaseKind::SimpleShear ? s.sigma12 : s.sigma11);
        CHECK(mag > prev);
        prev = mag;
      }
      CHECK(prev > 1e3);
    }
  }
}

TEST_CASE("large locking parameters recover the neo-Hookean response") {
  const MaterialModel nh = MaterialModel::neo_hookean(1.0);
  for (const MaterialModel& m :
       {MaterialModel::gent(1.0, 1e6), MaterialModel::kilian(1.0, 1e6)}) {
    CHECK(shear_response(m, 2.0).sigma12 ==
          Approx(shear_response(nh, 2.0).sigma12).epsilon(1e-4));
    CHECK(uniaxial_response(m, 2.5).sigma11 ==
          Approx(uniaxial_response(nh, 2.5).sigma11).epsilon(1e-4));
    CHECK(biaxial_response(m, 1.6).sigma11 ==
          Approx(biaxial_response(nh, 1.6).sigma11).epsilon(1e-4));
  }
}

TEST_CASE("shear response symmetry") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  const MaterialModel m = MaterialModel::gent(1.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double g = dist(rng);
    const ResponseSample plus = shear_response(m, g);
    const ResponseSample minus = shear_response(m, -g);
    CHECK(minus.sigma12 == Approx(-plus.sigma12).margin(1e-14));
    CHECK(minus.sigma11 == Approx(plus.sigma11).margin(1e-14));
  }
}

TEST_CASE("guarded mode rejects controls at or past the asymptote") {
  const MaterialModel gent = MaterialModel::gent(1.0, 5.0);
  const double star = asymptote(gent, CaseKind::SimpleShear)[0];
  CHECK_THROWS_AS(shear_response(gent, star * 1.01), LockingViolation);
  const ResponseSample s = shear_response(gent, star * 1.01, EvalMode::Unguarded);
  CHECK(s.at_asymptote);
  CHECK(s.locking_margin < 0.0);
  CHECK(std::isfinite(s.sigma12));
}

TEST_CASE("energy surface values, symmetry and mask boundary") {
  const MaterialModel kil = MaterialModel::kilian(1.0, 5.0);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.2 + i * (3.0 - 0.2) / 40.0);
  const EnergySurface surf = energy_surface(kil, grid, grid);
  const std::size_t n = grid.size();

  const auto at = [&](std::size_t i, std::size_t j) { return surf.energy[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = at(i, j);
      const double wt = at(j, i);
      if (std::isnan(w)) {
        CHECK(std::isnan(wt));
        CHECK(surf.in_domain[i * n + j] == 0);
      } else {
        CHECK(w == Approx(wt).margin(1e-12));
        // the mask mirrors the sign of the locking margin
        const double i1 = grid[i] * grid[i] + grid[j] * grid[j] +
                          1.0 / (grid[i] * grid[i] * grid[j] * grid[j]);
        CHECK(surf.in_domain[i * n + j] == (i1 < 25.0 ? 1 : 0));
      }
    }
  // W(1,1) = 0 (grid contains no exact 1.0; evaluate directly)
  const EnergySurface one = energy_surface(kil, {1.0}, {1.0});
  CHECK(one.energy[0] == Approx(0.0).margin(1e-14));

  // mask boundary along a ray ends exactly on the bounding level set
  const auto margin_on_ray = [&](double t) {
    const double l1 = 1.0 + t * 1.9;
    const double l2 = 1.0 + t * 0.4;
    const InvariantSet inv = invariants_from_stretches(l1, l2, 1.0 / (l1 * l2));
    return 25.0 - energy(kil, inv).bound_value;
  };
  const double t_star = bisect(margin_on_ray, 0.0, 3.0, 1e-15);
  CHECK(margin_on_ray(t_star) == Approx(0.0).margin(1e-9));
}
