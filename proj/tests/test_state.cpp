#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mpnsch/errors.hpp"
#include "mpnsch/grid.hpp"
#include "mpnsch/state.hpp"

using namespace mpnsch;

namespace {

PhysParams params_with_rho(double rho1, double rho2, double delta = 0.1) {
  PhysParams p;
  p.rho1 = rho1;
  p.rho2 = rho2;
  p.delta_rho = delta;
  return p;
}

// Independent reconstruction of the density extension: integrate the
// documented derivative profile rho'(phi) = slope*(1 - S(t)),
// S(t) = 3t^2 - 2t^3, with composite Simpson from the saturation point.
double rho_by_quadrature(double phi, const PhysParams& p) {
  const double mid = 0.5 * (p.rho1 + p.rho2);
  const double slope = 0.5 * (p.rho1 - p.rho2);
  const double a = std::fabs(phi);
  if (a <= 1.0) return mid + slope * phi;
  const double contrast = std::fabs(slope);
  const double d = contrast == 0.0
                       ? p.delta_rho
                       : std::min(p.delta_rho,
                                  std::min(p.rho1, p.rho2) / (2.0 * contrast));
  auto drho = [&](double s) {
    const double t = std::min((s - 1.0) / d, 1.0);
    return slope * (1.0 - (3.0 * t * t - 2.0 * t * t * t));
  };
  // The derivative vanishes past 1 + d; stop there so the integrand stays a
  // polynomial and Simpson is exact.
  const double b = std::min(a, 1.0 + d);
  const int n = 4000;  // Simpson panels over [1, b]
  const double hq = (b - 1.0) / (2 * n);
  double acc = drho(1.0) + drho(b);
  for (int k = 1; k < 2 * n; ++k)
    acc += (k % 2 ? 4.0 : 2.0) * drho(1.0 + k * hq);
  const double tail = acc * hq / 3.0;
  const double sign = (phi > 0.0) ? 1.0 : -1.0;
  return mid + slope * sign + sign * tail;
}

}  // namespace

TEST_CASE("density: affine on [-1,1] with constant derivative") {
  const PhysParams p = params_with_rho(3.0, 1.0);
  CHECK(density(1.0, p).rho == 3.0);
  CHECK(density(-1.0, p).rho == 1.0);
  CHECK(density(0.0, p).rho == 2.0);
  for (double phi = -1.0; phi <= 1.0; phi += 0.125)
    CHECK(density(phi, p).drho == 1.0);
}

TEST_CASE("density: extension matches the documented blend") {
  const PhysParams p = params_with_rho(3.0, 1.0);
  // Frozen value of the closed-form blend at phi = 1.05 (t = 1/2).
  CHECK(density(1.05, p).rho == doctest::Approx(3.040625).epsilon(1e-14));
  // Quadrature of the documented derivative profile reproduces the values.
  for (double phi : {1.01, 1.05, 1.099, 1.2, 2.0, -1.03, -1.7}) {
    CHECK(density(phi, p).rho ==
          doctest::Approx(rho_by_quadrature(phi, p)).epsilon(1e-10));
  }
  // Strong contrast shrinks the blend width; quadrature still agrees.
  const PhysParams q = params_with_rho(10.0, 0.1, 0.5);
  for (double phi : {1.001, 1.004, 1.2, -1.002, -3.0})
    CHECK(density(phi, q).rho ==
          doctest::Approx(rho_by_quadrature(phi, q)).epsilon(1e-10));
}

TEST_CASE("density: C2 junctions and global floor") {
  for (const PhysParams& p :
       {params_with_rho(3.0, 1.0), params_with_rho(10.0, 0.1, 0.5),
        params_with_rho(1.0, 2.5, 0.3)}) {
    const double contrast = 0.5 * std::fabs(p.rho1 - p.rho2);
    const double d =
        std::min(p.delta_rho, std::min(p.rho1, p.rho2) / (2.0 * contrast));
    for (double x0 : {1.0, -1.0, 1.0 + d, -(1.0 + d)}) {
      // Value/slope consistency: central difference with step 1e-6 picks up
      // any kink at O(jump); C1 smoothness leaves O(delta^2 rho'').
      const double dd = 1e-6;
      const double fp = density(x0 + dd, p).rho;
      const double fm = density(x0 - dd, p).rho;
      CHECK(std::fabs(fp - fm - 2.0 * dd * density(x0, p).drho) < 1e-10);
      // rho'' vanishes at both junctions (Hermite blend); the probe at step
      // 1e-4 must stay within the cubic's interior curvature growth.
      const double D = 1e-4;
      const double est =
          (density(x0 + D, p).drho - density(x0 - D, p).drho) / (2.0 * D);
      const double slope = 0.5 * std::fabs(p.rho1 - p.rho2);
      CHECK(std::fabs(est) <= 4.0 * slope * D / (d * d) + 1e-9);
    }
    // Floor rho >= min(rho1,rho2)/2 on a dense scan.
    const double floor = density_floor(p);
    CHECK(floor == 0.5 * std::min(p.rho1, p.rho2));
    for (int i = -3000; i <= 3000; ++i) {
      const Density r = density(i * 1e-3, p);
      CHECK(r.rho >= floor - 1e-14);
      CHECK(std::isfinite(r.drho));
    }
  }
}

TEST_CASE("density: matched endpoints give a constant") {
  const PhysParams p = params_with_rho(2.0, 2.0);
  for (int i = -3000; i <= 3000; i += 7) {
    const Density r = density(i * 1e-3, p);
    CHECK(r.rho == 2.0);
    CHECK(r.drho == 0.0);
  }
}

TEST_CASE("coefficient interpolation: endpoints, midpoint, bounds") {
  const EndpointPair a{5.0, 2.0};
  CHECK(interpolate_coeff(1.0, a) == 5.0);
  CHECK(interpolate_coeff(-1.0, a) == 2.0);
  CHECK(interpolate_coeff(0.0, a) == doctest::Approx(3.5).epsilon(1e-14));
  // Clamped outside [-1,1]; inside it stays within the endpoint bracket.
  CHECK(interpolate_coeff(2.0, a) == 5.0);
  CHECK(interpolate_coeff(-7.5, a) == 2.0);
  for (int i = -1500; i <= 1500; ++i) {
    const double v = interpolate_coeff(i * 1e-3, a);
    CHECK(v <= 5.0 + 1e-14);
    CHECK(v >= 2.0 - 1e-14);
  }
  // Monotone for increasing phi when f1 > f2.
  double prev = interpolate_coeff(-1.0, a);
  for (int i = -999; i <= 1000; ++i) {
    const double v = interpolate_coeff(i * 1e-3, a);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
}

TEST_CASE("Eringen admissibility report") {
  CHECK(eringen_check(1.0, 1.0, 1.0).valid);
  CHECK(eringen_check(0.0, 0.0, 0.0).valid);
  const EringenReport bad = eringen_check(0.0, 1.0, -2.0);
  CHECK_FALSE(bad.valid);
  CHECK(bad.violations.size() == 2);
  // cd < 0 trips both the sign condition and the derived ones.
  CHECK_FALSE(eringen_check(1.0, -1.0, 1.0).valid);
}

TEST_CASE("parameter validation lists every violation") {
  PhysParams ok;
  CHECK_NOTHROW(ok.validate());

  PhysParams bad;
  bad.eta = {0.0, 1.0};          // below the positivity window
  bad.cd = {1.0, 1.0};
  bad.ca = {-2.0, -2.0};         // Eringen violations at both endpoints
  bad.q = 3.0;                   // growth exponent too small
  bad.h = -1.0;
  try {
    bad.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems.size() >= 4);
    bool mentions_eringen = false;
    for (const auto& s : e.problems)
      if (s.find("Eringen") != std::string::npos) mentions_eringen = true;
    CHECK(mentions_eringen);
  }

  PhysParams hot;
  hot.pot = SplitPotential::logarithmic(1.5, 1.0);  // theta >= theta_c
  CHECK_THROWS_AS(hot.validate(), ValidationError);
  PhysParams obs;
  obs.pot = SplitPotential::obstacle(1.0);  // theta unused for obstacle
  CHECK_NOTHROW(obs.validate());
}

TEST_CASE("mixture state allocation matches the grid") {
  const Grid g = Grid::make(2.0, 1.0, 12, 6);
  const MixtureState s = MixtureState::make(g);
  CHECK(static_cast<int>(s.u.x.size()) == g.xfaces());
  CHECK(static_cast<int>(s.u.y.size()) == g.yfaces());
  CHECK(static_cast<int>(s.p.size()) == g.cells());
  CHECK(static_cast<int>(s.omega.size()) == g.cells());
  CHECK(static_cast<int>(s.phi.size()) == g.cells());
  CHECK(static_cast<int>(s.mu.size()) == g.cells());
  CHECK(static_cast<int>(s.psi_bottom.v.size()) == g.nx);
  CHECK(s.psi_bottom.wall == Wall::Bottom);
  CHECK(s.psi_top.wall == Wall::Top);
  CHECK(static_cast<int>(s.xi.size()) == g.cells());
  CHECK(static_cast<int>(s.xi_top.v.size()) == g.nx);
}
