#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mpnsch/errors.hpp"
#include "mpnsch/potentials.hpp"

using namespace mpnsch;

namespace {

// Closed forms recomputed here, independent of the library implementation.
double f0(double s) {
  return (1.0 + s) * std::log(1.0 + s) + (1.0 - s) * std::log(1.0 - s);
}
double df0(double s) { return std::log((1.0 + s) / (1.0 - s)); }
double ddf0(double s) { return 2.0 / (1.0 - s * s); }
double dddf0(double s) {
  const double w = 1.0 - s * s;
  return 4.0 * s / (w * w);
}

// Quadratic continuation of f0 past c = 1 - kappa, from the documented
// construction (value/slope/curvature matched at the switch).
double f0_quad(double s, double kappa) {
  const double c = 1.0 - kappa;
  const double d = std::fabs(s) - c;
  return f0(c) + df0(c) * d + 0.5 * ddf0(c) * d * d;
}

}  // namespace

TEST_CASE("logarithmic potential: closed-form values and derivatives") {
  const SplitPotential pot = SplitPotential::logarithmic(1.0, 1.0);
  const PotentialEval at0 = pot.eval(0.0);
  CHECK(at0.F == 0.0);
  CHECK(at0.dF == 0.0);

  // theta_c = 0 isolates the convex part.
  const PotentialEval mid = eval_log(0.5, 1.0, 0.0);
  CHECK(mid.dF == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  const PotentialEval edge = eval_log(0.9, 1.0, 0.0);
  CHECK(edge.ddF == doctest::Approx(2.0 / 0.19).epsilon(1e-14));

  // Full split against the recomputed closed forms on a scan.
  const SplitPotential p2 = SplitPotential::logarithmic(0.3, 1.2);
  for (double s = -0.95; s <= 0.95; s += 0.05) {
    const PotentialEval e = p2.eval(s);
    CHECK(e.F == doctest::Approx(0.3 * f0(s) - 0.6 * s * s).epsilon(1e-13));
    CHECK(e.dF == doctest::Approx(0.3 * df0(s) - 1.2 * s).epsilon(1e-13));
    CHECK(e.ddF == doctest::Approx(0.3 * ddf0(s) - 1.2).epsilon(1e-13));
    const PotentialEval c = p2.convex(s);
    CHECK(c.F == doctest::Approx(0.3 * f0(s)).epsilon(1e-13));
  }
  CHECK(p2.singular_domain());
  CHECK_FALSE(SplitPotential::kappa_regularised().singular_domain());
}

TEST_CASE("logarithmic potential: domain guard at |s| >= 1") {
  const SplitPotential pot = SplitPotential::logarithmic(0.3, 1.0);
  CHECK_THROWS_AS((void)pot.eval(1.0), DomainError);
  CHECK_THROWS_AS((void)pot.eval(-1.0), DomainError);
  CHECK_THROWS_AS((void)pot.convex(1.0 + 1e-12), DomainError);
  CHECK_THROWS_AS((void)eval_log_convex(-1.0), DomainError);
  CHECK_NOTHROW((void)pot.eval(1.0 - 1e-9));
  CHECK_THROWS_AS((void)SplitPotential::obstacle(1.0).eval(0.0),
                  UnsupportedPotential);
  CHECK_THROWS_AS((void)SplitPotential::obstacle(1.0).convex(0.0),
                  UnsupportedPotential);
}

TEST_CASE("kappa regularisation: coincides with the bare potential inside") {
  // Spot values from the closed forms.
  CHECK(eval_kappa(0.5, 0.1, 1.0, 0.0).ddF ==
        doctest::Approx(2.0 / 0.75).epsilon(1e-14));
  CHECK(eval_kappa(0.95, 0.1, 1.0, 0.0).ddF ==
        doctest::Approx(2.0 / 0.19).epsilon(1e-14));
  for (double kappa : {0.3, 0.1, 0.01}) {
    const PotentialEval z = eval_kappa(0.0, kappa, 0.7, 0.0);
    CHECK(z.F == 0.0);
    CHECK(z.dF == 0.0);
  }

  // Exact coincidence with the logarithmic potential on [-0.9, 0.9] for
  // kappa <= 0.1 (the switch points sit outside that interval).
  for (double kappa : {0.1, 0.01}) {
    for (int i = -900; i <= 900; i += 3) {
      const double s = i * 1e-3;
      const PotentialEval a = eval_kappa(s, kappa, 0.3, 1.0);
      const PotentialEval b = eval_log(s, 0.3, 1.0);
      CHECK(a.F == b.F);
      CHECK(a.dF == b.dF);
      CHECK(a.ddF == b.ddF);
    }
  }
}

TEST_CASE("kappa regularisation: quadratic continuation closed form") {
  for (double kappa : {0.3, 0.1, 0.01}) {
    for (double s : {1.0 - kappa + 1e-3, 1.0, 1.3, 2.5, -1.0, -2.5}) {
      const PotentialEval e = eval_kappa(s, kappa, 1.0, 0.0);
      CHECK(e.F == doctest::Approx(f0_quad(s, kappa)).epsilon(1e-13));
      CHECK(e.ddF == doctest::Approx(ddf0(1.0 - kappa)).epsilon(1e-13));
    }
  }
  // Evenness in s of the convex part.
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> dist(-2.5, 2.5);
  for (int i = 0; i < 500; ++i) {
    const double s = dist(rng);
    const PotentialEval a = eval_kappa(s, 0.1, 1.0, 0.0);
    const PotentialEval b = eval_kappa(-s, 0.1, 1.0, 0.0);
    CHECK(a.F == doctest::Approx(b.F).epsilon(1e-14));
    CHECK(a.dF == doctest::Approx(-b.dF).epsilon(1e-14));
  }
}

TEST_CASE("kappa regularisation: C2 matching at the switch points") {
  for (double kappa : {0.3, 0.1, 0.01}) {
    for (double sign : {1.0, -1.0}) {
      const double x0 = sign * (1.0 - kappa);
      const PotentialEval at = eval_kappa(x0, kappa, 1.0, 0.0);
      // At the switch point both branches agree with the bare potential.
      CHECK(at.F == doctest::Approx(f0(x0)).epsilon(1e-13));
      CHECK(at.dF == doctest::Approx(df0(x0)).epsilon(1e-13));
      CHECK(at.ddF == doctest::Approx(ddf0(x0)).epsilon(1e-13));

      // Central-difference jump estimators with step 1e-6: a value or slope
      // discontinuity would appear at O(jump); for a C2 function both
      // residuals are O(delta^3 * F'''), far below 1e-10.
      const double d = 1e-6;
      const double fp = eval_kappa(x0 + d, kappa, 1.0, 0.0).F;
      const double fm = eval_kappa(x0 - d, kappa, 1.0, 0.0).F;
      CHECK(std::fabs(fp - fm - 2.0 * d * at.dF) < 1e-10);
      CHECK(std::fabs(fp + fm - 2.0 * at.F - d * d * at.ddF) < 1e-10);

      // Second-difference probe with step 1e-4. The kink in F''' at the
      // switch contributes delta/6 * |F''' jump|; budget that explicitly so
      // the bound still detects any genuine C2 violation (which would enter
      // at order 1/delta).
      const double D = 1e-4;
      const double Fp = eval_kappa(x0 + D, kappa, 1.0, 0.0).F;
      const double Fm = eval_kappa(x0 - D, kappa, 1.0, 0.0).F;
      const double fd2 = (Fp + Fm - 2.0 * at.F) / (D * D);
      const double budget = D * std::fabs(dddf0(1.0 - kappa)) / 3.0 + 1e-4;
      CHECK(std::fabs(fd2 - at.ddF) < budget);
    }
  }
}

TEST_CASE("kappa regularisation: dominated by the bare potential") {
  // Property suite: 1e4 samples per kappa; the regularised convex part never
  // exceeds the bare one in magnitude, in value or in slope.
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> dist(-0.999, 0.999);
  for (double kappa : {0.3, 0.1, 0.01}) {
    for (int i = 0; i < 10000; ++i) {
      const double s = dist(rng);
      const PotentialEval reg = eval_kappa(s, kappa, 1.0, 0.0);
      CHECK(std::fabs(reg.dF) <= std::fabs(df0(s)) + 1e-12);
      CHECK(std::fabs(reg.F) <= std::fabs(f0(s)) + 1e-12);
    }
  }
}

TEST_CASE("convex-concave splitting inequalities") {
  // Convexity of theta*F0k: dF(a)(a-b) >= F(a) - F(b); concavity of F1:
  // dF1(b)(a-b) >= F1(a) - F1(b). Random pairs over [-2,2]^2.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const SplitPotential pot = SplitPotential::kappa_regularised(0.3, 1.0, 0.1);
  for (double kappa : {0.3, 0.1, 0.01}) {
    for (int i = 0; i < 3000; ++i) {
      const double a = dist(rng), b = dist(rng);
      const PotentialEval fa = eval_kappa(a, kappa, 0.3, 0.0);
      const PotentialEval fb = eval_kappa(b, kappa, 0.3, 0.0);
      CHECK(fa.dF * (a - b) >= fa.F - fb.F - 1e-12);
      CHECK(pot.dF1(b) * (a - b) >= pot.F1(a) - pot.F1(b) - 1e-12);
    }
  }
}

TEST_CASE("finite-difference derivative consistency") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> inner(-0.98, 0.98);
  std::uniform_real_distribution<double> wide(-2.0, 2.0);
  auto fd_check = [](auto&& f, auto&& df, double s) {
    const double d = 1e-6 * std::max(1.0, std::fabs(s));
    const double est = (f(s + d) - f(s - d)) / (2.0 * d);
    const double ref = df(s);
    CHECK(std::fabs(est - ref) <= 1e-6 * std::max(1.0, std::fabs(ref)));
  };
  const SplitPotential lg = SplitPotential::logarithmic(0.3, 1.0);
  const SplitPotential kp = SplitPotential::kappa_regularised(0.3, 1.0, 0.1);
  for (int i = 0; i < 400; ++i) {
    const double s = inner(rng);
    fd_check([&](double x) { return lg.eval(x).F; },
             [&](double x) { return lg.eval(x).dF; }, s);
    fd_check([&](double x) { return lg.eval(x).dF; },
             [&](double x) { return lg.eval(x).ddF; }, s);
    const double w = wide(rng);
    fd_check([&](double x) { return kp.eval(x).F; },
             [&](double x) { return kp.eval(x).dF; }, w);
    fd_check([&](double x) { return kp.eval(x).dF; },
             [&](double x) { return kp.eval(x).ddF; }, w);
  }
}

TEST_CASE("chemical force split: values and guards") {
  const SplitPotential kp = SplitPotential::kappa_regularised(1.0, 2.0, 0.1);
  CHECK(chemical_force_split(0.5, 0.2, kp) ==
        doctest::Approx(std::log(3.0) - 0.4).epsilon(1e-14));
  CHECK(chemical_force_split(0.0, 0.0, kp) == 0.0);

  const SplitPotential lg = SplitPotential::logarithmic(1.0, 0.0);
  CHECK(chemical_force_split(0.5, 0.5, lg) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS((void)chemical_force_split(1.0, 0.0, lg), DomainError);
  CHECK_THROWS_AS(
      (void)chemical_force_split(0.0, 0.0, SplitPotential::obstacle(1.0)),
      UnsupportedPotential);
}

TEST_CASE("wall wetting: interpolants hit the endpoint coefficients") {
  for (auto bp : {BoundaryPotential::affine(1.7, 0.4, 0.8),
                  BoundaryPotential::sine(1.7, 0.4, 0.8)}) {
    CHECK(bp.Ghat(1.0) == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(bp.Ghat(-1.0) == doctest::Approx(0.4).epsilon(1e-14));
    // Split recombination: Ghat = (zeta/2)s^2 + G0 + G1.
    for (double s = -1.0; s <= 1.0; s += 0.125) {
      const double re = 0.5 * bp.zeta * s * s + bp.G0(s) + bp.G1(s);
      CHECK(re == doctest::Approx(bp.Ghat(s)).epsilon(1e-13));
    }
  }
  const BoundaryPotential sn = BoundaryPotential::sine(2.0, 1.0);
  CHECK(sn.cplus() ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 8.0)
            .epsilon(1e-14));
  CHECK(sn.G0(0.5) == doctest::Approx(sn.cplus() * 0.25).epsilon(1e-14));
  CHECK(BoundaryPotential::affine(2.0, 1.0).G0(0.7) == 0.0);
  // Sine profile slope at the midpoint.
  CHECK(sn.dGhat(0.0) ==
        doctest::Approx(0.5 * std::numbers::pi / 2.0).epsilon(1e-14));
}

TEST_CASE("wall force split: frozen examples") {
  CHECK(boundary_force_split(0.0, 0.0, BoundaryPotential::affine(2.0, 1.0,
                                                                 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(boundary_force_split(1.0, 1.0, BoundaryPotential::affine(2.0, 1.0,
                                                                 0.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(boundary_force_split(0.0, 0.0, BoundaryPotential::sine(2.0, 1.0,
                                                               0.0)) ==
        doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
}

TEST_CASE("wall split: convex and concave parts behave as advertised") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (auto bp : {BoundaryPotential::affine(1.5, 0.2, 1.0),
                  BoundaryPotential::sine(1.5, 0.2, 1.0),
                  BoundaryPotential::sine(0.2, 1.5, 0.0)}) {
    auto convex = [&](double s) { return 0.5 * bp.zeta * s * s + bp.G0(s); };
    auto dconvex = [&](double s) { return bp.zeta * s + bp.dG0(s); };
    for (int i = 0; i < 2000; ++i) {
      const double a = dist(rng), b = dist(rng);
      CHECK(dconvex(a) * (a - b) >= convex(a) - convex(b) - 1e-12);
      CHECK(bp.dG1(b) * (a - b) >= bp.G1(a) - bp.G1(b) - 1e-12);
    }
    // Concavity of G1 by second differences on a scan.
    const double d = 1e-3;
    for (double s = -3.0; s <= 3.0; s += 0.01) {
      const double snd = bp.G1(s + d) + bp.G1(s - d) - 2.0 * bp.G1(s);
      CHECK(snd <= 1e-10);
    }
    // FD consistency of the split derivatives.
    for (double s = -1.5; s <= 1.5; s += 0.11) {
      const double est = (bp.G1(s + 1e-6) - bp.G1(s - 1e-6)) / 2e-6;
      CHECK(est == doctest::Approx(bp.dG1(s)).epsilon(1e-5));
      const double estg = (bp.Ghat(s + 1e-6) - bp.Ghat(s - 1e-6)) / 2e-6;
      CHECK(estg == doctest::Approx(bp.dGhat(s)).epsilon(1e-5));
    }
  }
}
