#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "mpnsch/errors.hpp"
#include "mpnsch/grid.hpp"

using namespace mpnsch;

namespace {

constexpr double kPi = std::numbers::pi;

FacePair random_velocity(const Grid& g, unsigned seed, bool zero_wall_normal,
                         int interior_margin = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  FacePair u = g.make_faces();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.x[g.xface(i, j)] = dist(rng);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.y[g.yface(i, j)] = dist(rng);
  if (zero_wall_normal)
    for (int i = 0; i < g.nx; ++i) {
      u.y[g.yface(i, 0)] = 0.0;
      u.y[g.yface(i, g.ny)] = 0.0;
    }
  if (interior_margin > 0) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (j < interior_margin || j >= g.ny - interior_margin)
          u.x[g.xface(i, j)] = 0.0;
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (j < interior_margin || j > g.ny - interior_margin)
          u.y[g.yface(i, j)] = 0.0;
  }
  return u;
}

CellField random_cells(const Grid& g, unsigned seed, int interior_margin = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  CellField f = g.make_cell();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool inside =
          j >= interior_margin && j < g.ny - interior_margin;
      f[g.cell(i, j)] = inside ? dist(rng) : 0.0;
    }
  return f;
}

}  // namespace

TEST_CASE("grid construction and coordinates") {
  const Grid g = Grid::make(2.0, 1.0, 64, 32);
  CHECK(g.dx == doctest::Approx(2.0 / 64).epsilon(1e-15));
  CHECK(g.dy == doctest::Approx(1.0 / 32).epsilon(1e-15));
  CHECK(g.cells() == 64 * 32);
  CHECK(g.xfaces() == 64 * 32);
  CHECK(g.yfaces() == 64 * 33);
  CHECK(g.nodes() == 64 * 33);
  CHECK(g.x_cell(0) == doctest::Approx(0.5 * g.dx));
  CHECK(g.x_xface(0) == 0.0);
  CHECK(g.y_yface(32) == doctest::Approx(1.0));
  CHECK(g.wrap(-1) == 63);
  CHECK(g.wrap(64) == 0);
  CHECK(g.cell(64, 0) == g.cell(0, 0));

  CHECK_THROWS_AS((void)Grid::make(2.0, 1.0, 3, 8), ValidationError);
  CHECK_THROWS_AS((void)Grid::make(2.0, 1.0, 8, 3), ValidationError);
  CHECK_THROWS_AS((void)Grid::make(0.0, 1.0, 8, 8), ValidationError);
  CHECK_THROWS_AS((void)Grid::make(2.0, -1.0, 8, 8), ValidationError);
}

TEST_CASE("divergence: constants, telescoping sum, size guard") {
  const Grid g = Grid::make(2.0, 1.0, 16, 8);
  FacePair u = g.make_faces();
  u.x.fill(0.7);
  u.y.fill(0.0);
  const CellField d0 = divergence(g, u);
  for (int c = 0; c < g.cells(); ++c) CHECK(d0[c] == 0.0);

  const FacePair r = random_velocity(g, 11, /*zero_wall_normal=*/true);
  const CellField dr = divergence(g, r);
  double total = 0.0, scale = 0.0;
  for (int c = 0; c < g.cells(); ++c) {
    total += dr[c] * g.dx * g.dy;
    scale += std::fabs(dr[c]) * g.dx * g.dy;
  }
  CHECK(std::fabs(total) <= 1e-13 * (1.0 + scale));

  FacePair bad = g.make_faces();
  bad.x.v.resize(3);
  CHECK_THROWS_AS((void)divergence(g, bad), SizeMismatch);
}

TEST_CASE("gradient is the negative adjoint of divergence") {
  const Grid g = Grid::make(1.6, 1.0, 12, 10);
  const double dV = g.dx * g.dy;
  const FacePair u = random_velocity(g, 23, /*zero_wall_normal=*/true);
  const CellField p = random_cells(g, 29);
  const CellField du = divergence(g, u);
  const FacePair gp = gradient(g, p);
  double lhs = 0.0, rhs = 0.0, scale = 0.0;
  for (int c = 0; c < g.cells(); ++c) lhs += du[c] * p[c] * dV;
  for (int f = 0; f < g.xfaces(); ++f) rhs -= u.x[f] * gp.x[f] * dV;
  for (int f = 0; f < g.yfaces(); ++f) rhs -= u.y[f] * gp.y[f] * dV;
  for (int c = 0; c < g.cells(); ++c) scale += std::fabs(du[c] * p[c]) * dV;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + scale));
  // Wall y-face rows of the gradient carry no normal component.
  for (int i = 0; i < g.nx; ++i) {
    CHECK(gp.y[g.yface(i, 0)] == 0.0);
    CHECK(gp.y[g.yface(i, g.ny)] == 0.0);
  }
}

TEST_CASE("curl of a rigid rotation is the constant 2") {
  const Grid g = Grid::make(2.0, 1.0, 16, 8);
  const double cx = 1.0, cy = 0.5;
  FacePair u = g.make_faces();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      u.x[g.xface(i, j)] = -(g.y_xface(j) - cy);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      u.y[g.yface(i, j)] = g.x_yface(i) - cx;
  const CellField w = curl_of_vector(g, u);
  // The linear-in-x component is not periodic, so skip the wrap seam.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i <= g.nx - 2; ++i)
      CHECK(w[g.cell(i, j)] == doctest::Approx(2.0).epsilon(1e-13));
  // Its symmetric gradient vanishes identically (same seam caveat).
  const SymGrad sg = sym_grad(g, u);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i <= g.nx - 2; ++i) {
      CHECK(sg.d11[g.cell(i, j)] == doctest::Approx(0.0));
      CHECK(sg.d22[g.cell(i, j)] == doctest::Approx(0.0));
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i <= g.nx - 1; ++i)
      CHECK(sg.d12[g.node(i, j)] == doctest::Approx(0.0));
}

TEST_CASE("shear flow: symmetric and skew parts split the gradient") {
  const Grid g = Grid::make(2.0, 1.0, 12, 8);
  FacePair u = g.make_faces();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.x[g.xface(i, j)] = g.y_xface(j);
  u.y.fill(0.0);
  const SymGrad sg = sym_grad(g, u);
  const CellField w12 = skew_grad(g, u);
  for (int c = 0; c < g.cells(); ++c) {
    CHECK(sg.d11[c] == 0.0);
    CHECK(sg.d22[c] == 0.0);
    CHECK(w12[c] == doctest::Approx(-0.5).epsilon(1e-13));
  }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(sg.d12[g.node(i, j)] == doctest::Approx(0.5).epsilon(1e-13));
  // Wall nodes are zero by contract.
  for (int i = 0; i < g.nx; ++i) {
    CHECK(sg.d12[g.node(i, 0)] == 0.0);
    CHECK(sg.d12[g.node(i, g.ny)] == 0.0);
  }
}

TEST_CASE("pointwise curl identity against the skew gradient") {
  const Grid g = Grid::make(2.0, 1.0, 14, 10);
  const double dV = g.dx * g.dy;
  const FacePair u = random_velocity(g, 37, true);
  const CellField w = curl_of_vector(g, u);
  const CellField w12 = skew_grad(g, u);
  double curl2 = 0.0, skew2 = 0.0;
  for (int c = 0; c < g.cells(); ++c) {
    curl2 += w[c] * w[c] * dV;
    skew2 += w12[c] * w12[c] * dV;
  }
  // |curl u|^2 = 2 Wu:Wu = 4 w12^2 cell by cell, hence also in quadrature.
  CHECK(curl2 == doctest::Approx(4.0 * skew2).epsilon(1e-12));
  for (int c = 0; c < g.cells(); ++c)
    CHECK(w[c] == doctest::Approx(2.0 * w12[c]).epsilon(1e-13));
}

TEST_CASE("curl operators are adjoint for interior-supported pairs") {
  const Grid g = Grid::make(2.0, 1.0, 16, 12);
  const double dV = g.dx * g.dy;
  const FacePair u = random_velocity(g, 41, true, /*interior_margin=*/2);
  const CellField w = random_cells(g, 43, /*interior_margin=*/2);
  const CellField cu = curl_of_vector(g, u);
  const FacePair cw = curl_of_scalar(g, w);
  double lhs = 0.0, rhs = 0.0, scale = 1.0;
  for (int c = 0; c < g.cells(); ++c) {
    lhs += cu[c] * w[c] * dV;
    scale += std::fabs(cu[c] * w[c]) * dV;
  }
  for (int f = 0; f < g.xfaces(); ++f) rhs += u.x[f] * cw.x[f] * dV;
  for (int f = 0; f < g.yfaces(); ++f) rhs += u.y[f] * cw.y[f] * dV;
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);

  // Constant scalars produce no rotational forcing.
  CellField c1 = g.make_cell();
  c1.fill(3.25);
  const FacePair cc = curl_of_scalar(g, c1);
  for (int f = 0; f < g.xfaces(); ++f) CHECK(cc.x[f] == 0.0);
  for (int f = 0; f < g.yfaces(); ++f) CHECK(cc.y[f] == 0.0);
}

TEST_CASE("cell laplacian: stencil exactness and wall closures") {
  const Grid g = Grid::make(2.0, 1.0, 16, 8);
  SUBCASE("quadratic in x with matching trace") {
    const double a = 1.3, b = -0.4, c = 0.7;
    CellField f = g.make_cell();
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.x_cell(i);
        f[g.cell(i, j)] = a * x * x + b * x + c;
      }
    BoundaryField pb = g.make_boundary(Wall::Bottom);
    BoundaryField pt = g.make_boundary(Wall::Top);
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x_bnode(i);
      pb.v[i] = a * x * x + b * x + c;
      pt.v[i] = pb.v[i];
    }
    const CellField lap =
        laplacian_cell(g, f, WallBC::GhostFromTrace, &pb, &pt);
    const CellField lapn = laplacian_cell(g, f, WallBC::HomogeneousNeumann);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i <= g.nx - 2; ++i) {  // skip the periodic wrap seam
        CHECK(lap[g.cell(i, j)] == doctest::Approx(2.0 * a).epsilon(1e-12));
        CHECK(lapn[g.cell(i, j)] == doctest::Approx(2.0 * a).epsilon(1e-12));
      }
  }
  SUBCASE("linear in y with exact traces") {
    const double al = 0.9, be = 0.2;
    CellField f = g.make_cell();
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        f[g.cell(i, j)] = al * g.y_cell(j) + be;
    BoundaryField pb = g.make_boundary(Wall::Bottom);
    BoundaryField pt = g.make_boundary(Wall::Top);
    pb.v.assign(g.nx, be);
    pt.v.assign(g.nx, al * g.Ly + be);
    const CellField lap =
        laplacian_cell(g, f, WallBC::GhostFromTrace, &pb, &pt);
    for (int c = 0; c < g.cells(); ++c)
      CHECK(lap[c] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("constants and error paths") {
    CellField f = g.make_cell();
    f.fill(2.5);
    const CellField lap = laplacian_cell(g, f, WallBC::HomogeneousNeumann);
    for (int c = 0; c < g.cells(); ++c) CHECK(lap[c] == 0.0);
    CHECK_THROWS_AS((void)laplacian_cell(g, f, WallBC::GhostFromTrace),
                    MissingTrace);
    CellField bad;
    bad.v.resize(5);
    CHECK_THROWS_AS((void)laplacian_cell(g, bad, WallBC::HomogeneousNeumann),
                    SizeMismatch);
  }
}

TEST_CASE("surface operators: eigenfunction, adjointness, conservation") {
  const Grid g = Grid::make(2.0, 1.0, 32, 8);
  BoundaryField psi = g.make_boundary(Wall::Bottom);
  const double k = 2.0 * kPi / g.Lx;
  for (int i = 0; i < g.nx; ++i) psi.v[i] = std::sin(k * g.x_bnode(i));
  const BoundaryField lap = surface_laplacian(g, psi);

  // Discrete eigenvalue of the 3-point second difference on this mode.
  const double lam = 4.0 / (g.dx * g.dx) *
                     std::pow(std::sin(0.5 * k * g.dx), 2);
  for (int i = 0; i < g.nx; ++i)
    CHECK(lap.v[i] == doctest::Approx(-lam * psi.v[i]).epsilon(1e-12));
  // Second-order proximity to the continuum eigenvalue.
  CHECK(std::fabs(lam - k * k) <=
        std::pow(k, 4) * g.dx * g.dx / 12.0 * 1.01);

  // Conservation: the second difference sums to zero.
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  BoundaryField r = g.make_boundary(Wall::Top);
  for (int i = 0; i < g.nx; ++i) r.v[i] = dist(rng);
  const BoundaryField lr = surface_laplacian(g, r);
  double total = 0.0;
  for (int i = 0; i < g.nx; ++i) total += lr.v[i] * g.dx;
  CHECK(std::fabs(total) <= 1e-13 * g.nx);

  // Summation by parts against the staggered gradient.
  BoundaryField chi = g.make_boundary(Wall::Top);
  for (int i = 0; i < g.nx; ++i) chi.v[i] = dist(rng);
  const BoundaryField gr = surface_grad_staggered(g, r);
  const BoundaryField gchi = surface_grad_staggered(g, chi);
  double lhs = 0.0, rhs = 0.0, scale = 1.0;
  for (int i = 0; i < g.nx; ++i) {
    lhs += lr.v[i] * chi.v[i] * g.dx;
    rhs -= gr.v[i] * gchi.v[i] * g.dx;
    scale += std::fabs(lr.v[i] * chi.v[i]) * g.dx;
  }
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);

  // Constants are annihilated by both gradient flavours.
  BoundaryField c1 = g.make_boundary(Wall::Bottom);
  c1.v.assign(g.nx, 1.75);
  const BoundaryField gc = surface_grad(g, c1);
  const BoundaryField gs = surface_grad_staggered(g, c1);
  for (int i = 0; i < g.nx; ++i) {
    CHECK(gc.v[i] == 0.0);
    CHECK(gs.v[i] == 0.0);
  }
}

TEST_CASE("outward normal derivative at the walls") {
  const Grid g = Grid::make(2.0, 1.0, 8, 8);
  const double al = 1.7, be = -0.3;
  CellField f = g.make_cell();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f[g.cell(i, j)] = al * g.y_cell(j) + be;
  BoundaryField pb = g.make_boundary(Wall::Bottom);
  BoundaryField pt = g.make_boundary(Wall::Top);
  pb.v.assign(g.nx, be);
  pt.v.assign(g.nx, al * g.Ly + be);
  const BoundaryField db = normal_derivative(g, f, pb);
  const BoundaryField dt = normal_derivative(g, f, pt);
  for (int i = 0; i < g.nx; ++i) {
    // Outward at the bottom points along -y, so the slope flips sign.
    CHECK(db.v[i] == doctest::Approx(-al).epsilon(1e-12));
    CHECK(dt.v[i] == doctest::Approx(al).epsilon(1e-12));
  }
  // Matching trace and adjacent value: zero normal derivative.
  CellField c2 = g.make_cell();
  c2.fill(0.4);
  BoundaryField pc = g.make_boundary(Wall::Bottom);
  pc.v.assign(g.nx, 0.4);
  const BoundaryField dz = normal_derivative(g, c2, pc);
  for (int i = 0; i < g.nx; ++i) CHECK(dz.v[i] == 0.0);
}
