#include "mpnsch/grid.hpp"

namespace mpnsch {

Grid Grid::make(double Lx, double Ly, int nx, int ny) {
  std::vector<std::string> problems;
  if (!(Lx > 0.0)) problems.push_back("Lx must be positive");
  if (!(Ly > 0.0)) problems.push_back("Ly must be positive");
  if (nx < 4) problems.push_back("nx must be at least 4");
  if (ny < 4) problems.push_back("ny must be at least 4");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  Grid g;
  g.Lx = Lx;
  g.Ly = Ly;
  g.nx = nx;
  g.ny = ny;
  g.dx = Lx / nx;
  g.dy = Ly / ny;
  return g;
}

void require_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want)
    throw SizeMismatch(what + ": got size " + std::to_string(got) +
                       ", expected " + std::to_string(want));
}

CellField divergence(const Grid& g, const FacePair& u) {
  require_size(u.x.size(), g.xfaces(), "divergence: u.x");
  require_size(u.y.size(), g.yfaces(), "divergence: u.y");
  CellField d = g.make_cell();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d[g.cell(i, j)] = (u.x[g.xface(i + 1, j)] - u.x[g.xface(i, j)]) / g.dx +
                        (u.y[g.yface(i, j + 1)] - u.y[g.yface(i, j)]) / g.dy;
  return d;
}

FacePair gradient(const Grid& g, const CellField& p) {
  require_size(p.size(), g.cells(), "gradient: p");
  FacePair gr = g.make_faces();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      gr.x[g.xface(i, j)] = (p[g.cell(i, j)] - p[g.cell(i - 1, j)]) / g.dx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      gr.y[g.yface(i, j)] = (p[g.cell(i, j)] - p[g.cell(i, j - 1)]) / g.dy;
  // wall rows j = 0, ny stay zero: constrained faces carry no gradient
  return gr;
}

namespace {

// Curl at interior nodes j = 1..ny-1 (wall nodes would need ghost u1).
NodeField node_curl(const Grid& g, const FacePair& u) {
  NodeField z = g.make_node();
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      z[g.node(i, j)] =
          (u.y[g.yface(i, j)] - u.y[g.yface(i - 1, j)]) / g.dx -
          (u.x[g.xface(i, j)] - u.x[g.xface(i, j - 1)]) / g.dy;
  return z;
}

}  // namespace

CellField curl_of_vector(const Grid& g, const FacePair& u) {
  require_size(u.x.size(), g.xfaces(), "curl_of_vector: u.x");
  require_size(u.y.size(), g.yfaces(), "curl_of_vector: u.y");
  const NodeField z = node_curl(g, u);
  CellField c = g.make_cell();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (j == 0) {
        c[g.cell(i, j)] = 0.5 * (z[g.node(i, 1)] + z[g.node(i + 1, 1)]);
      } else if (j == g.ny - 1) {
        c[g.cell(i, j)] =
            0.5 * (z[g.node(i, g.ny - 1)] + z[g.node(i + 1, g.ny - 1)]);
      } else {
        c[g.cell(i, j)] = 0.25 * (z[g.node(i, j)] + z[g.node(i + 1, j)] +
                                  z[g.node(i, j + 1)] + z[g.node(i + 1, j + 1)]);
      }
    }
  return c;
}

FacePair curl_of_scalar(const Grid& g, const CellField& w) {
  require_size(w.size(), g.cells(), "curl_of_scalar: w");
  // Average cells to nodes with the transpose of the cell<-node averaging
  // used by curl_of_vector (interior 1/4, wall rows 1/2), then difference.
  NodeField wn = g.make_node();
  for (int i = 0; i < g.nx; ++i) {
    wn[g.node(i, 0)] = 0.5 * (w[g.cell(i - 1, 0)] + w[g.cell(i, 0)]);
    wn[g.node(i, g.ny)] =
        0.5 * (w[g.cell(i - 1, g.ny - 1)] + w[g.cell(i, g.ny - 1)]);
  }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      wn[g.node(i, j)] = 0.25 * (w[g.cell(i - 1, j - 1)] + w[g.cell(i, j - 1)] +
                                 w[g.cell(i - 1, j)] + w[g.cell(i, j)]);
  FacePair c = g.make_faces();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      c.x[g.xface(i, j)] =
          (wn[g.node(i, j + 1)] - wn[g.node(i, j)]) / g.dy;  // +d2 w
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      c.y[g.yface(i, j)] =
          -(wn[g.node(i + 1, j)] - wn[g.node(i, j)]) / g.dx;  // -d1 w
  return c;
}

SymGrad sym_grad(const Grid& g, const FacePair& u) {
  require_size(u.x.size(), g.xfaces(), "sym_grad: u.x");
  require_size(u.y.size(), g.yfaces(), "sym_grad: u.y");
  SymGrad s{g.make_cell(), g.make_cell(), g.make_node()};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      s.d11[g.cell(i, j)] =
          (u.x[g.xface(i + 1, j)] - u.x[g.xface(i, j)]) / g.dx;
      s.d22[g.cell(i, j)] =
          (u.y[g.yface(i, j + 1)] - u.y[g.yface(i, j)]) / g.dy;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s.d12[g.node(i, j)] =
          0.5 * ((u.x[g.xface(i, j)] - u.x[g.xface(i, j - 1)]) / g.dy +
                 (u.y[g.yface(i, j)] - u.y[g.yface(i - 1, j)]) / g.dx);
  return s;
}

CellField skew_grad(const Grid& g, const FacePair& u) {
  CellField w = curl_of_vector(g, u);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] *= 0.5;
  return w;
}

CellField laplacian_cell(const Grid& g, const CellField& f, WallBC bc,
                         const BoundaryField* psi_bottom,
                         const BoundaryField* psi_top) {
  require_size(f.size(), g.cells(), "laplacian_cell: f");
  if (bc == WallBC::GhostFromTrace) {
    if (psi_bottom == nullptr || psi_top == nullptr)
      throw MissingTrace("laplacian_cell: GhostFromTrace needs both traces");
    require_size(psi_bottom->size(), g.nx, "laplacian_cell: psi_bottom");
    require_size(psi_top->size(), g.nx, "laplacian_cell: psi_top");
  }
  CellField L = g.make_cell();
  const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double fc = f[g.cell(i, j)];
      double lap =
          (f[g.cell(i + 1, j)] - 2.0 * fc + f[g.cell(i - 1, j)]) * ix2;
      const double fn = (j + 1 < g.ny)
                            ? f[g.cell(i, j + 1)]
                            : (bc == WallBC::GhostFromTrace
                                   ? 2.0 * (*psi_top)[i] - fc
                                   : fc);
      const double fs = (j > 0) ? f[g.cell(i, j - 1)]
                                : (bc == WallBC::GhostFromTrace
                                       ? 2.0 * (*psi_bottom)[i] - fc
                                       : fc);
      lap += (fn - 2.0 * fc + fs) * iy2;
      L[g.cell(i, j)] = lap;
    }
  return L;
}

BoundaryField surface_grad(const Grid& g, const BoundaryField& psi) {
  require_size(psi.size(), g.nx, "surface_grad: psi");
  BoundaryField d(psi.wall, g.nx);
  for (int i = 0; i < g.nx; ++i)
    d[i] = (psi[g.wrap(i + 1)] - psi[g.wrap(i - 1)]) / (2.0 * g.dx);
  return d;
}

BoundaryField surface_grad_staggered(const Grid& g, const BoundaryField& psi) {
  require_size(psi.size(), g.nx, "surface_grad_staggered: psi");
  BoundaryField d(psi.wall, g.nx);
  for (int i = 0; i < g.nx; ++i)
    d[i] = (psi[i] - psi[g.wrap(i - 1)]) / g.dx;
  return d;
}

BoundaryField surface_laplacian(const Grid& g, const BoundaryField& psi) {
  require_size(psi.size(), g.nx, "surface_laplacian: psi");
  BoundaryField L(psi.wall, g.nx);
  for (int i = 0; i < g.nx; ++i)
    L[i] = (psi[g.wrap(i + 1)] - 2.0 * psi[i] + psi[g.wrap(i - 1)]) /
           (g.dx * g.dx);
  return L;
}

BoundaryField normal_derivative(const Grid& g, const CellField& phi,
                                const BoundaryField& psi) {
  require_size(phi.size(), g.cells(), "normal_derivative: phi");
  require_size(psi.size(), g.nx, "normal_derivative: psi");
  BoundaryField d(psi.wall, g.nx);
  const int jadj = (psi.wall == Wall::Bottom) ? 0 : g.ny - 1;
  for (int i = 0; i < g.nx; ++i)
    d[i] = (psi[i] - phi[g.cell(i, jadj)]) / (0.5 * g.dy);
  return d;
}

}  // namespace mpnsch
