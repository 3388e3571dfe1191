#pragma once

// Staggered (MAC) grid on the rectangle [0,Lx) x [0,Ly]: periodic in x,
// solid walls at y = 0 and y = Ly. Layout:
//
//   cell centers  (i+1/2, j+1/2)*D   : phi, mu, p, omega        (nx*ny)
//   x-faces       (i, j+1/2)*D       : u1                       (nx*ny)
//   y-faces       (i+1/2, j)*D       : u2, j = 0..ny            (nx*(ny+1))
//   nodes         (i, j)*D           : vorticity-like quantities (nx*(ny+1))
//   wall lines    (i+1/2)*Dx on each wall : psi, L(psi)          (nx each)
//
// The y-face rows j = 0 and j = ny are the wall normal velocities u.nu;
// the model constrains them to zero and the solvers never treat them as
// unknowns, but the fields carry them so operators stay uniform.
//
// All operators are second order in the interior and use the natural
// one-sided / ghost closures documented per operator at the walls.

#include <cstddef>
#include <string>
#include <vector>

#include "mpnsch/errors.hpp"

namespace mpnsch {

enum class Wall { Bottom, Top };

namespace detail {
template <class Tag>
struct FieldT {
  std::vector<double> v;
  FieldT() = default;
  explicit FieldT(std::size_t n) : v(n, 0.0) {}
  double& operator[](std::size_t k) { return v[k]; }
  const double& operator[](std::size_t k) const { return v[k]; }
  std::size_t size() const { return v.size(); }
  void fill(double c) { v.assign(v.size(), c); }
};
}  // namespace detail

using CellField = detail::FieldT<struct CellTag>;
using XFaceField = detail::FieldT<struct XFaceTag>;
using YFaceField = detail::FieldT<struct YFaceTag>;
using NodeField = detail::FieldT<struct NodeTag>;

// Scalar field living on one wall line, periodic in x, sampled at the
// cell-center abscissae x = (i+1/2)*Dx.
struct BoundaryField {
  Wall wall = Wall::Bottom;
  std::vector<double> v;
  BoundaryField() = default;
  BoundaryField(Wall w, std::size_t n) : wall(w), v(n, 0.0) {}
  double& operator[](std::size_t k) { return v[k]; }
  const double& operator[](std::size_t k) const { return v[k]; }
  std::size_t size() const { return v.size(); }
  void fill(double c) { v.assign(v.size(), c); }
};

// Velocity (or any face-based vector field): x-component on x-faces,
// y-component on y-faces.
struct FacePair {
  XFaceField x;
  YFaceField y;
};

struct Grid {
  double Lx = 1.0, Ly = 1.0;
  int nx = 4, ny = 4;
  double dx = 0.25, dy = 0.25;

  // Throws ValidationError for non-positive lengths or cell counts < 4.
  static Grid make(double Lx, double Ly, int nx, int ny);

  int cells() const { return nx * ny; }
  int xfaces() const { return nx * ny; }
  int yfaces() const { return nx * (ny + 1); }
  int nodes() const { return nx * (ny + 1); }
  double cell_volume() const { return dx * dy; }
  double area() const { return Lx * Ly; }

  int wrap(int i) const {
    int m = i % nx;
    return m < 0 ? m + nx : m;
  }
  int cell(int i, int j) const { return j * nx + wrap(i); }
  int xface(int i, int j) const { return j * nx + wrap(i); }
  int yface(int i, int j) const { return j * nx + wrap(i); }
  int node(int i, int j) const { return j * nx + wrap(i); }

  double x_cell(int i) const { return (i + 0.5) * dx; }
  double y_cell(int j) const { return (j + 0.5) * dy; }
  double x_xface(int i) const { return i * dx; }
  double y_xface(int j) const { return (j + 0.5) * dy; }
  double x_yface(int i) const { return (i + 0.5) * dx; }
  double y_yface(int j) const { return j * dy; }
  double x_bnode(int i) const { return (i + 0.5) * dx; }

  CellField make_cell() const { return CellField(cells()); }
  XFaceField make_xface() const { return XFaceField(xfaces()); }
  YFaceField make_yface() const { return YFaceField(yfaces()); }
  NodeField make_node() const { return NodeField(nodes()); }
  BoundaryField make_boundary(Wall w) const { return BoundaryField(w, nx); }
  FacePair make_faces() const { return {make_xface(), make_yface()}; }
};

void require_size(std::size_t got, std::size_t want, const std::string& what);

// Conservative MAC divergence of a face vector field; sums to zero over the
// domain whenever the wall normal components vanish.
CellField divergence(const Grid& g, const FacePair& u);

// Face gradient of a cell scalar; the negative adjoint of divergence.
// Wall y-face rows receive zero (no normal gradient on constrained faces).
FacePair gradient(const Grid& g, const CellField& p);

// Scalar curl d1(u2) - d2(u1) of a face vector field, cell-centered:
// node curls averaged to cells (wall-adjacent cells average their two
// interior nodes, since wall-node curls would need ghost data).
CellField curl_of_vector(const Grid& g, const FacePair& u);

// Vector curl (d2 w, -d1 w) of a cell scalar, on faces: cells are averaged
// to nodes (interior nodes: 4-cell mean; wall nodes: 2-cell mean) and then
// differenced, so constants map to zero and the operator is adjoint to
// curl_of_vector for interior-supported pairs. Wall y-face rows get zero.
FacePair curl_of_scalar(const Grid& g, const CellField& w);

// Symmetric gradient of a face vector field: diagonal entries at cells,
// the single off-diagonal entry at nodes (wall-node rows left zero; the
// wall physics enters through slip terms, not through wall-node stresses).
struct SymGrad {
  CellField d11;
  CellField d22;
  NodeField d12;
};
SymGrad sym_grad(const Grid& g, const FacePair& u);

// Single independent entry w12 = (d1 u2 - d2 u1)/2 of the skew gradient,
// cell-centered (= curl_of_vector / 2).
CellField skew_grad(const Grid& g, const FacePair& u);

// Wall closure for cell-centered Laplacians: ghost value 2*psi - f_int
// (Dirichlet trace psi to second order) or f_int (homogeneous Neumann).
enum class WallBC { GhostFromTrace, HomogeneousNeumann };

// 5-point Laplacian of a cell scalar with the requested wall closure.
// GhostFromTrace requires both traces; throws MissingTrace otherwise.
CellField laplacian_cell(const Grid& g, const CellField& f, WallBC bc,
                         const BoundaryField* psi_bottom = nullptr,
                         const BoundaryField* psi_top = nullptr);

// Periodic central difference along the wall line.
BoundaryField surface_grad(const Grid& g, const BoundaryField& psi);

// Staggered difference (psi_i - psi_{i-1})/Dx, sample i sitting at the
// x-face abscissa x = i*Dx. This is the gradient whose summation by parts
// pairs exactly with surface_laplacian; the wall transport and Young-stress
// quadratures use it.
BoundaryField surface_grad_staggered(const Grid& g, const BoundaryField& psi);

// Periodic 3-point second difference along the wall line; exactly adjoint
// to the staggered gradient and sums to zero.
BoundaryField surface_laplacian(const Grid& g, const BoundaryField& psi);

// Outward normal derivative at a wall from the trace psi and the
// first-interior cell value: (psi - phi_adjacent)/(Dy/2).
BoundaryField normal_derivative(const Grid& g, const CellField& phi,
                                const BoundaryField& psi);

}  // namespace mpnsch
