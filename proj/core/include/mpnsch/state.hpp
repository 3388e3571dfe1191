#pragma once

// Material closure (density extension, coefficient interpolation, Eringen
// admissibility) and the simulation state container.

#include <string>
#include <vector>

#include "mpnsch/grid.hpp"
#include "mpnsch/potentials.hpp"

namespace mpnsch {

// Coefficient value in fluid 1 (phi = +1) and fluid 2 (phi = -1).
struct EndpointPair {
  double f1 = 1.0;
  double f2 = 1.0;
};

struct PhysParams {
  // Hard admissibility window for coefficients that must stay strictly
  // positive (viscosity, mobility).
  static constexpr double k0 = 1e-8;
  static constexpr double k1 = 1e8;

  double rho1 = 1.0;  // specific density of fluid 1 (phi = +1)
  double rho2 = 1.0;  // specific density of fluid 2 (phi = -1)

  EndpointPair eta{1.0, 1.0};       // dynamic shear viscosity, in [k0, k1]
  EndpointPair eta_r{1.0, 1.0};     // micro-rotation coupling, in [0, k1]
  EndpointPair c0{1.0, 1.0};        // angular bulk coefficient, Eringen
  EndpointPair cd{1.0, 1.0};        // angular symmetric coefficient
  EndpointPair ca{1.0, 1.0};        // angular skew coefficient
  EndpointPair mobility{1.0, 1.0};  // chemical mobility, in [k0, k1]

  SplitPotential pot = SplitPotential::logarithmic();
  BoundaryPotential bpot = BoundaryPotential::affine(1.0, 1.0);

  double sigma = 0.0;      // extra phase damping (sigma/h)(phi - phi_k), [0,1]
  double eps_reg = 0.0;    // q-growth regulariser weight, [0,1]
  double q = 6.0;          // regulariser exponent, > 4 in 2D
  double kappa = 0.1;      // potential regularisation width, (0,1]
  double h = 1e-3;         // time step
  double delta_rho = 0.1;  // density-extension blend width, (0, 0.5]

  double body_force_x = 0.0;  // constant horizontal body force (channel runs)

  double zeta() const { return bpot.zeta; }

  // Throws ValidationError listing every violated condition.
  void validate() const;
};

// Density and its derivative at a scalar phase value.
struct Density {
  double rho = 0.0;
  double drho = 0.0;
};

// Affine density rho = (rho1/2)(1+phi) + (rho2/2)(1-phi) on [-1,1]; outside,
// a C^2 blend over width delta_rho to constants: rho' decays along the cubic
// Hermite profile rho'*(1 - S(t)), S(t) = 3t^2 - 2t^3, which keeps
// rho >= rho0 = min(rho1,rho2)/2 everywhere (the blend width is shrunk when
// the density contrast would undershoot).
Density density(double phi, const PhysParams& p);

// Lower density bound guaranteed by the extension.
double density_floor(const PhysParams& p);

// Smoothstep interpolation between the two fluids' coefficient values:
// c(phi) = a2 + (a1 - a2) * s,  s = t^2 (3 - 2t),  t = (clamp(phi)+1)/2.
double interpolate_coeff(double phi, const EndpointPair& a);

// Eringen admissibility of the angular viscosity triple.
struct EringenReport {
  bool valid = true;
  std::vector<std::string> violations;
};
EringenReport eringen_check(double c0, double cd, double ca);

// Full simulation state at one time level.
struct MixtureState {
  double t = 0.0;
  FacePair u;        // volume-averaged velocity on faces
  CellField p;       // pressure
  CellField omega;   // micro-rotation (2D scalar)
  CellField phi;     // phase field
  CellField mu;      // chemical potential
  CellField xi;      // obstacle multiplier (zero for smooth potentials)
  BoundaryField psi_bottom, psi_top;    // wall traces of the phase field
  BoundaryField Lpsi_bottom, Lpsi_top;  // wall chemical potentials
  BoundaryField xi_bottom, xi_top;      // wall obstacle multipliers

  static MixtureState make(const Grid& g);
};

}  // namespace mpnsch
