#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roomreg/fem_space.hpp"
#include "roomreg/types.hpp"

namespace roomreg {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

struct PhysicalParams {
  double Re = 100.0;
  double Gr = 100.0 * 100.0 / 0.9;
  double Pr = 0.7;
  double alpha_v = 1.0;
  double alpha_theta = 1.0;

  double buoyancy() const { return Gr / (Re * Re); }
  double conductivity() const { return 1.0 / (Re * Pr); }
  void validate() const;
  bool operator==(const PhysicalParams&) const = default;
};

enum class Component { VelocityX, VelocityY, Temperature };

const char* to_string(Component c);
Component component_from_string(const std::string& name);

/// Matrices that do not depend on the linearization point. Row index is the
/// test function, column index the trial function.
struct LinearForms {
  SpMat M_v, M_t, M_p;
  SpMat A_v;  // (2/Re)<eps(v),eps(psi)> + alpha_v <v,psi>_inlet
  SpMat A_t;  // (1/(Re Pr))<grad th, grad phi> + alpha_t <th,phi>_inlet
  SpMat D;    // n_p x n_v, D(k, j) = int chi_k div(psi_j)
  SpMat B0;   // n_v x n_t, (Gr/Re^2) <e2 th, psi>
};

/// Convection blocks linearized at (w, T).
struct ConvectionForms {
  SpMat N_v;   // v -> (w.grad)v + (v.grad)w
  SpMat N_tt;  // th -> w.grad th
  SpMat N_tv;  // v -> v.grad T, n_t x n_v
};

struct FormMatrices {
  LinearForms linear;
  ConvectionForms convection;
};

LinearForms assemble_linear_forms(const FemSpaces& spaces, const PhysicalParams& params);

/// w and T are free-dof vectors (Dirichlet values are zero).
ConvectionForms assemble_convection(const FemSpaces& spaces, const Vec& w, const Vec& T);

FormMatrices assemble_forms(const FemSpaces& spaces, const PhysicalParams& params, const Vec& w,
                            const Vec& T);

/// int (w.grad)w . psi, i.e. half of N_v(w) w, without building a matrix.
Vec convection_residual(const FemSpaces& spaces, const Vec& w);
/// int (w.grad T) phi.
Vec transport_residual(const FemSpaces& spaces, const Vec& w, const Vec& T);

/// <f, phi> over the domain for one component; the result has n_v entries
/// for velocity components and n_t for temperature.
Vec domain_load(const FemSpaces& spaces, Component c, const ScalarField& f);
Vec velocity_load(const FemSpaces& spaces, const ScalarField& fx, const ScalarField& fy);

/// <g, phi> over a boundary region (3-point Gauss per edge).
Vec boundary_load(const FemSpaces& spaces, const std::string& region, Component c,
                  const ScalarField& g);

struct BoundaryInput {
  std::string region;
  Component component = Component::VelocityX;
  ScalarField shape;
};

/// Columns act on the stacked state [v; th] of size n_v + n_t.
struct InputMatrices {
  Mat B;   // control columns
  Mat Bd;  // disturbance columns
};

InputMatrices assemble_boundary_inputs(const FemSpaces& spaces,
                                       const std::vector<BoundaryInput>& controls,
                                       const std::vector<BoundaryInput>& disturbances);

struct ObservationSpec {
  std::string region;
  Component component = Component::Temperature;
  /// Optional weight c(xi); the row is (1/|region|) int c u.
  ScalarField weight;
};

/// Rows act on the stacked state [v; th].
Mat assemble_observations(const FemSpaces& spaces, const std::vector<ObservationSpec>& specs);

/// Nodal interpolant restricted to free dofs.
Vec interpolate(const FemSpaces& spaces, Component c, const ScalarField& f);

/// ||u_h - u||_{L2} for a scalar P2 temperature-space field.
double l2_error_temperature(const FemSpaces& spaces, const Vec& free, const ScalarField& exact);

}  // namespace roomreg
