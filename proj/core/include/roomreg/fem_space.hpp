#pragma once

#include <array>
#include <vector>

#include "roomreg/mesh.hpp"
#include "roomreg/types.hpp"

namespace roomreg {

/// Taylor-Hood P2/P1 velocity-pressure pair plus a P2 temperature space on
/// one mesh. Dirichlet dofs are eliminated: velocity vanishes on walls and
/// on the heater strip, temperature vanishes on walls outside the heater.
/// A node on a vent endpoint belongs to the adjacent wall.
///
/// P2 node numbering: mesh vertices first, then edge midpoints.
struct FemSpaces {
  Mesh mesh;
  int num_nodes = 0;
  std::vector<Eigen::Vector2d> nodes;

  /// velocity_index[c * num_nodes + node] is the free dof of component c,
  /// or -1 when the node is Dirichlet. Free dofs are component-major.
  std::vector<int> velocity_index;
  std::vector<int> temperature_index;
  std::vector<int> pressure_index;  // one per mesh vertex

  /// Inverse maps: free dof -> node.
  std::vector<int> velocity_node;       // size n_v
  std::vector<int> velocity_component;  // size n_v
  std::vector<int> temperature_node;    // size n_t

  int n_v = 0;
  int n_p = 0;
  int n_t = 0;

  std::array<int, 6> element_nodes(int triangle) const;
  std::array<int, 3> element_vertices(int triangle) const { return mesh.triangles[triangle]; }
  /// P2 nodes on a boundary edge: endpoint, midpoint, endpoint.
  std::array<int, 3> boundary_edge_nodes(int boundary_edge) const;

  /// Nodal values (Dirichlet nodes zero) from a free temperature vector.
  Vec temperature_nodal(const Vec& free) const;
  /// Nodal values of one velocity component from a free velocity vector.
  Vec velocity_nodal(const Vec& free, int component) const;
  Vec pressure_nodal(const Vec& free) const { return free; }
};

FemSpaces build_spaces(const Mesh& mesh);

/// P2 shape functions on the reference triangle at barycentric point lambda.
std::array<double, 6> p2_values(const std::array<double, 3>& lambda);
/// Gradients of the P2 shape functions with respect to the barycentric
/// coordinates; combine with the element's barycentric gradients.
std::array<std::array<double, 3>, 6> p2_barycentric_gradients(const std::array<double, 3>& lambda);

/// Geometry of one triangle: area and the (constant) gradients of the three
/// barycentric coordinates.
struct ElementGeometry {
  double area = 0.0;
  std::array<Eigen::Vector2d, 3> grad_lambda;
  std::array<Eigen::Vector2d, 3> corners;

  Eigen::Vector2d point(const std::array<double, 3>& lambda) const {
    return lambda[0] * corners[0] + lambda[1] * corners[1] + lambda[2] * corners[2];
  }
};

ElementGeometry element_geometry(const Mesh& mesh, int triangle);

/// Physical gradients of the six P2 basis functions at a barycentric point.
std::array<Eigen::Vector2d, 6> p2_gradients(const ElementGeometry& geo,
                                            const std::array<double, 3>& lambda);

}  // namespace roomreg
