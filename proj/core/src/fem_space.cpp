#include "roomreg/fem_space.hpp"

#include <stdexcept>

namespace roomreg {

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[1] * l[2],         4.0 * l[2] * l[0],         4.0 * l[0] * l[1]};
}

std::array<std::array<double, 3>, 6> p2_barycentric_gradients(const std::array<double, 3>& l) {
  return {{{4.0 * l[0] - 1.0, 0.0, 0.0},
           {0.0, 4.0 * l[1] - 1.0, 0.0},
           {0.0, 0.0, 4.0 * l[2] - 1.0},
           {0.0, 4.0 * l[2], 4.0 * l[1]},
           {4.0 * l[2], 0.0, 4.0 * l[0]},
           {4.0 * l[1], 4.0 * l[0], 0.0}}};
}

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  ElementGeometry g;
  const auto& tri = mesh.triangles[t];
  for (int k = 0; k < 3; ++k) g.corners[k] = mesh.vertices[tri[k]];
  const double det = (g.corners[1].x() - g.corners[0].x()) * (g.corners[2].y() - g.corners[0].y()) -
                     (g.corners[2].x() - g.corners[0].x()) * (g.corners[1].y() - g.corners[0].y());
  g.area = 0.5 * det;
  // grad lambda_k is the inward normal of the opposite edge scaled by 1/(2 area).
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector2d& a = g.corners[(k + 1) % 3];
    const Eigen::Vector2d& b = g.corners[(k + 2) % 3];
    g.grad_lambda[k] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / det;
  }
  return g;
}

std::array<Eigen::Vector2d, 6> p2_gradients(const ElementGeometry& geo,
                                            const std::array<double, 3>& lambda) {
  const auto dl = p2_barycentric_gradients(lambda);
  std::array<Eigen::Vector2d, 6> out;
  for (int i = 0; i < 6; ++i)
    out[i] = dl[i][0] * geo.grad_lambda[0] + dl[i][1] * geo.grad_lambda[1] +
             dl[i][2] * geo.grad_lambda[2];
  return out;
}

std::array<int, 6> FemSpaces::element_nodes(int t) const {
  const auto& tri = mesh.triangles[t];
  const auto& te = mesh.triangle_edges[t];
  const int nv = static_cast<int>(mesh.vertices.size());
  return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

std::array<int, 3> FemSpaces::boundary_edge_nodes(int b) const {
  const auto& be = mesh.boundary_edges[b];
  const auto& e = mesh.edges[be.edge];
  return {e[0], static_cast<int>(mesh.vertices.size()) + be.edge, e[1]};
}

Vec FemSpaces::temperature_nodal(const Vec& free) const {
  if (free.size() != n_t) throw std::invalid_argument("temperature vector has wrong size");
  Vec out = Vec::Zero(num_nodes);
  for (int i = 0; i < num_nodes; ++i)
    if (temperature_index[i] >= 0) out[i] = free[temperature_index[i]];
  return out;
}

Vec FemSpaces::velocity_nodal(const Vec& free, int c) const {
  if (free.size() != n_v) throw std::invalid_argument("velocity vector has wrong size");
  Vec out = Vec::Zero(num_nodes);
  for (int i = 0; i < num_nodes; ++i) {
    const int d = velocity_index[c * num_nodes + i];
    if (d >= 0) out[i] = free[d];
  }
  return out;
}

FemSpaces build_spaces(const Mesh& mesh) {
  FemSpaces s;
  s.mesh = mesh;
  const int nv = static_cast<int>(mesh.vertices.size());
  s.num_nodes = nv + static_cast<int>(mesh.edges.size());
  s.nodes.reserve(s.num_nodes);
  for (const auto& p : mesh.vertices) s.nodes.push_back(p);
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) s.nodes.push_back(mesh.edge_midpoint(e));

  std::vector<bool> velocity_fixed(s.num_nodes, false), temperature_fixed(s.num_nodes, false);
  for (int b = 0; b < static_cast<int>(mesh.boundary_edges.size()); ++b) {
    const auto tag = mesh.boundary_edges[b].tag;
    for (int node : s.boundary_edge_nodes(b)) {
      if (tag == BoundaryTag::Wall || tag == BoundaryTag::Heater) velocity_fixed[node] = true;
      if (tag == BoundaryTag::Wall) temperature_fixed[node] = true;
    }
  }

  s.velocity_index.assign(2 * s.num_nodes, -1);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < s.num_nodes; ++i) {
      if (velocity_fixed[i]) continue;
      s.velocity_index[c * s.num_nodes + i] = s.n_v++;
      s.velocity_node.push_back(i);
      s.velocity_component.push_back(c);
    }
  }
  s.temperature_index.assign(s.num_nodes, -1);
  for (int i = 0; i < s.num_nodes; ++i) {
    if (temperature_fixed[i]) continue;
    s.temperature_index[i] = s.n_t++;
    s.temperature_node.push_back(i);
  }
  s.pressure_index.resize(nv);
  for (int i = 0; i < nv; ++i) s.pressure_index[i] = i;
  s.n_p = nv;
  return s;
}

}  // namespace roomreg
