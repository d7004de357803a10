#include "roomreg/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "roomreg/quadrature.hpp"

namespace roomreg {
namespace {

struct ElementData {
  ElementGeometry geo;
  std::array<int, 6> nodes;
};

int velocity_dof(const FemSpaces& s, int c, int node) {
  return s.velocity_index[c * s.num_nodes + node];
}

int dof_of(const FemSpaces& s, Component c, int node) {
  switch (c) {
    case Component::VelocityX: return velocity_dof(s, 0, node);
    case Component::VelocityY: return velocity_dof(s, 1, node);
    case Component::Temperature: return s.temperature_index[node];
  }
  return -1;
}

int component_size(const FemSpaces& s, Component c) {
  return c == Component::Temperature ? s.n_t : s.n_v;
}

/// Offset of a component block inside the stacked state [v; th].
int stacked_offset(const FemSpaces& s, Component c) {
  return c == Component::Temperature ? s.n_v : 0;
}

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.prune(0.0);
  return m;
}

std::array<double, 3> edge_p2(double t) {
  return {(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)};
}

RegionSet boundary_region(const FemSpaces& s, const std::string& region) {
  RegionSet set = locate_region(s.mesh, region);
  if (set.kind != RegionSet::Kind::Boundary)
    throw std::invalid_argument("region '" + region + "' is not a boundary region");
  return set;
}

void check_size(const Vec& v, int n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(std::string(what) + " has wrong dof count");
}

void check_spd(const SpMat& m, const char* what) {
  Eigen::SimplicialLDLT<SpMat> ldlt(m);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw NumericalError(std::string(what) + " is not positive definite");
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(Re > 0.0)) throw std::invalid_argument("Re must be positive");
  if (!(Pr > 0.0)) throw std::invalid_argument("Pr must be positive");
  if (!(alpha_v >= 0.0) || !(alpha_theta >= 0.0))
    throw std::invalid_argument("Robin coefficients must be non-negative");
  if (!std::isfinite(Gr)) throw std::invalid_argument("Gr must be finite");
}

const char* to_string(Component c) {
  switch (c) {
    case Component::VelocityX: return "vx";
    case Component::VelocityY: return "vy";
    case Component::Temperature: return "theta";
  }
  return "?";
}

Component component_from_string(const std::string& name) {
  if (name == "vx") return Component::VelocityX;
  if (name == "vy") return Component::VelocityY;
  if (name == "theta") return Component::Temperature;
  throw std::invalid_argument("unknown component '" + name + "' (expected vx, vy or theta)");
}

LinearForms assemble_linear_forms(const FemSpaces& s, const PhysicalParams& params) {
  params.validate();
  const auto& rule = triangle_rule_degree5();
  const double nu = 1.0 / params.Re;
  const double kappa = params.conductivity();
  const double beta = params.buoyancy();

  std::vector<Triplet> mv, mt, mp, av, at, d, b0;
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);
    const auto verts = s.element_vertices(t);

    double mass[6][6] = {}, lap[6][6] = {}, cross[2][2][6][6] = {};
    double div[3][2][6] = {}, pmass[3][3] = {};
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double wq = geo.area * rule.weights[q];
      const auto& lam = rule.points[q];
      const auto phi = p2_values(lam);
      const auto grad = p2_gradients(geo, lam);
      for (int j = 0; j < 6; ++j) {
        for (int i = 0; i < 6; ++i) {
          mass[j][i] += wq * phi[i] * phi[j];
          lap[j][i] += wq * grad[i].dot(grad[j]);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) cross[b][a][j][i] += wq * grad[i][b] * grad[j][a];
        }
      }
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 6; ++i)
          for (int a = 0; a < 2; ++a) div[k][a][i] += wq * lam[k] * grad[i][a];
        for (int l = 0; l < 3; ++l) pmass[k][l] += wq * lam[k] * lam[l];
      }
    }

    for (int j = 0; j < 6; ++j) {
      const int tj = s.temperature_index[nodes[j]];
      for (int i = 0; i < 6; ++i) {
        const int ti = s.temperature_index[nodes[i]];
        if (tj >= 0 && ti >= 0) {
          mt.emplace_back(tj, ti, mass[j][i]);
          at.emplace_back(tj, ti, kappa * lap[j][i]);
        }
        for (int b = 0; b < 2; ++b) {
          const int vj = velocity_dof(s, b, nodes[j]);
          if (vj < 0) continue;
          if (b == 1 && ti >= 0) b0.emplace_back(vj, ti, beta * mass[j][i]);
          for (int a = 0; a < 2; ++a) {
            const int vi = velocity_dof(s, a, nodes[i]);
            if (vi < 0) continue;
            // 2 eps(phi_i e_a) : eps(phi_j e_b) = delta_ab grad_i.grad_j + d_b phi_i d_a phi_j
            const double value = (a == b ? lap[j][i] : 0.0) + cross[b][a][j][i];
            av.emplace_back(vj, vi, nu * value);
            if (a == b) mv.emplace_back(vj, vi, mass[j][i]);
          }
        }
      }
    }
    for (int k = 0; k < 3; ++k) {
      const int pk = s.pressure_index[verts[k]];
      for (int l = 0; l < 3; ++l) mp.emplace_back(pk, s.pressure_index[verts[l]], pmass[k][l]);
      for (int i = 0; i < 6; ++i)
        for (int a = 0; a < 2; ++a) {
          const int vi = velocity_dof(s, a, nodes[i]);
          if (vi >= 0) d.emplace_back(pk, vi, div[k][a][i]);
        }
    }
  }

  // Robin terms on the inlet.
  const LineRule line = gauss_legendre(3);
  for (int be : locate_region(s.mesh, "inlet").indices) {
    const auto en = s.boundary_edge_nodes(be);
    const double len = s.mesh.edge_length(s.mesh.boundary_edges[be].edge);
    double m[3][3] = {};
    for (size_t q = 0; q < line.points.size(); ++q) {
      const auto n = edge_p2(line.points[q]);
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) m[j][i] += len * line.weights[q] * n[i] * n[j];
    }
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        const int tj = s.temperature_index[en[j]], ti = s.temperature_index[en[i]];
        if (tj >= 0 && ti >= 0) at.emplace_back(tj, ti, params.alpha_theta * m[j][i]);
        for (int a = 0; a < 2; ++a) {
          const int vj = velocity_dof(s, a, en[j]), vi = velocity_dof(s, a, en[i]);
          if (vj >= 0 && vi >= 0) av.emplace_back(vj, vi, params.alpha_v * m[j][i]);
        }
      }
  }

  LinearForms f;
  f.M_v = from_triplets(s.n_v, s.n_v, mv);
  f.M_t = from_triplets(s.n_t, s.n_t, mt);
  f.M_p = from_triplets(s.n_p, s.n_p, mp);
  f.A_v = from_triplets(s.n_v, s.n_v, av);
  f.A_t = from_triplets(s.n_t, s.n_t, at);
  f.D = from_triplets(s.n_p, s.n_v, d);
  f.B0 = from_triplets(s.n_v, s.n_t, b0);
  check_spd(f.M_v, "velocity mass matrix");
  check_spd(f.M_t, "temperature mass matrix");
  return f;
}

ConvectionForms assemble_convection(const FemSpaces& s, const Vec& w, const Vec& T) {
  check_size(w, s.n_v, "velocity linearization point");
  check_size(T, s.n_t, "temperature linearization point");
  const auto& rule = triangle_rule_degree5();
  const Vec wx = s.velocity_nodal(w, 0), wy = s.velocity_nodal(w, 1);
  const Vec Tn = s.temperature_nodal(T);

  std::vector<Triplet> nv, ntt, ntv;
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);

    double adv[6][6] = {}, react[2][2][6][6] = {}, tgrad[2][6][6] = {};
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double wq = geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(geo, rule.points[q]);
      Eigen::Vector2d wv = Eigen::Vector2d::Zero(), gT = Eigen::Vector2d::Zero();
      Eigen::Matrix2d gw = Eigen::Matrix2d::Zero();  // gw(b, a) = d_a w_b
      for (int i = 0; i < 6; ++i) {
        const double ux = wx[nodes[i]], uy = wy[nodes[i]];
        wv += phi[i] * Eigen::Vector2d(ux, uy);
        gw.row(0) += ux * grad[i].transpose();
        gw.row(1) += uy * grad[i].transpose();
        gT += Tn[nodes[i]] * grad[i];
      }
      for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) {
          const double pp = wq * phi[i] * phi[j];
          adv[j][i] += wq * wv.dot(grad[i]) * phi[j];
          for (int a = 0; a < 2; ++a) {
            tgrad[a][j][i] += pp * gT[a];
            for (int b = 0; b < 2; ++b) react[b][a][j][i] += pp * gw(b, a);
          }
        }
    }

    for (int j = 0; j < 6; ++j) {
      const int tj = s.temperature_index[nodes[j]];
      for (int i = 0; i < 6; ++i) {
        const int ti = s.temperature_index[nodes[i]];
        if (tj >= 0 && ti >= 0) ntt.emplace_back(tj, ti, adv[j][i]);
        for (int a = 0; a < 2; ++a) {
          const int vi = velocity_dof(s, a, nodes[i]);
          if (vi < 0) continue;
          if (tj >= 0) ntv.emplace_back(tj, vi, tgrad[a][j][i]);
          for (int b = 0; b < 2; ++b) {
            const int vj = velocity_dof(s, b, nodes[j]);
            if (vj < 0) continue;
            const double value = (a == b ? adv[j][i] : 0.0) + react[b][a][j][i];
            nv.emplace_back(vj, vi, value);
          }
        }
      }
    }
  }
  ConvectionForms c;
  c.N_v = from_triplets(s.n_v, s.n_v, nv);
  c.N_tt = from_triplets(s.n_t, s.n_t, ntt);
  c.N_tv = from_triplets(s.n_t, s.n_v, ntv);
  return c;
}

FormMatrices assemble_forms(const FemSpaces& spaces, const PhysicalParams& params, const Vec& w,
                            const Vec& T) {
  return {assemble_linear_forms(spaces, params), assemble_convection(spaces, w, T)};
}

Vec convection_residual(const FemSpaces& s, const Vec& w) {
  check_size(w, s.n_v, "velocity field");
  const auto& rule = triangle_rule_degree5();
  const Vec wx = s.velocity_nodal(w, 0), wy = s.velocity_nodal(w, 1);
  Vec out = Vec::Zero(s.n_v);
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double wq = geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(geo, rule.points[q]);
      Eigen::Vector2d wv = Eigen::Vector2d::Zero(), gx = Eigen::Vector2d::Zero(),
                      gy = Eigen::Vector2d::Zero();
      for (int i = 0; i < 6; ++i) {
        wv += phi[i] * Eigen::Vector2d(wx[nodes[i]], wy[nodes[i]]);
        gx += wx[nodes[i]] * grad[i];
        gy += wy[nodes[i]] * grad[i];
      }
      const Eigen::Vector2d conv(wv.dot(gx), wv.dot(gy));
      for (int j = 0; j < 6; ++j)
        for (int b = 0; b < 2; ++b) {
          const int vj = velocity_dof(s, b, nodes[j]);
          if (vj >= 0) out[vj] += wq * conv[b] * phi[j];
        }
    }
  }
  return out;
}

Vec transport_residual(const FemSpaces& s, const Vec& w, const Vec& T) {
  check_size(w, s.n_v, "velocity field");
  check_size(T, s.n_t, "temperature field");
  const auto& rule = triangle_rule_degree5();
  const Vec wx = s.velocity_nodal(w, 0), wy = s.velocity_nodal(w, 1);
  const Vec Tn = s.temperature_nodal(T);
  Vec out = Vec::Zero(s.n_t);
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double wq = geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(geo, rule.points[q]);
      Eigen::Vector2d wv = Eigen::Vector2d::Zero(), gT = Eigen::Vector2d::Zero();
      for (int i = 0; i < 6; ++i) {
        wv += phi[i] * Eigen::Vector2d(wx[nodes[i]], wy[nodes[i]]);
        gT += Tn[nodes[i]] * grad[i];
      }
      const double value = wv.dot(gT);
      for (int j = 0; j < 6; ++j) {
        const int tj = s.temperature_index[nodes[j]];
        if (tj >= 0) out[tj] += wq * value * phi[j];
      }
    }
  }
  return out;
}

Vec domain_load(const FemSpaces& s, Component c, const ScalarField& f) {
  const auto& rule = triangle_rule_degree5();
  Vec out = Vec::Zero(component_size(s, c));
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double value = geo.area * rule.weights[q] * f(geo.point(rule.points[q]));
      const auto phi = p2_values(rule.points[q]);
      for (int j = 0; j < 6; ++j) {
        const int dj = dof_of(s, c, nodes[j]);
        if (dj >= 0) out[dj] += value * phi[j];
      }
    }
  }
  return out;
}

Vec velocity_load(const FemSpaces& s, const ScalarField& fx, const ScalarField& fy) {
  return domain_load(s, Component::VelocityX, fx) + domain_load(s, Component::VelocityY, fy);
}

Vec boundary_load(const FemSpaces& s, const std::string& region, Component c,
                  const ScalarField& g) {
  const RegionSet set = boundary_region(s, region);
  const LineRule line = gauss_legendre(3);
  Vec out = Vec::Zero(component_size(s, c));
  for (int be : set.indices) {
    const auto en = s.boundary_edge_nodes(be);
    const Eigen::Vector2d p0 = s.nodes[en[0]], p1 = s.nodes[en[2]];
    const double len = (p1 - p0).norm();
    for (size_t q = 0; q < line.points.size(); ++q) {
      const double tq = line.points[q];
      const double value = len * line.weights[q] * g(p0 + tq * (p1 - p0));
      const auto n = edge_p2(tq);
      for (int j = 0; j < 3; ++j) {
        const int dj = dof_of(s, c, en[j]);
        if (dj >= 0) out[dj] += value * n[j];
      }
    }
  }
  return out;
}

InputMatrices assemble_boundary_inputs(const FemSpaces& s,
                                       const std::vector<BoundaryInput>& controls,
                                       const std::vector<BoundaryInput>& disturbances) {
  const int n = s.n_v + s.n_t;
  auto build = [&](const std::vector<BoundaryInput>& inputs) {
    Mat m = Mat::Zero(n, static_cast<int>(inputs.size()));
    for (size_t k = 0; k < inputs.size(); ++k) {
      const auto& in = inputs[k];
      if (!in.shape) throw std::invalid_argument("input on '" + in.region + "' has no shape");
      const Vec col = boundary_load(s, in.region, in.component, in.shape);
      m.col(static_cast<int>(k)).segment(stacked_offset(s, in.component), col.size()) = col;
    }
    return m;
  };
  return {build(controls), build(disturbances)};
}

Mat assemble_observations(const FemSpaces& s, const std::vector<ObservationSpec>& specs) {
  const int n = s.n_v + s.n_t;
  Mat C = Mat::Zero(static_cast<int>(specs.size()), n);
  const ScalarField one = [](const Eigen::Vector2d&) { return 1.0; };
  for (size_t r = 0; r < specs.size(); ++r) {
    const auto& spec = specs[r];
    const ScalarField& weight = spec.weight ? spec.weight : one;
    const RegionSet set = locate_region(s.mesh, spec.region);
    if (set.indices.empty() || set.measure <= 0.0)
      throw std::invalid_argument("observation region '" + spec.region + "' is empty on this mesh");
    Vec row;
    if (set.kind == RegionSet::Kind::Boundary) {
      row = boundary_load(s, spec.region, spec.component, weight);
    } else {
      row = Vec::Zero(component_size(s, spec.component));
      const auto& rule = triangle_rule_degree5();
      for (int t : set.indices) {
        const ElementGeometry geo = element_geometry(s.mesh, t);
        const auto nodes = s.element_nodes(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const double value = geo.area * rule.weights[q] * weight(geo.point(rule.points[q]));
          const auto phi = p2_values(rule.points[q]);
          for (int j = 0; j < 6; ++j) {
            const int dj = dof_of(s, spec.component, nodes[j]);
            if (dj >= 0) row[dj] += value * phi[j];
          }
        }
      }
    }
    C.row(static_cast<int>(r)).segment(stacked_offset(s, spec.component), row.size()) =
        row.transpose() / set.measure;
  }
  return C;
}

Vec interpolate(const FemSpaces& s, Component c, const ScalarField& f) {
  Vec out = Vec::Zero(component_size(s, c));
  for (int node = 0; node < s.num_nodes; ++node) {
    const int d = dof_of(s, c, node);
    if (d >= 0) out[d] = f(s.nodes[node]);
  }
  return out;
}

double l2_error_temperature(const FemSpaces& s, const Vec& free, const ScalarField& exact) {
  const TriangleRule rule = triangle_rule_collapsed(10);
  const Vec u = s.temperature_nodal(free);
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(s.mesh.triangles.size()); ++t) {
    const ElementGeometry geo = element_geometry(s.mesh, t);
    const auto nodes = s.element_nodes(t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = p2_values(rule.points[q]);
      double uh = 0.0;
      for (int i = 0; i < 6; ++i) uh += u[nodes[i]] * phi[i];
      const double e = uh - exact(geo.point(rule.points[q]));
      sum += geo.area * rule.weights[q] * e * e;
    }
  }
  return std::sqrt(sum);
}

}  // namespace roomreg
