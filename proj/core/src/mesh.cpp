#include "roomreg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace roomreg {
namespace {

constexpr double kTol = 1e-10;

double side_extent(const RoomGeometry& g, Side side) {
  return (side == Side::Left || side == Side::Right) ? g.length_y : g.length_x;
}

bool overlaps(const BoundaryInterval& a, const BoundaryInterval& b) {
  if (a.side != b.side) return false;
  return std::min(a.end, b.end) - std::max(a.start, b.start) > kTol;
}

void check_interval(const RoomGeometry& g, const BoundaryInterval& iv,
                    const std::string& name) {
  if (!(iv.end > iv.start))
    throw std::invalid_argument("region '" + name + "' has non-positive length");
  if (iv.start < -kTol || iv.end > side_extent(g, iv.side) + kTol)
    throw std::invalid_argument("region '" + name + "' leaves its side");
}

bool aligned(double value, int n) {
  const double scaled = value * n;
  return std::abs(scaled - std::round(scaled)) < 1e-8;
}

bool inside_interval(const BoundaryInterval& iv, Side side, double a, double b) {
  return side == iv.side && std::min(a, b) >= iv.start - kTol &&
         std::max(a, b) <= iv.end + kTol;
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Wall: return "wall";
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Outlet: return "outlet";
    case BoundaryTag::Heater: return "heater";
  }
  return "?";
}

void RoomGeometry::validate() const {
  if (!(length_x > 0.0) || !(length_y > 0.0))
    throw std::invalid_argument("room dimensions must be positive");
  check_interval(*this, inlet, "inlet");
  check_interval(*this, outlet, "outlet");
  check_interval(*this, heater, "heater");
  if (overlaps(inlet, outlet)) throw std::invalid_argument("inlet and outlet overlap");
  if (overlaps(inlet, heater)) throw std::invalid_argument("heater overlaps the inlet");
  if (overlaps(outlet, heater)) throw std::invalid_argument("heater overlaps the outlet");
  for (const auto& [name, r] : domain_regions) {
    if (r.x1 < r.x0 || r.y1 < r.y0)
      throw std::invalid_argument("region '" + name + "' has inverted bounds");
    if (r.x0 < -kTol || r.y0 < -kTol || r.x1 > length_x + kTol || r.y1 > length_y + kTol)
      throw std::invalid_argument("region '" + name + "' is not inside the room");
  }
  for (const auto& [name, iv] : boundary_regions) check_interval(*this, iv, name);
}

RoomGeometry reference_room() {
  RoomGeometry g;
  g.inlet = {Side::Left, 5.0 / 8.0, 7.0 / 8.0};
  g.outlet = {Side::Right, 1.0 / 8.0, 1.0 / 2.0};
  g.heater = {Side::Bottom, 3.0 / 8.0, 5.0 / 8.0};
  g.domain_regions["omega_theta"] = {1.0 / 8.0, 2.0 / 8.0, 5.0 / 8.0, 6.0 / 8.0};
  g.domain_regions["omega_v"] = {3.0 / 8.0, 4.0 / 8.0, 2.0 / 8.0, 3.0 / 8.0};
  return g;
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d a = vertices[tri[1]] - vertices[tri[0]];
  const Eigen::Vector2d b = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Eigen::Vector2d Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices[edges[e][0]] + vertices[edges[e][1]]);
}

double Mesh::edge_length(int e) const {
  return (vertices[edges[e][0]] - vertices[edges[e][1]]).norm();
}

double Mesh::side_coordinate(Side side, const Eigen::Vector2d& p) {
  return (side == Side::Left || side == Side::Right) ? p.y() : p.x();
}

Mesh build_mesh(const RoomGeometry& geometry, int n) {
  if (n < 2) throw std::invalid_argument("mesh subdivision count must be at least 2");
  geometry.validate();

  Mesh mesh;
  mesh.geometry = geometry;
  mesh.n = n;
  mesh.h = 1.0 / n;
  const double fx = geometry.length_x * n;
  const double fy = geometry.length_y * n;
  if (std::abs(fx - std::round(fx)) > 1e-8 || std::abs(fy - std::round(fy)) > 1e-8)
    throw std::invalid_argument("room dimensions are not multiples of the mesh size");
  mesh.nx = static_cast<int>(std::lround(fx));
  mesh.ny = static_cast<int>(std::lround(fy));

  auto check_alignment = [n](const BoundaryInterval& iv, const std::string& name) {
    if (!aligned(iv.start, n) || !aligned(iv.end, n))
      throw std::invalid_argument("region '" + name + "' endpoints are not aligned with the 1/" +
                                  std::to_string(n) + " grid");
  };
  check_alignment(geometry.inlet, "inlet");
  check_alignment(geometry.outlet, "outlet");
  check_alignment(geometry.heater, "heater");
  for (const auto& [name, iv] : geometry.boundary_regions) check_alignment(iv, name);
  for (const auto& [name, r] : geometry.domain_regions) {
    if (!aligned(r.x0, n) || !aligned(r.x1, n) || !aligned(r.y0, n) || !aligned(r.y1, n))
      throw std::invalid_argument("region '" + name + "' endpoints are not aligned with the 1/" +
                                  std::to_string(n) + " grid");
  }

  const int nx = mesh.nx, ny = mesh.ny;
  const int stride = nx + 1;
  mesh.vertices.reserve(static_cast<size_t>(stride) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(i * mesh.h, j * mesh.h);

  mesh.triangles.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * stride + i, v10 = v00 + 1, v01 = v00 + stride, v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  std::unordered_map<long long, int> edge_index;
  std::vector<int> edge_owner_count;
  std::vector<std::pair<int, int>> first_owner;
  const long long key_base = static_cast<long long>(mesh.vertices.size());
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      const long long key = a * key_base + b;
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back({a, b});
        edge_owner_count.push_back(0);
        first_owner.emplace_back(t, k);
      }
      ++edge_owner_count[it->second];
      mesh.triangle_edges[t][k] = it->second;
    }
  }

  const auto& g = geometry;
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
    if (edge_owner_count[e] != 1) continue;
    const Eigen::Vector2d& p = mesh.vertices[mesh.edges[e][0]];
    const Eigen::Vector2d& q = mesh.vertices[mesh.edges[e][1]];
    BoundaryEdge be;
    be.edge = e;
    be.triangle = first_owner[e].first;
    be.local_edge = first_owner[e].second;
    if (std::abs(p.x()) < kTol && std::abs(q.x()) < kTol) be.side = Side::Left;
    else if (std::abs(p.x() - g.length_x) < kTol && std::abs(q.x() - g.length_x) < kTol)
      be.side = Side::Right;
    else if (std::abs(p.y()) < kTol && std::abs(q.y()) < kTol) be.side = Side::Bottom;
    else be.side = Side::Top;
    const double a = Mesh::side_coordinate(be.side, p);
    const double b = Mesh::side_coordinate(be.side, q);
    if (inside_interval(g.inlet, be.side, a, b)) be.tag = BoundaryTag::Inlet;
    else if (inside_interval(g.outlet, be.side, a, b)) be.tag = BoundaryTag::Outlet;
    else if (inside_interval(g.heater, be.side, a, b)) be.tag = BoundaryTag::Heater;
    else be.tag = BoundaryTag::Wall;
    mesh.boundary_edges.push_back(be);
  }
  // Deterministic order: by side, then along the side.
  std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
            [&mesh](const BoundaryEdge& l, const BoundaryEdge& r) {
              if (l.side != r.side) return l.side < r.side;
              return Mesh::side_coordinate(l.side, mesh.edge_midpoint(l.edge)) <
                     Mesh::side_coordinate(r.side, mesh.edge_midpoint(r.edge));
            });
  return mesh;
}

RegionSet locate_region(const Mesh& mesh, const std::string& name) {
  RegionSet set;
  const auto& g = mesh.geometry;

  auto collect_tag = [&](BoundaryTag tag) {
    set.kind = RegionSet::Kind::Boundary;
    for (int i = 0; i < static_cast<int>(mesh.boundary_edges.size()); ++i) {
      if (mesh.boundary_edges[i].tag == tag) {
        set.indices.push_back(i);
        set.measure += mesh.edge_length(mesh.boundary_edges[i].edge);
      }
    }
    return set;
  };
  if (name == "inlet") return collect_tag(BoundaryTag::Inlet);
  if (name == "outlet") return collect_tag(BoundaryTag::Outlet);
  if (name == "heater") return collect_tag(BoundaryTag::Heater);

  if (auto it = g.boundary_regions.find(name); it != g.boundary_regions.end()) {
    set.kind = RegionSet::Kind::Boundary;
    const BoundaryInterval& iv = it->second;
    for (int i = 0; i < static_cast<int>(mesh.boundary_edges.size()); ++i) {
      const auto& be = mesh.boundary_edges[i];
      const auto& ed = mesh.edges[be.edge];
      const double a = Mesh::side_coordinate(be.side, mesh.vertices[ed[0]]);
      const double b = Mesh::side_coordinate(be.side, mesh.vertices[ed[1]]);
      if (inside_interval(iv, be.side, a, b)) {
        set.indices.push_back(i);
        set.measure += mesh.edge_length(be.edge);
      }
    }
    return set;
  }

  if (auto it = g.domain_regions.find(name); it != g.domain_regions.end()) {
    set.kind = RegionSet::Kind::Domain;
    const Rect& r = it->second;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      bool in = true;
      for (int v : mesh.triangles[t]) {
        const auto& p = mesh.vertices[v];
        in = in && p.x() >= r.x0 - kTol && p.x() <= r.x1 + kTol && p.y() >= r.y0 - kTol &&
             p.y() <= r.y1 + kTol;
      }
      if (in && mesh.triangle_area(t) > 0.0) {
        set.indices.push_back(t);
        set.measure += mesh.triangle_area(t);
      }
    }
    return set;
  }
  throw std::invalid_argument("unknown region '" + name + "'");
}

void write_mesh_listing(const Mesh& mesh, std::ostream& out) {
  out << "# uniform mesh n=" << mesh.n << " h=" << mesh.h << "\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& p : mesh.vertices) out << p.x() << " " << p.y() << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& be : mesh.boundary_edges) {
    const auto& e = mesh.edges[be.edge];
    out << e[0] << " " << e[1] << " " << to_string(be.tag) << "\n";
  }
}

}  // namespace roomreg
