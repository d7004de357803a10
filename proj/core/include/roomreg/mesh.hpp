#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace roomreg {

enum class Side { Left, Right, Bottom, Top };

/// Segment of one side of the rectangle, parametrized by the coordinate
/// that varies along that side (y for left/right, x for bottom/top).
struct BoundaryInterval {
  Side side = Side::Left;
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool operator==(const BoundaryInterval&) const = default;
};

struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool operator==(const Rect&) const = default;
};

struct RoomGeometry {
  double length_x = 1.0;
  double length_y = 1.0;
  BoundaryInterval inlet;
  BoundaryInterval outlet;
  BoundaryInterval heater;
  /// Observation subdomains, keyed by name.
  std::map<std::string, Rect> domain_regions;
  /// Extra observation boundary segments; "inlet", "outlet" and "heater"
  /// are always available by name.
  std::map<std::string, BoundaryInterval> boundary_regions;

  bool operator==(const RoomGeometry&) const = default;

  /// Throws std::invalid_argument if vents overlap, the heater leaves the
  /// wall, or a region sticks out of the room.
  void validate() const;
};

/// The room of the reference experiment: unit square, inlet on the left
/// wall, outlet on the right wall, heater strip on the floor.
RoomGeometry reference_room();

enum class BoundaryTag { Wall, Inlet, Outlet, Heater };

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
  int edge = -1;        // index into Mesh::edges
  int triangle = -1;    // owning triangle
  int local_edge = -1;  // local edge k of the triangle (opposite vertex k)
  BoundaryTag tag = BoundaryTag::Wall;
  Side side = Side::Left;
};

/// Uniform criss triangulation of [0,Lx]x[0,Ly]: every grid cell is split
/// along its lower-left to upper-right diagonal.
struct Mesh {
  RoomGeometry geometry;
  int n = 0;  // subdivisions per unit length
  int nx = 0;
  int ny = 0;
  double h = 0.0;

  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangle_edges;  // edge k opposite vertex k
  std::vector<BoundaryEdge> boundary_edges;

  double triangle_area(int t) const;
  Eigen::Vector2d edge_midpoint(int e) const;
  double edge_length(int e) const;
  /// Coordinate of a boundary point along its side.
  static double side_coordinate(Side side, const Eigen::Vector2d& p);
};

Mesh build_mesh(const RoomGeometry& geometry, int n);

struct RegionSet {
  enum class Kind { Domain, Boundary };
  Kind kind = Kind::Domain;
  /// Triangle indices (domain regions) or indices into Mesh::boundary_edges.
  std::vector<int> indices;
  double measure = 0.0;  // area or length covered by the selected cells
};

RegionSet locate_region(const Mesh& mesh, const std::string& name);

/// Plain-text vertex/triangle/boundary listing for debugging.
void write_mesh_listing(const Mesh& mesh, std::ostream& out);

}  // namespace roomreg
