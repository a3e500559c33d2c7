/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef DUCTFLOW_MESH_HPP
#define DUCTFLOW_MESH_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ductflow {

using Index = std::int32_t;

using Vec3 = std::array<double, 3>;

/// Boundary facet: `dim` vertex indices plus an integer tag. The adjacent
/// cell is resolved by Mesh::finalize().
struct BoundaryFacet {
  std::array<Index, 3> v{-1, -1, -1};
  int tag = 0;
  Index cell = -1;
};

/// Measure, outward unit normal and an orthonormal tangent basis of a
/// boundary facet. In 2D only tangents[0] is meaningful.
struct FacetGeometry {
  double measure = 0.0;
  Vec3 normal{0.0, 0.0, 0.0};
  std::array<Vec3, 2> tangents{Vec3{0, 0, 0}, Vec3{0, 0, 0}};
};

/// Simplicial mesh (triangles in 2D, tetrahedra in 3D) with tagged boundary
/// facets. Coordinates are in cm. Instances are immutable after finalize();
/// concurrent readers are safe.
class Mesh {
 public:
  int dim = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<Index, 4>> cells;  // dim+1 entries used per cell
  std::vector<BoundaryFacet> boundary_facets;
  std::map<int, std::string> tag_names;

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_cells() const { return cells.size(); }
  std::size_t n_boundary_facets() const { return boundary_facets.size(); }

  /// Orients every cell to positive signed measure, resolves the cell
  /// adjacent to each boundary facet and validates the mesh invariants:
  /// positive cell measures, each boundary facet belongs to exactly one
  /// cell, and the tagged facets cover the whole mesh boundary exactly once.
  /// Throws std::runtime_error on violation.
  void finalize();

  double cell_measure(Index c) const;
  Vec3 cell_centroid(Index c) const;
  /// Longest edge of the cell.
  double cell_diameter(Index c) const;
  /// Sum of all cell measures.
  double total_measure() const;

  /// Geometry of boundary facet `f` (index into boundary_facets).
  FacetGeometry facet_geometry(Index f) const;
  double facet_measure(Index f) const;

  /// Boundary facet ids carrying `tag`.
  std::vector<Index> facets_with_tag(int tag) const;
  /// Total measure of facets with `tag` (every facet if tag < 0).
  double boundary_measure(int tag = -1) const;
  bool has_tag(int tag) const;
  /// Tag id for a physical name, or -1 when absent.
  int tag_by_name(const std::string& name) const;
  /// All distinct boundary tags, sorted.
  std::vector<int> boundary_tags() const;
  /// Vertex ids incident to facets with `tag`.
  std::vector<Index> vertices_with_tag(int tag) const;

  bool finalized() const { return finalized_; }

 private:
  bool finalized_ = false;
};

/// Structured triangulated rectangle [0,length]x[0,height].
/// Tags: inlet = left edge, wall = top/bottom, outlet_1 = right edge.
Mesh generate_channel(double length_cm, double height_cm, int nx, int ny);

/// Planar Y-shaped domain: a straight trunk that splits into two straight
/// branches at +-45 degrees. The branch ends are vertical cuts so each
/// outlet is planar with a single constant normal. Tags: inlet (trunk left
/// edge), wall, outlet_1 (upper branch end), outlet_2 (lower branch end).
/// The mesh is exactly mirror symmetric about the trunk axis.
Mesh generate_bifurcation(double trunk_len_cm, double branch_len_cm,
                          double width_cm, int resolution);

/// Gmsh MSH 2.2 ASCII reader. Boundary facets take their tags from physical
/// groups; the mesh invariants are validated. Throws on malformed files,
/// unsupported element types and untagged boundary facets.
Mesh read_msh(const std::string& path);

/// Gmsh MSH 2.2 ASCII writer (physical names, nodes, cells and tagged
/// boundary facets).
void write_msh(const Mesh& mesh, const std::string& path);

/// Point location with barycentric output, accelerated by uniform binning.
class CellLocator {
 public:
  explicit CellLocator(const Mesh& mesh);

  /// Returns the id of a cell containing `x` (barycentric coordinates all
  /// >= -tol), or -1. `bary` receives the barycentric coordinates w.r.t.
  /// the returned cell. Among candidates the cell with the largest minimum
  /// barycentric coordinate wins; ties break to the smallest cell id.
  Index locate(const Vec3& x, std::array<double, 4>& bary,
               double tol = 1e-8) const;

  const Mesh& mesh() const { return *mesh_; }

 private:
  const Mesh* mesh_;
  Vec3 lo_{}, hi_{};
  std::array<int, 3> nbins_{1, 1, 1};
  std::vector<std::vector<Index>> bins_;

  int bin_of(const Vec3& x) const;
};

}  // namespace ductflow

#endif  // DUCTFLOW_MESH_HPP
