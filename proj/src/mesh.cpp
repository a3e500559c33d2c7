/*
 * (C) Copyright 2026 ductflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "ductflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ductflow {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

double signed_measure(const Mesh& m, const std::array<Index, 4>& c, int dim) {
  const Vec3& p0 = m.vertices[c[0]];
  if (dim == 2) {
    Vec3 e1 = sub(m.vertices[c[1]], p0);
    Vec3 e2 = sub(m.vertices[c[2]], p0);
    return 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
  }
  Vec3 e1 = sub(m.vertices[c[1]], p0);
  Vec3 e2 = sub(m.vertices[c[2]], p0);
  Vec3 e3 = sub(m.vertices[c[3]], p0);
  return dot(e1, cross(e2, e3)) / 6.0;
}

// Sorted vertex tuple used as a facet key.
std::array<Index, 3> facet_key(std::array<Index, 3> f) {
  std::sort(f.begin(), f.end());
  return f;
}

struct FacetKeyHash {
  std::size_t operator()(const std::array<Index, 3>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (Index v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

std::string facet_to_string(const BoundaryFacet& f, int dim) {
  std::ostringstream os;
  os << "(" << f.v[0] << ", " << f.v[1];
  if (dim == 3) os << ", " << f.v[2];
  os << ")";
  return os.str();
}

}  // namespace

void Mesh::finalize() {
  if (dim != 2 && dim != 3)
    throw std::runtime_error("mesh: dim must be 2 or 3");
  if (cells.empty()) throw std::runtime_error("mesh: no cells");
  const int nv_cell = dim + 1;
  const int nv_facet = dim;

  for (auto& c : cells) {
    for (int i = 0; i < nv_cell; ++i)
      if (c[i] < 0 || static_cast<std::size_t>(c[i]) >= vertices.size())
        throw std::runtime_error("mesh: cell vertex index out of range");
    double s = signed_measure(*this, c, dim);
    if (s < 0) {
      std::swap(c[1], c[2]);
      s = -s;
    }
    if (!(s > 0))
      throw std::runtime_error("mesh: degenerate cell with zero measure");
  }

  // Facet key -> (adjacent cell count, one adjacent cell id).
  std::unordered_map<std::array<Index, 3>, std::pair<int, Index>, FacetKeyHash>
      adj;
  adj.reserve(cells.size() * (nv_cell));
  for (Index c = 0; c < static_cast<Index>(cells.size()); ++c) {
    for (int skip = 0; skip < nv_cell; ++skip) {
      std::array<Index, 3> f{-1, -1, -1};
      int k = 0;
      for (int i = 0; i < nv_cell; ++i)
        if (i != skip) f[k++] = cells[c][i];
      auto key = facet_key(f);
      auto it = adj.find(key);
      if (it == adj.end())
        adj.emplace(key, std::make_pair(1, c));
      else
        it->second.first += 1;
    }
  }

  std::set<std::array<Index, 3>> tagged;
  for (auto& bf : boundary_facets) {
    for (int i = 0; i < nv_facet; ++i)
      if (bf.v[i] < 0 || static_cast<std::size_t>(bf.v[i]) >= vertices.size())
        throw std::runtime_error("mesh: facet vertex index out of range");
    auto key = facet_key(bf.v);
    auto it = adj.find(key);
    if (it == adj.end())
      throw std::runtime_error("mesh: boundary facet " +
                               facet_to_string(bf, dim) +
                               " does not match any cell facet");
    if (it->second.first != 1)
      throw std::runtime_error("mesh: boundary facet " +
                               facet_to_string(bf, dim) +
                               " is interior (shared by multiple cells)");
    bf.cell = it->second.second;
    if (!tagged.insert(key).second)
      throw std::runtime_error("mesh: boundary facet " +
                               facet_to_string(bf, dim) +
                               " is tagged more than once");
  }

  // Every topological boundary facet must carry exactly one tag.
  for (const auto& [key, cnt] : adj) {
    if (cnt.first == 1 && !tagged.count(key)) {
      BoundaryFacet f;
      f.v = key;
      throw std::runtime_error("mesh: untagged boundary facet " +
                               facet_to_string(f, dim));
    }
  }

  finalized_ = true;
}

double Mesh::cell_measure(Index c) const {
  return std::abs(signed_measure(*this, cells[c], dim));
}

Vec3 Mesh::cell_centroid(Index c) const {
  Vec3 r{0, 0, 0};
  for (int i = 0; i <= dim; ++i) {
    const Vec3& p = vertices[cells[c][i]];
    for (int k = 0; k < 3; ++k) r[k] += p[k];
  }
  return scale(r, 1.0 / (dim + 1));
}

double Mesh::cell_diameter(Index c) const {
  double d = 0.0;
  for (int i = 0; i <= dim; ++i)
    for (int j = i + 1; j <= dim; ++j)
      d = std::max(d, norm(sub(vertices[cells[c][i]], vertices[cells[c][j]])));
  return d;
}

double Mesh::total_measure() const {
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(cells.size()); ++c)
    s += cell_measure(c);
  return s;
}

FacetGeometry Mesh::facet_geometry(Index f) const {
  if (f < 0 || static_cast<std::size_t>(f) >= boundary_facets.size())
    throw std::runtime_error("mesh: facet id " + std::to_string(f) +
                             " is not a boundary facet");
  const BoundaryFacet& bf = boundary_facets[f];
  FacetGeometry g;
  const Vec3& p0 = vertices[bf.v[0]];
  const Vec3& p1 = vertices[bf.v[1]];
  if (dim == 2) {
    Vec3 t = sub(p1, p0);
    g.measure = norm(t);
    t = scale(t, 1.0 / g.measure);
    g.tangents[0] = t;
    g.normal = {t[1], -t[0], 0.0};
  } else {
    const Vec3& p2 = vertices[bf.v[2]];
    Vec3 n = cross(sub(p1, p0), sub(p2, p0));
    double nn = norm(n);
    g.measure = 0.5 * nn;
    g.normal = scale(n, 1.0 / nn);
    Vec3 t1 = sub(p1, p0);
    t1 = scale(t1, 1.0 / norm(t1));
    g.tangents[0] = t1;
    g.tangents[1] = cross(g.normal, t1);
  }
  // Orient outward: away from the adjacent cell centroid.
  Vec3 fc{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    const Vec3& p = vertices[bf.v[i]];
    for (int k = 0; k < 3; ++k) fc[k] += p[k] / dim;
  }
  Vec3 cc = cell_centroid(bf.cell);
  if (dot(g.normal, sub(fc, cc)) < 0) g.normal = scale(g.normal, -1.0);
  return g;
}

double Mesh::facet_measure(Index f) const { return facet_geometry(f).measure; }

std::vector<Index> Mesh::facets_with_tag(int tag) const {
  std::vector<Index> out;
  for (Index f = 0; f < static_cast<Index>(boundary_facets.size()); ++f)
    if (boundary_facets[f].tag == tag) out.push_back(f);
  return out;
}

double Mesh::boundary_measure(int tag) const {
  double s = 0.0;
  for (Index f = 0; f < static_cast<Index>(boundary_facets.size()); ++f)
    if (tag < 0 || boundary_facets[f].tag == tag) s += facet_measure(f);
  return s;
}

bool Mesh::has_tag(int tag) const {
  for (const auto& bf : boundary_facets)
    if (bf.tag == tag) return true;
  return false;
}

int Mesh::tag_by_name(const std::string& name) const {
  for (const auto& [tag, n] : tag_names)
    if (n == name) return tag;
  return -1;
}

std::vector<int> Mesh::boundary_tags() const {
  std::set<int> tags;
  for (const auto& bf : boundary_facets) tags.insert(bf.tag);
  return {tags.begin(), tags.end()};
}

std::vector<Index> Mesh::vertices_with_tag(int tag) const {
  std::set<Index> vs;
  for (const auto& bf : boundary_facets)
    if (bf.tag == tag)
      for (int i = 0; i < dim; ++i) vs.insert(bf.v[i]);
  return {vs.begin(), vs.end()};
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {
constexpr int kTagInlet = 1;
constexpr int kTagWall = 2;
constexpr int kTagOutlet1 = 3;
constexpr int kTagOutlet2 = 4;
}  // namespace

Mesh generate_channel(double length_cm, double height_cm, int nx, int ny) {
  if (!(length_cm > 0) || !(height_cm > 0))
    throw std::invalid_argument("generate_channel: dimensions must be positive");
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("generate_channel: nx, ny must be >= 1");

  Mesh m;
  m.dim = 2;
  m.tag_names = {{kTagInlet, "inlet"}, {kTagWall, "wall"},
                 {kTagOutlet1, "outlet_1"}};
  auto vid = [nx, ny](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back(
          {length_cm * i / nx, height_cm * j / ny, 0.0});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Index v00 = vid(i, j), v10 = vid(i + 1, j);
      Index v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.cells.push_back({v00, v10, v11, -1});
      m.cells.push_back({v00, v11, v01, -1});
    }
  for (int j = 0; j < ny; ++j) {
    m.boundary_facets.push_back({{vid(0, j), vid(0, j + 1), -1}, kTagInlet, -1});
    m.boundary_facets.push_back(
        {{vid(nx, j), vid(nx, j + 1), -1}, kTagOutlet1, -1});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary_facets.push_back({{vid(i, 0), vid(i + 1, 0), -1}, kTagWall, -1});
    m.boundary_facets.push_back(
        {{vid(i, ny), vid(i + 1, ny), -1}, kTagWall, -1});
  }
  m.finalize();
  return m;
}

namespace {

// Structured quad patch split crisscross (4 triangles around the quad
// center), which keeps the triangulation exactly mirror symmetric.
struct PatchBuilder {
  std::vector<Vec3> verts;
  std::vector<std::array<Index, 4>> cells;
  std::unordered_map<std::string, Index> lut;

  Index add_vertex(double x, double y) {
    // Snap key; merges coincident block-interface vertices.
    char key[64];
    std::snprintf(key, sizeof(key), "%.12e|%.12e", x + 0.0, y + 0.0);
    auto it = lut.find(key);
    if (it != lut.end()) return it->second;
    Index id = static_cast<Index>(verts.size());
    verts.push_back({x, y, 0.0});
    lut.emplace(key, id);
    return id;
  }

  void add_quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    // a-b-c-d counterclockwise
    Index va = add_vertex(a[0], a[1]);
    Index vb = add_vertex(b[0], b[1]);
    Index vc = add_vertex(c[0], c[1]);
    Index vd = add_vertex(d[0], d[1]);
    Index vm = add_vertex(0.25 * (a[0] + b[0] + c[0] + d[0]),
                          0.25 *(a[1] + b[1] + c[1] + d[1]));
    cells.push_back({va, vb, vm, -1});
    cells.push_back({vb, vc, vm, -1});
    cells.push_back({vc, vd, vm, -1});
    cells.push_back({vd, va, vm, -1});
  }
};

}  // namespace

Mesh generate_bifurcation(double trunk_len_cm, double branch_len_cm,
                          double width_cm, int resolution) {
  if (!(trunk_len_cm > 0) || !(branch_len_cm > 0) || !(width_cm > 0))
    throw std::invalid_argument(
        "generate_bifurcation: dimensions must be positive");
  if (resolution < 1)
    throw std::invalid_argument("generate_bifurcation: resolution must be >= 1");

  const double half = 0.5 * width_cm;
  const double h = half / resolution;
  const double c45 = std::sqrt(0.5), s45 = std::sqrt(0.5);
  const int nt = std::max(1, static_cast<int>(std::lround(trunk_len_cm / h)));
  const int nb = std::max(1, static_cast<int>(std::lround(branch_len_cm / h)));
  const int nw = resolution;  // per half width
  const double x_end = trunk_len_cm + branch_len_cm * c45;

  PatchBuilder pb;
  // Coordinates are always length * (integer fraction) so that block
  // interface vertices come out bit-identical and merge cleanly.
  auto frac = [](int i, int n) { return static_cast<double>(i) / n; };
  // Trunk [0, Lt] x [-half, half]; rows laid out symmetric about y = 0.
  auto trunk_pt = [&](int i, int j) {
    return Vec3{trunk_len_cm * frac(i, nt), half * frac(j, nw), 0.0};
  };
  for (int i = 0; i < nt; ++i)
    for (int j = -nw; j < nw; ++j)
      pb.add_quad(trunk_pt(i, j), trunk_pt(i + 1, j), trunk_pt(i + 1, j + 1),
                  trunk_pt(i, j + 1));
  // Branches: parallelograms sheared at +-45 degrees off the trunk end.
  // P(xi, eta) = (Lt + xi Lb c45, sgn * (xi Lb s45 + eta half))
  auto branch_pt = [&](int i, int j, double sgn) {
    double xi = frac(i, nb), eta = frac(j, nw);
    return Vec3{trunk_len_cm + xi * (branch_len_cm * c45),
                sgn * (xi * (branch_len_cm * s45) + half * eta), 0.0};
  };
  for (double sgn : {1.0, -1.0})
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nw; ++j)
        pb.add_quad(branch_pt(i, j, sgn), branch_pt(i + 1, j, sgn),
                    branch_pt(i + 1, j + 1, sgn), branch_pt(i, j + 1, sgn));

  Mesh m;
  m.dim = 2;
  m.vertices = std::move(pb.verts);
  m.cells = std::move(pb.cells);
  m.tag_names = {{kTagInlet, "inlet"},
                 {kTagWall, "wall"},
                 {kTagOutlet1, "outlet_1"},
                 {kTagOutlet2, "outlet_2"}};

  // Tag topological boundary facets by location.
  std::unordered_map<std::array<Index, 3>, int, FacetKeyHash> count;
  for (const auto& cell : m.cells)
    for (int skip = 0; skip < 3; ++skip) {
      std::array<Index, 3> f{-1, -1, -1};
      int k = 0;
      for (int i = 0; i < 3; ++i)
        if (i != skip) f[k++] = cell[i];
      count[facet_key(f)] += 1;
    }
  const double geom_tol = 1e-9 * std::max({trunk_len_cm, branch_len_cm, width_cm});
  for (const auto& [key, cnt] : count) {
    if (cnt != 1) continue;
    const Vec3& a = m.vertices[key[0]];
    const Vec3& b = m.vertices[key[1]];
    double xm = 0.5 * (a[0] + b[0]);
    double ym = 0.5 * (a[1] + b[1]);
    int tag = kTagWall;
    if (std::abs(a[0]) < geom_tol && std::abs(b[0]) < geom_tol)
      tag = kTagInlet;
    else if (std::abs(a[0] - x_end) < geom_tol && std::abs(b[0] - x_end) < geom_tol)
      tag = (ym > 0) ? kTagOutlet1 : kTagOutlet2;
    (void)xm;
    m.boundary_facets.push_back({{key[0], key[1], -1}, tag, -1});
  }
  m.finalize();
  return m;
}

// ---------------------------------------------------------------------------
// Gmsh MSH 2.2 ASCII
// ---------------------------------------------------------------------------

void write_msh(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_msh: cannot open " + path);
  os.precision(17);
  os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  os << "$PhysicalNames\n" << mesh.tag_names.size() << "\n";
  for (const auto& [tag, name] : mesh.tag_names)
    os << (mesh.dim - 1) << " " << tag << " \"" << name << "\"\n";
  os << "$EndPhysicalNames\n";
  os << "$Nodes\n" << mesh.n_vertices() << "\n";
  for (std::size_t i = 0; i < mesh.n_vertices(); ++i) {
    const Vec3& p = mesh.vertices[i];
    os << (i + 1) << " " << p[0] << " " << p[1] << " " << p[2] << "\n";
  }
  os << "$EndNodes\n";
  os << "$Elements\n"
     << (mesh.n_cells() + mesh.n_boundary_facets()) << "\n";
  std::size_t eid = 1;
  const int facet_type = (mesh.dim == 2) ? 1 : 2;  // line / triangle
  const int cell_type = (mesh.dim == 2) ? 2 : 4;   // triangle / tetrahedron
  for (const auto& bf : mesh.boundary_facets) {
    os << eid++ << " " << facet_type << " 2 " << bf.tag << " " << bf.tag;
    for (int i = 0; i < mesh.dim; ++i) os << " " << (bf.v[i] + 1);
    os << "\n";
  }
  for (const auto& c : mesh.cells) {
    os << eid++ << " " << cell_type << " 2 0 0";
    for (int i = 0; i <= mesh.dim; ++i) os << " " << (c[i] + 1);
    os << "\n";
  }
  os << "$EndElements\n";
  if (!os) throw std::runtime_error("write_msh: write failed for " + path);
}

Mesh read_msh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_msh: cannot open " + path);

  Mesh m;
  std::string line;
  std::map<std::size_t, Index> node_id;  // file node id -> vertex index
  struct RawElem {
    int type;
    int tag;
    std::vector<std::size_t> nodes;
  };
  std::vector<RawElem> elems;
  bool have_format = false;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(is, out)) {
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  };

  while (next_line(line)) {
    if (line == "$MeshFormat") {
      if (!next_line(line)) throw std::runtime_error("read_msh: truncated file");
      std::istringstream ss(line);
      double version = 0;
      int file_type = 0;
      ss >> version >> file_type;
      if (!(version >= 2.0 && version < 3.0) || file_type != 0)
        throw std::runtime_error(
            "read_msh: unsupported format (need MSH 2.2 ASCII)");
      have_format = true;
      while (next_line(line) && line != "$EndMeshFormat") {}
    } else if (line == "$PhysicalNames") {
      if (!next_line(line)) throw std::runtime_error("read_msh: truncated file");
      std::size_t n = std::stoul(line);
      for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(line))
          throw std::runtime_error("read_msh: truncated $PhysicalNames");
        std::istringstream ss(line);
        int d = 0, tag = 0;
        std::string name;
        ss >> d >> tag;
        std::getline(ss, name);
        auto a = name.find('"'), b = name.rfind('"');
        if (a != std::string::npos && b != std::string::npos && b > a)
          name = name.substr(a + 1, b - a - 1);
        m.tag_names[tag] = name;
      }
      while (next_line(line) && line != "$EndPhysicalNames") {}
    } else if (line == "$Nodes") {
      if (!next_line(line)) throw std::runtime_error("read_msh: truncated file");
      std::size_t n = std::stoul(line);
      for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(line)) throw std::runtime_error("read_msh: truncated $Nodes");
        std::istringstream ss(line);
        std::size_t id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z))
          throw std::runtime_error("read_msh: malformed node line: " + line);
        node_id[id] = static_cast<Index>(m.vertices.size());
        m.vertices.push_back({x, y, z});
      }
      while (next_line(line) && line != "$EndNodes") {}
    } else if (line == "$Elements") {
      if (!next_line(line)) throw std::runtime_error("read_msh: truncated file");
      std::size_t n = std::stoul(line);
      for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(line))
          throw std::runtime_error("read_msh: truncated $Elements");
        std::istringstream ss(line);
        std::size_t id = 0;
        int type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags))
          throw std::runtime_error("read_msh: malformed element line: " + line);
        int phys = 0;
        for (int t = 0; t < ntags; ++t) {
          int v = 0;
          ss >> v;
          if (t == 0) phys = v;
        }
        static const std::map<int, int> node_count{{1, 2}, {2, 3}, {4, 4},
                                                   {15, 1}};
        auto nc = node_count.find(type);
        if (nc == node_count.end())
          throw std::runtime_error("read_msh: unsupported element type " +
                                   std::to_string(type));
        RawElem e;
        e.type = type;
        e.tag = phys;
        e.nodes.resize(nc->second);
        for (int k = 0; k < nc->second; ++k)
          if (!(ss >> e.nodes[k]))
            throw std::runtime_error("read_msh: malformed element line: " + line);
        elems.push_back(std::move(e));
      }
      while (next_line(line) && line != "$EndElements") {}
    }
    // other sections ignored
  }
  if (!have_format)
    throw std::runtime_error("read_msh: missing $MeshFormat section");
  if (m.vertices.empty()) throw std::runtime_error("read_msh: no nodes");

  bool has_tet = false, has_tri = false, has_line = false;
  for (const auto& e : elems) {
    has_tet |= e.type == 4;
    has_tri |= e.type == 2;
    has_line |= e.type == 1;
  }
  if (has_tet)
    m.dim = 3;
  else if (has_tri)
    m.dim = 2;
  else
    throw std::runtime_error("read_msh: no triangle or tetrahedron cells");
  (void)has_line;

  const int cell_type = (m.dim == 2) ? 2 : 4;
  const int facet_type = (m.dim == 2) ? 1 : 2;
  auto map_node = [&](std::size_t id) {
    auto it = node_id.find(id);
    if (it == node_id.end())
      throw std::runtime_error("read_msh: element references unknown node " +
                               std::to_string(id));
    return it->second;
  };
  for (const auto& e : elems) {
    if (e.type == 15) continue;  // points carry no role here
    if (e.type == cell_type) {
      std::array<Index, 4> c{-1, -1, -1, -1};
      for (std::size_t k = 0; k < e.nodes.size(); ++k) c[k] = map_node(e.nodes[k]);
      m.cells.push_back(c);
    } else if (e.type == facet_type) {
      BoundaryFacet bf;
      for (std::size_t k = 0; k < e.nodes.size(); ++k) bf.v[k] = map_node(e.nodes[k]);
      bf.tag = e.tag;
      m.boundary_facets.push_back(bf);
    } else {
      throw std::runtime_error(
          "read_msh: unsupported element type " + std::to_string(e.type) +
          " for a " + std::to_string(m.dim) + "D mesh");
    }
  }

  m.finalize();
  return m;
}

// ---------------------------------------------------------------------------
// CellLocator
// ---------------------------------------------------------------------------

namespace {

// Barycentric coordinates of x in cell c; returns min coordinate.
double barycentric(const Mesh& m, Index c, const Vec3& x,
                   std::array<double, 4>& bary) {
  const auto& cell = m.cells[c];
  const Vec3& p0 = m.vertices[cell[0]];
  if (m.dim == 2) {
    Vec3 e1 = sub(m.vertices[cell[1]], p0);
    Vec3 e2 = sub(m.vertices[cell[2]], p0);
    Vec3 r = sub(x, p0);
    double det = e1[0] * e2[1] - e1[1] * e2[0];
    double l1 = (r[0] * e2[1] - r[1] * e2[0]) / det;
    double l2 = (e1[0] * r[1] - e1[1] * r[0]) / det;
    bary = {1.0 - l1 - l2, l1, l2, 0.0};
    return std::min({bary[0], bary[1], bary[2]});
  }
  Vec3 e1 = sub(m.vertices[cell[1]], p0);
  Vec3 e2 = sub(m.vertices[cell[2]], p0);
  Vec3 e3 = sub(m.vertices[cell[3]], p0);
  Vec3 r = sub(x, p0);
  double det = dot(e1, cross(e2, e3));
  double l1 = dot(r, cross(e2, e3)) / det;
  double l2 = dot(e1, cross(r, e3)) / det;
  double l3 = dot(e1, cross(e2, r)) / det;
  bary = {1.0 - l1 - l2 - l3, l1, l2, l3};
  return std::min({bary[0], bary[1], bary[2], bary[3]});
}

}  // namespace

CellLocator::CellLocator(const Mesh& mesh) : mesh_(&mesh) {
  lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::max()};
  hi_ = {std::numeric_limits<double>::lowest(),
         std::numeric_limits<double>::lowest(),
         std::numeric_limits<double>::lowest()};
  for (const Vec3& p : mesh.vertices)
    for (int k = 0; k < 3; ++k) {
      lo_[k] = std::min(lo_[k], p[k]);
      hi_[k] = std::max(hi_[k], p[k]);
    }
  // pad so boundary points land inside
  for (int k = 0; k < 3; ++k) {
    double pad = 1e-9 * std::max(1.0, hi_[k] - lo_[k]);
    lo_[k] -= pad;
    hi_[k] += pad;
  }
  int target =
      std::max(1, static_cast<int>(std::pow(static_cast<double>(mesh.n_cells()),
                                            1.0 / mesh.dim)));
  for (int k = 0; k < mesh.dim; ++k) nbins_[k] = std::min(target, 64);
  bins_.resize(static_cast<std::size_t>(nbins_[0]) * nbins_[1] * nbins_[2]);

  auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); };
  for (Index c = 0; c < static_cast<Index>(mesh.n_cells()); ++c) {
    Vec3 clo{lo_[0], lo_[1], lo_[2]}, chi{lo_[0], lo_[1], lo_[2]};
    for (int k = 0; k < 3; ++k) {
      clo[k] = std::numeric_limits<double>::max();
      chi[k] = std::numeric_limits<double>::lowest();
    }
    for (int i = 0; i <= mesh.dim; ++i) {
      const Vec3& p = mesh.vertices[mesh.cells[c][i]];
      for (int k = 0; k < 3; ++k) {
        clo[k] = std::min(clo[k], p[k]);
        chi[k] = std::max(chi[k], p[k]);
      }
    }
    std::array<int, 3> blo{0, 0, 0}, bhi{0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      double span = hi_[k] - lo_[k];
      blo[k] = clampi(static_cast<int>((clo[k] - lo_[k]) / span * nbins_[k]), 0,
                      nbins_[k] - 1);
      bhi[k] = clampi(static_cast<int>((chi[k] - lo_[k]) / span * nbins_[k]), 0,
                      nbins_[k] - 1);
    }
    for (int bx = blo[0]; bx <= bhi[0]; ++bx)
      for (int by = blo[1]; by <= bhi[1]; ++by)
        for (int bz = blo[2]; bz <= bhi[2]; ++bz)
          bins_[(static_cast<std::size_t>(bz) * nbins_[1] + by) * nbins_[0] + bx]
              .push_back(c);
  }
}

int CellLocator::bin_of(const Vec3& x) const {
  std::array<int, 3> b{0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    double span = hi_[k] - lo_[k];
    int v = static_cast<int>((x[k] - lo_[k]) / span * nbins_[k]);
    b[k] = std::max(0, std::min(v, nbins_[k] - 1));
  }
  return (b[2] * nbins_[1] + b[1]) * nbins_[0] + b[0];
}

Index CellLocator::locate(const Vec3& x, std::array<double, 4>& bary,
                          double tol) const {
  auto try_candidates = [&](const std::vector<Index>& cand) -> Index {
    Index best = -1;
    double best_min = -std::numeric_limits<double>::max();
    std::array<double, 4> b{};
    for (Index c : cand) {
      double mn = barycentric(*mesh_, c, x, b);
      if (mn > best_min) {
        best_min = mn;
        best = c;
        bary = b;
      }
    }
    return (best >= 0 && best_min >= -tol) ? best : Index{-1};
  };
  for (int k = 0; k < mesh_->dim; ++k)
    if (x[k] < lo_[k] - tol || x[k] > hi_[k] + tol) return -1;
  Index found = try_candidates(bins_[bin_of(x)]);
  if (found >= 0) return found;
  // Points near bin borders can miss; fall back to a full scan.
  std::vector<Index> all(mesh_->n_cells());
  for (Index c = 0; c < static_cast<Index>(all.size()); ++c) all[c] = c;
  return try_candidates(all);
}

}  // namespace ductflow
