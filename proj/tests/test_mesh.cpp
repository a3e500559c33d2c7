#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "ductflow/mesh.hpp"
#include "test_utils.hpp"

using namespace ductflow;

TEST_CASE("channel generator: minimal unit square") {
  Mesh m = generate_channel(1.0, 1.0, 1, 1);
  CHECK(m.n_cells() == 2);
  CHECK(m.n_vertices() == 4);
  CHECK(m.n_boundary_facets() == 4);
  for (const auto& bf : m.boundary_facets) CHECK(bf.tag > 0);
  CHECK(m.tag_by_name("inlet") == 1);
  CHECK(m.tag_by_name("outlet_1") == 3);
}

TEST_CASE("channel generator: perimeter and area") {
  Mesh m = generate_channel(2.0, 1.0, 2, 1);
  CHECK(m.n_cells() == 4);
  CHECK(m.boundary_measure() == doctest::Approx(6.0).epsilon(1e-12));

  Mesh fine = generate_channel(4.0, 0.5, 40, 5);
  CHECK(fine.total_measure() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("channel generator rejects bad input") {
  CHECK_THROWS(generate_channel(-1.0, 1.0, 1, 1));
  CHECK_THROWS(generate_channel(1.0, 0.0, 1, 1));
  CHECK_THROWS(generate_channel(1.0, 1.0, 0, 1));
}

TEST_CASE("bifurcation generator: symmetry and tagging") {
  Mesh m = generate_bifurcation(1.0, 1.0, 0.5, 2);
  double q1 = m.boundary_measure(m.tag_by_name("outlet_1"));
  double q2 = m.boundary_measure(m.tag_by_name("outlet_2"));
  CHECK(q1 == doctest::Approx(q2).epsilon(1e-10));
  CHECK(q1 > 0.0);
  // every boundary facet tagged with a known role
  std::set<int> tags{1, 2, 3, 4};
  for (const auto& bf : m.boundary_facets) CHECK(tags.count(bf.tag) == 1);
  // analytic area: trunk + two branches (parallelograms of base half-width)
  double expected = 1.0 * 0.5 + 2.0 * (1.0 * std::sqrt(0.5) * 0.25);
  CHECK(m.total_measure() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("bifurcation generator: refinement roughly quadruples cells") {
  Mesh coarse = generate_bifurcation(1.0, 1.0, 0.5, 2);
  Mesh fine = generate_bifurcation(1.0, 1.0, 0.5, 4);
  double ratio = static_cast<double>(fine.n_cells()) / coarse.n_cells();
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("bifurcation generator rejects degenerate input") {
  CHECK_THROWS(generate_bifurcation(0.0, 1.0, 0.5, 2));
  CHECK_THROWS(generate_bifurcation(1.0, 1.0, -0.5, 2));
  CHECK_THROWS(generate_bifurcation(1.0, 1.0, 0.5, 0));
}

TEST_CASE("facet geometry on canonical meshes") {
  SUBCASE("right edge of the unit square") {
    Mesh m = generate_channel(1.0, 1.0, 1, 1);
    auto right = m.facets_with_tag(m.tag_by_name("outlet_1"));
    REQUIRE(right.size() == 1);
    FacetGeometry g = m.facet_geometry(right[0]);
    CHECK(g.measure == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.normal[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.normal[1] == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("hypotenuse of the unit triangle") {
    Mesh m = dftest::unit_triangle();
    FacetGeometry g = m.facet_geometry(1);  // edge (1,2)
    double s = 1.0 / std::sqrt(2.0);
    CHECK(g.normal[0] == doctest::Approx(s).epsilon(1e-14));
    CHECK(g.normal[1] == doctest::Approx(s).epsilon(1e-14));
    CHECK(g.measure == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("triangle facet of a tetrahedron below the plane") {
    Mesh m = dftest::tet_below_plane();
    FacetGeometry g = m.facet_geometry(0);
    CHECK(g.normal[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.normal[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g.normal[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.measure == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("invalid facet id") {
    Mesh m = dftest::unit_triangle();
    CHECK_THROWS(m.facet_geometry(17));
  }
}

TEST_CASE("outward normal property on generated meshes") {
  for (const Mesh& m : {generate_channel(2.0, 1.0, 4, 3),
                        generate_bifurcation(1.0, 0.8, 0.5, 2)}) {
    for (Index f = 0; f < static_cast<Index>(m.n_boundary_facets()); ++f) {
      FacetGeometry g = m.facet_geometry(f);
      const auto& bf = m.boundary_facets[f];
      Vec3 fc{0, 0, 0};
      for (int i = 0; i < m.dim; ++i)
        for (int k = 0; k < 3; ++k) fc[k] += m.vertices[bf.v[i]][k] / m.dim;
      Vec3 cc = m.cell_centroid(bf.cell);
      double d = 0;
      for (int k = 0; k < 3; ++k) d += g.normal[k] * (fc[k] - cc[k]);
      CHECK(d > 0.0);
    }
  }
}

TEST_CASE("msh round trip") {
  Mesh m = generate_bifurcation(1.0, 1.0, 0.5, 2);
  std::string path = (std::filesystem::temp_directory_path() /
                      "ductflow_test_roundtrip.msh").string();
  write_msh(m, path);
  Mesh r = read_msh(path);
  REQUIRE(r.n_vertices() == m.n_vertices());
  REQUIRE(r.n_cells() == m.n_cells());
  REQUIRE(r.n_boundary_facets() == m.n_boundary_facets());
  CHECK(r.dim == m.dim);
  CHECK(r.tag_names == m.tag_names);
  for (std::size_t i = 0; i < m.n_vertices(); ++i)
    for (int k = 0; k < 3; ++k)
      CHECK(r.vertices[i][k] == doctest::Approx(m.vertices[i][k]).epsilon(1e-15));
  for (std::size_t c = 0; c < m.n_cells(); ++c)
    for (int i = 0; i <= m.dim; ++i) CHECK(r.cells[c][i] == m.cells[c][i]);
  std::multiset<int> ta, tb;
  for (const auto& bf : m.boundary_facets) ta.insert(bf.tag);
  for (const auto& bf : r.boundary_facets) tb.insert(bf.tag);
  CHECK(ta == tb);
  std::remove(path.c_str());
}

TEST_CASE("msh round trip in 3d") {
  Mesh m = dftest::tet_below_plane();
  std::string path = (std::filesystem::temp_directory_path() /
                      "ductflow_test_roundtrip3d.msh").string();
  write_msh(m, path);
  Mesh r = read_msh(path);
  CHECK(r.dim == 3);
  CHECK(r.n_cells() == 1);
  CHECK(r.n_boundary_facets() == 4);
  std::remove(path.c_str());
}

TEST_CASE("msh reader rejects unsupported element types") {
  std::string path = (std::filesystem::temp_directory_path() /
                      "ductflow_test_quad.msh").string();
  {
    std::ofstream os(path);
    os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
       << "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
       << "$Elements\n1\n1 3 2 1 1 1 2 3 4\n$EndElements\n";
  }
  CHECK_THROWS_WITH_AS(read_msh(path),
                       doctest::Contains("unsupported element type"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("msh reader reports untagged boundary facets") {
  Mesh m = generate_channel(1.0, 1.0, 1, 1);
  std::string path = (std::filesystem::temp_directory_path() /
                      "ductflow_test_untagged.msh").string();
  write_msh(m, path);
  // drop the first line element (a tagged boundary edge)
  std::ifstream is(path);
  std::string content((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
  is.close();
  auto pos = content.find("$Elements");
  auto nl = content.find('\n', pos);          // end of $Elements
  auto nl2 = content.find('\n', nl + 1);      // end of count line
  auto nl3 = content.find('\n', nl2 + 1);     // end of first element line
  std::string patched = content.substr(0, nl + 1) + "5" +
                        content.substr(nl2, 0) + content.substr(nl3);
  {
    std::ofstream os(path);
    os << patched;
  }
  CHECK_THROWS_WITH_AS(read_msh(path),
                       doctest::Contains("untagged boundary facet"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("finalize validates facet-cell incidence") {
  Mesh m;
  m.dim = 2;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  m.cells = {{0, 1, 2, -1}, {1, 3, 2, -1}};
  // (1,2) is the shared interior edge
  m.boundary_facets = {{{0, 1, -1}, 1, -1}, {{1, 3, -1}, 1, -1},
                       {{3, 2, -1}, 1, -1}, {{2, 0, -1}, 1, -1},
                       {{1, 2, -1}, 1, -1}};
  CHECK_THROWS_WITH_AS(m.finalize(), doctest::Contains("interior"),
                       std::runtime_error);
}

TEST_CASE("cell locator finds containing cells") {
  Mesh m = generate_bifurcation(1.0, 1.0, 0.5, 3);
  CellLocator loc(m);
  std::array<double, 4> bary{};
  // cell centroids must locate in their own cell (or an equally valid one)
  for (Index c = 0; c < static_cast<Index>(m.n_cells()); ++c) {
    Vec3 x = m.cell_centroid(c);
    Index found = loc.locate(x, bary);
    REQUIRE(found >= 0);
    double minb = *std::min_element(bary.begin(), bary.begin() + 3);
    CHECK(minb >= -1e-12);
  }
  // a point clearly outside (inside the crotch wedge between branches)
  Index out = loc.locate({1.0 + 0.5, 0.0, 0.0}, bary);
  CHECK(out == -1);
}
