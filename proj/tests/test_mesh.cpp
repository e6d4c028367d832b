#include <doctest.h>

#include <random>
#include <sstream>

#include "spatsel/errors.hpp"
#include "spatsel/mesh.hpp"

using namespace spatsel;

namespace {

Points unit_square_corners() {
  Points s(4, 2);
  s << 0, 0, 1, 0, 0, 1, 1, 1;
  return s;
}

}  // namespace

TEST_CASE("build_mesh on the unit square, edge 0.5, no extension") {
  const Mesh mesh = build_mesh(unit_square_corners(), 0.5, 0.0);
  CHECK(mesh.num_nodes() == 9);      // 3x3 lattice
  CHECK(mesh.num_triangles() == 8);  // two per cell
  validate_mesh(mesh);
}

TEST_CASE("build_mesh with extension 0.5 expands to a 5x5 lattice") {
  const Mesh mesh = build_mesh(unit_square_corners(), 0.5, 0.5);
  CHECK(mesh.num_nodes() == 25);
  CHECK(mesh.num_triangles() == 32);
  CHECK(mesh.nodes.col(0).minCoeff() == doctest::Approx(-0.5));
  CHECK(mesh.nodes.col(0).maxCoeff() == doctest::Approx(1.5));
}

TEST_CASE("build_mesh golden counts for 100 random sites") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Points sites(100, 2);
  for (int i = 0; i < 100; ++i) {
    sites(i, 0) = U(rng);
    sites(i, 1) = U(rng);
  }
  const Mesh mesh = build_mesh(sites, 0.1, 0.2);
  // frozen after one run of the deterministic constructor
  CHECK(mesh.num_nodes() == 225);
  CHECK(mesh.num_triangles() == 392);

  const Mesh again = build_mesh(sites, 0.1, 0.2);
  CHECK(mesh.nodes == again.nodes);
  CHECK(mesh.triangles == again.triangles);
}

TEST_CASE("build_mesh rejects degenerate input") {
  Points two(2, 2);
  two << 0, 0, 1, 1;
  CHECK_THROWS_AS(build_mesh(two, 0.5, 0.0), data_error);
  Points flat(3, 2);
  flat << 0, 0, 1, 0, 2, 0;  // zero-height box
  CHECK_THROWS_AS(build_mesh(flat, 0.5, 0.0), data_error);
}

TEST_CASE("projector weights at node, centroid and edge midpoint") {
  const Mesh mesh = build_mesh(unit_square_corners(), 0.5, 0.0);

  Points probes(3, 2);
  probes << 0.5, 0.5,                          // lattice node
      (0.0 + 0.5 + 0.5) / 3.0, (0.0 + 0.0 + 0.5) / 3.0,  // centroid of first cell's lower triangle
      0.25, 0.0;                               // midpoint of a boundary edge
  const Projector proj = project(mesh, probes);

  // node: single weight 1
  {
    int nnz = 0;
    double w = 0;
    for (int k = 0; k < proj.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(proj.A, k); it; ++it)
        if (it.row() == 0) {
          ++nnz;
          w = it.value();
        }
    CHECK(nnz == 1);
    CHECK(w == doctest::Approx(1.0));
  }
  // centroid: three weights of 1/3
  {
    std::vector<double> w;
    for (int k = 0; k < proj.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(proj.A, k); it; ++it)
        if (it.row() == 1) w.push_back(it.value());
    REQUIRE(w.size() == 3);
    for (double v : w) CHECK(v == doctest::Approx(1.0 / 3.0));
  }
  // edge midpoint: two weights of 1/2
  {
    std::vector<double> w;
    for (int k = 0; k < proj.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(proj.A, k); it; ++it)
        if (it.row() == 2) w.push_back(it.value());
    REQUIRE(w.size() == 2);
    for (double v : w) CHECK(v == doctest::Approx(0.5));
  }
}

TEST_CASE("projector rows are convex weights and reproduce linear functions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Points sites(60, 2);
  for (int i = 0; i < 60; ++i) {
    sites(i, 0) = U(rng);
    sites(i, 1) = U(rng);
  }
  const Mesh mesh = build_mesh(sites, 0.17, 0.1);
  const Projector proj = project(mesh, sites);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_nodes());
  const Eigen::VectorXd row_sums = proj.A * ones;
  for (int i = 0; i < 60; ++i) CHECK(row_sums[i] == doctest::Approx(1.0).epsilon(1e-10));

  // linear reproduction: f(x, y) = a + b x + c y
  const double a = 0.4, b = -1.3, c = 2.2;
  const Eigen::VectorXd f_nodes = a + b * mesh.nodes.col(0).array() + c * mesh.nodes.col(1).array();
  const Eigen::VectorXd f_sites = proj.A * f_nodes;
  for (int i = 0; i < 60; ++i) {
    const double expected = a + b * sites(i, 0) + c * sites(i, 1);
    CHECK(f_sites[i] == doctest::Approx(expected).epsilon(1e-9));
  }

  for (int k = 0; k < proj.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(proj.A, k); it; ++it)
      CHECK(it.value() >= 0.0);
}

TEST_CASE("project names the offending site when outside the hull") {
  const Mesh mesh = build_mesh(unit_square_corners(), 0.5, 0.0);
  Points outside(2, 2);
  outside << 0.5, 0.5, 3.0, 0.5;
  try {
    project(mesh, outside);
    FAIL("expected data_error");
  } catch (const data_error& e) {
    CHECK(std::string(e.what()).find("site 1") != std::string::npos);
  }
}

TEST_CASE("max_domain_range") {
  Points two(2, 2);
  two << 0, 0, 1, 0;
  CHECK(max_domain_range(two) == doctest::Approx(1.0));
  CHECK(max_domain_range(unit_square_corners()) == doctest::Approx(std::sqrt(2.0)));
  Points tri(3, 2);
  tri << 0, 0, 3, 4, 1, 1;
  CHECK(max_domain_range(tri) == doctest::Approx(5.0));
  Points one(1, 2);
  one << 0, 0;
  CHECK_THROWS_AS(max_domain_range(one), data_error);
}

TEST_CASE("mesh text round-trip") {
  const Mesh mesh = build_mesh(unit_square_corners(), 0.3, 0.25);
  std::stringstream ss;
  save_mesh(mesh, ss);
  const Mesh back = load_mesh(ss);
  CHECK(back.nodes == mesh.nodes);
  CHECK(back.triangles == mesh.triangles);

  std::stringstream bad("nodes x triangles 2\n");
  CHECK_THROWS_AS(load_mesh(bad), data_error);
}
