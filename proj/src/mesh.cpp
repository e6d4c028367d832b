#include "spatsel/mesh.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "spatsel/errors.hpp"

namespace spatsel {

double default_extension(const Eigen::Ref<const Points>& sites) {
  const double w = sites.col(0).maxCoeff() - sites.col(0).minCoeff();
  const double h = sites.col(1).maxCoeff() - sites.col(1).minCoeff();
  return 0.3 * std::max(w, h);
}

Mesh build_mesh(const Eigen::Ref<const Points>& sites, double target_edge, double extension) {
  if (sites.rows() < 3) throw data_error("build_mesh: need at least 3 sites");
  if (!(target_edge > 0.0)) throw data_error("build_mesh: target_edge must be > 0");
  if (extension < 0.0) throw data_error("build_mesh: extension must be >= 0");

  const double x0 = sites.col(0).minCoeff(), x1 = sites.col(0).maxCoeff();
  const double y0 = sites.col(1).minCoeff(), y1 = sites.col(1).maxCoeff();
  if (!(x1 > x0) || !(y1 > y0)) throw data_error("build_mesh: degenerate (zero-area) bounding box");

  const double lx = x0 - extension, ly = y0 - extension;
  const double wx = (x1 - x0) + 2.0 * extension, wy = (y1 - y0) + 2.0 * extension;
  const int cx = static_cast<int>(std::ceil(wx / target_edge));
  const int cy = static_cast<int>(std::ceil(wy / target_edge));
  const double hx = wx / cx, hy = wy / cy;
  const int nx = cx + 1, ny = cy + 1;

  Mesh mesh;
  mesh.boundary_margin = extension;
  mesh.nodes.resize(static_cast<Eigen::Index>(nx) * ny, 2);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index k = static_cast<Eigen::Index>(j) * nx + i;
      mesh.nodes(k, 0) = (i == cx) ? lx + wx : lx + i * hx;
      mesh.nodes(k, 1) = (j == cy) ? ly + wy : ly + j * hy;
    }

  mesh.triangles.resize(2 * static_cast<Eigen::Index>(cx) * cy, 3);
  Eigen::Index t = 0;
  auto vid = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j < cy; ++j)
    for (int i = 0; i < cx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  return mesh;
}

namespace {

// Barycentric coordinates of point p in triangle (a, b, c); nan-free for
// nondegenerate triangles.
inline void barycentric(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& p, double w[3]) {
  const Eigen::Vector2d u = b - a, v = c - a, q = p - a;
  const double det = u.x() * v.y() - u.y() * v.x();
  w[1] = (q.x() * v.y() - q.y() * v.x()) / det;
  w[2] = (u.x() * q.y() - u.y() * q.x()) / det;
  w[0] = 1.0 - w[1] - w[2];
}

}  // namespace

Projector project(const Mesh& mesh, const Eigen::Ref<const Points>& sites) {
  constexpr double containment_tol = 1e-10;
  constexpr double snap_tol = 1e-12;

  const Eigen::Index nt = mesh.num_triangles();
  struct Box {
    double x0, x1, y0, y1;
  };
  std::vector<Box> boxes(static_cast<size_t>(nt));
  for (Eigen::Index t = 0; t < nt; ++t) {
    Box box{1e300, -1e300, 1e300, -1e300};
    for (int k = 0; k < 3; ++k) {
      const auto node = mesh.nodes.row(mesh.triangles(t, k));
      box.x0 = std::min(box.x0, node[0]);
      box.x1 = std::max(box.x1, node[0]);
      box.y0 = std::min(box.y0, node[1]);
      box.y1 = std::max(box.y1, node[1]);
    }
    boxes[static_cast<size_t>(t)] = box;
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(sites.rows()) * 3);
  for (Eigen::Index s = 0; s < sites.rows(); ++s) {
    const Eigen::Vector2d p = sites.row(s);
    bool found = false;
    for (Eigen::Index t = 0; t < nt && !found; ++t) {
      const Box& box = boxes[static_cast<size_t>(t)];
      if (p.x() < box.x0 - containment_tol || p.x() > box.x1 + containment_tol ||
          p.y() < box.y0 - containment_tol || p.y() > box.y1 + containment_tol)
        continue;
      double w[3];
      const auto tri = mesh.triangles.row(t);
      barycentric(mesh.nodes.row(tri[0]), mesh.nodes.row(tri[1]), mesh.nodes.row(tri[2]), p, w);
      if (w[0] < -containment_tol || w[1] < -containment_tol || w[2] < -containment_tol) continue;
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (w[k] < snap_tol) w[k] = 0.0;  // clamp fp noise so node hits give a single weight 1
        sum += w[k];
      }
      for (int k = 0; k < 3; ++k)
        if (w[k] > 0.0) trips.emplace_back(s, tri[k], w[k] / sum);
      found = true;
    }
    if (!found) {
      std::ostringstream msg;
      msg << "project: site " << s << " at (" << p.x() << ", " << p.y()
          << ") lies outside the mesh hull";
      throw data_error(msg.str());
    }
  }

  Projector proj;
  proj.A.resize(sites.rows(), mesh.num_nodes());
  proj.A.setFromTriplets(trips.begin(), trips.end());
  return proj;
}

double max_domain_range(const Eigen::Ref<const Points>& sites) {
  if (sites.rows() < 2) throw data_error("max_domain_range: need at least 2 sites");
  double best = 0.0;
  for (Eigen::Index i = 0; i < sites.rows(); ++i)
    for (Eigen::Index j = i + 1; j < sites.rows(); ++j)
      best = std::max(best, (sites.row(i) - sites.row(j)).norm());
  return best;
}

void validate_mesh(const Mesh& mesh) {
  const Eigen::Index n = mesh.num_nodes();
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles(t, k);
      if (v < 0 || v >= n) throw data_error("mesh: triangle index out of range");
    }
    const Eigen::Vector2d a = mesh.nodes.row(mesh.triangles(t, 0));
    const Eigen::Vector2d b = mesh.nodes.row(mesh.triangles(t, 1));
    const Eigen::Vector2d c = mesh.nodes.row(mesh.triangles(t, 2));
    const double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    if (!(area2 > 0.0)) {
      std::ostringstream msg;
      msg << "mesh: triangle " << t << " has zero area";
      throw data_error(msg.str());
    }
  }
  // duplicate detection on sorted order; lattice meshes are small enough for O(n log n)
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (mesh.nodes(a, 0) != mesh.nodes(b, 0)) return mesh.nodes(a, 0) < mesh.nodes(b, 0);
    return mesh.nodes(a, 1) < mesh.nodes(b, 1);
  });
  for (size_t i = 1; i < order.size(); ++i) {
    const auto d = (mesh.nodes.row(order[i]) - mesh.nodes.row(order[i - 1])).norm();
    if (d < 1e-12) throw data_error("mesh: duplicate nodes");
  }
}

void save_mesh(const Mesh& mesh, std::ostream& out) {
  out << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_triangles() << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < mesh.num_nodes(); ++i)
    out << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t)
    out << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " " << mesh.triangles(t, 2)
        << "\n";
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("save_mesh: cannot open " + path);
  save_mesh(mesh, out);
}

Mesh load_mesh(std::istream& in) {
  std::string kw1, kw2;
  Eigen::Index n = 0, t = 0;
  in >> kw1 >> n >> kw2 >> t;
  if (!in || kw1 != "nodes" || kw2 != "triangles")
    throw data_error("load_mesh: malformed header, expected 'nodes <N> triangles <T>'");
  Mesh mesh;
  mesh.nodes.resize(n, 2);
  mesh.triangles.resize(t, 3);
  for (Eigen::Index i = 0; i < n; ++i) in >> mesh.nodes(i, 0) >> mesh.nodes(i, 1);
  for (Eigen::Index k = 0; k < t; ++k)
    in >> mesh.triangles(k, 0) >> mesh.triangles(k, 1) >> mesh.triangles(k, 2);
  if (!in) throw data_error("load_mesh: truncated file");
  validate_mesh(mesh);
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("load_mesh: cannot open " + path);
  return load_mesh(in);
}

}  // namespace spatsel
