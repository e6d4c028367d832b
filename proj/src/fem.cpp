#include "spatsel/fem.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "spatsel/errors.hpp"

namespace spatsel {

FemMatrices assemble_fem(const Mesh& mesh) {
  const Eigen::Index n = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> tc, tg;
  tc.reserve(static_cast<size_t>(mesh.num_triangles()) * 3);
  tg.reserve(static_cast<size_t>(mesh.num_triangles()) * 9);

  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto tri = mesh.triangles.row(t);
    Eigen::Vector2d p[3];
    for (int k = 0; k < 3; ++k) p[k] = mesh.nodes.row(tri[k]);
    const Eigen::Vector2d u = p[1] - p[0], v = p[2] - p[0];
    const double area = 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
    if (!(area > 0.0)) {
      std::ostringstream msg;
      msg << "assemble_fem: triangle " << t << " is degenerate";
      throw data_error(msg.str());
    }
    for (int k = 0; k < 3; ++k) tc.emplace_back(tri[k], tri[k], area / 3.0);
    // stiffness: grad(phi_a) . grad(phi_b) * area = (e_a . e_b) / (4 area),
    // e_k the edge vector opposite vertex k
    const Eigen::Vector2d e[3] = {p[2] - p[1], p[0] - p[2], p[1] - p[0]};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) tg.emplace_back(tri[a], tri[b], e[a].dot(e[b]) / (4.0 * area));
  }

  FemMatrices fem;
  fem.C.resize(n, n);
  fem.G.resize(n, n);
  fem.C.setFromTriplets(tc.begin(), tc.end());
  fem.G.setFromTriplets(tg.begin(), tg.end());
  return fem;
}

}  // namespace spatsel
