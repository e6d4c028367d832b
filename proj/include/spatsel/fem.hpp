#pragma once

// Piecewise-linear FEM matrices on a triangulation: lumped (diagonal) mass
// matrix C and stiffness matrix G, the building blocks of the SPDE precision.

#include <Eigen/SparseCore>

#include "spatsel/mesh.hpp"

namespace spatsel {

using SpMat = Eigen::SparseMatrix<double>;

struct FemMatrices {
  SpMat C;  // diagonal, entries sum to the total mesh area
  SpMat G;  // symmetric, rows sum to zero
};

FemMatrices assemble_fem(const Mesh& mesh);

}  // namespace spatsel
