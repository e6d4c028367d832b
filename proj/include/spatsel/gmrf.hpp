#pragma once

// Matern-(nu = 1) SPDE precision on a mesh and the sparse SPD factorization
// primitives (solve, log-determinant, sampling) the samplers are built on.

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <iosfwd>
#include <vector>

#include "spatsel/fem.hpp"
#include "spatsel/mesh.hpp"
#include "spatsel/rng.hpp"

namespace spatsel {

enum class VarianceScaling {
  analytic,   // divide by 4 pi kappa^2, the nu = 1 marginal variance of the SPDE field
  empirical,  // rescale by the measured interior marginal variance
};

struct PrecisionOperator {
  FemMatrices fem;
  SpMat gcg;  // G C^{-1} G with the lumped (diagonal) mass matrix
  VarianceScaling scaling = VarianceScaling::analytic;
  std::vector<Eigen::Index> interior_nodes;  // sample used for empirical rescaling
};

PrecisionOperator make_precision_operator(const Mesh& mesh,
                                          VarianceScaling scaling = VarianceScaling::analytic);

// Q = (kappa^4 C + 2 kappa^2 G + G C^{-1} G) / (4 pi kappa^2), kappa = 1/rho,
// so the field has unit marginal variance and A Q^{-1} A^T reproduces
// the Matern correlation (d/rho) K1(d/rho).
SpMat build_precision(const PrecisionOperator& op, double rho);

class SparseFactor {
 public:
  SparseFactor() = default;
  explicit SparseFactor(const SpMat& Q) { factorize(Q); }

  // Reuses the symbolic analysis across calls with an identical pattern.
  void factorize(const SpMat& Q);

  template <typename Derived>
  typename Derived::PlainObject solve(const Eigen::MatrixBase<Derived>& b) const {
    return ldlt_.solve(b.derived());
  }
  double log_det() const;
  Eigen::Index size() const { return ldlt_.rows(); }

  // One draw from N(0, Q^{-1}) by back-substitution of standard normals.
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool analyzed_ = false;
};

inline SparseFactor factorize(const SpMat& Q) { return SparseFactor(Q); }

inline Eigen::VectorXd sample_gmrf(const SparseFactor& factor, Rng& rng) {
  return factor.sample(rng);
}

// Coordinate text dump ("row col value" per line) for debugging.
void dump_sparse(const SpMat& m, std::ostream& out);

}  // namespace spatsel
