#include "spatsel/gmrf.hpp"

#include <cmath>
#include <ostream>

#include "spatsel/errors.hpp"

namespace spatsel {

PrecisionOperator make_precision_operator(const Mesh& mesh, VarianceScaling scaling) {
  PrecisionOperator op;
  op.fem = assemble_fem(mesh);
  const Eigen::VectorXd cinv = op.fem.C.diagonal().cwiseInverse();
  op.gcg = op.fem.G * cinv.asDiagonal() * op.fem.G;
  op.scaling = scaling;

  // nodes inside the un-extended site box, thinned to at most 128
  const double x0 = mesh.nodes.col(0).minCoeff() + mesh.boundary_margin;
  const double x1 = mesh.nodes.col(0).maxCoeff() - mesh.boundary_margin;
  const double y0 = mesh.nodes.col(1).minCoeff() + mesh.boundary_margin;
  const double y1 = mesh.nodes.col(1).maxCoeff() - mesh.boundary_margin;
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < mesh.num_nodes(); ++i) {
    const double x = mesh.nodes(i, 0), y = mesh.nodes(i, 1);
    if (x >= x0 && x <= x1 && y >= y0 && y <= y1) inside.push_back(i);
  }
  if (inside.empty())
    for (Eigen::Index i = 0; i < mesh.num_nodes(); ++i) inside.push_back(i);
  const size_t stride = std::max<size_t>(1, inside.size() / 128);
  for (size_t k = 0; k < inside.size(); k += stride) op.interior_nodes.push_back(inside[k]);
  return op;
}

SpMat build_precision(const PrecisionOperator& op, double rho) {
  if (!(rho > 0.0)) throw numeric_error("build_precision: rho must be > 0");
  const double kappa = 1.0 / rho;
  const double k2 = kappa * kappa;
  const double tau2 = 1.0 / (4.0 * M_PI * k2);
  SpMat Q = tau2 * (k2 * k2 * op.fem.C + 2.0 * k2 * op.fem.G + op.gcg);

  if (op.scaling == VarianceScaling::empirical) {
    SparseFactor factor(Q);
    double acc = 0.0;
    for (const Eigen::Index i : op.interior_nodes) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(Q.rows());
      e[i] = 1.0;
      acc += factor.solve(e)[i];
    }
    const double mean_var = acc / static_cast<double>(op.interior_nodes.size());
    Q *= mean_var;  // Q^{-1} diagonal becomes ~1 on the interior
  }
  return Q;
}

void SparseFactor::factorize(const SpMat& Q) {
  if (Q.rows() != Q.cols()) throw numeric_error("factorize: matrix must be square");
  if (!analyzed_) {
    ldlt_.analyzePattern(Q);
    analyzed_ = true;
  }
  ldlt_.factorize(Q);
  if (ldlt_.info() != Eigen::Success || ldlt_.vectorD().minCoeff() <= 0.0)
    throw numeric_error("factorize: matrix is not positive definite");
}

double SparseFactor::log_det() const { return ldlt_.vectorD().array().log().sum(); }

Eigen::VectorXd SparseFactor::sample(Rng& rng) const {
  Eigen::VectorXd z(ldlt_.rows());
  std::normal_distribution<double> N(0.0, 1.0);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = N(rng);
  z.array() /= ldlt_.vectorD().array().sqrt();
  return ldlt_.permutationPinv() * ldlt_.matrixU().solve(z);
}

void dump_sparse(const SpMat& m, std::ostream& out) {
  out.precision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace spatsel
