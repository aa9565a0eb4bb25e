#include "lcpdl/block_code.hpp"

#include <string>

#include <Eigen/Cholesky>

#include "lcpdl/error.hpp"

namespace lcpdl {

BlockIndicator::BlockIndicator(int classes, int atoms_per_class, BlockMode mode)
    : c_(classes), k_(atoms_per_class), mode_(mode) {
  if (classes < 1 || atoms_per_class < 1) {
    throw ValidationError("block indicator needs at least one class and one atom per class");
  }
  const Eigen::Index K = static_cast<Eigen::Index>(c_) * k_;
  if (mode_ == BlockMode::identity) {
    Q_ = Eigen::MatrixXd::Identity(K, K);
    return;
  }
  Q_ = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < c_; ++i) {
    Q_.block(static_cast<Eigen::Index>(i) * k_, static_cast<Eigen::Index>(i) * k_, k_, k_).setOnes();
  }
}

Eigen::MatrixXd code_system_matrix(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                                   const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                                   const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                                   double alpha, double ridge) {
  const Eigen::Index k = atoms.cols();
  if (block_slice.cols() != k || laplacian.rows() != k || laplacian.cols() != k) {
    throw ValidationError("code update: atoms, block slice and Laplacian disagree on k");
  }
  Eigen::MatrixXd G = atoms.transpose() * atoms;
  G.noalias() += tau * (block_slice.transpose() * block_slice);
  G += (0.5 * alpha) * (laplacian + laplacian.transpose());
  G.diagonal().array() += ridge;
  return G;
}

double default_code_ridge(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                          const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                          const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                          double alpha, double scale) {
  const Eigen::MatrixXd G = code_system_matrix(atoms, block_slice, laplacian, tau, alpha, 0.0);
  return scale * G.trace() / static_cast<double>(atoms.cols());
}

Eigen::MatrixXd solve_code_system(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                                  const Eigen::Ref<const Eigen::MatrixXd>& projection,
                                  const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                                  const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                                  double alpha, double ridge) {
  if (tau < 0.0 || alpha < 0.0 || ridge < 0.0) {
    throw ValidationError("code update: tau, alpha and ridge must be >= 0");
  }
  if (atoms.rows() != samples.rows() || projection.cols() != samples.rows() ||
      projection.rows() != block_slice.rows()) {
    throw ValidationError("code update: dimension mismatch");
  }
  const Eigen::MatrixXd G = code_system_matrix(atoms, block_slice, laplacian, tau, alpha, ridge);
  Eigen::MatrixXd rhs = atoms.transpose() * samples;
  if (tau != 0.0) rhs.noalias() += tau * (block_slice.transpose() * (projection * samples));

  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw SolverError("code update: system matrix is not positive definite (ridge " +
                      std::to_string(ridge) + "); increase the ridge");
  }
  Eigen::MatrixXd A = llt.solve(rhs);
  if (!A.allFinite()) {
    throw SolverError("code update: solution is not finite; increase the ridge");
  }
  return A;
}

Eigen::MatrixXd update_codes(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                             const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                             const Eigen::Ref<const Eigen::MatrixXd>& projection,
                             const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                             const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                             double alpha, double ridge) {
  return solve_code_system(samples, atoms, projection, block_slice, laplacian, tau, alpha, ridge)
      .cwiseMax(0.0);
}

double coding_residual(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                       const Eigen::Ref<const Eigen::MatrixXd>& codes) {
  return (samples - atoms * codes).squaredNorm();
}

}  // namespace lcpdl
