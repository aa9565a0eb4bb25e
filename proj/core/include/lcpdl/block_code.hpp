#pragma once

#include <vector>

#include <Eigen/Core>

namespace lcpdl {

/// How the diagonal blocks of Q are filled.
enum class BlockMode {
  all_ones,  // Q_mj = 1 iff atoms m and j share a class
  identity,  // LC-KSVD style: Q = I
};

/// K x K class-block indicator with per-class column slices Q_i (K x k).
class BlockIndicator {
 public:
  BlockIndicator(int classes, int atoms_per_class, BlockMode mode = BlockMode::all_ones);

  const Eigen::MatrixXd& matrix() const { return Q_; }
  auto slice(int i) const { return Q_.middleCols(static_cast<Eigen::Index>(i) * k_, k_); }

  int classes() const { return c_; }
  int atoms_per_class() const { return k_; }
  Eigen::Index total_atoms() const { return Q_.rows(); }
  BlockMode mode() const { return mode_; }

 private:
  int c_;
  int k_;
  BlockMode mode_;
  Eigen::MatrixXd Q_;
};

inline BlockIndicator build_block_indicator(int classes, int atoms_per_class,
                                            BlockMode mode = BlockMode::all_ones) {
  return BlockIndicator(classes, atoms_per_class, mode);
}

/// G = D_i^T D_i + tau Q_i^T Q_i + alpha (L_i + L_i^T) / 2 + ridge I.
Eigen::MatrixXd code_system_matrix(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                                   const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                                   const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                                   double alpha, double ridge);

/// Ridge scaled to the system: scale * tr(G_0) / k with G_0 the ridge-free matrix.
double default_code_ridge(const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                          const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                          const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                          double alpha, double scale = 1e-8);

/// Stationary point of
///   ||X_i - D_i A||^2 + tau ||P X_i - Q_i A||^2 + alpha Tr(A^T L_i A)
/// without the nonnegativity clamp: A = G^{-1} (tau Q_i^T P X_i + D_i^T X_i).
/// One Cholesky factorization of G serves all N_i right-hand sides.
Eigen::MatrixXd solve_code_system(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                                  const Eigen::Ref<const Eigen::MatrixXd>& projection,
                                  const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                                  const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                                  double alpha, double ridge);

/// solve_code_system() with negative entries replaced by zero.
Eigen::MatrixXd update_codes(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                             const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                             const Eigen::Ref<const Eigen::MatrixXd>& projection,
                             const Eigen::Ref<const Eigen::MatrixXd>& block_slice,
                             const Eigen::Ref<const Eigen::MatrixXd>& laplacian, double tau,
                             double alpha, double ridge);

/// ||X_i - D_i A_i||_F^2.
double coding_residual(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const Eigen::Ref<const Eigen::MatrixXd>& atoms,
                       const Eigen::Ref<const Eigen::MatrixXd>& codes);

}  // namespace lcpdl
