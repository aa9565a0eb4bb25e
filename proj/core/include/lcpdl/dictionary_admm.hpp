#pragma once

#include <vector>

#include <Eigen/Core>

namespace lcpdl {

struct AdmmConfig {
  double rho = 1.0;
  int max_inner = 50;
  double primal_tol = 1e-6;
  /// Multiply rho by 1.1 after every inner iteration.
  bool adaptive = false;

  void validate() const;
};

struct AdmmResult {
  Eigen::MatrixXd atoms;  // the feasible split variable S
  int iterations = 0;
  std::vector<double> primal_residuals;  // ||D - S||_F per inner iteration
  std::vector<double> dual_residuals;    // rho ||S - S_prev||_F per inner iteration
};

/// Column-wise Euclidean projection onto the unit ball: u_j / max(1, ||u_j||).
Eigen::MatrixXd project_columns_unit_ball(const Eigen::Ref<const Eigen::MatrixXd>& columns);

/// min_D ||X_i - D A_i||_F^2  s.t. ||d_j|| <= 1, by scaled-form ADMM on the split D = S:
///
///   D <- (X A^T + rho (S - T)) (A A^T + rho I)^{-1}
///   S <- project_columns_unit_ball(D + T)
///   T <- T + D - S
///
/// starting from S = `initial`, T = 0. Stops once both the primal residual
/// ||D - S||_F and the dual residual rho ||S - S_prev||_F are <= primal_tol, or
/// after max_inner iterations.
AdmmResult solve_dictionary(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& initial,
                            const AdmmConfig& config = {});

inline Eigen::MatrixXd update_dictionary(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                         const Eigen::Ref<const Eigen::MatrixXd>& codes,
                                         const Eigen::Ref<const Eigen::MatrixXd>& initial,
                                         const AdmmConfig& config = {}) {
  return solve_dictionary(samples, codes, initial, config).atoms;
}

}  // namespace lcpdl
