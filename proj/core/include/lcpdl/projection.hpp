#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lcpdl/block_code.hpp"
#include "lcpdl/dataset.hpp"

namespace lcpdl {

/// B = [Q_1 A_1, ..., Q_c A_c]; column blocks follow the class partition.
Eigen::MatrixXd block_target(const BlockIndicator& Q, const std::vector<Eigen::MatrixXd>& codes);

/// scale * tr(X X^T) / n.
double default_gram_ridge(const Eigen::Ref<const Eigen::MatrixXd>& samples, double scale = 1e-8);

/// Closed-form minimizer of
///   beta ||H - W P X||_F^2 + tau ||P X - B||_F^2
/// i.e. P = (tau I + beta W^T W)^{-1} (tau B X^T + beta W^T H X^T) (X X^T + ridge I)^{-1}.
///
/// X X^T + ridge I is factorized once at construction; the trainer keeps one
/// solver alive for the whole fit because X does not change.
class ProjectionSolver {
 public:
  ProjectionSolver(const Eigen::Ref<const Eigen::MatrixXd>& samples, double ridge);

  Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& target,
                        const Eigen::Ref<const Eigen::MatrixXd>& labels,
                        const Eigen::Ref<const Eigen::MatrixXd>& classifier, double tau,
                        double beta) const;

  const Eigen::MatrixXd& samples() const { return X_; }

 private:
  Eigen::MatrixXd X_;
  Eigen::LLT<Eigen::MatrixXd> gram_;
};

Eigen::MatrixXd update_projection(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::MatrixXd>& target,
                                  const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& classifier, double tau,
                                  double beta, double ridge);

/// beta ||H - W P X||_F^2 + tau ||P X - B||_F^2.
double projection_objective(const Eigen::Ref<const Eigen::MatrixXd>& projection,
                            const Eigen::Ref<const Eigen::MatrixXd>& samples,
                            const Eigen::Ref<const Eigen::MatrixXd>& target,
                            const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier, double tau,
                            double beta);

/// Fraction of ||V||_F^2 that lies in the class-diagonal blocks of V (K x N):
/// rows [i k, (i+1) k) restricted to the columns of class i. Returns 0 for V = 0.
double block_diagonal_ratio(const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const std::vector<Index>& class_offsets, int atoms_per_class);

/// block_diagonal_ratio() of V = P X over a partitioned dataset.
double block_diagonal_ratio(const Eigen::Ref<const Eigen::MatrixXd>& projection,
                            const LabeledDataset& ds, int classes, int atoms_per_class);

}  // namespace lcpdl
