#include "lcpdl/projection.hpp"

#include <string>

#include "lcpdl/error.hpp"

namespace lcpdl {

Eigen::MatrixXd block_target(const BlockIndicator& Q, const std::vector<Eigen::MatrixXd>& codes) {
  if (static_cast<int>(codes.size()) != Q.classes()) {
    throw ValidationError("block_target: expected " + std::to_string(Q.classes()) +
                          " code blocks, got " + std::to_string(codes.size()));
  }
  Index N = 0;
  for (const auto& A : codes) {
    if (A.rows() != Q.atoms_per_class()) throw ValidationError("block_target: code block has wrong row count");
    N += A.cols();
  }
  Eigen::MatrixXd B(Q.total_atoms(), N);
  Index offset = 0;
  for (int i = 0; i < Q.classes(); ++i) {
    const auto& A = codes[i];
    B.middleCols(offset, A.cols()).noalias() = Q.slice(i) * A;
    offset += A.cols();
  }
  return B;
}

double default_gram_ridge(const Eigen::Ref<const Eigen::MatrixXd>& samples, double scale) {
  // tr(X X^T) = ||X||_F^2
  return scale * samples.squaredNorm() / static_cast<double>(samples.rows());
}

ProjectionSolver::ProjectionSolver(const Eigen::Ref<const Eigen::MatrixXd>& samples, double ridge)
    : X_(samples) {
  if (ridge < 0.0) throw ValidationError("projection update: ridge must be >= 0");
  Eigen::MatrixXd gram = X_ * X_.transpose();
  gram.diagonal().array() += ridge;
  gram_.compute(gram);
  if (gram_.info() != Eigen::Success) {
    throw SolverError("projection update: X X^T + ridge I is singular; increase the ridge");
  }
}

Eigen::MatrixXd ProjectionSolver::solve(const Eigen::Ref<const Eigen::MatrixXd>& target,
                                        const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                        const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                                        double tau, double beta) const {
  const Index K = target.rows();
  if (target.cols() != X_.cols() || labels.cols() != X_.cols() || classifier.cols() != K ||
      classifier.rows() != labels.rows()) {
    throw ValidationError("projection update: dimension mismatch");
  }
  if (tau < 0.0 || beta < 0.0) throw ValidationError("projection update: tau and beta must be >= 0");

  Eigen::MatrixXd left = beta * (classifier.transpose() * classifier);
  left.diagonal().array() += tau;
  const Eigen::LLT<Eigen::MatrixXd> left_llt(left);
  if (left_llt.info() != Eigen::Success) {
    throw SolverError("projection update: tau I + beta W^T W is singular");
  }

  // (tau B + beta W^T H) X^T, then both inverses.
  Eigen::MatrixXd mixed = tau * target;
  mixed.noalias() += beta * (classifier.transpose() * labels);
  const Eigen::MatrixXd mid = mixed * X_.transpose();
  Eigen::MatrixXd P = gram_.solve(left_llt.solve(mid).transpose()).transpose();
  if (!P.allFinite()) throw SolverError("projection update: solution is not finite");
  return P;
}

Eigen::MatrixXd update_projection(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::MatrixXd>& target,
                                  const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& classifier, double tau,
                                  double beta, double ridge) {
  return ProjectionSolver(samples, ridge).solve(target, labels, classifier, tau, beta);
}

double projection_objective(const Eigen::Ref<const Eigen::MatrixXd>& projection,
                            const Eigen::Ref<const Eigen::MatrixXd>& samples,
                            const Eigen::Ref<const Eigen::MatrixXd>& target,
                            const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier, double tau,
                            double beta) {
  const Eigen::MatrixXd Z = projection * samples;
  return beta * (labels - classifier * Z).squaredNorm() + tau * (Z - target).squaredNorm();
}

double block_diagonal_ratio(const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const std::vector<Index>& class_offsets, int atoms_per_class) {
  const double total = codes.squaredNorm();
  if (total == 0.0) return 0.0;
  const int c = static_cast<int>(class_offsets.size()) - 1;
  if (c < 1 || codes.rows() != static_cast<Index>(c) * atoms_per_class ||
      class_offsets.back() != codes.cols()) {
    throw ValidationError("block_diagonal_ratio: codes do not match the class layout");
  }
  double inside = 0.0;
  for (int i = 0; i < c; ++i) {
    inside += codes
                  .block(static_cast<Index>(i) * atoms_per_class, class_offsets[i],
                         atoms_per_class, class_offsets[i + 1] - class_offsets[i])
                  .squaredNorm();
  }
  return inside / total;
}

double block_diagonal_ratio(const Eigen::Ref<const Eigen::MatrixXd>& projection,
                            const LabeledDataset& ds, int classes, int atoms_per_class) {
  if (!ds.is_partitioned()) throw ValidationError("block_diagonal_ratio: dataset is not partitioned");
  if (ds.num_classes() != classes || projection.cols() != ds.dim()) {
    throw ValidationError("block_diagonal_ratio: projection does not match the dataset");
  }
  return block_diagonal_ratio(projection * ds.features, ds.class_offsets, atoms_per_class);
}

}  // namespace lcpdl
