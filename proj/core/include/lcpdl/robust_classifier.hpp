#pragma once

#include <vector>

#include <Eigen/Core>

namespace lcpdl {

inline constexpr double kDefaultLambdaEpsilon = 1e-8;

/// W = H Z^T (Z Z^T + 2 diag(lambda))^{-1} for approximate codes Z = P X.
Eigen::MatrixXd update_classifier(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& codes,
                                  const Eigen::Ref<const Eigen::VectorXd>& lambda);

Eigen::MatrixXd update_classifier(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& projection,
                                  const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// The reweighting step used in training: W = H Z^T (Z Z^T + diag(lambda))^{-1}.
/// With lambda from update_lambda(W0), tr(W diag(lambda) W^T) + l21_norm(W0) / 2 majorizes
/// l21_norm(W) and touches it at W0, so this step never increases classifier_objective().
/// update_classifier() doubles the weight; its fixed point minimizes ||H - W Z||^2 + 2 l21_norm(W)
/// and the single-weight objective drifts upward on the way there.
Eigen::MatrixXd reweighted_classifier_step(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                           const Eigen::Ref<const Eigen::MatrixXd>& codes,
                                           const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// Diagonal of the reweighting matrix: 1 / (2 max(||w_m||, epsilon)) per column w_m.
Eigen::VectorXd update_lambda(const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                              double epsilon = kDefaultLambdaEpsilon);

/// ||W^T||_{2,1}: sum of the Euclidean norms of the columns of W.
double l21_norm(const Eigen::Ref<const Eigen::MatrixXd>& classifier);

/// ||H - W Z||_F^2 + ||W^T||_{2,1}.
double classifier_objective(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier);

/// ||H - W Z||_F^2 + 2 tr(W diag(lambda) W^T), the surrogate minimized by update_classifier().
double reweighted_objective(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                            const Eigen::Ref<const Eigen::VectorXd>& lambda);

/// Index of the largest entry; ties resolve to the lowest index.
int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values);

struct Prediction {
  Eigen::VectorXd soft;
  int label = 0;
};

struct BatchPrediction {
  Eigen::MatrixXd soft;  // c x N
  std::vector<int> labels;
};

/// soft = W (P x), label = argmax_lowest(soft).
Prediction predict(const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                   const Eigen::Ref<const Eigen::MatrixXd>& projection,
                   const Eigen::Ref<const Eigen::VectorXd>& sample);

BatchPrediction predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                              const Eigen::Ref<const Eigen::MatrixXd>& projection,
                              const Eigen::Ref<const Eigen::MatrixXd>& samples);

}  // namespace lcpdl
