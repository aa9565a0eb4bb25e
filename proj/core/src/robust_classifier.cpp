#include "lcpdl/robust_classifier.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

#include "lcpdl/error.hpp"

namespace lcpdl {

Eigen::MatrixXd update_classifier(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& codes,
                                  const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  if (labels.cols() != codes.cols() || lambda.size() != codes.rows()) {
    throw ValidationError("classifier update: dimension mismatch");
  }
  if (!(lambda.array() > 0.0).all()) throw ValidationError("classifier update: lambda must be > 0");

  Eigen::MatrixXd S = codes * codes.transpose();
  S.diagonal() += 2.0 * lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw SolverError("classifier update: system is singular");
  // S symmetric: W = H Z^T S^{-1} = (S^{-1} Z H^T)^T
  Eigen::MatrixXd W = llt.solve(codes * labels.transpose()).transpose();
  if (!W.allFinite()) throw SolverError("classifier update: solution is not finite");
  return W;
}

Eigen::MatrixXd update_classifier(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                  const Eigen::Ref<const Eigen::MatrixXd>& projection,
                                  const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                  const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  return update_classifier(labels, projection * samples, lambda);
}

Eigen::MatrixXd reweighted_classifier_step(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                                           const Eigen::Ref<const Eigen::MatrixXd>& codes,
                                           const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  return update_classifier(labels, codes, 0.5 * lambda);
}

Eigen::VectorXd update_lambda(const Eigen::Ref<const Eigen::MatrixXd>& classifier, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("lambda update: epsilon must be > 0");
  return (2.0 * classifier.colwise().norm().transpose().array().max(epsilon)).inverse();
}

double l21_norm(const Eigen::Ref<const Eigen::MatrixXd>& classifier) {
  return classifier.colwise().norm().sum();
}

double classifier_objective(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier) {
  return (labels - classifier * codes).squaredNorm() + l21_norm(classifier);
}

double reweighted_objective(const Eigen::Ref<const Eigen::MatrixXd>& labels,
                            const Eigen::Ref<const Eigen::MatrixXd>& codes,
                            const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                            const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  const double penalty =
      2.0 * (classifier.colwise().squaredNorm().transpose().array() * lambda.array()).sum();
  return (labels - classifier * codes).squaredNorm() + penalty;
}

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

Prediction predict(const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                   const Eigen::Ref<const Eigen::MatrixXd>& projection,
                   const Eigen::Ref<const Eigen::VectorXd>& sample) {
  if (projection.cols() != sample.size() || classifier.cols() != projection.rows()) {
    throw ValidationError("predict: sample has dimension " + std::to_string(sample.size()) +
                          ", model expects " + std::to_string(projection.cols()));
  }
  if (!sample.allFinite()) throw ValidationError("predict: non-finite sample");
  Prediction p;
  p.soft = classifier * (projection * sample);
  p.label = argmax_lowest(p.soft);
  return p;
}

BatchPrediction predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& classifier,
                              const Eigen::Ref<const Eigen::MatrixXd>& projection,
                              const Eigen::Ref<const Eigen::MatrixXd>& samples) {
  if (projection.cols() != samples.rows() || classifier.cols() != projection.rows()) {
    throw ValidationError("predict: samples have dimension " + std::to_string(samples.rows()) +
                          ", model expects " + std::to_string(projection.cols()));
  }
  if (!samples.allFinite()) throw ValidationError("predict: non-finite sample");
  BatchPrediction out;
  out.soft = classifier * (projection * samples);
  out.labels.resize(samples.cols());
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out.labels[j] = argmax_lowest(out.soft.col(j));
  return out;
}

}  // namespace lcpdl
