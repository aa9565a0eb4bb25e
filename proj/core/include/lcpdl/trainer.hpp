#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lcpdl/block_code.hpp"
#include "lcpdl/dataset.hpp"
#include "lcpdl/dictionary_admm.hpp"
#include "lcpdl/robust_classifier.hpp"

namespace lcpdl {

enum class InitMode {
  gaussian_unit_fnorm,  // D, P, W standard normal, each scaled to unit Frobenius norm
  class_samples,        // atoms of D_i drawn from normalized class-i samples
};

struct Hyperparams {
  double tau = 0.01;    // block-diagonal approximation weight
  double alpha = 0.01;  // locality weight
  double beta = 0.1;    // classifier weight
  int atoms_per_class = 5;
  int knn = -1;          // < 0: min(5, k - 1)
  double delta = 0.0;    // <= 0: mean pairwise atom distance per class
  AdmmConfig admm;
  int max_outer = 50;
  double rel_tol = 1e-4;
  /// Relative conditioning constant; absolute ridges are ridge * tr(G) / dim(G).
  double ridge = 1e-8;
  std::uint64_t seed = 0;
  InitMode init = InitMode::gaussian_unit_fnorm;
  BlockMode block_mode = BlockMode::all_ones;
  double lambda_epsilon = kDefaultLambdaEpsilon;

  void validate() const;
};

/// Hyperparameters used on the benchmark image sets: "cbcl", "ar",
/// "caltech101", "caltech256". Throws ValidationError for other names.
Hyperparams preset(std::string_view name);
const std::vector<std::string>& preset_names();

std::string to_string(InitMode mode);
InitMode init_mode_from_string(std::string_view name);
std::string to_string(BlockMode mode);
BlockMode block_mode_from_string(std::string_view name);

/// Mutable optimization variables.
struct TrainState {
  Eigen::MatrixXd D;       // n x K
  Eigen::MatrixXd P;       // K x n
  Eigen::MatrixXd W;       // c x K
  Eigen::VectorXd lambda;  // diagonal of Lambda, K
  std::vector<Eigen::MatrixXd> codes;       // A_i, k x N_i
  std::vector<Eigen::MatrixXd> laplacians;  // L_i, k x k
};

struct ObjectiveTerms {
  double reconstruction = 0.0;  // sum_i ||X_i - D_i A_i||^2
  double approximation = 0.0;   // tau sum_i ||P X_i - Q_i A_i||^2
  double locality = 0.0;        // alpha sum_i Tr(A_i^T L_i A_i)
  double classification = 0.0;  // beta ||H - W P X||^2
  double l21 = 0.0;             // beta ||W^T||_{2,1}

  double total() const { return reconstruction + approximation + locality + classification + l21; }
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  ObjectiveTerms terms;
  double millis = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  int iterations = 0;
};

struct Provenance {
  std::uint64_t seed = 0;
  int iterations = 0;
  double final_objective = 0.0;
};

/// Trained inference artifact.
struct Model {
  Eigen::MatrixXd D;  // n x K
  Eigen::MatrixXd P;  // K x n
  Eigen::MatrixXd W;  // c x K
  Hyperparams hyperparams;
  Index n = 0;
  int c = 0;
  int k = 0;
  std::vector<std::int64_t> label_names;
  Provenance provenance;

  Index K() const { return static_cast<Index>(c) * k; }

  /// Dimensional consistency, finiteness, atom norms <= 1 + 1e-6, c >= 2.
  void validate() const;

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& sample) const {
    return lcpdl::predict(W, P, sample);
  }
  BatchPrediction predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& samples) const {
    return lcpdl::predict_batch(W, P, samples);
  }
};

struct FitResult {
  Model model;
  TrainTrace trace;
};

/// Called after every outer iteration with the 1-based iteration index.
using IterationObserver = std::function<void(int, const TrainState&)>;

TrainState init_state(const LabeledDataset& ds, const Hyperparams& hp);

/// All five weighted terms of the training objective at `state`.
ObjectiveTerms objective(const TrainState& state, const LabeledDataset& ds,
                         const Eigen::Ref<const Eigen::MatrixXd>& labels, const Hyperparams& hp);

/// Alternating minimization: codes, projection, classifier, reweighting,
/// dictionary, then Laplacian rebuild; stops on relative objective change
/// below rel_tol or after max_outer iterations. `ds` must be partitioned.
FitResult fit(const LabeledDataset& ds, const Hyperparams& hp,
              const IterationObserver& observer = {});

struct Evaluation {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // c x c, rows: true class, columns: predicted class
};

Evaluation evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                int classes);

/// Labels of `ds` must be dense indices into the model's label space.
Evaluation evaluate(const Model& model, const LabeledDataset& ds);

}  // namespace lcpdl
