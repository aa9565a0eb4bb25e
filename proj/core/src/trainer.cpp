#include "lcpdl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "lcpdl/error.hpp"
#include "lcpdl/locality_graph.hpp"
#include "lcpdl/projection.hpp"

namespace lcpdl {

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be >= 0");
}

template <typename F>
auto with_context(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const SolverError& e) {
    throw SolverError(context + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  }
}

Eigen::MatrixXd unit_fnorm_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index r = 0; r < rows; ++r) M(r, j) = normal(rng);
  }
  const double norm = M.norm();
  if (norm > 0.0) M /= norm;
  return M;
}

GraphOptions graph_options(const Hyperparams& hp) { return {hp.knn, hp.delta}; }

void check_training_set(const LabeledDataset& ds) {
  ds.validate();
  if (!ds.is_partitioned()) throw ValidationError("training set must be partitioned by class");
  if (ds.num_classes() < 2) throw ValidationError("training needs at least 2 classes");
}

}  // namespace

void Hyperparams::validate() const {
  require_nonnegative(tau, "tau");
  require_nonnegative(alpha, "alpha");
  require_nonnegative(beta, "beta");
  if (tau == 0.0 && beta == 0.0) throw ValidationError("tau and beta cannot both be 0");
  if (atoms_per_class < 1) throw ValidationError("atoms per class must be >= 1");
  if (!std::isfinite(delta)) throw ValidationError("delta must be finite");
  admm.validate();
  if (max_outer < 1) throw ValidationError("max iterations must be >= 1");
  if (!(rel_tol > 0.0)) throw ValidationError("tolerance must be > 0");
  require_nonnegative(ridge, "ridge");
  if (!(lambda_epsilon > 0.0)) throw ValidationError("lambda epsilon must be > 0");
}

Hyperparams preset(std::string_view name) {
  Hyperparams hp;
  if (name == "cbcl" || name == "ar") {
    hp.tau = 0.01;
    hp.alpha = 0.01;
    hp.beta = 0.1;
  } else if (name == "caltech101") {
    hp.tau = 0.01;
    hp.alpha = 0.1;
    hp.beta = 0.1;
  } else if (name == "caltech256") {
    hp.tau = 0.001;
    hp.alpha = 0.1;
    hp.beta = 1e-4;
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "'");
  }
  return hp;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"cbcl", "ar", "caltech101", "caltech256"};
  return names;
}

std::string to_string(InitMode mode) {
  return mode == InitMode::class_samples ? "class_samples" : "gaussian_unit_fnorm";
}

InitMode init_mode_from_string(std::string_view name) {
  if (name == "gaussian_unit_fnorm" || name == "gaussian") return InitMode::gaussian_unit_fnorm;
  if (name == "class_samples" || name == "samples") return InitMode::class_samples;
  throw ValidationError("unknown init mode '" + std::string(name) + "'");
}

std::string to_string(BlockMode mode) {
  return mode == BlockMode::identity ? "identity" : "all_ones";
}

BlockMode block_mode_from_string(std::string_view name) {
  if (name == "all_ones") return BlockMode::all_ones;
  if (name == "identity") return BlockMode::identity;
  throw ValidationError("unknown block mode '" + std::string(name) + "'");
}

void Model::validate() const {
  if (c < 2) throw ValidationError("model needs at least 2 classes");
  if (k < 1 || n < 1) throw ValidationError("model dimensions must be positive");
  if (D.rows() != n || D.cols() != K()) throw ValidationError("D must be n x K");
  if (P.rows() != K() || P.cols() != n) throw ValidationError("P must be K x n");
  if (W.rows() != c || W.cols() != K()) throw ValidationError("W must be c x K");
  if (static_cast<int>(label_names.size()) != c) {
    throw ValidationError("label map must have one entry per class");
  }
  if (!D.allFinite() || !P.allFinite() || !W.allFinite()) {
    throw ValidationError("model contains non-finite values");
  }
  for (Index j = 0; j < D.cols(); ++j) {
    if (D.col(j).norm() > 1.0 + 1e-6) {
      throw ValidationError("atom norm constraint violated (atom " + std::to_string(j) + ")");
    }
  }
  hyperparams.validate();
}

TrainState init_state(const LabeledDataset& ds, const Hyperparams& hp) {
  hp.validate();
  if (!ds.is_partitioned()) throw ValidationError("init_state: dataset must be partitioned");
  const int c = ds.num_classes();
  const int k = hp.atoms_per_class;
  const Index n = ds.dim();
  const Index K = static_cast<Index>(c) * k;

  std::mt19937_64 rng(hp.seed);
  TrainState s;
  if (hp.init == InitMode::gaussian_unit_fnorm) {
    s.D = unit_fnorm_gaussian(n, K, rng);
  } else {
    s.D.resize(n, K);
    for (int i = 0; i < c; ++i) {
      const Index Ni = ds.class_size(i);
      std::vector<Index> picks(Ni);
      std::iota(picks.begin(), picks.end(), Index{0});
      if (Ni >= k) {
        std::shuffle(picks.begin(), picks.end(), rng);
        picks.resize(k);
      } else {
        std::uniform_int_distribution<Index> any(0, Ni - 1);
        picks.resize(k);
        for (auto& p : picks) p = any(rng);
      }
      for (int a = 0; a < k; ++a) {
        auto atom = s.D.col(static_cast<Index>(i) * k + a);
        atom = ds.features.col(ds.class_begin(i) + picks[a]);
        const double norm = atom.norm();
        if (norm > 0.0) atom /= norm;
      }
    }
  }
  s.P = unit_fnorm_gaussian(K, n, rng);
  s.W = unit_fnorm_gaussian(c, K, rng);
  s.lambda = Eigen::VectorXd::Ones(K);
  for (int i = 0; i < c; ++i) {
    s.codes.push_back(Eigen::MatrixXd::Zero(k, ds.class_size(i)));
    s.laplacians.push_back(
        build_atom_graph(s.D.middleCols(static_cast<Index>(i) * k, k), graph_options(hp)).laplacian);
  }
  return s;
}

ObjectiveTerms objective(const TrainState& state, const LabeledDataset& ds,
                         const Eigen::Ref<const Eigen::MatrixXd>& labels, const Hyperparams& hp) {
  const int c = ds.num_classes();
  const int k = hp.atoms_per_class;
  const BlockIndicator Q(c, k, hp.block_mode);
  const Eigen::MatrixXd Z = state.P * ds.features;

  ObjectiveTerms t;
  for (int i = 0; i < c; ++i) {
    const auto Xi = ds.class_block(i);
    const auto Di = state.D.middleCols(static_cast<Index>(i) * k, k);
    const auto& Ai = state.codes.at(i);
    t.reconstruction += coding_residual(Xi, Di, Ai);
    t.approximation += (Z.middleCols(ds.class_begin(i), ds.class_size(i)) - Q.slice(i) * Ai).squaredNorm();
    t.locality += locality_energy(Ai, state.laplacians.at(i));
  }
  t.approximation *= hp.tau;
  t.locality *= hp.alpha;
  t.classification = hp.beta * (labels - state.W * Z).squaredNorm();
  t.l21 = hp.beta * l21_norm(state.W);
  return t;
}

FitResult fit(const LabeledDataset& ds, const Hyperparams& hp, const IterationObserver& observer) {
  check_training_set(ds);
  hp.validate();
  using clock = std::chrono::steady_clock;

  const int c = ds.num_classes();
  const int k = hp.atoms_per_class;
  const Eigen::MatrixXd H = one_hot(ds);
  const BlockIndicator Q(c, k, hp.block_mode);
  const ProjectionSolver projection(ds.features, default_gram_ridge(ds.features, hp.ridge));

  TrainState s = init_state(ds, hp);
  FitResult result;
  double previous = 0.0;
  for (int t = 1; t <= hp.max_outer; ++t) {
    const auto started = clock::now();
    const std::string at = "iteration " + std::to_string(t);

    for (int i = 0; i < c; ++i) {
      const auto Xi = ds.class_block(i);
      const auto Di = s.D.middleCols(static_cast<Index>(i) * k, k);
      s.codes[i] = with_context(at + ", class " + std::to_string(i) + ", code update", [&] {
        const double ridge =
            default_code_ridge(Di, Q.slice(i), s.laplacians[i], hp.tau, hp.alpha, hp.ridge);
        return update_codes(Xi, Di, s.P, Q.slice(i), s.laplacians[i], hp.tau, hp.alpha, ridge);
      });
    }

    s.P = with_context(at + ", projection update", [&] {
      return projection.solve(block_target(Q, s.codes), H, s.W, hp.tau, hp.beta);
    });
    s.W = with_context(at + ", classifier update",
                       [&] { return reweighted_classifier_step(H, s.P * ds.features, s.lambda); });
    s.lambda = update_lambda(s.W, hp.lambda_epsilon);

    for (int i = 0; i < c; ++i) {
      auto Di = s.D.middleCols(static_cast<Index>(i) * k, k);
      Di = with_context(at + ", class " + std::to_string(i) + ", dictionary update", [&] {
        return update_dictionary(ds.class_block(i), s.codes[i], Di, hp.admm);
      });
      s.laplacians[i] = build_atom_graph(Di, graph_options(hp)).laplacian;
    }
    const double millis =
        std::chrono::duration<double, std::milli>(clock::now() - started).count();

    TraceRow row;
    row.iteration = t;
    row.terms = objective(s, ds, H, hp);
    row.objective = row.terms.total();
    row.millis = millis;
    result.trace.rows.push_back(row);
    result.trace.iterations = t;
    if (observer) observer(t, s);

    if (t > 1) {
      const double change = std::abs(row.objective - previous) / std::max(previous, 1e-30);
      if (change < hp.rel_tol) {
        result.trace.converged = true;
        break;
      }
    }
    previous = row.objective;
  }

  Model& m = result.model;
  m.D = std::move(s.D);
  m.P = std::move(s.P);
  m.W = std::move(s.W);
  m.hyperparams = hp;
  m.n = ds.dim();
  m.c = c;
  m.k = k;
  m.label_names = ds.label_names;
  m.provenance = {hp.seed, result.trace.iterations, result.trace.rows.back().objective};
  return result;
}

Evaluation evaluate_predictions(const std::vector<int>& truth, const std::vector<int>& predicted,
                                int classes) {
  if (truth.size() != predicted.size()) throw ValidationError("evaluate: length mismatch");
  Evaluation e;
  e.confusion = Eigen::MatrixXi::Zero(classes, classes);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j] < 0 || truth[j] >= classes || predicted[j] < 0 || predicted[j] >= classes) {
      throw ValidationError("evaluate: label outside [0, " + std::to_string(classes) + ")");
    }
    ++e.confusion(truth[j], predicted[j]);
  }
  e.accuracy = truth.empty() ? 0.0
                             : static_cast<double>(e.confusion.trace()) /
                                   static_cast<double>(truth.size());
  return e;
}

Evaluation evaluate(const Model& model, const LabeledDataset& ds) {
  if (ds.dim() != model.n) {
    throw ValidationError("dimension mismatch: data has " + std::to_string(ds.dim()) +
                          " features, model expects " + std::to_string(model.n));
  }
  const auto predictions = model.predict_batch(ds.features);
  return evaluate_predictions(ds.labels, predictions.labels, model.c);
}

}  // namespace lcpdl
