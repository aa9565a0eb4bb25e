#include "lcpdl/trainer.hpp"

#include <chrono>

#include <gtest/gtest.h>

#include "lcpdl/error.hpp"
#include "lcpdl/locality_graph.hpp"
#include "lcpdl/persistence.hpp"
#include "lcpdl/projection.hpp"
#include "oracles.hpp"

namespace lcpdl {
namespace {

Hyperparams small_hp(int k = 4) {
  Hyperparams hp = preset("cbcl");
  hp.atoms_per_class = k;
  hp.seed = 3;
  return hp;
}

TrainState random_state(const LabeledDataset& ds, const Hyperparams& hp, std::mt19937_64& rng) {
  TrainState s = init_state(ds, hp);
  for (auto& A : s.codes) A = testing::random_matrix(A.rows(), A.cols(), rng).cwiseAbs();
  s.P = testing::random_matrix(s.P.rows(), s.P.cols(), rng);
  s.W = testing::random_matrix(s.W.rows(), s.W.cols(), rng);
  return s;
}

TEST(InitState, GaussianModeHasUnitFrobeniusNorms) {
  const auto ds = synth_blobs(3, 7, 5, 4.0, 1);
  const auto s = init_state(ds, small_hp(3));
  EXPECT_NEAR(s.D.norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.P.norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.W.norm(), 1.0, 1e-12);
  EXPECT_EQ(s.D.rows(), 7);
  EXPECT_EQ(s.D.cols(), 9);
  EXPECT_EQ(s.P.rows(), 9);
  EXPECT_EQ(s.W.rows(), 3);
  EXPECT_EQ(s.lambda, Eigen::VectorXd::Ones(9));
  ASSERT_EQ(s.codes.size(), 3u);
  EXPECT_EQ(s.codes[0].rows(), 3);
  EXPECT_EQ(s.codes[0].cols(), 5);
}

TEST(InitState, DeterministicPerSeed) {
  const auto ds = synth_blobs(3, 7, 5, 4.0, 1);
  auto hp = small_hp(3);
  const auto a = init_state(ds, hp);
  const auto b = init_state(ds, hp);
  EXPECT_EQ(a.D, b.D);
  EXPECT_EQ(a.P, b.P);
  EXPECT_EQ(a.W, b.W);
  hp.seed = 4;
  EXPECT_NE(init_state(ds, hp).D, a.D);
}

TEST(InitState, ClassSamplesAreNormalizedClassMembers) {
  const auto ds = synth_blobs_raw(3, 6, 8, 5.0, 2);
  auto hp = small_hp(4);
  hp.init = InitMode::class_samples;
  const auto s = init_state(ds, hp);
  for (int i = 0; i < 3; ++i) {
    std::vector<Index> used;
    for (int a = 0; a < 4; ++a) {
      const Eigen::VectorXd atom = s.D.col(i * 4 + a);
      bool found = false;
      for (Index j = 0; j < ds.class_size(i); ++j) {
        const Eigen::VectorXd x = ds.class_block(i).col(j).normalized();
        if ((x - atom).norm() < 1e-12) {
          found = true;
          used.push_back(j);
        }
      }
      EXPECT_TRUE(found) << "class " << i << " atom " << a;
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end()) << "drawn with replacement";
  }
}

TEST(InitState, ClassSamplesWithFewSamplesStillFillsAtoms) {
  const auto ds = synth_blobs(2, 5, 2, 5.0, 2);
  auto hp = small_hp(4);
  hp.init = InitMode::class_samples;
  const auto s = init_state(ds, hp);
  EXPECT_TRUE(s.D.allFinite());
  for (Index j = 0; j < s.D.cols(); ++j) EXPECT_NEAR(s.D.col(j).norm(), 1.0, 1e-12);
}

TEST(Objective, ZeroCodesAndClassifier) {
  const auto ds = synth_blobs(3, 6, 4, 4.0, 5);
  const auto hp = small_hp(2);
  auto s = init_state(ds, hp);
  s.W.setZero();
  const Eigen::MatrixXd H = one_hot(ds);
  const auto t = objective(s, ds, H, hp);
  const double want = ds.features.squaredNorm() + hp.tau * (s.P * ds.features).squaredNorm() +
                      hp.beta * H.squaredNorm();
  EXPECT_NEAR(t.total(), want, 1e-12 * want);
}

TEST(Objective, OnlyReconstructionWithoutWeights) {
  std::mt19937_64 rng(6);
  const auto ds = synth_blobs(3, 6, 4, 4.0, 5);
  auto hp = small_hp(2);
  const auto s = random_state(ds, hp, rng);
  hp.tau = hp.alpha = hp.beta = 0.0;
  const auto t = objective(s, ds, one_hot(ds), hp);
  double want = 0.0;
  for (int i = 0; i < 3; ++i) want += (ds.class_block(i) - s.D.middleCols(2 * i, 2) * s.codes[i]).squaredNorm();
  EXPECT_NEAR(t.total(), want, 1e-12 * want);
  EXPECT_EQ(t.approximation, 0.0);
  EXPECT_EQ(t.locality, 0.0);
  EXPECT_EQ(t.classification + t.l21, 0.0);
}

TEST(Objective, MatchesTermAssemblyFromModuleOperations) {
  std::mt19937_64 rng(7);
  const auto ds = synth_blobs(4, 9, 6, 4.0, 8);
  auto hp = small_hp(3);
  hp.tau = 0.3;
  hp.alpha = 0.2;
  hp.beta = 0.7;
  const auto s = random_state(ds, hp, rng);
  const Eigen::MatrixXd H = one_hot(ds);
  const BlockIndicator Q(4, 3);
  const Eigen::MatrixXd B = block_target(Q, s.codes);
  double recon = 0.0, local = 0.0;
  for (int i = 0; i < 4; ++i) {
    recon += coding_residual(ds.class_block(i), s.D.middleCols(3 * i, 3), s.codes[i]);
    local += locality_energy(s.codes[i], s.laplacians[i]);
  }
  const double want = recon + hp.tau * (s.P * ds.features - B).squaredNorm() + hp.alpha * local +
                      hp.beta * ((H - s.W * s.P * ds.features).squaredNorm() + l21_norm(s.W));
  EXPECT_NEAR(objective(s, ds, H, hp).total(), want, 1e-10 * want);
}

TEST(Fit, SingleIterationProducesOneRow) {
  const auto ds = synth_blobs(3, 6, 5, 6.0, 2);
  auto hp = small_hp(2);
  hp.max_outer = 1;
  const auto r = fit(ds, hp);
  ASSERT_EQ(r.trace.rows.size(), 1u);
  EXPECT_EQ(r.trace.iterations, 1);
  EXPECT_FALSE(r.trace.converged);
  const auto& m = r.model;
  EXPECT_EQ(m.n, 6);
  EXPECT_EQ(m.c, 3);
  EXPECT_EQ(m.k, 2);
  EXPECT_EQ(m.D.rows(), 6);
  EXPECT_EQ(m.D.cols(), 6);
  EXPECT_EQ(m.P.rows(), 6);
  EXPECT_EQ(m.P.cols(), 6);
  EXPECT_EQ(m.W.rows(), 3);
  EXPECT_EQ(m.W.cols(), 6);
  EXPECT_NO_THROW(m.validate());
}

TEST(Fit, DeterministicSerialization) {
  const auto ds = synth_blobs(3, 8, 10, 6.0, 4);
  const auto hp = small_hp(3);
  EXPECT_EQ(serialize_model(fit(ds, hp).model), serialize_model(fit(ds, hp).model));
}

TEST(Fit, ConvergesOnSeparatedBlobs) {
  const auto ds = synth_blobs(5, 20, 20, 8.0, 3);
  auto hp = small_hp(4);
  hp.max_outer = 30;
  hp.rel_tol = 1e-12;
  const auto r = fit(ds, hp);
  ASSERT_GE(r.trace.rows.size(), 15u);
  EXPECT_LE(r.trace.rows[14].objective, r.trace.rows[0].objective);
  bool settled = false;
  for (std::size_t t = 1; t < r.trace.rows.size() && t < 30; ++t) {
    const double prev = r.trace.rows[t - 1].objective;
    if (std::abs(r.trace.rows[t].objective - prev) / prev < 1e-3) settled = true;
  }
  EXPECT_TRUE(settled);
}

TEST(Fit, StopsOnRelativeTolerance) {
  const auto ds = synth_blobs(3, 8, 10, 6.0, 4);
  auto hp = small_hp(3);
  hp.rel_tol = 1e-2;
  const auto r = fit(ds, hp);
  ASSERT_TRUE(r.trace.converged);
  const auto& rows = r.trace.rows;
  const double prev = rows[rows.size() - 2].objective;
  EXPECT_LT(std::abs(rows.back().objective - prev) / prev, 1e-2);
  EXPECT_LT(r.trace.iterations, hp.max_outer);
}

TEST(Fit, TraceBreakdownIsConsistent) {
  const auto ds = synth_blobs(3, 8, 10, 6.0, 4);
  const auto r = fit(ds, small_hp(3));
  for (const auto& row : r.trace.rows) {
    const auto& t = row.terms;
    EXPECT_NEAR(t.reconstruction + t.approximation + t.locality + t.classification + t.l21, row.objective,
                1e-9 * row.objective);
    for (double v : {t.reconstruction, t.approximation, t.locality, t.classification, t.l21}) EXPECT_GE(v, 0.0);
    EXPECT_GE(row.millis, 0.0);
  }
  EXPECT_EQ(r.model.provenance.final_objective, r.trace.rows.back().objective);
}

TEST(Fit, StateSatisfiesInvariantsEveryIteration) {
  const auto ds = synth_blobs(4, 10, 8, 6.0, 9);
  const auto hp = small_hp(3);
  int calls = 0;
  fit(ds, hp, [&](int t, const TrainState& s) {
    EXPECT_EQ(t, ++calls);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(s.codes[i].rows(), 3);
      EXPECT_EQ(s.codes[i].cols(), ds.class_size(i));
      EXPECT_GE(s.codes[i].minCoeff(), 0.0);
    }
    EXPECT_LE(s.D.colwise().norm().maxCoeff(), 1.0 + 1e-6);
    EXPECT_GT(s.lambda.minCoeff(), 0.0);
  });
  EXPECT_GT(calls, 0);
}

TEST(Fit, ExactSubstepsNeverIncreaseTheirObjectives) {
  const auto ds = synth_blobs(4, 10, 8, 6.0, 9);
  const auto hp = small_hp(3);
  const Eigen::MatrixXd H = one_hot(ds);
  const BlockIndicator Q(4, 3);
  const ProjectionSolver solver(ds.features, 0.0);
  int checked = 0;
  fit(ds, hp, [&](int, const TrainState& s) {
    const Eigen::MatrixXd B = block_target(Q, s.codes);
    const double before = projection_objective(s.P, ds.features, B, H, s.W, hp.tau, hp.beta);
    const auto P = solver.solve(B, H, s.W, hp.tau, hp.beta);
    EXPECT_LE(projection_objective(P, ds.features, B, H, s.W, hp.tau, hp.beta), before + 1e-8 * (1.0 + before));

    const Eigen::MatrixXd Z = P * ds.features;
    const double w_before = reweighted_objective(H, Z, s.W, s.lambda);
    const auto W = update_classifier(H, Z, s.lambda);
    EXPECT_LE(reweighted_objective(H, Z, W, s.lambda), w_before + 1e-8 * (1.0 + w_before));

    const double pair_before = classifier_objective(H, Z, s.W);
    const auto W2 = reweighted_classifier_step(H, Z, update_lambda(s.W, hp.lambda_epsilon));
    EXPECT_LE(classifier_objective(H, Z, W2), pair_before + 1e-8 * (1.0 + pair_before));
    ++checked;
  });
  EXPECT_GT(checked, 1);
}

TEST(Fit, GeneralizesOnHeldOutBlobs) {
  const auto ds = synth_blobs(4, 16, 30, 8.0, 1);
  const auto split = stratified_split(ds, 0.5, 1);
  auto hp = small_hp(4);
  hp.seed = 1;
  const auto r = fit(split.train, hp);
  EXPECT_GE(evaluate(r.model, split.test).accuracy, 0.95);
}

TEST(Fit, RejectsUnusableInput) {
  const auto ds = synth_blobs(3, 6, 5, 6.0, 2);
  auto hp = small_hp(2);
  hp.tau = -1.0;
  try {
    fit(ds, hp);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("tau must be >= 0"), std::string::npos);
  }
  LabeledDataset one_class;
  one_class.features = ds.class_block(0);
  one_class.labels.assign(static_cast<std::size_t>(ds.class_size(0)), 0);
  one_class.label_names = {ds.label_names[0]};
  one_class.class_offsets = {0, ds.class_size(0)};
  EXPECT_THROW(fit(one_class, small_hp(2)), ValidationError);
}

TEST(Evaluate, Examples) {
  const auto perfect = evaluate_predictions({0, 1, 1, 2}, {0, 1, 1, 2}, 3);
  EXPECT_DOUBLE_EQ(perfect.accuracy, 1.0);
  Eigen::MatrixXi diag = Eigen::MatrixXi::Zero(3, 3);
  diag.diagonal() << 1, 2, 1;
  EXPECT_EQ(perfect.confusion, diag);

  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> guess{1, 0, 2, 1, 0, 0};
  const auto e = evaluate_predictions(truth, guess, 3);
  EXPECT_DOUBLE_EQ(e.accuracy, static_cast<double>(e.confusion.trace()) / 6.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(e.confusion.row(i).sum(), 2);
  EXPECT_THROW(evaluate_predictions({0}, {3}, 3), ValidationError);
}

TEST(Evaluate, DimensionMismatch) {
  const auto ds = synth_blobs(3, 6, 5, 6.0, 2);
  auto hp = small_hp(2);
  hp.max_outer = 2;
  const auto model = fit(ds, hp).model;
  EXPECT_THROW(evaluate(model, synth_blobs(3, 7, 5, 6.0, 2)), ValidationError);
}

TEST(Hyperparams, PresetsAndValidation) {
  const auto cbcl = preset("cbcl");
  EXPECT_EQ(cbcl.tau, 0.01);
  EXPECT_EQ(cbcl.alpha, 0.01);
  EXPECT_EQ(cbcl.beta, 0.1);
  EXPECT_EQ(preset("ar").beta, 0.1);
  EXPECT_EQ(preset("caltech101").alpha, 0.1);
  const auto c256 = preset("caltech256");
  EXPECT_EQ(c256.tau, 0.001);
  EXPECT_EQ(c256.beta, 1e-4);
  EXPECT_EQ(preset_names().size(), 4u);
  EXPECT_THROW(preset("mnist"), ValidationError);

  Hyperparams hp;
  EXPECT_NO_THROW(hp.validate());
  hp.atoms_per_class = 0;
  EXPECT_THROW(hp.validate(), ValidationError);
  hp = {};
  hp.max_outer = 0;
  EXPECT_THROW(hp.validate(), ValidationError);
  hp = {};
  hp.rel_tol = 0.0;
  EXPECT_THROW(hp.validate(), ValidationError);
  hp = {};
  hp.tau = hp.beta = 0.0;
  EXPECT_THROW(hp.validate(), ValidationError);

  EXPECT_EQ(init_mode_from_string("samples"), InitMode::class_samples);
  EXPECT_EQ(init_mode_from_string(to_string(InitMode::gaussian_unit_fnorm)), InitMode::gaussian_unit_fnorm);
  EXPECT_EQ(block_mode_from_string(to_string(BlockMode::identity)), BlockMode::identity);
  EXPECT_THROW(init_mode_from_string("zeros"), ValidationError);
}

}  // namespace
}  // namespace lcpdl
