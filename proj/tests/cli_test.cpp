#include "cli.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lcpdl/dataset.hpp"
#include "lcpdl/persistence.hpp"
#include "lcpdl/sweep.hpp"
#include "lcpdl/text_format.hpp"
#include "lcpdl/trainer.hpp"
#include "oracles.hpp"

namespace lcpdl {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  testing::TempDir dir;

  std::string path(const std::string& name) const { return (dir / name).string(); }

  std::string synth(const std::string& name, int classes, int dim, int per_class, double sep, int seed,
                    double noise = 0.0) {
    const auto r = run_cli({"synth", "--classes", std::to_string(classes), "--dim", std::to_string(dim),
                            "--per-class", std::to_string(per_class), "--sep", detail::format_double(sep),
                            "--seed", std::to_string(seed), "--noise-var", detail::format_double(noise),
                            "--out", path(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return path(name);
  }
};

TEST_F(CliTest, TrainWritesModelAndTrace) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 3);
  const auto r = run_cli({"train", "--data", data, "--preset", "cbcl", "--atoms-per-class", "3", "--seed", "3",
                          "--out", path("m.json"), "--trace", path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("final J"), std::string::npos);
  EXPECT_NE(r.out.find("iterations"), std::string::npos);
  EXPECT_NE(r.out.find("wall time"), std::string::npos);
  EXPECT_NO_THROW(load_model(path("m.json")));
  const auto trace = nlohmann::json::parse(slurp(path("t.json")));
  EXPECT_TRUE(trace.is_array());
  EXPECT_FALSE(trace.empty());
}

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 3);
  EXPECT_EQ(run_cli({"train", "--out", path("m.json")}).code, 2);
  const auto neg = run_cli({"train", "--data", data, "--out", path("m.json"), "--tau", "-1"});
  EXPECT_EQ(neg.code, 2);
  EXPECT_NE(neg.err.find("tau must be >= 0"), std::string::npos) << neg.err;
  EXPECT_EQ(run_cli({"train", "--data", data, "--out", path("m.json"), "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--data", path("missing.csv"), "--out", path("m.json")}).code, 2);
  EXPECT_EQ(run_cli({"train", "--data", data, "--out", path("m.json"), "--preset", "mnist"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, PredictMatchesLibrary) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 4);
  ASSERT_EQ(run_cli({"train", "--data", data, "--atoms-per-class", "3", "--out", path("m.json")}).code, 0);
  const auto r = run_cli({"predict", "--model", path("m.json"), "--data", data, "--out", path("p.csv")});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto model = load_model(path("m.json"));
  const auto ds = load_csv(data);
  const auto pred = model.predict_batch(ds.features);
  const auto rows = lines_of(slurp(path("p.csv")));
  ASSERT_EQ(static_cast<Index>(rows.size()), ds.size());
  for (Index j = 0; j < ds.size(); ++j) {
    std::string want = std::to_string(model.label_names[pred.labels[j]]);
    for (Index r2 = 0; r2 < pred.soft.rows(); ++r2) want += "," + detail::format_double(pred.soft(r2, j));
    EXPECT_EQ(rows[j], want);
  }
}

TEST_F(CliTest, RuntimeFailuresExitWithOne) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 4);
  const auto wide = synth("wide.csv", 3, 9, 10, 8.0, 4);
  ASSERT_EQ(run_cli({"train", "--data", data, "--atoms-per-class", "3", "--out", path("m.json")}).code, 0);
  EXPECT_EQ(run_cli({"predict", "--model", path("nope.json"), "--data", data, "--out", path("p.csv")}).code, 1);
  {
    std::ofstream(path("garbage.json")) << "{\"format_version\": 1";
  }
  EXPECT_EQ(run_cli({"predict", "--model", path("garbage.json"), "--data", data, "--out", path("p.csv")}).code, 1);
  EXPECT_EQ(run_cli({"predict", "--model", path("m.json"), "--data", wide, "--out", path("p.csv")}).code, 1);
  EXPECT_EQ(run_cli({"eval", "--model", path("m.json"), "--data", wide}).code, 1);
}

TEST_F(CliTest, EvalReportsLibraryAccuracy) {
  const auto data = synth("blobs.csv", 3, 8, 12, 8.0, 5);
  ASSERT_EQ(run_cli({"train", "--data", data, "--atoms-per-class", "3", "--out", path("m.json")}).code, 0);
  const auto r = run_cli({"eval", "--model", path("m.json"), "--data", data, "--json", path("e.json")});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto model = load_model(path("m.json"));
  const auto ds = remap_labels(load_csv(data), model.label_names);
  const auto ev = evaluate(model, ds);
  char want[32];
  std::snprintf(want, sizeof(want), "accuracy %.4f", ev.accuracy);
  EXPECT_EQ(lines_of(r.out).front(), want);
  EXPECT_EQ(ev.accuracy, 1.0);
  EXPECT_EQ(lines_of(r.out).front(), "accuracy 1.0000");

  const auto j = nlohmann::json::parse(slurp(path("e.json")));
  EXPECT_EQ(j["accuracy"].get<double>(), ev.accuracy);
  EXPECT_EQ(j["confusion"].size(), 3u);

  std::ofstream(path("empty.csv")).close();
  EXPECT_EQ(run_cli({"eval", "--model", path("m.json"), "--data", path("empty.csv")}).code, 2);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const auto a = slurp(synth("a.csv", 4, 6, 5, 3.0, 9));
  const auto b = slurp(synth("b.csv", 4, 6, 5, 3.0, 9));
  EXPECT_EQ(a, b);
  const auto plain = run_cli({"synth", "--classes", "4", "--dim", "6", "--per-class", "5", "--sep", "3", "--seed",
                              "9", "--out", path("c.csv")});
  ASSERT_EQ(plain.code, 0);
  EXPECT_EQ(slurp(path("c.csv")), a);
  EXPECT_NE(slurp(synth("d.csv", 4, 6, 5, 3.0, 9, 0.5)), a);
  EXPECT_EQ(run_cli({"synth", "--classes", "0", "--dim", "6", "--per-class", "5", "--sep", "3", "--seed", "1",
                     "--out", path("x.csv")}).code, 2);
  EXPECT_EQ(run_cli({"synth", "--classes", "3", "--dim", "6", "--per-class", "5", "--sep", "3", "--seed", "1",
                     "--noise-var", "-1", "--out", path("x.csv")}).code, 2);
}

TEST_F(CliTest, TrainIsDeterministic) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 3);
  for (const char* name : {"m1.json", "m2.json"}) {
    ASSERT_EQ(run_cli({"train", "--data", data, "--atoms-per-class", "3", "--seed", "7", "--out", path(name)}).code, 0);
  }
  EXPECT_EQ(slurp(path("m1.json")), slurp(path("m2.json")));
}

TEST_F(CliTest, NoiseDegradesHeldOutAccuracyMonotonically) {
  double previous = 2.0;
  for (double var : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const auto data = synth("noisy.csv", 5, 20, 20, 8.0, 3, var);
    const auto r = run_cli({"sweep", "--data", data, "--fix", "tau=0.01,alpha=0.01,beta=0.1", "--atoms-per-class",
                            "4", "--seed", "3", "--out", path("s.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = nlohmann::json::parse(slurp(path("s.json")));
    ASSERT_EQ(rows.size(), 1u);
    const double acc = rows[0]["accuracy"].get<double>();
    EXPECT_LE(acc, previous + 0.02) << "noise variance " << var;
    previous = acc;
  }
}

TEST_F(CliTest, SweepCardinalityAndDegenerateGrid) {
  const auto data = synth("blobs.csv", 3, 10, 12, 8.0, 5);
  const auto r = run_cli({"sweep", "--data", data, "--fix", "tau=0.01", "--grid", "alpha,beta", "--range",
                          "0.01:1", "--steps", "2", "--atoms-per-class", "3", "--max-iters", "10", "--seed", "5",
                          "--out", path("grid.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto grid = nlohmann::json::parse(slurp(path("grid.json")));
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[1]["params"]["alpha"].get<double>(), 0.01);
  EXPECT_EQ(grid[1]["params"]["beta"].get<double>(), 1.0);

  const auto single = run_cli({"sweep", "--data", data, "--fix", "tau=0.01,alpha=0.02,beta=0.2",
                               "--atoms-per-class", "3", "--max-iters", "10", "--seed", "5", "--out",
                               path("one.json")});
  ASSERT_EQ(single.code, 0) << single.err;
  const auto one = nlohmann::json::parse(slurp(path("one.json")));
  ASSERT_EQ(one.size(), 1u);

  Hyperparams hp = preset("cbcl");
  hp.tau = 0.01;
  hp.alpha = 0.02;
  hp.beta = 0.2;
  hp.atoms_per_class = 3;
  hp.max_outer = 10;
  hp.seed = 5;
  const auto split = stratified_split(partition_by_class(load_csv(data)), 0.5, 5);
  EXPECT_EQ(one[0]["accuracy"].get<double>(), evaluate(fit(split.train, hp).model, split.test).accuracy);
}

TEST_F(CliTest, MalformedSweepSpecsExitWithTwo) {
  const auto data = synth("blobs.csv", 3, 8, 10, 8.0, 5);
  const std::vector<std::vector<std::string>> bad{
      {"--grid", "alpha,gamma"},       {"--grid", "alpha,,beta"},     {"--grid", "alpha,alpha"},
      {"--fix", "tau"},                {"--fix", "tau=abc"},          {"--fix", "alpha=1", "--grid", "alpha"},
      {"--grid", "alpha", "--range", "1e-3"}, {"--grid", "alpha", "--range", "0:1"},
      {"--grid", "alpha", "--steps", "0"}};
  for (const auto& extra : bad) {
    std::vector<std::string> args{"sweep", "--data", data, "--out", path("s.json")};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(run_cli(args).code, 2) << extra.front() << " " << extra.back();
  }
}

}  // namespace
}  // namespace lcpdl
