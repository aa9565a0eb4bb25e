#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcpdl/dataset.hpp"
#include "lcpdl/error.hpp"
#include "lcpdl/persistence.hpp"
#include "lcpdl/sweep.hpp"
#include "lcpdl/text_format.hpp"
#include "lcpdl/trainer.hpp"

namespace lcpdl::cli {

namespace {

using json = nlohmann::json;

/// Carries an exit code out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kUsageError, msg}; }
[[noreturn]] void runtime_error(const std::string& msg) { throw Failure{kRuntimeFailure, msg}; }

// Data problems are usage errors; everything else the library raises is a
// runtime failure.
LabeledDataset read_dataset(const std::string& path) {
  try {
    return load_csv(path);
  } catch (const Error& e) {
    usage_error(e.what());
  }
}

Model read_model(const std::string& path) {
  try {
    return load_model(path);
  } catch (const Error& e) {
    runtime_error(e.what());
  }
}

template <typename F>
void write_output(const std::string& path, F&& body) {
  std::ofstream out(path);
  if (!out) runtime_error("cannot open '" + path + "' for writing");
  body(out);
  if (!out) runtime_error("write to '" + path + "' failed");
}

template <typename T>
std::optional<T> given(CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

struct HyperparamFlags {
  std::string preset = "cbcl";
  double tau = 0, alpha = 0, beta = 0, rho = 0, tol = 0, ridge = 0;
  int atoms = 0, knn = 0, max_iters = 0;
  std::uint64_t seed = 0;
  std::string init;
  CLI::Option *tau_opt{}, *alpha_opt{}, *beta_opt{}, *atoms_opt{}, *knn_opt{}, *rho_opt{},
      *iters_opt{}, *tol_opt{}, *ridge_opt{}, *seed_opt{}, *init_opt{};

  void attach(CLI::App* app, bool with_weights) {
    app->add_option("--preset", preset, "Hyperparameter preset")
        ->check(CLI::IsMember(lcpdl::preset_names()));
    if (with_weights) {
      tau_opt = app->add_option("--tau", tau, "Block-diagonal approximation weight");
      alpha_opt = app->add_option("--alpha", alpha, "Locality weight");
      beta_opt = app->add_option("--beta", beta, "Classifier weight");
    }
    atoms_opt = app->add_option("--atoms-per-class", atoms, "Dictionary atoms per class (k)");
    knn_opt = app->add_option("--knn", knn, "Neighbours in the atom graph (default min(5, k-1))");
    rho_opt = app->add_option("--rho", rho, "ADMM penalty");
    iters_opt = app->add_option("--max-iters", max_iters, "Outer iteration cap");
    tol_opt = app->add_option("--tol", tol, "Relative objective change that stops training");
    ridge_opt = app->add_option("--ridge", ridge, "Relative conditioning ridge");
    seed_opt = app->add_option("--seed", seed, "Random seed");
    if (with_weights) {
      init_opt = app->add_option("--init", init, "Initialization")
                     ->check(CLI::IsMember({"gaussian", "samples"}));
    }
  }

  Hyperparams build() const {
    Hyperparams hp = lcpdl::preset(preset);
    if (tau_opt && tau_opt->count()) hp.tau = tau;
    if (alpha_opt && alpha_opt->count()) hp.alpha = alpha;
    if (beta_opt && beta_opt->count()) hp.beta = beta;
    if (atoms_opt->count()) hp.atoms_per_class = atoms;
    if (knn_opt->count()) {
      if (knn < 0) usage_error("knn must be >= 0");
      hp.knn = knn;
    }
    if (rho_opt->count()) hp.admm.rho = rho;
    if (iters_opt->count()) hp.max_outer = max_iters;
    if (tol_opt->count()) hp.rel_tol = tol;
    if (ridge_opt->count()) hp.ridge = ridge;
    if (seed_opt->count()) hp.seed = seed;
    if (init_opt && init_opt->count()) hp.init = init_mode_from_string(init);
    hp.validate();
    return hp;
  }
};

LabeledDataset prepare_training_data(const std::string& path, bool normalize, std::ostream& err) {
  auto ds = read_dataset(path);
  if (ds.num_classes() < 2) usage_error(path + ": training data needs at least 2 classes");
  ds = partition_by_class(ds);
  if (normalize) {
    auto r = normalize_samples(ds);
    if (r.zero_columns > 0) {
      err << "warning: " << r.zero_columns << " all-zero sample(s) left unnormalized\n";
    }
    ds = std::move(r.dataset);
  }
  return ds;
}

FitResult train_or_fail(const LabeledDataset& ds, const Hyperparams& hp) {
  try {
    return fit(ds, hp);
  } catch (const ValidationError& e) {
    usage_error(e.what());
  } catch (const Error& e) {
    runtime_error(e.what());
  }
}

// ---------------------------------------------------------------------------

struct TrainCommand {
  std::string data, out, trace;
  bool normalize = false;
  HyperparamFlags hp;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train a model on a labeled CSV");
    cmd->add_option("--data", data, "Training CSV (label,f1,...,fn)")->required();
    cmd->add_option("--out", out, "Model file to write")->required();
    cmd->add_option("--trace", trace, "Write the per-iteration objective trace as JSON");
    cmd->add_flag("--normalize", normalize, "Scale every sample to unit l2 norm");
    hp.attach(cmd, true);
  }

  int run(std::ostream& out_stream, std::ostream& err) const {
    const Hyperparams params = hp.build();
    const auto ds = prepare_training_data(data, normalize, err);
    const auto started = std::chrono::steady_clock::now();
    const auto result = train_or_fail(ds, params);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    try {
      save_model(result.model, out);
      if (!trace.empty()) save_trace(result.trace, trace);
    } catch (const Error& e) {
      runtime_error(e.what());
    }
    out_stream << "final J " << detail::format_double(result.model.provenance.final_objective) << '\n'
               << "iterations " << result.trace.iterations
               << (result.trace.converged ? " (converged)" : " (iteration cap)") << '\n'
               << "wall time " << std::fixed << std::setprecision(1) << ms << " ms\n";
    return kSuccess;
  }
};

struct PredictCommand {
  std::string model, data, out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("predict", "Write soft and hard labels for every sample");
    cmd->add_option("--model", model, "Model file")->required();
    cmd->add_option("--data", data, "CSV of samples (label column is ignored)")->required();
    cmd->add_option("--out", out, "Output CSV: predicted_label,soft_0,...,soft_{c-1}")->required();
  }

  int run(std::ostream&, std::ostream&) const {
    const auto m = read_model(model);
    const auto ds = read_dataset(data);
    if (ds.dim() != m.n) {
      runtime_error("dimension mismatch: data has " + std::to_string(ds.dim()) +
                    " features, model expects " + std::to_string(m.n));
    }
    const auto pred = m.predict_batch(ds.features);
    write_output(out, [&](std::ostream& os) {
      for (Index j = 0; j < ds.size(); ++j) {
        os << m.label_names[pred.labels[j]];
        for (Index r = 0; r < pred.soft.rows(); ++r) os << ',' << detail::format_double(pred.soft(r, j));
        os << '\n';
      }
    });
    return kSuccess;
  }
};

struct EvalCommand {
  std::string model, data, json_out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Report accuracy and the confusion matrix");
    cmd->add_option("--model", model, "Model file")->required();
    cmd->add_option("--data", data, "Labeled CSV")->required();
    cmd->add_option("--json", json_out, "Also write {accuracy, labels, confusion} as JSON");
  }

  int run(std::ostream& out, std::ostream&) const {
    const auto m = read_model(model);
    const auto raw = read_dataset(data);
    if (raw.dim() != m.n) {
      runtime_error("dimension mismatch: data has " + std::to_string(raw.dim()) +
                    " features, model expects " + std::to_string(m.n));
    }
    LabeledDataset ds;
    try {
      ds = remap_labels(raw, m.label_names);
    } catch (const Error& e) {
      usage_error(data + ": " + e.what());
    }
    const auto ev = evaluate(m, ds);

    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", ev.accuracy);
    out << "accuracy " << buf << '\n';
    out << "confusion (rows: true, columns: predicted)\n";
    std::size_t width = 5;
    for (auto name : m.label_names) width = std::max(width, std::to_string(name).size() + 1);
    width = std::max(width, std::to_string(ev.confusion.maxCoeff()).size() + 1);
    out << std::setw(static_cast<int>(width)) << "";
    for (auto name : m.label_names) out << std::setw(static_cast<int>(width)) << name;
    out << '\n';
    for (int i = 0; i < m.c; ++i) {
      out << std::setw(static_cast<int>(width)) << m.label_names[i];
      for (int j = 0; j < m.c; ++j) out << std::setw(static_cast<int>(width)) << ev.confusion(i, j);
      out << '\n';
    }

    if (!json_out.empty()) {
      json doc = json::object();
      doc["accuracy"] = ev.accuracy;
      doc["labels"] = m.label_names;
      json rows = json::array();
      for (int i = 0; i < m.c; ++i) {
        json row = json::array();
        for (int j = 0; j < m.c; ++j) row.push_back(ev.confusion(i, j));
        rows.push_back(std::move(row));
      }
      doc["confusion"] = std::move(rows);
      write_output(json_out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }
    return kSuccess;
  }
};

struct SynthCommand {
  int classes = 0;
  Index dim = 0, per_class = 0;
  double sep = 0.0, noise_var = 0.0;
  std::uint64_t seed = 0, noise_seed = 0;
  std::string out;
  CLI::Option* noise_seed_opt{};

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Write normalized Gaussian blobs as CSV");
    cmd->add_option("--classes", classes, "Number of classes (>= 2)")->required();
    cmd->add_option("--dim", dim, "Feature dimension (>= classes)")->required();
    cmd->add_option("--per-class", per_class, "Samples per class (>= 2)")->required();
    cmd->add_option("--sep", sep, "Distance of each class mean from the origin")->required();
    cmd->add_option("--seed", seed, "Random seed")->required();
    cmd->add_option("--out", out, "Output CSV")->required();
    cmd->add_option("--noise-var", noise_var,
                    "Variance of Gaussian noise added to every feature before normalization");
    noise_seed_opt = cmd->add_option("--noise-seed", noise_seed, "Noise seed (default seed + 1)");
  }

  int run(std::ostream& out_stream, std::ostream& err) const {
    LabeledDataset ds;
    try {
      if (!(sep > 0.0)) throw ValidationError("sep must be > 0");
      ds = synth_blobs_raw(classes, dim, per_class, sep, seed);
      ds = add_gaussian_noise(ds, noise_var, noise_seed_opt->count() ? noise_seed : seed + 1);
    } catch (const Error& e) {
      usage_error(e.what());
    }
    auto normalized = normalize_samples(ds);
    if (normalized.zero_columns > 0) {
      err << "warning: " << normalized.zero_columns << " all-zero sample(s) left unnormalized\n";
    }
    write_output(out, [&](std::ostream& os) { write_csv(normalized.dataset, os); });
    out_stream << "wrote " << ds.size() << " samples (" << classes << " classes, dim " << dim
               << ") to " << out << '\n';
    return kSuccess;
  }
};

struct SweepCommand {
  std::string data, fix, grid, range = "1e-6:1e6", out;
  int steps = 7;
  bool normalize = false;
  HyperparamFlags hp;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "Held-out accuracy over a log grid of tau/alpha/beta");
    cmd->add_option("--data", data, "Labeled CSV, split 50/50 per class")->required();
    cmd->add_option("--fix", fix, "Fixed values, e.g. tau=0.01 or tau=0.01,beta=0.1");
    cmd->add_option("--grid", grid, "Swept parameters, e.g. alpha,beta");
    cmd->add_option("--range", range, "Log-grid range low:high");
    cmd->add_option("--steps", steps, "Grid points per swept parameter");
    cmd->add_option("--out", out, "Output JSON [{params, accuracy}]")->required();
    cmd->add_flag("--normalize", normalize, "Scale every sample to unit l2 norm");
    hp.attach(cmd, false);
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) usage_error("empty entry in list '" + s + "'");
      items.push_back(item);
    }
    return items;
  }

  static double parse_number(const std::string& s, const std::string& what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      usage_error("malformed " + what + " '" + s + "'");
    }
  }

  SweepSpec build_spec() const {
    SweepSpec spec;
    try {
      for (const auto& item : split_list(fix)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) usage_error("malformed --fix entry '" + item + "'");
        const auto p = sweep_param_from_string(item.substr(0, eq));
        if (spec.fixed.count(p)) usage_error("parameter " + to_string(p) + " fixed twice");
        spec.fixed[p] = parse_number(item.substr(eq + 1), "--fix value");
      }
      for (const auto& item : split_list(grid)) spec.grid.push_back(sweep_param_from_string(item));
      const auto colon = range.find(':');
      if (colon == std::string::npos) usage_error("malformed --range '" + range + "'");
      spec.low = parse_number(range.substr(0, colon), "--range bound");
      spec.high = parse_number(range.substr(colon + 1), "--range bound");
      spec.steps = steps;
      spec.seed = hp.seed;  // --seed is registered by the shared hyperparameter flags
      spec.validate();
    } catch (const ValidationError& e) {
      usage_error(e.what());
    }
    return spec;
  }

  int run(std::ostream& out_stream, std::ostream& err) const {
    const auto spec = build_spec();
    const Hyperparams base = hp.build();
    const auto ds = prepare_training_data(data, normalize, err);
    std::vector<SweepRow> rows;
    try {
      rows = parameter_sweep(ds, base, spec);
    } catch (const ValidationError& e) {
      usage_error(e.what());
    } catch (const Error& e) {
      runtime_error(e.what());
    }

    json doc = json::array();
    out_stream << std::setw(12) << "tau" << std::setw(12) << "alpha" << std::setw(12) << "beta"
               << std::setw(10) << "accuracy" << '\n';
    for (const auto& r : rows) {
      json params = json::object();
      params["tau"] = r.tau;
      params["alpha"] = r.alpha;
      params["beta"] = r.beta;
      json row = json::object();
      row["params"] = std::move(params);
      row["accuracy"] = r.accuracy;
      doc.push_back(std::move(row));
      out_stream << std::setw(12) << r.tau << std::setw(12) << r.alpha << std::setw(12) << r.beta
                 << std::setw(10) << std::fixed << std::setprecision(4) << r.accuracy
                 << std::defaultfloat << '\n';
    }
    write_output(out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return kSuccess;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Locality-constrained projective dictionary learning", "lcpdl"};
  app.require_subcommand(1);

  TrainCommand train;
  PredictCommand predict;
  EvalCommand eval;
  SynthCommand synth;
  SweepCommand sweep;
  train.attach(app);
  predict.attach(app);
  eval.attach(app);
  synth.attach(app);
  sweep.attach(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kSuccess;
    err << "\n" << app.help();
    return kUsageError;
  }

  try {
    if (app.got_subcommand("train")) return train.run(out, err);
    if (app.got_subcommand("predict")) return predict.run(out, err);
    if (app.got_subcommand("eval")) return eval.run(out, err);
    if (app.got_subcommand("synth")) return synth.run(out, err);
    if (app.got_subcommand("sweep")) return sweep.run(out, err);
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace lcpdl::cli
