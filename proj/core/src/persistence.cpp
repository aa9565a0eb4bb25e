#include "lcpdl/persistence.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcpdl/error.hpp"
#include "lcpdl/text_format.hpp"

namespace lcpdl {

namespace {

using json = nlohmann::json;
using detail::format_double;

// Hand-rolled writer: nlohmann emits shortest round-trip digits, the file
// format pins 17 significant digits.
class Writer {
 public:
  void open(char bracket) {
    out_ << bracket;
    first_.push_back(true);
  }
  void close(char bracket) {
    first_.pop_back();
    if (break_) out_ << "\n";
    break_ = false;
    out_ << bracket;
  }
  void key(std::string_view k) {
    separator();
    out_ << '"' << k << "\": ";
  }
  void raw(const std::string& text) { out_ << text; }
  void element(const std::string& text) {
    separator();
    out_ << text;
  }
  /// Puts the next member on its own indented line.
  void newline() { break_ = true; }
  std::string str() const { return out_.str(); }

 private:
  void separator() {
    if (!first_.back()) out_ << (break_ ? "," : ", ");
    if (break_) out_ << "\n  ";
    first_.back() = false;
    break_ = false;
  }
  std::ostringstream out_;
  std::vector<bool> first_;
  bool break_ = false;
};

std::string json_string(std::string_view s) { return "\"" + std::string(s) + "\""; }
std::string boolean(bool b) { return b ? "true" : "false"; }

void write_matrix(Writer& w, const Eigen::MatrixXd& m) {
  w.open('{');
  w.key("rows");
  w.raw(std::to_string(m.rows()));
  w.key("cols");
  w.raw(std::to_string(m.cols()));
  w.key("data");
  w.open('[');
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) w.element(format_double(m(r, c)));
  }
  w.close(']');
  w.close('}');
}

[[noreturn]] void fail(const std::string& what) { throw ModelFormatError("model file: " + what); }

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail("'" + path + "' must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail("missing field '" + (path.empty() ? "" : path + ".") + key + "'");
  return *it;
}

double real_at(const json& obj, const char* key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_number()) fail("field '" + path + "." + key + "' must be a number");
  return v.get<double>();
}

std::int64_t int_at(const json& obj, const char* key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_number_integer()) {
    fail("field '" + (path.empty() ? "" : path + ".") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

Eigen::MatrixXd read_matrix(const json& obj, const char* key, Index rows, Index cols,
                            const char* shape) {
  const std::string name(key);
  const auto& m = member(obj, key, "");
  const auto r = int_at(m, "rows", name);
  const auto c = int_at(m, "cols", name);
  if (r != rows || c != cols) {
    fail("matrix '" + name + "' is " + std::to_string(r) + " x " + std::to_string(c) +
         " but " + shape + " requires " + std::to_string(rows) + " x " + std::to_string(cols));
  }
  const auto& data = member(m, "data", name);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols) {
    fail("matrix '" + name + ".data' must hold rows * cols numbers");
  }
  Eigen::MatrixXd out(rows, cols);
  std::size_t idx = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const auto& v = data[idx++];
      if (!v.is_number()) fail("matrix '" + name + "' has a non-numeric entry");
      out(i, j) = v.get<double>();
    }
  }
  return out;
}

}  // namespace

std::string serialize_model(const Model& model) {
  model.validate();
  const auto& hp = model.hyperparams;
  Writer w;
  w.open('{');
  w.newline();
  w.key("format_version");
  w.raw(std::to_string(kModelFormatVersion));
  w.newline();
  w.key("dims");
  w.open('{');
  w.key("n");
  w.raw(std::to_string(model.n));
  w.key("c");
  w.raw(std::to_string(model.c));
  w.key("k");
  w.raw(std::to_string(model.k));
  w.key("K");
  w.raw(std::to_string(model.K()));
  w.close('}');
  w.newline();
  w.key("hyperparams");
  w.open('{');
  w.key("tau");
  w.raw(format_double(hp.tau));
  w.key("alpha");
  w.raw(format_double(hp.alpha));
  w.key("beta");
  w.raw(format_double(hp.beta));
  w.key("atoms_per_class");
  w.raw(std::to_string(hp.atoms_per_class));
  w.key("knn");
  w.raw(std::to_string(hp.knn));
  w.key("delta");
  w.raw(format_double(hp.delta));
  w.key("admm");
  w.open('{');
  w.key("rho");
  w.raw(format_double(hp.admm.rho));
  w.key("max_inner");
  w.raw(std::to_string(hp.admm.max_inner));
  w.key("primal_tol");
  w.raw(format_double(hp.admm.primal_tol));
  w.key("adaptive");
  w.raw(boolean(hp.admm.adaptive));
  w.close('}');
  w.key("max_outer");
  w.raw(std::to_string(hp.max_outer));
  w.key("rel_tol");
  w.raw(format_double(hp.rel_tol));
  w.key("ridge");
  w.raw(format_double(hp.ridge));
  w.key("seed");
  w.raw(std::to_string(hp.seed));
  w.key("init");
  w.raw(json_string(to_string(hp.init)));
  w.key("block_mode");
  w.raw(json_string(to_string(hp.block_mode)));
  w.key("lambda_epsilon");
  w.raw(format_double(hp.lambda_epsilon));
  w.close('}');
  w.newline();
  w.key("label_map");
  w.open('[');
  for (auto name : model.label_names) w.element(std::to_string(name));
  w.close(']');
  w.newline();
  w.key("provenance");
  w.open('{');
  w.key("seed");
  w.raw(std::to_string(model.provenance.seed));
  w.key("iterations");
  w.raw(std::to_string(model.provenance.iterations));
  w.key("final_objective");
  w.raw(format_double(model.provenance.final_objective));
  w.close('}');
  w.newline();
  w.key("D");
  write_matrix(w, model.D);
  w.newline();
  w.key("P");
  write_matrix(w, model.P);
  w.newline();
  w.key("W");
  write_matrix(w, model.W);
  w.newline();
  w.close('}');
  return w.str() + "\n";
}

Model deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) fail("top level must be an object");

  const auto version = int_at(doc, "format_version", "");
  if (version != kModelFormatVersion) {
    fail("unsupported version " + std::to_string(version) + " (this build reads version " +
         std::to_string(kModelFormatVersion) + ")");
  }

  Model m;
  try {
    const auto& dims = member(doc, "dims", "");
    const auto n = int_at(dims, "n", "dims");
    const auto c = int_at(dims, "c", "dims");
    const auto k = int_at(dims, "k", "dims");
    const auto K = int_at(dims, "K", "dims");
    if (n < 1) fail("field 'dims.n' must be >= 1");
    if (c < 2) fail("field 'dims.c' must be >= 2");
    if (k < 1) fail("field 'dims.k' must be >= 1");
    if (K != c * k) fail("field 'dims.K' must equal c * k");
    m.n = n;
    m.c = static_cast<int>(c);
    m.k = static_cast<int>(k);

    const auto& h = member(doc, "hyperparams", "");
    auto& hp = m.hyperparams;
    hp.tau = real_at(h, "tau", "hyperparams");
    hp.alpha = real_at(h, "alpha", "hyperparams");
    hp.beta = real_at(h, "beta", "hyperparams");
    hp.atoms_per_class = static_cast<int>(int_at(h, "atoms_per_class", "hyperparams"));
    hp.knn = static_cast<int>(int_at(h, "knn", "hyperparams"));
    hp.delta = real_at(h, "delta", "hyperparams");
    const auto& admm = member(h, "admm", "hyperparams");
    hp.admm.rho = real_at(admm, "rho", "hyperparams.admm");
    hp.admm.max_inner = static_cast<int>(int_at(admm, "max_inner", "hyperparams.admm"));
    hp.admm.primal_tol = real_at(admm, "primal_tol", "hyperparams.admm");
    const auto& adaptive = member(admm, "adaptive", "hyperparams.admm");
    if (!adaptive.is_boolean()) fail("field 'hyperparams.admm.adaptive' must be a boolean");
    hp.admm.adaptive = adaptive.get<bool>();
    hp.max_outer = static_cast<int>(int_at(h, "max_outer", "hyperparams"));
    hp.rel_tol = real_at(h, "rel_tol", "hyperparams");
    hp.ridge = real_at(h, "ridge", "hyperparams");
    const auto& seed = member(h, "seed", "hyperparams");
    if (!seed.is_number_unsigned()) fail("field 'hyperparams.seed' must be a nonnegative integer");
    hp.seed = seed.get<std::uint64_t>();
    const auto& init = member(h, "init", "hyperparams");
    const auto& block = member(h, "block_mode", "hyperparams");
    if (!init.is_string() || !block.is_string()) fail("init and block_mode must be strings");
    hp.init = init_mode_from_string(init.get<std::string>());
    hp.block_mode = block_mode_from_string(block.get<std::string>());
    hp.lambda_epsilon = real_at(h, "lambda_epsilon", "hyperparams");
    if (hp.atoms_per_class != m.k) fail("field 'hyperparams.atoms_per_class' disagrees with dims.k");

    const auto& labels = member(doc, "label_map", "");
    if (!labels.is_array() || static_cast<int>(labels.size()) != m.c) {
      fail("field 'label_map' must list one label per class");
    }
    for (const auto& l : labels) {
      if (!l.is_number_integer()) fail("field 'label_map' must hold integers");
      m.label_names.push_back(l.get<std::int64_t>());
    }

    const auto& prov = member(doc, "provenance", "");
    const auto& pseed = member(prov, "seed", "provenance");
    if (!pseed.is_number_unsigned()) fail("field 'provenance.seed' must be a nonnegative integer");
    m.provenance.seed = pseed.get<std::uint64_t>();
    m.provenance.iterations = static_cast<int>(int_at(prov, "iterations", "provenance"));
    m.provenance.final_objective = real_at(prov, "final_objective", "provenance");

    m.D = read_matrix(doc, "D", m.n, m.K(), "dims.n x dims.K");
    m.P = read_matrix(doc, "P", m.K(), m.n, "dims.K x dims.n");
    m.W = read_matrix(doc, "W", m.c, m.K(), "dims.c x dims.K");
    m.validate();
  } catch (const ModelFormatError&) {
    throw;
  } catch (const json::exception& e) {
    fail(e.what());
  } catch (const ValidationError& e) {
    fail(e.what());
  }
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const ModelFormatError& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
}

std::string serialize_trace(const TrainTrace& trace) {
  json rows = json::array();
  for (const auto& r : trace.rows) {
    json terms = json::object();
    terms["recon"] = r.terms.reconstruction;
    terms["approx"] = r.terms.approximation;
    terms["locality"] = r.terms.locality;
    terms["classif"] = r.terms.classification;
    terms["l21"] = r.terms.l21;
    json row = json::object();
    row["iter"] = r.iteration;
    row["J"] = r.objective;
    row["terms"] = std::move(terms);
    row["ms"] = r.millis;
    rows.push_back(std::move(row));
  }
  return rows.dump(2) + "\n";
}

void save_trace(const TrainTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << serialize_trace(trace);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace lcpdl
