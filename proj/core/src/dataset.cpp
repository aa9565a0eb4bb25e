#include "lcpdl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "lcpdl/error.hpp"
#include "lcpdl/text_format.hpp"

namespace lcpdl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

void LabeledDataset::validate() const {
  if (features.cols() != static_cast<Index>(labels.size())) {
    throw ValidationError("dataset: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.cols()) + " samples");
  }
  if (!features.allFinite()) throw ValidationError("dataset: non-finite feature value");
  const int c = num_classes();
  std::vector<Index> counts(c, 0);
  for (int y : labels) {
    if (y < 0 || y >= c) {
      throw ValidationError("dataset: label index " + std::to_string(y) + " outside [0, " +
                            std::to_string(c) + ")");
    }
    ++counts[y];
  }
  for (int i = 0; i < c; ++i) {
    if (counts[i] == 0) throw ValidationError("dataset: class " + std::to_string(i) + " is empty");
  }
  if (!class_offsets.empty()) {
    if (static_cast<int>(class_offsets.size()) != c + 1 || class_offsets.front() != 0 ||
        class_offsets.back() != size()) {
      throw ValidationError("dataset: malformed class offsets");
    }
    for (int i = 0; i < c; ++i) {
      for (Index j = class_offsets[i]; j < class_offsets[i + 1]; ++j) {
        if (labels[j] != i) throw ValidationError("dataset: columns are not grouped by class");
      }
    }
  }
}

LabeledDataset parse_csv(std::istream& in, const std::string& source) {
  std::vector<std::int64_t> raw_labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      throw ParseError(where(source, line_no) + "expected a label and at least one feature");
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw ParseError(where(source, line_no) + "ragged row: " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width));
    }
    std::int64_t label = 0;
    {
      const auto f = fields[0];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc() || ptr != f.data() + f.size() || label < 0) {
        throw ParseError(where(source, line_no) + "label '" + std::string(f) +
                         "' is not a nonnegative integer");
      }
    }
    std::vector<double> row(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const auto f = fields[j];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw ParseError(where(source, line_no) + "field " + std::to_string(j + 1) + " '" +
                         std::string(f) + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw ParseError(where(source, line_no) + "field " + std::to_string(j + 1) +
                         " is not finite");
      }
      row[j - 1] = v;
    }
    raw_labels.push_back(label);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": empty dataset");

  LabeledDataset ds;
  ds.label_names = raw_labels;
  std::sort(ds.label_names.begin(), ds.label_names.end());
  ds.label_names.erase(std::unique(ds.label_names.begin(), ds.label_names.end()),
                       ds.label_names.end());
  std::map<std::int64_t, int> dense;
  for (std::size_t i = 0; i < ds.label_names.size(); ++i) {
    dense[ds.label_names[i]] = static_cast<int>(i);
  }

  const Index n = static_cast<Index>(width - 1);
  const Index N = static_cast<Index>(rows.size());
  ds.features.resize(n, N);
  ds.labels.resize(N);
  for (Index j = 0; j < N; ++j) {
    ds.features.col(j) = Eigen::Map<const Eigen::VectorXd>(rows[j].data(), n);
    ds.labels[j] = dense[raw_labels[j]];
  }
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_csv(in, path.string());
}

void write_csv(const LabeledDataset& ds, std::ostream& out) {
  for (Index j = 0; j < ds.size(); ++j) {
    out << ds.label_names.at(ds.labels[j]);
    for (Index r = 0; r < ds.dim(); ++r) out << ',' << detail::format_double(ds.features(r, j));
    out << '\n';
  }
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(ds, out);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

NormalizeResult normalize_samples(const LabeledDataset& ds) {
  NormalizeResult result{ds, 0};
  for (Index j = 0; j < ds.size(); ++j) {
    auto col = result.dataset.features.col(j);
    const double norm = col.norm();
    if (norm > 0.0) {
      col /= norm;
    } else {
      ++result.zero_columns;
    }
  }
  return result;
}

std::vector<Index> partition_permutation(const std::vector<int>& labels) {
  std::vector<Index> order(labels.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return labels[a] < labels[b];
  });
  return order;
}

LabeledDataset partition_by_class(const LabeledDataset& ds) {
  const int c = ds.num_classes();
  const auto order = partition_permutation(ds.labels);
  LabeledDataset out;
  out.label_names = ds.label_names;
  out.features.resize(ds.dim(), ds.size());
  out.labels.resize(ds.labels.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.features.col(static_cast<Index>(j)) = ds.features.col(order[j]);
    out.labels[j] = ds.labels[order[j]];
  }
  out.class_offsets.assign(c + 1, 0);
  for (int y : out.labels) ++out.class_offsets[y + 1];
  std::partial_sum(out.class_offsets.begin(), out.class_offsets.end(), out.class_offsets.begin());
  out.validate();
  return out;
}

Eigen::MatrixXd one_hot(const LabeledDataset& ds) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ds.num_classes(), ds.size());
  for (Index j = 0; j < ds.size(); ++j) H(ds.labels[j], j) = 1.0;
  return H;
}

LabeledDataset synth_blobs_raw(int classes, Index dim, Index per_class, double separation,
                               std::uint64_t seed) {
  if (classes < 2) throw ValidationError("synth_blobs: need at least 2 classes");
  if (dim < classes) {
    throw ValidationError("synth_blobs: dim " + std::to_string(dim) + " < classes " +
                          std::to_string(classes) + " leaves no room for orthogonal centers");
  }
  if (per_class < 2) throw ValidationError("synth_blobs: need at least 2 samples per class");
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw ValidationError("synth_blobs: separation must be a finite value >= 0");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  ds.features.resize(dim, classes * per_class);
  ds.labels.resize(classes * per_class);
  ds.label_names.resize(classes);
  std::iota(ds.label_names.begin(), ds.label_names.end(), std::int64_t{0});
  for (int i = 0; i < classes; ++i) {
    for (Index s = 0; s < per_class; ++s) {
      const Index j = i * per_class + s;
      for (Index r = 0; r < dim; ++r) ds.features(r, j) = normal(rng);
      ds.features(i, j) += separation;
      ds.labels[j] = i;
    }
  }
  return partition_by_class(ds);
}

LabeledDataset synth_blobs(int classes, Index dim, Index per_class, double separation,
                           std::uint64_t seed) {
  return normalize_samples(synth_blobs_raw(classes, dim, per_class, separation, seed)).dataset;
}

LabeledDataset add_gaussian_noise(const LabeledDataset& ds, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw ValidationError("noise variance must be a finite value >= 0");
  }
  LabeledDataset out = ds;
  if (variance == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (Index j = 0; j < out.size(); ++j) {
    for (Index r = 0; r < out.dim(); ++r) out.features(r, j) += normal(rng);
  }
  return out;
}

TrainTestSplit stratified_split(const LabeledDataset& ds, double train_fraction,
                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  const int c = ds.num_classes();
  std::vector<std::vector<Index>> members(c);
  for (Index j = 0; j < ds.size(); ++j) members[ds.labels[j]].push_back(j);

  std::mt19937_64 rng(seed);
  std::vector<Index> train_cols;
  std::vector<Index> test_cols;
  for (auto& m : members) {
    std::shuffle(m.begin(), m.end(), rng);
    const auto Ni = static_cast<Index>(m.size());
    Index take = static_cast<Index>(std::floor(static_cast<double>(Ni) * train_fraction));
    take = std::max<Index>(take, 1);
    if (Ni >= 2) take = std::min(take, Ni - 1);
    std::sort(m.begin(), m.begin() + take);
    std::sort(m.begin() + take, m.end());
    train_cols.insert(train_cols.end(), m.begin(), m.begin() + take);
    test_cols.insert(test_cols.end(), m.begin() + take, m.end());
  }

  auto gather = [&](const std::vector<Index>& cols) {
    LabeledDataset out;
    out.label_names = ds.label_names;
    out.features.resize(ds.dim(), static_cast<Index>(cols.size()));
    out.labels.resize(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.features.col(static_cast<Index>(j)) = ds.features.col(cols[j]);
      out.labels[j] = ds.labels[cols[j]];
    }
    return out;
  };
  TrainTestSplit split{gather(train_cols), gather(test_cols)};
  split.train = partition_by_class(split.train);
  // A class with a single sample has nothing left for the test side.
  std::vector<int> present(c, 0);
  for (int y : split.test.labels) present[y] = 1;
  if (std::all_of(present.begin(), present.end(), [](int p) { return p == 1; })) {
    split.test = partition_by_class(split.test);
  }
  return split;
}

LabeledDataset remap_labels(const LabeledDataset& ds,
                            const std::vector<std::int64_t>& label_names) {
  std::map<std::int64_t, int> dense;
  for (std::size_t i = 0; i < label_names.size(); ++i) dense[label_names[i]] = static_cast<int>(i);
  LabeledDataset out;
  out.features = ds.features;
  out.label_names = label_names;
  out.labels.resize(ds.labels.size());
  for (std::size_t j = 0; j < ds.labels.size(); ++j) {
    const auto name = ds.label_names.at(ds.labels[j]);
    const auto it = dense.find(name);
    if (it == dense.end()) {
      throw ValidationError("label " + std::to_string(name) + " is unknown to the model");
    }
    out.labels[j] = it->second;
  }
  return out;
}

}  // namespace lcpdl
