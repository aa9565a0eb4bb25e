#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lcpdl {

using Index = Eigen::Index;

/// Dense labeled feature matrix, one sample per column.
///
/// `labels` hold dense class indices in [0, c). `label_names` maps each dense
/// index back to the label found in the source file. `class_offsets` is empty
/// until partition_by_class() groups the columns; afterwards it has c + 1
/// entries and class i occupies columns [class_offsets[i], class_offsets[i+1]).
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::int64_t> label_names;
  std::vector<Index> class_offsets;

  Index dim() const { return features.rows(); }
  Index size() const { return features.cols(); }
  int num_classes() const { return static_cast<int>(label_names.size()); }
  bool is_partitioned() const { return !class_offsets.empty(); }

  Index class_begin(int i) const { return class_offsets.at(i); }
  Index class_size(int i) const { return class_offsets.at(i + 1) - class_offsets.at(i); }
  auto class_block(int i) const { return features.middleCols(class_begin(i), class_size(i)); }

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

struct NormalizeResult {
  LabeledDataset dataset;
  Index zero_columns = 0;
};

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Parses headerless `label,f1,...,fn` rows. `source` names the input in errors.
LabeledDataset parse_csv(std::istream& in, const std::string& source = "<stream>");
LabeledDataset load_csv(const std::filesystem::path& path);

/// Writes rows with original label names and 17 significant digits.
void write_csv(const LabeledDataset& ds, std::ostream& out);
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);

/// Scales every column to unit Euclidean norm; zero columns are kept and counted.
NormalizeResult normalize_samples(const LabeledDataset& ds);

/// Stable order of column indices grouping classes in ascending order.
std::vector<Index> partition_permutation(const std::vector<int>& labels);
LabeledDataset partition_by_class(const LabeledDataset& ds);

/// c x N one-hot label matrix H.
Eigen::MatrixXd one_hot(const LabeledDataset& ds);

/// Gaussian blobs before normalization: class i ~ N(separation * e_i, I).
LabeledDataset synth_blobs_raw(int classes, Index dim, Index per_class, double separation,
                               std::uint64_t seed);
/// synth_blobs_raw() followed by partitioning and l2 normalization.
LabeledDataset synth_blobs(int classes, Index dim, Index per_class, double separation,
                           std::uint64_t seed);

LabeledDataset add_gaussian_noise(const LabeledDataset& ds, double variance, std::uint64_t seed);

/// Seeded stratified split; each class contributes floor(N_i * fraction) columns
/// to train (at least one, and at least one left for test when N_i >= 2).
TrainTestSplit stratified_split(const LabeledDataset& ds, double train_fraction,
                                std::uint64_t seed);

/// Re-expresses the labels of `ds` in the dense index space of `label_names`.
/// Throws ValidationError for a label that is not in `label_names`.
LabeledDataset remap_labels(const LabeledDataset& ds, const std::vector<std::int64_t>& label_names);

}  // namespace lcpdl
