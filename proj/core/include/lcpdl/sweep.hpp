#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lcpdl/dataset.hpp"
#include "lcpdl/trainer.hpp"

namespace lcpdl {

enum class SweepParam { tau, alpha, beta };

std::string to_string(SweepParam p);
SweepParam sweep_param_from_string(std::string_view name);

/// Fixed values, swept parameters and a log-spaced range shared by all swept axes.
/// Parameters that are neither fixed nor swept keep the base hyperparameters.
struct SweepSpec {
  std::map<SweepParam, double> fixed;
  std::vector<SweepParam> grid;
  double low = 1e-6;
  double high = 1e6;
  int steps = 7;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SweepRow {
  double tau = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double accuracy = 0.0;
};

/// `steps` values spaced evenly in log10 between low and high, inclusive.
std::vector<double> log_grid(double low, double high, int steps);

/// Hyperparameters of every grid point in canonical (row-major over `grid`) order.
std::vector<Hyperparams> sweep_points(const Hyperparams& base, const SweepSpec& spec);

/// Trains each grid point on a seeded 50/50 stratified split of `ds` and reports
/// held-out accuracy. The split and the training seed both come from spec.seed.
std::vector<SweepRow> parameter_sweep(const LabeledDataset& ds, const Hyperparams& base,
                                      const SweepSpec& spec);

}  // namespace lcpdl
