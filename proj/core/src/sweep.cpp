#include "lcpdl/sweep.hpp"

#include <cmath>
#include <set>

#include "lcpdl/error.hpp"

namespace lcpdl {

namespace {

double& field(Hyperparams& hp, SweepParam p) {
  switch (p) {
    case SweepParam::tau:
      return hp.tau;
    case SweepParam::alpha:
      return hp.alpha;
    case SweepParam::beta:
      break;
  }
  return hp.beta;
}

}  // namespace

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::tau:
      return "tau";
    case SweepParam::alpha:
      return "alpha";
    case SweepParam::beta:
      break;
  }
  return "beta";
}

SweepParam sweep_param_from_string(std::string_view name) {
  if (name == "tau") return SweepParam::tau;
  if (name == "alpha") return SweepParam::alpha;
  if (name == "beta") return SweepParam::beta;
  throw ValidationError("unknown sweep parameter '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
  std::set<SweepParam> seen;
  for (auto p : grid) {
    if (!seen.insert(p).second) throw ValidationError("parameter " + to_string(p) + " swept twice");
    if (fixed.count(p)) {
      throw ValidationError("parameter " + to_string(p) + " is both fixed and swept");
    }
  }
  for (const auto& [p, v] : fixed) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(to_string(p) + " must be >= 0");
  }
  if (!grid.empty()) {
    if (!(low > 0.0) || !(high >= low) || !std::isfinite(high)) {
      throw ValidationError("sweep range must satisfy 0 < low <= high");
    }
    if (steps < 1) throw ValidationError("sweep steps must be >= 1");
  }
}

std::vector<double> log_grid(double low, double high, int steps) {
  if (!(low > 0.0) || !(high >= low) || steps < 1) {
    throw ValidationError("log_grid: need 0 < low <= high and steps >= 1");
  }
  if (steps == 1) return {low};
  std::vector<double> out(steps);
  const double a = std::log10(low);
  const double b = std::log10(high);
  for (int s = 0; s < steps; ++s) {
    out[s] = std::pow(10.0, a + (b - a) * static_cast<double>(s) / (steps - 1));
  }
  out.front() = low;
  out.back() = high;
  return out;
}

std::vector<Hyperparams> sweep_points(const Hyperparams& base, const SweepSpec& spec) {
  spec.validate();
  Hyperparams anchor = base;
  for (const auto& [p, v] : spec.fixed) field(anchor, p) = v;
  anchor.seed = spec.seed;

  std::vector<Hyperparams> points{anchor};
  if (spec.grid.empty()) return points;
  const auto values = log_grid(spec.low, spec.high, spec.steps);
  for (auto p : spec.grid) {
    std::vector<Hyperparams> next;
    next.reserve(points.size() * values.size());
    for (const auto& hp : points) {
      for (double v : values) {
        next.push_back(hp);
        field(next.back(), p) = v;
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<SweepRow> parameter_sweep(const LabeledDataset& ds, const Hyperparams& base,
                                      const SweepSpec& spec) {
  const auto points = sweep_points(base, spec);
  const auto split = stratified_split(ds, 0.5, spec.seed);
  std::vector<SweepRow> rows;
  rows.reserve(points.size());
  for (const auto& hp : points) {
    const auto trained = fit(split.train, hp);
    rows.push_back({hp.tau, hp.alpha, hp.beta, evaluate(trained.model, split.test).accuracy});
  }
  return rows;
}

}  // namespace lcpdl
