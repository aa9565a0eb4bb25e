#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lcpdl/error.hpp"
#include "lcpdl/trainer.hpp"

namespace lcpdl {

inline constexpr int kModelFormatVersion = 1;

/// Thrown for model files that are malformed or violate model invariants.
class ModelFormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Canonical JSON text of a model: fixed key order, matrices stored row-major
/// as {"rows", "cols", "data"}, every real written with 17 significant digits.
/// serialize(deserialize(s)) == s for any s produced here.
std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// JSON array of {iter, J, terms{recon, approx, locality, classif, l21}, ms}.
std::string serialize_trace(const TrainTrace& trace);
void save_trace(const TrainTrace& trace, const std::filesystem::path& path);

}  // namespace lcpdl
