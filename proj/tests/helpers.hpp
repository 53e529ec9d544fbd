#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sensecf/sensecf.hpp"

namespace testutil {

using namespace sensecf;

inline FeatureSpec continuous(const std::string& name, bool is_mutable = true) {
  return FeatureSpec{name, FeatureKind::Continuous, is_mutable, FeatureRole::Predictor, {}};
}

inline FeatureSpec categorical(const std::string& name, std::vector<std::string> categories,
                               bool is_mutable = true) {
  return FeatureSpec{name, FeatureKind::Categorical, is_mutable, FeatureRole::Predictor, std::move(categories)};
}

inline FeatureSpec binary_target(const std::string& name = "label") {
  return FeatureSpec{name, FeatureKind::Categorical, false, FeatureRole::Target, {"0", "1"}};
}

inline FeatureSchema one_d_schema() {
  return FeatureSchema::from_features({continuous("x"), binary_target()});
}

inline Dataset one_d_dataset(const std::vector<double>& xs, const std::vector<int>& ys) {
  Dataset data;
  data.schema = one_d_schema();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    data.rows.push_back(Instance{{Value{xs[i]}}});
    data.labels.push_back(ys[i]);
  }
  return data;
}

/// Separable 1-D training set: x <= 4 is class 0, x >= 6 is class 1. Models
/// trained on it flip around x = 5.
inline Dataset separable_one_d() {
  return one_d_dataset({0, 1, 2, 3, 4, 6, 7, 8, 9, 10}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
}

inline Instance make_instance(std::vector<Value> values) { return Instance{std::move(values)}; }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sensecf_test_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string heart_csv_path() { return std::string(SENSECF_DATA_DIR) + "/heart.csv"; }
inline std::string heart_schema_path() { return std::string(SENSECF_DATA_DIR) + "/heart.schema.json"; }

inline FeatureSchema heart_schema() { return load_schema(read_file(heart_schema_path())); }

/// A transport whose every call fails, for the total-failure path.
class FailingTransport : public LlmTransport {
 public:
  std::string send(const std::string&) const override {
    fail(ErrorCode::Transport, "simulated timeout");
  }
};

}  // namespace testutil
