#pragma once

#include <string>
#include <vector>

#include "sensecf/data.hpp"

namespace sensecf {

/// Numeric layout for model input: one min-max-scaled slot per continuous
/// feature, one indicator slot per declared category. Scaling pairs come from
/// training bounds only.
struct EncodingSpec {
  struct Feature {
    FeatureKind kind = FeatureKind::Continuous;
    std::size_t offset = 0;
    double lo = 0.0;                      // continuous
    double hi = 0.0;                      // continuous
    std::vector<std::string> categories;  // categorical slot order
  };
  std::vector<Feature> features;  // aligned with schema.predictors()
  std::size_t dim = 0;

  static EncodingSpec from_bounds(const FeatureSchema& schema, const Bounds& train_bounds) {
    EncodingSpec spec;
    spec.features.resize(schema.predictor_count());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
      Feature& f = spec.features[i];
      f.kind = schema.predictor(i).kind;
      f.offset = offset;
      if (schema.predictor(i).is_continuous()) {
        f.lo = train_bounds.entries[i].lo;
        f.hi = train_bounds.entries[i].hi;
        offset += 1;
      } else {
        f.categories = schema.predictor(i).categories;
        offset += f.categories.size();
      }
    }
    spec.dim = offset;
    return spec;
  }
};

/// Encodes an instance into the numeric model space. Continuous values are
/// min-max scaled with the training bounds and clamped to [0, 1]; categorical
/// values expand to a full one-hot block, with unseen tokens mapping to an
/// all-zero block.
inline std::vector<double> encode(const Instance& x, const EncodingSpec& spec) {
  if (x.values.size() != spec.features.size())
    fail(ErrorCode::ArityMismatch, "instance has " + std::to_string(x.values.size()) + " values, encoding expects " +
                                       std::to_string(spec.features.size()));
  std::vector<double> out(spec.dim, 0.0);
  for (std::size_t i = 0; i < spec.features.size(); ++i) {
    const EncodingSpec::Feature& f = spec.features[i];
    if (f.kind == FeatureKind::Continuous) {
      const double width = f.hi - f.lo;
      double scaled = width > 0.0 ? (as_number(x.values[i]) - f.lo) / width : 0.0;
      if (scaled < 0.0) scaled = 0.0;
      if (scaled > 1.0) scaled = 1.0;
      out[f.offset] = scaled;
    } else {
      const std::string& token = as_token(x.values[i]);
      for (std::size_t c = 0; c < f.categories.size(); ++c) {
        if (f.categories[c] == token) {
          out[f.offset + c] = 1.0;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace sensecf
