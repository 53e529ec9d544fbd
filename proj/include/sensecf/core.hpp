#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sensecf {

enum class ErrorCode {
  Config,
  Io,
  DuplicateName,
  NoTarget,
  MultipleTargets,
  UnknownKind,
  InvalidTarget,
  MissingColumn,
  NonNumericValue,
  UnknownCategory,
  CsvParse,
  FractionOutOfRange,
  ClassTooSmall,
  EmptyDataset,
  ArityMismatch,
  SingleClass,
  EmptyTestSet,
  EmptyBatch,
  PredictionMismatch,
  MissingPlaceholder,
  NoParseableObject,
  MissingFeature,
  ImmutableChanged,
  NoOppositeClass,
  NoFlip,
  AlreadyDesired,
  BudgetExhausted,
  NotValidCf,
  SchemaMismatch,
  Transport,
  OutputExists,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NoTarget: return "NoTarget";
    case ErrorCode::MultipleTargets: return "MultipleTargets";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::CsvParse: return "CsvParse";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::PredictionMismatch: return "PredictionMismatch";
    case ErrorCode::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::NoParseableObject: return "NoParseableObject";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::ImmutableChanged: return "ImmutableChanged";
    case ErrorCode::NoOppositeClass: return "NoOppositeClass";
    case ErrorCode::NoFlip: return "NoFlip";
    case ErrorCode::AlreadyDesired: return "AlreadyDesired";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NotValidCf: return "NotValidCf";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::OutputExists: return "OutputExists";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// A feature value: a finite real for continuous features, a category token otherwise.
using Value = std::variant<double, std::string>;

inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }
inline double as_number(const Value& v) { return std::get<double>(v); }
inline const std::string& as_token(const Value& v) { return std::get<std::string>(v); }

inline std::string value_to_string(const Value& v) {
  if (is_number(v)) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), as_number(v));
    return std::string(buf, res.ptr);
  }
  return as_token(v);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic RNG wrapper. All draws are derived from the raw mt19937_64
/// stream with explicitly specified transforms, so identical seeds produce
/// identical sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % span);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare, draw order is fixed).
  double normal() {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// Independent child stream; stable under reordering of other draws.
  Rng fork(std::uint64_t stream) const { return Rng(mix64(seed_ ^ mix64(stream + 1))); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sensecf
