#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "steer/error.hpp"
#include "steer/textmetrics.hpp"

namespace steer {

/// Point in the unit goal hypercube; one component per registered dimension.
class GoalVector {
 public:
  GoalVector() = default;
  explicit GoalVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit GoalVector(std::vector<double> values) : values_(std::move(values)) {}
  GoalVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vec() const { return values_; }

  bool operator==(const GoalVector&) const = default;

 private:
  std::vector<double> values_;
};

inline void to_json(nlohmann::json& j, const GoalVector& v) { j = v.vec(); }
inline void from_json(const nlohmann::json& j, GoalVector& v) {
  v = GoalVector(j.get<std::vector<double>>());
}

enum class MetricId { flesch_kincaid, heylighen_dewaele, mtld, word_count };

inline std::string_view to_string(MetricId m) {
  switch (m) {
    case MetricId::flesch_kincaid: return "flesch_kincaid";
    case MetricId::heylighen_dewaele: return "heylighen_dewaele";
    case MetricId::mtld: return "mtld";
    case MetricId::word_count: return "word_count";
  }
  return "";
}

inline MetricId metric_from_string(std::string_view s) {
  for (auto m : {MetricId::flesch_kincaid, MetricId::heylighen_dewaele, MetricId::mtld,
                 MetricId::word_count}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::parse_error, "unknown metric '" + std::string(s) + "'");
}

inline double evaluate_metric(MetricId m, const TokenizedText& text) {
  switch (m) {
    case MetricId::flesch_kincaid: return flesch_kincaid(text);
    case MetricId::heylighen_dewaele: return heylighen_dewaele(text);
    case MetricId::mtld: return mtld(text);
    case MetricId::word_count: return word_count(text);
  }
  throw Error(ErrorKind::invalid_argument, "unhandled metric");
}

struct Dimension {
  std::string id;
  MetricId metric = MetricId::word_count;
  double raw_min = 0.0;  // 2.5th percentile of the seed distribution
  double raw_max = 1.0;  // 97.5th percentile
};

inline constexpr int kGoalSpaceSchemaVersion = 1;

class GoalSpaceConfig {
 public:
  GoalSpaceConfig() = default;

  explicit GoalSpaceConfig(std::vector<Dimension> dims) : dims_(std::move(dims)) {
    std::set<std::string> ids;
    for (const auto& d : dims_) {
      if (!(d.raw_min < d.raw_max)) {
        throw Error(ErrorKind::degenerate_dimension, "raw_min must be < raw_max for " + d.id);
      }
      if (!ids.insert(d.id).second) {
        throw Error(ErrorKind::invalid_argument, "duplicate dimension id " + d.id);
      }
    }
  }

  /// The four text dimensions with the bounds fitted on the reference seed corpus.
  static GoalSpaceConfig standard() {
    return GoalSpaceConfig({
        {"reading_difficulty", MetricId::flesch_kincaid, 2.8, 12.9},
        {"formality", MetricId::heylighen_dewaele, 40.4, 69.1},
        {"textual_diversity", MetricId::mtld, 44.8, 128.5},
        {"text_length", MetricId::word_count, 78.0, 1509.0},
    });
  }

  const std::vector<Dimension>& dimensions() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  const Dimension& at(std::size_t i) const { return dims_.at(i); }

  std::size_t index_of(std::string_view id) const {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i].id == id) return i;
    }
    throw Error(ErrorKind::unknown_dimension, std::string(id));
  }

  nlohmann::json to_json() const {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : dims_) {
      dims.push_back({{"id", d.id},
                      {"metric", std::string(to_string(d.metric))},
                      {"raw_min", d.raw_min},
                      {"raw_max", d.raw_max}});
    }
    return {{"schema_version", kGoalSpaceSchemaVersion}, {"dimensions", dims}};
  }

  static GoalSpaceConfig from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 0) != kGoalSpaceSchemaVersion) {
      throw Error(ErrorKind::parse_error, "unsupported goal-space schema_version");
    }
    std::vector<Dimension> dims;
    for (const auto& d : j.at("dimensions")) {
      dims.push_back({d.at("id").get<std::string>(),
                      metric_from_string(d.at("metric").get<std::string>()),
                      d.at("raw_min").get<double>(), d.at("raw_max").get<double>()});
    }
    return GoalSpaceConfig(std::move(dims));
  }

  bool operator==(const GoalSpaceConfig& o) const { return to_json() == o.to_json(); }

 private:
  std::vector<Dimension> dims_;
};

/// Quantile by linear interpolation between order statistics:
/// h = (n - 1) q, value = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw Error(ErrorKind::out_of_range, "quantile level outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct RawDimensionSample {
  std::string id;
  MetricId metric = MetricId::word_count;
  std::vector<double> values;
};

inline constexpr std::size_t kMinFitSamples = 40;

/// Fit per-dimension 2.5% / 97.5% bounds from raw seed measurements.
inline GoalSpaceConfig fit_normalization(const std::vector<RawDimensionSample>& samples) {
  std::vector<Dimension> dims;
  for (const auto& s : samples) {
    if (s.values.size() < kMinFitSamples) {
      throw Error(ErrorKind::invalid_argument,
                  "dimension " + s.id + " needs at least 40 seed values");
    }
    const double lo = quantile(s.values, 0.025);
    const double hi = quantile(s.values, 0.975);
    if (!(lo < hi)) throw Error(ErrorKind::degenerate_dimension, s.id);
    dims.push_back({s.id, s.metric, lo, hi});
  }
  return GoalSpaceConfig(std::move(dims));
}

inline double normalize(double raw, const Dimension& dim) {
  const double z = (raw - dim.raw_min) / (dim.raw_max - dim.raw_min);
  return std::clamp(z, 0.0, 1.0);
}

inline double normalize(std::string_view dimension_id, double raw, const GoalSpaceConfig& config) {
  return normalize(raw, config.at(config.index_of(dimension_id)));
}

/// Raw (unnormalized) measurement of every dimension. Metric failures are
/// rethrown with the failing dimension id in the message.
inline std::vector<double> raw_goals(const TokenizedText& tokens, const GoalSpaceConfig& config) {
  std::vector<double> raw;
  raw.reserve(config.size());
  for (const auto& d : config.dimensions()) {
    try {
      raw.push_back(evaluate_metric(d.metric, tokens));
    } catch (const Error& e) {
      throw Error(e.kind(), "dimension " + d.id + ": " + e.what());
    }
  }
  return raw;
}

inline GoalVector normalize_all(std::span<const double> raw, const GoalSpaceConfig& config) {
  GoalVector z(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) z[i] = normalize(raw[i], config.at(i));
  return z;
}

inline GoalVector map_to_goalspace(std::string_view text, const GoalSpaceConfig& config) {
  const auto raw = raw_goals(tokenize(text), config);
  return normalize_all(raw, config);
}

enum class DeltaBin { minus_much, minus_moderate, minus_slight, zero, plus_slight, plus_moderate, plus_much };

inline std::string_view to_string(DeltaBin b) {
  switch (b) {
    case DeltaBin::minus_much: return "-much";
    case DeltaBin::minus_moderate: return "-moderate";
    case DeltaBin::minus_slight: return "-slight";
    case DeltaBin::zero: return "zero";
    case DeltaBin::plus_slight: return "+slight";
    case DeltaBin::plus_moderate: return "+moderate";
    case DeltaBin::plus_much: return "+much";
  }
  return "";
}

inline double representative(DeltaBin b) {
  switch (b) {
    case DeltaBin::minus_much: return -0.75;
    case DeltaBin::minus_moderate: return -0.35;
    case DeltaBin::minus_slight: return -0.1;
    case DeltaBin::zero: return 0.0;
    case DeltaBin::plus_slight: return 0.1;
    case DeltaBin::plus_moderate: return 0.35;
    case DeltaBin::plus_much: return 0.75;
  }
  return 0.0;
}

inline constexpr double kSlightCut = 0.2;
inline constexpr double kMuchCut = 0.5;

/// Bin a goal delta with the prompt-modifier cut points: slight below 0.2,
/// much above 0.5, moderate in between (both edges inclusive).
inline DeltaBin discretize_delta(double delta) {
  if (!(std::abs(delta) <= 1.0)) throw Error(ErrorKind::out_of_range, "|delta| > 1");
  if (delta == 0.0) return DeltaBin::zero;
  const double mag = std::abs(delta);
  const bool pos = delta > 0.0;
  if (mag < kSlightCut) return pos ? DeltaBin::plus_slight : DeltaBin::minus_slight;
  if (mag <= kMuchCut) return pos ? DeltaBin::plus_moderate : DeltaBin::minus_moderate;
  return pos ? DeltaBin::plus_much : DeltaBin::minus_much;
}

}  // namespace steer
