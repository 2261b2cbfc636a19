#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/random.hpp"

namespace steer {

namespace detail {

inline void require_same_dims(const GoalVector& a, const GoalVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "goal vectors differ in dimensionality");
  }
}

inline double dot(const GoalVector& a, const GoalVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline GoalVector sub(const GoalVector& a, const GoalVector& b) {
  GoalVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double norm(const GoalVector& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

inline double steering_error(const GoalVector& z_star, const GoalVector& z_hat) {
  detail::require_same_dims(z_star, z_hat);
  return detail::norm(detail::sub(z_star, z_hat));
}

/// Residual r = z* - ẑ split along and across the requested direction z* - z0.
struct ResidualDecomposition {
  double requested_norm = 0.0;  // ‖z* − z0‖
  double observed_norm = 0.0;   // ‖ẑ − z0‖
  double parallel = 0.0;        // signed scalar projection of r onto the request
  double orthogonal = 0.0;      // ‖r − parallel · u‖
};

inline ResidualDecomposition decompose(const GoalVector& z0, const GoalVector& z_star,
                                       const GoalVector& z_hat) {
  detail::require_same_dims(z0, z_star);
  detail::require_same_dims(z0, z_hat);
  const GoalVector request = detail::sub(z_star, z0);
  const GoalVector residual = detail::sub(z_star, z_hat);
  ResidualDecomposition d;
  d.requested_norm = detail::norm(request);
  d.observed_norm = detail::norm(detail::sub(z_hat, z0));
  if (d.requested_norm == 0.0) throw Error(ErrorKind::zero_request, "z* equals z0");
  d.parallel = detail::dot(residual, request) / d.requested_norm;
  double orth_sq = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double o = residual[i] - d.parallel * request[i] / d.requested_norm;
    orth_sq += o * o;
  }
  d.orthogonal = std::sqrt(orth_sq);
  return d;
}

/// Over/undershoot along the request, as a fraction of the requested movement.
/// Positive means undershoot, negative overshoot.
inline double signed_miscalibration(const GoalVector& z0, const GoalVector& z_star,
                                    const GoalVector& z_hat) {
  const auto d = decompose(z0, z_star, z_hat);
  return d.parallel / d.requested_norm;
}

inline double miscalibration(const GoalVector& z0, const GoalVector& z_star,
                             const GoalVector& z_hat) {
  return std::abs(signed_miscalibration(z0, z_star, z_hat));
}

struct Orthogonality {
  double value = 0.0;
  bool zero_movement = false;
};

/// Side-effect share of the observed movement. ẑ = z0 yields 0 with the
/// zero_movement flag set.
inline Orthogonality orthogonality(const GoalVector& z0, const GoalVector& z_star,
                                   const GoalVector& z_hat) {
  const auto d = decompose(z0, z_star, z_hat);
  if (d.observed_norm == 0.0) return {0.0, true};
  return {d.orthogonal / d.observed_norm, false};
}

struct MetricValues {
  double steering_error = 0.0;
  std::optional<double> miscalibration;
  std::optional<double> signed_miscalibration;
  std::optional<double> orthogonality;
  bool zero_request = false;
  bool zero_movement = false;
};

inline MetricValues compute_metrics(const GoalVector& z0, const GoalVector& z_star,
                                    const GoalVector& z_hat) {
  MetricValues m;
  m.steering_error = steering_error(z_star, z_hat);
  detail::require_same_dims(z0, z_star);
  if (detail::norm(detail::sub(z_star, z0)) == 0.0) {
    m.zero_request = true;
    m.zero_movement = detail::norm(detail::sub(z_hat, z0)) == 0.0;
    return m;
  }
  const auto d = decompose(z0, z_star, z_hat);
  m.signed_miscalibration = d.parallel / d.requested_norm;
  m.miscalibration = std::abs(*m.signed_miscalibration);
  if (d.observed_norm == 0.0) {
    m.zero_movement = true;
    m.orthogonality = 0.0;
  } else {
    m.orthogonality = d.orthogonal / d.observed_norm;
  }
  return m;
}

/// Replace each delta from z0 with its bin representative.
inline GoalVector bin_relative(const GoalVector& z0, const GoalVector& z) {
  detail::require_same_dims(z0, z);
  GoalVector out(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) {
    out[i] = z0[i] + representative(discretize_delta(z[i] - z0[i]));
  }
  return out;
}

struct MetricRecord {
  MetricValues raw;
  MetricValues binned;
};

inline MetricRecord binned_metrics(const GoalVector& z0, const GoalVector& z_star,
                                   const GoalVector& z_hat) {
  MetricRecord r;
  r.raw = compute_metrics(z0, z_star, z_hat);
  r.binned = compute_metrics(z0, bin_relative(z0, z_star), bin_relative(z0, z_hat));
  return r;
}

inline nlohmann::json to_json(const MetricValues& m) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"steering_error", m.steering_error},
          {"miscalibration", opt(m.miscalibration)},
          {"signed_miscalibration", opt(m.signed_miscalibration)},
          {"orthogonality", opt(m.orthogonality)},
          {"zero_request", m.zero_request},
          {"zero_movement", m.zero_movement}};
}

inline MetricValues metric_values_from_json(const nlohmann::json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
    return j.at(k).get<double>();
  };
  MetricValues m;
  m.steering_error = j.at("steering_error").get<double>();
  m.miscalibration = opt("miscalibration");
  m.signed_miscalibration = opt("signed_miscalibration");
  m.orthogonality = opt("orthogonality");
  m.zero_request = j.value("zero_request", false);
  m.zero_movement = j.value("zero_movement", false);
  return m;
}

/// Median of a sorted-or-not sample (mean of the middle pair for even sizes).
inline double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::empty_input, "median of empty sample");
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

/// Median steering error of uniformly random outputs against each target.
inline double random_baseline(const std::vector<GoalVector>& targets, Rng& rng, std::size_t trials) {
  if (trials == 0) throw Error(ErrorKind::invalid_argument, "trials must be positive");
  if (targets.empty()) throw Error(ErrorKind::empty_input, "empty probe");
  std::vector<double> errors;
  errors.reserve(trials * targets.size());
  for (std::size_t t = 0; t < trials; ++t) {
    for (const auto& z_star : targets) {
      GoalVector z_hat(z_star.size());
      for (std::size_t i = 0; i < z_star.size(); ++i) z_hat[i] = rng.uniform();
      errors.push_back(steering_error(z_star, z_hat));
    }
  }
  return median(std::move(errors));
}

struct KendallResult {
  double tau = 0.0;
  double agreement = 0.5;
};

inline double pairwise_agreement(double tau) { return (tau + 1.0) / 2.0; }

/// Kendall tau-b between predicted and actual values (typically signs).
inline KendallResult kendall_tau(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw Error(ErrorKind::invalid_argument, "Kendall tau needs >= 2 pairs");
  long long concordant = 0;
  long long discordant = 0;
  long long ties_x = 0;
  long long ties_y = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const double dx = pairs[i].first - pairs[j].first;
      const double dy = pairs[i].second - pairs[j].second;
      if (dx == 0.0 && dy == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<long long>(pairs.size() * (pairs.size() - 1) / 2);
  const double denom = std::sqrt(static_cast<double>(n0 - ties_x) * static_cast<double>(n0 - ties_y));
  if (denom == 0.0) throw Error(ErrorKind::undefined_tau, "all values tied");
  const double tau = static_cast<double>(concordant - discordant) / denom;
  return {tau, pairwise_agreement(tau)};
}

}  // namespace steer
