#pragma once

// Seed ingestion, density-ratio sampling weights and probe construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/random.hpp"
#include "steer/strategy.hpp"
#include "steer/textmetrics.hpp"

namespace steer {

struct CorpusRecord {
  std::string id;
  std::string source;
  std::string text;
};

struct SeedText {
  std::string id;
  std::string source_tag;
  std::string text;
  std::vector<double> raw;
  GoalVector z0;
};

struct Rejection {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct IngestResult {
  std::vector<SeedText> seeds;
  std::vector<Rejection> rejected;

  std::map<std::string, std::size_t> rejected_by_reason() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rejected) ++counts[r.reason.substr(0, r.reason.find(':'))];
    return counts;
  }
};

/// Filter records to the word-count window and map survivors to goal-space.
/// A bad record is rejected with a reason; ingestion never aborts.
inline IngestResult ingest_records(const std::vector<CorpusRecord>& records,
                                   const GoalSpaceConfig& config) {
  IngestResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto tokens = tokenize(rec.text);
    const auto words = tokens.word_tokens.size();
    if (words < kMinWordsForDiversity) {
      result.rejected.push_back({i + 1, rec.id, "below-floor: " + std::to_string(words) + " words"});
      continue;
    }
    if (words > kMaxWords) {
      result.rejected.push_back({i + 1, rec.id, "above-cap: " + std::to_string(words) + " words"});
      continue;
    }
    try {
      auto raw = raw_goals(tokens, config);
      auto z0 = normalize_all(raw, config);
      result.seeds.push_back({rec.id, rec.source, rec.text, std::move(raw), std::move(z0)});
    } catch (const Error& e) {
      result.rejected.push_back({i + 1, rec.id, std::string("metric-error: ") + e.what()});
    }
  }
  return result;
}

/// JSONL seed corpus: {"id": str, "source": str, "text": str} per line.
inline IngestResult ingest_corpus(std::istream& in, const GoalSpaceConfig& config) {
  std::vector<CorpusRecord> records;
  std::vector<Rejection> malformed;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j.at("text").is_string()) {
        malformed.push_back({lineno, j.is_object() ? j.value("id", std::string()) : "",
                             "malformed-record: missing id or text"});
        continue;
      }
      std::string id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
      records.push_back({std::move(id), j.value("source", std::string()), j.at("text").get<std::string>()});
      line_of.push_back(lineno);
    } catch (const nlohmann::json::exception& e) {
      malformed.push_back({lineno, "", std::string("malformed-record: ") + e.what()});
    }
  }
  auto result = ingest_records(records, config);
  for (auto& r : result.rejected) r.line = line_of[r.line - 1];
  result.rejected.insert(result.rejected.end(), malformed.begin(), malformed.end());
  std::sort(result.rejected.begin(), result.rejected.end(),
            [](const Rejection& a, const Rejection& b) { return a.line < b.line; });
  return result;
}

/// Fit normalization bounds to the raw seed measurements and recompute z0.
inline GoalSpaceConfig refit_goalspace(std::vector<SeedText>& seeds, const GoalSpaceConfig& registry) {
  std::vector<RawDimensionSample> samples;
  for (std::size_t d = 0; d < registry.size(); ++d) {
    RawDimensionSample s{registry.at(d).id, registry.at(d).metric, {}};
    for (const auto& seed : seeds) s.values.push_back(seed.raw.at(d));
    samples.push_back(std::move(s));
  }
  auto config = fit_normalization(samples);
  for (auto& seed : seeds) seed.z0 = normalize_all(seed.raw, config);
  return config;
}

/// L2-regularized logistic regression P(C=1 | z) = sigmoid(w·z + b).
struct LogisticModel {
  std::vector<double> coef;
  double intercept = 0.0;

  double logit(std::span<const double> z) const {
    double s = intercept;
    for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * z[i];
    return s;
  }

  double probability(std::span<const double> z) const { return 1.0 / (1.0 + std::exp(-logit(z))); }

  /// (1 - p) / p, computed as exp(-logit) to stay finite near p = 1.
  double density_ratio(std::span<const double> z) const { return std::exp(-logit(z)); }

  nlohmann::json to_json() const { return {{"coef", coef}, {"intercept", intercept}}; }
  static LogisticModel from_json(const nlohmann::json& j) {
    return {j.at("coef").get<std::vector<double>>(), j.at("intercept").get<double>()};
  }
};

struct LogisticFitOptions {
  double l2 = 1e-4;             // penalty on coefficients (mean-loss scale), not the intercept
  double gradient_tol = 1e-6;   // stop when the gradient norm falls below this
  int max_iterations = 100;
};

/// Newton-Raphson fit with backtracking; throws non-convergence with the loss trace.
inline LogisticModel fit_logistic(const std::vector<std::vector<double>>& features,
                                  const std::vector<int>& labels,
                                  const LogisticFitOptions& opts = {}) {
  if (features.empty() || features.size() != labels.size()) {
    throw Error(ErrorKind::invalid_argument, "logistic fit needs matching non-empty data");
  }
  const auto n = static_cast<Eigen::Index>(features.size());
  const auto d = static_cast<Eigen::Index>(features.front().size());
  Eigen::MatrixXd x(n, d + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) x(i, k + 1) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    y(i) = labels[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, opts.l2);
  penalty(0) = 0.0;

  auto loss_of = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = x * beta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // log(1 + exp(eta)) - y * eta, evaluated stably
      const double e = eta(i);
      loss += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y(i) * e;
    }
    return loss / static_cast<double>(n) + 0.5 * beta.cwiseProduct(penalty).dot(beta);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  std::vector<double> trace;
  double loss = loss_of(beta);
  trace.push_back(loss);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::VectorXd p = (-(x * beta)).array().exp().unaryExpr([](double e) { return 1.0 / (1.0 + e); });
    Eigen::VectorXd grad = x.transpose() * (p - y) / static_cast<double>(n) + penalty.cwiseProduct(beta);
    if (grad.norm() < opts.gradient_tol) {
      LogisticModel m;
      m.intercept = beta(0);
      m.coef.assign(beta.data() + 1, beta.data() + d + 1);
      return m;
    }
    const Eigen::VectorXd w = p.array() * (1.0 - p.array());
    Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x / static_cast<double>(n);
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = beta - step;
    double next_loss = loss_of(next);
    while (next_loss > loss && t > 1e-8) {
      t *= 0.5;
      next = beta - t * step;
      next_loss = loss_of(next);
    }
    beta = next;
    loss = next_loss;
    trace.push_back(loss);
  }
  std::ostringstream msg;
  msg << "logistic fit did not reach gradient norm " << opts.gradient_tol << "; loss trace:";
  for (double v : trace) msg << ' ' << v;
  throw Error(ErrorKind::non_convergence, msg.str());
}

struct SamplingWeights {
  std::vector<double> weights;  // one per seed, (1 - p) / p
  LogisticModel classifier;

  double weight_for(const GoalVector& z) const { return classifier.density_ratio(z.values()); }
};

/// Classifier-based density ratio: seeds (C=1) against an equal number of
/// uniform draws from the unit cube (C=0).
inline SamplingWeights estimate_sampling_weights(const std::vector<GoalVector>& points, Rng& rng,
                                                 const LogisticFitOptions& opts = {}) {
  if (points.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 seeds");
  const std::size_t dims = points.front().size();
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  features.reserve(points.size() * 2);
  for (const auto& z : points) {
    features.push_back(z.vec());
    labels.push_back(1);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> u(dims);
    for (auto& v : u) v = rng.uniform();
    features.push_back(std::move(u));
    labels.push_back(0);
  }
  SamplingWeights sw;
  sw.classifier = fit_logistic(features, labels, opts);
  sw.weights.reserve(points.size());
  for (const auto& z : points) sw.weights.push_back(sw.classifier.density_ratio(z.values()));
  return sw;
}

inline SamplingWeights estimate_sampling_weights(const std::vector<SeedText>& seeds, Rng& rng,
                                                 const LogisticFitOptions& opts = {}) {
  std::vector<GoalVector> points;
  points.reserve(seeds.size());
  for (const auto& s : seeds) points.push_back(s.z0);
  return estimate_sampling_weights(points, rng, opts);
}

/// Weighted sampling without replacement (exponential-key method). Returns
/// indices in draw order; zero-weight entries are never drawn.
inline std::vector<std::size_t> sample_indices(const std::vector<double>& weights, std::size_t n,
                                               Rng& rng) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = rng.uniform();
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) continue;
    // larger key = earlier draw; log(u)/w is the log of u^(1/w)
    keyed.emplace_back(std::log(1.0 - u) / weights[i], i);
  }
  if (n > keyed.size()) {
    throw Error(ErrorKind::insufficient_seeds, "requested " + std::to_string(n) + " of " +
                                                   std::to_string(keyed.size()) + " drawable seeds");
  }
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n), keyed.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(keyed[i].second);
  return out;
}

inline std::vector<SeedText> sample_sources(const std::vector<SeedText>& seeds,
                                            const SamplingWeights& weights, std::size_t n, Rng& rng) {
  if (weights.weights.size() != seeds.size()) {
    throw Error(ErrorKind::invalid_argument, "one weight per seed required");
  }
  std::vector<SeedText> out;
  for (auto i : sample_indices(weights.weights, n, rng)) out.push_back(seeds[i]);
  return out;
}

inline constexpr double kMinOffset = 0.1;
inline constexpr double kMaxOffset = 0.7;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Feasible offsets for one component: [-0.7, -0.1] and [0.1, 0.7] clipped so
/// z0 + delta stays inside [0, 1]. Infeasible sides are omitted.
inline std::vector<Interval> feasible_offsets(double z0) {
  std::vector<Interval> out;
  const double neg_lo = std::max(-kMaxOffset, -z0);
  if (neg_lo <= -kMinOffset) out.push_back({neg_lo, -kMinOffset});
  const double pos_hi = std::min(kMaxOffset, 1.0 - z0);
  if (pos_hi >= kMinOffset) out.push_back({kMinOffset, pos_hi});
  return out;
}

struct GoalSample {
  GoalVector z_star;
  std::vector<bool> active;
  std::vector<double> deltas;  // 0 for inactive dimensions
};

/// Choose n_active dimensions uniformly and draw a feasible offset for each,
/// uniform over the union of the clipped intervals.
inline GoalSample sample_goal(const GoalVector& z0, std::size_t n_active, Rng& rng) {
  const std::size_t dims = z0.size();
  if (n_active < 1 || n_active > dims) {
    throw Error(ErrorKind::invalid_argument, "n_active must be in [1, |G|]");
  }
  std::vector<std::size_t> order(dims);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // partial Fisher-Yates: the first n_active entries are a uniform subset
  for (std::size_t i = 0; i < n_active; ++i) {
    std::swap(order[i], order[i + rng.below(dims - i)]);
  }
  GoalSample g{z0, std::vector<bool>(dims, false), std::vector<double>(dims, 0.0)};
  std::size_t chosen = 0;
  for (std::size_t k = 0; k < dims && chosen < n_active; ++k) {
    const std::size_t d = order[k];
    const auto sides = feasible_offsets(z0[d]);
    if (sides.empty()) continue;  // cannot happen for z0 in [0,1]; take the next dimension
    double total = 0.0;
    for (const auto& s : sides) total += s.length();
    double delta;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      delta = sides.back().hi;
      for (const auto& s : sides) {
        if (u < s.length()) {
          delta = s.lo + u;
          break;
        }
        u -= s.length();
      }
    } else {
      delta = sides[rng.below(sides.size())].lo;  // single feasible point per side
    }
    g.z_star[d] = std::clamp(z0[d] + delta, 0.0, 1.0);
    g.deltas[d] = delta;
    g.active[d] = true;
    ++chosen;
  }
  return g;
}

struct ProbeSpec {
  std::size_t n_sources = 64;
  std::size_t goals_per_source = 32;
  std::size_t n_active = 3;
  PromptStrategy strategy;
  std::uint64_t rng_seed = 0;

  nlohmann::json to_json() const {
    return {{"n_sources", n_sources},
            {"goals_per_source", goals_per_source},
            {"n_active", n_active},
            {"strategy", strategy.id()},
            {"rng_seed", rng_seed}};
  }
  static ProbeSpec from_json(const nlohmann::json& j) {
    return {j.at("n_sources").get<std::size_t>(), j.at("goals_per_source").get<std::size_t>(),
            j.at("n_active").get<std::size_t>(), PromptStrategy::parse(j.at("strategy").get<std::string>()),
            j.at("rng_seed").get<std::uint64_t>()};
  }
};

struct ProbeItem {
  std::size_t item_id = 0;
  std::string seed_id;
  std::string source_text;
  GoalVector z0;
  GoalVector z_star;
  std::vector<bool> active;
  std::vector<double> deltas;
  PromptStrategy strategy;
  std::uint64_t rng_seed = 0;

  std::size_t active_count() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
  }

  nlohmann::json to_json() const {
    return {{"record", "item"},   {"item_id", item_id}, {"seed_id", seed_id},
            {"source_text", source_text}, {"z0", z0}, {"z_star", z_star},
            {"active", active},   {"deltas", deltas},   {"strategy", strategy.id()},
            {"rng_seed", rng_seed}};
  }
  static ProbeItem from_json(const nlohmann::json& j) {
    ProbeItem it;
    it.item_id = j.at("item_id").get<std::size_t>();
    it.seed_id = j.at("seed_id").get<std::string>();
    it.source_text = j.at("source_text").get<std::string>();
    it.z0 = j.at("z0").get<GoalVector>();
    it.z_star = j.at("z_star").get<GoalVector>();
    it.active = j.at("active").get<std::vector<bool>>();
    it.deltas = j.at("deltas").get<std::vector<double>>();
    it.strategy = PromptStrategy::parse(j.at("strategy").get<std::string>());
    it.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return it;
  }
};

inline constexpr int kProbeSchemaVersion = 1;

struct Probe {
  GoalSpaceConfig config;
  ProbeSpec spec;
  std::vector<ProbeItem> items;

  void write(std::ostream& out) const {
    const nlohmann::json header{{"record", "header"},
                                {"schema_version", kProbeSchemaVersion},
                                {"goalspace", config.to_json()},
                                {"spec", spec.to_json()},
                                {"n_items", items.size()}};
    out << header.dump() << '\n';
    for (const auto& it : items) out << it.to_json().dump() << '\n';
  }

  std::string serialize() const {
    std::ostringstream ss;
    write(ss);
    return ss.str();
  }

  static Probe read(std::istream& in) {
    Probe p;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, "empty probe file");
    const auto header = nlohmann::json::parse(line);
    if (header.value("record", "") != "header" || !header.contains("schema_version")) {
      throw Error(ErrorKind::parse_error, "probe file must start with a header record");
    }
    if (header.at("schema_version").get<int>() != kProbeSchemaVersion) {
      throw Error(ErrorKind::parse_error, "unsupported probe schema_version");
    }
    p.config = GoalSpaceConfig::from_json(header.at("goalspace"));
    p.spec = ProbeSpec::from_json(header.at("spec"));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      p.items.push_back(ProbeItem::from_json(nlohmann::json::parse(line)));
    }
    return p;
  }
};

/// n_sources weighted draws without replacement, goals_per_source targets each.
inline Probe build_probe(const ProbeSpec& spec, const std::vector<SeedText>& seeds,
                         const SamplingWeights& weights, const GoalSpaceConfig& config) {
  if (spec.n_active < 1 || spec.n_active > config.size()) {
    throw Error(ErrorKind::invalid_argument, "n_active must be in [1, |G|]");
  }
  Rng rng(spec.rng_seed);
  Probe probe{config, spec, {}};
  const auto sources = sample_sources(seeds, weights, spec.n_sources, rng);
  probe.items.reserve(spec.n_sources * spec.goals_per_source);
  for (const auto& src : sources) {
    for (std::size_t g = 0; g < spec.goals_per_source; ++g) {
      auto goal = sample_goal(src.z0, spec.n_active, rng);
      ProbeItem item;
      item.item_id = probe.items.size();
      item.seed_id = src.id;
      item.source_text = src.text;
      item.z0 = src.z0;
      item.z_star = std::move(goal.z_star);
      item.active = std::move(goal.active);
      item.deltas = std::move(goal.deltas);
      item.strategy = spec.strategy;
      item.rng_seed = rng.fork_seed();
      probe.items.push_back(std::move(item));
    }
  }
  return probe;
}

}  // namespace steer
