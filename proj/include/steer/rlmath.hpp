#pragma once

// Value-level RL objective: sample weights, leave-one-out advantages,
// rejection sampling, IPO margins, and the margin-aware LOOP objective.
// Evaluation only; no gradients, no parameter updates.

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/probegen.hpp"
#include "steer/steermetrics.hpp"

namespace steer {

struct Completion {
  double reward = 0.0;
  std::vector<double> logprobs_policy;  // per token
  std::vector<double> logprobs_ref;

  std::size_t tokens() const { return logprobs_policy.size(); }
  double sequence_logratio() const {
    double s = 0.0;
    for (std::size_t t = 0; t < logprobs_policy.size(); ++t) s += logprobs_policy[t] - logprobs_ref[t];
    return s;
  }
};

struct RolloutGroup {
  std::optional<GoalVector> z0;
  std::optional<GoalVector> z_star;
  std::vector<Completion> completions;

  std::size_t size() const { return completions.size(); }

  std::vector<double> rewards() const {
    std::vector<double> r;
    r.reserve(completions.size());
    for (const auto& c : completions) r.push_back(c.reward);
    return r;
  }

  void validate() const {
    if (completions.size() < 2) throw Error(ErrorKind::invalid_argument, "rollout group needs >= 2 completions");
    for (std::size_t i = 0; i < completions.size(); ++i) {
      const auto& c = completions[i];
      if (c.logprobs_policy.size() != c.logprobs_ref.size()) {
        throw Error(ErrorKind::invalid_argument,
                    "completion " + std::to_string(i) + ": policy/reference token arrays differ in length");
      }
      if (c.logprobs_policy.empty()) {
        throw Error(ErrorKind::invalid_argument, "completion " + std::to_string(i) + ": no tokens");
      }
      for (std::size_t t = 0; t < c.tokens(); ++t) {
        if (c.logprobs_policy[t] > 0.0 || c.logprobs_ref[t] > 0.0) {
          throw Error(ErrorKind::invalid_argument,
                      "completion " + std::to_string(i) + ": log-probability > 0 at token " + std::to_string(t));
        }
      }
    }
  }
};

/// Which (j, k) pairs of the selected set enter the margin penalty.
enum class MarginPairs {
  top_vs_bottom,  // j in the top K/2, k in the bottom K/2
  all_ordered,    // every ordered j != k in G'
};

struct RLHyperparams {
  double beta = 0.01;
  double lambda_tau = 1.0;
  double tau = 1.0;
  std::size_t k = 16;
  MarginPairs pairs = MarginPairs::top_vs_bottom;

  void validate(std::size_t group_size) const {
    if (!(beta >= 0.0)) throw Error(ErrorKind::invalid_argument, "beta must be >= 0");
    if (!(lambda_tau >= 0.0)) throw Error(ErrorKind::invalid_argument, "lambda must be >= 0");
    if (!(tau > 0.0)) throw Error(ErrorKind::invalid_argument, "tau must be > 0");
    if (k < 2 || k % 2 != 0) throw Error(ErrorKind::invalid_argument, "K must be even and >= 2");
    if (k > group_size) {
      throw Error(ErrorKind::invalid_argument,
                  "K = " + std::to_string(k) + " exceeds group size " + std::to_string(group_size));
    }
  }
};

/// (1 - p) / p for classifier probability p that z0 came from the corpus.
inline double sample_weight_from_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::invalid_argument, "probability must lie in (0, 1)");
  return (1.0 - p) / p;
}

inline double sample_weight(const GoalVector& z0, const SamplingWeights& weights) {
  return weights.weight_for(z0);
}

inline std::vector<double> loo_advantage(const std::vector<double>& rewards) {
  if (rewards.size() < 2) throw Error(ErrorKind::invalid_argument, "leave-one-out needs >= 2 rewards");
  const double g = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / g;
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back(g / (g - 1.0) * (r - mean));
  return out;
}

struct Selection {
  std::vector<std::size_t> top;     // K/2 highest rewards
  std::vector<std::size_t> bottom;  // K/2 lowest rewards

  std::vector<std::size_t> all() const {
    std::vector<std::size_t> v(top);
    v.insert(v.end(), bottom.begin(), bottom.end());
    return v;
  }
};

/// Top- and bottom-K/2 by reward. Candidates are ranked by (reward desc,
/// index asc); top takes the head of that order, bottom the tail.
inline Selection rejection_sample(const std::vector<double>& rewards, std::size_t k) {
  if (k % 2 != 0 || k == 0) throw Error(ErrorKind::invalid_argument, "K must be even and positive");
  if (k > rewards.size()) throw Error(ErrorKind::invalid_argument, "K exceeds group size");
  std::vector<std::size_t> order(rewards.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
  Selection s;
  const std::size_t half = k / 2;
  s.top.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  s.bottom.assign(order.end() - static_cast<std::ptrdiff_t>(half), order.end());
  return s;
}

inline Selection rejection_sample(const RolloutGroup& group, std::size_t k) {
  return rejection_sample(group.rewards(), k);
}

inline double ipo_margin(double logratio_j, double logratio_k, double r_j, double r_k, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::invalid_argument, "tau must be > 0");
  return (logratio_j - logratio_k) - (r_j - r_k) / tau;
}

struct ObjectiveTerms {
  double policy_term = 0.0;   // sum over G' of sum_t ratio_t * A_i, before normalization
  double kl_term = 0.0;       // sum over G' of KL_i, before normalization
  std::size_t tokens = 0;     // sum of |y_i| over G'
  double loop = 0.0;          // (policy_term - beta * kl_term) / tokens
  double regularizer = 0.0;   // sum of squared margins
  double weight = 1.0;
  double total = 0.0;         // weight * (loop + lambda * regularizer)

  nlohmann::json to_json() const {
    return {{"policy_term", policy_term}, {"kl_term", kl_term}, {"tokens", tokens},
            {"loop", loop},               {"regularizer", regularizer},
            {"weight", weight},           {"total", total}};
  }
};

/// Objective value for one group. Advantages are leave-one-out over the full
/// group; the policy and KL sums run over the selected set and are normalized
/// by its total token count. KL per completion is the summed per-token log
/// ratio. Margins use unnormalized sequence log ratios.
inline ObjectiveTerms maloop_objective(const RolloutGroup& group, const Selection& selected,
                                       const RLHyperparams& hp, double weight) {
  group.validate();
  hp.validate(group.size());
  const auto rewards = group.rewards();
  const auto adv = loo_advantage(rewards);
  ObjectiveTerms t;
  t.weight = weight;
  for (std::size_t i : selected.all()) {
    const auto& c = group.completions.at(i);
    double ratio_sum = 0.0;
    for (std::size_t s = 0; s < c.tokens(); ++s) ratio_sum += std::exp(c.logprobs_policy[s] - c.logprobs_ref[s]);
    t.policy_term += ratio_sum * adv[i];
    t.kl_term += c.sequence_logratio();
    t.tokens += c.tokens();
  }
  t.loop = (t.policy_term - hp.beta * t.kl_term) / static_cast<double>(t.tokens);

  auto add_pair = [&](std::size_t j, std::size_t k) {
    const auto& cj = group.completions[j];
    const auto& ck = group.completions[k];
    const double d = ipo_margin(cj.sequence_logratio(), ck.sequence_logratio(), cj.reward, ck.reward, hp.tau);
    t.regularizer += d * d;
  };
  if (hp.pairs == MarginPairs::top_vs_bottom) {
    for (std::size_t j : selected.top)
      for (std::size_t k : selected.bottom) add_pair(j, k);
  } else {
    const auto all = selected.all();
    for (std::size_t j : all)
      for (std::size_t k : all)
        if (j != k) add_pair(j, k);
  }
  t.total = weight * (t.loop + hp.lambda_tau * t.regularizer);
  return t;
}

inline ObjectiveTerms maloop_objective(const RolloutGroup& group, const RLHyperparams& hp, double weight = 1.0) {
  hp.validate(group.size());
  return maloop_objective(group, rejection_sample(group, hp.k), hp, weight);
}

enum class RewardKind { steering, miscalibration_only, orthogonality_only };

/// Negative loss; flagged (undefined) components count as zero loss.
inline double reward(const GoalVector& z0, const GoalVector& z_star, const GoalVector& z_hat,
                     RewardKind kind = RewardKind::steering) {
  switch (kind) {
    case RewardKind::steering: return -steering_error(z_star, z_hat);
    case RewardKind::miscalibration_only: {
      const auto m = compute_metrics(z0, z_star, z_hat);
      return -m.miscalibration.value_or(0.0);
    }
    case RewardKind::orthogonality_only: {
      const auto m = compute_metrics(z0, z_star, z_hat);
      return -m.orthogonality.value_or(0.0);
    }
  }
  return 0.0;
}

/// One JSONL line: {rewards, token_logprobs_policy, token_logprobs_ref, z0?, z_star?}.
inline RolloutGroup rollout_group_from_json(const nlohmann::json& j) {
  RolloutGroup g;
  const auto rewards = j.at("rewards").get<std::vector<double>>();
  const auto lp = j.at("token_logprobs_policy").get<std::vector<std::vector<double>>>();
  const auto lr = j.at("token_logprobs_ref").get<std::vector<std::vector<double>>>();
  if (lp.size() != rewards.size() || lr.size() != rewards.size()) {
    throw Error(ErrorKind::invalid_argument, "rewards and log-probability arrays differ in length");
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) g.completions.push_back({rewards[i], lp[i], lr[i]});
  if (j.contains("z0") && !j["z0"].is_null()) g.z0 = j["z0"].get<GoalVector>();
  if (j.contains("z_star") && !j["z_star"].is_null()) g.z_star = j["z_star"].get<GoalVector>();
  return g;
}

inline std::vector<RolloutGroup> read_rollout_groups(std::istream& in) {
  std::vector<RolloutGroup> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(rollout_group_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse_error, "groups line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace steer
