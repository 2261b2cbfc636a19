#include <gtest/gtest.h>

#include <cmath>

#include "steer/probegen.hpp"
#include "steer/random.hpp"
#include "steer/steermetrics.hpp"

using namespace steer;

namespace {

GoalVector random_vector(Rng& rng, std::size_t n = 4) {
  GoalVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform();
  return v;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST(SteeringError, Examples) {
  EXPECT_DOUBLE_EQ(steering_error({0.5, 0.5}, {0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(steering_error({0, 0, 0, 0}, {1, 1, 1, 1}), 2.0);
  EXPECT_NEAR(steering_error({0.2, 0.9}, {0.5, 0.5}), 0.5, 1e-15);
  EXPECT_EQ(kind_of([] { steering_error({0.1}, {0.1, 0.2}); }), ErrorKind::invalid_argument);
}

TEST(Decompose, PerfectOvershootUndershoot) {
  const GoalVector z0{0.2, 0.2};
  const GoalVector zs{0.6, 0.2};
  EXPECT_DOUBLE_EQ(miscalibration(z0, zs, zs), 0.0);
  EXPECT_NEAR(signed_miscalibration(z0, zs, {0.4, 0.2}), 0.5, 1e-12);   // went half-way
  EXPECT_NEAR(signed_miscalibration(z0, zs, {1.0, 0.2}), -1.0, 1e-12);  // twice as far
  EXPECT_NEAR(miscalibration(z0, zs, {1.0, 0.2}), 1.0, 1e-12);
  EXPECT_NEAR(miscalibration(z0, zs, z0), 1.0, 1e-12);  // no movement
}

TEST(Decompose, Orthogonality) {
  const GoalVector z0{0.2, 0.2};
  const GoalVector zs{0.6, 0.2};
  // exact target plus a sideways move of 0.3: movement (0.4, 0.3), side effect 0.3
  EXPECT_NEAR(orthogonality(z0, zs, {0.6, 0.5}).value, 0.3 / 0.5, 1e-12);
  // purely sideways movement
  EXPECT_NEAR(orthogonality(z0, zs, {0.2, 0.6}).value, 1.0, 1e-12);
  const auto none = orthogonality(z0, zs, z0);
  EXPECT_TRUE(none.zero_movement);
  EXPECT_EQ(none.value, 0.0);
  // along the request only
  EXPECT_NEAR(orthogonality(z0, zs, {0.5, 0.2}).value, 0.0, 1e-12);
}

TEST(Decompose, ZeroRequest) {
  EXPECT_EQ(kind_of([] { decompose({0.3, 0.3}, {0.3, 0.3}, {0.4, 0.1}); }), ErrorKind::zero_request);
  const auto m = compute_metrics({0.3, 0.3}, {0.3, 0.3}, {0.4, 0.1});
  EXPECT_TRUE(m.zero_request);
  EXPECT_FALSE(m.miscalibration.has_value());
  EXPECT_FALSE(m.orthogonality.has_value());
  EXPECT_NEAR(m.steering_error, std::sqrt(0.01 + 0.04), 1e-12);
}

TEST(Decompose, PythagorasAndRotationInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto z0 = random_vector(rng), zs = random_vector(rng), zh = random_vector(rng);
    const auto d = decompose(z0, zs, zh);
    const double err = steering_error(zs, zh);
    EXPECT_NEAR(d.parallel * d.parallel + d.orthogonal * d.orthogonal, err * err, 1e-12);
    // random rotation in a coordinate plane
    const double th = rng.uniform(0, 6.283185307179586);
    const std::size_t a = rng.below(4), b = (a + 1 + rng.below(3)) % 4;
    auto rot = [&](GoalVector v) {
      const double x = v[a], y = v[b];
      v[a] = std::cos(th) * x - std::sin(th) * y;
      v[b] = std::sin(th) * x + std::cos(th) * y;
      return v;
    };
    const auto r = decompose(rot(z0), rot(zs), rot(zh));
    EXPECT_NEAR(r.parallel, d.parallel, 1e-12);
    EXPECT_NEAR(r.orthogonal, d.orthogonal, 1e-12);
  }
}

TEST(ComputeMetrics, CopyPaste) {
  const GoalVector z0{0.2, 0.5, 0.5, 0.7};
  const GoalVector zs{0.6, 0.5, 0.3, 0.7};
  const auto m = compute_metrics(z0, zs, z0);
  EXPECT_TRUE(m.zero_movement);
  EXPECT_NEAR(*m.miscalibration, 1.0, 1e-12);
  EXPECT_EQ(*m.orthogonality, 0.0);
  EXPECT_NEAR(m.steering_error, std::sqrt(0.16 + 0.04), 1e-12);
}

TEST(ComputeMetrics, JsonRoundTrip) {
  const auto m = compute_metrics({0.2, 0.2}, {0.6, 0.2}, {0.5, 0.4});
  const auto back = metric_values_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.steering_error, m.steering_error);
  EXPECT_EQ(back.miscalibration, m.miscalibration);
  EXPECT_EQ(back.orthogonality, m.orthogonality);
  EXPECT_EQ(back.signed_miscalibration, m.signed_miscalibration);
  const auto z = compute_metrics({0.2, 0.2}, {0.2, 0.2}, {0.2, 0.2});
  const auto zb = metric_values_from_json(to_json(z));
  EXPECT_TRUE(zb.zero_request);
  EXPECT_FALSE(zb.miscalibration);
}

TEST(BinnedMetrics, Examples) {
  // same bin on the active dimension
  const auto same = binned_metrics({0.3, 0.5}, {0.45, 0.5}, {0.48, 0.5});
  EXPECT_NEAR(same.binned.steering_error, 0.0, 1e-15);
  EXPECT_GT(same.raw.steering_error, 0.0);
  // adjacent bins: +0.1 requested, +0.35 achieved
  const auto adj = binned_metrics({0.3, 0.5}, {0.45, 0.5}, {0.65, 0.5});
  EXPECT_NEAR(adj.binned.steering_error, 0.25, 1e-12);
  const auto zero = binned_metrics({0.3, 0.5}, {0.3, 0.5}, {0.3, 0.5});
  EXPECT_EQ(zero.binned.steering_error, 0.0);
  EXPECT_TRUE(zero.binned.zero_request);
}

TEST(Median, Basics) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(kind_of([] { median({}); }), ErrorKind::empty_input);
}

TEST(RandomBaseline, FourDimensionalProbe) {
  Rng rng(2024);
  std::vector<GoalVector> targets;
  for (int i = 0; i < 2000; ++i) targets.push_back(sample_goal(random_vector(rng), 3, rng).z_star);
  const double m = random_baseline(targets, rng, 10);
  EXPECT_NEAR(m, 0.77, 0.03);
}

TEST(RandomBaseline, Errors) {
  Rng rng(1);
  EXPECT_EQ(kind_of([&] { random_baseline({}, rng, 1); }), ErrorKind::empty_input);
  EXPECT_EQ(kind_of([&] { random_baseline({GoalVector(4)}, rng, 0); }), ErrorKind::invalid_argument);
}

namespace {

// Direct tau-b from the pair-count definition.
double tau_b_reference(const std::vector<std::pair<double, double>>& p) {
  double nc = 0, nd = 0, n1 = 0, n2 = 0, n0 = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j <= i) continue;
      n0 += 1;
      const int sx = (p[i].first > p[j].first) - (p[i].first < p[j].first);
      const int sy = (p[i].second > p[j].second) - (p[i].second < p[j].second);
      if (sx == 0) n1 += 1;
      if (sy == 0) n2 += 1;
      if (sx * sy > 0) nc += 1;
      if (sx * sy < 0) nd += 1;
    }
  return (nc - nd) / std::sqrt((n0 - n1) * (n0 - n2));
}

}  // namespace

TEST(Kendall, MatchesPairEnumeration) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> p;
    const std::size_t n = 2 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i) {
      p.emplace_back(static_cast<double>(rng.below(3)) - 1.0, static_cast<double>(rng.below(3)) - 1.0);
    }
    const double ref = tau_b_reference(p);
    if (std::isnan(ref)) {
      EXPECT_EQ(kind_of([&] { kendall_tau(p); }), ErrorKind::undefined_tau);
      continue;
    }
    const auto k = kendall_tau(p);
    EXPECT_NEAR(k.tau, ref, 1e-12);
    EXPECT_NEAR(k.agreement, (ref + 1) / 2, 1e-12);
  }
}

TEST(Kendall, PerfectAndReversed) {
  EXPECT_DOUBLE_EQ(kendall_tau({{1, 1}, {2, 2}, {3, 3}}).tau, 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau({{1, 3}, {2, 2}, {3, 1}}).agreement, 0.0);
  EXPECT_EQ(kind_of([] { kendall_tau({{1, 1}, {1, 2}}); }), ErrorKind::undefined_tau);
}

TEST(Kendall, AppendixAgreement) {
  EXPECT_NEAR(pairwise_agreement(0.4644), 0.7322, 1e-12);
  EXPECT_NEAR(std::round(pairwise_agreement(0.4644) * 1000) / 10, 73.2, 1e-9);
}
