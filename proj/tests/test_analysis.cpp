#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "steer/analysis.hpp"

using namespace steer;

namespace {

AnalysisRecord rec(std::string seed, GoalVector z0, GoalVector zs, GoalVector zh, std::string src = "a b",
                   std::string rw = "c d") {
  std::vector<bool> active(z0.size());
  std::vector<double> deltas(z0.size());
  for (std::size_t d = 0; d < z0.size(); ++d) {
    deltas[d] = zs[d] - z0[d];
    active[d] = deltas[d] != 0.0;
  }
  static std::size_t next = 0;
  const std::size_t id = next++;
  return make_analysis_record(std::to_string(id) + ":0", id, std::move(seed), z0, zs, zh, active, deltas,
                              std::move(src), std::move(rw));
}

double gauss(Rng& rng) {
  const double u = 1.0 - rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * rng.uniform());
}

// Sources with random starting points and independent random targets on two dimensions.
std::vector<AnalysisRecord> entangled(double coupling, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AnalysisRecord> out;
  for (int s = 0; s < 25; ++s) {
    const GoalVector z0{rng.uniform(), rng.uniform()};
    for (int k = 0; k < 8; ++k) {
      const GoalVector zs{rng.uniform(), rng.uniform()};
      const double e = gauss(rng) * 0.1;
      const double b = zs[1] + coupling * e + 0.1 * (1 - coupling) * gauss(rng);
      const GoalVector zh{std::clamp(zs[0] + e, 0.0, 1.0), std::clamp(b, 0.0, 1.0)};
      out.push_back(rec("src" + std::to_string(s), z0, zs, zh));
    }
  }
  return out;
}

}  // namespace

TEST(AnalysisRecord, JsonRoundTripAndBinnedRecompute) {
  const auto r = rec("s", {0.3, 0.5}, {0.45, 0.5}, {0.65, 0.5});
  const auto back = AnalysisRecord::from_json(nlohmann::json::parse(r.to_json().dump()));
  EXPECT_EQ(back.to_json(), r.to_json());
  const auto without = AnalysisRecord::from_json(r.to_json(false));
  EXPECT_NEAR(without.metrics.binned.steering_error, 0.25, 1e-12);
  std::istringstream in(r.to_json().dump() + "\n\n" + r.to_json(false).dump() + "\n");
  EXPECT_EQ(read_analysis_records(in).size(), 2u);
}

TEST(Aggregate, SummaryValues) {
  const auto s = aggregate(std::vector<std::optional<double>>{1.0, 2.0, std::nullopt, 3.0, 4.0});
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(s.excluded, 1u);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q25, 1.75);
  EXPECT_DOUBLE_EQ(s.q75, 3.25);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.ci_lo, 1.075, 1e-12);
  EXPECT_NEAR(s.ci_hi, 3.925, 1e-12);
  EXPECT_EQ(aggregate(std::vector<std::optional<double>>{7.0}).std, 0.0);
  EXPECT_THROW(aggregate(std::vector<std::optional<double>>{std::nullopt}), Error);
}

TEST(Aggregate, FlaggedRecordsAreExcluded) {
  std::vector<AnalysisRecord> rs{rec("s", {0.3, 0.3}, {0.3, 0.3}, {0.4, 0.3}),
                                 rec("s", {0.3, 0.3}, {0.6, 0.3}, {0.5, 0.3})};
  const auto mis = aggregate(rs, MetricKind::miscalibration);
  EXPECT_EQ(mis.n, 1u);
  EXPECT_EQ(mis.excluded, 1u);
  EXPECT_EQ(aggregate(rs, MetricKind::steering_error).n, 2u);
}

TEST(Stratify, SplitsBySign) {
  std::vector<AnalysisRecord> rs;
  rs.push_back(rec("s", {0.5, 0.5, 0.5}, {0.7, 0.7, 0.5}, {0.7, 0.7, 0.5}));  // correlated, exact
  rs.push_back(rec("s", {0.5, 0.5, 0.5}, {0.3, 0.3, 0.5}, {0.31, 0.3, 0.5}));  // correlated
  rs.push_back(rec("s", {0.5, 0.5, 0.5}, {0.7, 0.3, 0.5}, {0.5, 0.5, 0.5}));  // anti
  rs.push_back(rec("s", {0.5, 0.5, 0.5}, {0.3, 0.7, 0.5}, {0.4, 0.4, 0.5}));  // anti
  rs.push_back(rec("s", {0.5, 0.5, 0.5}, {0.7, 0.5, 0.7}, {0.7, 0.5, 0.7}));  // b inactive
  const auto s = stratify_correlated(rs, 0, 1);
  EXPECT_EQ(s.correlated, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.anti_correlated, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(s.mann_whitney.statistic, 0.0);
  EXPECT_TRUE(s.mann_whitney.exact);
  EXPECT_THROW(stratify_correlated(rs, 1, 2), Error);
}

TEST(FlowField, SingleRecordOneCell) {
  const std::vector<AnalysisRecord> rs{rec("s", {0.12, 0.81}, {0.3, 0.81}, {0.32, 0.7})};
  const auto f = flow_field(rs, 0, 1, 10);
  ASSERT_EQ(f.cells.size(), 100u);
  std::size_t nonempty = 0;
  for (const auto& c : f.cells) {
    if (!c.mean) continue;
    ++nonempty;
    EXPECT_NEAR(c.cx, 0.15, 1e-12);
    EXPECT_NEAR(c.cy, 0.85, 1e-12);
    EXPECT_NEAR(c.mean->dx, 0.2, 1e-12);
    EXPECT_NEAR(c.mean->dy, -0.11, 1e-12);
  }
  EXPECT_EQ(nonempty, 1u);
  EXPECT_NE(f.raw_csv().find("x0,y0,dx,dy"), std::string::npos);
  EXPECT_NE(f.grid_csv().find("cx,cy,support,dx,dy"), std::string::npos);
}

TEST(FlowField, UniformMovementReproduced) {
  Rng rng(1);
  std::vector<AnalysisRecord> rs;
  for (int i = 0; i < 400; ++i) {
    const GoalVector z0{rng.uniform(0, 0.9), rng.uniform(0, 0.9)};
    rs.push_back(rec("s", z0, {z0[0] + 0.1, z0[1]}, {z0[0] + 0.05, z0[1] + 0.02}));
  }
  const auto f = flow_field(rs, 0, 1, 5, 3);
  for (const auto& c : f.cells) {
    if (c.support < 3) {
      EXPECT_FALSE(c.mean.has_value());
      continue;
    }
    EXPECT_NEAR(c.mean->dx, 0.05, 1e-12);
    EXPECT_NEAR(c.mean->dy, 0.02, 1e-12);
  }
  EXPECT_THROW(flow_field(rs, 0, 1, 0), Error);
}

TEST(CopyPaste, WhitespaceNormalized) {
  EXPECT_TRUE(is_copy("The  cat\nsat. ", " The cat sat."));
  EXPECT_FALSE(is_copy("The cat sat.", "The cat sat!"));
  const auto text = fixtures::long_texts(1)[0];
  std::vector<AnalysisRecord> rs{rec("s", {0.5}, {0.7}, {0.5}, text, text + "\n"),
                                 rec("s", {0.5}, {0.7}, {0.6}, text, "Something else entirely.")};
  const auto s = copy_paste_stats(rs);
  EXPECT_EQ(s.copies, 1u);
  EXPECT_EQ(s.total, 2u);
  EXPECT_DOUBLE_EQ(s.copy_rate, 0.5);
  ASSERT_TRUE(s.bleu.has_value());
  EXPECT_EQ(s.bleu->n, 2u);
  const double other = sentence_bleu(text, "Something else entirely.");
  EXPECT_NEAR(sentence_bleu(text, text + "\n"), 1.0, 1e-12);
  EXPECT_NEAR(s.bleu->mean, (1.0 + other) / 2, 1e-12);
}

TEST(Entanglement, CoupledErrorsShowUp) {
  const auto coupled = entanglement_residuals(entangled(0.9, 3));
  ASSERT_EQ(coupled.pairs.size(), 1u);
  EXPECT_FALSE(coupled.pairs[0].skipped);
  EXPECT_GT(coupled.pairs[0].residual_rho, 0.7);
  const auto free = entanglement_residuals(entangled(0.0, 3));
  EXPECT_LT(std::abs(free.pairs[0].residual_rho), 0.2);
  EXPECT_NEAR(free.pairs[0].difference(), free.pairs[0].residual_rho - free.pairs[0].source_rho, 1e-15);
}

TEST(Entanglement, ExactFitIsDegenerate) {
  Rng rng(4);
  std::vector<AnalysisRecord> rs;
  for (int s = 0; s < 4; ++s) {
    const GoalVector z0{rng.uniform(), rng.uniform()};
    for (int k = 0; k < 5; ++k) {
      const GoalVector zs{rng.uniform(), rng.uniform()};
      rs.push_back(rec("p" + std::to_string(s), z0, zs, zs));
    }
  }
  const auto r = entanglement_residuals(rs);
  EXPECT_TRUE(r.pairs[0].degenerate);
  EXPECT_EQ(r.pairs[0].residual_rho, 0.0);
}

TEST(Entanglement, RankDeficientPairSkipped) {
  Rng rng(5);
  std::vector<AnalysisRecord> rs;
  for (int s = 0; s < 5; ++s) {
    const GoalVector z0{rng.uniform(), 0.5, rng.uniform()};
    for (int k = 0; k < 4; ++k) {
      // dimension 1 is never requested: constant within each source
      const GoalVector zs{rng.uniform(), 0.5, rng.uniform()};
      rs.push_back(rec("q" + std::to_string(s), z0, zs, {zs[0] + 0.01 * k, 0.5 + 0.02 * k, zs[2]}));
    }
  }
  const auto r = entanglement_residuals(rs);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_TRUE(r.pairs[0].skipped);   // (0, 1)
  EXPECT_FALSE(r.pairs[1].skipped);  // (0, 2)
  EXPECT_TRUE(r.pairs[2].skipped);   // (1, 2)
  EXPECT_NE(r.pairs[0].diagnostic.find("rank"), std::string::npos);
}

TEST(Entanglement, NeedsRepeatedSources) {
  std::vector<AnalysisRecord> rs{rec("a", {0.3, 0.3}, {0.5, 0.5}, {0.5, 0.5}),
                                 rec("b", {0.3, 0.3}, {0.5, 0.5}, {0.5, 0.5})};
  try {
    entanglement_residuals(rs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_strata);
  }
}

TEST(WriteReport, FilesAndSections) {
  const auto dir = std::filesystem::temp_directory_path() / "steer_report_test";
  std::filesystem::remove_all(dir);
  const auto rs = entangled(0.5, 8);
  const auto report = write_report(rs, {"alpha", "beta"}, dir, 4);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "flow_alpha__beta_raw.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "flow_alpha__beta_grid.csv"));
  EXPECT_EQ(report.at("n_records"), rs.size());
  EXPECT_TRUE(report.at("raw").contains("steering_error"));
  EXPECT_TRUE(report.at("binned").contains("orthogonality"));
  EXPECT_TRUE(report.at("entanglement").is_array());
  std::ifstream grid(dir / "flow_alpha__beta_grid.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(grid, l);) ++lines;
  EXPECT_EQ(lines, 1u + 16u);
  std::filesystem::remove_all(dir);
}
