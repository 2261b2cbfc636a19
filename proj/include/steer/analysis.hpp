#pragma once

// Aggregation and analyses over per-response metric records.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/stats.hpp"
#include "steer/steermetrics.hpp"
#include "steer/textmetrics.hpp"

namespace steer {

/// One scored response joined with its probe item (one metrics JSONL line).
struct AnalysisRecord {
  std::string record_id;
  std::size_t item_id = 0;
  std::string seed_id;
  GoalVector z0;
  GoalVector z_star;
  GoalVector z_hat;
  std::vector<bool> active;
  std::vector<double> deltas;
  std::string source_text;
  std::string rewrite_text;
  MetricRecord metrics;

  nlohmann::json to_json(bool include_binned = true) const {
    nlohmann::json j{{"record_id", record_id},     {"item_id", item_id},
                     {"seed_id", seed_id},         {"z0", z0},
                     {"z_star", z_star},           {"z_hat", z_hat},
                     {"active", active},           {"deltas", deltas},
                     {"source_text", source_text}, {"rewrite_text", rewrite_text},
                     {"metrics", steer::to_json(metrics.raw)}};
    if (include_binned) j["binned"] = steer::to_json(metrics.binned);
    return j;
  }

  static AnalysisRecord from_json(const nlohmann::json& j) {
    AnalysisRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.item_id = j.at("item_id").get<std::size_t>();
    r.seed_id = j.at("seed_id").get<std::string>();
    r.z0 = j.at("z0").get<GoalVector>();
    r.z_star = j.at("z_star").get<GoalVector>();
    r.z_hat = j.at("z_hat").get<GoalVector>();
    r.active = j.at("active").get<std::vector<bool>>();
    r.deltas = j.at("deltas").get<std::vector<double>>();
    r.source_text = j.value("source_text", std::string());
    r.rewrite_text = j.value("rewrite_text", std::string());
    if (j.contains("binned")) {
      r.metrics.raw = metric_values_from_json(j.at("metrics"));
      r.metrics.binned = metric_values_from_json(j.at("binned"));
    } else {
      r.metrics = binned_metrics(r.z0, r.z_star, r.z_hat);
    }
    return r;
  }
};

inline AnalysisRecord make_analysis_record(std::string record_id, std::size_t item_id, std::string seed_id,
                                           GoalVector z0, GoalVector z_star, GoalVector z_hat,
                                           std::vector<bool> active, std::vector<double> deltas,
                                           std::string source_text, std::string rewrite_text) {
  AnalysisRecord r{std::move(record_id), item_id, std::move(seed_id), std::move(z0), std::move(z_star),
                   std::move(z_hat), std::move(active), std::move(deltas), std::move(source_text),
                   std::move(rewrite_text), {}};
  r.metrics = binned_metrics(r.z0, r.z_star, r.z_hat);
  return r;
}

inline std::vector<AnalysisRecord> read_analysis_records(std::istream& in) {
  std::vector<AnalysisRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(AnalysisRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

enum class MetricKind { steering_error, miscalibration, orthogonality };

inline std::string_view to_string(MetricKind m) {
  switch (m) {
    case MetricKind::steering_error: return "steering_error";
    case MetricKind::miscalibration: return "miscalibration";
    case MetricKind::orthogonality: return "orthogonality";
  }
  return "";
}

inline std::optional<double> metric_value(const MetricValues& v, MetricKind m) {
  switch (m) {
    case MetricKind::steering_error: return v.steering_error;
    case MetricKind::miscalibration: return v.miscalibration;
    case MetricKind::orthogonality: return v.orthogonality;
  }
  return std::nullopt;
}

struct SummaryStats {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for n = 1
  double ci_lo = 0.0;  // 2.5th percentile
  double ci_hi = 0.0;  // 97.5th percentile
  std::size_t n = 0;
  std::size_t excluded = 0;

  nlohmann::json to_json() const {
    return {{"median", median}, {"iqr", {q25, q75}}, {"mean", mean},   {"std", std},
            {"ci95", {ci_lo, ci_hi}}, {"n", n}, {"excluded", excluded}};
  }
};

/// Summary over present values; absent (flagged) values are counted as excluded.
inline SummaryStats aggregate(const std::vector<std::optional<double>>& values) {
  std::vector<double> v;
  SummaryStats s;
  for (const auto& x : values) {
    if (x) v.push_back(*x);
    else ++s.excluded;
  }
  if (v.empty()) throw Error(ErrorKind::empty_input, "no values to aggregate");
  s.n = v.size();
  s.median = quantile(v, 0.5);
  s.q25 = quantile(v, 0.25);
  s.q75 = quantile(v, 0.75);
  s.ci_lo = quantile(v, 0.025);
  s.ci_hi = quantile(v, 0.975);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

inline SummaryStats aggregate(const std::vector<AnalysisRecord>& records, MetricKind metric, bool binned = false) {
  std::vector<std::optional<double>> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(metric_value(binned ? r.metrics.binned : r.metrics.raw, metric));
  return aggregate(values);
}

struct Strata {
  std::vector<std::size_t> correlated;       // record indices
  std::vector<std::size_t> anti_correlated;
  stats::TestResult mann_whitney;
};

/// Split records with both dimensions active by whether the requested deltas
/// share sign, and compare steering error between the groups.
inline Strata stratify_correlated(const std::vector<AnalysisRecord>& records, std::size_t dim_a,
                                  std::size_t dim_b) {
  Strata s;
  std::vector<double> corr_err;
  std::vector<double> anti_err;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.active.at(dim_a) || !r.active.at(dim_b)) continue;
    const bool same = (r.deltas[dim_a] > 0) == (r.deltas[dim_b] > 0);
    (same ? s.correlated : s.anti_correlated).push_back(i);
    (same ? corr_err : anti_err).push_back(r.metrics.raw.steering_error);
  }
  if (corr_err.empty() || anti_err.empty()) {
    throw Error(ErrorKind::insufficient_strata, "need both correlated and anti-correlated requests");
  }
  s.mann_whitney = stats::mann_whitney_u(corr_err, anti_err);
  return s;
}

struct FlowVector {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

struct FlowCell {
  double cx = 0.0;
  double cy = 0.0;
  std::size_t support = 0;  // raw vectors originating inside the cell
  std::optional<FlowVector> mean;
};

struct FlowField {
  std::size_t dim_a = 0;
  std::size_t dim_b = 1;
  std::size_t grid_n = 0;
  std::vector<FlowVector> raw;
  std::vector<FlowCell> cells;  // row-major, y outer

  std::string raw_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "x0,y0,dx,dy\n";
    for (const auto& v : raw) out << v.x0 << ',' << v.y0 << ',' << v.dx << ',' << v.dy << '\n';
    return out.str();
  }

  std::string grid_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "cx,cy,support,dx,dy\n";
    for (const auto& c : cells) {
      out << c.cx << ',' << c.cy << ',' << c.support << ',';
      if (c.mean) out << c.mean->dx << ',' << c.mean->dy;
      else out << ",";
      out << '\n';
    }
    return out.str();
  }
};

/// Movement z0 -> ẑ projected onto a dimension pair, plus a grid of
/// Gaussian-kernel mean vectors (bandwidth = cell size). Cells with fewer than
/// `min_support` origins inside them stay empty.
inline FlowField flow_field(const std::vector<AnalysisRecord>& records, std::size_t dim_a, std::size_t dim_b,
                            std::size_t grid_n, std::size_t min_support = 1) {
  if (grid_n == 0) throw Error(ErrorKind::invalid_argument, "grid_n must be positive");
  FlowField f;
  f.dim_a = dim_a;
  f.dim_b = dim_b;
  f.grid_n = grid_n;
  for (const auto& r : records) {
    f.raw.push_back({r.z0[dim_a], r.z0[dim_b], r.z_hat[dim_a] - r.z0[dim_a], r.z_hat[dim_b] - r.z0[dim_b]});
  }
  const double h = 1.0 / static_cast<double>(grid_n);
  auto cell_of = [&](double v) {
    return std::min(grid_n - 1, static_cast<std::size_t>(std::max(0.0, v) / h));
  };
  std::vector<std::size_t> support(grid_n * grid_n, 0);
  for (const auto& v : f.raw) ++support[cell_of(v.y0) * grid_n + cell_of(v.x0)];
  for (std::size_t iy = 0; iy < grid_n; ++iy) {
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      FlowCell c;
      c.cx = (static_cast<double>(ix) + 0.5) * h;
      c.cy = (static_cast<double>(iy) + 0.5) * h;
      c.support = support[iy * grid_n + ix];
      if (c.support >= min_support && c.support > 0) {
        double wsum = 0.0;
        double sx = 0.0;
        double sy = 0.0;
        for (const auto& v : f.raw) {
          const double d2 = (v.x0 - c.cx) * (v.x0 - c.cx) + (v.y0 - c.cy) * (v.y0 - c.cy);
          const double w = std::exp(-d2 / (2.0 * h * h));
          wsum += w;
          sx += w * v.dx;
          sy += w * v.dy;
        }
        c.mean = FlowVector{c.cx, c.cy, sx / wsum, sy / wsum};
      }
      f.cells.push_back(c);
    }
  }
  return f;
}

inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(ch);
    }
  }
  return out;
}

inline bool is_copy(std::string_view source, std::string_view rewrite) {
  return normalize_whitespace(source) == normalize_whitespace(rewrite);
}

struct CopyPasteStats {
  std::size_t copies = 0;
  std::size_t total = 0;
  double copy_rate = 0.0;
  std::optional<SummaryStats> bleu;
};

inline CopyPasteStats copy_paste_stats(const std::vector<AnalysisRecord>& records) {
  CopyPasteStats s;
  std::vector<std::optional<double>> bleu;
  for (const auto& r : records) {
    ++s.total;
    if (is_copy(r.source_text, r.rewrite_text)) ++s.copies;
    bleu.push_back(sentence_bleu(r.source_text, r.rewrite_text));
  }
  if (s.total > 0) {
    s.copy_rate = static_cast<double>(s.copies) / static_cast<double>(s.total);
    s.bleu = aggregate(bleu);
  }
  return s;
}

struct PairResidual {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  bool skipped = false;
  std::string diagnostic;
  double residual_rho = 0.0;
  double source_rho = 0.0;
  bool degenerate = false;  // residuals constant; rho reported as 0
  double difference() const { return residual_rho - source_rho; }
};

struct EntanglementResult {
  std::vector<PairResidual> pairs;
};

/// Residual coupling between goal dimensions beyond what the instructions ask.
///
/// For each pair (a, b): outputs and instruction targets are demeaned within
/// source text (absorbing a per-source random intercept and the source goals),
/// ẑ_a and ẑ_b are regressed by least squares on (z*_a, z*_b), and Spearman
/// rho is taken between the two residual vectors. The source-goal rho is
/// Spearman between z0_a and z0_b over distinct source texts.
inline EntanglementResult entanglement_residuals(const std::vector<AnalysisRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::empty_input, "no records");
  std::map<std::string, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < records.size(); ++i) by_source[records[i].seed_id].push_back(i);
  std::vector<std::size_t> used;
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [id, idx] : by_source) {
    if (idx.size() >= 2) {
      groups.push_back(idx);
      used.insert(used.end(), idx.begin(), idx.end());
    }
  }
  if (groups.size() < 2) {
    throw Error(ErrorKind::insufficient_strata, "need >= 2 source texts with >= 2 records each");
  }
  const std::size_t dims = records.front().z0.size();
  EntanglementResult result;
  for (std::size_t a = 0; a < dims; ++a) {
    for (std::size_t b = a + 1; b < dims; ++b) {
      PairResidual pr;
      pr.dim_a = a;
      pr.dim_b = b;
      const auto m = static_cast<Eigen::Index>(used.size());
      Eigen::MatrixXd x(m, 2);
      Eigen::VectorXd ya(m);
      Eigen::VectorXd yb(m);
      Eigen::Index row = 0;
      for (const auto& g : groups) {
        double mx0 = 0, mx1 = 0, ma = 0, mb = 0;
        for (auto i : g) {
          mx0 += records[i].z_star[a];
          mx1 += records[i].z_star[b];
          ma += records[i].z_hat[a];
          mb += records[i].z_hat[b];
        }
        const double k = static_cast<double>(g.size());
        for (auto i : g) {
          x(row, 0) = records[i].z_star[a] - mx0 / k;
          x(row, 1) = records[i].z_star[b] - mx1 / k;
          ya(row) = records[i].z_hat[a] - ma / k;
          yb(row) = records[i].z_hat[b] - mb / k;
          ++row;
        }
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
      qr.setThreshold(1e-10);
      if (qr.rank() < 2) {
        pr.skipped = true;
        pr.diagnostic = "rank-deficient design (rank " + std::to_string(qr.rank()) + " < 2)";
        result.pairs.push_back(pr);
        continue;
      }
      const Eigen::VectorXd ra = ya - x * qr.solve(ya);
      const Eigen::VectorXd rb = yb - x * qr.solve(yb);
      std::vector<double> va(ra.data(), ra.data() + ra.size());
      std::vector<double> vb(rb.data(), rb.data() + rb.size());
      // exact-zero residuals can carry rounding noise; treat tiny ones as zero
      auto flatten = [](std::vector<double>& v) {
        double mx = 0;
        for (double e : v) mx = std::max(mx, std::abs(e));
        if (mx < 1e-12) std::fill(v.begin(), v.end(), 0.0);
      };
      flatten(va);
      flatten(vb);
      const double rho = stats::spearman(va, vb);
      if (std::isnan(rho)) {
        pr.degenerate = true;
        pr.residual_rho = 0.0;
      } else {
        pr.residual_rho = rho;
      }
      std::vector<double> sa;
      std::vector<double> sb;
      for (const auto& g : groups) {
        sa.push_back(records[g.front()].z0[a]);
        sb.push_back(records[g.front()].z0[b]);
      }
      const double srho = stats::spearman(sa, sb);
      pr.source_rho = std::isnan(srho) ? 0.0 : srho;
      result.pairs.push_back(pr);
    }
  }
  return result;
}

/// Full report: summaries, strata, copy-paste and entanglement as one JSON
/// document, with flow fields written as CSV files into `out_dir`.
inline nlohmann::json write_report(const std::vector<AnalysisRecord>& records,
                                   const std::vector<std::string>& dimension_ids,
                                   const std::filesystem::path& out_dir, std::size_t grid_n = 10) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json report;
  report["n_records"] = records.size();
  report["quantile_estimator"] = "linear interpolation between order statistics";
  report["dimensions"] = dimension_ids;
  for (bool binned : {false, true}) {
    nlohmann::json section;
    for (auto m : {MetricKind::steering_error, MetricKind::miscalibration, MetricKind::orthogonality}) {
      try {
        section[std::string(to_string(m))] = aggregate(records, m, binned).to_json();
      } catch (const Error& e) {
        section[std::string(to_string(m))] = {{"error", e.what()}};
      }
    }
    std::size_t zero_movement = 0;
    for (const auto& r : records) zero_movement += (binned ? r.metrics.binned : r.metrics.raw).zero_movement;
    section["zero_movement"] = zero_movement;
    report[binned ? "binned" : "raw"] = section;
  }
  nlohmann::json strata = nlohmann::json::array();
  for (std::size_t a = 0; a < dimension_ids.size(); ++a) {
    for (std::size_t b = a + 1; b < dimension_ids.size(); ++b) {
      nlohmann::json entry{{"dim_a", dimension_ids[a]}, {"dim_b", dimension_ids[b]}};
      try {
        const auto s = stratify_correlated(records, a, b);
        std::vector<std::optional<double>> ce, ae;
        for (auto i : s.correlated) ce.push_back(records[i].metrics.raw.steering_error);
        for (auto i : s.anti_correlated) ae.push_back(records[i].metrics.raw.steering_error);
        entry["correlated"] = aggregate(ce).to_json();
        entry["anti_correlated"] = aggregate(ae).to_json();
        entry["mann_whitney_u"] = s.mann_whitney.statistic;
        entry["p_value"] = s.mann_whitney.p_value;
        entry["exact"] = s.mann_whitney.exact;
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      strata.push_back(entry);

      const auto flow = flow_field(records, a, b, grid_n);
      const std::string stem = "flow_" + dimension_ids[a] + "__" + dimension_ids[b];
      std::ofstream(out_dir / (stem + "_raw.csv")) << flow.raw_csv();
      std::ofstream(out_dir / (stem + "_grid.csv")) << flow.grid_csv();
    }
  }
  report["strata"] = strata;
  const auto cp = copy_paste_stats(records);
  report["copy_paste"] = {{"copies", cp.copies}, {"total", cp.total}, {"copy_rate", cp.copy_rate}};
  if (cp.bleu) report["copy_paste"]["bleu"] = cp.bleu->to_json();
  try {
    nlohmann::json ent = nlohmann::json::array();
    for (const auto& p : entanglement_residuals(records).pairs) {
      nlohmann::json e{{"dim_a", dimension_ids[p.dim_a]}, {"dim_b", dimension_ids[p.dim_b]}};
      if (p.skipped) {
        e["skipped"] = p.diagnostic;
      } else {
        e["residual_rho"] = p.residual_rho;
        e["source_rho"] = p.source_rho;
        e["difference"] = p.difference();
        e["degenerate"] = p.degenerate;
      }
      ent.push_back(e);
    }
    report["entanglement"] = ent;
  } catch (const Error& e) {
    report["entanglement"] = {{"error", e.what()}};
  }
  std::ofstream(out_dir / "report.json") << report.dump(2) << '\n';
  return report;
}

}  // namespace steer
