// steerbench: command-line driver for the steerability pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "steer/steer.hpp"
#include "steer/http_transport.hpp"

namespace {

using namespace steer;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  return out;
}

GoalSpaceConfig load_config(const std::string& path) {
  if (path.empty()) return GoalSpaceConfig::standard();
  auto in = open_in(path);
  return GoalSpaceConfig::from_json(nlohmann::json::parse(in));
}

std::vector<std::string> dimension_ids(const GoalSpaceConfig& config) {
  std::vector<std::string> ids;
  for (const auto& d : config.dimensions()) ids.push_back(d.id);
  return ids;
}

void report_rejections(const IngestResult& r) {
  std::cerr << "ingested " << r.seeds.size() << " seeds, rejected " << r.rejected.size() << "\n";
  for (const auto& [reason, n] : r.rejected_by_reason()) std::cerr << "  " << reason << ": " << n << "\n";
}

struct FitArgs {
  std::string corpus;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  auto in = open_in(a.corpus);
  auto ingest = ingest_corpus(in, GoalSpaceConfig::standard());
  report_rejections(ingest);
  const auto config = refit_goalspace(ingest.seeds, GoalSpaceConfig::standard());
  open_out(a.out) << config.to_json().dump(2) << '\n';
  return 0;
}

struct ProbeArgs {
  std::string corpus;
  std::string goalspace;
  std::string out;
  std::string classifier_out;
  std::size_t sources = 64;
  std::size_t goals = 32;
  std::size_t active = 3;
  std::string strategy = "direct";
  std::uint64_t seed = 0;
  bool uniform_sources = false;
};

int cmd_probe(const ProbeArgs& a) {
  const auto config = load_config(a.goalspace);
  auto in = open_in(a.corpus);
  const auto ingest = ingest_corpus(in, config);
  report_rejections(ingest);
  Rng rng(a.seed);
  SamplingWeights weights;
  if (a.uniform_sources) {
    weights.weights.assign(ingest.seeds.size(), 1.0);
  } else {
    weights = estimate_sampling_weights(ingest.seeds, rng);
  }
  ProbeSpec spec{a.sources, a.goals, a.active, PromptStrategy::parse(a.strategy), rng.fork_seed()};
  const auto probe = build_probe(spec, ingest.seeds, weights, config);
  auto out = open_out(a.out);
  probe.write(out);
  if (!a.classifier_out.empty()) open_out(a.classifier_out) << weights.classifier.to_json().dump(2) << '\n';
  std::cerr << "wrote " << probe.items.size() << " items to " << a.out << "\n";
  return 0;
}

struct RunArgs {
  std::string probe;
  std::string endpoint;
  std::string model;
  std::string strategy;
  std::string decoding;
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t best_of = 1;
  std::size_t parallel = 4;
  std::size_t max_tokens = 0;
  int retries = 5;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  auto in = open_in(a.probe);
  const auto probe = Probe::read(in);
  auto transport = HttpTransport::from_env(a.endpoint, a.api_key_env);
  AttemptContext ctx;
  ctx.transport = &transport;
  ctx.model = a.model;
  if (!a.strategy.empty()) ctx.strategy_override = PromptStrategy::parse(a.strategy);
  const std::string mode = a.decoding.empty() ? (a.best_of > 1 ? "sampled" : "greedy") : a.decoding;
  if (mode == "greedy") ctx.decoding = DecodingConfig::greedy();
  else if (mode == "sampled") ctx.decoding = DecodingConfig::sampled();
  else throw Error(ErrorKind::invalid_argument, "decoding must be greedy or sampled");
  if (a.max_tokens > 0) ctx.decoding.max_tokens = a.max_tokens;
  ctx.retry.max_retries = a.retries;
  ctx.mapper = goalspace_mapper(probe.config);
  ctx.dimension_ids = dimension_ids(probe.config);
  RunOptions opts{a.best_of, a.parallel, a.out};
  const auto records = run_probe(probe.items, ctx, opts);
  std::size_t rejected = 0;
  for (const auto& r : records) rejected += r.status == FilterStatus::rejected;
  std::cerr << records.size() << " responses (" << rejected << " rejected) in " << a.out << "\n";
  return 0;
}

struct JudgeArgs {
  std::string responses;
  std::string endpoint;
  std::string model = "judge";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_judge(const JudgeArgs& a) {
  auto in = open_in(a.responses);
  const auto responses = read_responses(in);
  auto transport = HttpTransport::from_env(a.endpoint, a.api_key_env);
  Rng rng(a.seed);
  auto out = open_out(a.out);
  std::map<std::string, std::size_t> counts;
  for (const auto& r : responses) {
    if (r.status == FilterStatus::rejected) continue;
    const auto j = judge_pair(r.record_id(), r.source_text, r.rewrite_text, transport, a.model, rng);
    ++counts[std::string(to_string(j.verdict.answer))];
    out << j.to_json().dump() << '\n';
    out.flush();
  }
  for (const auto& [k, n] : counts) std::cerr << k << ": " << n << "\n";
  return 0;
}

struct ReviewArgs {
  std::string judgments;
  std::string out;
  std::string script;
  std::uint64_t seed = 0;
  std::size_t yes_sample = kReviewedYesSample;
};

int cmd_review(const ReviewArgs& a) {
  auto in = open_in(a.judgments);
  auto judgments = read_judgments(in);
  Rng rng(a.seed);
  auto queue = build_review_queue(judgments, rng, a.yes_sample);
  ReviewSession session(std::move(judgments), std::move(queue), a.out);
  bool complete;
  if (!a.script.empty()) {
    auto script = open_in(a.script);
    complete = session.run(script, std::cout);
  } else {
    complete = session.run(std::cin, std::cout);
  }
  return complete ? 0 : 3;
}

struct MetricsArgs {
  std::string responses;
  std::string probe;
  std::string decisions;
  std::string out;
  bool binned = false;
};

int cmd_metrics(const MetricsArgs& a) {
  auto pin = open_in(a.probe);
  const auto probe = Probe::read(pin);
  auto rin = open_in(a.responses);
  const auto responses = select_best_per_item(read_responses(rin), probe.items);
  std::optional<std::map<std::string, ReviewDecision>> decisions;
  if (!a.decisions.empty()) decisions = read_decisions(a.decisions);
  std::map<std::size_t, const ProbeItem*> items;
  for (const auto& it : probe.items) items[it.item_id] = &it;

  auto out = open_out(a.out);
  std::size_t written = 0, ungrounded = 0, unmapped = 0;
  for (const auto& r : responses) {
    if (r.status == FilterStatus::rejected) {
      ++ungrounded;
      continue;
    }
    if (decisions) {
      auto d = decisions->find(r.record_id());
      if (d == decisions->end() || d->second.final != FinalDecision::grounded) {
        ++ungrounded;
        continue;
      }
    }
    if (!r.z_hat) {
      ++unmapped;
      continue;
    }
    const auto& it = *items.at(r.item_id);
    const auto rec = make_analysis_record(r.record_id(), r.item_id, it.seed_id, it.z0, it.z_star, *r.z_hat,
                                          it.active, it.deltas, it.source_text, r.rewrite_text);
    out << rec.to_json(a.binned).dump() << '\n';
    ++written;
  }
  std::cerr << written << " metric records; skipped " << ungrounded << " not grounded, " << unmapped
            << " without a goal vector\n";
  return 0;
}

struct ReportArgs {
  std::string metrics;
  std::string goalspace;
  std::string out;
  std::size_t grid = 10;
};

int cmd_report(const ReportArgs& a) {
  auto in = open_in(a.metrics);
  const auto records = read_analysis_records(in);
  const auto report = write_report(records, dimension_ids(load_config(a.goalspace)), a.out, a.grid);
  const auto& se = report["raw"]["steering_error"];
  if (se.contains("median")) std::cout << "median steering error: " << se["median"].get<double>() << "\n";
  std::cout << "report written to " << a.out << "\n";
  return 0;
}

struct RlArgs {
  std::string groups;
  std::string classifier;
  std::string pairs = "top-bottom";
  RLHyperparams hp;
  double weight = 1.0;
};

int cmd_rl_check(RlArgs a) {
  if (a.pairs == "top-bottom") a.hp.pairs = MarginPairs::top_vs_bottom;
  else if (a.pairs == "all-ordered") a.hp.pairs = MarginPairs::all_ordered;
  else throw Error(ErrorKind::invalid_argument, "pairs must be top-bottom or all-ordered");
  std::optional<LogisticModel> classifier;
  if (!a.classifier.empty()) {
    auto cin = open_in(a.classifier);
    classifier = LogisticModel::from_json(nlohmann::json::parse(cin));
  }
  auto in = open_in(a.groups);
  const auto groups = read_rollout_groups(in);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double w = a.weight;
    if (classifier && groups[g].z0) w = classifier->density_ratio(groups[g].z0->values());
    const auto sel = rejection_sample(groups[g], a.hp.k);
    const auto terms = maloop_objective(groups[g], sel, a.hp, w);
    auto j = terms.to_json();
    j["group"] = g;
    j["top"] = sel.top;
    j["bottom"] = sel.bottom;
    std::cout << j.dump() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steerability probes, runs and analysis"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit goal-space normalization bounds to a seed corpus");
  fit_cmd->add_option("--corpus", fit.corpus, "Seed corpus JSONL")->required();
  fit_cmd->add_option("--out", fit.out, "Goal-space config JSON")->required();

  ProbeArgs pr;
  auto* probe_cmd = app.add_subcommand("probe", "Generate a steerability probe");
  probe_cmd->add_option("--corpus", pr.corpus, "Seed corpus JSONL")->required();
  probe_cmd->add_option("--goalspace", pr.goalspace, "Goal-space config JSON (default: standard bounds)");
  probe_cmd->add_option("--sources", pr.sources, "Source texts to draw");
  probe_cmd->add_option("--goals", pr.goals, "Target goals per source");
  probe_cmd->add_option("--active", pr.active, "Active dimensions per goal");
  probe_cmd->add_option("--strategy", pr.strategy, "Prompt strategy id");
  probe_cmd->add_option("--seed", pr.seed, "RNG seed");
  probe_cmd->add_flag("--uniform-sources", pr.uniform_sources, "Skip density-ratio reweighting");
  probe_cmd->add_option("--classifier-out", pr.classifier_out, "Write the fitted weight classifier here");
  probe_cmd->add_option("--out", pr.out, "Probe JSONL")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Send probe prompts to a chat-completions endpoint");
  run_cmd->add_option("--probe", run.probe, "Probe JSONL")->required();
  run_cmd->add_option("--endpoint", run.endpoint, "Base URL, e.g. http://localhost:8000/v1")->required();
  run_cmd->add_option("--model", run.model, "Model name")->required();
  run_cmd->add_option("--strategy", run.strategy, "Override the probe's prompt strategy");
  run_cmd->add_option("--best-of", run.best_of, "Responses per item");
  run_cmd->add_option("--parallel", run.parallel, "Concurrent requests");
  run_cmd->add_option("--decoding", run.decoding, "greedy or sampled (default: sampled when best-of > 1)");
  run_cmd->add_option("--max-tokens", run.max_tokens, "Completion token limit");
  run_cmd->add_option("--retries", run.retries, "Transport retries per request");
  run_cmd->add_option("--api-key-env", run.api_key_env, "Environment variable holding the API key");
  run_cmd->add_option("--out", run.out, "Response journal JSONL (resumed if present)")->required();

  JudgeArgs judge;
  auto* judge_cmd = app.add_subcommand("judge", "Groundedness-judge each response");
  judge_cmd->add_option("--responses", judge.responses, "Response journal JSONL")->required();
  judge_cmd->add_option("--endpoint", judge.endpoint, "Judge endpoint base URL")->required();
  judge_cmd->add_option("--model", judge.model, "Judge model name");
  judge_cmd->add_option("--seed", judge.seed, "Seed for A/B order");
  judge_cmd->add_option("--api-key-env", judge.api_key_env, "Environment variable holding the API key");
  judge_cmd->add_option("--out", judge.out, "Judgments JSONL")->required();

  ReviewArgs review;
  auto* review_cmd = app.add_subcommand("review", "Human review of judge verdicts");
  review_cmd->add_option("--judgments", review.judgments, "Judgments JSONL")->required();
  review_cmd->add_option("--out", review.out, "Decisions JSONL (resumed if present)")->required();
  review_cmd->add_option("--script", review.script, "Answers file, one per line, instead of stdin");
  review_cmd->add_option("--seed", review.seed, "Seed for the Yes sample");
  review_cmd->add_option("--yes-sample", review.yes_sample, "Yes verdicts to spot-check");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute steerability metrics per response");
  metrics_cmd->add_option("--responses", metrics.responses, "Response journal JSONL")->required();
  metrics_cmd->add_option("--probe", metrics.probe, "Probe JSONL")->required();
  metrics_cmd->add_option("--decisions", metrics.decisions, "Review decisions; keep only grounded");
  metrics_cmd->add_flag("--binned", metrics.binned, "Include binned-metric variants");
  metrics_cmd->add_option("--out", metrics.out, "Metrics JSONL")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Aggregate metrics into a report and flow-field CSVs");
  report_cmd->add_option("--metrics", report.metrics, "Metrics JSONL")->required();
  report_cmd->add_option("--goalspace", report.goalspace, "Goal-space config JSON (for dimension names)");
  report_cmd->add_option("--grid", report.grid, "Flow-field grid cells per axis");
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  RlArgs rl;
  auto* rl_cmd = app.add_subcommand("rl-check", "Evaluate the RL objective on rollout groups");
  rl_cmd->add_option("--groups", rl.groups, "Rollout groups JSONL")->required();
  rl_cmd->add_option("--beta", rl.hp.beta, "KL coefficient");
  rl_cmd->add_option("--lambda", rl.hp.lambda_tau, "Margin regularizer weight");
  rl_cmd->add_option("--tau", rl.hp.tau, "Margin scale");
  rl_cmd->add_option("--k", rl.hp.k, "Rejection sample size (even)");
  rl_cmd->add_option("--pairs", rl.pairs, "Margin pairs: top-bottom or all-ordered");
  rl_cmd->add_option("--weight", rl.weight, "Sample weight when no classifier is given");
  rl_cmd->add_option("--classifier", rl.classifier, "Weight classifier JSON; weights groups by z0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*probe_cmd) return cmd_probe(pr);
    if (*run_cmd) return cmd_run(run);
    if (*judge_cmd) return cmd_judge(judge);
    if (*review_cmd) return cmd_review(review);
    if (*metrics_cmd) return cmd_metrics(metrics);
    if (*report_cmd) return cmd_report(report);
    if (*rl_cmd) return cmd_rl_check(rl);
  } catch (const steer::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == steer::ErrorKind::credential_error ? 4 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
