#pragma once

// Chat-completions driver: request building, transport retries, response
// post-processing, journaled probe runs and best-of-N selection.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/probegen.hpp"
#include "steer/promptgen.hpp"
#include "steer/resources.hpp"
#include "steer/steermetrics.hpp"
#include "steer/strategy.hpp"

namespace steer {

enum class DecodingMode { greedy, sampled };

struct DecodingConfig {
  DecodingMode mode = DecodingMode::greedy;
  double temperature = 0.0;
  std::optional<double> min_p;
  double frequency_penalty = 0.0;
  std::size_t max_context_tokens = 32000;
  std::optional<std::size_t> max_tokens;

  static DecodingConfig greedy() { return {}; }

  static DecodingConfig sampled() {
    DecodingConfig d;
    d.mode = DecodingMode::sampled;
    d.temperature = 1.0;
    d.min_p = 0.2;
    d.frequency_penalty = 0.1;
    return d;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"mode", mode == DecodingMode::greedy ? "greedy" : "sampled"},
                     {"temperature", temperature},
                     {"frequency_penalty", frequency_penalty},
                     {"max_context_tokens", max_context_tokens}};
    j["min_p"] = min_p ? nlohmann::json(*min_p) : nlohmann::json(nullptr);
    j["max_tokens"] = max_tokens ? nlohmann::json(*max_tokens) : nlohmann::json(nullptr);
    return j;
  }

  static DecodingConfig from_json(const nlohmann::json& j) {
    DecodingConfig d;
    d.mode = j.at("mode").get<std::string>() == "greedy" ? DecodingMode::greedy : DecodingMode::sampled;
    d.temperature = j.at("temperature").get<double>();
    d.frequency_penalty = j.value("frequency_penalty", 0.0);
    d.max_context_tokens = j.value("max_context_tokens", std::size_t{32000});
    if (j.contains("min_p") && !j.at("min_p").is_null()) d.min_p = j.at("min_p").get<double>();
    if (j.contains("max_tokens") && !j.at("max_tokens").is_null()) {
      d.max_tokens = j.at("max_tokens").get<std::size_t>();
    }
    return d;
  }
};

/// status 0 means the request never produced an HTTP response.
struct HttpReply {
  int status = 0;
  std::string body;
  std::string error;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual HttpReply post_chat(const nlohmann::json& request) = 0;
};

/// In-process endpoint for tests and dry runs.
class MockTransport : public ChatTransport {
 public:
  using Handler = std::function<HttpReply(const nlohmann::json&)>;

  explicit MockTransport(Handler handler) : handler_(std::move(handler)) {}

  HttpReply post_chat(const nlohmann::json& request) override {
    ++calls_;
    return handler_(request);
  }

  std::size_t calls() const { return calls_.load(); }

  static HttpReply completion(std::string_view content) {
    const nlohmann::json body{
        {"object", "chat.completion"},
        {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}},
                      {"finish_reason", "stop"}}}}};
    return {200, body.dump(), ""};
  }

  /// Echo the user message back as the completion.
  static MockTransport echo() {
    return MockTransport([](const nlohmann::json& req) {
      return completion(req.at("messages").back().at("content").get<std::string>());
    });
  }

 private:
  Handler handler_;
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  static RetryPolicy immediate(int retries = 5) {
    RetryPolicy p;
    p.max_retries = retries;
    p.base_delay = std::chrono::milliseconds{0};
    p.sleep = [](std::chrono::milliseconds) {};
    return p;
  }
};

struct CompletionResult {
  std::string text;
  int transport_retries = 0;
  std::optional<bool> min_p_acknowledged;  // empty when min_p was not requested
};

inline nlohmann::json build_chat_request(const std::string& model, const std::string& message,
                                         const DecodingConfig& decoding, bool include_min_p = true) {
  nlohmann::json req{{"model", model},
                     {"messages", {{{"role", "user"}, {"content", message}}}},
                     {"temperature", decoding.temperature},
                     {"frequency_penalty", decoding.frequency_penalty}};
  if (decoding.min_p && include_min_p) req["min_p"] = *decoding.min_p;
  if (decoding.max_tokens) req["max_tokens"] = *decoding.max_tokens;
  return req;
}

namespace detail {

inline bool is_auth_failure(int status) { return status == 401 || status == 403; }

// Servers that do not implement min_p reject the field with a 400 naming it.
inline bool rejects_min_p(const HttpReply& reply) {
  return reply.status == 400 && reply.body.find("min_p") != std::string::npos;
}

inline std::optional<std::string> extract_content(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || !j.at("choices").is_array() ||
      j.at("choices").empty()) {
    return std::nullopt;
  }
  const auto& choice = j.at("choices").at(0);
  if (choice.contains("message")) {
    const auto& content = choice.at("message").value("content", nlohmann::json(nullptr));
    return content.is_string() ? content.get<std::string>() : std::string();
  }
  if (choice.contains("text") && choice.at("text").is_string()) return choice.at("text").get<std::string>();
  return std::nullopt;
}

}  // namespace detail

/// One logical model call. HTTP 4XX/5XX and connection failures are retried
/// with exponential backoff; any parseable completion, even an empty one, is
/// returned as-is.
inline CompletionResult complete(ChatTransport& transport, const std::string& model,
                                 const std::string& message, const DecodingConfig& decoding,
                                 const RetryPolicy& retry = {}) {
  CompletionResult result;
  bool send_min_p = decoding.min_p.has_value();
  if (send_min_p) result.min_p_acknowledged = true;
  std::string last_error;
  for (int attempt = 0;; ++attempt) {
    const auto reply = transport.post_chat(build_chat_request(model, message, decoding, send_min_p));
    if (detail::is_auth_failure(reply.status)) {
      throw Error(ErrorKind::credential_error, "HTTP " + std::to_string(reply.status) + ": " + reply.body);
    }
    if (send_min_p && detail::rejects_min_p(reply)) {
      // not a transport failure: resend without the unsupported field
      send_min_p = false;
      result.min_p_acknowledged = false;
      --attempt;
      continue;
    }
    if (reply.status >= 200 && reply.status < 300) {
      if (auto content = detail::extract_content(reply.body)) {
        result.text = std::move(*content);
        result.transport_retries = attempt;
        return result;
      }
      last_error = "unparseable completion body";
    } else if (reply.status == 0) {
      last_error = "connection failure: " + reply.error;
    } else {
      last_error = "HTTP " + std::to_string(reply.status);
    }
    if (attempt >= retry.max_retries) {
      throw Error(ErrorKind::transport_failure,
                  last_error + " after " + std::to_string(attempt) + " retries");
    }
    auto delay = retry.base_delay * (std::int64_t{1} << std::min(attempt, 20));
    retry.sleep(std::min(delay, retry.max_delay));
  }
}

/// Leading-boilerplate regexes, one per line.
class BoilerplatePatterns {
 public:
  static BoilerplatePatterns parse(std::string_view lines) {
    BoilerplatePatterns p;
    std::istringstream in{std::string(lines)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      p.patterns_.emplace_back(line, std::regex::ECMAScript | std::regex::icase);
    }
    return p;
  }

  static const BoilerplatePatterns& bundled() {
    static const BoilerplatePatterns p = parse(resources::kBoilerplatePatterns);
    return p;
  }

  std::string strip(std::string text) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& re : patterns_) {
        std::smatch m;
        if (std::regex_search(text, m, re, std::regex_constants::match_continuous) &&
            m.length(0) > 0) {
          text.erase(0, static_cast<std::size_t>(m.length(0)));
          changed = true;
        }
      }
    }
    return text;
  }

  std::size_t size() const { return patterns_.size(); }

 private:
  std::vector<std::regex> patterns_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string remove_think_blocks(std::string text) {
  static const std::regex closed(R"(<think>[\s\S]*?</think>)", std::regex::icase);
  text = std::regex_replace(text, closed, "");
  // a dangling close tag means the opening tag was consumed by the template
  const auto close = text.find("</think>");
  if (close != std::string::npos) text.erase(0, close + 8);
  return text;
}

}  // namespace detail

/// Clean a raw completion into the candidate rewrite.
inline std::string postprocess(const std::string& raw, const PromptStrategy& strategy,
                               const BoilerplatePatterns& patterns = BoilerplatePatterns::bundled()) {
  std::string text = detail::remove_think_blocks(raw);
  if (strategy.kind == PromptKind::chain_of_thought) {
    static const std::regex marker(R"((^|\n)[ \t]*#+[ \t]*\**[ \t]*rewritten text[ \t]*\**[ \t]*:?[ \t]*(\n|$))",
                                   std::regex::icase);
    std::smatch last;
    bool found = false;
    for (std::sregex_iterator it(text.begin(), text.end(), marker), end; it != end; ++it) {
      last = *it;
      found = true;
    }
    if (!found) throw Error(ErrorKind::extraction_failure, "no '## Rewritten text' section");
    text = text.substr(static_cast<std::size_t>(last.position(0) + last.length(0)));
  }
  text = patterns.strip(detail::trim(text));
  text = detail::trim(text);
  if (text.size() >= 3 && text.compare(text.size() - 3, 3, "```") == 0) {
    text = detail::trim(text.substr(0, text.size() - 3));
  }
  return text;
}

enum class FilterStatus { pending, grounded, rejected };

inline std::string_view to_string(FilterStatus s) {
  switch (s) {
    case FilterStatus::pending: return "pending";
    case FilterStatus::grounded: return "grounded";
    case FilterStatus::rejected: return "rejected";
  }
  return "";
}

inline FilterStatus filter_status_from_string(std::string_view s) {
  if (s == "pending") return FilterStatus::pending;
  if (s == "grounded") return FilterStatus::grounded;
  if (s == "rejected") return FilterStatus::rejected;
  throw Error(ErrorKind::parse_error, "unknown filter status " + std::string(s));
}

struct ResponseRecord {
  std::size_t item_id = 0;
  std::size_t attempt_index = 0;
  std::string strategy;
  DecodingConfig decoding;
  std::string prompt;
  std::string source_text;
  std::string raw_text;
  std::string rewrite_text;
  std::optional<GoalVector> z_hat;
  int transport_retries = 0;
  std::optional<bool> min_p_acknowledged;
  FilterStatus status = FilterStatus::pending;
  std::string reason;  // set when rejected

  std::string record_id() const {
    return std::to_string(item_id) + ":" + std::to_string(attempt_index);
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"record_id", record_id()},
                     {"item_id", item_id},
                     {"attempt_index", attempt_index},
                     {"strategy", strategy},
                     {"decoding", decoding.to_json()},
                     {"prompt", prompt},
                     {"source_text", source_text},
                     {"raw_text", raw_text},
                     {"rewrite_text", rewrite_text},
                     {"transport_retries", transport_retries},
                     {"filter_status", std::string(to_string(status))},
                     {"reason", reason}};
    j["z_hat"] = z_hat ? nlohmann::json(*z_hat) : nlohmann::json(nullptr);
    j["min_p_acknowledged"] =
        min_p_acknowledged ? nlohmann::json(*min_p_acknowledged) : nlohmann::json(nullptr);
    return j;
  }

  static ResponseRecord from_json(const nlohmann::json& j) {
    ResponseRecord r;
    r.item_id = j.at("item_id").get<std::size_t>();
    r.attempt_index = j.at("attempt_index").get<std::size_t>();
    r.strategy = j.value("strategy", std::string());
    if (j.contains("decoding")) r.decoding = DecodingConfig::from_json(j.at("decoding"));
    r.prompt = j.value("prompt", std::string());
    r.source_text = j.value("source_text", std::string());
    r.raw_text = j.value("raw_text", std::string());
    r.rewrite_text = j.value("rewrite_text", std::string());
    if (j.contains("z_hat") && !j.at("z_hat").is_null()) r.z_hat = j.at("z_hat").get<GoalVector>();
    r.transport_retries = j.value("transport_retries", 0);
    if (j.contains("min_p_acknowledged") && !j.at("min_p_acknowledged").is_null()) {
      r.min_p_acknowledged = j.at("min_p_acknowledged").get<bool>();
    }
    r.status = filter_status_from_string(j.value("filter_status", std::string("pending")));
    r.reason = j.value("reason", std::string());
    return r;
  }
};

inline std::vector<ResponseRecord> read_responses(std::istream& in) {
  std::vector<ResponseRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ResponseRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

/// Text -> goal vector, or nothing when some metric is undefined for the text.
using GoalMapper = std::function<std::optional<GoalVector>(std::string_view)>;

inline GoalMapper goalspace_mapper(GoalSpaceConfig config) {
  return [config = std::move(config)](std::string_view text) -> std::optional<GoalVector> {
    try {
      return map_to_goalspace(text, config);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
}

struct AttemptContext {
  ChatTransport* transport = nullptr;
  std::string model;
  std::optional<PromptStrategy> strategy_override;
  DecodingConfig decoding;
  RetryPolicy retry;
  GoalMapper mapper;
  std::vector<std::string> dimension_ids;
  std::vector<std::string> instructions;
};

/// Render, send and post-process one (item, attempt). Transport failures come
/// back as rejected records; credential errors propagate.
inline ResponseRecord run_attempt(const ProbeItem& item, std::size_t attempt_index,
                                  const AttemptContext& ctx) {
  const PromptStrategy strategy = ctx.strategy_override.value_or(item.strategy);
  ResponseRecord rec;
  rec.item_id = item.item_id;
  rec.attempt_index = attempt_index;
  rec.strategy = strategy.id();
  rec.decoding = ctx.decoding;
  Rng rng(item.rng_seed);
  const auto prompt = render_prompt(item, strategy, ctx.dimension_ids, rng, ctx.instructions);
  rec.prompt = compose_message(prompt, item.source_text);
  rec.source_text = item.source_text;
  try {
    auto result = complete(*ctx.transport, ctx.model, rec.prompt, ctx.decoding, ctx.retry);
    rec.raw_text = std::move(result.text);
    rec.transport_retries = result.transport_retries;
    rec.min_p_acknowledged = result.min_p_acknowledged;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::transport_failure) throw;
    rec.status = FilterStatus::rejected;
    rec.reason = e.what();
    rec.transport_retries = ctx.retry.max_retries;
    return rec;
  }
  try {
    rec.rewrite_text = postprocess(rec.raw_text, strategy);
  } catch (const Error& e) {
    rec.status = FilterStatus::rejected;
    rec.reason = e.what();
    return rec;
  }
  if (ctx.mapper) rec.z_hat = ctx.mapper(rec.rewrite_text);
  return rec;
}

/// Append-only JSONL journal of response records keyed by record id.
class Journal {
 public:
  explicit Journal(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    bool needs_newline = false;
    if (in) {
      in.seekg(0, std::ios::end);
      if (in.tellg() > 0) {
        in.seekg(-1, std::ios::end);
        needs_newline = in.get() != '\n';
      }
      in.seekg(0);
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;  // torn final line from an interrupted write
        auto rec = ResponseRecord::from_json(j);
        done_[rec.record_id()] = std::move(rec);
      }
    }
    out_.open(path_, std::ios::app);
    if (!out_) throw Error(ErrorKind::io_error, "cannot open journal " + path_);
    if (needs_newline) out_ << '\n';  // keep new records off a torn last line
  }

  bool contains(const std::string& record_id) const {
    std::lock_guard lock(mu_);
    return done_.count(record_id) != 0;
  }

  std::optional<ResponseRecord> find(const std::string& record_id) const {
    std::lock_guard lock(mu_);
    auto it = done_.find(record_id);
    if (it == done_.end()) return std::nullopt;
    return it->second;
  }

  void append(const ResponseRecord& rec) {
    std::lock_guard lock(mu_);
    out_ << rec.to_json().dump() << '\n';
    out_.flush();
    done_[rec.record_id()] = rec;
  }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::map<std::string, ResponseRecord> done_;
};

struct RunOptions {
  std::size_t attempts = 1;   // responses per item
  std::size_t parallel = 4;   // max in-flight requests
  std::optional<std::string> journal_path;
};

/// Run every (item, attempt) of the probe. Output is ordered by item then
/// attempt regardless of completion order; journaled records are not re-sent.
inline std::vector<ResponseRecord> run_probe(const std::vector<ProbeItem>& items,
                                             const AttemptContext& ctx, const RunOptions& opts) {
  std::optional<Journal> journal;
  if (opts.journal_path) journal.emplace(*opts.journal_path);

  const std::size_t total = items.size() * opts.attempts;
  std::vector<std::optional<ResponseRecord>> results(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex err_mu;
  std::optional<Error> fatal;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const auto& item = items[task / opts.attempts];
      const std::size_t attempt = task % opts.attempts;
      const std::string id = std::to_string(item.item_id) + ":" + std::to_string(attempt);
      if (journal) {
        if (auto prev = journal->find(id)) {
          results[task] = std::move(*prev);
          continue;
        }
      }
      try {
        auto rec = run_attempt(item, attempt, ctx);
        if (journal) journal->append(rec);
        results[task] = std::move(rec);
      } catch (const Error& e) {
        std::lock_guard lock(err_mu);
        if (!fatal) fatal = e;
        abort = true;
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.parallel, total));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (fatal) throw *fatal;

  std::vector<ResponseRecord> out;
  out.reserve(total);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

/// Lowest steering error among records with a goal vector; ties go to the
/// lowest attempt index.
inline std::optional<std::size_t> select_best(const std::vector<ResponseRecord>& candidates,
                                              const GoalVector& z_star) {
  std::optional<std::size_t> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.status == FilterStatus::rejected || !c.z_hat) continue;
    const double err = steering_error(z_star, *c.z_hat);
    if (err < best_err ||
        (err == best_err && best && c.attempt_index < candidates[*best].attempt_index)) {
      best_err = err;
      best = i;
    }
  }
  return best;
}

struct BestOfN {
  ResponseRecord best;
  std::vector<ResponseRecord> all;
};

inline BestOfN best_of_n(const ProbeItem& item, const AttemptContext& ctx, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "best-of-N needs n >= 1");
  BestOfN out;
  for (std::size_t a = 0; a < n; ++a) out.all.push_back(run_attempt(item, a, ctx));
  const auto idx = select_best(out.all, item.z_star);
  if (!idx) throw Error(ErrorKind::no_valid_candidate, "item " + std::to_string(item.item_id));
  out.best = out.all[*idx];
  return out;
}

/// Per-item best records from a flat run (items without a valid candidate are
/// represented by their first attempt, unchanged).
inline std::vector<ResponseRecord> select_best_per_item(const std::vector<ResponseRecord>& records,
                                                        const std::vector<ProbeItem>& items) {
  std::map<std::size_t, std::vector<ResponseRecord>> by_item;
  for (const auto& r : records) by_item[r.item_id].push_back(r);
  std::vector<ResponseRecord> out;
  for (const auto& item : items) {
    auto it = by_item.find(item.item_id);
    if (it == by_item.end()) continue;
    const auto idx = select_best(it->second, item.z_star);
    if (idx) {
      out.push_back(it->second[*idx]);
    } else {
      auto first = it->second.front();
      if (first.status != FilterStatus::rejected) {
        first.status = FilterStatus::rejected;
        first.reason = std::string(to_string(ErrorKind::no_valid_candidate));
      }
      out.push_back(std::move(first));
    }
  }
  return out;
}

}  // namespace steer
