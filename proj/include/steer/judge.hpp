#pragma once

// LLM-as-judge groundedness filtering, human review, and per-dimension
// validity judging.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "steer/error.hpp"
#include "steer/llmrun.hpp"
#include "steer/random.hpp"

namespace steer {

enum class JudgeAnswer { Yes, No, None };

inline std::string_view to_string(JudgeAnswer a) {
  switch (a) {
    case JudgeAnswer::Yes: return "Yes";
    case JudgeAnswer::No: return "No";
    case JudgeAnswer::None: return "None";
  }
  return "None";
}

inline JudgeAnswer judge_answer_from_string(std::string_view s) {
  if (s == "Yes") return JudgeAnswer::Yes;
  if (s == "No") return JudgeAnswer::No;
  return JudgeAnswer::None;
}

struct JudgeVerdict {
  JudgeAnswer answer = JudgeAnswer::None;
  std::string rationale;
  bool order_flipped = false;
};

/// A/B prompt with the assignment recorded. order_flipped means version A is
/// the rewrite.
struct JudgePrompt {
  std::string text;
  bool order_flipped = false;
};

inline std::string substitute_versions(std::string_view tmpl, std::string_view a, std::string_view b) {
  std::string out(tmpl);
  auto replace = [&](std::string_view key, std::string_view value) {
    const auto pos = out.find(key);
    if (pos != std::string::npos) out.replace(pos, key.size(), value);
  };
  replace("$version_a", a);
  replace("$version_b", b);
  return out;
}

inline constexpr std::string_view kGroundednessTemplate =
    "You are an impartial judge comparing two texts. Your task is to determine whether these two "
    "texts could possibly be describing the same event or story, or otherwise be variations of the "
    "same text. The two texts may vary drastically in tone, formality, verbosity, length, or other "
    "aspects of style and wording, and can be drawn from a variety of sources, including but not "
    "limited to news articles, creative writing, social media, and others. However, the texts should "
    "very broadly discuss the same topics and/or events.\n\n"
    "**Version A:**\n$version_a\n\n"
    "**Version B:**\n$version_b\n\n"
    "Answer yes or no and provide a brief rationale (1-2 sentences). Return only a valid JSON object "
    "in the following format, with no additional commentary.\n\n"
    "```\n{\n    \"answer\": [Yes|No],\n    \"rationale\": [your reasoning],\n}\n```";

inline JudgePrompt render_groundedness_prompt(std::string_view original, std::string_view rewrite,
                                              Rng& rng) {
  if (original.empty() || rewrite.empty()) {
    throw Error(ErrorKind::invalid_argument, "groundedness prompt needs both texts");
  }
  JudgePrompt p;
  p.order_flipped = rng.coin();
  p.text = p.order_flipped ? substitute_versions(kGroundednessTemplate, rewrite, original)
                           : substitute_versions(kGroundednessTemplate, original, rewrite);
  return p;
}

namespace detail {

// Pull the outermost {...} object out of a response, dropping code fences and
// trailing commas so that near-JSON copies of the template still parse.
inline std::optional<nlohmann::json> extract_json_object(std::string_view text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  std::string body(text.substr(open, close - open + 1));
  static const std::regex trailing_comma(R"(,(\s*[}\]]))");
  body = std::regex_replace(body, trailing_comma, "$1");
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

inline std::string json_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace detail

inline JudgeVerdict parse_judge_response(std::string_view text, bool order_flipped = false) {
  JudgeVerdict v;
  v.order_flipped = order_flipped;
  auto classify = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return !std::isalpha(c); }), s.end());
    if (s == "yes") return JudgeAnswer::Yes;
    if (s == "no") return JudgeAnswer::No;
    return JudgeAnswer::None;
  };
  if (auto j = detail::extract_json_object(text)) {
    if (j->contains("answer")) {
      v.answer = classify(detail::json_text(j->at("answer")));
      v.rationale = j->contains("rationale") ? detail::json_text(j->at("rationale")) : "";
      if (v.answer != JudgeAnswer::None) return v;
    }
  }
  // regex fallback for unquoted values such as {"answer": Yes, ...}
  static const std::regex answer_re(R"re("?answer"?\s*:\s*"?\s*(yes|no)\b)re", std::regex::icase);
  static const std::regex rationale_re(R"re("?rationale"?\s*:\s*"?([^"\n}]*))re", std::regex::icase);
  const std::string s(text);
  std::smatch m;
  if (std::regex_search(s, m, answer_re)) {
    v.answer = classify(m[1].str());
    std::smatch r;
    if (std::regex_search(s, r, rationale_re)) {
      std::string rat = r[1].str();
      while (!rat.empty() && (rat.back() == ',' || std::isspace(static_cast<unsigned char>(rat.back())))) {
        rat.pop_back();
      }
      v.rationale = rat;
    }
    return v;
  }
  v.answer = JudgeAnswer::None;
  v.rationale.clear();
  return v;
}

/// Judge output linked to the response record it judges.
struct Judgment {
  std::string record_id;
  JudgeVerdict verdict;
  std::string original;
  std::string rewrite;

  nlohmann::json to_json() const {
    return {{"record_id", record_id},
            {"answer", std::string(to_string(verdict.answer))},
            {"rationale", verdict.rationale},
            {"order_flipped", verdict.order_flipped},
            {"original", original},
            {"rewrite", rewrite}};
  }

  static Judgment from_json(const nlohmann::json& j) {
    Judgment out;
    out.record_id = j.at("record_id").get<std::string>();
    out.verdict.answer = judge_answer_from_string(j.at("answer").get<std::string>());
    out.verdict.rationale = j.value("rationale", std::string());
    out.verdict.order_flipped = j.value("order_flipped", false);
    out.original = j.value("original", std::string());
    out.rewrite = j.value("rewrite", std::string());
    return out;
  }
};

inline std::vector<Judgment> read_judgments(std::istream& in) {
  std::vector<Judgment> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(Judgment::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

inline constexpr std::size_t kReviewedYesSample = 16;

/// Indices (into `judgments`) needing human review: every No/None plus a
/// seeded sample of 16 Yes verdicts, in input order.
inline std::vector<std::size_t> build_review_queue(const std::vector<Judgment>& judgments, Rng& rng,
                                                   std::size_t yes_sample = kReviewedYesSample) {
  std::vector<std::size_t> flagged;
  std::vector<std::size_t> yes;
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    (judgments[i].verdict.answer == JudgeAnswer::Yes ? yes : flagged).push_back(i);
  }
  for (std::size_t i = 0; i < std::min(yes_sample, yes.size()); ++i) {
    std::swap(yes[i], yes[i + rng.below(yes.size() - i)]);
  }
  yes.resize(std::min(yes_sample, yes.size()));
  std::vector<std::size_t> queue = flagged;
  queue.insert(queue.end(), yes.begin(), yes.end());
  std::sort(queue.begin(), queue.end());
  return queue;
}

enum class HumanAction { approve, overrule };
enum class FinalDecision { grounded, rejected };

inline std::string_view to_string(FinalDecision d) {
  return d == FinalDecision::grounded ? "grounded" : "rejected";
}

struct ReviewDecision {
  std::string record_id;
  JudgeAnswer verdict = JudgeAnswer::None;
  std::optional<HumanAction> human_override;
  FinalDecision final = FinalDecision::rejected;

  nlohmann::json to_json() const {
    nlohmann::json j{{"record_id", record_id},
                     {"verdict", std::string(to_string(verdict))},
                     {"final", std::string(to_string(final))}};
    j["human_override"] = human_override
                              ? nlohmann::json(*human_override == HumanAction::approve ? "approve" : "overrule")
                              : nlohmann::json(nullptr);
    return j;
  }

  static ReviewDecision from_json(const nlohmann::json& j) {
    ReviewDecision d;
    d.record_id = j.at("record_id").get<std::string>();
    d.verdict = judge_answer_from_string(j.value("verdict", std::string("None")));
    if (j.contains("human_override") && !j.at("human_override").is_null()) {
      d.human_override = j.at("human_override").get<std::string>() == "approve" ? HumanAction::approve
                                                                               : HumanAction::overrule;
    }
    d.final = j.at("final").get<std::string>() == "grounded" ? FinalDecision::grounded
                                                             : FinalDecision::rejected;
    return d;
  }
};

/// Approving keeps the judge's call; overruling flips it. None counts as No.
inline FinalDecision decide(JudgeAnswer verdict, std::optional<HumanAction> action) {
  const bool judge_grounded = verdict == JudgeAnswer::Yes;
  const bool grounded = action == HumanAction::overrule ? !judge_grounded : judge_grounded;
  return grounded ? FinalDecision::grounded : FinalDecision::rejected;
}

inline std::map<std::string, ReviewDecision> read_decisions(const std::string& path) {
  std::map<std::string, ReviewDecision> out;
  std::ifstream in(path);
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto d = ReviewDecision::from_json(nlohmann::json::parse(line));
    out[d.record_id] = std::move(d);
  }
  return out;
}

/// Terminal (or scripted) review dialog.
///
/// Reads one answer per queued item from `in` ("a"/"approve" or
/// "o"/"overrule"); the same stream contract serves an attached terminal and a
/// script file, so both produce identical transcripts and decision files. The
/// decisions file is rewritten atomically after every answer and previously
/// decided items are skipped on restart. Yes verdicts outside the queue are
/// recorded as grounded without override.
class ReviewSession {
 public:
  ReviewSession(std::vector<Judgment> judgments, std::vector<std::size_t> queue, std::string decisions_path)
      : judgments_(std::move(judgments)), queue_(std::move(queue)), path_(std::move(decisions_path)) {
    decisions_ = read_decisions(path_);
    const std::set<std::size_t> queued(queue_.begin(), queue_.end());
    for (std::size_t i = 0; i < judgments_.size(); ++i) {
      const auto& j = judgments_[i];
      if (queued.count(i) == 0 && j.verdict.answer == JudgeAnswer::Yes && !decisions_.count(j.record_id)) {
        decisions_[j.record_id] = {j.record_id, j.verdict.answer, std::nullopt, FinalDecision::grounded};
      }
    }
  }

  /// Returns true when every queued item has a decision.
  bool run(std::istream& in, std::ostream& out) {
    save();
    std::size_t position = 0;
    for (auto idx : queue_) {
      ++position;
      const auto& j = judgments_[idx];
      if (decisions_.count(j.record_id)) continue;
      out << "=== Review " << position << "/" << queue_.size() << " (record " << j.record_id << ") ===\n"
          << "--- Original ---\n" << j.original << "\n"
          << "--- Rewrite ---\n" << j.rewrite << "\n"
          << "--- Judge decision: " << to_string(j.verdict.answer) << " ---\n"
          << "Rationale: " << j.verdict.rationale << "\n";
      std::optional<HumanAction> action;
      while (!action) {
        out << "[a]pprove or [o]verrule? ";
        std::string answer;
        if (!std::getline(in, answer)) {
          out << "\nSession ended; " << decided_in_queue() << " of " << queue_.size() << " reviewed.\n";
          return false;
        }
        answer.erase(0, answer.find_first_not_of(" \t\r"));
        answer.erase(answer.find_last_not_of(" \t\r") + 1);
        if (answer == "a" || answer == "approve") action = HumanAction::approve;
        else if (answer == "o" || answer == "overrule") action = HumanAction::overrule;
        else out << "Please answer 'a' or 'o'.\n";
      }
      const auto final = decide(j.verdict.answer, action);
      decisions_[j.record_id] = {j.record_id, j.verdict.answer, action, final};
      out << "-> " << to_string(final) << "\n\n";
      save();
    }
    out << "Review complete: " << queue_.size() << " items.\n";
    return true;
  }

  std::vector<ReviewDecision> decisions() const {
    std::vector<ReviewDecision> out;
    for (const auto& j : judgments_) {
      auto it = decisions_.find(j.record_id);
      if (it != decisions_.end()) out.push_back(it->second);
    }
    return out;
  }

 private:
  std::size_t decided_in_queue() const {
    std::size_t n = 0;
    for (auto idx : queue_) n += decisions_.count(judgments_[idx].record_id);
    return n;
  }

  void save() const {
    const std::string tmp = path_ + ".tmp";
    {
      std::ofstream f(tmp, std::ios::trunc);
      if (!f) throw Error(ErrorKind::io_error, "cannot write " + tmp);
      for (const auto& d : decisions()) f << d.to_json().dump() << '\n';
    }
    std::filesystem::rename(tmp, path_);
  }

  std::vector<Judgment> judgments_;
  std::vector<std::size_t> queue_;
  std::string path_;
  std::map<std::string, ReviewDecision> decisions_;
};

/// Ask the judge endpoint about one (original, rewrite) pair. Greedy decoding.
/// An empty rewrite or an exhausted transport yields a None verdict; the
/// reason goes into the rationale.
inline Judgment judge_pair(const std::string& record_id, const std::string& original, const std::string& rewrite,
                           ChatTransport& transport, const std::string& model, Rng& rng,
                           const RetryPolicy& retry = {}) {
  Judgment j{record_id, {}, original, rewrite};
  if (original.empty() || rewrite.empty()) {
    j.verdict.rationale = "empty text";
    return j;
  }
  const auto prompt = render_groundedness_prompt(original, rewrite, rng);
  j.verdict.order_flipped = prompt.order_flipped;
  try {
    const auto reply = complete(transport, model, prompt.text, DecodingConfig::greedy(), retry);
    j.verdict = parse_judge_response(reply.text, prompt.order_flipped);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::transport_failure) throw;
    j.verdict.answer = JudgeAnswer::None;
    j.verdict.rationale = e.what();
  }
  return j;
}

// ----- goal-dimension validity judging -----

enum class Preference { A, B, Tie };

inline std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::A: return "A";
    case Preference::B: return "B";
    case Preference::Tie: return "Tie";
  }
  return "";
}

/// Judge-JSON keys in goal-space dimension order.
inline constexpr std::array<std::string_view, 4> kDimensionJudgeKeys{
    "higher_reading_difficulty", "higher_formality", "higher_textual_diversity", "higher_text_length"};

inline constexpr std::string_view kDimensionJudgeTemplate =
    "You are an impartial judge comparing two versions of a particular text.\n\n"
    "**Version A:**\n$version_a\n\n"
    "**Version B:**\n$version_b\n\n"
    "Please evaluate the two versions by answering the following questions.\n\n"
    "**Questions:**\n"
    "* Which version is harder to read?\n"
    "* Which version uses more diverse language?\n"
    "* Which version is more verbose?\n"
    "* Which version is more formal?\n\n"
    "For all questions, you may answer \"A\", \"B\", or \"Tie,\" and provide a brief rationale (1-2 "
    "sentences). Return only a valid JSON object in the following format, with no additional "
    "commentary.\n\n"
    "```\n{\n"
    "    \"higher_reading_difficulty\": {\"answer\": [A|B|Tie], \"rationale\": [your reasoning]},\n"
    "    \"higher_textual_diversity\": {\"answer\": [A|B|Tie], \"rationale\": [your reasoning]},\n"
    "    \"higher_text_length\": {\"answer\": [A|B|Tie], \"rationale\": [your reasoning]},\n"
    "    \"higher_formality\": {\"answer\": [A|B|Tie], \"rationale\": [your reasoning]},\n"
    "}\n```";

inline JudgePrompt render_dimension_judge_prompt(std::string_view original, std::string_view rewrite,
                                                 Rng& rng) {
  if (original.empty() || rewrite.empty()) {
    throw Error(ErrorKind::invalid_argument, "dimension judge prompt needs both texts");
  }
  JudgePrompt p;
  p.order_flipped = rng.coin();
  p.text = p.order_flipped ? substitute_versions(kDimensionJudgeTemplate, rewrite, original)
                           : substitute_versions(kDimensionJudgeTemplate, original, rewrite);
  return p;
}

struct DimensionJudgment {
  std::optional<Preference> answer;  // canonical: A = original, B = rewrite
  std::string rationale;
};

/// Parse the four answers and undo the A/B flip so that A always denotes the
/// original text. Missing or malformed entries come back empty.
inline std::array<DimensionJudgment, 4> parse_dimension_judgments(std::string_view text, bool order_flipped) {
  std::array<DimensionJudgment, 4> out{};
  const auto j = detail::extract_json_object(text);
  if (!j) return out;
  for (std::size_t d = 0; d < kDimensionJudgeKeys.size(); ++d) {
    const std::string key(kDimensionJudgeKeys[d]);
    if (!j->contains(key) || !j->at(key).is_object()) continue;
    const auto& entry = j->at(key);
    if (!entry.contains("answer")) continue;
    std::string a = detail::json_text(entry.at("answer"));
    a.erase(std::remove_if(a.begin(), a.end(), [](unsigned char c) { return !std::isalpha(c); }), a.end());
    std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::tolower(c); });
    std::optional<Preference> p;
    if (a == "a") p = Preference::A;
    else if (a == "b") p = Preference::B;
    else if (a == "tie") p = Preference::Tie;
    if (!p) continue;
    if (order_flipped && *p != Preference::Tie) p = *p == Preference::A ? Preference::B : Preference::A;
    out[d].answer = p;
    out[d].rationale = entry.contains("rationale") ? detail::json_text(entry.at("rationale")) : "";
  }
  return out;
}

/// Judge preference as the sign of (rewrite - original): B -> +1, A -> -1.
inline double preference_sign(Preference p) {
  switch (p) {
    case Preference::A: return -1.0;
    case Preference::B: return 1.0;
    case Preference::Tie: return 0.0;
  }
  return 0.0;
}

}  // namespace steer
