#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "steer/error.hpp"
#include "steer/goalspace.hpp"
#include "steer/probegen.hpp"
#include "steer/random.hpp"
#include "steer/resources.hpp"
#include "steer/strategy.hpp"

namespace steer {

enum class Modifier { slightly, none, much };

/// "slightly" below 0.2, "much" above 0.5, nothing in between.
inline Modifier modifier_for(double delta) {
  const double mag = std::abs(delta);
  if (mag < kMinOffset || mag > kMaxOffset) {
    throw Error(ErrorKind::out_of_range, "|delta| must be within [0.1, 0.7]");
  }
  if (mag < kSlightCut) return Modifier::slightly;
  if (mag > kMuchCut) return Modifier::much;
  return Modifier::none;
}

struct PhraseTemplates {
  std::string increase;
  std::string decrease;
  std::string prefix;  // words placed before the modifier, e.g. "use "
};

/// Prompt wording per dimension plus the instruction and vague-phrase pools.
class PromptResources {
 public:
  static const PromptResources& bundled() {
    static const PromptResources res =
        PromptResources(resources::kInstructions, resources::kUnderspecifiedPhrases);
    return res;
  }

  PromptResources(std::string_view instructions_tsv, std::string_view underspecified_lines) {
    phrases_ = {
        {"reading_difficulty", {"harder to read", "easier to read", ""}},
        {"formality", {"more formal", "less formal", ""}},
        {"textual_diversity", {"more diverse language", "less diverse language", "use "}},
        {"text_length", {"longer", "shorter", ""}},
    };
    std::istringstream in{std::string(instructions_tsv)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto t1 = line.find('\t');
      const auto t2 = line.find('\t', t1 + 1);
      if (t1 == std::string::npos || t2 == std::string::npos) {
        throw Error(ErrorKind::parse_error, "instruction line needs 3 columns: " + line);
      }
      const bool up = line.substr(t1 + 1, t2 - t1 - 1) == "+";
      instructions_[{line.substr(0, t1), up}].push_back(line.substr(t2 + 1));
    }
    std::istringstream vin{std::string(underspecified_lines)};
    while (std::getline(vin, line)) {
      if (!line.empty() && line[0] != '#') vague_.push_back(line);
    }
  }

  const PhraseTemplates& phrase(const std::string& dimension) const {
    auto it = phrases_.find(dimension);
    if (it == phrases_.end()) throw Error(ErrorKind::unknown_dimension, dimension);
    return it->second;
  }

  const std::vector<std::string>& instructions(const std::string& dimension, bool increase) const {
    static const std::vector<std::string> empty;
    auto it = instructions_.find({dimension, increase});
    return it == instructions_.end() ? empty : it->second;
  }

  const std::vector<std::string>& vague_phrases() const { return vague_; }

 private:
  std::map<std::string, PhraseTemplates> phrases_;
  std::map<std::pair<std::string, bool>, std::vector<std::string>> instructions_;
  std::vector<std::string> vague_;
};

inline constexpr std::string_view kRewriteLead = "Please rewrite the following";
inline constexpr std::string_view kRespondOnly =
    "Respond with only the rewritten text and do not explain your response.";
inline constexpr std::string_view kNegativeClause =
    "You MUST not change anything else about the other parts of the text, even if it makes the "
    "rewritten text sound unnatural or otherwise awkward.";
inline constexpr std::string_view kCotScaffold =
    "Before outputting the rewritten text, propose and discuss a few concrete edits you might "
    "apply to this specific text using the following format and replacing the placeholders in "
    "[]:\n\n## Edits\n\n[your proposed edits]\n\n## Rewritten text\n\n[your rewritten text]";
inline constexpr std::string_view kInstructionLead = "Some ways that you can do so might include:";

struct RenderedPrompt {
  std::string text;
  std::vector<std::size_t> slot_order;  // dimension indices in the order they appear
  PromptStrategy strategy;
};

/// Full user message: instruction followed by the source text.
inline std::string compose_message(const RenderedPrompt& prompt, std::string_view source_text) {
  return prompt.text + "\n\n" + std::string(source_text);
}

inline std::string direction_phrase(const PhraseTemplates& p, double delta) {
  std::string out = p.prefix;
  switch (modifier_for(delta)) {
    case Modifier::slightly: out += "slightly "; break;
    case Modifier::much: out += "much "; break;
    case Modifier::none: break;
  }
  out += delta > 0 ? p.increase : p.decrease;
  return out;
}

inline std::string join_slots(const std::vector<std::string>& parts) {
  if (parts.empty()) return "";
  if (parts.size() == 1) return parts[0];
  if (parts.size() == 2) return parts[0] + " and " + parts[1];
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    if (i + 1 == parts.size()) out += "and ";
    out += parts[i];
  }
  return out;
}

/// Render a rewriting instruction for one probe item.
///
/// `dimension_ids` gives the goal-space dimension order of the item vectors.
/// Instruction kinds pick one bundled instruction per active dimension unless
/// `instructions` is non-empty.
inline RenderedPrompt render_prompt(const ProbeItem& item, const PromptStrategy& strategy,
                                    const std::vector<std::string>& dimension_ids, Rng& rng,
                                    const std::vector<std::string>& instructions = {},
                                    const PromptResources& res = PromptResources::bundled()) {
  if (strategy.negative && !names_dimensions(strategy.kind)) {
    throw Error(ErrorKind::invalid_strategy, "negative prompting is undefined for " + strategy.id());
  }
  if (dimension_ids.size() != item.active.size()) {
    throw Error(ErrorKind::invalid_argument, "dimension ids do not match the item");
  }
  RenderedPrompt out;
  out.strategy = strategy;
  for (std::size_t d = 0; d < item.active.size(); ++d) {
    if (item.active[d]) out.slot_order.push_back(d);
  }
  rng.shuffle(out.slot_order);

  std::string text(kRewriteLead);
  if (strategy.kind == PromptKind::underspecified) {
    const auto& vague = res.vague_phrases();
    if (vague.empty()) throw Error(ErrorKind::invalid_argument, "no underspecified phrases");
    text += ", but make it " + vague[rng.below(vague.size())] + ". ";
    text += kRespondOnly;
    out.slot_order.clear();
    out.text = std::move(text);
    return out;
  }

  if (names_dimensions(strategy.kind)) {
    std::vector<std::string> parts;
    for (auto d : out.slot_order) {
      parts.push_back(direction_phrase(res.phrase(dimension_ids[d]), item.deltas[d]));
    }
    text += ", but make it " + join_slots(parts) + ".";
  } else {
    text += ".";
    out.slot_order.clear();
  }
  if (strategy.negative) {
    text += " ";
    text += kNegativeClause;
  }
  text += " ";
  text += kRespondOnly;

  if (strategy.kind == PromptKind::instruction_only ||
      strategy.kind == PromptKind::direct_plus_instruction) {
    std::vector<std::string> chosen = instructions;
    if (chosen.empty()) {
      std::vector<std::size_t> dims;
      for (std::size_t d = 0; d < item.active.size(); ++d) {
        if (item.active[d]) dims.push_back(d);
      }
      rng.shuffle(dims);
      for (auto d : dims) {
        const auto& pool = res.instructions(dimension_ids[d], item.deltas[d] > 0);
        if (!pool.empty()) chosen.push_back(pool[rng.below(pool.size())]);
      }
    }
    text += " ";
    text += kInstructionLead;
    for (const auto& ins : chosen) text += "\n\n- " + ins;
  }
  if (strategy.kind == PromptKind::chain_of_thought) {
    text += " ";
    text += kCotScaffold;
  }
  out.text = std::move(text);
  return out;
}

}  // namespace steer
