#pragma once

#include <string>
#include <string_view>

#include "steer/error.hpp"

namespace steer {

enum class PromptKind { direct, underspecified, instruction_only, direct_plus_instruction, chain_of_thought };

inline std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::direct: return "direct";
    case PromptKind::underspecified: return "underspecified";
    case PromptKind::instruction_only: return "instruction_only";
    case PromptKind::direct_plus_instruction: return "direct_plus_instruction";
    case PromptKind::chain_of_thought: return "chain_of_thought";
  }
  return "";
}

/// Whether the prompt names the dimensions it asks to change.
inline bool names_dimensions(PromptKind k) {
  return k == PromptKind::direct || k == PromptKind::direct_plus_instruction ||
         k == PromptKind::chain_of_thought;
}

struct PromptStrategy {
  PromptKind kind = PromptKind::direct;
  bool negative = false;

  PromptStrategy() = default;
  PromptStrategy(PromptKind k, bool neg) : kind(k), negative(neg) {
    if (negative && !names_dimensions(kind)) {
      throw Error(ErrorKind::invalid_strategy,
                  "negative prompting needs a kind that names dimensions, got " +
                      std::string(to_string(kind)));
    }
  }

  /// "direct", "direct+negative", "chain_of_thought+negative", ...
  std::string id() const { return std::string(to_string(kind)) + (negative ? "+negative" : ""); }

  static PromptStrategy parse(std::string_view s) {
    bool neg = false;
    constexpr std::string_view suffix = "+negative";
    if (s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
      neg = true;
      s.remove_suffix(suffix.size());
    }
    for (auto k : {PromptKind::direct, PromptKind::underspecified, PromptKind::instruction_only,
                   PromptKind::direct_plus_instruction, PromptKind::chain_of_thought}) {
      if (to_string(k) == s) return PromptStrategy(k, neg);
    }
    throw Error(ErrorKind::invalid_strategy, "unknown prompt strategy '" + std::string(s) + "'");
  }

  bool operator==(const PromptStrategy&) const = default;
};

}  // namespace steer
