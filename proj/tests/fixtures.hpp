#pragma once

// Hand-counted text fixtures and independent reference implementations used by
// the unit tests and the acceptance runner.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "steer/textmetrics.hpp"

namespace fixtures {

// Counts per the documented rules: word tokens (clitics split), sentences,
// syllables, and deictic / non-deictic / other tags.
struct CountedText {
  std::string text;
  int words;
  int sentences;
  int syllables;
  int deictic;
  int non_deictic;
  int other;
};

inline const std::vector<CountedText>& counted_texts() {
  static const std::vector<CountedText> t{
      {"Cats are animals.", 3, 1, 5, 2, 1, 0},
      {"Go.", 1, 1, 1, 0, 1, 0},
      {"The dog sat on the mat.", 6, 1, 6, 5, 1, 0},
      {"She reads a book every night. He watches the news.", 10, 2, 12, 5, 4, 1},
      {"Do you know where my keys are? I looked everywhere!", 10, 2, 12, 1, 9, 0},
      {"Dr. Smith arrived at noon. The meeting started late.", 9, 2, 12, 6, 3, 0},
      {"We can't stop now. They're waiting for us.", 10, 2, 11, 1, 9, 0},
      {"Honestly, the results were surprising and wonderful.", 7, 1, 14, 3, 3, 1},
      {"In 2019, the company hired 45 new workers.", 8, 1, 11, 5, 1, 2},
      {"Wow! That was a beautiful performance.", 6, 2, 10, 3, 2, 1},
      {"The government announced a new education program yesterday.", 8, 1, 17, 6, 2, 0},
      {"My friend and I walked to the little park near the river.", 12, 1, 14, 8, 3, 1},
      {"Please open the door. It is cold outside.", 8, 2, 10, 4, 4, 0},
      {"\"Where are you going?\" she asked quietly.", 7, 1, 9, 0, 7, 0},
      {"Scientists believe the ancient city was destroyed by fire.", 9, 1, 13, 6, 3, 0},
      {"Oh, I think it's fine. Really, it is.", 9, 2, 10, 1, 7, 1},
      {"The children played happily in the garden until evening.", 9, 1, 15, 7, 2, 0},
      {"Their house is bigger than ours, but our yard is nicer.", 11, 1, 13, 4, 5, 2},
      {"Management decided to postpone the annual conference.", 7, 1, 16, 6, 1, 0},
      {"You should try the chocolate cake; it tastes amazing.", 9, 1, 13, 4, 5, 0},
      {"Time flies. Life goes on. People change.", 7, 3, 8, 5, 2, 0},
  };
  return t;
}

inline double fk_from_counts(const CountedText& c) {
  return 0.39 * c.words / c.sentences + 11.8 * static_cast<double>(c.syllables) / c.words - 15.59;
}

inline double f_from_counts(const CountedText& c) {
  const double total = c.deictic + c.non_deictic + c.other;
  return (100.0 * c.deictic / total - 100.0 * c.non_deictic / total + 100.0) / 2.0;
}

// Texts of at least 50 words built by cycling through the counted texts.
inline std::vector<std::string> long_texts(std::size_t count = 20) {
  const auto& base = counted_texts();
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) {
    std::string s;
    std::size_t words = 0;
    for (std::size_t i = k; words < 50 + 3 * k; ++i) {
      const auto& c = base[(i * (k + 1)) % base.size()];
      if (!s.empty()) s += ' ';
      s += c.text;
      words += static_cast<std::size_t>(c.words);
    }
    out.push_back(s);
  }
  return out;
}

// Step-by-step MTLD reference: the segment's TTR is recomputed from scratch
// after every token.
inline double mtld_reference_pass(const std::vector<std::string>& tokens) {
  double factors = 0;
  std::vector<std::string> segment;
  for (const auto& t : tokens) {
    segment.push_back(t);
    const std::set<std::string> types(segment.begin(), segment.end());
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(segment.size());
    if (ttr < 0.72) {
      factors += 1;
      segment.clear();
    }
  }
  if (!segment.empty()) {
    const std::set<std::string> types(segment.begin(), segment.end());
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(segment.size());
    factors += (1 - ttr) / (1 - 0.72);
  }
  if (factors == 0) return static_cast<double>(tokens.size());
  return static_cast<double>(tokens.size()) / factors;
}

inline double mtld_reference(std::vector<std::string> tokens) {
  for (auto& t : tokens)
    for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const double fwd = mtld_reference_pass(tokens);
  std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
  return (fwd + mtld_reference_pass(rev)) / 2;
}

// Reference BLEU from joined n-gram strings.
inline double bleu_reference(const std::vector<std::string>& ref, const std::vector<std::string>& cand) {
  if (ref.empty() || cand.empty()) return 0;
  auto grams = [](const std::vector<std::string>& toks, std::size_t n) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < n; ++k) key += toks[i + k] + '\x1f';
      ++m[key];
    }
    return m;
  };
  double prod = 1;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto r = grams(ref, n);
    const auto c = grams(cand, n);
    int hit = 0, tot = 0;
    for (const auto& [g, k] : c) {
      tot += k;
      const auto it = r.find(g);
      if (it != r.end()) hit += std::min(k, it->second);
    }
    if (n == 1) {
      if (hit == 0) return 0;
      prod *= static_cast<double>(hit) / tot;
    } else {
      prod *= static_cast<double>(hit + 1) / (tot + 1);
    }
  }
  const double bp = cand.size() > ref.size() ? 1.0 : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
  return std::min(1.0, bp * std::pow(prod, 0.25));
}

inline std::vector<std::string> all_tokens(const steer::TokenizedText& t) {
  std::vector<std::string> v;
  for (const auto& tok : t.tokens) v.push_back(tok.text);
  return v;
}

// (reference, candidate) pairs: rewrites of varying overlap.
inline std::vector<std::pair<std::string, std::string>> bleu_pairs() {
  const auto& base = counted_texts();
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < base.size() - 1; ++i) {
    out.emplace_back(base[i].text + " " + base[i + 1].text, base[i + 1].text + " " + base[i].text);
  }
  out.emplace_back("the cat sat on the mat", "the cat sat on a mat");
  out.emplace_back("a b c d e f g", "a b c x e f g h");
  return out;
}

}  // namespace fixtures
