#pragma once

// Rule-based text measurements: tokenization, syllables, coarse POS tags,
// reading grade, formality F-score, MTLD lexical diversity, word count and
// sentence BLEU.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "steer/error.hpp"
#include "steer/resources.hpp"

namespace steer {

enum class TokenKind { word, punct };

struct Token {
  std::string text;
  TokenKind kind = TokenKind::word;
};

/// Half-open range [begin, end) into TokenizedText::tokens.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenizedText {
  std::vector<Token> tokens;  // words and punctuation in text order
  std::vector<std::string> word_tokens;
  std::vector<std::string> punct_tokens;
  std::vector<SentenceSpan> sentences;  // partition of `tokens`

  /// Sentences that contain at least one word token.
  std::size_t sentence_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) {
      for (std::size_t i = s.begin; i < s.end; ++i) {
        if (tokens[i].kind == TokenKind::word) {
          ++n;
          break;
        }
      }
    }
    return n;
  }
};

enum class PosTag { NOUN, ADJ, ADP, ART, PRON, VERB, ADV, INTJ, OTHER };

constexpr std::string_view to_string(PosTag tag) {
  constexpr std::array<std::string_view, 9> names{"NOUN", "ADJ",  "ADP",  "ART",  "PRON",
                                                  "VERB", "ADV",  "INTJ", "OTHER"};
  return names[static_cast<std::size_t>(tag)];
}

inline PosTag pos_tag_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(PosTag::OTHER); ++i) {
    if (to_string(static_cast<PosTag>(i)) == s) return static_cast<PosTag>(i);
  }
  throw Error(ErrorKind::parse_error, "unknown POS tag '" + std::string(s) + "'");
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Multi-byte UTF-8 sequences that behave as punctuation rather than letters.
inline std::size_t utf8_punct_len(std::string_view text, std::size_t i) {
  static constexpr std::array<std::string_view, 9> seqs{
      "\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x93",
      "\xE2\x80\x94", "\xE2\x80\xA6", "\xC2\xAB",     "\xC2\xBB"};
  for (auto seq : seqs) {
    if (text.substr(i, seq.size()) == seq) return seq.size();
  }
  return 0;
}

inline bool is_apostrophe_at(std::string_view text, std::size_t i, std::size_t& len) {
  if (i < text.size() && text[i] == '\'') {
    len = 1;
    return true;
  }
  if (text.substr(i, 3) == "\xE2\x80\x99") {
    len = 3;
    return true;
  }
  return false;
}

// A byte that starts (or continues) a word: ASCII alphanumerics and any
// non-ASCII byte that is not part of a known punctuation sequence.
inline bool is_word_byte(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) return std::isalnum(c) != 0;
  return utf8_punct_len(text, i) == 0;
}

inline bool is_terminal(std::string_view tok) {
  if (tok == "\xE2\x80\xA6") return true;
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
    return c == '.' || c == '!' || c == '?';
  });
}

inline bool is_closer(std::string_view tok) {
  return tok == "\"" || tok == "'" || tok == ")" || tok == "]" || tok == "}" ||
         tok == "\xE2\x80\x9D" || tok == "\xE2\x80\x99" || tok == "\xC2\xBB";
}

inline const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> abbr{
      "etc", "inc", "ltd", "co", "vs", "approx", "dept"};
  return abbr;
}

inline const std::unordered_set<std::string>& titles() {
  static const std::unordered_set<std::string> t{"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st"};
  return t;
}

// Split English clitics the way Penn-style tokenizers do: "don't" -> do n't,
// "it's" -> it 's.
inline void push_word(std::string word, std::vector<Token>& out) {
  for (auto pos = word.find("\xE2\x80\x99"); pos != std::string::npos;
       pos = word.find("\xE2\x80\x99")) {
    word.replace(pos, 3, "'");
  }
  const std::string lower = ascii_lower(word);
  auto ends_with = [&](std::string_view suf) {
    return lower.size() > suf.size() &&
           std::string_view(lower).substr(lower.size() - suf.size()) == suf;
  };
  if (ends_with("n't") && lower != "can't" && lower.size() > 3) {
    out.push_back({word.substr(0, word.size() - 3), TokenKind::word});
    out.push_back({word.substr(word.size() - 3), TokenKind::word});
    return;
  }
  if (lower == "can't") {
    out.push_back({word.substr(0, 2), TokenKind::word});
    out.push_back({word.substr(2), TokenKind::word});
    return;
  }
  for (std::string_view suf : {"'s", "'re", "'ve", "'ll", "'d", "'m"}) {
    if (ends_with(suf)) {
      out.push_back({word.substr(0, word.size() - suf.size()), TokenKind::word});
      out.push_back({word.substr(word.size() - suf.size()), TokenKind::word});
      return;
    }
  }
  out.push_back({std::move(word), TokenKind::word});
}

}  // namespace detail

/// Word/punctuation/sentence segmentation.
///
/// Words are maximal runs of alphanumeric (or non-ASCII letter) bytes joined by
/// internal apostrophes or hyphens, and by periods/commas between digits.
/// Runs of '.', '!' and '?' form one punctuation token and end a sentence;
/// closing quotes and brackets that follow stay in that sentence.
inline TokenizedText tokenize(std::string_view text) {
  TokenizedText result;
  auto& tokens = result.tokens;
  std::vector<bool> ends_sentence;  // parallel to tokens

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80 && std::isspace(c)) {
      ++i;
      continue;
    }
    if (detail::is_word_byte(text, i)) {
      std::size_t j = i;
      while (j < n) {
        if (detail::is_word_byte(text, j)) {
          ++j;
          continue;
        }
        std::size_t apos_len = 0;
        if (detail::is_apostrophe_at(text, j, apos_len) && j + apos_len < n &&
            detail::is_word_byte(text, j + apos_len)) {
          j += apos_len;
          continue;
        }
        if (text[j] == '-' && j + 1 < n && detail::is_word_byte(text, j + 1)) {
          ++j;
          continue;
        }
        if ((text[j] == '.' || text[j] == ',') && j > i && j + 1 < n &&
            std::isdigit(static_cast<unsigned char>(text[j - 1])) &&
            std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
          ++j;
          continue;
        }
        break;
      }
      detail::push_word(std::string(text.substr(i, j - i)), tokens);
      ends_sentence.resize(tokens.size(), false);
      i = j;
      continue;
    }
    // punctuation
    std::size_t len = detail::utf8_punct_len(text, i);
    if (len == 0) {
      if (c == '.' || c == '!' || c == '?') {
        len = 1;
        while (i + len < n && (text[i + len] == '.' || text[i + len] == '!' ||
                               text[i + len] == '?')) {
          ++len;
        }
      } else {
        len = 1;
      }
    }
    std::string tok(text.substr(i, len));
    bool terminal = detail::is_terminal(tok);
    if (terminal && tok == "." && !tokens.empty() && tokens.back().kind == TokenKind::word) {
      const std::string prev = detail::ascii_lower(tokens.back().text);
      if (detail::titles().count(prev) != 0) {
        terminal = false;  // "Dr. Smith"
      } else if (detail::abbreviations().count(prev) != 0) {
        std::size_t k = i + 1;
        while (k < n && text[k] == ' ') ++k;
        terminal = k >= n || text[k] == '\n' ||
                   std::isupper(static_cast<unsigned char>(text[k])) != 0;
      }
    }
    tokens.push_back({std::move(tok), TokenKind::punct});
    ends_sentence.push_back(terminal);
    i += len;
  }

  // Sentence spans: a terminal token closes the sentence after any trailing
  // closers.
  std::size_t start = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (!ends_sentence[t]) continue;
    std::size_t end = t + 1;
    while (end < tokens.size() && tokens[end].kind == TokenKind::punct &&
           detail::is_closer(tokens[end].text)) {
      ++end;
    }
    // '"Where to?" she asked.' stays one sentence
    if (end > t + 1 && end < tokens.size() && tokens[end].kind == TokenKind::word &&
        std::islower(static_cast<unsigned char>(tokens[end].text[0])) != 0) {
      t = end - 1;
      continue;
    }
    result.sentences.push_back({start, end});
    start = end;
    t = end - 1;
  }
  if (start < tokens.size()) result.sentences.push_back({start, tokens.size()});

  for (const auto& tok : tokens) {
    (tok.kind == TokenKind::word ? result.word_tokens : result.punct_tokens).push_back(tok.text);
  }
  return result;
}

/// Word -> syllable count overrides, loaded from "word<TAB>count" lines.
class SyllableExceptions {
 public:
  static SyllableExceptions parse(std::string_view tsv) {
    SyllableExceptions ex;
    std::istringstream in{std::string(tsv)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw Error(ErrorKind::parse_error, "syllable exception line without tab: " + line);
      }
      ex.table_[detail::ascii_lower(line.substr(0, tab))] = std::stoi(line.substr(tab + 1));
    }
    return ex;
  }

  static const SyllableExceptions& bundled() {
    static const SyllableExceptions ex = parse(resources::kSyllableExceptions);
    return ex;
  }

  const int* find(const std::string& lower_word) const {
    auto it = table_.find(lower_word);
    return it == table_.end() ? nullptr : &it->second;
  }

 private:
  std::unordered_map<std::string, int> table_;
};

/// Vowel-group syllable estimate with silent-e, "-le", "-es" and "-ed" rules.
inline int count_syllables(std::string_view word,
                           const SyllableExceptions& exceptions = SyllableExceptions::bundled()) {
  if (word.empty()) throw Error(ErrorKind::invalid_argument, "empty word");
  std::string w;
  for (char ch : word) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalpha(c)) w.push_back(static_cast<char>(std::tolower(c)));
  }
  if (w.empty()) return 1;  // numbers and symbols
  if (const int* hit = exceptions.find(w)) return *hit;

  auto is_vowel = [&](std::size_t k) {
    const char c = w[k];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return true;
    return c == 'y' && k > 0;
  };
  int count = 0;
  bool prev = false;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const bool v = is_vowel(k);
    if (v && !prev) ++count;
    prev = v;
  }
  const std::size_t len = w.size();
  auto consonant_at = [&](std::size_t k) { return !is_vowel(k); };
  if (count > 1 && len >= 3 && w[len - 1] == 'e') {
    const bool le_ending = w[len - 2] == 'l' && consonant_at(len - 3);
    if (!le_ending && consonant_at(len - 2)) --count;
  } else if (count > 1 && len >= 4 && w[len - 1] == 's' && w[len - 2] == 'e') {
    const char before = w[len - 3];
    const bool sibilant = before == 's' || before == 'x' || before == 'z' || before == 'c' ||
                          before == 'g' || before == 'h';
    if (!sibilant && consonant_at(len - 3)) --count;
  } else if (count > 1 && len >= 4 && w[len - 1] == 'd' && w[len - 2] == 'e') {
    const char before = w[len - 3];
    if (before != 't' && before != 'd' && (consonant_at(len - 3) || before == 'y')) --count;
  }
  return std::max(count, 1);
}

/// Closed-class lexicon for the tagger ("token<TAB>TAG" lines).
class PosLexicon {
 public:
  static PosLexicon parse(std::string_view tsv) {
    PosLexicon lex;
    std::istringstream in{std::string(tsv)};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw Error(ErrorKind::parse_error, "lexicon line without tab: " + line);
      }
      lex.table_[detail::ascii_lower(line.substr(0, tab))] = pos_tag_from_string(line.substr(tab + 1));
    }
    return lex;
  }

  static PosLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot open lexicon " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static const PosLexicon& bundled() {
    static const PosLexicon lex = parse(resources::kPosLexicon);
    return lex;
  }

  const PosTag* find(const std::string& lower) const {
    auto it = table_.find(lower);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, PosTag> table_;
};

/// Tag a single token. Articles are forced regardless of the lexicon.
inline PosTag tag_word(std::string_view token, const PosLexicon& lexicon = PosLexicon::bundled()) {
  const std::string w = detail::ascii_lower(token);
  if (w == "a" || w == "an" || w == "the") return PosTag::ART;
  if (const PosTag* hit = lexicon.find(w)) return *hit;

  const bool has_alpha = std::any_of(w.begin(), w.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalpha(u);
  });
  if (!has_alpha) return PosTag::OTHER;  // numerals

  auto ends = [&](std::string_view suf) {
    return w.size() > suf.size() + 1 && std::string_view(w).substr(w.size() - suf.size()) == suf;
  };
  if (ends("ly")) return PosTag::ADV;
  if (ends("ing") || ends("ed") || ends("ize") || ends("ise") || ends("ify") || ends("izes") ||
      ends("ised") || ends("ized")) {
    return PosTag::VERB;
  }
  for (std::string_view suf : {"tion", "sion", "ment", "ness", "ity", "ism", "ance", "ence", "ship",
                               "hood", "ist", "er", "or", "age", "ure", "dom"}) {
    if (ends(suf)) return PosTag::NOUN;
  }
  for (std::string_view suf :
       {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "ary", "est"}) {
    if (ends(suf)) return PosTag::ADJ;
  }
  if (w.size() > 3 && w.back() == 's') {
    const std::string stem = w.substr(0, w.size() - 1);
    if (const PosTag* hit = lexicon.find(stem); hit && (*hit == PosTag::NOUN || *hit == PosTag::VERB)) {
      return *hit;
    }
    if (w.size() > 4 && w[w.size() - 2] == 'e') {
      if (const PosTag* hit = lexicon.find(w.substr(0, w.size() - 2));
          hit && (*hit == PosTag::NOUN || *hit == PosTag::VERB)) {
        return *hit;
      }
    }
  }
  return PosTag::NOUN;
}

inline std::vector<PosTag> pos_tag(const TokenizedText& text,
                                   const PosLexicon& lexicon = PosLexicon::bundled()) {
  std::vector<PosTag> tags;
  tags.reserve(text.word_tokens.size());
  for (const auto& w : text.word_tokens) tags.push_back(tag_word(w, lexicon));
  return tags;
}

/// Flesch-Kincaid grade: 0.39 * words/sentences + 11.8 * syllables/words - 15.59.
inline double flesch_kincaid(const TokenizedText& text) {
  const auto words = text.word_tokens.size();
  const auto sentences = text.sentence_count();
  if (words == 0 || sentences == 0) {
    throw Error(ErrorKind::undefined_metric, "Flesch-Kincaid needs at least one word and sentence");
  }
  long syllables = 0;
  for (const auto& w : text.word_tokens) syllables += count_syllables(w);
  return 0.39 * (static_cast<double>(words) / static_cast<double>(sentences)) +
         11.8 * (static_cast<double>(syllables) / static_cast<double>(words)) - 15.59;
}

/// F-score from tag shares, in [0, 100]. OTHER counts toward the denominator only.
inline double formality_from_tags(const std::vector<PosTag>& tags) {
  if (tags.empty()) throw Error(ErrorKind::undefined_metric, "F-score needs at least one word");
  long deictic = 0;
  long non_deictic = 0;
  for (PosTag t : tags) {
    switch (t) {
      case PosTag::NOUN:
      case PosTag::ADJ:
      case PosTag::ADP:
      case PosTag::ART: ++deictic; break;
      case PosTag::PRON:
      case PosTag::VERB:
      case PosTag::ADV:
      case PosTag::INTJ: ++non_deictic; break;
      case PosTag::OTHER: break;
    }
  }
  const double total = static_cast<double>(tags.size());
  const double pct_deictic = 100.0 * static_cast<double>(deictic) / total;
  const double pct_non = 100.0 * static_cast<double>(non_deictic) / total;
  return (pct_deictic - pct_non + 100.0) / 2.0;
}

inline double heylighen_dewaele(const TokenizedText& text) {
  return formality_from_tags(pos_tag(text));
}

inline constexpr double kMtldThreshold = 0.72;
inline constexpr std::size_t kMinWordsForDiversity = 50;
inline constexpr std::size_t kMaxWords = 2048;

/// One directional MTLD pass: token count divided by the number of factors,
/// where a factor closes whenever the running TTR drops below the threshold and
/// the leftover segment contributes (1 - TTR) / (1 - threshold).
template <typename It>
double mtld_pass(It first, It last, double threshold = kMtldThreshold) {
  double factors = 0.0;
  std::size_t total = 0;
  std::unordered_set<std::string> types;
  std::size_t count = 0;
  for (auto it = first; it != last; ++it) {
    ++total;
    ++count;
    types.insert(*it);
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(count);
    if (ttr < threshold) {
      factors += 1.0;
      types.clear();
      count = 0;
    }
  }
  if (count > 0) {
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(count);
    factors += (1.0 - ttr) / (1.0 - threshold);
  }
  if (factors == 0.0) return static_cast<double>(total);
  return static_cast<double>(total) / factors;
}

/// Bidirectional MTLD over case-folded word tokens.
inline double mtld(const TokenizedText& text) {
  if (text.word_tokens.size() < kMinWordsForDiversity) {
    throw Error(ErrorKind::below_validity_floor,
                "MTLD needs at least 50 words, got " + std::to_string(text.word_tokens.size()));
  }
  std::vector<std::string> words;
  words.reserve(text.word_tokens.size());
  for (const auto& w : text.word_tokens) words.push_back(detail::ascii_lower(w));
  const double forward = mtld_pass(words.begin(), words.end());
  const double backward = mtld_pass(words.rbegin(), words.rend());
  return (forward + backward) / 2.0;
}

inline double word_count(const TokenizedText& text) {
  return static_cast<double>(text.word_tokens.size());
}

/// Sentence BLEU over the full token sequence (words and punctuation).
///
/// Unigram precision is unsmoothed; orders 2..4 use add-one smoothing, so a
/// candidate sharing no unigram with the reference scores 0.
inline double sentence_bleu(const TokenizedText& reference, const TokenizedText& candidate,
                            int max_order = 4) {
  std::vector<std::string> ref;
  std::vector<std::string> cand;
  for (const auto& t : reference.tokens) ref.push_back(t.text);
  for (const auto& t : candidate.tokens) cand.push_back(t.text);
  if (cand.empty() || ref.empty()) return 0.0;

  double log_sum = 0.0;
  for (int order = 1; order <= max_order; ++order) {
    std::map<std::vector<std::string>, int> ref_counts;
    const auto n = static_cast<std::size_t>(order);
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
    }
    std::map<std::vector<std::string>, int> cand_counts;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      ++cand_counts[std::vector<std::string>(cand.begin() + i, cand.begin() + i + n)];
    }
    long matched = 0;
    long total = 0;
    for (const auto& [gram, c] : cand_counts) {
      total += c;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(c, it->second);
    }
    double precision;
    if (order == 1) {
      if (matched == 0) return 0.0;
      precision = static_cast<double>(matched) / static_cast<double>(total);
    } else {
      precision = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(precision);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::min(1.0, bp * std::exp(log_sum / max_order));
}

inline double sentence_bleu(std::string_view reference, std::string_view candidate) {
  return sentence_bleu(tokenize(reference), tokenize(candidate));
}

}  // namespace steer
