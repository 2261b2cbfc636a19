#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "steer/error.hpp"
#include "steer/random.hpp"
#include "steer/textmetrics.hpp"

using namespace steer;

namespace {

std::vector<std::string> words_of(std::string_view s) { return tokenize(s).word_tokens; }

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

TEST(Tokenize, SplitsWordsAndPunctuation) {
  const auto t = tokenize("Hello, world! How are you?");
  EXPECT_EQ(t.word_tokens, (std::vector<std::string>{"Hello", "world", "How", "are", "you"}));
  EXPECT_EQ(t.punct_tokens, (std::vector<std::string>{",", "!", "?"}));
  EXPECT_EQ(t.sentence_count(), 2u);
}

TEST(Tokenize, EmptyText) {
  const auto t = tokenize("");
  EXPECT_TRUE(t.tokens.empty());
  EXPECT_EQ(t.sentence_count(), 0u);
}

TEST(Tokenize, Contractions) {
  EXPECT_EQ(words_of("don't"), (std::vector<std::string>{"do", "n't"}));
  EXPECT_EQ(words_of("can't"), (std::vector<std::string>{"ca", "n't"}));
  EXPECT_EQ(words_of("it's"), (std::vector<std::string>{"it", "'s"}));
  EXPECT_EQ(words_of("we’ll"), (std::vector<std::string>{"we", "'ll"}));
}

TEST(Tokenize, HyphensAndNumbers) {
  EXPECT_EQ(words_of("a well-known fact"), (std::vector<std::string>{"a", "well-known", "fact"}));
  EXPECT_EQ(words_of("pi is 3.14, about 1,000 times"),
            (std::vector<std::string>{"pi", "is", "3.14", "about", "1,000", "times"}));
}

TEST(Tokenize, TitlesDoNotEndSentences) {
  EXPECT_EQ(tokenize("Mr. Brown met Dr. Green.").sentence_count(), 1u);
}

TEST(Tokenize, AbbreviationsEndSentenceOnlyBeforeCapital) {
  EXPECT_EQ(tokenize("We sell apples, pears, etc. and more.").sentence_count(), 1u);
  EXPECT_EQ(tokenize("We sell apples, pears, etc. The rest is gone.").sentence_count(), 2u);
}

TEST(Tokenize, TerminalRunsAndClosers) {
  const auto t = tokenize("Really?! \"Yes.\" Fine...");
  EXPECT_EQ(t.sentence_count(), 3u);
  EXPECT_EQ(t.punct_tokens.front(), "?!");
}

TEST(Tokenize, QuotedQuestionContinuesWithLowercase) {
  EXPECT_EQ(tokenize("\"Where are you going?\" she asked.").sentence_count(), 1u);
  EXPECT_EQ(tokenize("\"Where are you going?\" She left.").sentence_count(), 2u);
}

TEST(Tokenize, SentencesPartitionTokens) {
  for (const auto& c : fixtures::counted_texts()) {
    const auto t = tokenize(c.text);
    std::size_t pos = 0;
    for (const auto& s : t.sentences) {
      EXPECT_EQ(s.begin, pos);
      EXPECT_GT(s.end, s.begin);
      pos = s.end;
    }
    EXPECT_EQ(pos, t.tokens.size());
  }
}

TEST(Syllables, Examples) {
  EXPECT_EQ(count_syllables("cat"), 1);
  EXPECT_EQ(count_syllables("animals"), 3);
  EXPECT_EQ(count_syllables("queue"), 1);
}

TEST(Syllables, Rules) {
  EXPECT_EQ(count_syllables("make"), 1);      // silent e
  EXPECT_EQ(count_syllables("table"), 2);     // -le
  EXPECT_EQ(count_syllables("boxes"), 2);     // sibilant -es
  EXPECT_EQ(count_syllables("makes"), 1);
  EXPECT_EQ(count_syllables("wanted"), 2);    // -ted keeps the syllable
  EXPECT_EQ(count_syllables("jumped"), 1);
  EXPECT_EQ(count_syllables("yellow"), 2);    // leading y is a consonant
  EXPECT_EQ(count_syllables("rhythm"), 1);
  EXPECT_EQ(count_syllables("the"), 1);
  EXPECT_EQ(count_syllables("Animals"), 3);   // case-insensitive
  EXPECT_EQ(count_syllables("2019"), 1);
}

TEST(Syllables, EmptyWordIsAnError) {
  EXPECT_EQ(kind_of([] { count_syllables(""); }), ErrorKind::invalid_argument);
}

TEST(Syllables, ExceptionTableParses) {
  const auto ex = SyllableExceptions::parse("# comment\nfoo\t3\n");
  EXPECT_EQ(count_syllables("foo", ex), 3);
  EXPECT_EQ(count_syllables("create"), 2);
  EXPECT_EQ(count_syllables("create", ex), 1);  // rules only: silent final e
}

TEST(PosTag, Examples) {
  EXPECT_EQ(pos_tag(tokenize("the")), std::vector<PosTag>{PosTag::ART});
  EXPECT_EQ(pos_tag(tokenize("cats")), std::vector<PosTag>{PosTag::NOUN});
  EXPECT_EQ(pos_tag(tokenize("quickly")), std::vector<PosTag>{PosTag::ADV});
}

TEST(PosTag, ArticlesAlwaysArt) {
  const auto lex = PosLexicon::parse("the\tNOUN\na\tVERB\n");
  EXPECT_EQ(tag_word("The", lex), PosTag::ART);
  EXPECT_EQ(tag_word("a", lex), PosTag::ART);
  EXPECT_EQ(tag_word("AN", lex), PosTag::ART);
}

TEST(PosTag, SuffixRules) {
  EXPECT_EQ(tag_word("running"), PosTag::VERB);
  EXPECT_EQ(tag_word("organize"), PosTag::VERB);
  EXPECT_EQ(tag_word("happiness"), PosTag::NOUN);
  EXPECT_EQ(tag_word("dangerous"), PosTag::ADJ);
  EXPECT_EQ(tag_word("42"), PosTag::OTHER);
  EXPECT_EQ(tag_word("zorblax"), PosTag::NOUN);
  EXPECT_EQ(tag_word("friendly"), PosTag::ADJ);  // lexicon beats -ly
}

TEST(PosTag, LengthAndArticleRuleOnShuffles) {
  Rng rng(7);
  for (const auto& c : fixtures::counted_texts()) {
    auto t = tokenize(c.text);
    rng.shuffle(t.word_tokens);
    t.word_tokens.push_back("the");
    const auto tags = pos_tag(t);
    ASSERT_EQ(tags.size(), t.word_tokens.size());
    for (std::size_t i = 0; i < tags.size(); ++i) {
      const auto w = detail::ascii_lower(t.word_tokens[i]);
      if (w == "a" || w == "an" || w == "the") {
        EXPECT_EQ(tags[i], PosTag::ART);
      }
    }
  }
}

TEST(PosTag, LexiconRejectsMalformedLines) {
  EXPECT_EQ(kind_of([] { PosLexicon::parse("word NOUN\n"); }), ErrorKind::parse_error);
  EXPECT_EQ(kind_of([] { PosLexicon::parse("word\tFOO\n"); }), ErrorKind::parse_error);
}

TEST(FleschKincaid, Examples) {
  EXPECT_NEAR(flesch_kincaid(tokenize("Cats are animals.")), 0.39 * 3 + 11.8 * 5.0 / 3 - 15.59, 1e-12);
  EXPECT_NEAR(flesch_kincaid(tokenize("Cats are animals.")), 5.2467, 5e-5);
  EXPECT_NEAR(flesch_kincaid(tokenize("Go.")), -3.40, 1e-12);
}

TEST(FleschKincaid, MatchesHandCounts) {
  for (const auto& c : fixtures::counted_texts()) {
    const auto t = tokenize(c.text);
    EXPECT_EQ(static_cast<int>(t.word_tokens.size()), c.words) << c.text;
    EXPECT_EQ(static_cast<int>(t.sentence_count()), c.sentences) << c.text;
    int syl = 0;
    for (const auto& w : t.word_tokens) syl += count_syllables(w);
    EXPECT_EQ(syl, c.syllables) << c.text;
    EXPECT_NEAR(flesch_kincaid(t), fixtures::fk_from_counts(c), 1e-12) << c.text;
  }
}

TEST(FleschKincaid, DoublingSentencesKeepsValue) {
  for (const auto& c : fixtures::counted_texts()) {
    EXPECT_NEAR(flesch_kincaid(tokenize(c.text + " " + c.text)), flesch_kincaid(tokenize(c.text)), 1e-9);
  }
}

TEST(FleschKincaid, ExtraSyllableNeverDecreases) {
  // "cat" -> "catta": same tokenization, one more syllable
  const double a = flesch_kincaid(tokenize("The cat sat."));
  const double b = flesch_kincaid(tokenize("The catta sat."));
  EXPECT_GE(b, a);
}

TEST(FleschKincaid, Undefined) {
  EXPECT_EQ(kind_of([] { flesch_kincaid(tokenize("")); }), ErrorKind::undefined_metric);
  EXPECT_EQ(kind_of([] { flesch_kincaid(tokenize("?!")); }), ErrorKind::undefined_metric);
}

TEST(Formality, Examples) {
  using enum PosTag;
  EXPECT_DOUBLE_EQ(formality_from_tags({NOUN, NOUN, NOUN}), 100.0);
  EXPECT_DOUBLE_EQ(formality_from_tags({VERB, VERB}), 0.0);
  EXPECT_DOUBLE_EQ(formality_from_tags({NOUN, VERB, ADJ, PRON}), 50.0);
  EXPECT_DOUBLE_EQ(formality_from_tags({NOUN, OTHER}), 75.0);
}

TEST(Formality, MatchesHandCounts) {
  for (const auto& c : fixtures::counted_texts()) {
    EXPECT_NEAR(heylighen_dewaele(tokenize(c.text)), fixtures::f_from_counts(c), 1e-12) << c.text;
  }
}

TEST(Formality, BoundedAndOrderFree) {
  Rng rng(3);
  for (const auto& text : fixtures::long_texts()) {
    auto t = tokenize(text);
    const double f = heylighen_dewaele(t);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 100.0);
    rng.shuffle(t.word_tokens);
    EXPECT_NEAR(heylighen_dewaele(t), f, 1e-12);
  }
}

TEST(Formality, Undefined) {
  EXPECT_EQ(kind_of([] { heylighen_dewaele(tokenize("")); }), ErrorKind::undefined_metric);
}

TEST(Mtld, IdenticalTokens) {
  const std::string text = [] {
    std::string s;
    for (int i = 0; i < 100; ++i) s += "word ";
    return s;
  }();
  EXPECT_DOUBLE_EQ(mtld(tokenize(text)), 2.0);
}

TEST(Mtld, AllDistinctReturnsTokenCount) {
  std::string s;
  for (int i = 0; i < 50; ++i) s += "w" + std::to_string(i) + "x ";
  EXPECT_DOUBLE_EQ(mtld(tokenize(s)), 50.0);
}

TEST(Mtld, RepeatingPatternHandValue) {
  // "a b c d e" x 12: every factor closes on its 7th token, 8 factors, 4 distinct leftovers
  std::string s;
  for (int i = 0; i < 12; ++i) s += "alpha beta gamma delta epsilon ";
  EXPECT_DOUBLE_EQ(mtld(tokenize(s)), 7.5);
}

TEST(Mtld, MatchesStepwiseReference) {
  for (const auto& text : fixtures::long_texts()) {
    const auto t = tokenize(text);
    EXPECT_NEAR(mtld(t), fixtures::mtld_reference(t.word_tokens), 1e-9);
  }
}

TEST(Mtld, PalindromePassesAgree) {
  std::vector<std::string> seq;
  for (int i = 0; i < 30; ++i) seq.push_back("t" + std::to_string(i % 7));
  std::vector<std::string> pal(seq);
  pal.insert(pal.end(), seq.rbegin(), seq.rend());
  EXPECT_DOUBLE_EQ(mtld_pass(pal.begin(), pal.end()), mtld_pass(pal.rbegin(), pal.rend()));
}

TEST(Mtld, CaseFolded) {
  std::string upper, lower;
  for (int i = 0; i < 60; ++i) {
    upper += (i % 2 ? "Word" : "word") + std::to_string(i % 9) + " ";
    lower += "word" + std::to_string(i % 9) + " ";
  }
  EXPECT_DOUBLE_EQ(mtld(tokenize(upper)), mtld(tokenize(lower)));
}

TEST(Mtld, BelowFloor) {
  EXPECT_EQ(kind_of([] { mtld(tokenize("too short")); }), ErrorKind::below_validity_floor);
}

TEST(WordCount, Examples) {
  EXPECT_EQ(word_count(tokenize("Hello world.")), 2.0);
  EXPECT_EQ(word_count(tokenize("")), 0.0);
  const std::string a = "The dog sat on the mat.";
  const std::string b = "Go home now.";
  EXPECT_EQ(word_count(tokenize(a + " " + b)), word_count(tokenize(a)) + word_count(tokenize(b)));
}

TEST(Bleu, IdenticalAndDisjoint) {
  EXPECT_DOUBLE_EQ(sentence_bleu("the cat sat on the mat", "the cat sat on the mat"), 1.0);
  EXPECT_DOUBLE_EQ(sentence_bleu("the cat sat", "dogs run fast"), 0.0);
  EXPECT_DOUBLE_EQ(sentence_bleu("the cat sat", ""), 0.0);
}

TEST(Bleu, HandComputedPair) {
  // p = 5/6, 4/6, 3/5, 2/4 -> product 1/6; equal lengths
  EXPECT_NEAR(sentence_bleu("the cat sat on the mat", "the cat sat on a mat"), std::pow(1.0 / 6.0, 0.25), 1e-12);
}

TEST(Bleu, BrevityPenalty) {
  // candidate is a 3-token prefix of a 6-token reference: all precisions 1
  EXPECT_NEAR(sentence_bleu("a b c d e f", "a b c"), std::exp(1.0 - 6.0 / 3.0), 1e-12);
}

TEST(Bleu, MatchesReference) {
  for (const auto& [r, c] : fixtures::bleu_pairs()) {
    const auto rt = tokenize(r);
    const auto ct = tokenize(c);
    EXPECT_NEAR(sentence_bleu(rt, ct), fixtures::bleu_reference(fixtures::all_tokens(rt), fixtures::all_tokens(ct)),
                1e-12)
        << r << " | " << c;
  }
}

TEST(Bleu, SelfScoreAndRange) {
  const auto& texts = fixtures::counted_texts();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_DOUBLE_EQ(sentence_bleu(texts[i].text, texts[i].text), 1.0);
    const double b = sentence_bleu(texts[i].text, texts[(i + 3) % texts.size()].text);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
  }
}

TEST(Determinism, RepeatedCallsAgree) {
  for (const auto& text : fixtures::long_texts(5)) {
    const auto a = tokenize(text);
    const auto b = tokenize(text);
    EXPECT_EQ(mtld(a), mtld(b));
    EXPECT_EQ(flesch_kincaid(a), flesch_kincaid(b));
    EXPECT_EQ(heylighen_dewaele(a), heylighen_dewaele(b));
  }
}
