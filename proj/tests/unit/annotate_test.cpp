#include <gtest/gtest.h>

#include <sstream>

#include "lexiforge/annotate/annotation.hpp"
#include "lexiforge/annotate/bio.hpp"
#include "lexiforge/annotate/corpus.hpp"
#include "lexiforge/annotate/match.hpp"
#include "lexiforge/annotate/sentence.hpp"

using namespace lexiforge;
using namespace lexiforge::annotate;

namespace {

lexicon::Lexicon lex_of(std::initializer_list<std::pair<const char*, Category>> rows) {
  lexicon::Lexicon lex;
  for (const auto& [s, c] : rows) lex.insert(lexicon::make_term(s, c));
  return lex;
}

std::vector<std::string> labels_of(const std::vector<BioLabel>& ls) {
  std::vector<std::string> out;
  for (const auto& l : ls) out.push_back(to_string(l));
  return out;
}

const char* kReferenceSentence =
    " As part of our portfolio of precision healthcare solutions, we offer 3D virtual reality simulators and "
    "simulator modules for medical applications.";

const char* kReferenceAnnotation =
    "<phrase category='Digital transformation' values='virtual reality'> As part of our portfolio of precision "
    "healthcare solutions, we offer 3D <mot category='Digital transformation'>virtual reality</mot> simulators and "
    "simulator modules for medical applications.</phrase>";

}  // namespace

TEST(SplitSentences, TerminatorRule) { EXPECT_EQ(split_sentences("A b. C d.").size(), 2u); }

TEST(SplitSentences, AbbreviationLowercaseContinuation) {
  EXPECT_EQ(split_sentences("Acme Inc. grew fast.").size(), 1u);
}

TEST(SplitSentences, AbbreviationBeforeCapital) {
  ASSERT_TRUE(default_abbreviations().count("Inc."));
  EXPECT_EQ(split_sentences("Acme Inc. Launched a lab. It works.").size(), 2u);
  Abbreviations none;
  EXPECT_EQ(split_sentences("Acme Inc. Launched a lab. It works.", "", none).size(), 3u);
}

TEST(SplitSentences, Empty) { EXPECT_TRUE(split_sentences("").empty()); }

TEST(SplitSentences, DigitsAndQuotes) {
  auto s = split_sentences("He said \"done.\" 2024 was good! Was it? Yes.");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].text, "He said \"done.\"");
  EXPECT_EQ(s[3].text, "Yes.");
}

TEST(SplitSentences, OffsetFidelity) {
  const std::string src = "  First one.  Second: é à!\n\nThird?  4th line e.g. here. Last";
  auto sents = split_sentences(src, "d");
  std::string rebuilt;
  std::size_t pos = 0;
  for (const auto& s : sents) {
    rebuilt += src.substr(pos, s.begin - pos);
    EXPECT_EQ(src.substr(s.begin, s.text.size()), s.text);
    rebuilt += s.text;
    pos = s.begin + s.text.size();
    for (std::size_t i = 1; i < s.offsets.size(); ++i) EXPECT_LE(s.offsets[i - 1].second, s.offsets[i].first);
    for (std::size_t i = 0; i < s.tokens.size(); ++i)
      EXPECT_EQ(s.text.substr(s.offsets[i].first, s.offsets[i].second - s.offsets[i].first), s.tokens[i]);
  }
  rebuilt += src.substr(pos);
  EXPECT_EQ(rebuilt, src);
  ASSERT_EQ(sents.size(), 5u);
  EXPECT_EQ(sents[4].index, 4u);
}

TEST(Tokenize, Examples) {
  using V = std::vector<std::string>;
  EXPECT_EQ(tokenize("3D virtual reality.").tokens, (V{"3D", "virtual", "reality", "."}));
  EXPECT_EQ(tokenize("state-of-the-art").tokens, (V{"state-of-the-art"}));
  EXPECT_EQ(tokenize("don't stop").tokens, (V{"don't", "stop"}));
  EXPECT_EQ(tokenize("(see: «this»), ok").tokens, (V{"(", "see", ":", "«", "this", "»", ")", ",", "ok"}));
  EXPECT_TRUE(tokenize("   ").tokens.empty());
}

TEST(MatchTerms, ReferenceExample) {
  auto lex = lex_of({{"virtual reality", Category::dig}});
  auto s = make_sentence(kReferenceSentence);
  auto spans = match_terms(s, lex);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(s.tokens[spans[0].start], "virtual");
  EXPECT_EQ(spans[0].length(), 2u);
  EXPECT_EQ(spans[0].category, Category::dig);
  EXPECT_FALSE(spans[0].is_macro);
}

TEST(MatchTerms, LongestMatchWins) {
  auto lex = lex_of({{"innovation", Category::inn}, {"innovation technology", Category::dig}});
  auto spans = match_terms(make_sentence("innovation technology"), lex);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].start, 0u);
  EXPECT_EQ(spans[0].end, 2u);
  EXPECT_EQ(spans[0].category, Category::dig);
  EXPECT_EQ(spans[0].canonical, "innovation technology");
}

TEST(MatchTerms, ShorterTermStillMatchesElsewhere) {
  auto lex = lex_of({{"innovation", Category::inn}, {"innovation technology", Category::dig}});
  auto spans = match_terms(make_sentence("Innovation technology drives innovation."), lex);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[1].start, 3u);
  EXPECT_EQ(spans[1].category, Category::inn);
}

TEST(MatchTerms, OverlapBecomesMacro) {
  auto lex = lex_of({{"functionality and design", Category::inn}, {"design solutions", Category::inn}});
  auto spans = match_terms(make_sentence("functionality and design solutions"), lex);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].start, 0u);
  EXPECT_EQ(spans[0].end, 4u);
  EXPECT_TRUE(spans[0].is_macro);
  EXPECT_EQ(spans[0].category, Category::mac);
  EXPECT_EQ(spans[0].constituents, (std::vector<std::string>{"functionality and design", "design solutions"}));
}

TEST(MatchTerms, NormalizedComparisonKeepsSurfaceOffsets) {
  lexiforge::text::LemmaTable lemmas{{"models", "model"}};
  lexicon::Lexicon lex;
  lex.insert(lexicon::make_term("business model", Category::bus));
  auto s = make_sentence("New Business Models, fast.");
  auto spans = match_terms(s, lex, &lemmas);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(surface_text(s, spans[0].start, spans[0].end), "Business Models");
}

TEST(MatchTerms, NoStrictSubrangeAmongResults) {
  auto lex = lex_of({{"open innovation", Category::inn},
                     {"open innovation lab", Category::inn},
                     {"innovation lab", Category::inn},
                     {"lab", Category::inn}});
  auto spans = match_terms(make_sentence("our open innovation lab and lab"), lex);
  for (const auto& a : spans)
    for (const auto& b : spans)
      if (&a != &b) EXPECT_FALSE(b.start <= a.start && a.end <= b.end);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].canonical, "open innovation lab");
}

TEST(EmitAnnotation, ReferenceExampleExact) {
  auto lex = lex_of({{"virtual reality", Category::dig}});
  auto s = make_sentence(kReferenceSentence);
  EXPECT_EQ(emit_annotation(s, match_terms(s, lex)), kReferenceAnnotation);
}

TEST(EmitAnnotation, Spanless) {
  EXPECT_EQ(emit_annotation(make_sentence("Sentence 1"), {}), "<phrase>Sentence 1</phrase>");
}

TEST(EmitAnnotation, MacroListsConstituents) {
  auto lex = lex_of({{"functionality and design", Category::inn}, {"design solutions", Category::inn}});
  auto s = make_sentence("We sell functionality and design solutions.");
  EXPECT_EQ(emit_annotation(s, match_terms(s, lex)),
            "<phrase category='macro-term' values='functionality and design | design solutions'>We sell "
            "<mot category='macro-term'>functionality and design solutions</mot>.</phrase>");
}

TEST(EmitAnnotation, Escaping) {
  lexicon::Lexicon lex;
  lex.insert(lexicon::make_term("R&D strategy", Category::inn));
  auto s = make_sentence("Our R&D strategy is <core>.");
  EXPECT_EQ(emit_annotation(s, match_terms(s, lex)),
            "<phrase category='Innovation activities' values='r&amp;d strategy'>Our <mot "
            "category='Innovation activities'>R&amp;D strategy</mot> is &lt;core>.</phrase>");
}

TEST(ParseAnnotation, ReferenceExampleRoundTrip) {
  auto parsed = parse_annotation(kReferenceAnnotation);
  EXPECT_EQ(parsed.sentence.text, kReferenceSentence);
  ASSERT_EQ(parsed.spans.size(), 1u);
  EXPECT_EQ(parsed.spans[0].canonical, "virtual reality");
  EXPECT_EQ(parsed.spans[0].category, Category::dig);
  EXPECT_EQ(surface_text(parsed.sentence, parsed.spans[0].start, parsed.spans[0].end), "virtual reality");
}

TEST(ParseAnnotation, Plain) {
  auto parsed = parse_annotation("<phrase>plain</phrase>");
  EXPECT_TRUE(parsed.spans.empty());
  EXPECT_EQ(parsed.sentence.tokens, std::vector<std::string>{"plain"});
}

TEST(ParseAnnotation, Errors) {
  auto code_of = [](const char* s) {
    try {
      parse_annotation(s);
    } catch (const Error& e) {
      return std::optional<ErrorCode>(e.code());
    }
    return std::optional<ErrorCode>();
  };
  EXPECT_EQ(code_of("<phrase><mot>x</phrase>"), ErrorCode::parse);
  EXPECT_EQ(code_of("<phrase><mot category='Nope'>x</mot></phrase>"), ErrorCode::parse);
  EXPECT_EQ(code_of("<phrase><mot category='macro-term'>a <mot category='macro-term'>b</mot></mot></phrase>"),
            ErrorCode::parse);
  EXPECT_EQ(code_of("<phrase>x"), ErrorCode::parse);
  EXPECT_EQ(code_of("<phrase>x</mot></phrase>"), ErrorCode::parse);
  try {
    parse_annotation("<phrase>ab<mot category='dig'>cd</mot></phrase>");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
}

TEST(ToBio, ReferenceSentence) {
  TermSpan sp{2, 4, Category::dig, "virtual reality"};
  EXPECT_EQ(labels_of(to_bio(5, {sp})), (std::vector<std::string>{"O", "O", "I-dig", "I-dig", "O"}));
}

TEST(ToBio, AdjacentSameCategory) {
  std::vector<TermSpan> spans{{0, 2, Category::inn, "a"}, {2, 4, Category::inn, "b"}};
  EXPECT_EQ(labels_of(to_bio(4, spans)), (std::vector<std::string>{"I-inn", "I-inn", "B-inn", "I-inn"}));
  auto back = from_bio(to_bio(4, spans));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].start, 2u);
}

TEST(ToBio, AdjacentDifferentCategory) {
  std::vector<TermSpan> spans{{0, 2, Category::inn, "a"}, {2, 4, Category::dig, "b"}};
  EXPECT_EQ(labels_of(to_bio(4, spans)), (std::vector<std::string>{"I-inn", "I-inn", "I-dig", "I-dig"}));
}

TEST(ToBio, MacroLabel) {
  TermSpan sp{0, 3, Category::mac, "x y z", true, {"x y", "y z"}};
  EXPECT_EQ(labels_of(to_bio(3, {sp})), (std::vector<std::string>{"I-mac", "I-mac", "I-mac"}));
}

TEST(ToBio, OverlapIsAnError) {
  std::vector<TermSpan> spans{{0, 3, Category::inn, "a"}, {2, 4, Category::inn, "b"}};
  try {
    to_bio(4, spans);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::overlapping_spans);
  }
}

TEST(Conll, RoundTrip) {
  ConllSentence s{"d:0", {"we", "offer", "virtual", "reality"}, {}, {}};
  s.gold = to_bio(4, {{2, 4, Category::dig, "virtual reality"}});
  s.predicted = to_bio(4, {{3, 4, Category::dig, "reality"}});
  std::stringstream io;
  write_conll(io, s);
  write_conll(io, s);
  auto back = read_conll(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].sent_id, "d:0");
  EXPECT_EQ(back[0].tokens, s.tokens);
  EXPECT_EQ(back[0].gold, s.gold);
  EXPECT_EQ(back[0].predicted, s.predicted);
}

TEST(Conll, BadLabel) {
  std::istringstream in("tok\tX-foo\n");
  EXPECT_THROW(read_conll(in), Error);
}

TEST(AnnotateDocument, IndicesRunAcrossPassages) {
  auto lex = lex_of({{"open innovation", Category::inn}});
  TermMatcher matcher(lex);
  DocumentText doc{"doc1", Source::pdf, {"First. Open innovation here.", "Another open innovation. End."}};
  auto sents = annotate_document(doc, matcher);
  ASSERT_EQ(sents.size(), 4u);
  EXPECT_EQ(sents[3].sentence.index, 3u);
  EXPECT_EQ(sents[2].spans.size(), 1u);
  std::stringstream io;
  write_jsonl(io, sents);
  auto back = read_sentences_jsonl(io);
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back[1].spans, sents[1].spans);
  EXPECT_EQ(back[2].source, Source::pdf);
}
