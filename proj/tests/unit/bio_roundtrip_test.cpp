#include <gtest/gtest.h>

#include "../support/generators.hpp"
#include "lexiforge/annotate/annotation.hpp"
#include "lexiforge/annotate/bio.hpp"

using namespace lexiforge;
using namespace lexiforge::annotate;

TEST(BioRoundTrip, FromBioInvertsToBio) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    auto c = testgen::random_span_case(rng);
    auto labels = to_bio(c.sentence, c.spans);
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t].tag == BioTag::B) {
        ASSERT_GT(t, 0u);
        ASSERT_NE(labels[t - 1].tag, BioTag::O);
        ASSERT_EQ(labels[t - 1].category, labels[t].category);
      }
    }
    auto back = from_bio(labels);
    ASSERT_EQ(back.size(), c.spans.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
      EXPECT_EQ(back[k].start, c.spans[k].start);
      EXPECT_EQ(back[k].end, c.spans[k].end);
      EXPECT_EQ(back[k].category, c.spans[k].category);
    }
  }
}

TEST(BioRoundTrip, ParseInvertsEmit) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    auto c = testgen::random_span_case(rng);
    const auto annotated = emit_annotation(c.sentence, c.spans);
    ParsedAnnotation parsed;
    ASSERT_NO_THROW(parsed = parse_annotation(annotated)) << annotated;
    ASSERT_EQ(parsed.sentence.tokens, c.sentence.tokens) << annotated;
    ASSERT_EQ(parsed.spans, c.spans) << annotated;
  }
}
