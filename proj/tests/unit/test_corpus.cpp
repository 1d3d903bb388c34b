#include <gtest/gtest.h>

#include <sstream>

#include "dtopics/corpus.hpp"
#include "dtopics/error.hpp"

using namespace dtopics;

namespace {

Transcript parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return parse_transcript(in, TranscriptFormat::tsv);
}

std::string thrown_message(const std::string& text) {
  try {
    parse_tsv(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Corpus, TwoLineDialogue) {
  const auto t = parse_tsv("d1\tA\thello there\nd1\tB\thi\n");
  ASSERT_EQ(t.dialogues.size(), 1u);
  const auto& u = t.dialogues[0].utterances;
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[0].speaker, Speaker::A);
  EXPECT_EQ(u[1].speaker, Speaker::B);
  EXPECT_EQ(u[0].text, "hello there");
  EXPECT_EQ(u[1].turn_index, 1u);
  EXPECT_EQ(u[1].dialogue_id, "d1");
}

TEST(Corpus, BlankTurnsAreDroppedAndCounted) {
  const auto t = parse_tsv("d1\tA\t\nd1\tB\t   \nd1\tA\tstill here\n");
  EXPECT_EQ(t.dropped_turns, 2u);
  ASSERT_EQ(t.dialogues[0].utterances.size(), 1u);
  EXPECT_EQ(t.dialogues[0].utterances[0].turn_index, 0u);
}

TEST(Corpus, ConversationCountMatchesBlocks) {
  std::ostringstream s;
  for (int d = 0; d < 2145; ++d) {
    s << "#label\tconv" << d << "=t" << d % 7 << '\n';
    s << "conv" << d << "\tA\tso how are things\n";
    s << "conv" << d << "\tB\tpretty good thanks\n";
  }
  const auto t = parse_tsv(s.str());
  EXPECT_EQ(t.dialogues.size(), 2145u);
  EXPECT_EQ(t.dialogues[2144].gold_label, "t2");
}

TEST(Corpus, CommentsAndBlankLinesIgnored) {
  const auto t = parse_tsv("# header\n\nd1\tA\tone\r\n# note\nd1\tB\ttwo\n");
  ASSERT_EQ(t.dialogues.size(), 1u);
  EXPECT_EQ(t.dialogues[0].utterances[0].text, "one");
}

TEST(Corpus, MalformedLineNamesTheLine) {
  EXPECT_NE(thrown_message("d1\tA\tok\nd1 A missing tabs\n").find("line 2"), std::string::npos);
  EXPECT_NE(thrown_message("d1\tC\tbad speaker\n").find("line 1"), std::string::npos);
  EXPECT_NE(thrown_message("\tA\tno id\n").find("line 1"), std::string::npos);
}

TEST(Corpus, DuplicateDialogueRejected) {
  const auto msg = thrown_message("d1\tA\tx\nd2\tA\ty\nd1\tB\tz\n");
  EXPECT_NE(msg.find("duplicate"), std::string::npos);
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(Corpus, LabelForUnknownDialogueRejected) {
  EXPECT_THROW(parse_tsv("#label\tzz=cars\nd1\tA\tx\n"), DataError);
}

TEST(Corpus, UnknownFormatTag) {
  EXPECT_THROW(parse_format("xml"), UsageError);
  EXPECT_THROW(parse_granularity("sentence"), UsageError);
}

TEST(Corpus, JsonAdapter) {
  std::istringstream in(R"([{"id": "c1", "label": "pets", "turns": [
      {"speaker": "A", "text": "do you have a dog"}, {"speaker": "B", "text": " "},
      {"speaker": "B", "text": "two cats"}]}])");
  const auto t = parse_transcript(in, TranscriptFormat::json);
  ASSERT_EQ(t.dialogues.size(), 1u);
  EXPECT_EQ(t.dialogues[0].gold_label, "pets");
  EXPECT_EQ(t.dialogues[0].utterances.size(), 2u);
  EXPECT_EQ(t.dropped_turns, 1u);
  std::istringstream bad("{\"id\": 1}");
  EXPECT_THROW(parse_transcript(bad, TranscriptFormat::json), DataError);
}

TEST(Corpus, SegmentGranularity) {
  const auto t = parse_tsv("#label\td1=x\nd1\tA\ta b\nd1\tB\tc\nd2\tA\td\n");
  const auto utt = segment(t.dialogues, Granularity::utterance);
  ASSERT_EQ(utt.size(), 3u);
  for (std::size_t i = 0; i < utt.size(); ++i) EXPECT_EQ(utt[i].doc_id, i);
  EXPECT_EQ(utt[1].source.turn_index, 1u);
  EXPECT_EQ(utt[1].gold_label, "x");
  EXPECT_FALSE(utt[2].gold_label);
  const auto dlg = segment(t.dialogues, Granularity::dialogue);
  ASSERT_EQ(dlg.size(), 2u);
  EXPECT_EQ(dlg[0].text, "a b c");
  EXPECT_FALSE(dlg[0].source.turn_index);
}

TEST(Corpus, TsvRoundTrip) {
  const auto t = parse_tsv("#label\td1=x\nd1\tA\ta b\nd1\tB\tc\nd2\tA\td\n");
  std::ostringstream out;
  write_transcript_tsv(out, t.dialogues);
  const auto again = parse_tsv(out.str());
  ASSERT_EQ(again.dialogues.size(), 2u);
  EXPECT_EQ(again.dialogues[0].gold_label, "x");
  EXPECT_EQ(again.dialogues[0].utterances[1].text, "c");
}
