#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtopics {

enum class Speaker { A, B };

struct Utterance {
  std::string dialogue_id;
  std::size_t turn_index = 0;
  Speaker speaker = Speaker::A;
  std::string text;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;  // ordered by turn_index, dense from 0
  std::optional<std::string> gold_label;
};

enum class TranscriptFormat { tsv, json };
enum class Granularity { utterance, dialogue };

struct DocSource {
  std::string dialogue_id;
  std::optional<std::size_t> turn_index;  // absent in dialogue mode
};

struct RawDocument {
  std::size_t doc_id = 0;
  DocSource source;
  std::string text;
  std::optional<std::string> gold_label;
};

struct Transcript {
  std::vector<Dialogue> dialogues;
  std::size_t dropped_turns = 0;  // blank or whitespace-only turns
};

TranscriptFormat parse_format(std::string_view tag);
Granularity parse_granularity(std::string_view tag);
std::string_view to_string(Speaker s);
std::string_view to_string(Granularity g);

// TSV: "dialogue_id<TAB>speaker<TAB>text" per line, with optional
// "#label<TAB>dialogue_id=label" lines ahead of a dialogue. Other lines
// starting with '#' and empty lines are ignored. A dialogue's lines must be
// contiguous; an id that reappears later is reported as a duplicate.
//
// JSON: [{"id": ..., "label": ..., "turns": [{"speaker": "A", "text": ...}]}]
//
// Throws DataError naming the offending line.
Transcript parse_transcript(std::istream& in, TranscriptFormat format);
Transcript parse_transcript_file(const std::string& path, TranscriptFormat format);

std::vector<RawDocument> segment(const std::vector<Dialogue>& dialogues,
                                 Granularity granularity);

// Writes dialogues back out in the TSV adapter format.
void write_transcript_tsv(std::ostream& out, const std::vector<Dialogue>& dialogues);

}  // namespace dtopics
