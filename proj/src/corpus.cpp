#include "dtopics/corpus.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "dtopics/error.hpp"

namespace dtopics {
namespace {

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v')
      return false;
  }
  return true;
}

Speaker parse_speaker(std::string_view s, const std::string& where) {
  if (s == "A") return Speaker::A;
  if (s == "B") return Speaker::B;
  throw DataError(where + ": speaker must be A or B, got '" + std::string(s) + "'");
}

class TranscriptBuilder {
 public:
  void begin(const std::string& id, const std::string& where) {
    if (!seen_.insert(id).second) throw DataError(where + ": duplicate dialogue_id '" + id + "'");
    Dialogue d;
    d.id = id;
    if (auto it = pending_labels_.find(id); it != pending_labels_.end()) {
      d.gold_label = it->second;
      pending_labels_.erase(it);
    }
    out_.dialogues.push_back(std::move(d));
  }

  void set_label(const std::string& id, std::string label, const std::string& where) {
    if (seen_.count(id)) throw DataError(where + ": label for already-started dialogue '" + id + "'");
    pending_labels_[id] = std::move(label);
  }

  void add_turn(Speaker speaker, std::string text) {
    if (is_blank(text)) {
      ++out_.dropped_turns;
      return;
    }
    Dialogue& d = out_.dialogues.back();
    Utterance u;
    u.dialogue_id = d.id;
    u.turn_index = d.utterances.size();
    u.speaker = speaker;
    u.text = std::move(text);
    d.utterances.push_back(std::move(u));
  }

  const std::string* current_id() const {
    return out_.dialogues.empty() ? nullptr : &out_.dialogues.back().id;
  }

  Transcript finish() {
    if (!pending_labels_.empty())
      throw DataError("label given for unknown dialogue '" + pending_labels_.begin()->first + "'");
    return std::move(out_);
  }

 private:
  Transcript out_;
  std::set<std::string> seen_;
  std::map<std::string, std::string> pending_labels_;
};

Transcript parse_tsv(std::istream& in) {
  TranscriptBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view kLabel = "#label\t";
      if (line.compare(0, kLabel.size(), kLabel) != 0) continue;
      const std::string rest = line.substr(kLabel.size());
      const auto eq = rest.find('=');
      if (eq == std::string::npos || eq == 0)
        throw DataError(where + ": label line must read '#label<TAB>dialogue_id=label'");
      builder.set_label(rest.substr(0, eq), rest.substr(eq + 1), where);
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError(where + ": expected three tab-separated fields");
    std::string id = line.substr(0, t1);
    if (id.empty()) throw DataError(where + ": empty dialogue_id");
    const Speaker speaker = parse_speaker(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), where);
    const std::string* current = builder.current_id();
    if (current == nullptr || *current != id) builder.begin(id, where);
    builder.add_turn(speaker, line.substr(t2 + 1));
  }
  return builder.finish();
}

Transcript parse_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("JSON transcript must be a top-level array");
  TranscriptBuilder builder;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "dialogue " + std::to_string(i);
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("turns") ||
        !obj["turns"].is_array())
      throw DataError(where + ": expected {id, label?, turns: [...]}");
    const auto& id_node = obj["id"];
    const std::string id = id_node.is_string() ? id_node.get<std::string>() : id_node.dump();
    if (obj.contains("label") && !obj["label"].is_null()) {
      if (!obj["label"].is_string()) throw DataError(where + ": label must be a string");
      builder.set_label(id, obj["label"].get<std::string>(), where);
    }
    builder.begin(id, where);
    for (const auto& turn : obj["turns"]) {
      if (!turn.is_object() || !turn.contains("speaker") || !turn.contains("text") ||
          !turn["speaker"].is_string() || !turn["text"].is_string())
        throw DataError(where + ": turn must be {speaker, text}");
      builder.add_turn(parse_speaker(turn["speaker"].get<std::string>(), where),
                       turn["text"].get<std::string>());
    }
  }
  return builder.finish();
}

}  // namespace

TranscriptFormat parse_format(std::string_view tag) {
  if (tag == "tsv") return TranscriptFormat::tsv;
  if (tag == "json") return TranscriptFormat::json;
  throw UsageError("unknown transcript format '" + std::string(tag) + "'");
}

Granularity parse_granularity(std::string_view tag) {
  if (tag == "utterance") return Granularity::utterance;
  if (tag == "dialogue") return Granularity::dialogue;
  throw UsageError("unknown granularity '" + std::string(tag) + "'");
}

std::string_view to_string(Speaker s) { return s == Speaker::A ? "A" : "B"; }

std::string_view to_string(Granularity g) {
  return g == Granularity::utterance ? "utterance" : "dialogue";
}

Transcript parse_transcript(std::istream& in, TranscriptFormat format) {
  return format == TranscriptFormat::tsv ? parse_tsv(in) : parse_json(in);
}

Transcript parse_transcript_file(const std::string& path, TranscriptFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open transcript '" + path + "'");
  return parse_transcript(in, format);
}

std::vector<RawDocument> segment(const std::vector<Dialogue>& dialogues,
                                 Granularity granularity) {
  std::vector<RawDocument> docs;
  for (const Dialogue& d : dialogues) {
    if (granularity == Granularity::utterance) {
      for (const Utterance& u : d.utterances) {
        RawDocument doc;
        doc.doc_id = docs.size();
        doc.source = {d.id, u.turn_index};
        doc.text = u.text;
        doc.gold_label = d.gold_label;
        docs.push_back(std::move(doc));
      }
    } else {
      RawDocument doc;
      doc.doc_id = docs.size();
      doc.source = {d.id, std::nullopt};
      for (const Utterance& u : d.utterances) {
        if (!doc.text.empty()) doc.text += ' ';
        doc.text += u.text;
      }
      doc.gold_label = d.gold_label;
      docs.push_back(std::move(doc));
    }
  }
  return docs;
}

void write_transcript_tsv(std::ostream& out, const std::vector<Dialogue>& dialogues) {
  for (const Dialogue& d : dialogues) {
    if (d.gold_label) out << "#label\t" << d.id << '=' << *d.gold_label << '\n';
    for (const Utterance& u : d.utterances)
      out << d.id << '\t' << to_string(u.speaker) << '\t' << u.text << '\n';
  }
}

}  // namespace dtopics
