#include "convseg/json_io.hpp"

#include <fstream>
#include <sstream>

#include "convseg/error.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Transcript parse_transcript(std::string_view text) {
  const json doc = detail::parse_json(text, "transcript");
  Transcript t;
  t.call_id = detail::require_as<std::string>(doc, "call_id", "transcript");
  const json& utts = detail::require(doc, "utterances", "transcript");
  if (!utts.is_array()) throw ValidationError("transcript.utterances is not an array");
  for (const json& u : utts) {
    Utterance utt;
    utt.index = detail::require_as<std::size_t>(u, "index", "utterance");
    utt.text = detail::require_as<std::string>(u, "text", "utterance");
    if (auto it = u.find("speaker"); it != u.end() && !it->is_null()) {
      utt.speaker = detail::get_as<std::string>(*it, "utterance.speaker");
    }
    if (auto it = u.find("start_ms"); it != u.end() && !it->is_null()) {
      utt.start_ms = detail::get_as<std::int64_t>(*it, "utterance.start_ms");
    }
    if (auto it = u.find("end_ms"); it != u.end() && !it->is_null()) {
      utt.end_ms = detail::get_as<std::int64_t>(*it, "utterance.end_ms");
    }
    t.utterances.push_back(std::move(utt));
  }
  t.validate();
  return t;
}

std::string transcript_to_json(const Transcript& t) {
  json utts = json::array();
  for (const Utterance& u : t.utterances) {
    json j = {{"index", u.index}, {"text", u.text}};
    if (u.speaker) j["speaker"] = *u.speaker;
    if (u.start_ms) j["start_ms"] = *u.start_ms;
    if (u.end_ms) j["end_ms"] = *u.end_ms;
    utts.push_back(std::move(j));
  }
  return json{{"call_id", t.call_id}, {"utterances", std::move(utts)}}.dump(2);
}

Transcript load_transcript(const std::filesystem::path& path) { return parse_transcript(read_text_file(path)); }

void save_transcript(const Transcript& t, const std::filesystem::path& path) {
  write_text_file(path, transcript_to_json(t));
}

SegmentationResult parse_segmentation(std::string_view text) {
  const json doc = detail::parse_json(text, "segmentation");
  SegmentationResult r;
  r.call_id = detail::require_as<std::string>(doc, "call_id", "segmentation");
  const json& segs = detail::require(doc, "segments", "segmentation");
  if (!segs.is_array()) throw ValidationError("segmentation.segments is not an array");
  for (const json& s : segs) {
    Segment seg;
    seg.start = detail::require_as<std::size_t>(s, "start", "segment");
    seg.end = detail::require_as<std::size_t>(s, "end", "segment");
    seg.label = detail::require_as<std::string>(s, "label", "segment");
    seg.score = detail::require_as<double>(s, "score", "segment");
    r.segments.push_back(std::move(seg));
  }
  r.validate();
  return r;
}

std::string segmentation_to_json(const SegmentationResult& r) {
  json segs = json::array();
  for (const Segment& s : r.segments) {
    segs.push_back({{"start", s.start}, {"end", s.end}, {"label", s.label}, {"score", s.score}});
  }
  return json{{"call_id", r.call_id}, {"segments", std::move(segs)}}.dump(2);
}

SegmentationResult load_segmentation(const std::filesystem::path& path) {
  return parse_segmentation(read_text_file(path));
}

void save_segmentation(const SegmentationResult& r, const std::filesystem::path& path) {
  write_text_file(path, segmentation_to_json(r));
}

EmbeddingSidecar parse_sidecar(std::string_view text) {
  const json doc = detail::parse_json(text, "embedding sidecar");
  EmbeddingSidecar s;
  s.call_id = detail::require_as<std::string>(doc, "call_id", "embedding sidecar");
  s.dim = detail::require_as<std::size_t>(doc, "dim", "embedding sidecar");
  if (s.dim == 0) throw ValidationError("embedding sidecar has dim 0");
  const json& vecs = detail::require(doc, "vectors", "embedding sidecar");
  if (!vecs.is_array()) throw ValidationError("embedding sidecar.vectors is not an array");
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    std::vector<double> v = detail::to_vector(vecs[i], "embedding sidecar vector");
    if (v.size() != s.dim) {
      throw ValidationError("embedding sidecar vector " + std::to_string(i) + " has length " +
                            std::to_string(v.size()) + ", expected " + std::to_string(s.dim));
    }
    s.vectors.push_back(Embedding::unit(v));
  }
  return s;
}

std::string sidecar_to_json(const EmbeddingSidecar& s) {
  json vecs = json::array();
  for (const Embedding& e : s.vectors) vecs.push_back(std::vector<double>(e.values().begin(), e.values().end()));
  return json{{"call_id", s.call_id}, {"dim", s.dim}, {"vectors", std::move(vecs)}}.dump();
}

EmbeddingSidecar load_sidecar(const std::filesystem::path& path) { return parse_sidecar(read_text_file(path)); }

void save_sidecar(const EmbeddingSidecar& s, const std::filesystem::path& path) {
  write_text_file(path, sidecar_to_json(s));
}

}  // namespace convseg
