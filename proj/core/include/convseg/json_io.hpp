#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "convseg/types.hpp"

namespace convseg {

/// Whole-file helpers. Failures raise IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Transcript JSON:
//   {"call_id": str, "utterances": [{"index": int, "text": str,
//     "speaker": str?, "start_ms": int?, "end_ms": int?}]}
Transcript parse_transcript(std::string_view json);
std::string transcript_to_json(const Transcript& transcript);
Transcript load_transcript(const std::filesystem::path& path);
void save_transcript(const Transcript& transcript, const std::filesystem::path& path);

// Segmentation JSON:
//   {"call_id": str, "segments": [{"start": int, "end": int, "label": str, "score": float}]}
// `end` is exclusive. Parsing validates the partition invariants.
SegmentationResult parse_segmentation(std::string_view json);
std::string segmentation_to_json(const SegmentationResult& result);
SegmentationResult load_segmentation(const std::filesystem::path& path);
void save_segmentation(const SegmentationResult& result, const std::filesystem::path& path);

/// Per-call embedding sidecar: {"call_id": str, "dim": int, "vectors": [[float]]},
/// vectors[i] belongs to utterance i. Vectors are unit-normalized on parse.
struct EmbeddingSidecar {
  std::string call_id;
  std::size_t dim = 0;
  std::vector<Embedding> vectors;
};

EmbeddingSidecar parse_sidecar(std::string_view json);
std::string sidecar_to_json(const EmbeddingSidecar& sidecar);
EmbeddingSidecar load_sidecar(const std::filesystem::path& path);
void save_sidecar(const EmbeddingSidecar& sidecar, const std::filesystem::path& path);

}  // namespace convseg
