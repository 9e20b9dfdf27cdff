#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "convseg/anchors.hpp"
#include "convseg/types.hpp"

namespace convseg {

struct PlanSegment {
  std::string label;  // topic name or kBackground
  std::size_t length = 0;

  friend bool operator==(const PlanSegment&, const PlanSegment&) = default;
};

/// A planted call: labeled spans, per-coordinate gaussian noise scale, seed.
struct CallPlan {
  std::vector<PlanSegment> segments;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t total_length() const noexcept;
  void validate() const;

  friend bool operator==(const CallPlan&, const CallPlan&) = default;
};

/// Random plans: segment count in segments_range, lengths in len_range (both
/// inclusive), each segment background with probability background_prob
/// (never two in a row), otherwise a topic different from the previous one.
struct PlanDistribution {
  std::vector<std::string> topics;
  std::size_t len_min = 5;
  std::size_t len_max = 12;
  std::size_t segments_min = 3;
  std::size_t segments_max = 7;
  double background_prob = 0.2;
  double noise_sigma = 0.2;

  void validate() const;
  CallPlan sample(std::uint64_t seed) const;
};

/// Either a fixed plan ({"segments": [{"label","len"}], "noise_sigma"}) or a
/// distribution ({"topics", "len_range", "segments_range", "background_prob", "noise_sigma"?}).
using CorpusSpec = std::variant<CallPlan, PlanDistribution>;

CorpusSpec parse_corpus_spec(std::string_view json);
CorpusSpec load_corpus_spec(const std::filesystem::path& path);
std::string corpus_spec_to_json(const CorpusSpec& spec);

struct SyntheticCall {
  Transcript transcript;
  std::vector<Embedding> embeddings;
  SegmentationResult gold;
};

/// Topic utterances are normalize(random anchor of the topic + N(0, sigma^2)
/// per coordinate). Background utterances start from a random direction
/// orthogonal to every anchor, then get the same noise. Deterministic in plan.seed.
SyntheticCall generate_call(const CallPlan& plan, const AnchorSet& anchors, std::string call_id);

struct ManifestEntry {
  std::string call_id;
  std::string transcript;  // paths relative to the manifest directory
  std::string embeddings;
  std::string gold;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// {"seed": int, "calls": [{"call_id", "transcript", "embeddings", "gold"}]}
struct CorpusManifest {
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> calls;

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

CorpusManifest parse_manifest(std::string_view json);
std::string manifest_to_json(const CorpusManifest& manifest);
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Call j uses seed + j, both for sampling its plan and for its noise.
/// Writes <call_id>.transcript.json, .embeddings.json, .gold.json and manifest.json.
CorpusManifest generate_corpus(const CorpusSpec& spec, const AnchorSet& anchors, std::size_t count,
                               std::uint64_t seed, const std::filesystem::path& out_dir);

/// One manifest entry loaded from disk.
struct CorpusCall {
  Transcript transcript;
  std::vector<Embedding> embeddings;
  SegmentationResult gold;
};

CorpusCall load_corpus_call(const std::filesystem::path& manifest_dir, const ManifestEntry& entry);

/// One line of a sentence corpus: raw text to embed, or a ready vector.
using SentenceItem = std::variant<std::string, std::vector<double>>;

struct TopicSentences {
  std::string topic;
  std::vector<SentenceItem> items;
};

/// JSONL, one {"topic": str, "text": str} or {"topic": str, "vector": [float]}
/// per line. Blank lines are skipped, unknown fields ignored. Groups keep
/// first-appearance topic order and input order within a topic.
std::vector<TopicSentences> parse_sentence_corpus(std::string_view jsonl);
std::vector<TopicSentences> load_sentence_corpus(const std::filesystem::path& path);

/// Synthetic stand-in for an LLM-generated sentence corpus: every topic owns
/// `directions_per_topic` orthonormal directions (orthogonal across topics
/// too); sentences are normalize(direction + N(0, spread^2)) plus a few
/// uniformly random outliers per topic.
struct PlantedCorpusSpec {
  std::vector<std::string> topics;
  std::size_t dim = kDefaultDim;
  std::size_t directions_per_topic = 2;
  std::size_t sentences_per_direction = 40;
  double spread = 0.02;
  std::size_t outliers_per_topic = 3;
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  std::vector<TopicCorpus> corpus;
  std::map<std::string, std::vector<Embedding>> directions;
};

PlantedCorpus make_planted_corpus(const PlantedCorpusSpec& spec);

/// Writes pre-embedded JSONL lines ({"topic", "vector"}).
std::string sentence_corpus_to_jsonl(const std::vector<TopicCorpus>& corpus);

/// The corpus used by the benchmark and acceptance runs: the five default
/// topics, planted sentence corpus with seed `anchor_seed` clustered with
/// default DBSCAN parameters, and a PlanDistribution at sigma 0.2.
struct DefaultBenchmark {
  PlantedCorpusSpec sentences;
  PlanDistribution plans;
  std::size_t count = 50;
  std::uint64_t seed = 1000;
};

DefaultBenchmark default_benchmark();

}  // namespace convseg
