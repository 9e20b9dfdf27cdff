#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convseg/anchors.hpp"
#include "convseg/baselines.hpp"
#include "convseg/scoring.hpp"
#include "convseg/tagger.hpp"
#include "convseg/temporal.hpp"
#include "convseg/types.hpp"

namespace convseg {

/// The five topics shipped as the default configuration.
const std::vector<std::string>& default_topics();

struct TopicParams {
  std::string name;
  double peak_threshold = 0.5;
  std::size_t window_width = 3;
  double threshold = 0.5;

  friend bool operator==(const TopicParams&, const TopicParams&) = default;
};

/// Full online-phase configuration plus the baseline settings.
///
/// JSON form (every key optional, missing keys keep their defaults):
///   {"temperature": float,
///    "diffusion": {"alpha": float, "lambda": float, "cutoff": int},
///    "topics": [{"name": str, "peak_threshold": float, "window_width": int, "threshold": float}],
///    "min_segment_len": int,
///    "greedy": {"tau": float, "max_segments": int, "min_size": int},
///    "texttiling": {"block_size": int, "smoothing_width": int, "depth_cutoff_sigmas": float},
///    "min_confidence": float}
struct PipelineConfig {
  double temperature = 1.0;
  double alpha = 0.5;
  double lambda = 2.0;
  std::size_t cutoff = 6;
  /// Explicit per-topic settings. Topics not listed use TopicParams defaults
  /// with the built-in window width for their name.
  std::vector<TopicParams> topics;
  std::size_t min_segment_len = 2;

  GreedyParams greedy;
  TextTilingParams texttiling;
  /// Baseline segments whose best anchor similarity is below this are background.
  double min_confidence = 0.3;

  /// Defaults with explicit entries for the five default topics.
  static PipelineConfig defaults();

  /// Parameters for `topic`: the configured entry, else defaults (width 3 for unknown topics).
  TopicParams params_for(std::string_view topic) const;

  DiffusionConfig diffusion_for(std::span<const std::string> topic_order) const;
  TopicWindowConfig windows_for(std::span<const std::string> topic_order) const;

  /// Also rejects listed topics that the anchor set does not know.
  void validate(const AnchorSet& anchors) const;
  void validate() const;
};

PipelineConfig parse_pipeline_config(std::string_view json);
std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path);

/// Every intermediate of one online-phase run.
struct PipelineTrace {
  TopicScoreMatrix scores;
  TopicProbMatrix probs;
  std::vector<HeatSource> sources;
  Matrix diffused;
  TopicProbMatrix smoothed;
  std::vector<CandidateWindow> candidates;
  SegmentationResult result;
};

/// Online phase: score -> softmax -> heat sources -> diffusion -> softmax ->
/// window tagging -> merge/resolve. Errors are rethrown with the failing stage
/// prefixed to the message.
PipelineTrace segment_call_traced(const Transcript& transcript, std::span<const Embedding> embeddings,
                                  const AnchorSet& anchors, const PipelineConfig& cfg);

SegmentationResult segment_call(const Transcript& transcript, std::span<const Embedding> embeddings,
                                const AnchorSet& anchors, const PipelineConfig& cfg);

enum class Method { kGptCalls, kGreedy, kTextTiling };

std::string_view method_name(Method m);
/// Accepts "gptcalls", "greedy", "texttiling".
std::optional<Method> parse_method(std::string_view name);

/// Runs `method` end to end. Baselines are tagged through the anchors.
SegmentationResult run_method(Method method, const Transcript& transcript, std::span<const Embedding> embeddings,
                              const AnchorSet& anchors, const PipelineConfig& cfg);

}  // namespace convseg
