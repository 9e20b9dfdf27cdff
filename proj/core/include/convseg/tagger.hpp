#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convseg/scoring.hpp"
#include "convseg/types.hpp"

namespace convseg {

struct TopicWindow {
  /// Window width in utterances; clamped to the call length at run time.
  std::size_t width = 3;
  /// A window is tagged when its mean probability strictly exceeds this.
  double threshold = 0.5;

  friend bool operator==(const TopicWindow&, const TopicWindow&) = default;
};

struct TopicWindowConfig {
  /// One entry per topic, aligned with the probability matrix columns.
  std::vector<TopicWindow> topics;
  /// Shortest topic segment kept after overlap resolution (clamped to N).
  std::size_t min_segment_len = 2;

  void validate(std::size_t num_topics) const;
};

struct CandidateWindow {
  std::size_t topic = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  double score = 0.0;

  friend bool operator==(const CandidateWindow&, const CandidateWindow&) = default;
};

/// Stride-1 sliding windows per topic; emits every window whose mean topic
/// probability is > the topic threshold. Ordered by topic, then start.
std::vector<CandidateWindow> tag_windows(const TopicProbMatrix& probs, const TopicWindowConfig& cfg);

/// Turns candidate windows into a full labeled partition of the call:
///  1. per topic, overlapping or touching windows are unioned into runs,
///     each scored by its mean topic probability;
///  2. runs claim free utterances in descending score order (ties: earlier
///     start, then lower topic index); claimed fragments shorter than
///     min_segment_len are released again;
///  3. whatever stays free becomes background;
///  4. adjacent segments with equal labels are merged.
/// Topic segments are scored by their mean topic probability, background by 0.
SegmentationResult merge_and_resolve(std::span<const CandidateWindow> candidates, const TopicProbMatrix& probs,
                                     const TopicWindowConfig& cfg);

}  // namespace convseg
