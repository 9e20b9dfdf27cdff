#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "convseg/scoring.hpp"

namespace convseg {

/// A local probability peak of one topic column.
struct HeatSource {
  std::size_t topic = 0;
  std::size_t utterance = 0;
  double value = 0.0;

  friend bool operator==(const HeatSource&, const HeatSource&) = default;
};

struct DiffusionConfig {
  /// Weight of a neighboring source's contribution.
  double alpha = 0.5;
  /// Decay length of the exp(-d / lambda) kernel, in utterances.
  double lambda = 2.0;
  /// Sources further than this many utterances have no influence.
  std::size_t cutoff = 6;
  /// Per-topic minimum peak value, aligned with topic order. Empty means
  /// `default_peak_threshold` for every topic.
  std::vector<double> peak_thresholds;
  double default_peak_threshold = 0.5;

  double peak_threshold(std::size_t topic) const {
    return peak_thresholds.empty() ? default_peak_threshold : peak_thresholds.at(topic);
  }

  void validate(std::size_t num_topics) const;
};

/// Per topic column, indices whose value reaches the topic's threshold and is a
/// local maximum: strictly above both neighbors (one at the ends). On a
/// plateau only its first index can qualify, judged against the values just
/// before and after the plateau. Sources are ordered by topic, then utterance.
std::vector<HeatSource> detect_heat_sources(const TopicProbMatrix& probs, const DiffusionConfig& cfg);

/// adjusted[i][c] = probs[i][c] + alpha * (v_L exp(-d_L/lambda) + v_R exp(-d_R/lambda))
/// where L and R are the nearest topic-c sources strictly left and right of i
/// within `cutoff`. A missing side contributes nothing; a source never counts
/// as its own neighbor. The result is not normalized.
Matrix diffuse(const TopicProbMatrix& probs, std::span<const HeatSource> sources, const DiffusionConfig& cfg);

/// Row-wise softmax of the diffused scores back into probabilities.
TopicProbMatrix renormalize(const TopicProbMatrix& like, const Matrix& adjusted, double temperature = 1.0);

}  // namespace convseg
