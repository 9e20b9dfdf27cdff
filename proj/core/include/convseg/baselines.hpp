#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "convseg/anchors.hpp"
#include "convseg/types.hpp"

namespace convseg {

// Boundaries throughout this header are interior utterance indices t with
// 0 < t < N, each marking the first utterance of a new segment.

struct GreedyParams {
  /// A split is applied only when its gain strictly exceeds tau.
  double tau = 1.0;
  std::size_t max_segments = 20;
  /// Both sides of every split keep at least this many utterances.
  std::size_t min_size = 3;

  void validate() const;
};

/// Gain of splitting the inclusive span [b, e] before index t (b < t <= e):
///   |sum_{b..t-1} w| + |sum_{t..e} w| - |sum_{b..e} w|
/// Never negative (triangle inequality).
double split_gain(std::span<const Embedding> embeddings, std::size_t b, std::size_t e, std::size_t t);

/// Greedy embedding-gain segmentation: repeatedly applies the single best
/// admissible split over all current segments while its gain is > tau and
/// fewer than max_segments exist. Ties go to the smallest t. Returns sorted
/// boundaries.
std::vector<std::size_t> greedy_segment(std::span<const Embedding> embeddings, const GreedyParams& params);

struct TextTilingParams {
  /// Utterances averaged on each side of a gap.
  std::size_t block_size = 3;
  /// Centered moving-average width over gap scores; odd.
  std::size_t smoothing_width = 3;
  /// Valleys deeper than mean - sigmas * stddev (over all valleys) become boundaries.
  double depth_cutoff_sigmas = 0.5;

  void validate() const;
};

struct TextTilingResult {
  std::vector<std::size_t> boundaries;
  /// Set when the call is shorter than 2 * block_size; boundaries are empty then.
  bool too_short = false;
  /// Gap t for t in [block_size, N - block_size]; indexed by t - block_size.
  std::vector<double> gap_scores;
  std::vector<double> smoothed;
  std::vector<double> depths;
};

/// TextTiling-style segmentation over embeddings: gap score = cosine between
/// the mean embeddings of the blocks on either side; depth of a valley =
/// (left peak - valley) + (right peak - valley) after smoothing.
TextTilingResult texttiling_segment(std::span<const Embedding> embeddings, const TextTilingParams& params);

/// Labels each segment with the topic whose best anchor is most similar to
/// the segment's mean embedding, or background when that similarity is below
/// `min_confidence`. Adjacent equal labels are merged. Topic segment scores
/// are that similarity clamped to [0, 1].
SegmentationResult tag_segments_by_anchors(std::span<const std::size_t> boundaries,
                                           std::span<const Embedding> embeddings, const AnchorSet& anchors,
                                           double min_confidence, std::string call_id = {});

}  // namespace convseg
