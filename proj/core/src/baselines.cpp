#include "convseg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convseg/error.hpp"
#include "convseg/scoring.hpp"
#include "convseg/vector_ops.hpp"

namespace convseg {

void GreedyParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("greedy tau must be > 0");
  if (max_segments < 1) throw ValidationError("greedy max_segments must be >= 1");
  if (min_size < 1) throw ValidationError("greedy min_size must be >= 1");
}

void TextTilingParams::validate() const {
  if (block_size < 1) throw ValidationError("texttiling block_size must be >= 1");
  if (smoothing_width < 1 || smoothing_width % 2 == 0) {
    throw ValidationError("texttiling smoothing_width must be an odd integer >= 1");
  }
  if (!std::isfinite(depth_cutoff_sigmas)) throw ValidationError("texttiling depth_cutoff_sigmas must be finite");
}

namespace {

// Prefix sums of embedding vectors: sums[i] = w_0 + ... + w_{i-1}.
class PrefixSums {
 public:
  explicit PrefixSums(std::span<const Embedding> embeddings)
      : dim_(embeddings.empty() ? 0 : embeddings.front().dim()), sums_((embeddings.size() + 1) * dim_, 0.0) {
    require_dim(embeddings, dim_, "embedding");
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      const auto v = embeddings[i].values();
      for (std::size_t d = 0; d < dim_; ++d) sums_[(i + 1) * dim_ + d] = sums_[i * dim_ + d] + v[d];
    }
  }

  /// Norm of w_begin + ... + w_{end-1}.
  double range_norm(std::size_t begin, std::size_t end) const {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double x = sums_[end * dim_ + d] - sums_[begin * dim_ + d];
      acc += x * x;
    }
    return std::sqrt(acc);
  }

  std::vector<double> range_sum(std::size_t begin, std::size_t end) const {
    std::vector<double> out(dim_);
    for (std::size_t d = 0; d < dim_; ++d) out[d] = sums_[end * dim_ + d] - sums_[begin * dim_ + d];
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<double> sums_;
};

// Half-open form of the gain: split [begin, end) before t.
double gain(const PrefixSums& sums, std::size_t begin, std::size_t end, std::size_t t) {
  return std::max(0.0, sums.range_norm(begin, t) + sums.range_norm(t, end) - sums.range_norm(begin, end));
}

}  // namespace

double split_gain(std::span<const Embedding> embeddings, std::size_t b, std::size_t e, std::size_t t) {
  if (!(b < t && t <= e && e < embeddings.size())) {
    throw ValidationError("split_gain requires b < t <= e < N, got b=" + std::to_string(b) + " t=" +
                          std::to_string(t) + " e=" + std::to_string(e) + " N=" + std::to_string(embeddings.size()));
  }
  auto sum_norm = [&](std::size_t lo, std::size_t hi) {  // inclusive
    std::vector<double> acc(embeddings[lo].dim(), 0.0);
    for (std::size_t i = lo; i <= hi; ++i) {
      const auto v = embeddings[i].values();
      if (v.size() != acc.size()) throw ValidationError("split_gain: embeddings differ in dimension");
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += v[d];
    }
    return l2_norm(acc);
  };
  return std::max(0.0, sum_norm(b, t - 1) + sum_norm(t, e) - sum_norm(b, e));
}

std::vector<std::size_t> greedy_segment(std::span<const Embedding> embeddings, const GreedyParams& params) {
  params.validate();
  const std::size_t n = embeddings.size();
  if (n == 0) return {};
  const PrefixSums sums(embeddings);

  std::vector<std::size_t> bounds{0, n};  // segment starts plus the end sentinel
  while (bounds.size() - 1 < params.max_segments) {
    double best_gain = -1.0;
    std::size_t best_t = 0;
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      const std::size_t begin = bounds[s];
      const std::size_t end = bounds[s + 1];
      if (end - begin < 2 * params.min_size) continue;
      for (std::size_t t = begin + params.min_size; t + params.min_size <= end; ++t) {
        const double g = gain(sums, begin, end, t);
        if (g > best_gain) {
          best_gain = g;
          best_t = t;
        }
      }
    }
    if (best_gain <= params.tau) break;
    bounds.insert(std::upper_bound(bounds.begin(), bounds.end(), best_t), best_t);
  }
  return {bounds.begin() + 1, bounds.end() - 1};
}

TextTilingResult texttiling_segment(std::span<const Embedding> embeddings, const TextTilingParams& params) {
  params.validate();
  TextTilingResult out;
  const std::size_t n = embeddings.size();
  const std::size_t block = params.block_size;
  if (n < 2 * block) {
    out.too_short = true;
    return out;
  }
  const PrefixSums sums(embeddings);

  for (std::size_t t = block; t + block <= n; ++t) {
    const auto left = sums.range_sum(t - block, t);
    const auto right = sums.range_sum(t, t + block);
    const double nl = l2_norm(left);
    const double nr = l2_norm(right);
    out.gap_scores.push_back(nl > 0.0 && nr > 0.0 ? std::clamp(dot(left, right) / (nl * nr), -1.0, 1.0) : 0.0);
  }

  const std::size_t m = out.gap_scores.size();
  const std::size_t half = params.smoothing_width / 2;
  out.smoothed.resize(m);
  for (std::size_t g = 0; g < m; ++g) {
    const std::size_t lo = g >= half ? g - half : 0;
    const std::size_t hi = std::min(m - 1, g + half);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += out.gap_scores[j];
    out.smoothed[g] = acc / static_cast<double>(hi - lo + 1);
  }

  // Depth at valleys only: first index of a plateau lying strictly below the
  // peaks reached by climbing outward on both sides.
  out.depths.assign(m, 0.0);
  std::vector<std::size_t> valleys;
  const auto& s = out.smoothed;
  for (std::size_t g = 0; g < m; ++g) {
    if (g > 0 && s[g - 1] == s[g]) continue;
    double left_peak = s[g];
    for (std::size_t j = g; j-- > 0 && s[j] >= left_peak;) left_peak = s[j];
    double right_peak = s[g];
    for (std::size_t j = g + 1; j < m && s[j] >= right_peak; ++j) right_peak = s[j];
    if (left_peak > s[g] && right_peak > s[g]) {
      out.depths[g] = (left_peak - s[g]) + (right_peak - s[g]);
      valleys.push_back(g);
    }
  }
  if (valleys.empty()) return out;

  double mean = 0.0;
  for (std::size_t g : valleys) mean += out.depths[g];
  mean /= static_cast<double>(valleys.size());
  double var = 0.0;
  for (std::size_t g : valleys) var += (out.depths[g] - mean) * (out.depths[g] - mean);
  const double stddev = std::sqrt(var / static_cast<double>(valleys.size()));
  const double cutoff = mean - params.depth_cutoff_sigmas * stddev;
  for (std::size_t g : valleys) {
    if (out.depths[g] >= cutoff - 1e-12) out.boundaries.push_back(g + block);
  }
  return out;
}

SegmentationResult tag_segments_by_anchors(std::span<const std::size_t> boundaries,
                                           std::span<const Embedding> embeddings, const AnchorSet& anchors,
                                           double min_confidence, std::string call_id) {
  const std::size_t n = embeddings.size();
  if (n == 0) throw ValidationError("cannot tag an empty call");
  require_dim(embeddings, anchors.dim, "utterance embedding");
  std::vector<std::size_t> cuts{0};
  for (std::size_t b : boundaries) {
    if (b <= cuts.back() || b >= n) throw ValidationError("boundaries must be strictly increasing interior indices");
    cuts.push_back(b);
  }
  cuts.push_back(n);

  const PrefixSums sums(embeddings);
  std::vector<std::string> labels(n);
  std::vector<double> scores(n, 0.0);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const std::vector<double> mean = sums.range_sum(cuts[s], cuts[s + 1]);
    std::string label(kBackground);
    double score = 0.0;
    if (l2_norm(mean) > 0.0) {
      const Embedding centroid = Embedding::unit(mean);
      double best = -2.0;
      std::size_t best_topic = 0;
      for (std::size_t c = 0; c < anchors.topics.size(); ++c) {
        const double sim = utterance_topic_score(centroid, anchors.topics[c].anchors);
        if (sim > best) {
          best = sim;
          best_topic = c;
        }
      }
      if (best >= min_confidence) {
        label = anchors.topics[best_topic].topic;
        score = std::clamp(best, 0.0, 1.0);
      }
    }
    for (std::size_t i = cuts[s]; i < cuts[s + 1]; ++i) {
      labels[i] = label;
      scores[i] = score;
    }
  }

  SegmentationResult result = segmentation_from_labels(std::move(call_id), labels);
  for (Segment& seg : result.segments) {
    if (seg.is_background()) continue;
    double acc = 0.0;  // length-weighted when merged pieces had different scores
    for (std::size_t i = seg.start; i < seg.end; ++i) acc += scores[i];
    seg.score = std::clamp(acc / static_cast<double>(seg.length()), 0.0, 1.0);
  }
  return result;
}

}  // namespace convseg
