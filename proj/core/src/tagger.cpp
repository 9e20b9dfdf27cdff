#include "convseg/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convseg/error.hpp"

namespace convseg {

void TopicWindowConfig::validate(std::size_t num_topics) const {
  if (topics.size() != num_topics) {
    throw ValidationError("window config has " + std::to_string(topics.size()) + " topics, expected " +
                          std::to_string(num_topics));
  }
  for (const TopicWindow& w : topics) {
    if (w.width < 1) throw ValidationError("window width must be >= 1");
    if (!(w.threshold > 0.0 && w.threshold < 1.0)) throw ValidationError("window threshold must lie in (0, 1)");
  }
  if (min_segment_len < 1) throw ValidationError("min_segment_len must be >= 1");
}

namespace {

// prefix[c][i] = sum of probs[0..i) of column c
std::vector<std::vector<double>> column_prefix_sums(const TopicProbMatrix& probs) {
  std::vector<std::vector<double>> prefix(probs.num_topics(), std::vector<double>(probs.num_utterances() + 1, 0.0));
  for (std::size_t c = 0; c < probs.num_topics(); ++c) {
    for (std::size_t i = 0; i < probs.num_utterances(); ++i) prefix[c][i + 1] = prefix[c][i] + probs.probs(i, c);
  }
  return prefix;
}

double span_mean(const std::vector<double>& prefix, std::size_t start, std::size_t end) {
  return (prefix[end] - prefix[start]) / static_cast<double>(end - start);
}

}  // namespace

std::vector<CandidateWindow> tag_windows(const TopicProbMatrix& probs, const TopicWindowConfig& cfg) {
  cfg.validate(probs.num_topics());
  const std::size_t n = probs.num_utterances();
  std::vector<CandidateWindow> out;
  for (std::size_t c = 0; c < probs.num_topics(); ++c) {
    const std::size_t w = std::min(cfg.topics[c].width, n);
    for (std::size_t s = 0; s + w <= n; ++s) {
      // summed directly so a mean sitting exactly on the threshold compares exactly
      double sum = 0.0;
      for (std::size_t i = s; i < s + w; ++i) sum += probs.probs(i, c);
      const double mean = sum / static_cast<double>(w);
      if (mean > cfg.topics[c].threshold) out.push_back({c, s, s + w, mean});
    }
  }
  return out;
}

SegmentationResult merge_and_resolve(std::span<const CandidateWindow> candidates, const TopicProbMatrix& probs,
                                     const TopicWindowConfig& cfg) {
  cfg.validate(probs.num_topics());
  const std::size_t n = probs.num_utterances();
  if (n == 0) throw ValidationError("cannot segment an empty call");
  const auto prefix = column_prefix_sums(probs);

  struct Run {
    std::size_t topic, start, end;
    double score;
  };

  // 1. same-topic union
  std::vector<CandidateWindow> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), [](const CandidateWindow& a, const CandidateWindow& b) {
    return a.topic != b.topic ? a.topic < b.topic : a.start < b.start;
  });
  std::vector<Run> runs;
  for (const CandidateWindow& w : sorted) {
    if (w.topic >= probs.num_topics() || w.end > n || w.start >= w.end) {
      throw ValidationError("candidate window outside the call");
    }
    if (!runs.empty() && runs.back().topic == w.topic && w.start <= runs.back().end) {
      runs.back().end = std::max(runs.back().end, w.end);
    } else {
      runs.push_back({w.topic, w.start, w.end, 0.0});
    }
  }
  for (Run& r : runs) r.score = span_mean(prefix[r.topic], r.start, r.end);

  // 2. claim in descending score
  std::stable_sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start != b.start) return a.start < b.start;
    return a.topic < b.topic;
  });
  const std::size_t min_len = std::min(cfg.min_segment_len, n);
  constexpr std::ptrdiff_t kFree = -1;
  std::vector<std::ptrdiff_t> owner(n, kFree);
  for (const Run& r : runs) {
    std::size_t i = r.start;
    while (i < r.end) {
      if (owner[i] != kFree) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < r.end && owner[j] == kFree) ++j;
      if (j - i >= min_len) std::fill(owner.begin() + i, owner.begin() + j, static_cast<std::ptrdiff_t>(r.topic));
      i = j;
    }
  }

  // 3-4. background fill, merge equal neighbours, score
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = owner[i] == kFree ? std::string(kBackground) : probs.topics[static_cast<std::size_t>(owner[i])];
  }
  SegmentationResult result = segmentation_from_labels(probs.call_id, labels);
  for (Segment& s : result.segments) {
    if (s.is_background()) continue;
    const auto c = static_cast<std::size_t>(owner[s.start]);
    s.score = std::clamp(span_mean(prefix[c], s.start, s.end), 0.0, 1.0);
  }
  return result;
}

}  // namespace convseg
