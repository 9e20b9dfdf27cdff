#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convseg/types.hpp"

namespace convseg {

// Metric conventions. A boundary "at position p" (0 <= p < N-1) means
// utterances p and p+1 belong to different segments. For every window start
// i in [0, N-k] (N-k+1 placements):
//   Pk         penalizes i when the two sequences disagree on whether
//              utterances i and i+k share a segment (i+k == N counts as part
//              of the last segment);
//   WindowDiff penalizes i when the sequences disagree on the number of
//              boundaries at positions i..i+k inclusive.
// Both return penalties / (N-k+1) and require equal lengths and 1 <= k < N.
// Labels only matter through where they change.

double pk(std::span<const std::string> ref, std::span<const std::string> hyp, std::size_t k);
double window_diff(std::span<const std::string> ref, std::span<const std::string> hyp, std::size_t k);

double pk(const SegmentationResult& ref, const SegmentationResult& hyp, std::size_t k);
double window_diff(const SegmentationResult& ref, const SegmentationResult& hyp, std::size_t k);

/// max(2, round(n / (2 * num_segments))), clamped to n - 1 so it stays a
/// valid window for n >= 2.
std::size_t default_k(std::size_t n, std::size_t num_segments);
std::size_t default_k(const SegmentationResult& ref);

/// Labels equal to `topic` stay, everything else becomes background.
std::vector<std::string> binarize(std::span<const std::string> labels, const std::string& topic);

struct TopicMetrics {
  double pk = 0.0;
  double window_diff = 0.0;
  std::size_t k = 0;
  /// Topic appears in neither sequence; metrics are reported as 0.
  bool absent = false;
};

/// Metrics of the {topic, background} binarization of both segmentations.
/// k defaults to default_k of the binarized reference.
TopicMetrics per_topic_eval(const SegmentationResult& ref, const SegmentationResult& hyp, const std::string& topic,
                            std::optional<std::size_t> k = std::nullopt);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> values);

struct CallMetrics {
  std::string call_id;
  std::size_t num_utterances = 0;
  std::size_t k = 0;
  double pk = 0.0;
  double window_diff = 0.0;
  std::map<std::string, TopicMetrics> per_topic;
};

struct TopicSummary {
  MeanStd pk;
  MeanStd window_diff;
  /// Calls where the topic appeared in neither reference nor hypothesis; excluded from the means.
  std::size_t absent_calls = 0;
};

struct MetricReport {
  MeanStd pk;
  MeanStd window_diff;
  std::map<std::string, TopicSummary> per_topic;
  std::vector<std::string> topic_order;
  std::vector<CallMetrics> per_call;

  /// {"overall": {"pk": {"mean","std"}, "windowdiff": {...}}, "per_topic": {...}, "per_call": [...]}
  std::string to_json() const;
  /// Aligned plain-text table: one overall row, plus a per-topic table with
  /// topics as columns and "Pk/WinDiff" cells when per-topic data exists.
  std::string to_text() const;
};

struct ReportOptions {
  /// Overrides default_k everywhere when set.
  std::optional<std::size_t> k;
  /// Topics for per-topic evaluation; empty disables it.
  std::vector<std::string> topics;
};

/// Metrics for a single (reference, hypothesis) pair. Calls with N == 1 score 0.
CallMetrics evaluate_call(const SegmentationResult& ref, const SegmentationResult& hyp, const ReportOptions& options);

/// Per-call metrics plus mean and population standard deviation across calls.
MetricReport corpus_report(std::span<const std::pair<SegmentationResult, SegmentationResult>> pairs,
                           const ReportOptions& options = {});

/// Builds a report from already computed per-call metrics.
MetricReport summarize(std::vector<CallMetrics> calls, std::vector<std::string> topics);

}  // namespace convseg
