#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace convseg {

inline constexpr std::size_t kDefaultDim = 384;

/// Reserved label for spans that carry no topic. Never a valid topic name.
inline constexpr std::string_view kBackground = "background";

/// Fixed-dimension sentence/utterance vector with finite entries.
class Embedding {
 public:
  Embedding() = default;
  /// Throws ValidationError if `values` is empty or holds a non-finite entry.
  explicit Embedding(std::vector<double> values);

  /// Builds a unit-normalized embedding. Throws on zero norm.
  static Embedding unit(std::span<const double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  bool is_unit(double tol = 1e-6) const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

/// Checks that every embedding has dimension `dim`; throws ValidationError naming `what`.
void require_dim(std::span<const Embedding> embeddings, std::size_t dim, std::string_view what);

struct Utterance {
  std::size_t index = 0;
  std::string text;
  std::optional<std::string> speaker;
  std::optional<std::int64_t> start_ms;
  std::optional<std::int64_t> end_ms;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Transcript {
  std::string call_id;
  std::vector<Utterance> utterances;

  std::size_t size() const noexcept { return utterances.size(); }

  /// N >= 1, indices 0..N-1 in order, end_ms >= start_ms where both are set.
  void validate() const;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Topic names must be non-empty and must not collide with kBackground.
void validate_topic_name(std::string_view name);

/// Checks non-empty, non-reserved and unique names.
void validate_topic_names(std::span<const std::string> names);

/// Half-open utterance span [start, end) with a topic name or kBackground.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;
  double score = 0.0;

  std::size_t length() const noexcept { return end - start; }
  bool is_background() const noexcept { return label == kBackground; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationResult {
  std::string call_id;
  std::vector<Segment> segments;

  /// Total covered length (end of the last segment), 0 when empty.
  std::size_t num_utterances() const noexcept;

  /// Segments must partition [0, n) with no adjacent equal labels, start < end,
  /// score in [0, 1], and non-empty labels. Throws ValidationError otherwise.
  void validate(std::size_t n) const;
  void validate() const { validate(num_utterances()); }

  /// One label per utterance.
  std::vector<std::string> labels() const;

  friend bool operator==(const SegmentationResult&, const SegmentationResult&) = default;
};

/// Collapses a per-utterance label sequence into maximal runs. Scores are 0.
SegmentationResult segmentation_from_labels(std::string call_id, std::span<const std::string> labels);

}  // namespace convseg
