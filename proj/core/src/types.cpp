#include "convseg/types.hpp"

#include <cmath>
#include <set>

#include "convseg/error.hpp"
#include "convseg/vector_ops.hpp"

namespace convseg {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("embedding has zero dimensions");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("embedding has a non-finite entry");
  }
}

Embedding Embedding::unit(std::span<const double> values) { return Embedding(normalized(values)); }

double Embedding::norm() const { return l2_norm(values_); }

bool Embedding::is_unit(double tol) const { return std::abs(norm() - 1.0) <= tol; }

void require_dim(std::span<const Embedding> embeddings, std::size_t dim, std::string_view what) {
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].dim() != dim) {
      throw ValidationError(std::string(what) + "[" + std::to_string(i) + "] has dimension " +
                            std::to_string(embeddings[i].dim()) + ", expected " + std::to_string(dim));
    }
  }
}

void Transcript::validate() const {
  if (utterances.empty()) throw ValidationError("transcript '" + call_id + "' has no utterances");
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Utterance& u = utterances[i];
    if (u.index != i) {
      throw ValidationError("transcript '" + call_id + "': utterance at position " + std::to_string(i) +
                            " has index " + std::to_string(u.index));
    }
    if (u.start_ms && u.end_ms && *u.end_ms < *u.start_ms) {
      throw ValidationError("transcript '" + call_id + "': utterance " + std::to_string(i) +
                            " ends before it starts");
    }
  }
}

void validate_topic_name(std::string_view name) {
  if (name.empty()) throw ValidationError("topic name is empty");
  if (name == kBackground) {
    throw ValidationError("topic name '" + std::string(name) + "' is reserved");
  }
}

void validate_topic_names(std::span<const std::string> names) {
  std::set<std::string_view> seen;
  for (const std::string& n : names) {
    validate_topic_name(n);
    if (!seen.insert(n).second) throw ValidationError("duplicate topic '" + n + "'");
  }
}

std::size_t SegmentationResult::num_utterances() const noexcept {
  return segments.empty() ? 0 : segments.back().end;
}

void SegmentationResult::validate(std::size_t n) const {
  if (segments.empty()) throw ValidationError("segmentation '" + call_id + "' is empty");
  std::size_t expected_start = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const std::string where = "segmentation '" + call_id + "' segment " + std::to_string(i);
    if (s.start != expected_start) {
      throw ValidationError(where + (s.start > expected_start ? " leaves a gap" : " overlaps its predecessor"));
    }
    if (s.end <= s.start) throw ValidationError(where + " is empty");
    if (s.label.empty()) throw ValidationError(where + " has an empty label");
    if (i > 0 && segments[i - 1].label == s.label) {
      throw ValidationError(where + " repeats the label '" + s.label + "' of its predecessor");
    }
    if (!(s.score >= 0.0 && s.score <= 1.0)) throw ValidationError(where + " has a score outside [0, 1]");
    expected_start = s.end;
  }
  if (expected_start != n) {
    throw ValidationError("segmentation '" + call_id + "' covers " + std::to_string(expected_start) +
                          " utterances, expected " + std::to_string(n));
  }
}

std::vector<std::string> SegmentationResult::labels() const {
  std::vector<std::string> out;
  out.reserve(num_utterances());
  for (const Segment& s : segments) out.insert(out.end(), s.length(), s.label);
  return out;
}

SegmentationResult segmentation_from_labels(std::string call_id, std::span<const std::string> labels) {
  SegmentationResult result{std::move(call_id), {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!result.segments.empty() && result.segments.back().label == labels[i]) {
      result.segments.back().end = i + 1;
    } else {
      result.segments.push_back(Segment{i, i + 1, labels[i], 0.0});
    }
  }
  return result;
}

}  // namespace convseg
