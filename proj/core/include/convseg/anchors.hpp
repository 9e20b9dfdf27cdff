#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convseg/types.hpp"

namespace convseg {

/// DBSCAN over cosine distance (1 - cosine). A point is core when at least
/// `min_pts` points, itself included, lie within `eps`.
struct DbscanParams {
  double eps = 0.25;
  std::size_t min_pts = 5;

  void validate() const;

  friend bool operator==(const DbscanParams&, const DbscanParams&) = default;
};

inline constexpr int kNoiseLabel = -1;

/// Classic DBSCAN. Returns one label per point: a cluster id (0, 1, ... in
/// order of the first core point met while scanning the input) or kNoiseLabel.
/// Border points reachable from several clusters join the first one expanded.
std::vector<int> dbscan(std::span<const Embedding> points, const DbscanParams& params);

struct TopicAnchors {
  std::string topic;
  /// Unit-normalized cluster means, largest cluster first.
  std::vector<Embedding> anchors;
  std::vector<std::size_t> cluster_sizes;
  DbscanParams params;
  /// True when DBSCAN found no cluster and the single anchor is the mean of every point.
  bool fallback = false;
  std::size_t num_points = 0;
  std::size_t noise_count = 0;

  double noise_fraction() const noexcept {
    return num_points == 0 ? 0.0 : static_cast<double>(noise_count) / static_cast<double>(num_points);
  }

  friend bool operator==(const TopicAnchors&, const TopicAnchors&) = default;
};

struct AnchorSet {
  std::size_t dim = 0;
  std::vector<TopicAnchors> topics;

  /// At least one topic, valid unique names, >= 1 unit anchor of length dim per
  /// topic, and cluster_sizes aligned with anchors.
  void validate() const;

  std::vector<std::string> topic_names() const;
  /// Index of `name` in topic order, or -1.
  int find(std::string_view name) const;

  friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

/// Embeddings of one topic's synthetic sentences.
struct TopicCorpus {
  std::string topic;
  std::vector<Embedding> embeddings;
};

/// Offline phase: cluster each topic's embeddings and keep each cluster's
/// normalized mean as an anchor. Noise points are discarded. A topic whose
/// points are all noise falls back to one anchor at the mean of all its points.
/// `overrides` replaces `defaults` for the named topics.
AnchorSet extract_anchors(std::span<const TopicCorpus> corpus, const DbscanParams& defaults = {},
                          const std::map<std::string, DbscanParams>& overrides = {});

inline constexpr std::string_view kAnchorFormatVersion = "1";

// AnchorSet JSON:
//   {"version": "1", "dim": int, "topics": [{"name": str, "anchors": [[float]],
//     "cluster_sizes": [int], "eps": float, "min_pts": int, "fallback": bool}]}
// "num_points" and "noise_count" are written as extra per-topic fields and are optional on read.
AnchorSet parse_anchor_set(std::string_view json);
std::string anchor_set_to_json(const AnchorSet& anchors);
AnchorSet load_anchor_set(const std::filesystem::path& path);
void save_anchor_set(const AnchorSet& anchors, const std::filesystem::path& path);

}  // namespace convseg
