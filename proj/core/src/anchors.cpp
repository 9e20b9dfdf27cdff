#include "convseg/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "convseg/error.hpp"
#include "convseg/json_io.hpp"
#include "convseg/vector_ops.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

void DbscanParams::validate() const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError("DBSCAN eps must be a finite value >= 0");
  if (min_pts < 1) throw ValidationError("DBSCAN min_pts must be >= 1");
}

namespace {

// Neighbor lists under cosine distance, each point included in its own list.
std::vector<std::vector<std::size_t>> cosine_neighborhoods(std::span<const Embedding> points, double eps) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> unit;
  unit.reserve(n);
  for (const Embedding& p : points) unit.push_back(normalized(p.values()));

  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    nbrs[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = 1.0 - std::clamp(dot(unit[i], unit[j]), -1.0, 1.0);
      if (dist <= eps) {
        nbrs[i].push_back(j);
        nbrs[j].push_back(i);
      }
    }
  }
  for (auto& list : nbrs) std::sort(list.begin(), list.end());
  return nbrs;
}

}  // namespace

std::vector<int> dbscan(std::span<const Embedding> points, const DbscanParams& params) {
  params.validate();
  if (points.empty()) throw ValidationError("DBSCAN called with no points");
  require_dim(points, points.front().dim(), "DBSCAN point");

  const auto nbrs = cosine_neighborhoods(points, params.eps);
  const std::size_t n = points.size();
  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int next_cluster = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    if (nbrs[i].size() < params.min_pts) {
      labels[i] = kNoiseLabel;  // may still be claimed as a border point later
      continue;
    }
    const int cluster = next_cluster++;
    labels[i] = cluster;
    std::deque<std::size_t> frontier(nbrs[i].begin(), nbrs[i].end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (labels[j] == kNoiseLabel) labels[j] = cluster;
      if (labels[j] != kUnvisited) continue;
      labels[j] = cluster;
      if (nbrs[j].size() >= params.min_pts) {
        frontier.insert(frontier.end(), nbrs[j].begin(), nbrs[j].end());
      }
    }
  }
  return labels;
}

namespace {

Embedding mean_direction(std::span<const Embedding> points, std::span<const std::size_t> members) {
  std::vector<double> acc(points.front().dim(), 0.0);
  for (std::size_t m : members) {
    const auto v = points[m].values();
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += v[d];
  }
  return Embedding::unit(acc);
}

TopicAnchors extract_topic(const TopicCorpus& topic, const DbscanParams& params) {
  if (topic.embeddings.empty()) throw ValidationError("topic '" + topic.topic + "' has an empty corpus");
  const std::vector<int> labels = dbscan(topic.embeddings, params);

  TopicAnchors out;
  out.topic = topic.topic;
  out.params = params;
  out.num_points = labels.size();

  const int num_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(std::max(num_clusters, 0)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoiseLabel) {
      ++out.noise_count;
    } else {
      members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
  }

  if (members.empty()) {
    std::vector<std::size_t> all(topic.embeddings.size());
    std::iota(all.begin(), all.end(), 0);
    out.anchors.push_back(mean_direction(topic.embeddings, all));
    out.cluster_sizes.push_back(all.size());
    out.fallback = true;
    return out;
  }

  // Largest cluster first; stable so equal sizes keep cluster-id order.
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });
  for (std::size_t c : order) {
    out.anchors.push_back(mean_direction(topic.embeddings, members[c]));
    out.cluster_sizes.push_back(members[c].size());
  }
  return out;
}

}  // namespace

AnchorSet extract_anchors(std::span<const TopicCorpus> corpus, const DbscanParams& defaults,
                          const std::map<std::string, DbscanParams>& overrides) {
  if (corpus.empty()) throw ValidationError("anchor extraction needs at least one topic");
  AnchorSet set;
  for (const TopicCorpus& topic : corpus) {
    validate_topic_name(topic.topic);
    if (topic.embeddings.empty()) throw ValidationError("topic '" + topic.topic + "' has an empty corpus");
    if (set.dim == 0) set.dim = topic.embeddings.front().dim();
    require_dim(topic.embeddings, set.dim, "topic '" + topic.topic + "' embedding");
  }
  for (const TopicCorpus& topic : corpus) {
    auto it = overrides.find(topic.topic);
    set.topics.push_back(extract_topic(topic, it != overrides.end() ? it->second : defaults));
  }
  set.validate();
  return set;
}

void AnchorSet::validate() const {
  if (dim == 0) throw ValidationError("anchor set has dim 0");
  if (topics.empty()) throw ValidationError("anchor set has no topics");
  const std::vector<std::string> names = topic_names();
  validate_topic_names(names);
  for (const TopicAnchors& t : topics) {
    if (t.anchors.empty()) throw ValidationError("topic '" + t.topic + "' has no anchors");
    if (t.cluster_sizes.size() != t.anchors.size()) {
      throw ValidationError("topic '" + t.topic + "' has cluster_sizes misaligned with anchors");
    }
    t.params.validate();
    for (std::size_t a = 0; a < t.anchors.size(); ++a) {
      if (t.anchors[a].dim() != dim) {
        throw ValidationError("topic '" + t.topic + "' anchor " + std::to_string(a) + " has dimension " +
                              std::to_string(t.anchors[a].dim()) + ", expected " + std::to_string(dim));
      }
      if (!t.anchors[a].is_unit()) {
        throw ValidationError("topic '" + t.topic + "' anchor " + std::to_string(a) + " is not unit-normalized");
      }
    }
  }
}

std::vector<std::string> AnchorSet::topic_names() const {
  std::vector<std::string> names;
  names.reserve(topics.size());
  for (const TopicAnchors& t : topics) names.push_back(t.topic);
  return names;
}

int AnchorSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (topics[i].topic == name) return static_cast<int>(i);
  }
  return -1;
}

AnchorSet parse_anchor_set(std::string_view text) {
  const json doc = detail::parse_json(text, "anchor set");
  const auto version = detail::require_as<std::string>(doc, "version", "anchor set");
  if (version != kAnchorFormatVersion) {
    throw ValidationError("unsupported anchor set version \"" + version + "\" (expected \"" +
                          std::string(kAnchorFormatVersion) + "\")");
  }
  AnchorSet set;
  set.dim = detail::require_as<std::size_t>(doc, "dim", "anchor set");
  const json& topics = detail::require(doc, "topics", "anchor set");
  if (!topics.is_array()) throw ValidationError("anchor set.topics is not an array");
  for (const json& t : topics) {
    TopicAnchors ta;
    ta.topic = detail::require_as<std::string>(t, "name", "anchor topic");
    const json& anchors = detail::require(t, "anchors", "anchor topic");
    if (!anchors.is_array()) throw ValidationError("anchor topic.anchors is not an array");
    for (const json& a : anchors) ta.anchors.emplace_back(detail::to_vector(a, "anchor"));
    ta.cluster_sizes = detail::require_as<std::vector<std::size_t>>(t, "cluster_sizes", "anchor topic");
    ta.params.eps = detail::require_as<double>(t, "eps", "anchor topic");
    ta.params.min_pts = detail::require_as<std::size_t>(t, "min_pts", "anchor topic");
    ta.fallback = detail::require_as<bool>(t, "fallback", "anchor topic");
    ta.num_points = t.value("num_points", std::size_t{0});
    ta.noise_count = t.value("noise_count", std::size_t{0});
    set.topics.push_back(std::move(ta));
  }
  set.validate();
  return set;
}

std::string anchor_set_to_json(const AnchorSet& set) {
  json topics = json::array();
  for (const TopicAnchors& t : set.topics) {
    json anchors = json::array();
    for (const Embedding& a : t.anchors) anchors.push_back(std::vector<double>(a.values().begin(), a.values().end()));
    topics.push_back({{"name", t.topic},
                      {"anchors", std::move(anchors)},
                      {"cluster_sizes", t.cluster_sizes},
                      {"eps", t.params.eps},
                      {"min_pts", t.params.min_pts},
                      {"fallback", t.fallback},
                      {"num_points", t.num_points},
                      {"noise_count", t.noise_count}});
  }
  return json{{"version", kAnchorFormatVersion}, {"dim", set.dim}, {"topics", std::move(topics)}}.dump();
}

AnchorSet load_anchor_set(const std::filesystem::path& path) { return parse_anchor_set(read_text_file(path)); }

void save_anchor_set(const AnchorSet& set, const std::filesystem::path& path) {
  set.validate();
  write_text_file(path, anchor_set_to_json(set));
}

}  // namespace convseg
