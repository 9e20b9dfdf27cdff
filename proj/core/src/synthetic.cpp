#include "convseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "convseg/error.hpp"
#include "convseg/json_io.hpp"
#include "convseg/pipeline.hpp"
#include "convseg/vector_ops.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

std::size_t CallPlan::total_length() const noexcept {
  std::size_t n = 0;
  for (const PlanSegment& s : segments) n += s.length;
  return n;
}

void CallPlan::validate() const {
  if (segments.empty()) throw ValidationError("call plan has no segments");
  for (const PlanSegment& s : segments) {
    if (s.label.empty()) throw ValidationError("call plan segment has an empty label");
    if (s.length < 1) throw ValidationError("call plan segment '" + s.label + "' has zero length");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ValidationError("noise_sigma must be >= 0");
}

void PlanDistribution::validate() const {
  if (topics.empty()) throw ValidationError("plan distribution has no topics");
  validate_topic_names(topics);
  if (len_min < 1 || len_min > len_max) throw ValidationError("plan distribution len_range is invalid");
  if (segments_min < 1 || segments_min > segments_max) {
    throw ValidationError("plan distribution segments_range is invalid");
  }
  if (!(background_prob >= 0.0 && background_prob <= 1.0)) {
    throw ValidationError("plan distribution background_prob must lie in [0, 1]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ValidationError("noise_sigma must be >= 0");
}

CallPlan PlanDistribution::sample(std::uint64_t seed) const {
  validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> num_segments(segments_min, segments_max);
  std::uniform_int_distribution<std::size_t> length(len_min, len_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  CallPlan plan;
  plan.noise_sigma = noise_sigma;
  plan.seed = seed;
  const std::size_t count = num_segments(rng);
  std::string prev;
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<std::string> choices;
    for (const std::string& t : topics) {
      if (t != prev) choices.push_back(t);
    }
    const bool background_allowed = prev != kBackground;
    std::string label;
    if (background_allowed && (choices.empty() || unit(rng) < background_prob)) {
      label = std::string(kBackground);
    } else {
      label = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
    }
    plan.segments.push_back({label, length(rng)});
    prev = label;
  }
  return plan;
}

namespace {

std::pair<std::size_t, std::size_t> read_range(const json& doc, const char* key, std::pair<std::size_t, std::size_t> fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  const auto v = detail::get_as<std::vector<std::size_t>>(*it, std::string("spec.") + key);
  if (v.size() != 2) throw ValidationError(std::string("spec.") + key + " must be [lo, hi]");
  return {v[0], v[1]};
}

}  // namespace

CorpusSpec parse_corpus_spec(std::string_view text) {
  const json doc = detail::parse_json(text, "plan spec");
  if (!doc.is_object()) throw ValidationError("plan spec is not a JSON object");
  if (doc.contains("segments")) {
    CallPlan plan;
    for (const json& s : doc.at("segments")) {
      plan.segments.push_back({detail::require_as<std::string>(s, "label", "plan segment"),
                               detail::require_as<std::size_t>(s, "len", "plan segment")});
    }
    plan.noise_sigma = doc.value("noise_sigma", 0.0);
    plan.seed = doc.value("seed", std::uint64_t{0});
    plan.validate();
    return plan;
  }
  PlanDistribution dist;
  dist.topics = detail::require_as<std::vector<std::string>>(doc, "topics", "plan spec");
  std::tie(dist.len_min, dist.len_max) = read_range(doc, "len_range", {dist.len_min, dist.len_max});
  std::tie(dist.segments_min, dist.segments_max) =
      read_range(doc, "segments_range", {dist.segments_min, dist.segments_max});
  dist.background_prob = doc.value("background_prob", dist.background_prob);
  dist.noise_sigma = doc.value("noise_sigma", dist.noise_sigma);
  dist.validate();
  return dist;
}

CorpusSpec load_corpus_spec(const std::filesystem::path& path) { return parse_corpus_spec(read_text_file(path)); }

std::string corpus_spec_to_json(const CorpusSpec& spec) {
  if (const auto* plan = std::get_if<CallPlan>(&spec)) {
    json segs = json::array();
    for (const PlanSegment& s : plan->segments) segs.push_back({{"label", s.label}, {"len", s.length}});
    return json{{"segments", std::move(segs)}, {"noise_sigma", plan->noise_sigma}, {"seed", plan->seed}}.dump(2);
  }
  const auto& d = std::get<PlanDistribution>(spec);
  return json{{"topics", d.topics},
              {"len_range", {d.len_min, d.len_max}},
              {"segments_range", {d.segments_min, d.segments_max}},
              {"background_prob", d.background_prob},
              {"noise_sigma", d.noise_sigma}}
      .dump(2);
}

namespace {

// Orthonormal basis of span(vectors), modified Gram-Schmidt.
std::vector<std::vector<double>> orthonormal_basis(const std::vector<std::vector<double>>& vectors) {
  std::vector<std::vector<double>> basis;
  for (std::vector<double> v : vectors) {
    for (const auto& b : basis) {
      const double proj = dot(v, b);
      for (std::size_t d = 0; d < v.size(); ++d) v[d] -= proj * b[d];
    }
    const double n = l2_norm(v);
    if (n > 1e-9) {
      for (double& x : v) x /= n;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t dim, double sigma) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = sigma * normal(rng);
  return v;
}

const char* speaker_for(std::size_t i) { return i % 2 == 0 ? "agent" : "customer"; }

}  // namespace

SyntheticCall generate_call(const CallPlan& plan, const AnchorSet& anchors, std::string call_id) {
  plan.validate();
  anchors.validate();
  for (const PlanSegment& s : plan.segments) {
    if (s.label != kBackground && anchors.find(s.label) < 0) {
      throw ValidationError("plan topic '" + s.label + "' is not in the anchor set");
    }
  }

  const std::size_t dim = anchors.dim;
  std::vector<std::vector<double>> all_anchors;
  for (const TopicAnchors& t : anchors.topics) {
    for (const Embedding& a : t.anchors) all_anchors.emplace_back(a.values().begin(), a.values().end());
  }
  const auto basis = orthonormal_basis(all_anchors);
  const bool has_background =
      std::any_of(plan.segments.begin(), plan.segments.end(), [](const PlanSegment& s) { return s.label == kBackground; });
  if (has_background && basis.size() >= dim) {
    throw ValidationError("anchors span the whole embedding space; no background direction exists");
  }

  std::mt19937_64 rng(plan.seed);
  SyntheticCall call;
  call.transcript.call_id = call_id;
  std::vector<std::string> labels;
  std::size_t index = 0;
  for (const PlanSegment& seg : plan.segments) {
    const int topic = seg.label == kBackground ? -1 : anchors.find(seg.label);
    for (std::size_t j = 0; j < seg.length; ++j, ++index) {
      std::vector<double> v;
      if (topic >= 0) {
        const auto& topic_anchors = anchors.topics[static_cast<std::size_t>(topic)].anchors;
        std::uniform_int_distribution<std::size_t> pick(0, topic_anchors.size() - 1);
        const auto a = topic_anchors[pick(rng)].values();
        v.assign(a.begin(), a.end());
      } else {
        do {
          v = gaussian_vector(rng, dim, 1.0);
          for (const auto& b : basis) {
            const double proj = dot(v, b);
            for (std::size_t d = 0; d < dim; ++d) v[d] -= proj * b[d];
          }
        } while (l2_norm(v) < 1e-6);
        v = normalized(v);
      }
      if (plan.noise_sigma > 0.0) {
        const auto noise = gaussian_vector(rng, dim, plan.noise_sigma);
        for (std::size_t d = 0; d < dim; ++d) v[d] += noise[d];
      }
      call.embeddings.push_back(Embedding::unit(v));

      Utterance u;
      u.index = index;
      u.text = seg.label + " utterance " + std::to_string(index);
      u.speaker = speaker_for(index);
      u.start_ms = static_cast<std::int64_t>(index) * 3000;
      u.end_ms = *u.start_ms + 2500;
      call.transcript.utterances.push_back(std::move(u));
      labels.push_back(seg.label);
    }
  }

  call.gold = segmentation_from_labels(call_id, labels);
  for (Segment& s : call.gold.segments) s.score = s.is_background() ? 0.0 : 1.0;
  return call;
}

CorpusManifest parse_manifest(std::string_view text) {
  const json doc = detail::parse_json(text, "corpus manifest");
  CorpusManifest m;
  m.seed = detail::require_as<std::uint64_t>(doc, "seed", "corpus manifest");
  const json& calls = detail::require(doc, "calls", "corpus manifest");
  if (!calls.is_array()) throw ValidationError("corpus manifest.calls is not an array");
  for (const json& c : calls) {
    m.calls.push_back({detail::require_as<std::string>(c, "call_id", "manifest call"),
                       detail::require_as<std::string>(c, "transcript", "manifest call"),
                       detail::require_as<std::string>(c, "embeddings", "manifest call"),
                       detail::require_as<std::string>(c, "gold", "manifest call")});
  }
  return m;
}

std::string manifest_to_json(const CorpusManifest& m) {
  json calls = json::array();
  for (const ManifestEntry& e : m.calls) {
    calls.push_back({{"call_id", e.call_id}, {"transcript", e.transcript}, {"embeddings", e.embeddings}, {"gold", e.gold}});
  }
  return json{{"seed", m.seed}, {"calls", std::move(calls)}}.dump(2);
}

CorpusManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_text_file(path)); }

CorpusManifest generate_corpus(const CorpusSpec& spec, const AnchorSet& anchors, std::size_t count,
                               std::uint64_t seed, const std::filesystem::path& out_dir) {
  std::visit([](const auto& s) { s.validate(); }, spec);
  anchors.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'");
  }

  CorpusManifest manifest;
  manifest.seed = seed;
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint64_t call_seed = seed + j;
    CallPlan plan;
    if (const auto* fixed = std::get_if<CallPlan>(&spec)) {
      plan = *fixed;
      plan.seed = call_seed;
    } else {
      plan = std::get<PlanDistribution>(spec).sample(call_seed);
    }
    char id[32];
    std::snprintf(id, sizeof(id), "call_%04zu", j);
    const SyntheticCall call = generate_call(plan, anchors, id);

    ManifestEntry entry{id, std::string(id) + ".transcript.json", std::string(id) + ".embeddings.json",
                        std::string(id) + ".gold.json"};
    save_transcript(call.transcript, out_dir / entry.transcript);
    save_sidecar({id, anchors.dim, call.embeddings}, out_dir / entry.embeddings);
    save_segmentation(call.gold, out_dir / entry.gold);
    manifest.calls.push_back(std::move(entry));
  }
  write_text_file(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

CorpusCall load_corpus_call(const std::filesystem::path& manifest_dir, const ManifestEntry& entry) {
  CorpusCall call;
  call.transcript = load_transcript(manifest_dir / entry.transcript);
  EmbeddingSidecar sidecar = load_sidecar(manifest_dir / entry.embeddings);
  call.embeddings = std::move(sidecar.vectors);
  call.gold = load_segmentation(manifest_dir / entry.gold);
  return call;
}

std::vector<TopicSentences> parse_sentence_corpus(std::string_view jsonl) {
  std::vector<TopicSentences> groups;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = "sentence corpus line " + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("topic") || !doc["topic"].is_string()) {
      throw ValidationError(where + ": missing \"topic\"");
    }
    const std::string topic = doc["topic"].get<std::string>();
    SentenceItem item;
    if (auto it = doc.find("vector"); it != doc.end()) {
      item = detail::to_vector(*it, where + " vector");
    } else if (auto t = doc.find("text"); t != doc.end() && t->is_string()) {
      item = t->get<std::string>();
    } else {
      throw ValidationError(where + ": needs \"text\" or \"vector\"");
    }
    auto g = std::find_if(groups.begin(), groups.end(), [&](const TopicSentences& s) { return s.topic == topic; });
    if (g == groups.end()) {
      groups.push_back({topic, {}});
      g = groups.end() - 1;
    }
    g->items.push_back(std::move(item));
  }
  return groups;
}

std::vector<TopicSentences> load_sentence_corpus(const std::filesystem::path& path) {
  return parse_sentence_corpus(read_text_file(path));
}

PlantedCorpus make_planted_corpus(const PlantedCorpusSpec& spec) {
  validate_topic_names(spec.topics);
  if (spec.dim < spec.topics.size() * spec.directions_per_topic) {
    throw ValidationError("planted corpus needs dim >= topics * directions_per_topic");
  }
  if (spec.directions_per_topic < 1) throw ValidationError("planted corpus needs >= 1 direction per topic");

  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<double>> raw;
  const std::size_t total = spec.topics.size() * spec.directions_per_topic;
  std::vector<std::vector<double>> basis;
  while (basis.size() < total) {
    raw.push_back(gaussian_vector(rng, spec.dim, 1.0));
    basis = orthonormal_basis(raw);
  }

  PlantedCorpus out;
  std::size_t next = 0;
  for (const std::string& topic : spec.topics) {
    TopicCorpus tc{topic, {}};
    auto& dirs = out.directions[topic];
    for (std::size_t d = 0; d < spec.directions_per_topic; ++d) {
      const auto& dir = basis[next++];
      dirs.push_back(Embedding(dir));
      for (std::size_t s = 0; s < spec.sentences_per_direction; ++s) {
        auto v = gaussian_vector(rng, spec.dim, spec.spread);
        for (std::size_t i = 0; i < spec.dim; ++i) v[i] += dir[i];
        tc.embeddings.push_back(Embedding::unit(v));
      }
    }
    for (std::size_t o = 0; o < spec.outliers_per_topic; ++o) {
      tc.embeddings.push_back(Embedding::unit(gaussian_vector(rng, spec.dim, 1.0)));
    }
    out.corpus.push_back(std::move(tc));
  }
  return out;
}

std::string sentence_corpus_to_jsonl(const std::vector<TopicCorpus>& corpus) {
  std::string out;
  for (const TopicCorpus& t : corpus) {
    for (const Embedding& e : t.embeddings) {
      out += json{{"topic", t.topic}, {"vector", std::vector<double>(e.values().begin(), e.values().end())}}.dump();
      out += '\n';
    }
  }
  return out;
}

DefaultBenchmark default_benchmark() {
  DefaultBenchmark b;
  b.sentences.topics = default_topics();
  b.plans.topics = default_topics();
  return b;
}

}  // namespace convseg
