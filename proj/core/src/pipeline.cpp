#include "convseg/pipeline.hpp"

#include <cmath>
#include <map>
#include <set>

#include "convseg/error.hpp"
#include "convseg/json_io.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

const std::vector<std::string>& default_topics() {
  static const std::vector<std::string> topics{"greetings", "closing", "pricing", "identification", "scheduling"};
  return topics;
}

namespace {

std::size_t default_width(std::string_view topic) {
  static const std::map<std::string, std::size_t, std::less<>> widths{
      {"greetings", 3}, {"closing", 3}, {"identification", 4}, {"pricing", 6}, {"scheduling", 5}};
  auto it = widths.find(topic);
  return it == widths.end() ? 3 : it->second;
}

template <typename Fn>
auto run_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + " stage: " + e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  for (const std::string& t : default_topics()) cfg.topics.push_back(cfg.params_for(t));
  return cfg;
}

TopicParams PipelineConfig::params_for(std::string_view topic) const {
  for (const TopicParams& p : topics) {
    if (p.name == topic) return p;
  }
  TopicParams p;
  p.name = std::string(topic);
  p.window_width = default_width(topic);
  return p;
}

DiffusionConfig PipelineConfig::diffusion_for(std::span<const std::string> topic_order) const {
  DiffusionConfig d;
  d.alpha = alpha;
  d.lambda = lambda;
  d.cutoff = cutoff;
  for (const std::string& t : topic_order) d.peak_thresholds.push_back(params_for(t).peak_threshold);
  return d;
}

TopicWindowConfig PipelineConfig::windows_for(std::span<const std::string> topic_order) const {
  TopicWindowConfig w;
  w.min_segment_len = min_segment_len;
  for (const std::string& t : topic_order) {
    const TopicParams p = params_for(t);
    w.topics.push_back({p.window_width, p.threshold});
  }
  return w;
}

void PipelineConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ValidationError("temperature must be > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("diffusion alpha must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("diffusion lambda must be > 0");
  if (min_segment_len < 1) throw ValidationError("min_segment_len must be >= 1");
  std::set<std::string> seen;
  for (const TopicParams& p : topics) {
    validate_topic_name(p.name);
    if (!seen.insert(p.name).second) throw ValidationError("config lists topic '" + p.name + "' twice");
    if (p.window_width < 1) throw ValidationError("topic '" + p.name + "' window_width must be >= 1");
    if (!(p.threshold > 0.0 && p.threshold < 1.0)) {
      throw ValidationError("topic '" + p.name + "' threshold must lie in (0, 1)");
    }
    if (!std::isfinite(p.peak_threshold)) throw ValidationError("topic '" + p.name + "' peak_threshold must be finite");
  }
  greedy.validate();
  texttiling.validate();
  if (!std::isfinite(min_confidence)) throw ValidationError("min_confidence must be finite");
}

void PipelineConfig::validate(const AnchorSet& anchors) const {
  validate();
  for (const TopicParams& p : topics) {
    if (anchors.find(p.name) < 0) throw ValidationError("config topic '" + p.name + "' is not in the anchor set");
  }
}

PipelineConfig parse_pipeline_config(std::string_view text) {
  const json doc = detail::parse_json(text, "pipeline config");
  if (!doc.is_object()) throw ValidationError("pipeline config is not a JSON object");
  PipelineConfig cfg;
  auto num = [](const json& obj, const char* key, auto fallback, std::string_view what) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return detail::get_as<decltype(fallback)>(*it, std::string(what) + "." + key);
  };
  cfg.temperature = num(doc, "temperature", cfg.temperature, "config");
  cfg.min_segment_len = num(doc, "min_segment_len", cfg.min_segment_len, "config");
  cfg.min_confidence = num(doc, "min_confidence", cfg.min_confidence, "config");
  if (auto it = doc.find("diffusion"); it != doc.end()) {
    cfg.alpha = num(*it, "alpha", cfg.alpha, "diffusion");
    cfg.lambda = num(*it, "lambda", cfg.lambda, "diffusion");
    cfg.cutoff = num(*it, "cutoff", cfg.cutoff, "diffusion");
  }
  if (auto it = doc.find("topics"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("config.topics is not an array");
    cfg.topics.clear();
    for (const json& t : *it) {
      TopicParams p;
      p.name = detail::require_as<std::string>(t, "name", "config topic");
      p.window_width = default_width(p.name);
      p.peak_threshold = num(t, "peak_threshold", p.peak_threshold, "config topic");
      p.window_width = num(t, "window_width", p.window_width, "config topic");
      p.threshold = num(t, "threshold", p.threshold, "config topic");
      cfg.topics.push_back(std::move(p));
    }
  }
  if (auto it = doc.find("greedy"); it != doc.end()) {
    cfg.greedy.tau = num(*it, "tau", cfg.greedy.tau, "greedy");
    cfg.greedy.max_segments = num(*it, "max_segments", cfg.greedy.max_segments, "greedy");
    cfg.greedy.min_size = num(*it, "min_size", cfg.greedy.min_size, "greedy");
  }
  if (auto it = doc.find("texttiling"); it != doc.end()) {
    cfg.texttiling.block_size = num(*it, "block_size", cfg.texttiling.block_size, "texttiling");
    cfg.texttiling.smoothing_width = num(*it, "smoothing_width", cfg.texttiling.smoothing_width, "texttiling");
    cfg.texttiling.depth_cutoff_sigmas =
        num(*it, "depth_cutoff_sigmas", cfg.texttiling.depth_cutoff_sigmas, "texttiling");
  }
  cfg.validate();
  return cfg;
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  json topics = json::array();
  for (const TopicParams& p : cfg.topics) {
    topics.push_back({{"name", p.name},
                      {"peak_threshold", p.peak_threshold},
                      {"window_width", p.window_width},
                      {"threshold", p.threshold}});
  }
  json doc = {
      {"temperature", cfg.temperature},
      {"diffusion", {{"alpha", cfg.alpha}, {"lambda", cfg.lambda}, {"cutoff", cfg.cutoff}}},
      {"topics", std::move(topics)},
      {"min_segment_len", cfg.min_segment_len},
      {"greedy", {{"tau", cfg.greedy.tau}, {"max_segments", cfg.greedy.max_segments}, {"min_size", cfg.greedy.min_size}}},
      {"texttiling",
       {{"block_size", cfg.texttiling.block_size},
        {"smoothing_width", cfg.texttiling.smoothing_width},
        {"depth_cutoff_sigmas", cfg.texttiling.depth_cutoff_sigmas}}},
      {"min_confidence", cfg.min_confidence},
  };
  return doc.dump(2);
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_text_file(path));
}

void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  write_text_file(path, pipeline_config_to_json(cfg));
}

namespace {

void check_alignment(const Transcript& transcript, std::span<const Embedding> embeddings, const AnchorSet& anchors) {
  transcript.validate();
  if (embeddings.size() != transcript.size()) {
    throw ValidationError("transcript '" + transcript.call_id + "' has " + std::to_string(transcript.size()) +
                          " utterances but " + std::to_string(embeddings.size()) + " embeddings");
  }
  anchors.validate();
  require_dim(embeddings, anchors.dim, "utterance embedding");
}

}  // namespace

PipelineTrace segment_call_traced(const Transcript& transcript, std::span<const Embedding> embeddings,
                                  const AnchorSet& anchors, const PipelineConfig& cfg) {
  run_stage("input", [&] {
    check_alignment(transcript, embeddings, anchors);
    cfg.validate(anchors);
    return 0;
  });
  const std::vector<std::string> order = anchors.topic_names();

  PipelineTrace trace;
  trace.scores = run_stage("scoring", [&] { return score_transcript(embeddings, anchors, transcript.call_id); });
  trace.probs = run_stage("probabilities", [&] { return to_probabilities(trace.scores, cfg.temperature); });
  const DiffusionConfig diffusion = cfg.diffusion_for(order);
  trace.sources = run_stage("heat-sources", [&] { return detect_heat_sources(trace.probs, diffusion); });
  trace.diffused = run_stage("diffusion", [&] { return diffuse(trace.probs, trace.sources, diffusion); });
  trace.smoothed = run_stage("renormalize", [&] { return renormalize(trace.probs, trace.diffused, cfg.temperature); });
  const TopicWindowConfig windows = cfg.windows_for(order);
  trace.candidates = run_stage("windowing", [&] { return tag_windows(trace.smoothed, windows); });
  trace.result = run_stage("merge", [&] { return merge_and_resolve(trace.candidates, trace.smoothed, windows); });
  return trace;
}

SegmentationResult segment_call(const Transcript& transcript, std::span<const Embedding> embeddings,
                                const AnchorSet& anchors, const PipelineConfig& cfg) {
  return segment_call_traced(transcript, embeddings, anchors, cfg).result;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kGptCalls:
      return "gptcalls";
    case Method::kGreedy:
      return "greedy";
    case Method::kTextTiling:
      return "texttiling";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::kGptCalls, Method::kGreedy, Method::kTextTiling}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

SegmentationResult run_method(Method method, const Transcript& transcript, std::span<const Embedding> embeddings,
                              const AnchorSet& anchors, const PipelineConfig& cfg) {
  if (method == Method::kGptCalls) return segment_call(transcript, embeddings, anchors, cfg);

  run_stage("input", [&] {
    check_alignment(transcript, embeddings, anchors);
    cfg.validate();
    return 0;
  });
  std::vector<std::size_t> boundaries;
  if (method == Method::kGreedy) {
    boundaries = run_stage("greedy", [&] { return greedy_segment(embeddings, cfg.greedy); });
  } else {
    boundaries = run_stage("texttiling", [&] { return texttiling_segment(embeddings, cfg.texttiling).boundaries; });
  }
  return run_stage("tagging", [&] {
    return tag_segments_by_anchors(boundaries, embeddings, anchors, cfg.min_confidence, transcript.call_id);
  });
}

}  // namespace convseg
