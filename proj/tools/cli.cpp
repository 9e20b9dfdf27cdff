#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "convseg/anchors.hpp"
#include "convseg/embedding.hpp"
#include "convseg/error.hpp"
#include "convseg/evaluation.hpp"
#include "convseg/json_io.hpp"
#include "convseg/pipeline.hpp"
#include "convseg/synthetic.hpp"
#include "json.hpp"

namespace convseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
      return kValidationError;
    case ErrorKind::kIo:
      return kIoError;
    case ErrorKind::kService:
      return kServiceError;
  }
  return kValidationError;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Writes `content` to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
  } else {
    write_text_file(path, content);
  }
}

// ---------------------------------------------------------------------------
// gen-anchors

struct EmbedOptions {
  std::string mode = "file";
  std::string embedding_file;
  std::string url;
  std::size_t batch_size = 64;
  int timeout_ms = 10000;
  int retries = 2;
  int backoff_ms = 100;
};

void add_embed_options(CLI::App& cmd, EmbedOptions& o) {
  cmd.add_option("--embed", o.mode, "Embedding provider for text lines")
      ->check(CLI::IsMember({"file", "service"}))
      ->capture_default_str();
  cmd.add_option("--embedding-file", o.embedding_file, "Text->vector store used with --embed file");
  cmd.add_option("--embed-url", o.url, "Service endpoint (default: $CONVSEG_EMBED_URL)");
  cmd.add_option("--batch-size", o.batch_size, "Service batch size")->capture_default_str();
  cmd.add_option("--timeout-ms", o.timeout_ms, "Service request timeout")->capture_default_str();
  cmd.add_option("--retries", o.retries, "Service retries after the first attempt")->capture_default_str();
  cmd.add_option("--backoff-ms", o.backoff_ms, "Base delay between service retries")->capture_default_str();
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbedOptions& o) {
  if (o.mode == "file") {
    if (o.embedding_file.empty()) throw ValidationError("--embed file needs --embedding-file for text lines");
    return std::make_unique<FileEmbeddingProvider>(load_embedding_file(o.embedding_file));
  }
  ServiceConfig cfg = ServiceConfig::from_env();
  if (!o.url.empty()) cfg.endpoint = o.url;
  cfg.batch_size = o.batch_size;
  cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
  cfg.retries = o.retries;
  cfg.retry_backoff = std::chrono::milliseconds(o.backoff_ms);
  return std::make_unique<ServiceEmbeddingProvider>(cfg);
}

struct GenAnchorsOptions {
  std::string sentences;
  std::string out;
  std::string params;
  double eps = 0.25;
  std::size_t min_pts = 5;
  EmbedOptions embed;
};

int cmd_gen_anchors(const GenAnchorsOptions& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(o.sentences)) throw IoError("sentence corpus '" + o.sentences + "' does not exist");
  const std::vector<TopicSentences> groups = load_sentence_corpus(o.sentences);
  if (groups.empty()) throw ValidationError("sentence corpus '" + o.sentences + "' has no sentences");

  DbscanParams defaults{o.eps, o.min_pts};
  std::map<std::string, DbscanParams> overrides;
  if (!o.params.empty()) {
    json doc;
    try {
      doc = json::parse(read_text_file(o.params));
      if (doc.contains("default")) {
        defaults.eps = doc["default"].value("eps", defaults.eps);
        defaults.min_pts = doc["default"].value("min_pts", defaults.min_pts);
      }
      if (doc.contains("topics")) {
        for (const auto& [topic, p] : doc["topics"].items()) {
          overrides[topic] = {p.value("eps", defaults.eps), p.value("min_pts", defaults.min_pts)};
        }
      }
    } catch (const json::exception& e) {
      throw ValidationError("bad DBSCAN params file '" + o.params + "': " + e.what());
    }
  }

  // Collect every text line, embed them in one provider pass, then rebuild per topic.
  std::vector<std::string> texts;
  for (const TopicSentences& g : groups) {
    for (const SentenceItem& item : g.items) {
      if (const auto* t = std::get_if<std::string>(&item)) texts.push_back(*t);
    }
  }
  std::vector<Embedding> embedded;
  if (!texts.empty()) {
    const auto provider = make_provider(o.embed);
    embedded = embed_texts(texts, *provider);
  }

  std::vector<TopicCorpus> corpus;
  std::size_t next_text = 0;
  for (const TopicSentences& g : groups) {
    TopicCorpus tc{g.topic, {}};
    for (const SentenceItem& item : g.items) {
      if (const auto* v = std::get_if<std::vector<double>>(&item)) {
        tc.embeddings.push_back(Embedding::unit(*v));
      } else {
        tc.embeddings.push_back(embedded[next_text++]);
      }
    }
    corpus.push_back(std::move(tc));
  }

  const AnchorSet anchors = extract_anchors(corpus, defaults, overrides);
  save_anchor_set(anchors, o.out);

  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s\n", "topic", "points", "clusters", "anchors", "noise");
  out << line;
  for (const TopicAnchors& t : anchors.topics) {
    const std::size_t clusters = t.fallback ? 0 : t.anchors.size();
    std::snprintf(line, sizeof(line), "%-16s %8zu %8zu %8zu %8zu\n", t.topic.c_str(), t.num_points, clusters,
                  t.anchors.size(), t.noise_count);
    out << line;
    if (t.fallback) {
      err << "warning: topic '" << t.topic << "' produced no DBSCAN cluster; using the mean of all "
          << t.num_points << " points as its only anchor\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// shared pipeline config handling

struct ConfigOverrides {
  std::optional<double> temperature, alpha, lambda, tau, min_confidence;
  std::optional<std::size_t> cutoff, min_segment_len, max_segments;
};

void add_config_overrides(CLI::App& cmd, ConfigOverrides& o) {
  cmd.add_option("--temperature", o.temperature, "Softmax temperature");
  cmd.add_option("--alpha", o.alpha, "Heat diffusion weight");
  cmd.add_option("--lambda", o.lambda, "Heat diffusion decay length (utterances)");
  cmd.add_option("--cutoff", o.cutoff, "Heat diffusion cutoff distance (utterances)");
  cmd.add_option("--min-segment-len", o.min_segment_len, "Shortest topic segment kept");
  cmd.add_option("--tau", o.tau, "Greedy split threshold");
  cmd.add_option("--max-segments", o.max_segments, "Greedy segment limit");
  cmd.add_option("--min-confidence", o.min_confidence, "Baseline tagging confidence floor");
}

PipelineConfig resolve_config(const std::string& path, const ConfigOverrides& o) {
  PipelineConfig cfg;
  if (!path.empty()) {
    if (!fs::exists(path)) throw IoError("config file '" + path + "' does not exist");
    cfg = load_pipeline_config(path);
  }
  if (o.temperature) cfg.temperature = *o.temperature;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.lambda) cfg.lambda = *o.lambda;
  if (o.cutoff) cfg.cutoff = *o.cutoff;
  if (o.min_segment_len) cfg.min_segment_len = *o.min_segment_len;
  if (o.tau) cfg.greedy.tau = *o.tau;
  if (o.max_segments) cfg.greedy.max_segments = *o.max_segments;
  if (o.min_confidence) cfg.min_confidence = *o.min_confidence;
  cfg.validate();
  return cfg;
}

Method resolve_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ValidationError("unknown method '" + name + "' (expected gptcalls, greedy or texttiling)");
  return *m;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentOptions {
  std::string transcript, embeddings, anchors, config, out, method = "gptcalls", dump_probs;
  ConfigOverrides overrides;
};

int cmd_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
  const Method method = resolve_method(o.method);
  const PipelineConfig cfg = resolve_config(o.config, o.overrides);
  const Transcript transcript = load_transcript(o.transcript);
  const EmbeddingSidecar sidecar = load_sidecar(o.embeddings);
  const AnchorSet anchors = load_anchor_set(o.anchors);
  if (sidecar.vectors.size() != transcript.size()) {
    throw ValidationError("misaligned input: transcript has " + std::to_string(transcript.size()) +
                          " utterances, embeddings file has " + std::to_string(sidecar.vectors.size()) + " vectors");
  }

  SegmentationResult result;
  if (method == Method::kGptCalls) {
    const PipelineTrace trace = segment_call_traced(transcript, sidecar.vectors, anchors, cfg);
    if (!o.dump_probs.empty()) {
      std::ostringstream pre, post;
      write_matrix_csv(pre, trace.probs.topics, trace.probs.probs);
      write_matrix_csv(post, trace.smoothed.topics, trace.smoothed.probs);
      write_text_file(o.dump_probs + ".pre.csv", pre.str());
      write_text_file(o.dump_probs + ".post.csv", post.str());
    }
    result = trace.result;
  } else {
    if (!o.dump_probs.empty()) err << "warning: --dump-probs only applies to --method gptcalls\n";
    result = run_method(method, transcript, sidecar.vectors, anchors, cfg);
  }
  result.validate(transcript.size());
  emit(o.out, segmentation_to_json(result), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string ref, hyp, manifest, hyp_dir, out, format = "json", topics;
  bool per_topic = false;
  std::optional<std::size_t> k;
};

std::vector<std::string> topics_in(const std::vector<std::pair<SegmentationResult, SegmentationResult>>& pairs) {
  std::set<std::string> seen;
  for (const auto& [ref, hyp] : pairs) {
    for (const auto* r : {&ref, &hyp}) {
      for (const Segment& s : r->segments) {
        if (!s.is_background()) seen.insert(s.label);
      }
    }
  }
  std::vector<std::string> ordered;
  for (const std::string& t : default_topics()) {
    if (seen.erase(t)) ordered.push_back(t);
  }
  ordered.insert(ordered.end(), seen.begin(), seen.end());
  return ordered;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream&) {
  std::vector<std::pair<SegmentationResult, SegmentationResult>> pairs;
  if (!o.manifest.empty()) {
    if (o.hyp_dir.empty()) throw ValidationError("--manifest needs --hyp-dir");
    const CorpusManifest manifest = load_manifest(o.manifest);
    const fs::path base = fs::path(o.manifest).parent_path();
    for (const ManifestEntry& e : manifest.calls) {
      pairs.emplace_back(load_segmentation(base / e.gold), load_segmentation(fs::path(o.hyp_dir) / (e.call_id + ".json")));
    }
  } else {
    if (o.ref.empty() || o.hyp.empty()) throw ValidationError("evaluate needs --ref and --hyp, or --manifest and --hyp-dir");
    pairs.emplace_back(load_segmentation(o.ref), load_segmentation(o.hyp));
  }
  if (pairs.empty()) throw ValidationError("nothing to evaluate: the manifest lists no calls");

  ReportOptions options;
  options.k = o.k;
  if (o.per_topic) options.topics = o.topics.empty() ? topics_in(pairs) : split_list(o.topics);
  const MetricReport report = corpus_report(pairs, options);
  emit(o.out, o.format == "text" ? report.to_text() : report.to_json(), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// synth / synth-sentences

struct SynthOptions {
  std::string plan, spec, anchors, out_dir;
  std::size_t count = 50;
  std::uint64_t seed = 1000;
  std::optional<double> sigma;
};

int cmd_synth(const SynthOptions& o, std::ostream&, std::ostream& err) {
  CorpusSpec spec = default_benchmark().plans;
  if (!o.plan.empty() && !o.spec.empty()) throw ValidationError("use either --plan or --spec, not both");
  if (!o.plan.empty() || !o.spec.empty()) {
    const std::string& path = o.plan.empty() ? o.spec : o.plan;
    if (!fs::exists(path)) throw IoError("plan file '" + path + "' does not exist");
    spec = load_corpus_spec(path);
  }
  if (o.sigma) {
    std::visit([&](auto& s) { s.noise_sigma = *o.sigma; }, spec);
  }
  const AnchorSet anchors = load_anchor_set(o.anchors);
  // Surface unknown topics as validation errors before touching the output directory.
  if (const auto* plan = std::get_if<CallPlan>(&spec)) {
    generate_call(*plan, anchors, "check");
  } else {
    for (const std::string& t : std::get<PlanDistribution>(spec).topics) {
      if (anchors.find(t) < 0) throw ValidationError("plan topic '" + t + "' is not in the anchor set");
    }
  }
  const CorpusManifest manifest = generate_corpus(spec, anchors, o.count, o.seed, o.out_dir);
  err << "wrote " << manifest.calls.size() << " calls to " << (fs::path(o.out_dir) / "manifest.json").string() << '\n';
  return kOk;
}

struct SynthSentencesOptions {
  std::string out, topics;
  PlantedCorpusSpec spec;
};

int cmd_synth_sentences(SynthSentencesOptions o, std::ostream& out, std::ostream&) {
  o.spec.topics = o.topics.empty() ? default_topics() : split_list(o.topics);
  const PlantedCorpus planted = make_planted_corpus(o.spec);
  emit(o.out, sentence_corpus_to_jsonl(planted.corpus), out);
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string manifest, anchors, config, methods = "gptcalls,greedy,texttiling", out;
  std::size_t jobs = 0;
  ConfigOverrides overrides;
};

struct CallOutcome {
  std::optional<CallMetrics> metrics;
  std::string error;
  double millis = 0.0;
};

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  const auto bench_start = std::chrono::steady_clock::now();
  std::vector<Method> methods;
  for (const std::string& name : split_list(o.methods)) methods.push_back(resolve_method(name));
  if (methods.empty()) throw ValidationError("--methods lists no method");
  const PipelineConfig cfg = resolve_config(o.config, o.overrides);
  const AnchorSet anchors = load_anchor_set(o.anchors);
  const CorpusManifest manifest = load_manifest(o.manifest);
  if (manifest.calls.empty()) throw ValidationError("manifest '" + o.manifest + "' lists no calls");
  const fs::path base = fs::path(o.manifest).parent_path();

  const std::size_t n = manifest.calls.size();
  std::size_t jobs = o.jobs != 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);

  // outcomes[m][call]
  std::vector<std::vector<CallOutcome>> outcomes(methods.size(), std::vector<CallOutcome>(n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < n; j = next++) {
      std::optional<CorpusCall> call;
      std::string load_error;
      try {
        call = load_corpus_call(base, manifest.calls[j]);
      } catch (const std::exception& e) {
        load_error = e.what();
      }
      for (std::size_t m = 0; m < methods.size(); ++m) {
        CallOutcome& slot = outcomes[m][j];
        if (!call) {
          slot.error = load_error;
          continue;
        }
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const SegmentationResult hyp = run_method(methods[m], call->transcript, call->embeddings, anchors, cfg);
          slot.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
          slot.metrics = evaluate_call(call->gold, hyp, ReportOptions{});
        } catch (const std::exception& e) {
          slot.error = e.what();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json rows = json::array();
  std::ostringstream table;
  char line[256];
  // The "±" in each cell is two bytes, hence the wider cell formats below.
  std::snprintf(line, sizeof(line), "%-12s %-18s %-18s %10s %8s\n", "method", "Pk", "WinDiff", "ms/call", "failed");
  table << line;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<CallMetrics> ok;
    json failures = json::array();
    double total_ms = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const CallOutcome& c = outcomes[m][j];
      if (c.metrics) {
        ok.push_back(*c.metrics);
        total_ms += c.millis;
      } else {
        failures.push_back({{"call_id", manifest.calls[j].call_id}, {"error", c.error}});
        err << "warning: " << method_name(methods[m]) << " failed on " << manifest.calls[j].call_id << ": " << c.error
            << '\n';
      }
    }
    const MetricReport r = summarize(std::move(ok), {});
    const double ms_per_call = r.pk.count ? total_ms / static_cast<double>(r.pk.count) : 0.0;
    char pk_cell[64], wd_cell[64];
    std::snprintf(pk_cell, sizeof(pk_cell), "%.3f ± %.3f", r.pk.mean, r.pk.std);
    std::snprintf(wd_cell, sizeof(wd_cell), "%.3f ± %.3f", r.window_diff.mean, r.window_diff.std);
    std::snprintf(line, sizeof(line), "%-12s %-19s %-19s %10.3f %8zu\n", std::string(method_name(methods[m])).c_str(),
                  pk_cell, wd_cell, ms_per_call, failures.size());
    table << line;
    rows.push_back({{"method", method_name(methods[m])},
                    {"pk", {{"mean", r.pk.mean}, {"std", r.pk.std}}},
                    {"windowdiff", {{"mean", r.window_diff.mean}, {"std", r.window_diff.std}}},
                    {"calls", r.pk.count},
                    {"ms_per_call", ms_per_call},
                    {"failures", std::move(failures)}});
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - bench_start).count();
  if (!o.out.empty()) {
    write_text_file(o.out, json{{"manifest", o.manifest}, {"calls", n}, {"wall_seconds", wall}, {"methods", rows}}.dump(2));
  }
  out << table.str();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"convseg: topic segmentation and tagging of call transcripts", "convseg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "convseg 0.1.0");

  GenAnchorsOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-anchors", "Cluster a topic sentence corpus into anchor vectors");
  gen_cmd->add_option("--sentences", gen.sentences, "Sentence corpus JSONL")->required();
  gen_cmd->add_option("--out", gen.out, "AnchorSet JSON to write")->required();
  gen_cmd->add_option("--eps", gen.eps, "DBSCAN cosine-distance radius")->capture_default_str();
  gen_cmd->add_option("--min-pts", gen.min_pts, "DBSCAN core-point neighbor count")->capture_default_str();
  gen_cmd->add_option("--params", gen.params, "Per-topic DBSCAN overrides JSON");
  add_embed_options(*gen_cmd, gen.embed);

  SegmentOptions seg;
  auto* seg_cmd = app.add_subcommand("segment", "Segment and tag one call");
  seg_cmd->add_option("--transcript", seg.transcript, "Transcript JSON")->required();
  seg_cmd->add_option("--embeddings", seg.embeddings, "Per-call embedding sidecar JSON")->required();
  seg_cmd->add_option("--anchors", seg.anchors, "AnchorSet JSON")->required();
  seg_cmd->add_option("--config", seg.config, "Pipeline config JSON");
  seg_cmd->add_option("--out", seg.out, "Segmentation JSON to write (default stdout)");
  seg_cmd->add_option("--method", seg.method, "gptcalls | greedy | texttiling")->capture_default_str();
  seg_cmd->add_option("--dump-probs", seg.dump_probs, "Write <prefix>.pre.csv and <prefix>.post.csv");
  add_config_overrides(*seg_cmd, seg.overrides);

  EvaluateOptions ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Pk / WindowDiff of hypotheses against references");
  ev_cmd->add_option("--ref", ev.ref, "Reference segmentation JSON");
  ev_cmd->add_option("--hyp", ev.hyp, "Hypothesis segmentation JSON");
  ev_cmd->add_option("--manifest", ev.manifest, "Corpus manifest; gold files are the references");
  ev_cmd->add_option("--hyp-dir", ev.hyp_dir, "Directory holding <call_id>.json hypotheses");
  ev_cmd->add_flag("--per-topic", ev.per_topic, "Add binarized per-topic metrics");
  ev_cmd->add_option("--topics", ev.topics, "Comma-separated topics for --per-topic");
  ev_cmd->add_option("--k", ev.k, "Window size (default: half the mean reference segment length)");
  ev_cmd->add_option("--format", ev.format, "json | text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  ev_cmd->add_option("--out", ev.out, "Report file (default stdout)");

  SynthOptions syn;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a planted synthetic call corpus");
  syn_cmd->add_option("--plan", syn.plan, "Fixed call plan JSON");
  syn_cmd->add_option("--spec", syn.spec, "Plan distribution JSON");
  syn_cmd->add_option("--anchors", syn.anchors, "AnchorSet JSON")->required();
  syn_cmd->add_option("--count", syn.count, "Number of calls")->capture_default_str();
  syn_cmd->add_option("--seed", syn.seed, "Base seed; call j uses seed + j")->capture_default_str();
  syn_cmd->add_option("--sigma", syn.sigma, "Override the noise sigma");
  syn_cmd->add_option("--out-dir", syn.out_dir, "Output directory")->required();

  SynthSentencesOptions ss;
  ss.spec.seed = default_benchmark().sentences.seed;
  auto* ss_cmd = app.add_subcommand("synth-sentences", "Write a planted pre-embedded sentence corpus (JSONL)");
  ss_cmd->add_option("--out", ss.out, "JSONL file (default stdout)");
  ss_cmd->add_option("--topics", ss.topics, "Comma-separated topics (default: the five default topics)");
  ss_cmd->add_option("--dim", ss.spec.dim, "Embedding dimension")->capture_default_str();
  ss_cmd->add_option("--directions", ss.spec.directions_per_topic, "Planted directions per topic")->capture_default_str();
  ss_cmd->add_option("--per-direction", ss.spec.sentences_per_direction, "Sentences per direction")->capture_default_str();
  ss_cmd->add_option("--spread", ss.spec.spread, "Per-coordinate noise around each direction")->capture_default_str();
  ss_cmd->add_option("--outliers", ss.spec.outliers_per_topic, "Random outliers per topic")->capture_default_str();
  ss_cmd->add_option("--seed", ss.spec.seed, "Seed")->capture_default_str();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare segmentation methods on a corpus");
  bench_cmd->add_option("--manifest", bench.manifest, "Corpus manifest")->required();
  bench_cmd->add_option("--anchors", bench.anchors, "AnchorSet JSON")->required();
  bench_cmd->add_option("--config", bench.config, "Pipeline config JSON");
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods")->capture_default_str();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads (default: all cores)");
  bench_cmd->add_option("--out", bench.out, "Also write the comparison as JSON");
  add_config_overrides(*bench_cmd, bench.overrides);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*gen_cmd) return cmd_gen_anchors(gen, out, err);
    if (*seg_cmd) return cmd_segment(seg, out, err);
    if (*ev_cmd) return cmd_evaluate(ev, out, err);
    if (*syn_cmd) return cmd_synth(syn, out, err);
    if (*ss_cmd) return cmd_synth_sentences(ss, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace convseg::cli
