#include <sstream>

#include "cli.hpp"
#include "convseg/embedding.hpp"
#include "convseg/evaluation.hpp"
#include "convseg/json_io.hpp"
#include "convseg/pipeline.hpp"
#include "convseg/synthetic.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/test_support.hpp"

using namespace convseg;
using namespace convseg::testing;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kConfig = CONVSEG_CONFIG_DIR "/synthetic.json";

// Shared fixture: a two-topic pre-embedded sentence corpus, its anchors and a
// small synthetic call corpus.
struct Workspace {
  TempDir dir{"cli"};
  std::string sentences = (dir / "sentences.jsonl").string();
  std::string anchors = (dir / "anchors.json").string();
  std::string corpus = (dir / "corpus").string();
  std::string manifest = (dir / "corpus" / "manifest.json").string();

  Workspace() {
    PlantedCorpusSpec spec;
    spec.topics = default_topics();
    spec.dim = 32;
    spec.sentences_per_direction = 10;
    write_text_file(sentences, sentence_corpus_to_jsonl(make_planted_corpus(spec).corpus));
    REQUIRE(run_cli({"gen-anchors", "--sentences", sentences, "--out", anchors}).code == 0);
    REQUIRE(run_cli({"synth", "--anchors", anchors, "--count", "6", "--seed", "11", "--out-dir", corpus}).code == 0);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string call_file(int j, const char* kind) const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "call_%04d.%s.json", j, kind);
    return (dir / "corpus" / buf).string();
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1, help exits 0") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"segment", "--transcript"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"evaluate", "--format", "xml", "--ref", "a", "--hyp", "b"}).code == 1);
  }

  TEST_CASE("gen-anchors on a pre-embedded toy corpus") {
    TempDir dir("gen");
    const std::string corpus = (dir / "toy.jsonl").string();
    std::string lines;
    for (int i = 0; i < 6; ++i) lines += "{\"topic\": \"pricing\", \"vector\": [1, 0, 0]}\n";
    for (int i = 0; i < 6; ++i) lines += "{\"topic\": \"closing\", \"vector\": [0, 1, 0]}\n";
    write_text_file(corpus, lines);
    const Run r = run_cli({"gen-anchors", "--sentences", corpus, "--out", (dir / "a.json").string()});
    CHECK(r.code == 0);
    const AnchorSet set = load_anchor_set(dir / "a.json");
    CHECK(set.topic_names() == std::vector<std::string>{"pricing", "closing"});
    CHECK(r.out.find("pricing") != std::string::npos);
    CHECK(r.err.empty());
  }

  TEST_CASE("gen-anchors warns on fallback and honours --min-pts") {
    TempDir dir("gen_fallback");
    const std::string corpus = (dir / "toy.jsonl").string();
    write_text_file(corpus, "{\"topic\": \"pricing\", \"vector\": [1, 0]}\n{\"topic\": \"pricing\", \"vector\": [0, 1]}\n");
    const Run r = run_cli({"gen-anchors", "--sentences", corpus, "--out", (dir / "a.json").string(), "--min-pts", "2"});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(load_anchor_set(dir / "a.json").topics[0].fallback);
  }

  TEST_CASE("gen-anchors with text lines and a file store") {
    TempDir dir("gen_text");
    write_text_file(dir / "s.jsonl",
                    "{\"topic\": \"pricing\", \"text\": \"how much\"}\n{\"topic\": \"pricing\", \"text\": \"the price\"}\n");
    save_embedding_file({2, {{"how much", {1, 0.01}}, {"the price", {1, 0}}}}, dir / "e.json");
    const Run r = run_cli({"gen-anchors", "--sentences", (dir / "s.jsonl").string(), "--embedding-file",
                       (dir / "e.json").string(), "--min-pts", "2", "--out", (dir / "a.json").string()});
    CHECK(r.code == 0);
    CHECK_FALSE(load_anchor_set(dir / "a.json").topics[0].fallback);
  }

  TEST_CASE("gen-anchors per-topic params file") {
    TempDir dir("gen_params");
    write_text_file(dir / "s.jsonl", "{\"topic\": \"a\", \"vector\": [1, 0]}\n{\"topic\": \"a\", \"vector\": [1, 0]}\n");
    write_text_file(dir / "p.json", R"({"default": {"eps": 0.1, "min_pts": 9}, "topics": {"a": {"min_pts": 2}}})");
    const Run r = run_cli({"gen-anchors", "--sentences", (dir / "s.jsonl").string(), "--params",
                       (dir / "p.json").string(), "--out", (dir / "a.json").string()});
    CHECK(r.code == 0);
    const AnchorSet set = load_anchor_set(dir / "a.json");
    CHECK(set.topics[0].params.min_pts == 2);
    CHECK(set.topics[0].params.eps == 0.1);
  }

  TEST_CASE("gen-anchors error codes") {
    TempDir dir("gen_err");
    const Run missing = run_cli({"gen-anchors", "--sentences", (dir / "nope.jsonl").string(), "--out", "x.json"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("nope.jsonl") != std::string::npos);

    write_text_file(dir / "s.jsonl", "{\"topic\": \"pricing\", \"text\": \"hello\"}\n");
    const Run unreachable = run_cli({"gen-anchors", "--sentences", (dir / "s.jsonl").string(), "--embed", "service",
                                 "--embed-url", "http://127.0.0.1:1", "--retries", "1", "--backoff-ms", "1",
                                 "--timeout-ms", "500", "--out", (dir / "a.json").string()});
    CHECK(unreachable.code == 3);
    CHECK(unreachable.err.find("2 attempts") != std::string::npos);

    const Run no_store = run_cli({"gen-anchors", "--sentences", (dir / "s.jsonl").string(), "--out", "x.json"});
    CHECK(no_store.code == 1);
  }

  TEST_CASE("segment, evaluate and bench on a synthetic corpus") {
    Workspace ws;

    SUBCASE("segment writes valid json and dumps probabilities") {
      const std::string out = ws.path("seg.json");
      const Run r = run_cli({"segment", "--transcript", ws.call_file(0, "transcript"), "--embeddings",
                         ws.call_file(0, "embeddings"), "--anchors", ws.anchors, "--config", kConfig, "--out", out,
                         "--dump-probs", ws.path("probs")});
      CHECK(r.code == 0);
      CHECK(r.out.empty());
      const SegmentationResult seg = load_segmentation(out);
      CHECK(seg.num_utterances() == load_transcript(ws.call_file(0, "transcript")).size());
      const std::string pre = read_text_file(ws.path("probs.pre.csv"));
      CHECK(pre.rfind("utterance,greetings,closing,pricing,identification,scheduling\n", 0) == 0);
      CHECK(std::filesystem::exists(ws.path("probs.post.csv")));
    }

    SUBCASE("segment defaults to stdout") {
      const Run r = run_cli({"segment", "--transcript", ws.call_file(1, "transcript"), "--embeddings",
                         ws.call_file(1, "embeddings"), "--anchors", ws.anchors, "--method", "greedy"});
      CHECK(r.code == 0);
      CHECK_NOTHROW(parse_segmentation(r.out));
    }

    SUBCASE("misaligned inputs exit 1 naming both counts") {
      const std::size_t n0 = load_transcript(ws.call_file(0, "transcript")).size();
      const std::size_t n1 = load_sidecar(ws.call_file(1, "embeddings")).vectors.size();
      REQUIRE(n0 != n1);
      const Run r = run_cli({"segment", "--transcript", ws.call_file(0, "transcript"), "--embeddings",
                         ws.call_file(1, "embeddings"), "--anchors", ws.anchors});
      CHECK(r.code == 1);
      CHECK(r.err.find(std::to_string(n0)) != std::string::npos);
      CHECK(r.err.find(std::to_string(n1)) != std::string::npos);
    }

    SUBCASE("flags override the config file") {
      const Run r = run_cli({"segment", "--transcript", ws.call_file(0, "transcript"), "--embeddings",
                         ws.call_file(0, "embeddings"), "--anchors", ws.anchors, "--config", kConfig,
                         "--temperature", "-1"});
      CHECK(r.code == 1);
      CHECK(r.err.find("temperature") != std::string::npos);
    }

    SUBCASE("unknown method and missing files") {
      CHECK(run_cli({"segment", "--transcript", ws.call_file(0, "transcript"), "--embeddings",
                 ws.call_file(0, "embeddings"), "--anchors", ws.anchors, "--method", "bert"})
                .code == 1);
      CHECK(run_cli({"segment", "--transcript", ws.path("none.json"), "--embeddings", ws.call_file(0, "embeddings"),
                 "--anchors", ws.anchors})
                .code == 2);
      CHECK(run_cli({"segment", "--transcript", ws.call_file(0, "transcript"), "--embeddings",
                 ws.call_file(0, "embeddings"), "--anchors", ws.anchors, "--config", ws.path("none.json")})
                .code == 2);
    }

    SUBCASE("evaluate ref against itself is all zeros") {
      const Run r = run_cli({"evaluate", "--ref", ws.call_file(2, "gold"), "--hyp", ws.call_file(2, "gold")});
      CHECK(r.code == 0);
      const json doc = json::parse(r.out);
      CHECK(doc["overall"]["pk"]["mean"].get<double>() == 0.0);
      CHECK(doc["overall"]["windowdiff"]["mean"].get<double>() == 0.0);
    }

    SUBCASE("evaluate --k out of range and N mismatch exit 1") {
      CHECK(run_cli({"evaluate", "--ref", ws.call_file(2, "gold"), "--hyp", ws.call_file(2, "gold"), "--k", "1000"}).code == 1);
      CHECK(run_cli({"evaluate", "--ref", ws.call_file(0, "gold"), "--hyp", ws.call_file(1, "gold")}).code == 1);
    }

    SUBCASE("evaluate a manifest against per-call recomputation") {
      const std::string hyp_dir = ws.path("hyp");
      std::filesystem::create_directories(hyp_dir);
      const CorpusManifest m = load_manifest(ws.manifest);
      std::vector<double> pks;
      for (std::size_t j = 0; j < m.calls.size(); ++j) {
        const std::string hyp = hyp_dir + "/" + m.calls[j].call_id + ".json";
        REQUIRE(run_cli({"segment", "--transcript", ws.call_file(static_cast<int>(j), "transcript"), "--embeddings",
                     ws.call_file(static_cast<int>(j), "embeddings"), "--anchors", ws.anchors, "--method", "greedy",
                     "--out", hyp})
                    .code == 0);
        const SegmentationResult ref = load_segmentation(ws.call_file(static_cast<int>(j), "gold"));
        pks.push_back(brute_pk(ref.labels(), load_segmentation(hyp).labels(), default_k(ref)));
      }
      const Run r = run_cli({"evaluate", "--manifest", ws.manifest, "--hyp-dir", hyp_dir, "--per-topic", "--out",
                         ws.path("report.json")});
      CHECK(r.code == 0);
      const json doc = json::parse(read_text_file(ws.path("report.json")));
      CHECK(doc["overall"]["pk"]["mean"].get<double>() == doctest::Approx(mean_std(pks).mean));
      CHECK(doc["overall"]["pk"]["std"].get<double>() == doctest::Approx(mean_std(pks).std));
      CHECK(doc["per_call"].size() == m.calls.size());

      const Run text = run_cli({"evaluate", "--manifest", ws.manifest, "--hyp-dir", hyp_dir, "--per-topic", "--topics",
                            "pricing,closing", "--format", "text"});
      CHECK(text.code == 0);
      CHECK(text.out.find("pricing") != std::string::npos);
      CHECK(text.out.find("greetings") == std::string::npos);

      CHECK(run_cli({"evaluate", "--manifest", ws.manifest, "--hyp-dir", ws.path("nothing")}).code == 2);
    }

    SUBCASE("bench prints a method table and a json summary") {
      const Run r = run_cli({"bench", "--manifest", ws.manifest, "--anchors", ws.anchors, "--config", kConfig,
                         "--methods", "gptcalls,greedy", "--out", ws.path("bench.json")});
      CHECK(r.code == 0);
      CHECK(r.out.find("gptcalls") != std::string::npos);
      CHECK(r.out.find("greedy") != std::string::npos);
      CHECK(r.out.find("texttiling") == std::string::npos);
      const json doc = json::parse(read_text_file(ws.path("bench.json")));
      REQUIRE(doc["methods"].size() == 2);
      for (const auto& row : doc["methods"]) {
        CHECK(row["pk"]["mean"].get<double>() >= 0.0);
        CHECK(row["pk"]["mean"].get<double>() <= 1.0);
        CHECK(row["windowdiff"]["mean"].get<double>() <= 1.0);
        CHECK(row["failures"].empty());
      }
    }

    SUBCASE("bench results do not depend on the job count") {
      auto rows = [&](const std::string& jobs) {
        const std::string out = ws.path("bench" + jobs + ".json");
        REQUIRE(run_cli({"bench", "--manifest", ws.manifest, "--anchors", ws.anchors, "--config", kConfig, "--jobs",
                     jobs, "--out", out})
                    .code == 0);
        json doc = json::parse(read_text_file(out));
        for (auto& row : doc["methods"]) row.erase("ms_per_call");
        return doc["methods"];
      };
      CHECK(rows("1") == rows("4"));
    }

    SUBCASE("bench records failing calls and keeps going") {
      std::filesystem::remove(ws.call_file(3, "embeddings"));
      const Run r = run_cli({"bench", "--manifest", ws.manifest, "--anchors", ws.anchors, "--methods", "greedy",
                         "--out", ws.path("partial.json")});
      CHECK(r.code == 0);
      const json doc = json::parse(read_text_file(ws.path("partial.json")));
      CHECK(doc["methods"][0]["failures"].size() == 1);
      CHECK(doc["methods"][0]["calls"].get<int>() == 5);
    }

    SUBCASE("bench on an empty manifest exits 1") {
      write_text_file(ws.path("empty.json"), R"({"seed": 1, "calls": []})");
      CHECK(run_cli({"bench", "--manifest", ws.path("empty.json"), "--anchors", ws.anchors}).code == 1);
    }
  }

  TEST_CASE("zero-noise call segments to its gold through the cli") {
    TempDir dir("zero");
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 16);
    save_anchor_set(anchors, dir / "a.json");
    write_text_file(dir / "plan.json",
                    R"({"segments": [{"label": "greetings", "len": 4}, {"label": "pricing", "len": 10},)"
                    R"( {"label": "closing", "len": 4}], "noise_sigma": 0.0})");
    REQUIRE(run_cli({"synth", "--plan", (dir / "plan.json").string(), "--anchors", (dir / "a.json").string(), "--count",
                 "1", "--out-dir", (dir / "c").string()})
                .code == 0);
    const Run r = run_cli({"segment", "--transcript", (dir / "c" / "call_0000.transcript.json").string(), "--embeddings",
                       (dir / "c" / "call_0000.embeddings.json").string(), "--anchors", (dir / "a.json").string(),
                       "--config", kConfig});
    REQUIRE(r.code == 0);
    CHECK(parse_segmentation(r.out).labels() == load_segmentation(dir / "c" / "call_0000.gold.json").labels());
  }

  TEST_CASE("synth is repeatable and reports errors") {
    TempDir dir("synth");
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 16);
    save_anchor_set(anchors, dir / "a.json");
    const std::string a = (dir / "a.json").string();
    CHECK(run_cli({"synth", "--anchors", a, "--count", "5", "--seed", "3", "--out-dir", (dir / "x").string()}).code == 0);
    CHECK(run_cli({"synth", "--anchors", a, "--count", "5", "--seed", "3", "--out-dir", (dir / "y").string()}).code == 0);
    CHECK(load_manifest(dir / "x" / "manifest.json").calls.size() == 5);
    for (const char* f : {"manifest.json", "call_0004.embeddings.json", "call_0002.gold.json"}) {
      CHECK(read_text_file(dir / "x" / f) == read_text_file(dir / "y" / f));
    }

    write_text_file(dir / "bad.json", R"({"segments": [{"label": "billing", "len": 3}]})");
    CHECK(run_cli({"synth", "--plan", (dir / "bad.json").string(), "--anchors", a, "--out-dir", (dir / "z").string()})
              .code == 1);

    write_text_file(dir / "blocker", "x");
    CHECK(run_cli({"synth", "--anchors", a, "--count", "1", "--out-dir", (dir / "blocker" / "sub").string()}).code == 2);

    write_text_file(dir / "spec.json", R"({"topics": ["pricing", "closing"], "len_range": [3, 4]})");
    CHECK(run_cli({"synth", "--spec", (dir / "spec.json").string(), "--anchors", a, "--count", "2", "--sigma", "0",
               "--out-dir", (dir / "w").string()})
              .code == 0);
  }

  TEST_CASE("synth-sentences writes a parseable corpus") {
    TempDir dir("sentences");
    const Run r = run_cli({"synth-sentences", "--topics", "pricing,closing", "--dim", "8", "--per-direction", "4",
                       "--outliers", "1"});
    CHECK(r.code == 0);
    const auto groups = parse_sentence_corpus(r.out);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].items.size() == 9);
  }
}
