#include <algorithm>
#include <random>

#include "convseg/error.hpp"
#include "convseg/pipeline.hpp"
#include "convseg/synthetic.hpp"
#include "convseg/tagger.hpp"
#include "convseg/vector_ops.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace convseg;
using namespace convseg::testing;

namespace {

TopicWindowConfig windows(std::vector<TopicWindow> topics, std::size_t min_len = 2) {
  TopicWindowConfig cfg;
  cfg.topics = std::move(topics);
  cfg.min_segment_len = min_len;
  return cfg;
}

TopicProbMatrix random_probs(std::mt19937_64& rng, std::size_t n, std::size_t t, double sharpness) {
  std::normal_distribution<double> g(0.0, sharpness);
  TopicProbMatrix m;
  for (std::size_t c = 0; c < t; ++c) m.topics.push_back("t" + std::to_string(c));
  m.probs = Matrix(n, t);
  // a slowly drifting favourite topic gives runs worth tagging
  std::size_t fav = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 6 == 0) fav = rng() % t;
    std::vector<double> s(t);
    for (double& x : s) x = g(rng);
    s[fav] += sharpness;
    const auto p = softmax(s);
    std::copy(p.begin(), p.end(), m.probs.row(i).begin());
  }
  return m;
}

Transcript transcript_of(std::size_t n, const std::string& id = "call") {
  Transcript t{id, {}};
  for (std::size_t i = 0; i < n; ++i) t.utterances.push_back({i, "u" + std::to_string(i), {}, {}, {}});
  return t;
}

PipelineConfig synthetic_config() { return load_pipeline_config(CONVSEG_CONFIG_DIR "/synthetic.json"); }

std::size_t background_count(const SegmentationResult& r) {
  std::size_t n = 0;
  for (const Segment& s : r.segments) n += s.is_background() ? s.length() : 0;
  return n;
}

}  // namespace

TEST_SUITE("tag_windows") {
  TEST_CASE("constant column yields every placement") {
    const auto m = column_pair({0.9, 0.9, 0.9, 0.9, 0.9});
    const auto c = tag_windows(m, windows({{3, 0.5}, {3, 0.5}}));
    REQUIRE(c.size() == 3);
    CHECK(c[0].start == 0);
    CHECK(c[0].end == 3);
    CHECK(c[2].start == 2);
    CHECK(c[2].end == 5);
    CHECK(c[1].score == doctest::Approx(0.9));
  }

  TEST_CASE("nothing above threshold") {
    const auto m = prob_matrix({{0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}});
    CHECK(tag_windows(m, windows({{1, 0.5}, {1, 0.5}, {1, 0.5}})).empty());
  }

  TEST_CASE("threshold is strict") {
    const auto m = column_pair({0.9, 0.9, 0.9, 0.1, 0.1});
    const auto c = tag_windows(m, windows({{2, 0.5}, {2, 0.95}}));
    REQUIRE(c.size() == 2);
    CHECK(c[0] == CandidateWindow{0, 0, 2, c[0].score});
    CHECK(c[1] == CandidateWindow{0, 1, 3, c[1].score});
    CHECK(c[0].score == doctest::Approx(0.9));
    // [2,4) has mean exactly 0.5 and is excluded
  }

  TEST_CASE("wide windows clamp to the call") {
    const auto m = column_pair({0.9, 0.8});
    const auto c = tag_windows(m, windows({{6, 0.5}, {6, 0.5}}));
    REQUIRE(c.size() == 1);
    CHECK(c[0].start == 0);
    CHECK(c[0].end == 2);
  }

  TEST_CASE("every candidate has the configured width and clears its threshold") {
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 50; ++trial) {
      const auto m = random_probs(rng, 10 + trial, 3, 2.0);
      const auto cfg = windows({{2, 0.4}, {3, 0.5}, {5, 0.6}});
      for (const CandidateWindow& w : tag_windows(m, cfg)) {
        CHECK(w.end - w.start == cfg.topics[w.topic].width);
        CHECK(w.score > cfg.topics[w.topic].threshold);
      }
    }
  }

  TEST_CASE("config validation") {
    const auto m = column_pair({0.9});
    CHECK_THROWS_AS(tag_windows(m, windows({{1, 0.5}})), ValidationError);
    CHECK_THROWS_AS(tag_windows(m, windows({{0, 0.5}, {1, 0.5}})), ValidationError);
    CHECK_THROWS_AS(tag_windows(m, windows({{1, 1.0}, {1, 0.5}})), ValidationError);
    CHECK_THROWS_AS(tag_windows(m, windows({{1, 0.5}, {1, 0.5}}, 0)), ValidationError);
  }
}

TEST_SUITE("merge_and_resolve") {
  TEST_CASE("same-topic windows merge") {
    auto m = column_pair({0.9, 0.9, 0.9, 0.9, 0.9});
    m.topics = {"pricing", "closing"};
    const std::vector<CandidateWindow> c{{0, 0, 3, 0.9}, {0, 2, 5, 0.9}};
    const auto r = merge_and_resolve(c, m, windows({{3, 0.5}, {3, 0.5}}));
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].label == "pricing");
    CHECK(r.segments[0].end == 5);
    CHECK(r.segments[0].score == doctest::Approx(0.9));
  }

  TEST_CASE("adjacent windows merge too") {
    auto m = column_pair({0.9, 0.9, 0.9, 0.9});
    const std::vector<CandidateWindow> c{{0, 0, 2, 0.9}, {0, 2, 4, 0.9}};
    const auto r = merge_and_resolve(c, m, windows({{2, 0.5}, {2, 0.5}}));
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].label == "t0");
  }

  TEST_CASE("no candidates is one background segment") {
    const auto m = column_pair({0.5, 0.5, 0.5, 0.5});
    const auto r = merge_and_resolve({}, m, windows({{3, 0.5}, {3, 0.5}}));
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0] == Segment{0, 4, "background", 0.0});
  }

  TEST_CASE("higher run claims the overlap first") {
    // pricing averages 0.7 over [0,4), scheduling 0.8 over [2,6)
    const auto m = prob_matrix({{1.0, 0.0}, {1.0, 0.0}, {0.4, 0.6}, {0.4, 0.6}, {0.0, 1.0}, {0.0, 1.0}},
                               {"pricing", "scheduling"});
    const std::vector<CandidateWindow> c{{0, 0, 4, 0.8}, {1, 2, 6, 0.9}};
    const auto r = merge_and_resolve(c, m, windows({{4, 0.5}, {4, 0.5}}));
    REQUIRE(r.segments.size() == 2);
    CHECK(r.segments[0].label == "pricing");
    CHECK(r.segments[0].start == 0);
    CHECK(r.segments[0].end == 2);
    CHECK(r.segments[1].label == "scheduling");
    CHECK(r.segments[1].start == 2);
    CHECK(r.segments[1].end == 6);
  }

  TEST_CASE("short remainders are dropped to background") {
    const auto m = prob_matrix({{0.6, 0.4}, {0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}}, {"a", "b"});
    const std::vector<CandidateWindow> c{{0, 0, 2, 0.4}, {1, 1, 4, 0.8}};
    const auto r = merge_and_resolve(c, m, windows({{2, 0.3}, {3, 0.5}}));
    REQUIRE(r.segments.size() == 2);
    CHECK(r.segments[0] == Segment{0, 1, "background", 0.0});
    CHECK(r.segments[1].label == "b");
  }

  TEST_CASE("a run split in two keeps both long fragments") {
    // b wins the middle; a keeps [0,2) and [4,7)
    const auto m = prob_matrix(
        {{0.7, 0.3}, {0.7, 0.3}, {0.05, 0.95}, {0.05, 0.95}, {0.7, 0.3}, {0.7, 0.3}, {0.7, 0.3}}, {"a", "b"});
    const std::vector<CandidateWindow> c{{0, 0, 7, 0.5}, {1, 2, 4, 0.95}};
    const auto r = merge_and_resolve(c, m, windows({{7, 0.4}, {2, 0.5}}));
    REQUIRE(r.segments.size() == 3);
    CHECK(r.segments[0] == Segment{0, 2, "a", r.segments[0].score});
    CHECK(r.segments[1].label == "b");
    CHECK(r.segments[2].start == 4);
    CHECK(r.segments[2].label == "a");
  }

  TEST_CASE("ties go to the earlier start, then the lower topic") {
    const auto m = prob_matrix({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, {"a", "b"});
    const std::vector<CandidateWindow> c{{1, 0, 3, 0.5}, {0, 0, 3, 0.5}};
    const auto r = merge_and_resolve(c, m, windows({{3, 0.4}, {3, 0.4}}));
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].label == "a");
  }

  TEST_CASE("min length clamps to a one-utterance call") {
    const auto m = prob_matrix({{0.9, 0.1}}, {"pricing", "closing"});
    const std::vector<CandidateWindow> c{{0, 0, 1, 0.9}};
    const auto r = merge_and_resolve(c, m, windows({{3, 0.5}, {3, 0.5}}));
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].label == "pricing");
  }

  TEST_CASE("output invariants on random inputs") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + trial % 40;
      const auto m = random_probs(rng, n, 4, 1.5 + (trial % 3));
      const auto cfg = windows({{1 + rng() % 5, 0.3}, {1 + rng() % 5, 0.4}, {1 + rng() % 5, 0.5}, {2, 0.35}},
                               1 + rng() % 4);
      const auto r = merge_and_resolve(tag_windows(m, cfg), m, cfg);
      CHECK_NOTHROW(r.validate(n));
      for (const Segment& s : r.segments) {
        if (!s.is_background()) CHECK(s.length() >= std::min(cfg.min_segment_len, n));
      }
    }
  }

  TEST_CASE("raising thresholds only shrinks candidate coverage") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 5 + trial % 40;
      const auto m = random_probs(rng, n, 3, 2.0);
      auto lo = windows({{3, 0.3}, {4, 0.35}, {2, 0.4}});
      auto hi = lo;
      const double bump = 0.02 + 0.1 * static_cast<double>(rng() % 5);
      for (TopicWindow& w : hi.topics) w.threshold = std::min(0.99, w.threshold + bump);
      auto covered = [&](const TopicWindowConfig& cfg) {
        std::vector<bool> c(n, false);
        for (const CandidateWindow& w : tag_windows(m, cfg)) std::fill(c.begin() + w.start, c.begin() + w.end, true);
        return c;
      };
      const auto cov_lo = covered(lo), cov_hi = covered(hi);
      const auto labels = merge_and_resolve(tag_windows(m, hi), m, hi).labels();
      for (std::size_t i = 0; i < n; ++i) {
        CHECK((cov_lo[i] || !cov_hi[i]));
        if (!cov_lo[i]) CHECK(labels[i] == kBackground);
      }
    }
  }

  TEST_CASE("short-remainder drop can release coverage at a higher threshold") {
    // A's weak tail at 3 wins under the low threshold and strands B's [4,6)
    // below min_len; raising A's threshold hands [3,6) to B.
    const auto m = prob_matrix({{0.6, 0.2, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.45, 0.45, 0.1},
                                {0.2, 0.5, 0.3},
                                {0.2, 0.5, 0.3}});
    const auto lo = windows({{1, 0.4}, {1, 0.4}, {1, 0.9}}, 3);
    const auto hi = windows({{1, 0.5}, {1, 0.41}, {1, 0.95}}, 3);
    CHECK(background_count(merge_and_resolve(tag_windows(m, lo), m, lo)) == 2);
    CHECK(background_count(merge_and_resolve(tag_windows(m, hi), m, hi)) == 0);
  }
}

TEST_SUITE("segment_call") {
  TEST_CASE("single utterance with permissive thresholds") {
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 8);
    PipelineConfig cfg = PipelineConfig::defaults();
    // two softmaxes at temperature 1 leave the one-hot row near 0.244
    for (TopicParams& p : cfg.topics) p.threshold = 0.21;
    const std::vector<Embedding> emb{anchors.topics[anchors.find("pricing")].anchors[0]};
    const auto r = segment_call(transcript_of(1), emb, anchors, cfg);
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].label == "pricing");
    CHECK(r.segments[0].end == 1);
  }

  TEST_CASE("zero-noise planted plan is recovered exactly") {
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 16);
    CallPlan plan{{{"greetings", 4}, {"pricing", 10}, {"closing", 4}}, 0.0, 3};
    const SyntheticCall call = generate_call(plan, anchors, "planted");
    const auto r = segment_call(call.transcript, call.embeddings, anchors, synthetic_config());
    CHECK(r.labels() == call.gold.labels());
    CHECK(r.segments.size() == 3);
  }

  TEST_CASE("trace exposes every stage") {
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 16);
    CallPlan plan{{{"greetings", 5}, {"background", 3}, {"closing", 5}}, 0.1, 9};
    const SyntheticCall call = generate_call(plan, anchors, "traced");
    const PipelineTrace t = segment_call_traced(call.transcript, call.embeddings, anchors, synthetic_config());
    CHECK(t.scores.scores.rows() == 13);
    CHECK_NOTHROW(t.probs.validate());
    CHECK_NOTHROW(t.smoothed.validate());
    CHECK(t.diffused.rows() == 13);
    CHECK(t.result == segment_call(call.transcript, call.embeddings, anchors, synthetic_config()));
    for (std::size_t i = 0; i < 13; ++i) {
      for (std::size_t c = 0; c < 5; ++c) CHECK(t.diffused(i, c) >= t.probs.probs(i, c));
    }
  }

  TEST_CASE("deterministic and invariant to topic order") {
    PlantedCorpusSpec spec;
    spec.topics = default_topics();
    spec.dim = 24;
    spec.sentences_per_direction = 12;
    const AnchorSet anchors = extract_anchors(make_planted_corpus(spec).corpus);
    AnchorSet reversed = anchors;
    std::reverse(reversed.topics.begin(), reversed.topics.end());

    PlanDistribution dist;
    dist.topics = default_topics();
    const PipelineConfig cfg = synthetic_config();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SyntheticCall call = generate_call(dist.sample(seed), anchors, "c");
      const auto a = segment_call(call.transcript, call.embeddings, anchors, cfg);
      CHECK(a == segment_call(call.transcript, call.embeddings, anchors, cfg));
      const auto b = segment_call(call.transcript, call.embeddings, reversed, cfg);
      CHECK(a.labels() == b.labels());
    }
  }

  TEST_CASE("errors name the failing stage") {
    const AnchorSet anchors = orthogonal_anchors({"pricing"}, 4);
    const PipelineConfig cfg = PipelineConfig{};
    const std::vector<Embedding> two{basis(0, 4), basis(0, 4)};
    try {
      segment_call(transcript_of(3), two, anchors, cfg);
      FAIL("expected a length error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
      CHECK(std::string(e.what()).find("input stage") != std::string::npos);
    }
    const std::vector<Embedding> wrong{basis(0, 5)};
    try {
      segment_call(transcript_of(1), wrong, anchors, cfg);
      FAIL("expected a dimension error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kValidation);
    }
    PipelineConfig bad;
    bad.temperature = 0.0;
    const std::vector<Embedding> one{basis(0, 4)};
    CHECK_THROWS_AS(segment_call(transcript_of(1), one, anchors, bad), Error);
    PipelineConfig unknown;
    unknown.topics.push_back({"closing", 0.5, 3, 0.5});
    CHECK_THROWS_AS(segment_call(transcript_of(1), one, anchors, unknown), Error);
  }

  TEST_CASE("baseline methods through run_method") {
    const AnchorSet anchors = orthogonal_anchors(default_topics(), 16);
    CallPlan plan{{{"greetings", 6}, {"pricing", 6}, {"closing", 6}}, 0.0, 1};
    const SyntheticCall call = generate_call(plan, anchors, "m");
    PipelineConfig cfg = synthetic_config();
    for (Method m : {Method::kGptCalls, Method::kGreedy, Method::kTextTiling}) {
      const auto r = run_method(m, call.transcript, call.embeddings, anchors, cfg);
      CHECK_NOTHROW(r.validate(18));
      CHECK(parse_method(method_name(m)) == m);
    }
    CHECK_FALSE(parse_method("bert").has_value());
  }
}

TEST_SUITE("pipeline config") {
  TEST_CASE("defaults carry the placeholder widths") {
    const PipelineConfig cfg = PipelineConfig::defaults();
    CHECK(cfg.temperature == 1.0);
    CHECK(cfg.params_for("greetings").window_width == 3);
    CHECK(cfg.params_for("closing").window_width == 3);
    CHECK(cfg.params_for("identification").window_width == 4);
    CHECK(cfg.params_for("pricing").window_width == 6);
    CHECK(cfg.params_for("scheduling").window_width == 5);
    CHECK(cfg.params_for("other").window_width == 3);
    CHECK(cfg.params_for("pricing").threshold == 0.5);
  }

  TEST_CASE("json round trip") {
    testing::TempDir dir("config");
    PipelineConfig cfg = PipelineConfig::defaults();
    cfg.temperature = 0.25;
    cfg.cutoff = 4;
    cfg.greedy.tau = 0.3;
    cfg.texttiling.block_size = 5;
    save_pipeline_config(cfg, dir / "c.json");
    const PipelineConfig back = load_pipeline_config(dir / "c.json");
    CHECK(back.temperature == 0.25);
    CHECK(back.cutoff == 4);
    CHECK(back.topics == cfg.topics);
    CHECK(back.greedy.tau == 0.3);
    CHECK(back.texttiling.block_size == 5);
  }

  TEST_CASE("partial documents keep defaults") {
    const PipelineConfig cfg = parse_pipeline_config(R"({"diffusion": {"alpha": 0.1}})");
    CHECK(cfg.alpha == 0.1);
    CHECK(cfg.lambda == 2.0);
    CHECK(cfg.topics.empty());
  }

  TEST_CASE("invalid documents") {
    CHECK_THROWS_AS(parse_pipeline_config("[]"), ValidationError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"temperature": "hot"})"), ValidationError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"topics": [{"name": "a", "threshold": 1.5}]})"), ValidationError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"topics": [{"name": "a"}, {"name": "a"}]})"), ValidationError);
    CHECK_THROWS_AS(parse_pipeline_config("{oops"), IoError);
  }

  TEST_CASE("shipped synthetic config is valid") {
    const PipelineConfig cfg = synthetic_config();
    CHECK(cfg.topics.size() == 5);
    CHECK_NOTHROW(cfg.validate(orthogonal_anchors(default_topics(), 8)));
  }
}
