#include "convseg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "convseg/error.hpp"
#include "json_util.hpp"

namespace convseg {

using detail::json;

namespace {

void check_window(std::size_t n_ref, std::size_t n_hyp, std::size_t k) {
  if (n_ref != n_hyp) {
    throw ValidationError("reference has " + std::to_string(n_ref) + " utterances, hypothesis has " +
                          std::to_string(n_hyp));
  }
  if (k < 1 || k >= n_ref) {
    throw ValidationError("window size k=" + std::to_string(k) + " out of range for N=" + std::to_string(n_ref));
  }
}

// prefix[p] = number of boundaries at positions < p, for p in [0, N].
std::vector<std::size_t> boundary_prefix(std::span<const std::string> labels) {
  std::vector<std::size_t> prefix(labels.size() + 1, 0);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const bool boundary = p + 1 < labels.size() && labels[p] != labels[p + 1];
    prefix[p + 1] = prefix[p] + (boundary ? 1 : 0);
  }
  return prefix;
}

// boundaries at positions [lo, hi), positions past the end contribute nothing
std::size_t count_between(const std::vector<std::size_t>& prefix, std::size_t lo, std::size_t hi) {
  const std::size_t cap = prefix.size() - 1;
  return prefix[std::min(hi, cap)] - prefix[std::min(lo, cap)];
}

}  // namespace

double pk(std::span<const std::string> ref, std::span<const std::string> hyp, std::size_t k) {
  check_window(ref.size(), hyp.size(), k);
  const auto r = boundary_prefix(ref);
  const auto h = boundary_prefix(hyp);
  const std::size_t placements = ref.size() - k + 1;
  std::size_t penalties = 0;
  for (std::size_t i = 0; i < placements; ++i) {
    const bool same_ref = count_between(r, i, i + k) == 0;
    const bool same_hyp = count_between(h, i, i + k) == 0;
    penalties += same_ref != same_hyp ? 1 : 0;
  }
  return static_cast<double>(penalties) / static_cast<double>(placements);
}

double window_diff(std::span<const std::string> ref, std::span<const std::string> hyp, std::size_t k) {
  check_window(ref.size(), hyp.size(), k);
  const auto r = boundary_prefix(ref);
  const auto h = boundary_prefix(hyp);
  const std::size_t placements = ref.size() - k + 1;
  std::size_t penalties = 0;
  for (std::size_t i = 0; i < placements; ++i) {
    penalties += count_between(r, i, i + k + 1) != count_between(h, i, i + k + 1) ? 1 : 0;
  }
  return static_cast<double>(penalties) / static_cast<double>(placements);
}

double pk(const SegmentationResult& ref, const SegmentationResult& hyp, std::size_t k) {
  return pk(ref.labels(), hyp.labels(), k);
}

double window_diff(const SegmentationResult& ref, const SegmentationResult& hyp, std::size_t k) {
  return window_diff(ref.labels(), hyp.labels(), k);
}

std::size_t default_k(std::size_t n, std::size_t num_segments) {
  if (num_segments == 0) throw ValidationError("default_k needs a reference with at least one segment");
  const auto half_mean = std::lround(static_cast<double>(n) / (2.0 * static_cast<double>(num_segments)));
  std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(std::max(0L, half_mean)));
  if (n >= 2) k = std::min(k, n - 1);
  return k;
}

std::size_t default_k(const SegmentationResult& ref) {
  return default_k(ref.num_utterances(), ref.segments.size());
}

std::vector<std::string> binarize(std::span<const std::string> labels, const std::string& topic) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) out.push_back(l == topic ? topic : std::string(kBackground));
  return out;
}

TopicMetrics per_topic_eval(const SegmentationResult& ref, const SegmentationResult& hyp, const std::string& topic,
                            std::optional<std::size_t> k) {
  const auto ref_bin = binarize(ref.labels(), topic);
  const auto hyp_bin = binarize(hyp.labels(), topic);
  if (ref_bin.size() != hyp_bin.size()) check_window(ref_bin.size(), hyp_bin.size(), 1);

  TopicMetrics m;
  auto present = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), topic) != v.end(); };
  if (!present(ref_bin) && !present(hyp_bin)) {
    m.absent = true;
    return m;
  }
  const SegmentationResult ref_seg = segmentation_from_labels(ref.call_id, ref_bin);
  m.k = k.value_or(default_k(ref_seg));
  if (ref_bin.size() < 2 && !k) return m;  // a single utterance has no boundaries to disagree on
  m.pk = pk(ref_bin, hyp_bin, m.k);
  m.window_diff = window_diff(ref_bin, hyp_bin, m.k);
  return m;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

CallMetrics evaluate_call(const SegmentationResult& ref, const SegmentationResult& hyp, const ReportOptions& options) {
  const auto ref_labels = ref.labels();
  const auto hyp_labels = hyp.labels();
  CallMetrics c;
  c.call_id = ref.call_id;
  c.num_utterances = ref_labels.size();
  if (ref_labels.size() != hyp_labels.size()) check_window(ref_labels.size(), hyp_labels.size(), 1);
  c.k = options.k.value_or(default_k(ref));
  if (ref_labels.size() >= 2 || options.k) {
    c.pk = pk(ref_labels, hyp_labels, c.k);
    c.window_diff = window_diff(ref_labels, hyp_labels, c.k);
  }
  for (const std::string& topic : options.topics) c.per_topic[topic] = per_topic_eval(ref, hyp, topic, options.k);
  return c;
}

MetricReport summarize(std::vector<CallMetrics> calls, std::vector<std::string> topics) {
  MetricReport report;
  std::vector<double> pks, wds;
  for (const CallMetrics& c : calls) {
    pks.push_back(c.pk);
    wds.push_back(c.window_diff);
  }
  report.pk = mean_std(pks);
  report.window_diff = mean_std(wds);
  for (const std::string& topic : topics) {
    std::vector<double> tp, tw;
    TopicSummary summary;
    for (const CallMetrics& c : calls) {
      auto it = c.per_topic.find(topic);
      if (it == c.per_topic.end()) continue;
      if (it->second.absent) {
        ++summary.absent_calls;
        continue;
      }
      tp.push_back(it->second.pk);
      tw.push_back(it->second.window_diff);
    }
    summary.pk = mean_std(tp);
    summary.window_diff = mean_std(tw);
    report.per_topic[topic] = summary;
  }
  report.topic_order = std::move(topics);
  report.per_call = std::move(calls);
  return report;
}

MetricReport corpus_report(std::span<const std::pair<SegmentationResult, SegmentationResult>> pairs,
                           const ReportOptions& options) {
  if (pairs.empty()) throw ValidationError("corpus report needs at least one (reference, hypothesis) pair");
  std::vector<CallMetrics> calls;
  calls.reserve(pairs.size());
  for (const auto& [ref, hyp] : pairs) calls.push_back(evaluate_call(ref, hyp, options));
  return summarize(std::move(calls), options.topics);
}

namespace {

json mean_std_json(const MeanStd& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.count}}; }

std::string cell(const MeanStd& pk, const MeanStd& wd) {
  if (pk.count == 0) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f/%.3f", pk.mean, wd.mean);
  return buf;
}

std::string pm(const MeanStd& s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", s.mean, s.std);
  return buf;
}

}  // namespace

std::string MetricReport::to_json() const {
  json per_topic_json = json::object();
  for (const auto& [topic, s] : per_topic) {
    per_topic_json[topic] = {{"pk", mean_std_json(s.pk)},
                             {"windowdiff", mean_std_json(s.window_diff)},
                             {"absent_calls", s.absent_calls}};
  }
  json calls = json::array();
  for (const CallMetrics& c : per_call) {
    json j = {{"call_id", c.call_id}, {"n", c.num_utterances}, {"k", c.k}, {"pk", c.pk}, {"windowdiff", c.window_diff}};
    if (!c.per_topic.empty()) {
      json t = json::object();
      for (const auto& [topic, m] : c.per_topic) {
        t[topic] = {{"pk", m.pk}, {"windowdiff", m.window_diff}, {"k", m.k}, {"absent", m.absent}};
      }
      j["per_topic"] = std::move(t);
    }
    calls.push_back(std::move(j));
  }
  return json{{"overall", {{"pk", mean_std_json(pk)}, {"windowdiff", mean_std_json(window_diff)}}},
              {"per_topic", std::move(per_topic_json)},
              {"per_call", std::move(calls)}}
      .dump(2);
}

std::string MetricReport::to_text() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-18s %-18s %s\n", "", "Pk", "WinDiff", "calls");
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %-18s %-18s %zu\n", "overall", pm(pk).c_str(), pm(window_diff).c_str(),
                pk.count);
  out << line;
  if (!topic_order.empty()) {
    out << "\nPer-topic Pk/WinDiff (mean over calls where the topic occurs)\n";
    std::size_t width = 12;
    for (const std::string& t : topic_order) width = std::max(width, t.size() + 2);
    const int w = static_cast<int>(width);
    std::snprintf(line, sizeof(line), "%-*s", w, "");
    out << line;
    for (const std::string& t : topic_order) {
      std::snprintf(line, sizeof(line), "%-*s", w, t.c_str());
      out << line;
    }
    out << '\n';
    std::snprintf(line, sizeof(line), "%-*s", w, "Pk/WinDiff");
    out << line;
    for (const std::string& t : topic_order) {
      const TopicSummary& s = per_topic.at(t);
      std::snprintf(line, sizeof(line), "%-*s", w, cell(s.pk, s.window_diff).c_str());
      out << line;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace convseg
