#include "convseg/temporal.hpp"

#include <cmath>

#include "convseg/error.hpp"
#include "convseg/vector_ops.hpp"

namespace convseg {

void DiffusionConfig::validate(std::size_t num_topics) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("diffusion alpha must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("diffusion lambda must be > 0");
  if (!peak_thresholds.empty() && peak_thresholds.size() != num_topics) {
    throw ValidationError("diffusion config has " + std::to_string(peak_thresholds.size()) +
                          " peak thresholds for " + std::to_string(num_topics) + " topics");
  }
}

std::vector<HeatSource> detect_heat_sources(const TopicProbMatrix& probs, const DiffusionConfig& cfg) {
  probs.validate();
  cfg.validate(probs.num_topics());
  const std::size_t n = probs.num_utterances();
  std::vector<HeatSource> sources;
  for (std::size_t c = 0; c < probs.num_topics(); ++c) {
    const double threshold = cfg.peak_threshold(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = probs.probs(i, c);
      if (v < threshold) continue;
      if (i > 0 && probs.probs(i - 1, c) >= v) continue;  // not rising, or inside a plateau
      std::size_t next = i + 1;
      while (next < n && probs.probs(next, c) == v) ++next;
      if (next < n && probs.probs(next, c) > v) continue;
      sources.push_back({c, i, v});
    }
  }
  return sources;
}

Matrix diffuse(const TopicProbMatrix& probs, std::span<const HeatSource> sources, const DiffusionConfig& cfg) {
  cfg.validate(probs.num_topics());
  const std::size_t n = probs.num_utterances();
  const std::size_t t = probs.num_topics();
  Matrix adjusted = probs.probs;
  if (n == 0) return adjusted;

  // Per topic, source value by utterance (negative = none).
  std::vector<std::vector<double>> value_at(t, std::vector<double>(n, -1.0));
  for (const HeatSource& s : sources) {
    if (s.topic >= t || s.utterance >= n) throw ValidationError("heat source outside the probability matrix");
    value_at[s.topic][s.utterance] = s.value;
  }

  for (std::size_t c = 0; c < t; ++c) {
    const auto& col = value_at[c];
    // nearest source strictly to the left / right of each index
    std::vector<std::ptrdiff_t> left(n, -1), right(n, -1);
    for (std::size_t i = 1; i < n; ++i) {
      left[i] = col[i - 1] >= 0.0 ? static_cast<std::ptrdiff_t>(i - 1) : left[i - 1];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
      right[i] = col[i + 1] >= 0.0 ? static_cast<std::ptrdiff_t>(i + 1) : right[i + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double boost = 0.0;
      if (left[i] >= 0) {
        const auto d = i - static_cast<std::size_t>(left[i]);
        if (d <= cfg.cutoff) boost += col[left[i]] * std::exp(-static_cast<double>(d) / cfg.lambda);
      }
      if (right[i] >= 0) {
        const auto d = static_cast<std::size_t>(right[i]) - i;
        if (d <= cfg.cutoff) boost += col[right[i]] * std::exp(-static_cast<double>(d) / cfg.lambda);
      }
      adjusted(i, c) += cfg.alpha * boost;
    }
  }
  return adjusted;
}

TopicProbMatrix renormalize(const TopicProbMatrix& like, const Matrix& adjusted, double temperature) {
  if (adjusted.rows() != like.num_utterances() || adjusted.cols() != like.num_topics()) {
    throw ValidationError("diffused matrix shape does not match the probability matrix");
  }
  TopicProbMatrix out{like.call_id, like.topics, Matrix(adjusted.rows(), adjusted.cols())};
  for (std::size_t i = 0; i < adjusted.rows(); ++i) {
    const std::vector<double> p = softmax(adjusted.row(i), temperature);
    std::copy(p.begin(), p.end(), out.probs.row(i).begin());
  }
  return out;
}

}  // namespace convseg
