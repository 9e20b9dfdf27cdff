#include "convseg/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "convseg/error.hpp"
#include "convseg/vector_ops.hpp"

namespace convseg {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void TopicProbMatrix::validate(double tol) const {
  if (probs.cols() != topics.size()) {
    throw ValidationError("probability matrix has " + std::to_string(probs.cols()) + " columns for " +
                          std::to_string(topics.size()) + " topics");
  }
  if (probs.rows() == 0) throw ValidationError("probability matrix has no rows");
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double total = 0.0;
    for (double p : probs.row(i)) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probability row " + std::to_string(i) + " has an entry outside [0, 1]");
      total += p;
    }
    if (std::abs(total - 1.0) > tol) {
      throw ValidationError("probability row " + std::to_string(i) + " sums to " + std::to_string(total));
    }
  }
}

double utterance_topic_score(const Embedding& utterance, std::span<const Embedding> anchors) {
  if (anchors.empty()) throw ValidationError("topic has no anchors to score against");
  double best = -std::numeric_limits<double>::infinity();
  for (const Embedding& a : anchors) best = std::max(best, cosine_similarity(utterance.values(), a.values()));
  return best;
}

TopicScoreMatrix score_transcript(std::span<const Embedding> utterances, const AnchorSet& anchors,
                                  std::string call_id) {
  if (utterances.empty()) throw ValidationError("cannot score an empty transcript");
  require_dim(utterances, anchors.dim, "utterance embedding");

  TopicScoreMatrix out{std::move(call_id), anchors.topic_names(), Matrix(utterances.size(), anchors.topics.size())};
  for (std::size_t c = 0; c < anchors.topics.size(); ++c) {
    const auto& topic_anchors = anchors.topics[c].anchors;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      out.scores(i, c) = utterance_topic_score(utterances[i], topic_anchors);
    }
  }
  return out;
}

TopicProbMatrix to_probabilities(const TopicScoreMatrix& scores, double temperature) {
  TopicProbMatrix out{scores.call_id, scores.topics, Matrix(scores.scores.rows(), scores.scores.cols())};
  for (std::size_t i = 0; i < scores.scores.rows(); ++i) {
    const std::vector<double> p = softmax(scores.scores.row(i), temperature);
    std::copy(p.begin(), p.end(), out.probs.row(i).begin());
  }
  return out;
}

void write_matrix_csv(std::ostream& out, std::span<const std::string> topics, const Matrix& m) {
  out << "utterance";
  for (const std::string& t : topics) out << ',' << t;
  out << '\n' << std::setprecision(10);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << i;
    for (double v : m.row(i)) out << ',' << v;
    out << '\n';
  }
}

}  // namespace convseg
