#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "convseg/anchors.hpp"
#include "convseg/types.hpp"

namespace convseg {

/// Dense row-major matrix; rows are utterances, columns are topics.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Max-cosine utterance/topic scores, one column per topic in AnchorSet order.
struct TopicScoreMatrix {
  std::string call_id;
  std::vector<std::string> topics;
  Matrix scores;
};

/// Row-stochastic topic probabilities: the multivariate time series the
/// temporal stage and the window tagger operate on.
struct TopicProbMatrix {
  std::string call_id;
  std::vector<std::string> topics;
  Matrix probs;

  std::size_t num_utterances() const noexcept { return probs.rows(); }
  std::size_t num_topics() const noexcept { return probs.cols(); }

  /// Shape consistent with topics, entries in [0, 1] (softmax underflow can
  /// produce exact zeros), rows sum to 1 within `tol`.
  void validate(double tol = 1e-9) const;
};

/// Highest cosine similarity between `utterance` and any of `anchors`.
double utterance_topic_score(const Embedding& utterance, std::span<const Embedding> anchors);

TopicScoreMatrix score_transcript(std::span<const Embedding> utterances, const AnchorSet& anchors,
                                  std::string call_id = {});

/// Row-wise softmax at `temperature`.
TopicProbMatrix to_probabilities(const TopicScoreMatrix& scores, double temperature = 1.0);

/// CSV dump: header of topic names, one row per utterance, prefixed by the utterance index.
void write_matrix_csv(std::ostream& out, std::span<const std::string> topics, const Matrix& m);

}  // namespace convseg
