#include "convseg/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convseg/error.hpp"

namespace convseg {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<double> normalized(std::span<const double> v) {
  const double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ValidationError("cannot normalize a zero-norm or non-finite vector");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double d = dot(a, b);
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw ValidationError("cosine similarity of a zero-norm vector");
  }
  return std::clamp(d / (na * nb), -1.0, 1.0);
}

std::vector<double> softmax(std::span<const double> scores, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("softmax temperature must be positive, got " + std::to_string(temperature));
  }
  if (scores.empty()) throw ValidationError("softmax of an empty vector");
  double max_score = scores[0];
  for (double s : scores) {
    if (!std::isfinite(s)) throw ValidationError("softmax input is not finite");
    max_score = std::max(max_score, s);
  }
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - max_score) / temperature);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

}  // namespace convseg
