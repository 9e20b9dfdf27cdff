#pragma once

#include <span>
#include <vector>

namespace convseg {

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Returns v / ||v||. Throws ValidationError for a zero or non-finite vector.
std::vector<double> normalized(std::span<const double> v);

/// dot(a,b) / (||a|| ||b||), clamped to [-1, 1] against rounding.
/// Throws ValidationError on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Numerically stable softmax of scores / temperature (max-shifted).
/// Throws ValidationError on non-finite scores, empty input or temperature <= 0.
std::vector<double> softmax(std::span<const double> scores, double temperature = 1.0);

}  // namespace convseg
