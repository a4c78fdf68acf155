#pragma once

#include <span>
#include <vector>

namespace plural {

/// Σ w_i x_i / Σ w_i. Returns the common value bit-exactly when all x_i are equal.
double weighted_arithmetic_mean(std::span<const double> values, std::span<const double> weights);

/// Π x_i^(w_i / Σ w). Returns the common value bit-exactly when all x_i are equal,
/// and 0 when any positively weighted value is 0.
double weighted_geometric_mean(std::span<const double> values, std::span<const double> weights);

/// Degressively proportional weights √n_g / Σ √n_h. Equal sizes give exactly 1/G.
std::vector<double> sqrt_size_weights(std::span<const double> sizes);

double logistic(double x);

/// Mean absolute difference form: Σ_ij |x_i − x_j| / (2 n² x̄). 0 for empty or all-zero input.
double gini(std::span<const double> values);

}  // namespace plural
