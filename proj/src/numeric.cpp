#include "plural/numeric.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace plural {

namespace {

bool all_equal(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

}  // namespace

double weighted_arithmetic_mean(std::span<const double> values, std::span<const double> weights) {
    assert(values.size() == weights.size());
    if (values.empty()) return 0.0;
    if (all_equal(values)) return values.front();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i] * values[i];
        den += weights[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

double weighted_geometric_mean(std::span<const double> values, std::span<const double> weights) {
    assert(values.size() == weights.size());
    if (values.empty()) return 0.0;
    if (all_equal(values)) return values.front();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0) return 0.0;
    double log_sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        if (values[i] <= 0.0) return 0.0;
        log_sum += (weights[i] / total) * std::log(values[i]);
    }
    return std::exp(log_sum);
}

std::vector<double> sqrt_size_weights(std::span<const double> sizes) {
    std::vector<double> weights(sizes.size(), 0.0);
    if (sizes.empty()) return weights;
    if (all_equal(sizes)) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(sizes.size()));
        return weights;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        weights[i] = std::sqrt(std::max(sizes[i], 0.0));
        total += weights[i];
    }
    for (double& w : weights) w = total > 0.0 ? w / total : 0.0;
    return weights;
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double gini(std::span<const double> values) {
    const auto n = values.size();
    if (n == 0) return 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (total <= 0.0 || sorted.front() == sorted.back()) return 0.0;
    // Σ_ij |x_i − x_j| = 2 Σ_i (2i − n + 1) x_(i) over ascending order.
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) * sorted[i];
    }
    return std::max(0.0, weighted / (static_cast<double>(n) * total));
}

}  // namespace plural
