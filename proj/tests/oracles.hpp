#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance binary. They only take plain data, never library objects.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "plural/rng.hpp"

namespace plural::oracle {

/// Raw inputs of one citizen's exposure numerator: λ(p), ψ(·;p), and for every
/// community the citizen's raw devotion (0 = not a member), λ(c) and ψ(·;c).
struct ExposureCase {
    double citizen_lambda = 0.0;
    std::vector<double> citizen_psi;               // per content
    std::vector<double> raw_devotion;              // per community
    std::vector<double> community_lambda;          // per community
    std::vector<std::vector<double>> community_psi;  // [community][content]
};

inline std::vector<double> exposure_shares(const ExposureCase& x) {
    const std::size_t contents = x.citizen_psi.size();
    double devotion_total = 0.0;
    for (double d : x.raw_devotion) devotion_total += d;
    std::vector<double> num(contents, 0.0);
    double total = 0.0;
    for (std::size_t m = 0; m < contents; ++m) {
        num[m] = x.citizen_lambda * x.citizen_psi[m];
        for (std::size_t c = 0; c < x.raw_devotion.size(); ++c) {
            if (x.raw_devotion[c] <= 0.0) continue;
            num[m] += (x.raw_devotion[c] / devotion_total) * x.community_lambda[c] * x.community_psi[c][m];
        }
        total += num[m];
    }
    for (double& v : num) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(contents);
    return num;
}

/// Group-aware consensus computed straight from per-bloc counts.
inline double gac(const std::vector<int>& positives, const std::vector<int>& negatives,
                  const std::vector<double>& sizes, bool penrose, double alpha) {
    const std::size_t g = positives.size();
    double wsum = 0.0;
    for (double s : sizes) wsum += penrose ? std::sqrt(s) : 1.0;
    double log_beta = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        const int n = positives[i] + negatives[i];
        const double rate = n == 0 ? 0.5 : (positives[i] + alpha) / (n + 2.0 * alpha);
        const double w = (penrose ? std::sqrt(sizes[i]) : 1.0) / wsum;
        log_beta += w * std::log(rate);
    }
    return std::exp(log_beta);
}

/// Dense planted rating instance: raters × items with 1 = approve, 0 = reject.
struct RatingInstance {
    int raters = 0;
    int items = 0;
    std::vector<std::vector<double>> ratings;  // [rater][item]
};

/// 20 raters in two blocs of 10, 6 items. Item 0 is approved by 9 of 10 in each
/// bloc, items 1–2 only by bloc A, items 3–4 only by bloc B, item 5 is rejected
/// by each rater with probability 0.8.
inline RatingInstance planted_bridging_instance(std::uint64_t seed) {
    Rng rng(seed);
    RatingInstance x{20, 6, std::vector<std::vector<double>>(20, std::vector<double>(6, 0.0))};
    const auto dissent_a = static_cast<int>(rng.below(10));
    const auto dissent_b = 10 + static_cast<int>(rng.below(10));
    for (int u = 0; u < 20; ++u) {
        const bool a = u < 10;
        x.ratings[u][0] = (u == dissent_a || u == dissent_b) ? 0.0 : 1.0;
        x.ratings[u][1] = x.ratings[u][2] = a ? 1.0 : 0.0;
        x.ratings[u][3] = x.ratings[u][4] = a ? 0.0 : 1.0;
        x.ratings[u][5] = rng.bernoulli(0.8) ? 0.0 : 1.0;
    }
    return x;
}

/// Full-batch gradient descent on Σ ½[(r − μ − b_u − b_i − f_u f_i)² + reg(b_u² + b_i² + f_u² + f_i²)]
/// over a dense rating matrix. Returns clamp(μ + b_i, 0, 1) per item.
inline std::vector<double> mf_intercepts(const RatingInstance& x, double reg, std::uint64_t seed) {
    Rng rng(seed ^ 0xA5A5A5A5ULL);
    double mu = 0.0;
    for (const auto& row : x.ratings) {
        for (double r : row) mu += r;
    }
    mu /= static_cast<double>(x.raters * x.items);
    std::vector<double> bu(x.raters, 0.0), bi(x.items, 0.0), fu(x.raters), fi(x.items);
    for (double& f : fu) f = rng.uniform(-0.1, 0.1);
    for (double& f : fi) f = rng.uniform(-0.1, 0.1);

    const double step = 0.005;
    for (int it = 0; it < 200000; ++it) {
        double gmu = 0.0;
        std::vector<double> gbu(x.raters, 0.0), gbi(x.items, 0.0), gfu(x.raters, 0.0), gfi(x.items, 0.0);
        for (int u = 0; u < x.raters; ++u) {
            for (int i = 0; i < x.items; ++i) {
                const double e = x.ratings[u][i] - (mu + bu[u] + bi[i] + fu[u] * fi[i]);
                gmu -= e;
                gbu[u] += -e + reg * bu[u];
                gbi[i] += -e + reg * bi[i];
                gfu[u] += -e * fi[i] + reg * fu[u];
                gfi[i] += -e * fu[u] + reg * fi[i];
            }
        }
        double norm = gmu * gmu;
        mu -= step * gmu;
        for (int u = 0; u < x.raters; ++u) {
            norm += gbu[u] * gbu[u] + gfu[u] * gfu[u];
            bu[u] -= step * gbu[u];
            fu[u] -= step * gfu[u];
        }
        for (int i = 0; i < x.items; ++i) {
            norm += gbi[i] * gbi[i] + gfi[i] * gfi[i];
            bi[i] -= step * gbi[i];
            fi[i] -= step * gfi[i];
        }
        if (norm < 1e-20) break;
    }
    std::vector<double> out(x.items);
    for (int i = 0; i < x.items; ++i) out[i] = std::clamp(mu + bi[i], 0.0, 1.0);
    return out;
}

}  // namespace plural::oracle
