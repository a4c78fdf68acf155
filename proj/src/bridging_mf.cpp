#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "plural/error.hpp"
#include "plural/rng.hpp"
#include "plural/score.hpp"

namespace plural {

namespace {

struct Observation {
    std::size_t rater;
    std::size_t item;
    double rating;  // 1 approve, 0 disapprove
};

}  // namespace

MfFit bridging_mf(const ReactionMatrix& reactions, std::span<const CitizenId> raters, const MfParams& params,
                  std::span<const ContentId> contents) {
    require(params.reg >= 0.0 && params.lr > 0.0 && params.epochs >= 1, ErrorCode::InvalidArgument,
            "matrix factorization needs reg >= 0, lr > 0, epochs >= 1");
    std::vector<CitizenId> rater_pool(raters.begin(), raters.end());
    std::sort(rater_pool.begin(), rater_pool.end());

    std::vector<ContentId> item_ids;
    std::vector<CitizenId> rater_ids;
    std::vector<std::tuple<ContentId, CitizenId, double>> raw;
    auto consider = [&](ContentId m, const ReactionMatrix::Row& row) {
        bool any = false;
        for (const auto& [p, rec] : row) {
            if (rec.reaction == 0 || !std::binary_search(rater_pool.begin(), rater_pool.end(), p)) continue;
            raw.emplace_back(m, p, rec.reaction > 0 ? 1.0 : 0.0);
            rater_ids.push_back(p);
            any = true;
        }
        if (any) item_ids.push_back(m);
    };
    if (contents.empty()) {
        for (const auto& [m, row] : reactions.rows()) consider(m, row);
    } else {
        std::vector<ContentId> sorted(contents.begin(), contents.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (ContentId m : sorted) consider(m, reactions.for_content(m));
    }
    std::sort(rater_ids.begin(), rater_ids.end());
    rater_ids.erase(std::unique(rater_ids.begin(), rater_ids.end()), rater_ids.end());
    if (rater_ids.size() < 2 || item_ids.size() < 2) {
        fail(ErrorCode::InsufficientData, fmt::format("factor model needs >= 2 raters and >= 2 items, got {} and {}",
                                                      rater_ids.size(), item_ids.size()));
    }

    std::vector<Observation> obs;
    obs.reserve(raw.size());
    double mean = 0.0;
    for (const auto& [m, p, r] : raw) {
        const auto u = static_cast<std::size_t>(std::lower_bound(rater_ids.begin(), rater_ids.end(), p) - rater_ids.begin());
        const auto i = static_cast<std::size_t>(std::lower_bound(item_ids.begin(), item_ids.end(), m) - item_ids.begin());
        obs.push_back({u, i, r});
        mean += r;
    }
    mean /= static_cast<double>(obs.size());

    Rng rng(params.seed);
    double mu = mean;
    std::vector<double> bu(rater_ids.size(), 0.0), bi(item_ids.size(), 0.0);
    std::vector<double> fu(rater_ids.size()), fi(item_ids.size());
    for (double& f : fu) f = rng.normal(0.0, 0.1);
    for (double& f : fi) f = rng.normal(0.0, 0.1);

    const double reg = params.reg;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const double lr = params.lr / (1.0 + params.lr_decay * epoch);
        rng.shuffle(obs);
        for (const auto& o : obs) {
            const double err = o.rating - (mu + bu[o.rater] + bi[o.item] + fu[o.rater] * fi[o.item]);
            const double f_u = fu[o.rater];
            const double f_i = fi[o.item];
            mu += lr * err;
            bu[o.rater] += lr * (err - reg * bu[o.rater]);
            bi[o.item] += lr * (err - reg * bi[o.item]);
            fu[o.rater] += lr * (err * f_i - reg * f_u);
            fi[o.item] += lr * (err * f_u - reg * f_i);
        }
    }

    MfFit fit;
    fit.mu = mu;
    for (std::size_t u = 0; u < rater_ids.size(); ++u) {
        fit.rater_bias[rater_ids[u]] = bu[u];
        fit.rater_factor[rater_ids[u]] = fu[u];
    }
    for (std::size_t i = 0; i < item_ids.size(); ++i) {
        fit.item_bias[item_ids[i]] = bi[i];
        fit.item_factor[item_ids[i]] = fi[i];
        fit.beta_raw[item_ids[i]] = std::clamp(mu + bi[i], 0.0, 1.0);
    }
    fit.loss = mf_objective(reactions, fit, reg);
    return fit;
}

double mf_objective(const ReactionMatrix& reactions, const MfFit& fit, double reg) {
    double loss = 0.0;
    for (const auto& [m, bi] : fit.item_bias) {
        const double fi = fit.item_factor.at(m);
        for (const auto& [p, rec] : reactions.for_content(m)) {
            if (rec.reaction == 0) continue;
            auto bu = fit.rater_bias.find(p);
            if (bu == fit.rater_bias.end()) continue;
            const double fu = fit.rater_factor.at(p);
            const double r = rec.reaction > 0 ? 1.0 : 0.0;
            const double err = r - (fit.mu + bu->second + bi + fu * fi);
            loss += 0.5 * (err * err + reg * (bu->second * bu->second + bi * bi + fu * fu + fi * fi));
        }
    }
    return loss;
}

}  // namespace plural
