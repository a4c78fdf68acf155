#include "plural/detect.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "plural/error.hpp"
#include "plural/rng.hpp"

namespace plural {

AttitudeMatrix AttitudeMatrix::from_reactions(const ReactionMatrix& reactions, std::span<const CitizenId> citizens,
                                              std::span<const ContentId> contents) {
    AttitudeMatrix m;
    m.rows.assign(citizens.begin(), citizens.end());
    m.cols.reserve(contents.size());
    for (ContentId c : contents) m.cols.push_back(c.value);
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(citizens.size()),
                                     static_cast<Eigen::Index>(contents.size()));
    for (std::size_t j = 0; j < contents.size(); ++j) {
        const auto& row = reactions.for_content(contents[j]);
        if (row.empty()) continue;
        for (std::size_t i = 0; i < citizens.size(); ++i) {
            auto it = row.find(citizens[i]);
            if (it != row.end()) m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second.reaction;
        }
    }
    return m;
}

AttitudeMatrix AttitudeMatrix::restrict_rows(std::span<const CitizenId> citizens) const {
    AttitudeMatrix m;
    m.cols = cols;
    std::vector<Eigen::Index> picked;
    for (CitizenId c : citizens) {
        auto it = std::find(rows.begin(), rows.end(), c);
        if (it == rows.end()) continue;
        m.rows.push_back(c);
        picked.push_back(it - rows.begin());
    }
    m.values.resize(static_cast<Eigen::Index>(picked.size()), values.cols());
    for (std::size_t i = 0; i < picked.size(); ++i) m.values.row(static_cast<Eigen::Index>(i)) = values.row(picked[i]);
    return m;
}

std::size_t AttitudeMatrix::observed_in_row(std::size_t row) const {
    return static_cast<std::size_t>((values.row(static_cast<Eigen::Index>(row)).array() != 0.0).count());
}

double FuzzyPartition::partition_coefficient() const {
    if (memberships.rows() == 0) return 0.0;
    return memberships.array().square().sum() / static_cast<double>(memberships.rows());
}

namespace {

std::size_t count_distinct_rows(const Eigen::MatrixXd& x) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (less(order[i - 1], order[i])) ++distinct;
    }
    return distinct;
}

// Membership of one point given squared distances to every centroid.
void fill_memberships(const Eigen::RowVectorXd& sq_dist, double fuzzifier, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
    const Eigen::Index k = sq_dist.size();
    const double dmin = sq_dist.minCoeff();
    if (dmin <= 0.0) {
        const auto zeros = (sq_dist.array() <= 0.0).count();
        for (Eigen::Index j = 0; j < k; ++j) out(j) = sq_dist(j) <= 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
        return;
    }
    const double p = 1.0 / (fuzzifier - 1.0);
    double total = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        out(j) = std::pow(dmin / sq_dist(j), p);
        total += out(j);
    }
    out /= total;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids) {
    Eigen::MatrixXd d(x.rows(), centroids.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < centroids.rows(); ++j) d(i, j) = (x.row(i) - centroids.row(j)).squaredNorm();
    }
    return d;
}

Eigen::MatrixXd kmeans_pp_seeds(const Eigen::MatrixXd& x, int k, Rng& rng) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centroids(k, x.cols());
    centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd nearest = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = nearest.sum();
        double target = rng.uniform() * total;
        Eigen::Index pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (nearest(i) <= 0.0) continue;
            target -= nearest(i);
            if (target < 0.0) {
                pick = i;
                break;
            }
        }
        // Guard against the rounding tail landing on an already chosen point.
        while (nearest(pick) <= 0.0 && pick > 0) --pick;
        centroids.row(c) = x.row(pick);
        nearest = nearest.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

}  // namespace

FuzzyPartition fuzzy_c_means(const AttitudeMatrix& data, const FcmOptions& options) {
    require(options.k >= 2, ErrorCode::InvalidArgument, fmt::format("fuzzy c-means needs K >= 2, got {}", options.k));
    require(options.fuzzifier > 1.0, ErrorCode::InvalidArgument, "fuzzifier must be > 1");
    require(options.max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
    const Eigen::Index n = data.values.rows();
    require(static_cast<std::size_t>(n) == data.rows.size(), ErrorCode::InvalidArgument,
            "attitude matrix row ids do not match values");

    // Canonical row order by citizen id.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return data.rows[a] < data.rows[b]; });
    Eigen::MatrixXd x(n, data.values.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = data.values.row(order[i]);

    const std::size_t distinct = count_distinct_rows(x);
    if (distinct <= 1) fail(ErrorCode::DegenerateInput, "all attitude rows are identical");
    if (distinct < static_cast<std::size_t>(options.k)) {
        fail(ErrorCode::DegenerateInput,
             fmt::format("{} distinct rows cannot support K = {}", distinct, options.k));
    }

    Rng rng(options.seed);
    FuzzyPartition result;
    result.k = options.k;
    result.fuzzifier = options.fuzzifier;
    result.centroids = kmeans_pp_seeds(x, options.k, rng);
    Eigen::MatrixXd u(n, options.k);

    auto update_memberships = [&] {
        const Eigen::MatrixXd d = squared_distances(x, result.centroids);
        for (Eigen::Index i = 0; i < n; ++i) fill_memberships(d.row(i), options.fuzzifier, u.row(i));
    };

    for (int it = 0; it < options.max_iters; ++it) {
        update_memberships();
        const Eigen::MatrixXd um = u.array().pow(options.fuzzifier);
        Eigen::MatrixXd next = um.transpose() * x;
        for (int c = 0; c < options.k; ++c) {
            const double w = um.col(c).sum();
            if (w > 0.0) next.row(c) /= w;
            else next.row(c) = result.centroids.row(c);
        }
        const double shift = (next - result.centroids).cwiseAbs().maxCoeff();
        result.centroids = std::move(next);
        result.objective_history.push_back((um.array() * squared_distances(x, result.centroids).array()).sum());
        result.iterations = it + 1;
        if (shift < options.tol) {
            result.converged = true;
            break;
        }
    }
    update_memberships();

    result.memberships.resize(n, options.k);
    for (Eigen::Index i = 0; i < n; ++i) result.memberships.row(order[i]) = u.row(i);
    return result;
}

FuzzyPartition best_partition(const AttitudeMatrix& data, const DetectOptions& options) {
    require(options.k_min >= 2 && options.k_max >= options.k_min, ErrorCode::InvalidArgument,
            "K range must satisfy 2 <= k_min <= k_max");
    const std::size_t distinct = count_distinct_rows(data.values);
    if (distinct <= 1) fail(ErrorCode::DegenerateInput, "all attitude rows are identical");
    const int k_hi = std::min<int>(options.k_max, static_cast<int>(distinct));
    if (k_hi < options.k_min) {
        fail(ErrorCode::DegenerateInput, fmt::format("{} distinct rows cannot support K >= {}", distinct, options.k_min));
    }
    std::optional<FuzzyPartition> best;
    double best_pc = -1.0;
    for (int k = options.k_min; k <= k_hi; ++k) {
        FcmOptions fcm{k, options.fuzzifier, derive_seed(options.seed, {static_cast<std::uint64_t>(k)}),
                       options.max_iters, options.tol};
        FuzzyPartition p = fuzzy_c_means(data, fcm);
        const double pc = p.partition_coefficient();
        if (pc > best_pc + 1e-12) {
            best_pc = pc;
            best = std::move(p);
        }
    }
    return std::move(*best);
}

std::vector<CommunityCandidate> detect_communities(const AttitudeMatrix& reactions, const DetectOptions& options) {
    require(options.threshold > 0.0 && options.threshold < 1.0, ErrorCode::InvalidArgument,
            "threshold must lie in (0, 1)");
    const FuzzyPartition p = best_partition(reactions, options);
    std::vector<CommunityCandidate> out;
    for (int k = 0; k < p.k; ++k) {
        std::vector<std::pair<CitizenId, double>> picked;
        for (Eigen::Index i = 0; i < p.memberships.rows(); ++i) {
            const double u = p.memberships(i, k);
            if (u >= options.threshold) picked.emplace_back(reactions.rows[static_cast<std::size_t>(i)], u);
        }
        if (static_cast<int>(picked.size()) < options.min_size || picked.empty()) continue;
        std::sort(picked.begin(), picked.end());
        CommunityCandidate cand;
        for (const auto& [id, u] : picked) {
            cand.members.push_back(id);
            cand.degrees.push_back(u);
        }
        out.push_back(std::move(cand));
    }
    std::sort(out.begin(), out.end(),
              [](const CommunityCandidate& a, const CommunityCandidate& b) { return a.members.front() < b.members.front(); });
    return out;
}

std::vector<MemberSet> principal_subcommunities(SocialFabric& fabric, CommunityId community,
                                                const AttitudeMatrix& reactions, std::uint64_t seed) {
    const auto& members = fabric.community(community).members;
    const AttitudeMatrix restricted = reactions.restrict_rows(members);
    std::vector<CitizenId> active;
    for (std::size_t i = 0; i < restricted.rows.size(); ++i) {
        if (restricted.observed_in_row(i) > 0) active.push_back(restricted.rows[i]);
    }
    if (members.size() < 4 || active.size() < 4) {
        fail(ErrorCode::TooSmall, fmt::format("community {} has {} members with observed reactions; need 4",
                                              community.value, active.size()));
    }
    const AttitudeMatrix data = restricted.restrict_rows(active);

    DetectOptions opts;
    opts.k_min = 2;
    opts.k_max = std::min<int>(7, static_cast<int>(active.size()) / 2);
    opts.seed = seed;
    FuzzyPartition p;
    try {
        opts.k_max = std::max(opts.k_max, 2);
        p = best_partition(data, opts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
        fail(ErrorCode::TooSmall, fmt::format("community {}: {}", community.value, e.what()));
    }

    std::vector<MemberSet> blocs(static_cast<std::size_t>(p.k));
    Eigen::RowVectorXd u(p.k);
    for (CitizenId m : members) {
        Eigen::RowVectorXd point = Eigen::RowVectorXd::Zero(data.values.cols());
        if (auto it = std::find(restricted.rows.begin(), restricted.rows.end(), m); it != restricted.rows.end()) {
            point = restricted.values.row(it - restricted.rows.begin());
        }
        Eigen::RowVectorXd d(p.k);
        for (int k = 0; k < p.k; ++k) d(k) = (point - p.centroids.row(k)).squaredNorm();
        fill_memberships(d, p.fuzzifier, u);
        Eigen::Index arg = 0;
        for (Eigen::Index k = 1; k < u.size(); ++k) {
            if (u(k) > u(arg)) arg = k;
        }
        blocs[static_cast<std::size_t>(arg)].push_back(m);
    }
    std::erase_if(blocs, [](const MemberSet& b) { return b.empty(); });
    if (blocs.size() < 2) {
        fail(ErrorCode::TooSmall, fmt::format("community {} collapsed into a single bloc", community.value));
    }
    std::sort(blocs.begin(), blocs.end(), [](const MemberSet& a, const MemberSet& b) { return a.front() < b.front(); });
    fabric.set_principal_subcommunities(community, blocs);
    return blocs;
}

}  // namespace plural
