#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "plural/content.hpp"
#include "plural/fabric.hpp"
#include "plural/ids.hpp"

namespace plural {

/// Dense citizens × features matrix of signed attitudes in [−1, 1]; 0 means
/// unobserved or neutral. Features are content or topic ids.
struct AttitudeMatrix {
    std::vector<CitizenId> rows;
    std::vector<std::uint32_t> cols;
    Eigen::MatrixXd values;

    /// One row per citizen, one column per content; entries are reaction signs.
    static AttitudeMatrix from_reactions(const ReactionMatrix& reactions, std::span<const CitizenId> citizens,
                                         std::span<const ContentId> contents);

    /// Rows restricted to `citizens` (in the given order); missing citizens are skipped.
    AttitudeMatrix restrict_rows(std::span<const CitizenId> citizens) const;

    std::size_t observed_in_row(std::size_t row) const;
};

struct FuzzyPartition {
    Eigen::MatrixXd memberships;  // citizens × K, rows sum to 1
    Eigen::MatrixXd centroids;    // K × features
    double fuzzifier = 2.0;
    int k = 0;
    int iterations = 0;
    bool converged = false;
    /// Objective Σ u^m ‖x − v‖² after every centroid update.
    std::vector<double> objective_history;

    /// Mean over rows of Σ_k u_ik².
    double partition_coefficient() const;
};

struct FcmOptions {
    int k = 2;
    double fuzzifier = 2.0;
    std::uint64_t seed = 0;
    int max_iters = 300;
    double tol = 1e-6;
};

/// Standard fuzzy c-means from k-means++ seeding. Rows are processed in
/// citizen-id order, so the result does not depend on input row order;
/// memberships are reported in the input row order.
FuzzyPartition fuzzy_c_means(const AttitudeMatrix& data, const FcmOptions& options);

struct CommunityCandidate {
    MemberSet members;            // sorted
    std::vector<double> degrees;  // membership degree per member
};

struct DetectOptions {
    int min_size = 2;
    double threshold = 0.5;
    int k_min = 2;
    int k_max = 7;
    double fuzzifier = 2.0;
    std::uint64_t seed = 0;
    int max_iters = 300;
    double tol = 1e-6;
};

/// Fits FCM for every K in [k_min, k_max] the data supports and keeps the
/// partition with the highest partition coefficient (ties go to smaller K).
FuzzyPartition best_partition(const AttitudeMatrix& data, const DetectOptions& options);

/// Overlapping candidates: citizen i belongs to candidate k when u_ik ≥ threshold.
/// Candidates are ordered by their smallest member id.
std::vector<CommunityCandidate> detect_communities(const AttitudeMatrix& reactions, const DetectOptions& options);

/// Splits a community into 2–7 disjoint blocs by argmax FCM membership and
/// stores them on the fabric. Members without observed reactions go to the
/// nearest centroid. Throws TooSmall when fewer than four members reacted or
/// the fit collapses to a single bloc.
std::vector<MemberSet> principal_subcommunities(SocialFabric& fabric, CommunityId community,
                                                const AttitudeMatrix& reactions, std::uint64_t seed);

struct WeightedEdge {
    CitizenId a;
    CitizenId b;
    double weight = 1.0;
};

/// Partitional clustering by multi-level greedy modularity maximization
/// (Louvain). Node visiting order is a seeded shuffle; ties go to the
/// smallest community label. Clusters are sorted and ordered by smallest member.
std::vector<MemberSet> graph_cluster(std::span<const WeightedEdge> edges, double resolution, std::uint64_t seed);

}  // namespace plural
