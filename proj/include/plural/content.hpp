#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "plural/ids.hpp"

namespace plural {

using Creator = std::variant<CitizenId, AdvertiserId>;

/// A post. latent_position is simulation ground truth and is never read by
/// scoring or ranking.
struct ContentItem {
    ContentId id;
    Creator creator = CitizenId{};
    std::vector<TopicId> topics;  // sorted
    int created_round = 0;
    std::vector<CommunityId> target_communities;  // sorted, non-empty
    std::optional<std::vector<double>> latent_position;

    bool is_ad() const { return std::holds_alternative<AdvertiserId>(creator); }
    bool targets(CommunityId c) const;
    bool shares_topic(const ContentItem& other) const;
};

class ContentCatalog {
public:
    /// Assigns the next dense id; normalizes topic and target lists.
    ContentId add(ContentItem item);

    const ContentItem& get(ContentId id) const;
    const std::vector<ContentItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }

private:
    std::vector<ContentItem> items_;
};

struct ReactionRecord {
    bool exposed = false;
    int reaction = 0;  // −1, 0, +1; non-zero implies exposed
    int round = 0;     // round of the latest interaction

    bool operator==(const ReactionRecord&) const = default;
};

/// Sparse citizen × content interaction log, indexed by content.
class ReactionMatrix {
public:
    using Row = std::map<CitizenId, ReactionRecord>;

    /// Overwrites the record for (citizen, content). Throws InvalidArgument when
    /// reaction is outside {−1,0,1} or a reaction is recorded without exposure.
    void set(CitizenId citizen, ContentId content, ReactionRecord record);

    /// Marks an exposure in `round`. Keeps any earlier non-zero reaction.
    void record_exposure(CitizenId citizen, ContentId content, int round);

    /// Marks exposure plus reaction in `round`.
    void record_reaction(CitizenId citizen, ContentId content, int reaction, int round);

    const ReactionRecord* find(CitizenId citizen, ContentId content) const;
    bool has_reacted(CitizenId citizen, ContentId content) const;

    /// All records for one content, ordered by citizen id.
    const Row& for_content(ContentId content) const;

    const std::map<ContentId, Row>& rows() const { return by_content_; }
    std::size_t record_count() const;
    int max_round() const;

private:
    std::map<ContentId, Row> by_content_;
};

}  // namespace plural
