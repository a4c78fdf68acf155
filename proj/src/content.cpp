#include "plural/content.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "plural/error.hpp"

namespace plural {

bool ContentItem::targets(CommunityId c) const {
    return std::binary_search(target_communities.begin(), target_communities.end(), c);
}

bool ContentItem::shares_topic(const ContentItem& other) const {
    auto a = topics.begin();
    auto b = other.topics.begin();
    while (a != topics.end() && b != other.topics.end()) {
        if (*a == *b) return true;
        if (*a < *b) ++a;
        else ++b;
    }
    return false;
}

ContentId ContentCatalog::add(ContentItem item) {
    require(!item.target_communities.empty(), ErrorCode::InvalidArgument,
            "content must target at least one community");
    item.id = ContentId(static_cast<std::uint32_t>(items_.size()));
    auto normalize = [](auto& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    normalize(item.topics);
    normalize(item.target_communities);
    items_.push_back(std::move(item));
    return items_.back().id;
}

const ContentItem& ContentCatalog::get(ContentId id) const {
    if (id.index() >= items_.size()) fail(ErrorCode::NotFound, fmt::format("unknown content {}", id.value));
    return items_[id.index()];
}

void ReactionMatrix::set(CitizenId citizen, ContentId content, ReactionRecord record) {
    require(record.reaction >= -1 && record.reaction <= 1, ErrorCode::InvalidArgument,
            fmt::format("reaction must be -1, 0 or 1, got {}", record.reaction));
    require(record.reaction == 0 || record.exposed, ErrorCode::InvalidArgument,
            "a reaction requires an exposure");
    by_content_[content][citizen] = record;
}

void ReactionMatrix::record_exposure(CitizenId citizen, ContentId content, int round) {
    auto& rec = by_content_[content][citizen];
    rec.exposed = true;
    rec.round = round;
}

void ReactionMatrix::record_reaction(CitizenId citizen, ContentId content, int reaction, int round) {
    set(citizen, content, ReactionRecord{true, reaction, round});
}

const ReactionRecord* ReactionMatrix::find(CitizenId citizen, ContentId content) const {
    auto row = by_content_.find(content);
    if (row == by_content_.end()) return nullptr;
    auto it = row->second.find(citizen);
    return it == row->second.end() ? nullptr : &it->second;
}

bool ReactionMatrix::has_reacted(CitizenId citizen, ContentId content) const {
    const auto* rec = find(citizen, content);
    return rec != nullptr && rec->reaction != 0;
}

const ReactionMatrix::Row& ReactionMatrix::for_content(ContentId content) const {
    static const Row empty;
    auto it = by_content_.find(content);
    return it == by_content_.end() ? empty : it->second;
}

std::size_t ReactionMatrix::record_count() const {
    std::size_t n = 0;
    for (const auto& [_, row] : by_content_) n += row.size();
    return n;
}

int ReactionMatrix::max_round() const {
    int r = 0;
    for (const auto& [_, row] : by_content_) {
        for (const auto& [__, rec] : row) r = std::max(r, rec.round);
    }
    return r;
}

}  // namespace plural
