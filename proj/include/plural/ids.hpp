#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace plural {

// Dense, zero-based identifiers. Each kind is a distinct type so a citizen
// index can never be passed where a community index is expected.
template <class Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    constexpr std::size_t index() const { return value; }

    friend constexpr auto operator<=>(Id, Id) = default;
};

using CitizenId = Id<struct CitizenTag>;
using CommunityId = Id<struct CommunityTag>;
using ContentId = Id<struct ContentTag>;
using AdvertiserId = Id<struct AdvertiserTag>;
using TopicId = Id<struct TopicTag>;

}  // namespace plural

template <class Tag>
struct std::hash<plural::Id<Tag>> {
    std::size_t operator()(plural::Id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
