#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace treesync {

/// Globally unique edge/operation identifier: (site number, per-site count).
/// Site numbers start at 1; counts start at 1. Site 0 appears only in the
/// reserved root identifier (0,0).
struct Id {
    std::uint32_t site = 0;
    std::uint64_t count = 0;

    auto operator<=>(const Id&) const = default;

    static constexpr Id root() { return Id{0, 0}; }
    [[nodiscard]] bool isRoot() const { return site == 0 && count == 0; }

    [[nodiscard]] std::string str() const;
    static std::optional<Id> parse(std::string_view text);
};

/// Strict total order on identifiers: lexicographic on (site, count).
inline bool idLess(const Id& a, const Id& b) { return a < b; }

/// Per-replica record of the highest contiguously executed count per site.
/// Unknown sites implicitly map to 0; recording enforces contiguity, so the
/// value doubles as "number of operations executed from that site".
class StateVector {
  public:
    [[nodiscard]] std::uint64_t get(std::uint32_t site) const;

    /// Records execution of (site, count). Throws std::logic_error unless
    /// count is exactly get(site) + 1.
    void record(std::uint32_t site, std::uint64_t count);

    [[nodiscard]] std::size_t knownSites() const { return counts_.size(); }

  private:
    std::unordered_map<std::uint32_t, std::uint64_t> counts_;
};

} // namespace treesync

template <> struct std::hash<treesync::Id> {
    std::size_t operator()(const treesync::Id& id) const noexcept {
        std::uint64_t h = id.count * 0x9e3779b97f4a7c15ull;
        h ^= static_cast<std::uint64_t>(id.site) + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};
