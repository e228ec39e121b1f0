#include "treesync/identity.hpp"

#include <charconv>
#include <stdexcept>

namespace treesync {

std::string Id::str() const {
    return std::to_string(site) + ":" + std::to_string(count);
}

std::optional<Id> Id::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
        return std::nullopt;

    std::uint32_t site = 0;
    std::uint64_t count = 0;
    const char* first = text.data();
    auto r1 = std::from_chars(first, first + colon, site);
    if (r1.ec != std::errc{} || r1.ptr != first + colon) return std::nullopt;
    auto r2 = std::from_chars(first + colon + 1, first + text.size(), count);
    if (r2.ec != std::errc{} || r2.ptr != first + text.size()) return std::nullopt;

    // Site 0 is legal only as the root id and real ids count from 1.
    if (site == 0 && count != 0) return std::nullopt;
    if (site != 0 && count == 0) return std::nullopt;
    return Id{site, count};
}

std::uint64_t StateVector::get(std::uint32_t site) const {
    auto it = counts_.find(site);
    return it == counts_.end() ? 0 : it->second;
}

void StateVector::record(std::uint32_t site, std::uint64_t count) {
    if (get(site) != count - 1)
        throw std::logic_error("state vector: non-contiguous record for site " +
                               std::to_string(site) + " at count " + std::to_string(count));
    counts_[site] = count;
}

} // namespace treesync
