#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "treesync/identity.hpp"
#include "treesync/position.hpp"

namespace treesync {

/// Attach a fresh edge under parent at the given sibling position.
struct AddEdge {
    Id parent;
    Id edge;
    PositionWord pos;

    bool operator==(const AddEdge&) const = default;
};

/// Remove target and everything below it.
struct DeleteSubtree {
    Id target;

    bool operator==(const DeleteSubtree&) const = default;
};

/// Overwrite target's label register with (text, setter, dep).
struct ChangeLabel {
    Id target;
    Id setter;
    std::uint64_t dep = 0;
    std::string text;

    bool operator==(const ChangeLabel&) const = default;
};

using Operation = std::variant<AddEdge, DeleteSubtree, ChangeLabel>;

/// Id created by the operation, if any (only AddEdge creates one).
inline std::optional<Id> mintedEdge(const Operation& op) {
    if (const auto* add = std::get_if<AddEdge>(&op)) return add->edge;
    return std::nullopt;
}

/// An operation stamped with its origin site and per-site count; the unit
/// broadcast between replicas.
struct Request {
    Operation op;
    std::uint32_t origin = 0;
    std::uint64_t count = 0;

    [[nodiscard]] Id stamp() const { return Id{origin, count}; }

    bool operator==(const Request&) const = default;
};

} // namespace treesync
