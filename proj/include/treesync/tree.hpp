#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "treesync/identity.hpp"
#include "treesync/op.hpp"
#include "treesync/position.hpp"

namespace treesync {

/// Label register of an edge. text is empty (std::nullopt) until the first
/// relabel lands; (dep, setter) orders competing writes, greater pair wins.
struct Label {
    std::optional<std::string> text;
    Id setter;
    std::uint64_t dep = 0;

    bool operator==(const Label&) const = default;
};

struct ApplyEffect {
    bool applied = false;
    std::vector<Id> removed; // subtree wiped by a delete, in traversal order
};

/// Replicated edge-labelled tree. Every mutation is a no-op outside its
/// target's lifetime, which is what makes concurrent applications commute;
/// deleted subtrees leave no residue in the index.
class Tree {
  public:
    Tree();

    [[nodiscard]] bool contains(const Id& id) const;
    [[nodiscard]] std::size_t edgeCount() const { return index_.size(); } // root included
    [[nodiscard]] const Label* labelOf(const Id& id) const;
    [[nodiscard]] std::optional<Id> parentOf(const Id& id) const;
    [[nodiscard]] const PositionWord* positionOf(const Id& id) const;

    [[nodiscard]] std::size_t childCount(const Id& id) const;
    [[nodiscard]] std::vector<EdgeWord> childWords(const Id& id) const; // sibling order
    [[nodiscard]] std::vector<Id> childIds(const Id& id) const;        // sibling order
    [[nodiscard]] std::vector<Id> subtreeIds(const Id& id) const;      // preorder

    /// Attaches edge under parent. False (and no change) when parent is
    /// absent; throws std::logic_error if edge already occurs.
    bool addEdge(const Id& parent, const Id& edge, const PositionWord& pos);

    /// Removes target's subtree, returning the erased ids in preorder.
    /// Empty when target is absent; the root is not deletable.
    std::vector<Id> deleteSubtree(const Id& target);

    /// Applies a label write; returns whether the register changed. Writes
    /// with (dep, setter) not above the current pair lose silently.
    bool changeLabel(const Id& target, const Id& setter, std::uint64_t dep,
                     const std::string& text);

    ApplyEffect apply(const Operation& op);

    /// One line per edge, preorder, children ascending by edge word:
    ///   id=S:C parent=S:C dep=N setter=S:C pos=<word> text=<escaped>
    /// Unset labels render as the token U+27E8 "novalue" U+27E9, which the
    /// text escape can never produce.
    [[nodiscard]] std::string canonicalSerialize() const;

    /// FNV-1a 64 hex fingerprint of canonicalSerialize().
    [[nodiscard]] std::string canonicalDigest() const;

  private:
    struct Node {
        Id id;
        Id parent;
        PositionWord pos;
        EdgeWord word;
        Label label;
        std::map<EdgeWord, Id, EdgeWordLess> children;
    };

    std::unordered_map<Id, Node> index_;
};

[[nodiscard]] std::string escapeText(std::string_view text);
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t value);

} // namespace treesync
