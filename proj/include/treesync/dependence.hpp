#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treesync/op.hpp"

namespace treesync {

/// Direct dependency of an operation: the id whose creating AddEdge must be
/// executed first. AddEdge depends on its parent, DeleteSubtree and
/// ChangeLabel on their target. A dependency on the root (0,0) is vacuous.
[[nodiscard]] Id dependencyOf(const Operation& op);

/// True iff later must be ordered after earlier: earlier is an AddEdge
/// creating the id that later depends on.
[[nodiscard]] bool dependsOn(const Operation& earlier, const Operation& later);

[[nodiscard]] inline bool dependsOn(const Request& earlier, const Request& later) {
    return dependsOn(earlier.op, later.op);
}

/// A sequence is valid when every dependent pair appears in dependence order
/// and every origin's counts appear strictly increasing.
[[nodiscard]] bool isValidSequence(std::span<const Request> seq);

/// All permutations of ops passing isValidSequence, enumerated in
/// lexicographic index order. Refuses sets larger than bound.
[[nodiscard]] std::vector<std::vector<Request>>
allValidSequences(const std::vector<Request>& ops, std::size_t bound = 7);

} // namespace treesync
