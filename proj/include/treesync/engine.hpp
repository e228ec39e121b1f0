#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "treesync/dependence.hpp"
#include "treesync/op.hpp"
#include "treesync/tree.hpp"

namespace treesync {

/// User-level edit: the engine resolves the sibling index / register state
/// into a concrete operation at generation time.
struct AddIntent {
    Id parent;
    std::size_t siblingIndex = 0; // 0..childCount(parent), insertion slot
};
struct DeleteIntent {
    Id target;
};
struct RelabelIntent {
    Id target;
    std::string text;
};
using EditIntent = std::variant<AddIntent, DeleteIntent, RelabelIntent>;

/// Generation refused because the intent names an edge this replica no
/// longer (or never) holds.
class StaleTargetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One replica. Local edits are minted, applied and broadcast as Requests;
/// remote requests wait until their origin's earlier requests and their
/// dependency have been executed, then run. Duplicates are dropped, not
/// errors. Invariant: stateVector().get(siteId()) == next mint count - 1.
class SiteEngine {
  public:
    using ApplyListener = std::function<void(const Request&, const ApplyEffect&)>;

    explicit SiteEngine(std::uint32_t siteId);

    [[nodiscard]] std::uint32_t siteId() const { return siteId_; }
    [[nodiscard]] const Tree& tree() const { return tree_; }
    [[nodiscard]] const StateVector& stateVector() const { return sReceived_; }
    [[nodiscard]] std::size_t waitingCount() const { return waiting_.size(); }
    [[nodiscard]] std::uint64_t duplicatesDropped() const { return duplicatesDropped_; }

    /// Observer invoked after every executed request, local or remote.
    void setApplyListener(ApplyListener listener) { listener_ = std::move(listener); }

    /// Mints, applies and returns the request for a local edit.
    /// Throws StaleTargetError / std::invalid_argument when refused.
    Request generate(const EditIntent& intent);

    /// A request may run once its origin's previous request has run (always
    /// true for own requests) and its dependency is present in the state
    /// vector.
    [[nodiscard]] bool isExecutable(const Request& r) const;

    /// Accepts a remote request, parks it if not yet executable, then drains
    /// everything that became executable. A parked request is re-examined
    /// exactly when one of its preconditions flips: its origin's previous
    /// request executes, or the add minting its dependency executes. Returns
    /// the executed requests in execution order.
    std::vector<Request> receive(const Request& r);

  private:
    using ParkKey = std::pair<std::uint32_t, std::uint64_t>;

    void execute(const Request& r);
    void validate(const Request& r) const;
    void unindex(const Request& r);

    std::uint32_t siteId_;
    std::uint64_t opCount_ = 1; // next count to mint
    Tree tree_;
    StateVector sReceived_;
    std::map<ParkKey, Request> waiting_;
    std::unordered_map<Id, std::vector<ParkKey>> waitingByDep_;
    std::uint64_t duplicatesDropped_ = 0;
    ApplyListener listener_;
};

} // namespace treesync
