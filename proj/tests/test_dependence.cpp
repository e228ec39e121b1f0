#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "treesync/dependence.hpp"

using namespace treesync;

namespace {

PositionWord pw(const std::string& s) { return PositionWord{s}; }

Request addReq(Id parent, Id edge) {
    return Request{AddEdge{parent, edge, pw("")}, edge.site, edge.count};
}

Request delReq(std::uint32_t origin, std::uint64_t count, Id target) {
    return Request{DeleteSubtree{target}, origin, count};
}

Request labReq(std::uint32_t origin, std::uint64_t count, Id target,
               std::uint64_t dep, const std::string& text) {
    return Request{ChangeLabel{target, {origin, count}, dep, text}, origin, count};
}

std::string stampKey(const std::vector<Request>& seq) {
    std::string out;
    for (const Request& r : seq) {
        out += r.stamp().str();
        out += ';';
    }
    return out;
}

/// All orderings accepted by isValidSequence, found the slow way.
std::vector<std::string> bruteForceKeys(std::vector<Request> ops) {
    std::sort(ops.begin(), ops.end(), [](const Request& a, const Request& b) {
        return a.stamp() < b.stamp();
    });
    std::vector<std::string> keys;
    do {
        if (isValidSequence(ops)) keys.push_back(stampKey(ops));
    } while (std::next_permutation(
        ops.begin(), ops.end(),
        [](const Request& a, const Request& b) { return a.stamp() < b.stamp(); }));
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::vector<std::string> enumeratedKeys(const std::vector<Request>& ops) {
    std::vector<std::string> keys;
    for (const auto& seq : allValidSequences(ops)) keys.push_back(stampKey(seq));
    std::sort(keys.begin(), keys.end());
    return keys;
}

} // namespace

TEST_CASE("dependencyOf names the id each operation needs present") {
    CHECK(dependencyOf(AddEdge{{3, 4}, {5, 6}, pw("")}) == Id{3, 4});
    CHECK(dependencyOf(DeleteSubtree{{7, 8}}) == Id{7, 8});
    CHECK(dependencyOf(ChangeLabel{{1, 2}, {9, 9}, 3, "x"}) == Id{1, 2});
}

TEST_CASE("dependsOn links an add to the operations that use its edge") {
    const Request parent = addReq(Id::root(), {1, 1});
    const Request child = addReq({1, 1}, {2, 1});
    const Request relabel = labReq(3, 1, {1, 1}, 1, "x");
    const Request wipe = delReq(3, 2, {1, 1});
    const Request unrelated = addReq(Id::root(), {2, 2});

    CHECK(dependsOn(parent, child));
    CHECK(dependsOn(parent, relabel));
    CHECK(dependsOn(parent, wipe));
    CHECK_FALSE(dependsOn(parent, unrelated));
    CHECK_FALSE(dependsOn(child, parent));
    // only adds provide; a delete or relabel never blocks anything
    CHECK_FALSE(dependsOn(wipe, relabel));
    CHECK_FALSE(dependsOn(relabel, wipe));
}

TEST_CASE("isValidSequence accepts well-ordered histories") {
    CHECK(isValidSequence(std::vector<Request>{}));
    const std::vector<Request> seq{
        addReq(Id::root(), {1, 1}),
        addReq(Id::root(), {2, 1}),
        addReq({1, 1}, {1, 2}),
        labReq(2, 2, {1, 2}, 1, "hello"),
        delReq(1, 3, {2, 1}),
    };
    CHECK(isValidSequence(seq));
}

TEST_CASE("isValidSequence rejects out-of-order stamps from one origin") {
    const std::vector<Request> seq{
        addReq(Id::root(), {1, 2}),
        addReq(Id::root(), {1, 1}),
    };
    CHECK_FALSE(isValidSequence(seq));
    const std::vector<Request> dup{
        addReq(Id::root(), {1, 1}),
        delReq(1, 1, {1, 1}),
    };
    CHECK_FALSE(isValidSequence(dup)); // stamp 1:1 used twice
}

TEST_CASE("isValidSequence rejects a use before its providing add") {
    const std::vector<Request> childFirst{
        addReq({1, 1}, {2, 1}),
        addReq(Id::root(), {1, 1}),
    };
    CHECK_FALSE(isValidSequence(childFirst));

    const std::vector<Request> labelFirst{
        addReq(Id::root(), {2, 1}),
        labReq(3, 1, {1, 1}, 1, "early"),
        delReq(2, 2, {2, 1}),
        addReq(Id::root(), {1, 1}),
        addReq(Id::root(), {3, 2}),
    };
    CHECK_FALSE(isValidSequence(labelFirst));
}

TEST_CASE("allValidSequences lists exactly the legal interleavings") {
    // two ops on site 1 (the second nested under the first), one on site 2:
    // the independent site-2 add slides into any of the three slots
    const std::vector<Request> ops{
        addReq(Id::root(), {1, 1}),
        addReq({1, 1}, {1, 2}),
        addReq(Id::root(), {2, 1}),
    };
    const auto all = allValidSequences(ops);
    CHECK(all.size() == 3);
    for (const auto& seq : all) CHECK(isValidSequence(seq));
    CHECK(enumeratedKeys(ops) == bruteForceKeys(ops));
}

TEST_CASE("allValidSequences: a cross-site dependency pins the order") {
    // site 2 relabels the edge site 1 mints: the relabel can never go first
    const std::vector<Request> ops{
        addReq(Id::root(), {1, 1}),
        labReq(2, 1, {1, 1}, 1, "x"),
    };
    const auto all = allValidSequences(ops);
    REQUIRE(all.size() == 1);
    CHECK(all[0][0].stamp() == Id{1, 1});
    CHECK(all[0][1].stamp() == Id{2, 1});
}

TEST_CASE("allValidSequences matches the brute-force oracle on random histories") {
    std::mt19937_64 rng(20260822u);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        std::vector<Request> ops;
        std::vector<Id> minted;
        std::map<std::uint32_t, std::uint64_t> nextCount{{1, 1}, {2, 1}, {3, 1}};
        for (int i = 0; i < n; ++i) {
            const std::uint32_t origin = 1 + static_cast<std::uint32_t>(rng() % 3);
            const std::uint64_t count = nextCount[origin]++;
            auto pickId = [&]() -> Id {
                if (!minted.empty() && rng() % 4 != 0)
                    return minted[rng() % minted.size()];
                return Id{9, 1 + rng() % 3}; // an id nobody here mints
            };
            const int kind = minted.empty() ? 0 : static_cast<int>(rng() % 3);
            if (kind == 0) {
                const Id parent = (rng() % 2 == 0) ? Id::root() : pickId();
                ops.push_back(Request{AddEdge{parent, {origin, count}, pw("")},
                                      origin, count});
                minted.push_back({origin, count});
            } else if (kind == 1) {
                ops.push_back(delReq(origin, count, pickId()));
            } else {
                ops.push_back(labReq(origin, count, pickId(), rng() % 3, "t"));
            }
        }
        CAPTURE(trial);
        CHECK(enumeratedKeys(ops) == bruteForceKeys(ops));
    }
}

TEST_CASE("allValidSequences refuses histories past its size bound") {
    std::vector<Request> ops;
    for (std::uint64_t c = 1; c <= 8; ++c) ops.push_back(addReq(Id::root(), {1, c}));
    CHECK_THROWS_AS(static_cast<void>(allValidSequences(ops)), std::invalid_argument);
}
