#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "treesync/engine.hpp"
#include "treesync/wire.hpp"

using namespace treesync;

namespace {

PositionWord pw(const std::string& s) { return PositionWord{s}; }

/// Feed every request to every other engine, in log order.
void broadcast(const std::vector<Request>& log, std::vector<SiteEngine*> sites) {
    for (const Request& r : log)
        for (SiteEngine* s : sites)
            if (s->siteId() != r.origin) s->receive(r);
}

} // namespace

TEST_CASE("site id zero is reserved") {
    CHECK_THROWS_AS(SiteEngine{0}, std::invalid_argument);
}

TEST_CASE("fresh engines agree and stamps count up from one") {
    SiteEngine a{1}, b{2};
    CHECK(a.tree().canonicalDigest() == b.tree().canonicalDigest());
    const Request r1 = a.generate(AddIntent{Id::root(), 0});
    const Request r2 = a.generate(AddIntent{Id::root(), 1});
    const Request r3 = a.generate(DeleteIntent{{1, 1}});
    CHECK(r1.stamp() == Id{1, 1});
    CHECK(r2.stamp() == Id{1, 2});
    CHECK(r3.stamp() == Id{1, 3});
    CHECK(a.stateVector().get(1) == 3); // own ops recorded as received
}

TEST_CASE("sibling index picks the insertion slot") {
    SiteEngine e{1};
    e.generate(AddIntent{Id::root(), 0}); // [1:1]
    e.generate(AddIntent{Id::root(), 0}); // [1:2, 1:1]
    e.generate(AddIntent{Id::root(), 2}); // [1:2, 1:1, 1:3]
    e.generate(AddIntent{Id::root(), 2}); // [1:2, 1:1, 1:4, 1:3]
    CHECK(e.tree().childIds(Id::root()) ==
          std::vector<Id>{{1, 2}, {1, 1}, {1, 4}, {1, 3}});
    CHECK_THROWS_AS(e.generate(AddIntent{Id::root(), 5}), std::invalid_argument);
}

TEST_CASE("generation is refused for stale or protected targets") {
    SiteEngine e{1};
    e.generate(AddIntent{Id::root(), 0});
    e.generate(DeleteIntent{{1, 1}});
    CHECK_THROWS_AS(e.generate(AddIntent{{1, 1}, 0}), StaleTargetError);
    CHECK_THROWS_AS(e.generate(DeleteIntent{{1, 1}}), StaleTargetError);
    CHECK_THROWS_AS(e.generate(RelabelIntent{{1, 1}, "x"}), StaleTargetError);
    CHECK_THROWS_AS(e.generate(DeleteIntent{Id::root()}), std::invalid_argument);
    CHECK_THROWS_AS(e.generate(RelabelIntent{Id::root(), "x"}), std::invalid_argument);
}

TEST_CASE("relabel mints one past the register's seen dep") {
    SiteEngine a{1};
    const Request add = a.generate(AddIntent{Id::root(), 0});
    const Request l1 = a.generate(RelabelIntent{{1, 1}, "first"});
    CHECK(std::get<ChangeLabel>(l1.op).dep == 1);
    const Request l2 = a.generate(RelabelIntent{{1, 1}, "second"});
    CHECK(std::get<ChangeLabel>(l2.op).dep == 2);

    // a writer who has seen dep 2 overwrites it from either arrival order
    SiteEngine b{2};
    b.receive(add);
    b.receive(l1);
    b.receive(l2);
    const Request l3 = b.generate(RelabelIntent{{1, 1}, "third"});
    CHECK(std::get<ChangeLabel>(l3.op).dep == 3);

    SiteEngine c{3}, d{4};
    c.receive(add);
    c.receive(l2);  // ahead of l1 in its origin's stream: parks on FIFO
    c.receive(l1);
    c.receive(l3);
    d.receive(add);
    d.receive(l3);
    d.receive(l1);
    d.receive(l2);
    CHECK(c.tree().labelOf({1, 1})->text == "third");
    CHECK(c.tree().canonicalDigest() == d.tree().canonicalDigest());
    CHECK(c.tree().canonicalDigest() == b.tree().canonicalDigest());
}

TEST_CASE("concurrent relabels at the same dep settle on the greater setter") {
    SiteEngine a{1};
    const Request add = a.generate(AddIntent{Id::root(), 0});
    SiteEngine b{2}, c{3};
    b.receive(add);
    c.receive(add);
    const Request fromB = b.generate(RelabelIntent{{1, 1}, "from-2"});
    const Request fromC = c.generate(RelabelIntent{{1, 1}, "from-3"});
    CHECK(std::get<ChangeLabel>(fromB.op).dep == 1);
    CHECK(std::get<ChangeLabel>(fromC.op).dep == 1);
    b.receive(fromC);
    c.receive(fromB);
    CHECK(b.tree().labelOf({1, 1})->text == "from-3");
    CHECK(b.tree().canonicalDigest() == c.tree().canonicalDigest());
}

TEST_CASE("a request parks until its dependency arrives") {
    SiteEngine producer{1};
    const Request r1 = producer.generate(AddIntent{Id::root(), 0});
    const Request r2 = producer.generate(AddIntent{{1, 1}, 0});

    SiteEngine consumer{2};
    CHECK_FALSE(consumer.isExecutable(r2));
    CHECK(consumer.receive(r2).empty());
    CHECK(consumer.waitingCount() == 1);
    CHECK(consumer.tree().edgeCount() == 1);

    const auto executed = consumer.receive(r1);
    REQUIRE(executed.size() == 2);
    CHECK(executed[0].stamp() == Id{1, 1});
    CHECK(executed[1].stamp() == Id{1, 2});
    CHECK(consumer.waitingCount() == 0);
    CHECK(consumer.tree().canonicalDigest() == producer.tree().canonicalDigest());
}

TEST_CASE("a cross-site relabel parks until the minted edge exists") {
    SiteEngine a{1};
    const Request add = a.generate(AddIntent{Id::root(), 0});
    SiteEngine b{2};
    b.receive(add);
    const Request relabel = b.generate(RelabelIntent{{1, 1}, "note"});

    SiteEngine c{3};
    CHECK(c.receive(relabel).empty()); // FIFO fine (2:1), dependency 1:1 missing
    CHECK(c.waitingCount() == 1);
    CHECK(c.receive(add).size() == 2);
    CHECK(c.tree().labelOf({1, 1})->text == "note");
}

TEST_CASE("reverse delivery of a deep chain drains in one cascade") {
    SiteEngine producer{1};
    std::vector<Request> chain;
    Id parent = Id::root();
    for (int i = 0; i < 6; ++i) {
        chain.push_back(producer.generate(AddIntent{parent, 0}));
        parent = chain.back().stamp();
    }

    SiteEngine inOrder{2}, reversed{3};
    for (const Request& r : chain) inOrder.receive(r);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const bool last = std::next(it) == chain.rend();
        const auto executed = reversed.receive(*it);
        CHECK(executed.size() == (last ? chain.size() : 0));
    }
    CHECK(reversed.waitingCount() == 0);
    CHECK(reversed.tree().edgeCount() == 7);
    CHECK(reversed.tree().canonicalDigest() == inOrder.tree().canonicalDigest());
}

TEST_CASE("duplicates are dropped silently, executed or parked") {
    SiteEngine producer{1};
    const Request r1 = producer.generate(AddIntent{Id::root(), 0});
    const Request r2 = producer.generate(AddIntent{{1, 1}, 0});

    SiteEngine consumer{2};
    consumer.receive(r2);
    CHECK(consumer.receive(r2).empty()); // already parked
    CHECK(consumer.duplicatesDropped() == 1);
    consumer.receive(r1);
    CHECK(consumer.receive(r1).empty()); // already executed
    CHECK(consumer.duplicatesDropped() == 2);
    CHECK(consumer.tree().edgeCount() == 3);

    // own earlier requests coming back are duplicates too, not errors
    SiteEngine boomerang{1};
    const Request own = boomerang.generate(AddIntent{Id::root(), 0});
    CHECK(boomerang.receive(own).empty());
    CHECK(boomerang.duplicatesDropped() == 1);
}

TEST_CASE("malformed requests are rejected up front") {
    SiteEngine e{5};
    const PositionWord none = pw("");
    // an "own" request this site never minted
    CHECK_THROWS_AS(e.receive(Request{AddEdge{Id::root(), {5, 1}, none}, 5, 1}),
                    std::invalid_argument);
    // stamp / minted-id mismatch
    CHECK_THROWS_AS(e.receive(Request{AddEdge{Id::root(), {2, 2}, none}, 2, 3}),
                    std::invalid_argument);
    // zero origin, zero count
    CHECK_THROWS_AS(e.receive(Request{AddEdge{Id::root(), {0, 5}, none}, 0, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(e.receive(Request{DeleteSubtree{{1, 1}}, 2, 0}),
                    std::invalid_argument);
    // self-attached edge
    CHECK_THROWS_AS(e.receive(Request{AddEdge{{2, 1}, {2, 1}, none}, 2, 1}),
                    std::invalid_argument);
    // root as a delete / relabel target
    CHECK_THROWS_AS(e.receive(Request{DeleteSubtree{Id::root()}, 2, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        e.receive(Request{ChangeLabel{Id::root(), {2, 1}, 1, "x"}, 2, 1}),
        std::invalid_argument);
    // relabel whose embedded setter is not the stamp
    CHECK_THROWS_AS(
        e.receive(Request{ChangeLabel{{1, 1}, {9, 9}, 1, "x"}, 2, 1}),
        std::invalid_argument);
    CHECK(e.waitingCount() == 0);
    CHECK(e.duplicatesDropped() == 0);
}

TEST_CASE("delivery order across origins does not matter") {
    SiteEngine a{1}, b{2};
    std::vector<Request> log;
    log.push_back(a.generate(AddIntent{Id::root(), 0}));
    log.push_back(b.generate(AddIntent{Id::root(), 0}));
    broadcast(log, {&a, &b});
    log.push_back(a.generate(AddIntent{{2, 1}, 0}));
    log.push_back(b.generate(RelabelIntent{{1, 1}, "swapped"}));
    log.push_back(a.generate(DeleteIntent{{2, 1}}));
    broadcast({log.begin() + 2, log.end()}, {&a, &b});
    REQUIRE(a.tree().canonicalDigest() == b.tree().canonicalDigest());

    // a third replica sees the whole log in every possible arrival order
    std::vector<std::size_t> order{0, 1, 2, 3, 4};
    do {
        SiteEngine c{3};
        for (std::size_t i : order) c.receive(log[i]);
        CAPTURE(order);
        CHECK(c.waitingCount() == 0);
        CHECK(c.tree().canonicalDigest() == a.tree().canonicalDigest());
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("wire format: exact bytes of each request kind") {
    const Request add{AddEdge{Id::root(), {2, 7}, pw("__#2.7")}, 2, 7};
    CHECK(encodeRequest(add) ==
          R"({"v":1,"op":"add","origin":2,"count":7,"parent":"0:0","id":"2:7","pos":"__#2.7"})");
    const Request del{DeleteSubtree{{2, 7}}, 3, 4};
    CHECK(encodeRequest(del) ==
          R"({"op":"del","origin":3,"count":4,"target":"2:7"})");
    const Request chg{ChangeLabel{{2, 7}, {1, 9}, 5, "Abstract"}, 1, 9};
    CHECK(encodeRequest(chg) ==
          R"({"op":"chlab","origin":1,"count":9,"target":"2:7","dep":5,"text":"Abstract"})");

    CHECK(decodeRequest(encodeRequest(add)) == add);
    CHECK(decodeRequest(encodeRequest(del)) == del);
    CHECK(decodeRequest(encodeRequest(chg)) == chg);
}

TEST_CASE("wire format: request log round-trips, blank lines skipped") {
    SiteEngine a{1};
    std::vector<Request> log;
    log.push_back(a.generate(AddIntent{Id::root(), 0}));
    log.push_back(a.generate(AddIntent{{1, 1}, 0}));
    log.push_back(a.generate(RelabelIntent{{1, 2}, "text with \"quotes\" \\ and\nnewline é✓"}));
    log.push_back(a.generate(DeleteIntent{{1, 2}}));

    const std::string text = encodeRequestLog(log);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4); // one per line
    CHECK(decodeRequestLog(text) == log);
    CHECK(decodeRequestLog("\n" + text + "\n\n") == log);
}

TEST_CASE("wire format: random requests survive the round trip") {
    std::mt19937_64 rng(20260822u);
    const std::string symbols = "_#.0123456789";
    for (int i = 0; i < 2000; ++i) {
        const std::uint32_t origin = 1 + static_cast<std::uint32_t>(rng() % 100000);
        const std::uint64_t count = 1 + rng() % 1000000;
        Request r;
        r.origin = origin;
        r.count = count;
        const Id other{1 + static_cast<std::uint32_t>(rng() % 9), 1 + rng() % 9};
        switch (rng() % 3) {
            case 0: {
                std::string pos;
                for (std::uint64_t k = rng() % 10; k > 0; --k)
                    pos += symbols[rng() % symbols.size()];
                r.op = AddEdge{rng() % 2 ? other : Id::root(), {origin, count}, pw(pos)};
                break;
            }
            case 1:
                r.op = DeleteSubtree{other};
                break;
            default: {
                std::string text;
                for (std::uint64_t k = rng() % 12; k > 0; --k)
                    text += static_cast<char>(rng() % 0x60 + 0x20);
                r.op = ChangeLabel{other, {origin, count}, rng() % 100, text};
                break;
            }
        }
        CAPTURE(i);
        CHECK(decodeRequest(encodeRequest(r)) == r);
    }
}

TEST_CASE("wire format: structural rejections") {
    // not JSON at all: the error carries a byte offset into the line
    try {
        static_cast<void>(decodeRequest("{oops"));
        FAIL("expected a parse rejection");
    } catch (const WireError& e) {
        CHECK(e.offset() >= 1);
        CHECK(e.reason() == "invalid JSON");
    }

    const auto rejects = [](const std::string& line) {
        CHECK_THROWS_AS(static_cast<void>(decodeRequest(line)), WireError);
    };
    rejects(R"([1,2,3])");                                                   // not an object
    rejects(R"({"op":"move","origin":1,"count":1})");                        // unknown kind
    rejects(R"({"op":"add","origin":1,"count":1,"parent":"0:0","id":"1:1","pos":""})"); // no v
    rejects(R"({"v":2,"op":"del","origin":3,"count":4,"target":"2:7"})");    // bad version
    rejects(R"({"op":"del","origin":3,"count":4,"target":"2:7","x":1})");    // unknown field
    rejects(R"({"op":"del","origin":0,"count":4,"target":"2:7"})");          // origin 0
    rejects(R"({"op":"del","origin":3,"count":0,"target":"2:7"})");          // count 0
    rejects(R"({"op":"del","origin":4294967296,"count":4,"target":"2:7"})"); // origin too wide
    rejects(R"({"op":"del","origin":3,"count":4,"target":"0:0"})");          // root target
    rejects(R"({"op":"del","origin":3,"count":4,"target":"2.7"})");          // malformed id
    rejects(R"({"v":1,"op":"add","origin":2,"count":7,"parent":"0:0","id":"2:8","pos":""})"); // id != stamp
    rejects(R"({"v":1,"op":"add","origin":2,"count":7,"parent":"0:0","id":"2:7","pos":"a"})"); // bad symbol
    rejects(R"({"op":"chlab","origin":1,"count":9,"target":"2:7","dep":5})");     // no text
    rejects(R"({"op":"chlab","origin":1,"count":9,"target":"2:7","text":"x"})");  // no dep

    // a version tag is tolerated (when correct) on any kind
    CHECK(decodeRequest(R"({"v":1,"op":"del","origin":3,"count":4,"target":"2:7"})") ==
          Request{DeleteSubtree{{2, 7}}, 3, 4});

    // log decoding names the offending line
    const std::string log = std::string(R"({"op":"del","origin":3,"count":4,"target":"2:7"})") +
                            "\n\n{nope}\n";
    try {
        static_cast<void>(decodeRequestLog(log));
        FAIL("expected a rejection on line 3");
    } catch (const WireError& e) {
        CHECK(e.reason().substr(0, 8) == "line 3: ");
    }
}
