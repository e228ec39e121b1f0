#include "treesync/engine.hpp"

#include <algorithm>

namespace treesync {

SiteEngine::SiteEngine(std::uint32_t siteId) : siteId_(siteId) {
    if (siteId == 0) throw std::invalid_argument("site ids start at 1");
}

Request SiteEngine::generate(const EditIntent& intent) {
    const Id stamp{siteId_, opCount_};
    Operation op;

    if (const auto* add = std::get_if<AddIntent>(&intent)) {
        if (!tree_.contains(add->parent))
            throw StaleTargetError("add: parent " + add->parent.str() + " not present");
        const auto words = tree_.childWords(add->parent);
        if (add->siblingIndex > words.size())
            throw std::invalid_argument("add: sibling index out of range");
        PositionWord pos;
        if (!words.empty()) {
            if (add->siblingIndex == 0) pos = beforeAll(words.front(), stamp);
            else if (add->siblingIndex == words.size()) pos = afterAll(words.back(), stamp);
            else pos = between(words[add->siblingIndex - 1], words[add->siblingIndex], stamp);
        }
        op = AddEdge{add->parent, stamp, std::move(pos)};
    } else if (const auto* del = std::get_if<DeleteIntent>(&intent)) {
        if (del->target.isRoot()) throw std::invalid_argument("delete: root is not deletable");
        if (!tree_.contains(del->target))
            throw StaleTargetError("delete: target " + del->target.str() + " not present");
        op = DeleteSubtree{del->target};
    } else {
        const auto& rel = std::get<RelabelIntent>(intent);
        if (rel.target.isRoot()) throw std::invalid_argument("relabel: root is not relabellable");
        const Label* label = tree_.labelOf(rel.target);
        if (label == nullptr)
            throw StaleTargetError("relabel: target " + rel.target.str() + " not present");
        op = ChangeLabel{rel.target, stamp, label->dep + 1, rel.text};
    }

    Request r{std::move(op), siteId_, opCount_};
    const ApplyEffect effect = tree_.apply(r.op);
    sReceived_.record(siteId_, opCount_);
    ++opCount_;
    if (listener_) listener_(r, effect);
    return r;
}

bool SiteEngine::isExecutable(const Request& r) const {
    if (r.origin != siteId_ && sReceived_.get(r.origin) != r.count - 1) return false;
    const Id dep = dependencyOf(r.op);
    return sReceived_.get(dep.site) >= dep.count;
}

std::vector<Request> SiteEngine::receive(const Request& r) {
    validate(r);
    if (sReceived_.get(r.origin) >= r.count || waiting_.count({r.origin, r.count})) {
        ++duplicatesDropped_;
        return {};
    }
    const ParkKey arrived{r.origin, r.count};
    waiting_.emplace(arrived, r);
    if (const Id dep = dependencyOf(r.op); !dep.isRoot()) waitingByDep_[dep].push_back(arrived);

    // Worklist drain: seed with the arrival; every execution can unblock at
    // most its origin's next request (in-order delivery per origin) and the
    // requests parked on the edge it minted.
    std::vector<Request> executed;
    std::vector<ParkKey> candidates{arrived};
    while (!candidates.empty()) {
        const ParkKey key = candidates.back();
        candidates.pop_back();
        const auto it = waiting_.find(key);
        if (it == waiting_.end() || !isExecutable(it->second)) continue;
        Request ready = std::move(it->second);
        waiting_.erase(it);
        unindex(ready);
        execute(ready);
        candidates.emplace_back(ready.origin, ready.count + 1);
        if (const auto* add = std::get_if<AddEdge>(&ready.op)) {
            if (const auto bucket = waitingByDep_.find(add->edge); bucket != waitingByDep_.end()) {
                candidates.insert(candidates.end(), bucket->second.begin(), bucket->second.end());
                waitingByDep_.erase(bucket);
            }
        }
        executed.push_back(std::move(ready));
    }
    return executed;
}

void SiteEngine::unindex(const Request& r) {
    const Id dep = dependencyOf(r.op);
    if (dep.isRoot()) return;
    const auto bucket = waitingByDep_.find(dep);
    if (bucket == waitingByDep_.end()) return;
    auto& keys = bucket->second;
    if (const auto pos = std::find(keys.begin(), keys.end(), ParkKey{r.origin, r.count});
        pos != keys.end()) {
        *pos = keys.back();
        keys.pop_back();
    }
    if (keys.empty()) waitingByDep_.erase(bucket);
}

void SiteEngine::execute(const Request& r) {
    sReceived_.record(r.origin, r.count);
    const ApplyEffect effect = tree_.apply(r.op);
    if (listener_) listener_(r, effect);
}

void SiteEngine::validate(const Request& r) const {
    if (r.origin == 0 || r.count == 0)
        throw std::invalid_argument("request: origin and count start at 1");
    if (r.origin == siteId_ && r.count >= opCount_)
        throw std::invalid_argument("request: echo of an op this site never minted");

    if (const auto* add = std::get_if<AddEdge>(&r.op)) {
        if (add->edge != r.stamp())
            throw std::invalid_argument("request: minted id differs from stamp");
        if (add->parent == add->edge)
            throw std::invalid_argument("request: edge attached to itself");
        if (add->parent.site == 0 && !add->parent.isRoot())
            throw std::invalid_argument("request: malformed parent id");
    } else if (const auto* del = std::get_if<DeleteSubtree>(&r.op)) {
        if (del->target.isRoot()) throw std::invalid_argument("request: root is not deletable");
        if (del->target.site == 0 || del->target.count == 0)
            throw std::invalid_argument("request: malformed target id");
    } else {
        const auto& chg = std::get<ChangeLabel>(r.op);
        if (chg.target.isRoot()) throw std::invalid_argument("request: root is not relabellable");
        if (chg.target.site == 0 || chg.target.count == 0)
            throw std::invalid_argument("request: malformed target id");
        if (chg.setter != r.stamp())
            throw std::invalid_argument("request: setter differs from stamp");
    }
}

} // namespace treesync
