#include "treesync/dependence.hpp"

#include <stdexcept>
#include <unordered_map>

namespace treesync {

Id dependencyOf(const Operation& op) {
    if (const auto* add = std::get_if<AddEdge>(&op)) return add->parent;
    if (const auto* del = std::get_if<DeleteSubtree>(&op)) return del->target;
    return std::get<ChangeLabel>(op).target;
}

bool dependsOn(const Operation& earlier, const Operation& later) {
    const auto* add = std::get_if<AddEdge>(&earlier);
    return add != nullptr && dependencyOf(later) == add->edge;
}

bool isValidSequence(std::span<const Request> seq) {
    std::unordered_map<std::uint32_t, std::uint64_t> lastCount;
    for (const Request& r : seq) {
        auto [it, fresh] = lastCount.try_emplace(r.origin, r.count);
        if (!fresh) {
            if (it->second >= r.count) return false;
            it->second = r.count;
        }
    }
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (dependsOn(seq[j].op, seq[i].op)) return false;
    return true;
}

namespace {

void enumerate(const std::vector<Request>& ops, std::vector<bool>& used,
               std::vector<Request>& current, std::vector<std::vector<Request>>& out) {
    const std::size_t n = ops.size();
    if (current.size() == n) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        bool blocked = false;
        for (std::size_t k = 0; k < n && !blocked; ++k) {
            if (used[k] || k == i) continue;
            if (ops[k].origin == ops[i].origin && ops[k].count < ops[i].count) blocked = true;
            else if (dependsOn(ops[k].op, ops[i].op)) blocked = true;
        }
        if (blocked) continue;
        used[i] = true;
        current.push_back(ops[i]);
        enumerate(ops, used, current, out);
        current.pop_back();
        used[i] = false;
    }
}

} // namespace

std::vector<std::vector<Request>> allValidSequences(const std::vector<Request>& ops,
                                                    std::size_t bound) {
    if (ops.size() > bound)
        throw std::invalid_argument("allValidSequences: set exceeds enumeration bound");
    std::vector<std::vector<Request>> out;
    std::vector<bool> used(ops.size(), false);
    std::vector<Request> current;
    current.reserve(ops.size());
    enumerate(ops, used, current, out);
    return out;
}

} // namespace treesync
