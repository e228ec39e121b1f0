#include "treesync/tree.hpp"

#include <stdexcept>
#include <tuple>

namespace treesync {

namespace {
constexpr std::string_view kNoValueToken = "⟨novalue⟩";
}

Tree::Tree() {
    Node root;
    root.id = Id::root();
    root.parent = Id::root();
    root.word = edgeWord(root.pos, root.id);
    root.label = Label{std::nullopt, Id::root(), 0};
    index_.emplace(Id::root(), std::move(root));
}

bool Tree::contains(const Id& id) const { return index_.count(id) != 0; }

const Label* Tree::labelOf(const Id& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &it->second.label;
}

std::optional<Id> Tree::parentOf(const Id& id) const {
    auto it = index_.find(id);
    if (it == index_.end() || id.isRoot()) return std::nullopt;
    return it->second.parent;
}

const PositionWord* Tree::positionOf(const Id& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &it->second.pos;
}

std::size_t Tree::childCount(const Id& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? 0 : it->second.children.size();
}

std::vector<EdgeWord> Tree::childWords(const Id& id) const {
    std::vector<EdgeWord> out;
    auto it = index_.find(id);
    if (it == index_.end()) return out;
    out.reserve(it->second.children.size());
    for (const auto& [word, child] : it->second.children) out.push_back(word);
    return out;
}

std::vector<Id> Tree::childIds(const Id& id) const {
    std::vector<Id> out;
    auto it = index_.find(id);
    if (it == index_.end()) return out;
    out.reserve(it->second.children.size());
    for (const auto& [word, child] : it->second.children) out.push_back(child);
    return out;
}

std::vector<Id> Tree::subtreeIds(const Id& id) const {
    std::vector<Id> out;
    if (!contains(id)) return out;
    std::vector<Id> stack{id};
    while (!stack.empty()) {
        Id cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        const Node& node = index_.find(cur)->second;
        // push in reverse sibling order so preorder pops left to right
        std::vector<Id> kids;
        kids.reserve(node.children.size());
        for (const auto& [word, child] : node.children) kids.push_back(child);
        for (auto rit = kids.rbegin(); rit != kids.rend(); ++rit) stack.push_back(*rit);
    }
    return out;
}

bool Tree::addEdge(const Id& parent, const Id& edge, const PositionWord& pos) {
    if (index_.count(edge))
        throw std::logic_error("tree: edge id " + edge.str() + " minted twice");
    if (!index_.count(parent)) return false; // parent already gone: drop silently

    Node node;
    node.id = edge;
    node.parent = parent;
    node.pos = pos;
    node.word = edgeWord(pos, edge);
    node.label = Label{std::nullopt, edge, 0};
    EdgeWord word = node.word;
    index_.emplace(edge, std::move(node));
    index_.find(parent)->second.children.emplace(std::move(word), edge);
    return true;
}

std::vector<Id> Tree::deleteSubtree(const Id& target) {
    if (target.isRoot()) throw std::logic_error("tree: root is not deletable");
    auto it = index_.find(target);
    if (it == index_.end()) return {};

    index_.find(it->second.parent)->second.children.erase(it->second.word);
    std::vector<Id> removed = subtreeIds(target);
    for (const Id& id : removed) index_.erase(id);
    return removed;
}

bool Tree::changeLabel(const Id& target, const Id& setter, std::uint64_t dep,
                       const std::string& text) {
    if (target.isRoot()) throw std::logic_error("tree: root is not relabellable");
    auto it = index_.find(target);
    if (it == index_.end()) return false;

    Label& cur = it->second.label;
    if (std::tie(dep, setter) > std::tie(cur.dep, cur.setter)) {
        cur = Label{text, setter, dep};
        return true;
    }
    return false;
}

ApplyEffect Tree::apply(const Operation& op) {
    ApplyEffect effect;
    if (const auto* add = std::get_if<AddEdge>(&op)) {
        effect.applied = addEdge(add->parent, add->edge, add->pos);
    } else if (const auto* del = std::get_if<DeleteSubtree>(&op)) {
        effect.removed = deleteSubtree(del->target);
        effect.applied = !effect.removed.empty();
    } else {
        const auto& chg = std::get<ChangeLabel>(op);
        effect.applied = changeLabel(chg.target, chg.setter, chg.dep, chg.text);
    }
    return effect;
}

std::string escapeText(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (c <= 0x20 || c >= 0x7F || c == '%') {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string Tree::canonicalSerialize() const {
    std::string out;
    std::vector<Id> stack{Id::root()};
    while (!stack.empty()) {
        Id cur = stack.back();
        stack.pop_back();
        const Node& node = index_.find(cur)->second;

        out += "id=";
        out += node.id.str();
        out += " parent=";
        out += node.parent.str();
        out += " dep=";
        out += std::to_string(node.label.dep);
        out += " setter=";
        out += node.label.setter.str();
        out += " pos=";
        out += node.pos.str();
        out += " text=";
        out += node.label.text ? escapeText(*node.label.text) : std::string(kNoValueToken);
        out += '\n';

        std::vector<Id> kids;
        kids.reserve(node.children.size());
        for (const auto& [word, child] : node.children) kids.push_back(child);
        for (auto rit = kids.rbegin(); rit != kids.rend(); ++rit) stack.push_back(*rit);
    }
    return out;
}

std::string Tree::canonicalDigest() const { return hex64(fnv1a64(canonicalSerialize())); }

} // namespace treesync
