#include "treesync/position.hpp"

#include <algorithm>
#include <stdexcept>

namespace treesync {

bool isWordSymbol(char c) {
    return c == kBot || c == kSep || c == '.' || (c >= '0' && c <= '9');
}

int symbolRank(char c) {
    if (c == kBot) return 0;
    if (c == kSep) return 1;
    if (c == '.') return 2;
    if (c >= '0' && c <= '9') return 3 + (c - '0');
    throw std::logic_error("position word holds a foreign byte");
}

PositionWord::PositionWord(std::string symbols) : symbols_(std::move(symbols)) {
    for (char c : symbols_)
        if (!isWordSymbol(c)) throw std::invalid_argument("invalid position symbol");
}

std::optional<PositionWord> PositionWord::parse(std::string_view text) {
    for (char c : text)
        if (!isWordSymbol(c)) return std::nullopt;
    return PositionWord{std::string(text)};
}

std::string encodeId(const Id& id) {
    return std::to_string(id.site) + "." + std::to_string(id.count);
}

EdgeWord edgeWord(const PositionWord& pos, const Id& id) {
    std::string s;
    s.reserve(pos.size() + 1 + 8);
    s += pos.str();
    s += kSep;
    s += encodeId(id);
    return EdgeWord{std::move(s)};
}

namespace {

std::strong_ordering compareSymbols(std::string_view a, std::string_view b) {
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i) {
        const int ra = symbolRank(a[i]);
        const int rb = symbolRank(b[i]);
        if (ra != rb) return ra <=> rb;
    }
    return a.size() <=> b.size();
}

bool strictlyBetween(const EdgeWord& lo, const EdgeWord& w, const EdgeWord& hi) {
    return wordCompare(lo, w) == std::strong_ordering::less &&
           wordCompare(w, hi) == std::strong_ordering::less;
}

} // namespace

std::strong_ordering wordCompare(const EdgeWord& u, const EdgeWord& v) {
    return compareSymbols(u.str(), v.str());
}

PositionWord between(const EdgeWord& lo, const EdgeWord& hi, const Id& id) {
    if (wordCompare(lo, hi) != std::strong_ordering::less)
        throw std::invalid_argument("between: bounds not strictly ordered");

    const std::string& a = lo.str();
    const std::string& b = hi.str();

    // First index where lo drops below hi; when lo is a strict prefix the
    // drop happens just past lo's end.
    std::size_t j = 0;
    const std::size_t m = std::min(a.size(), b.size());
    while (j < m && a[j] == b[j]) ++j;

    if (j + 1 < b.size()) {
        std::string pos = b.substr(0, j + 1);
        pos.append(b.size() - (j + 1), kBot);
        PositionWord cand{std::move(pos)};
        if (strictlyBetween(lo, edgeWord(cand, id), hi)) return cand;
    }

    // The drop sits at hi's last symbol: extending lo lands inside the gap.
    PositionWord cand{a};
    if (!strictlyBetween(lo, edgeWord(cand, id), hi))
        throw std::logic_error("between: constructed word escaped its bounds");
    return cand;
}

PositionWord beforeAll(const EdgeWord& w, const Id& id) {
    PositionWord pos{std::string(w.size() + 1, kBot)};
    if (wordCompare(edgeWord(pos, id), w) != std::strong_ordering::less)
        throw std::logic_error("beforeAll: constructed word not below bound");
    return pos;
}

PositionWord afterAll(const EdgeWord& w, const Id& id) {
    PositionWord pos{std::string(w.size() + 1, '9')};
    if (wordCompare(w, edgeWord(pos, id)) != std::strong_ordering::less)
        throw std::logic_error("afterAll: constructed word not above bound");
    return pos;
}

} // namespace treesync
