#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "treesync/identity.hpp"

namespace treesync {

// Sibling order is carried by words over a finite alphabet ordered
//
//     BOT ('_')  <  SEP ('#')  <  '.'  <  '0'  <  ...  <  '9'
//
// An edge word is position-word + SEP + the decimal encoding of the edge id
// ("site.count"). Words compare lexicographically by symbol rank, a strict
// prefix ordering below every extension. Appending the id suffix keeps words
// of distinct edges distinct, so the order is total.
inline constexpr char kBot = '_';
inline constexpr char kSep = '#';

[[nodiscard]] bool isWordSymbol(char c);
[[nodiscard]] int symbolRank(char c); // throws std::logic_error on a foreign byte

/// Position part of an edge word. May be empty and may contain any symbol,
/// including SEP and BOT. The string form doubles as the wire escape.
class PositionWord {
  public:
    PositionWord() = default;
    explicit PositionWord(std::string symbols);

    static std::optional<PositionWord> parse(std::string_view text);

    [[nodiscard]] const std::string& str() const { return symbols_; }
    [[nodiscard]] std::size_t size() const { return symbols_.size(); }

    bool operator==(const PositionWord&) const = default;

  private:
    std::string symbols_;
};

/// Full sibling-order key of an edge: position word, SEP, id suffix.
class EdgeWord {
  public:
    EdgeWord() = default;
    explicit EdgeWord(std::string symbols) : symbols_(std::move(symbols)) {}

    [[nodiscard]] const std::string& str() const { return symbols_; }
    [[nodiscard]] std::size_t size() const { return symbols_.size(); }

    bool operator==(const EdgeWord&) const = default;

  private:
    std::string symbols_;
};

/// Decimal encoding of an id over {'.', '0'..'9'}: "1.10" for (1,10).
[[nodiscard]] std::string encodeId(const Id& id);

[[nodiscard]] EdgeWord edgeWord(const PositionWord& pos, const Id& id);

/// Three-way comparison by symbol rank; a strict prefix is less.
[[nodiscard]] std::strong_ordering wordCompare(const EdgeWord& u, const EdgeWord& v);

struct EdgeWordLess {
    bool operator()(const EdgeWord& a, const EdgeWord& b) const {
        return wordCompare(a, b) == std::strong_ordering::less;
    }
};

/// Position for a new edge strictly between lo and hi (both edge words of
/// current siblings, lo < hi required or std::invalid_argument). The result
/// either reuses a prefix of hi padded with BOT or extends lo, whichever
/// yields edgeWord(result, id) strictly inside (lo, hi).
[[nodiscard]] PositionWord between(const EdgeWord& lo, const EdgeWord& hi, const Id& id);

/// Position strictly below every current sibling word w: BOT repeated
/// length(w) + 1 times.
[[nodiscard]] PositionWord beforeAll(const EdgeWord& w, const Id& id);

/// Position strictly above every current sibling word w: '9' repeated
/// length(w) + 1 times.
[[nodiscard]] PositionWord afterAll(const EdgeWord& w, const Id& id);

} // namespace treesync
