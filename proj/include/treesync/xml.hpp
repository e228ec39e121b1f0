#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treesync/engine.hpp"
#include "treesync/tree.hpp"

namespace treesync {

class XmlError : public std::runtime_error {
  public:
    XmlError(std::size_t line, std::size_t column, const std::string& reason)
        : std::runtime_error("xml: " + reason + " at line " + std::to_string(line) +
                             ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

struct XmlNode {
    bool isText = false;
    std::string nameOrText; // tag name, or character data for text nodes
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;
};

/// Well-formed fragment: one or more top-level nodes. Prolog, comments and
/// CDATA are accepted; DTDs, namespaces and processing beyond skipping are
/// not.
struct XmlFragment {
    std::vector<XmlNode> roots;
};

XmlFragment parseXml(std::string_view text); // throws XmlError

struct ImportResult {
    Tree tree;
    std::vector<Request> requests; // replayable, generation order
};

/// Maps a document onto the edit model: every element and every
/// non-whitespace text node becomes an edge added then relabelled (tag name
/// or trimmed character data); attributes become leaf child edges labelled
/// "@name=value", minted before the element's content. Sibling order is
/// document order.
ImportResult importXml(std::string_view document, std::uint32_t site = 1);

/// Inverse direction, lossy only about ids: attribute-shaped leaf edges
/// ("@name=value") fold back into attributes, labels that parse as names
/// become elements, other leaves become character data, and edges never
/// relabelled render as <_pending/>.
[[nodiscard]] std::string exportPretty(const Tree& tree);

/// Digest of structure and labels only (ids, positions and register
/// metadata masked); equal for any two imports of equivalent documents.
[[nodiscard]] std::string shapeDigest(const Tree& tree);

} // namespace treesync
