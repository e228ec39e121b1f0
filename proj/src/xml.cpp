#include "treesync/xml.hpp"

#include <algorithm>
#include <cctype>

namespace treesync {

namespace {

bool isSpaceByte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string trimWhitespace(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && isSpaceByte(s[b])) ++b;
    while (e > b && isSpaceByte(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

bool isNameStart(char c) {
    return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool isNameChar(char c) {
    return isNameStart(c) || c == '-' || c == '.' || (c >= '0' && c <= '9');
}

bool isXmlName(std::string_view s) {
    if (s.empty() || !isNameStart(s[0])) return false;
    return std::all_of(s.begin() + 1, s.end(), isNameChar);
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    XmlFragment parse() {
        XmlFragment frag;
        skipBom();
        for (;;) {
            skipMisc();
            if (eof()) break;
            if (peek() != '<') fail("content outside any element");
            frag.roots.push_back(parseElement());
        }
        if (frag.roots.empty()) fail("document holds no element");
        return frag;
    }

  private:
    [[noreturn]] void fail(const std::string& reason) const {
        throw XmlError(line_, column_, reason);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char take() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    bool consume(std::string_view lit) {
        if (text_.substr(pos_).starts_with(lit)) {
            for (std::size_t i = 0; i < lit.size(); ++i) take();
            return true;
        }
        return false;
    }

    void skipBom() {
        consume("\xEF\xBB\xBF");
    }

    void skipSpace() {
        while (!eof() && isSpaceByte(peek())) take();
    }

    // whitespace, comments, processing instructions, doctype
    void skipMisc() {
        for (;;) {
            skipSpace();
            if (consume("<!--")) {
                while (!consume("-->")) {
                    if (eof()) fail("unterminated comment");
                    take();
                }
            } else if (consume("<?")) {
                while (!consume("?>")) {
                    if (eof()) fail("unterminated processing instruction");
                    take();
                }
            } else if (consume("<!DOCTYPE")) {
                while (!eof() && peek() != '>') take();
                if (eof()) fail("unterminated doctype");
                take();
            } else {
                return;
            }
        }
    }

    std::string parseName() {
        if (eof() || !isNameStart(peek())) fail("expected a name");
        std::string name;
        name += take();
        while (!eof() && isNameChar(peek())) name += take();
        return name;
    }

    std::string decodeEntities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out += raw[i++];
                continue;
            }
            const std::size_t end = raw.find(';', i);
            if (end == std::string_view::npos) fail("unterminated entity reference");
            const std::string_view name = raw.substr(i + 1, end - i - 1);
            if (name == "lt") out += '<';
            else if (name == "gt") out += '>';
            else if (name == "amp") out += '&';
            else if (name == "quot") out += '"';
            else if (name == "apos") out += '\'';
            else if (name.starts_with("#")) {
                unsigned long cp = 0;
                try {
                    cp = name.starts_with("#x") || name.starts_with("#X")
                             ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                             : std::stoul(std::string(name.substr(1)), nullptr, 10);
                } catch (...) {
                    fail("malformed character reference");
                }
                appendUtf8(out, cp);
            } else {
                fail("unknown entity &" + std::string(name) + ";");
            }
            i = end + 1;
        }
        return out;
    }

    static void appendUtf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string parseAttrValue() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected a quoted value");
        const char quote = take();
        std::string raw;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' inside an attribute value");
            raw += take();
        }
        if (eof()) fail("unterminated attribute value");
        take();
        return decodeEntities(raw);
    }

    XmlNode parseElement() {
        take(); // '<'
        XmlNode node;
        node.nameOrText = parseName();

        for (;;) {
            skipSpace();
            if (eof()) fail("unterminated start tag");
            if (consume("/>")) return node;
            if (peek() == '>') {
                take();
                break;
            }
            std::string attr = parseName();
            skipSpace();
            if (eof() || take() != '=') fail("expected '=' after attribute name");
            skipSpace();
            node.attrs.emplace_back(std::move(attr), parseAttrValue());
        }

        // content until the matching close tag
        for (;;) {
            if (eof()) fail("unterminated element <" + node.nameOrText + ">");
            if (peek() == '<') {
                if (consume("</")) {
                    const std::string name = parseName();
                    if (name != node.nameOrText)
                        fail("mismatched close tag </" + name + "> for <" +
                             node.nameOrText + ">");
                    skipSpace();
                    if (eof() || take() != '>') fail("malformed close tag");
                    return node;
                }
                if (consume("<!--")) {
                    while (!consume("-->")) {
                        if (eof()) fail("unterminated comment");
                        take();
                    }
                    continue;
                }
                if (consume("<![CDATA[")) {
                    std::string data;
                    while (!consume("]]>")) {
                        if (eof()) fail("unterminated CDATA section");
                        data += take();
                    }
                    XmlNode textNode;
                    textNode.isText = true;
                    textNode.nameOrText = std::move(data);
                    node.children.push_back(std::move(textNode));
                    continue;
                }
                if (consume("<?")) {
                    while (!consume("?>")) {
                        if (eof()) fail("unterminated processing instruction");
                        take();
                    }
                    continue;
                }
                node.children.push_back(parseElement());
                continue;
            }
            std::string raw;
            while (!eof() && peek() != '<') raw += take();
            XmlNode textNode;
            textNode.isText = true;
            textNode.nameOrText = decodeEntities(raw);
            node.children.push_back(std::move(textNode));
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Importer {
  public:
    Importer(SiteEngine& engine, std::vector<Request>& out) : engine_(engine), out_(out) {}

    void importNode(const XmlNode& node, const Id& parent) {
        if (node.isText) {
            const std::string text = trimWhitespace(node.nameOrText);
            if (text.empty()) return;
            addLabelled(parent, text);
            return;
        }
        const Id self = addLabelled(parent, node.nameOrText);
        for (const auto& [name, value] : node.attrs)
            addLabelled(self, "@" + name + "=" + value);
        for (const XmlNode& child : node.children) importNode(child, self);
    }

  private:
    Id addLabelled(const Id& parent, const std::string& text) {
        const std::size_t slot = engine_.tree().childCount(parent);
        Request add = engine_.generate(AddIntent{parent, slot});
        const Id self = add.stamp();
        out_.push_back(std::move(add));
        out_.push_back(engine_.generate(RelabelIntent{self, text}));
        return self;
    }

    SiteEngine& engine_;
    std::vector<Request>& out_;
};

std::string escapeCharData(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

std::string escapeAttrValue(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

// "@name=value" on a leaf edge folds back into an attribute
bool splitAttrLabel(const std::string& label, std::string& name, std::string& value) {
    if (label.empty() || label[0] != '@') return false;
    const std::size_t eq = label.find('=');
    if (eq == std::string::npos || eq == 1) return false;
    name = label.substr(1, eq - 1);
    value = label.substr(eq + 1);
    return isXmlName(name);
}

std::string sanitizeTagName(const std::string& label) {
    std::string name;
    for (char c : label)
        name += isNameChar(c) ? c : '_';
    if (name.empty() || !isNameStart(name[0])) name = "_" + name;
    return name;
}

void exportEdge(const Tree& tree, const Id& id, std::string& out, std::size_t depth);

void exportChildren(const Tree& tree, const Id& id, std::string& out, std::size_t depth) {
    for (const Id& child : tree.childIds(id)) exportEdge(tree, child, out, depth);
}

void exportEdge(const Tree& tree, const Id& id, std::string& out, std::size_t depth) {
    const std::string indent(depth * 2, ' ');
    const Label* label = tree.labelOf(id);

    const bool leaf = tree.childCount(id) == 0;
    if (!label->text) {
        if (leaf) {
            out += indent + "<_pending/>\n";
        } else {
            out += indent + "<_pending>\n";
            exportChildren(tree, id, out, depth + 1);
            out += indent + "</_pending>\n";
        }
        return;
    }

    std::string attrName;
    std::string attrValue;
    if (leaf && splitAttrLabel(*label->text, attrName, attrValue)) return; // folded by parent
    if (leaf && !isXmlName(*label->text)) {
        out += indent + escapeCharData(*label->text) + "\n";
        return;
    }

    const std::string tag =
        isXmlName(*label->text) ? *label->text : sanitizeTagName(*label->text);
    std::string attrs;
    std::size_t contentChildren = 0;
    for (const Id& child : tree.childIds(id)) {
        const Label* childLabel = tree.labelOf(child);
        std::string n;
        std::string v;
        if (childLabel->text && tree.childCount(child) == 0 &&
            splitAttrLabel(*childLabel->text, n, v)) {
            attrs += " " + n + "=\"" + escapeAttrValue(v) + "\"";
        } else {
            ++contentChildren;
        }
    }

    if (contentChildren == 0) {
        out += indent + "<" + tag + attrs + "/>\n";
        return;
    }
    out += indent + "<" + tag + attrs + ">\n";
    exportChildren(tree, id, out, depth + 1);
    out += indent + "</" + tag + ">\n";
}

void shapeLines(const Tree& tree, const Id& id, std::size_t depth, std::string& out) {
    for (const Id& child : tree.childIds(id)) {
        const Label* label = tree.labelOf(child);
        out += std::to_string(depth);
        out += '\t';
        out += label->text ? escapeText(*label->text) : "⟨novalue⟩";
        out += '\n';
        shapeLines(tree, child, depth + 1, out);
    }
}

} // namespace

XmlFragment parseXml(std::string_view text) { return Parser(text).parse(); }

ImportResult importXml(std::string_view document, std::uint32_t site) {
    SiteEngine engine(site);
    ImportResult result;
    if (trimWhitespace(document).empty()) { // blank input: just the root
        result.tree = engine.tree();
        return result;
    }
    const XmlFragment frag = parseXml(document);
    Importer importer(engine, result.requests);
    for (const XmlNode& root : frag.roots) importer.importNode(root, Id::root());
    result.tree = engine.tree();
    return result;
}

std::string exportPretty(const Tree& tree) {
    std::string out;
    exportChildren(tree, Id::root(), out, 0);
    return out;
}

std::string shapeDigest(const Tree& tree) {
    std::string lines;
    shapeLines(tree, Id::root(), 0, lines);
    return hex64(fnv1a64(lines));
}

} // namespace treesync
