#include "treesync/wire.hpp"

#include <json.hpp>

namespace treesync {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string jsonQuoted(std::string_view s) {
    return ordered_json(std::string(s)).dump();
}

Id parseIdField(const ordered_json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        throw WireError(0, std::string("missing or non-string field \"") + field + "\"");
    auto id = Id::parse(it->get_ref<const std::string&>());
    if (!id) throw WireError(0, std::string("malformed id in field \"") + field + "\"");
    return *id;
}

std::uint64_t parseUintField(const ordered_json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number_unsigned())
        throw WireError(0, std::string("missing or non-integer field \"") + field + "\"");
    return it->get<std::uint64_t>();
}

void requireFields(const ordered_json& j, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = key == "v";
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw WireError(0, "unknown field \"" + key + "\"");
    }
    if (auto it = j.find("v"); it != j.end() && (!it->is_number_unsigned() || *it != 1))
        throw WireError(0, "unsupported format version");
}

} // namespace

std::string encodeRequest(const Request& r) {
    std::string out;
    if (const auto* add = std::get_if<AddEdge>(&r.op)) {
        out = "{\"v\":1,\"op\":\"add\",\"origin\":" + std::to_string(r.origin) +
              ",\"count\":" + std::to_string(r.count) +
              ",\"parent\":" + jsonQuoted(add->parent.str()) +
              ",\"id\":" + jsonQuoted(add->edge.str()) +
              ",\"pos\":" + jsonQuoted(add->pos.str()) + "}";
    } else if (const auto* del = std::get_if<DeleteSubtree>(&r.op)) {
        out = "{\"op\":\"del\",\"origin\":" + std::to_string(r.origin) +
              ",\"count\":" + std::to_string(r.count) +
              ",\"target\":" + jsonQuoted(del->target.str()) + "}";
    } else {
        const auto& chg = std::get<ChangeLabel>(r.op);
        out = "{\"op\":\"chlab\",\"origin\":" + std::to_string(r.origin) +
              ",\"count\":" + std::to_string(r.count) +
              ",\"target\":" + jsonQuoted(chg.target.str()) +
              ",\"dep\":" + std::to_string(chg.dep) +
              ",\"text\":" + jsonQuoted(chg.text) + "}";
    }
    return out;
}

Request decodeRequest(std::string_view line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
        throw WireError(e.byte, "invalid JSON");
    }
    if (!j.is_object()) throw WireError(0, "request line is not a JSON object");

    auto opIt = j.find("op");
    if (opIt == j.end() || !opIt->is_string()) throw WireError(0, "missing op kind");
    const std::string kind = opIt->get<std::string>();

    Request r;
    const std::uint64_t origin = parseUintField(j, "origin");
    if (origin == 0 || origin > 0xFFFFFFFFull) throw WireError(0, "origin out of range");
    r.origin = static_cast<std::uint32_t>(origin);
    r.count = parseUintField(j, "count");
    if (r.count == 0) throw WireError(0, "count out of range");

    if (kind == "add") {
        requireFields(j, {"op", "origin", "count", "parent", "id", "pos"});
        if (!j.contains("v")) throw WireError(0, "add line lacks format version");
        AddEdge add;
        add.parent = parseIdField(j, "parent");
        add.edge = parseIdField(j, "id");
        auto posIt = j.find("pos");
        if (posIt == j.end() || !posIt->is_string())
            throw WireError(0, "missing or non-string field \"pos\"");
        auto pos = PositionWord::parse(posIt->get_ref<const std::string&>());
        if (!pos) throw WireError(0, "position word holds a foreign symbol");
        add.pos = *pos;
        if (add.edge != r.stamp()) throw WireError(0, "minted id differs from stamp");
        if (add.parent == add.edge) throw WireError(0, "edge attached to itself");
        r.op = std::move(add);
    } else if (kind == "del") {
        requireFields(j, {"op", "origin", "count", "target"});
        DeleteSubtree del;
        del.target = parseIdField(j, "target");
        if (del.target.isRoot()) throw WireError(0, "root is not deletable");
        r.op = del;
    } else if (kind == "chlab") {
        requireFields(j, {"op", "origin", "count", "target", "dep", "text"});
        ChangeLabel chg;
        chg.target = parseIdField(j, "target");
        if (chg.target.isRoot()) throw WireError(0, "root is not relabellable");
        chg.setter = r.stamp();
        chg.dep = parseUintField(j, "dep");
        auto textIt = j.find("text");
        if (textIt == j.end() || !textIt->is_string())
            throw WireError(0, "missing or non-string field \"text\"");
        chg.text = textIt->get<std::string>();
        r.op = std::move(chg);
    } else {
        throw WireError(0, "unknown op kind \"" + kind + "\"");
    }
    return r;
}

std::string encodeRequestLog(const std::vector<Request>& log) {
    std::string out;
    for (const Request& r : log) {
        out += encodeRequest(r);
        out += '\n';
    }
    return out;
}

std::vector<Request> decodeRequestLog(std::string_view text) {
    std::vector<Request> out;
    std::size_t lineNo = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++lineNo;
        if (!line.empty()) {
            try {
                out.push_back(decodeRequest(line));
            } catch (const WireError& e) {
                throw WireError(e.offset(),
                                "line " + std::to_string(lineNo) + ": " + e.reason());
            }
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

} // namespace treesync
