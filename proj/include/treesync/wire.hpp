#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treesync/op.hpp"

namespace treesync {

/// Decode failure; offset is the byte position inside the offending line.
class WireError : public std::runtime_error {
  public:
    WireError(std::size_t offset, const std::string& reason)
        : std::runtime_error(reason + " (byte " + std::to_string(offset) + ")"),
          offset_(offset), reason_(reason) {}

    [[nodiscard]] std::size_t offset() const { return offset_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }

  private:
    std::size_t offset_;
    std::string reason_;
};

/// One request per line, UTF-8 JSON, fixed field order:
///   {"v":1,"op":"add","origin":2,"count":7,"parent":"0:0","id":"2:7","pos":"__#2.7"}
///   {"op":"del","origin":3,"count":4,"target":"2:7"}
///   {"op":"chlab","origin":1,"count":9,"target":"2:7","dep":5,"text":"Abstract"}
/// Ids are "site:count"; position words use '_' for the low sentinel and '#'
/// for the separator. Encoding is canonical: byte-identical across runs.
[[nodiscard]] std::string encodeRequest(const Request& r);

/// Strict inverse of encodeRequest: unknown kinds, unknown fields, malformed
/// ids and stamp mismatches all raise WireError.
[[nodiscard]] Request decodeRequest(std::string_view line);

/// Newline-separated log helpers; blank lines are skipped on read.
[[nodiscard]] std::string encodeRequestLog(const std::vector<Request>& log);
[[nodiscard]] std::vector<Request> decodeRequestLog(std::string_view text);

} // namespace treesync
