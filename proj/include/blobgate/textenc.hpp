#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace blobgate {

// Percent-escaping for tokens embedded in whitespace/slash-delimited text
// (permission scopes, manifest lines). Everything outside
// [A-Za-z0-9._*-] is encoded as %XX.
std::string escape_token(std::string_view token);
std::optional<std::string> unescape_token(std::string_view token);

}  // namespace blobgate
