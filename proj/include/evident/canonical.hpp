#pragma once

// evident/canonical.hpp: canonical JSON text and SHA-256 digests.
//
// Canonical form: UTF-8, object keys sorted by code point, no whitespace,
// integers in base 10, non-integral numbers in shortest round-trip form,
// control characters escaped. Two documents are equal iff their canonical
// bytes are equal. Content ids and the event chain hash these bytes.

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace evident {

using Json = nlohmann::json;

// Throws Error(MalformedPayload) for non-finite numbers, invalid UTF-8 and
// binary values.
std::string canonical_dump(const Json& doc);

// Rewrites integral floating-point values as integers (1.0 -> 1, -0.0 -> 0)
// so that a document survives a canonical round trip unchanged.
Json normalize_numbers(Json doc);

// Lowercase 64-char hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

inline constexpr std::string_view kDigestPrefix = "sha256:";

// "sha256:" + sha256_hex(bytes).
std::string content_digest(std::string_view bytes);

bool is_lower_hex(std::string_view text);

}  // namespace evident
