#include "evident/canonical.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>

#include "evident/error.hpp"

namespace evident {

namespace {

constexpr char kHex[] = "0123456789abcdef";

// Returns false on any ill-formed sequence (overlongs, surrogates, > U+10FFFF).
bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += len;
  }
  return true;
}

void write_string(std::string& out, std::string_view s) {
  if (!valid_utf8(s))
    throw Error(ErrorCode::MalformedPayload, "string is not valid UTF-8");
  out += '"';
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xF];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

bool integral_in_range(double v) {
  return std::isfinite(v) && v == std::trunc(v) && v >= -9.2e18 && v <= 9.2e18;
}

void write_double(std::string& out, double v) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::MalformedPayload, "non-finite number");
  if (integral_in_range(v)) {
    out += std::to_string(static_cast<std::int64_t>(v));
    return;
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), end);
}

void write(std::string& out, const Json& doc) {
  switch (doc.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += doc.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
      out += std::to_string(doc.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(doc.get<std::uint64_t>());
      break;
    case Json::value_t::number_float: write_double(out, doc.get<double>()); break;
    case Json::value_t::string: write_string(out, doc.get_ref<const std::string&>()); break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : doc) {
        if (!first) out += ',';
        first = false;
        write(out, item);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      // nlohmann::json objects are std::map-backed: iteration is already
      // byte-wise sorted, which is code point order for UTF-8.
      out += '{';
      bool first = true;
      for (const auto& [key, value] : doc.get_ref<const Json::object_t&>()) {
        if (!first) out += ',';
        first = false;
        write_string(out, key);
        out += ':';
        write(out, value);
      }
      out += '}';
      break;
    }
    case Json::value_t::binary:
    case Json::value_t::discarded:
      throw Error(ErrorCode::MalformedPayload, "value is not serializable");
  }
}

}  // namespace

std::string canonical_dump(const Json& doc) {
  std::string out;
  write(out, doc);
  return out;
}

Json normalize_numbers(Json doc) {
  if (doc.is_number_float()) {
    double v = doc.get<double>();
    if (integral_in_range(v)) return Json(static_cast<std::int64_t>(v));
    return doc;
  }
  if (doc.is_number_unsigned()) {
    auto v = doc.get<std::uint64_t>();
    if (v <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      return Json(static_cast<std::int64_t>(v));
    return doc;
  }
  if (doc.is_array() || doc.is_object()) {
    for (auto& item : doc) item = normalize_numbers(std::move(item));
  }
  return doc;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int md_len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &md_len) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  std::string hex;
  hex.reserve(md_len * 2);
  for (unsigned int i = 0; i < md_len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

std::string content_digest(std::string_view bytes) {
  return std::string(kDigestPrefix) + sha256_hex(bytes);
}

bool is_lower_hex(std::string_view text) {
  for (char c : text) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace evident
