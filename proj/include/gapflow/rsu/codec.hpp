#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gapflow/rsu/messages.hpp"

namespace gapflow::rsu {

/// Frame: u32 little-endian payload length, u8 message type, then the payload
/// as canonical JSON (fixed key order, no whitespace).
inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::uint32_t kMaxPayload = 1u << 20;

class CodecError : public std::runtime_error {
 public:
  enum class Kind { incomplete_frame, unsupported_type, decode_error };

  CodecError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string encode_message(const Message& message);

/// Decodes exactly one frame. Errors: fewer bytes than the header or the
/// declared length ("incomplete frame"), an unknown type byte ("unsupported
/// message type"), or a payload that is not a valid message of that type or
/// trailing bytes after the frame ("decode error").
Message decode_message(std::string_view bytes);

/// Total size of the frame at the start of `buffer`, once its header is
/// available. Throws CodecError(decode_error) if the declared payload exceeds
/// kMaxPayload.
std::optional<std::size_t> frame_size(std::string_view buffer);

}  // namespace gapflow::rsu
