#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gapflow::rsu {

inline constexpr int kProtocolVersion = 1;

/// Platoon leader -> RSU.
struct GapRequest {
  int protocol_version = kProtocolVersion;
  int platoon_id = 0;
  double leader_position = 0.0;  // m
  double leader_speed = 0.0;     // m/s
  int size = 2;
  std::vector<double> current_gaps;  // m, size - 1 entries
  std::int64_t timestamp_us = 0;

  /// Throws std::invalid_argument unless size >= 2 and the gap count is
  /// size - 1.
  void validate() const;
  bool operator==(const GapRequest&) const = default;
};

/// RSU -> platoon leader.
struct GapResponse {
  int platoon_id = 0;
  std::vector<double> advised_gaps;  // m, each in [2, 30]
  double compute_delay_us = 0.0;     // server-side observe + inference + decode
  std::int64_t timestamp_us = 0;

  bool operator==(const GapResponse&) const = default;
};

/// Returned instead of a response when a request cannot be served.
struct ErrorMessage {
  int platoon_id = -1;  // -1 when the offending frame could not be decoded
  std::string code;
  std::string detail;

  bool operator==(const ErrorMessage&) const = default;
};

using Message = std::variant<GapRequest, GapResponse, ErrorMessage>;

enum class MessageType : std::uint8_t { request = 1, response = 2, error = 3 };

MessageType type_of(const Message& message);

}  // namespace gapflow::rsu
