#include "gapflow/rsu/codec.hpp"

#include <json.hpp>

namespace gapflow::rsu {

using nlohmann::ordered_json;

namespace {

std::uint32_t read_u32(std::string_view b) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

ordered_json to_json(const GapRequest& m) {
  ordered_json j;
  j["protocol_version"] = m.protocol_version;
  j["platoon_id"] = m.platoon_id;
  j["leader_position"] = m.leader_position;
  j["leader_speed"] = m.leader_speed;
  j["size"] = m.size;
  j["current_gaps"] = m.current_gaps;
  j["timestamp"] = m.timestamp_us;
  return j;
}

ordered_json to_json(const GapResponse& m) {
  ordered_json j;
  j["platoon_id"] = m.platoon_id;
  j["advised_gaps"] = m.advised_gaps;
  j["compute_delay"] = m.compute_delay_us;
  j["timestamp"] = m.timestamp_us;
  return j;
}

ordered_json to_json(const ErrorMessage& m) {
  ordered_json j;
  j["platoon_id"] = m.platoon_id;
  j["code"] = m.code;
  j["detail"] = m.detail;
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw CodecError(CodecError::Kind::decode_error, std::string("decode error: missing ") + key);
  if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) throw CodecError(CodecError::Kind::decode_error, std::string("decode error: ") + key);
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) {
      throw CodecError(CodecError::Kind::decode_error, std::string("decode error: ") + key);
    }
  }
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CodecError(CodecError::Kind::decode_error, std::string("decode error: ") + key);
  }
}

void expect_keys(const ordered_json& j, std::size_t n) {
  if (!j.is_object() || j.size() != n) {
    throw CodecError(CodecError::Kind::decode_error, "decode error: unexpected fields");
  }
}

Message parse_payload(MessageType type, const ordered_json& j) {
  switch (type) {
    case MessageType::request: {
      expect_keys(j, 7);
      GapRequest m;
      m.protocol_version = field<int>(j, "protocol_version");
      m.platoon_id = field<int>(j, "platoon_id");
      m.leader_position = field<double>(j, "leader_position");
      m.leader_speed = field<double>(j, "leader_speed");
      m.size = field<int>(j, "size");
      m.current_gaps = field<std::vector<double>>(j, "current_gaps");
      m.timestamp_us = field<std::int64_t>(j, "timestamp");
      return m;
    }
    case MessageType::response: {
      expect_keys(j, 4);
      GapResponse m;
      m.platoon_id = field<int>(j, "platoon_id");
      m.advised_gaps = field<std::vector<double>>(j, "advised_gaps");
      m.compute_delay_us = field<double>(j, "compute_delay");
      m.timestamp_us = field<std::int64_t>(j, "timestamp");
      return m;
    }
    case MessageType::error: {
      expect_keys(j, 3);
      ErrorMessage m;
      m.platoon_id = field<int>(j, "platoon_id");
      m.code = field<std::string>(j, "code");
      m.detail = field<std::string>(j, "detail");
      return m;
    }
  }
  throw CodecError(CodecError::Kind::unsupported_type, "unsupported message type");
}

}  // namespace

std::string encode_message(const Message& message) {
  const std::string payload =
      std::visit([](const auto& m) { return to_json(m).dump(); }, message);
  if (payload.size() > kMaxPayload) throw std::length_error("message exceeds the frame limit");
  std::string frame;
  frame.reserve(kHeaderSize + payload.size());
  const auto n = static_cast<std::uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) frame.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  frame.push_back(static_cast<char>(type_of(message)));
  frame += payload;
  return frame;
}

std::optional<std::size_t> frame_size(std::string_view buffer) {
  if (buffer.size() < kHeaderSize) return std::nullopt;
  const std::uint32_t n = read_u32(buffer);
  if (n > kMaxPayload) throw CodecError(CodecError::Kind::decode_error, "decode error: frame too large");
  return kHeaderSize + n;
}

Message decode_message(std::string_view bytes) {
  const auto size = frame_size(bytes);
  if (!size || bytes.size() < *size) {
    throw CodecError(CodecError::Kind::incomplete_frame, "incomplete frame");
  }
  if (bytes.size() > *size) throw CodecError(CodecError::Kind::decode_error, "decode error: trailing bytes");
  const auto type = static_cast<std::uint8_t>(bytes[4]);
  if (type < 1 || type > 3) throw CodecError(CodecError::Kind::unsupported_type, "unsupported message type");
  ordered_json j;
  try {
    j = ordered_json::parse(bytes.substr(kHeaderSize));
  } catch (const nlohmann::json::exception& e) {
    throw CodecError(CodecError::Kind::decode_error, std::string("decode error: ") + e.what());
  }
  return parse_payload(static_cast<MessageType>(type), j);
}

}  // namespace gapflow::rsu
