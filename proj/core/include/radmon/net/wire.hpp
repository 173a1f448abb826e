#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "radmon/status/status.hpp"

namespace radmon::net {

// Frame layout, all integers little-endian:
//   magic "AIGM" | version u8 | msg_type u8 | room_id u8 | reserved u8 |
//   timestamp_ms u64 | payload_len u32 | payload
inline constexpr uint8_t kWireMagic[4] = {0x41, 0x49, 0x47, 0x4D};
inline constexpr uint8_t kWireVersion = 1;
inline constexpr size_t kWireHeaderSize = 20;

enum class MsgType : uint8_t {
  Presence = 0x01,      // payload: 1 byte, 0 vacant / 1 occupied
  JtfWindow = 0x02,     // payload: 50x256 float32, row-major by time step
  StatusResult = 0x03,  // payload: status code u8, confidence u8 percent
  Heartbeat = 0x04,     // payload: empty
};

inline constexpr size_t kJtfPayloadBytes = size_t(50) * 256 * 4;

struct WireMessage {
  uint8_t version = kWireVersion;
  MsgType type = MsgType::Heartbeat;
  uint8_t room_id = 0;  // 0 bedroom, 1 livingroom, 2 washroom
  uint8_t reserved = 0;
  uint64_t timestamp_ms = 0;
  std::vector<uint8_t> payload;
};

std::vector<uint8_t> encode(const WireMessage& msg);
WireMessage decode(const uint8_t* bytes, size_t size);
WireMessage decode(const std::vector<uint8_t>& bytes);

// Builders for the four message kinds; each enforces its payload shape.
WireMessage make_presence(uint8_t room_id, uint64_t ts_ms, bool occupied);
WireMessage make_jtf(uint8_t room_id, uint64_t ts_ms, const float* values, size_t count);
WireMessage make_status_result(uint8_t room_id, uint64_t ts_ms, status::Status s,
                               double confidence);
WireMessage make_heartbeat(uint8_t room_id, uint64_t ts_ms);

bool presence_occupied(const WireMessage& msg);
std::vector<float> jtf_values(const WireMessage& msg);
std::pair<status::Status, double> status_result_fields(const WireMessage& msg);

// Blocking framed socket I/O. read_frame returns nullopt on clean EOF before
// any header byte and throws on torn or malformed frames; write_frame returns
// false when the peer is gone.
std::optional<WireMessage> read_frame(int fd);
bool write_frame(int fd, const WireMessage& msg);

// "host:port" -> parts; the only address syntax the services accept.
std::pair<std::string, uint16_t> parse_address(const std::string& address);

}  // namespace radmon::net
