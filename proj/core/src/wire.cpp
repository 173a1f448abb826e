#include "radmon/net/wire.hpp"

#include <sys/socket.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <string>

#include "radmon/errors.hpp"

namespace radmon::net {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
  return v;
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
  return v;
}

bool known_type(uint8_t t) { return t >= 0x01 && t <= 0x04; }

// Fixed payload size per message type; every type has one.
size_t expected_payload(MsgType t) {
  switch (t) {
    case MsgType::Presence: return 1;
    case MsgType::JtfWindow: return kJtfPayloadBytes;
    case MsgType::StatusResult: return 2;
    case MsgType::Heartbeat: return 0;
  }
  raise(Err::UnknownType, "unreachable");
}

void check_shape(const WireMessage& msg) {
  if (msg.version != kWireVersion)
    raise(Err::UnsupportedVersion, "wire version " + std::to_string(msg.version));
  if (!known_type(uint8_t(msg.type)))
    raise(Err::UnknownType, "message type " + std::to_string(uint8_t(msg.type)));
  const size_t want = expected_payload(msg.type);
  if (msg.payload.size() != want)
    raise(Err::LengthMismatch, "payload of " + std::to_string(msg.payload.size()) +
                                   " bytes, type needs " + std::to_string(want));
}

}  // namespace

std::vector<uint8_t> encode(const WireMessage& msg) {
  check_shape(msg);
  std::vector<uint8_t> out;
  out.reserve(kWireHeaderSize + msg.payload.size());
  out.insert(out.end(), kWireMagic, kWireMagic + 4);
  out.push_back(msg.version);
  out.push_back(uint8_t(msg.type));
  out.push_back(msg.room_id);
  out.push_back(msg.reserved);
  put_u64(out, msg.timestamp_ms);
  put_u32(out, uint32_t(msg.payload.size()));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

WireMessage decode(const uint8_t* bytes, size_t size) {
  if (size < kWireHeaderSize)
    raise(Err::LengthMismatch, "frame of " + std::to_string(size) + " bytes, header needs 20");
  if (std::memcmp(bytes, kWireMagic, 4) != 0) raise(Err::BadMagic, "frame magic mismatch");
  WireMessage msg;
  msg.version = bytes[4];
  if (msg.version != kWireVersion)
    raise(Err::UnsupportedVersion, "wire version " + std::to_string(msg.version));
  if (!known_type(bytes[5]))
    raise(Err::UnknownType, "message type " + std::to_string(bytes[5]));
  msg.type = MsgType(bytes[5]);
  msg.room_id = bytes[6];
  msg.reserved = bytes[7];
  msg.timestamp_ms = get_u64(bytes + 8);
  const uint32_t len = get_u32(bytes + 16);
  if (size != kWireHeaderSize + len)
    raise(Err::LengthMismatch, "declared payload " + std::to_string(len) + ", frame carries " +
                                   std::to_string(size - kWireHeaderSize));
  msg.payload.assign(bytes + kWireHeaderSize, bytes + size);
  check_shape(msg);
  return msg;
}

WireMessage decode(const std::vector<uint8_t>& bytes) { return decode(bytes.data(), bytes.size()); }

WireMessage make_presence(uint8_t room_id, uint64_t ts_ms, bool occupied) {
  WireMessage m;
  m.type = MsgType::Presence;
  m.room_id = room_id;
  m.timestamp_ms = ts_ms;
  m.payload = {uint8_t(occupied ? 1 : 0)};
  return m;
}

WireMessage make_jtf(uint8_t room_id, uint64_t ts_ms, const float* values, size_t count) {
  if (count * 4 != kJtfPayloadBytes)
    raise(Err::LengthMismatch,
          "jtf window carries " + std::to_string(count) + " values, wire wants 12800");
  WireMessage m;
  m.type = MsgType::JtfWindow;
  m.room_id = room_id;
  m.timestamp_ms = ts_ms;
  m.payload.resize(kJtfPayloadBytes);
  static_assert(sizeof(float) == 4);
  std::memcpy(m.payload.data(), values, kJtfPayloadBytes);  // IEEE754 little-endian host
  return m;
}

WireMessage make_status_result(uint8_t room_id, uint64_t ts_ms, status::Status s,
                               double confidence) {
  WireMessage m;
  m.type = MsgType::StatusResult;
  m.room_id = room_id;
  m.timestamp_ms = ts_ms;
  const double pct = std::lround(std::min(1.0, std::max(0.0, confidence)) * 100.0);
  m.payload = {uint8_t(s), uint8_t(pct)};
  return m;
}

WireMessage make_heartbeat(uint8_t room_id, uint64_t ts_ms) {
  WireMessage m;
  m.type = MsgType::Heartbeat;
  m.room_id = room_id;
  m.timestamp_ms = ts_ms;
  return m;
}

bool presence_occupied(const WireMessage& msg) {
  if (msg.type != MsgType::Presence || msg.payload.size() != 1)
    raise(Err::LengthMismatch, "not a presence message");
  return msg.payload[0] != 0;
}

std::vector<float> jtf_values(const WireMessage& msg) {
  if (msg.type != MsgType::JtfWindow || msg.payload.size() != kJtfPayloadBytes)
    raise(Err::LengthMismatch, "not a jtf window message");
  std::vector<float> values(kJtfPayloadBytes / 4);
  std::memcpy(values.data(), msg.payload.data(), kJtfPayloadBytes);
  return values;
}

std::pair<status::Status, double> status_result_fields(const WireMessage& msg) {
  if (msg.type != MsgType::StatusResult || msg.payload.size() != 2)
    raise(Err::LengthMismatch, "not a status result message");
  if (msg.payload[0] > uint8_t(status::Status::Unknown))
    raise(Err::BadConfig, "status code " + std::to_string(msg.payload[0]));
  return {status::Status(msg.payload[0]), msg.payload[1] / 100.0};
}

namespace {

// recv exactly n bytes; 0 = clean EOF at a frame boundary, -1 = torn stream.
int recv_exact(int fd, uint8_t* buf, size_t n, bool eof_ok) {
  size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && eof_ok) return 0;
      return -1;
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      return -1;
    }
    got += size_t(r);
  }
  return 1;
}

}  // namespace

std::optional<WireMessage> read_frame(int fd) {
  uint8_t header[kWireHeaderSize];
  const int hr = recv_exact(fd, header, kWireHeaderSize, true);
  if (hr == 0) return std::nullopt;
  if (hr < 0) raise(Err::LengthMismatch, "connection died mid-frame");

  // Validate the header before trusting the declared length with memory.
  if (std::memcmp(header, kWireMagic, 4) != 0) raise(Err::BadMagic, "frame magic mismatch");
  if (header[4] != kWireVersion)
    raise(Err::UnsupportedVersion, "wire version " + std::to_string(header[4]));
  if (!known_type(header[5])) raise(Err::UnknownType, "message type " + std::to_string(header[5]));
  const uint32_t len = get_u32(header + 16);
  if (len > kJtfPayloadBytes)
    raise(Err::LengthMismatch, "declared payload " + std::to_string(len) + " exceeds any type");

  std::vector<uint8_t> frame(header, header + kWireHeaderSize);
  frame.resize(kWireHeaderSize + len);
  if (len > 0 && recv_exact(fd, frame.data() + kWireHeaderSize, len, false) <= 0)
    raise(Err::LengthMismatch, "connection died mid-frame");
  return decode(frame);
}

bool write_frame(int fd, const WireMessage& msg) {
  const auto bytes = encode(msg);
  size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += size_t(n);
  }
  return true;
}

std::pair<std::string, uint16_t> parse_address(const std::string& address) {
  const auto colon = address.find_last_of(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
    raise(Err::BadConfig, "address must be host:port, got '" + address + "'");
  const std::string host = address.substr(0, colon);
  int port = -1;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535)
    raise(Err::BadConfig, "port out of range in '" + address + "'");
  return {host, uint16_t(port)};
}

}  // namespace radmon::net
