#include <doctest.h>

#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <random>
#include <vector>

#include "radmon/errors.hpp"
#include "radmon/net/wire.hpp"

using namespace radmon;
using namespace radmon::net;

namespace {

WireMessage random_message(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> type_pick(1, 4);
  std::uniform_int_distribution<int> byte_pick(0, 255);
  std::uniform_int_distribution<uint64_t> ts_pick(0, ~0ULL);

  WireMessage m;
  m.type = MsgType(type_pick(rng));
  m.room_id = uint8_t(byte_pick(rng) % 3);
  m.reserved = uint8_t(byte_pick(rng));
  m.timestamp_ms = ts_pick(rng);
  switch (m.type) {
    case MsgType::Presence: m.payload = {uint8_t(byte_pick(rng) % 2)}; break;
    case MsgType::StatusResult:
      m.payload = {uint8_t(byte_pick(rng) % 10), uint8_t(byte_pick(rng) % 101)};
      break;
    case MsgType::JtfWindow: {
      std::vector<float> values(kJtfPayloadBytes / 4);
      std::uniform_real_distribution<float> val(0.f, 1.f);
      for (auto& v : values) v = val(rng);
      m.payload.resize(kJtfPayloadBytes);
      std::memcpy(m.payload.data(), values.data(), kJtfPayloadBytes);
      break;
    }
    case MsgType::Heartbeat: break;
  }
  return m;
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("heartbeat golden bytes") {
  const auto bytes = encode(make_heartbeat(1, 0));
  const uint8_t want[20] = {0x41, 0x49, 0x47, 0x4D, 0x01, 0x04, 0x01, 0x00, 0, 0,
                            0,    0,    0,    0,    0,    0,    0,    0,    0, 0};
  REQUIRE(bytes.size() == 20);
  CHECK(std::memcmp(bytes.data(), want, 20) == 0);
}

TEST_CASE("round-trip identity on 1000 random valid messages") {
  std::mt19937_64 rng(0xA16D);
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_message(rng);
    const auto back = decode(encode(m));
    CHECK(back.version == m.version);
    CHECK(back.type == m.type);
    CHECK(back.room_id == m.room_id);
    CHECK(back.reserved == m.reserved);
    CHECK(back.timestamp_ms == m.timestamp_ms);
    CHECK(back.payload == m.payload);
  }
}

TEST_CASE("integers are little-endian on the wire") {
  auto m = make_presence(2, 0x0102030405060708ULL, true);
  const auto bytes = encode(m);
  CHECK(bytes[8] == 0x08);  // timestamp low byte first
  CHECK(bytes[15] == 0x01);
  CHECK(bytes[16] == 1);  // payload_len = 1
  CHECK(bytes[17] == 0);
}

TEST_CASE("every malformed-frame class maps to its error") {
  const auto good = encode(make_presence(0, 42, false));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  bad_magic[1] = 'X';
  bad_magic[2] = 'X';
  bad_magic[3] = 'X';
  CHECK_THROWS_WITH_AS(decode(bad_magic), doctest::Contains("BadMagic"), Error);

  auto bad_version = good;
  bad_version[4] = 2;
  CHECK_THROWS_WITH_AS(decode(bad_version), doctest::Contains("UnsupportedVersion"), Error);

  auto bad_type = good;
  bad_type[5] = 0x7F;
  CHECK_THROWS_WITH_AS(decode(bad_type), doctest::Contains("UnknownType"), Error);

  auto truncated = good;
  truncated.resize(12);
  CHECK_THROWS_WITH_AS(decode(truncated), doctest::Contains("LengthMismatch"), Error);

  auto lied_length = good;
  lied_length[16] = 7;  // declares 7 bytes, carries 1
  CHECK_THROWS_WITH_AS(decode(lied_length), doctest::Contains("LengthMismatch"), Error);

  auto extra = good;
  extra.push_back(0);  // frame longer than declared
  CHECK_THROWS_WITH_AS(decode(extra), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("encode rejects payloads that do not fit the type") {
  WireMessage m = make_presence(0, 1, true);
  m.payload.push_back(0);
  CHECK_THROWS_WITH_AS(encode(m), doctest::Contains("LengthMismatch"), Error);

  WireMessage unknown;
  unknown.type = MsgType(0x50);
  CHECK_THROWS_WITH_AS(encode(unknown), doctest::Contains("UnknownType"), Error);

  WireMessage old_version = make_heartbeat(0, 0);
  old_version.version = 9;
  CHECK_THROWS_WITH_AS(encode(old_version), doctest::Contains("UnsupportedVersion"), Error);

  std::vector<float> too_few(100, 0.f);
  CHECK_THROWS_WITH_AS(make_jtf(1, 0, too_few.data(), too_few.size()),
                       doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("payload helpers invert the builders") {
  CHECK(presence_occupied(make_presence(0, 5, true)));
  CHECK_FALSE(presence_occupied(make_presence(0, 5, false)));

  const auto [st, conf] = status_result_fields(
      make_status_result(1, 7, status::Status::Walking, 0.734));
  CHECK(st == status::Status::Walking);
  CHECK(conf == doctest::Approx(0.73));  // u8 percent quantization

  std::vector<float> values(kJtfPayloadBytes / 4);
  for (size_t i = 0; i < values.size(); ++i) values[i] = float(i) * 0.25f;
  const auto back = jtf_values(make_jtf(1, 9, values.data(), values.size()));
  CHECK(back == values);

  CHECK_THROWS_AS(presence_occupied(make_heartbeat(0, 0)), Error);
  CHECK_THROWS_AS(jtf_values(make_presence(0, 0, true)), Error);
}

TEST_CASE("framed socket io round-trips and reports stream faults") {
  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);

  std::mt19937_64 rng(0xFACE);
  const auto jtf = random_message(rng);
  REQUIRE(write_frame(fds[0], make_presence(2, 123, true)));
  REQUIRE(write_frame(fds[0], jtf.type == MsgType::JtfWindow
                                  ? jtf
                                  : make_jtf(1, 9, std::vector<float>(12800, 1.f).data(), 12800)));

  const auto first = read_frame(fds[1]);
  REQUIRE(first.has_value());
  CHECK(first->type == MsgType::Presence);
  CHECK(first->timestamp_ms == 123);
  const auto second = read_frame(fds[1]);
  REQUIRE(second.has_value());
  CHECK(second->type == MsgType::JtfWindow);

  ::close(fds[0]);
  CHECK_FALSE(read_frame(fds[1]).has_value());  // clean EOF
  ::close(fds[1]);

  // torn mid-header
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  const uint8_t half[8] = {0x41, 0x49, 0x47, 0x4D, 0x01, 0x04, 0x01, 0x00};
  REQUIRE(::send(fds[0], half, sizeof(half), 0) == ssize_t(sizeof(half)));
  ::close(fds[0]);
  CHECK_THROWS_WITH_AS(read_frame(fds[1]), doctest::Contains("LengthMismatch"), Error);
  ::close(fds[1]);

  // bad magic arrives over the stream
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  auto bytes = encode(make_heartbeat(0, 0));
  bytes[0] = 'Z';
  REQUIRE(::send(fds[0], bytes.data(), bytes.size(), 0) == ssize_t(bytes.size()));
  CHECK_THROWS_WITH_AS(read_frame(fds[1]), doctest::Contains("BadMagic"), Error);
  ::close(fds[0]);
  ::close(fds[1]);

  // write to a closed peer fails instead of raising SIGPIPE
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  ::close(fds[1]);
  write_frame(fds[0], make_heartbeat(0, 0));  // may buffer once
  CHECK_FALSE(write_frame(fds[0], make_heartbeat(0, 0)));
  ::close(fds[0]);
}

TEST_CASE("addresses parse as host:port") {
  const auto [host, port] = parse_address("127.0.0.1:7600");
  CHECK(host == "127.0.0.1");
  CHECK(port == 7600);
  CHECK_THROWS_WITH_AS(parse_address("localhost"), doctest::Contains("BadConfig"), Error);
  CHECK_THROWS_WITH_AS(parse_address(":80"), doctest::Contains("BadConfig"), Error);
  CHECK_THROWS_WITH_AS(parse_address("h:"), doctest::Contains("BadConfig"), Error);
  CHECK_THROWS_WITH_AS(parse_address("h:99999"), doctest::Contains("BadConfig"), Error);
}

}  // TEST_SUITE
