#pragma once

// Shared layout for the binary container formats: 4-byte magic, u32 LE
// header length, UTF-8 JSON header, then a float32 LE payload. Internal to
// the library; each format wraps this with its own schema.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radmon/errors.hpp"

namespace radmon::io {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Streaming writer: header is fixed at open time, payload appended in chunks.
class ChunkWriter {
 public:
  ChunkWriter(const std::string& path, const char magic[4], const json& header);
  ~ChunkWriter();

  void append(const float* data, size_t count);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  bool open_ = false;
};

class ChunkReader {
 public:
  ChunkReader(const std::string& path, const char magic[4]);

  const json& header() const { return header_; }
  // Number of float32 values remaining in the payload.
  uint64_t remaining() const { return remaining_; }
  void read(float* data, size_t count);
  std::vector<float> read_all();

 private:
  std::ifstream in_;
  std::string path_;
  json header_;
  uint64_t remaining_ = 0;
};

void write_chunk_file(const std::string& path, const char magic[4], const json& header,
                      const float* payload, size_t count);

// Convenience for required header fields; throws BadFile with context.
template <typename T>
T header_get(const json& h, const char* key, const std::string& path) {
  auto it = h.find(key);
  if (it == h.end()) raise(Err::BadFile, std::string("missing header field '") + key + "' in " + path);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    raise(Err::BadFile, std::string("bad header field '") + key + "' in " + path);
  }
}

void check_format_version(const json& h, const std::string& path);

}  // namespace radmon::io
