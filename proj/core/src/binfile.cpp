#include "internal/binfile.hpp"

#include <bit>
#include <cstring>

namespace radmon::io {

namespace {

// Payloads are float32 little-endian on disk; this code assumes a
// little-endian host (verified at startup of every file operation is
// overkill, a static_assert on the sole supported platform suffices).
static_assert(std::endian::native == std::endian::little, "little-endian host required");

void write_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

}  // namespace

ChunkWriter::ChunkWriter(const std::string& path, const char magic[4], const json& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) raise(Err::BadFile, "cannot open for writing: " + path);
  const std::string h = header.dump();
  if (h.size() > 1u << 24) raise(Err::BadFile, "header too large: " + path);
  out_.write(magic, 4);
  write_u32(out_, static_cast<uint32_t>(h.size()));
  out_.write(h.data(), static_cast<std::streamsize>(h.size()));
  open_ = true;
}

ChunkWriter::~ChunkWriter() {
  if (open_) out_.close();
}

void ChunkWriter::append(const float* data, size_t count) {
  out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
  if (!out_) raise(Err::BadFile, "write failed: " + path_);
}

void ChunkWriter::close() {
  out_.close();
  open_ = false;
  if (out_.fail()) raise(Err::BadFile, "close failed: " + path_);
}

ChunkReader::ChunkReader(const std::string& path, const char magic[4])
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) raise(Err::BadFile, "cannot open: " + path);
  char m[4];
  in_.read(m, 4);
  if (!in_ || std::memcmp(m, magic, 4) != 0) raise(Err::BadMagic, path);
  uint32_t hlen = 0;
  in_.read(reinterpret_cast<char*>(&hlen), 4);
  if (!in_ || hlen > (1u << 24)) raise(Err::BadFile, "bad header length: " + path);
  std::string h(hlen, '\0');
  in_.read(h.data(), hlen);
  if (!in_) raise(Err::BadFile, "truncated header: " + path);
  try {
    header_ = json::parse(h);
  } catch (const json::exception& e) {
    raise(Err::BadFile, "header parse error in " + path + ": " + e.what());
  }
  const auto begin = in_.tellg();
  in_.seekg(0, std::ios::end);
  const auto end = in_.tellg();
  in_.seekg(begin);
  const uint64_t bytes = static_cast<uint64_t>(end - begin);
  if (bytes % 4 != 0) raise(Err::BadFile, "payload not float32-aligned: " + path);
  remaining_ = bytes / 4;
}

void ChunkReader::read(float* data, size_t count) {
  if (count > remaining_) raise(Err::BadFile, "payload shorter than expected: " + path_);
  in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 4));
  if (!in_) raise(Err::BadFile, "read failed: " + path_);
  remaining_ -= count;
}

std::vector<float> ChunkReader::read_all() {
  std::vector<float> v(remaining_);
  read(v.data(), v.size());
  return v;
}

void write_chunk_file(const std::string& path, const char magic[4], const json& header,
                      const float* payload, size_t count) {
  ChunkWriter w(path, magic, header);
  if (count) w.append(payload, count);
  w.close();
}

void check_format_version(const json& h, const std::string& path) {
  const int v = header_get<int>(h, "format_version", path);
  if (v != kFormatVersion)
    raise(Err::BadFile, "unsupported format_version " + std::to_string(v) + " in " + path);
}

}  // namespace radmon::io
