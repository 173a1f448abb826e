#include "radmon/sim/radar_cube.hpp"

#include "internal/binfile.hpp"

namespace radmon::sim {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'U', 'B'};

io::json make_header(const ChirpConfig& c, int num_frames, double start_time_ms) {
  return io::json{{"format_version", io::kFormatVersion},
                  {"f0_hz", c.f0_hz},
                  {"slope_hz_per_s", c.slope_hz_per_s},
                  {"bandwidth_hz", c.bandwidth_hz},
                  {"fs_hz", c.fs_hz},
                  {"samples_per_chirp", c.samples_per_chirp},
                  {"chirps_per_frame", c.chirps_per_frame},
                  {"num_channels", c.num_channels},
                  {"num_frames", num_frames},
                  {"frame_period_s", c.frame_period_s},
                  {"chirp_period_s", c.chirp_period_s},
                  {"start_time_ms", start_time_ms}};
}

struct ParsedHeader {
  ChirpConfig config;
  int num_frames = 0;
  double start_time_ms = 0;
};

ParsedHeader parse_header(const io::json& h, const std::string& path) {
  io::check_format_version(h, path);
  ParsedHeader p;
  ChirpConfig& c = p.config;
  c.f0_hz = io::header_get<double>(h, "f0_hz", path);
  c.slope_hz_per_s = io::header_get<double>(h, "slope_hz_per_s", path);
  c.bandwidth_hz = io::header_get<double>(h, "bandwidth_hz", path);
  c.fs_hz = io::header_get<double>(h, "fs_hz", path);
  c.samples_per_chirp = io::header_get<int>(h, "samples_per_chirp", path);
  c.chirps_per_frame = io::header_get<int>(h, "chirps_per_frame", path);
  c.num_channels = io::header_get<int>(h, "num_channels", path);
  c.frame_period_s = io::header_get<double>(h, "frame_period_s", path);
  c.chirp_period_s = io::header_get<double>(h, "chirp_period_s", path);
  p.num_frames = io::header_get<int>(h, "num_frames", path);
  p.start_time_ms = io::header_get<double>(h, "start_time_ms", path);
  c.validate();
  if (p.num_frames < 0) raise(Err::BadFile, "negative num_frames in " + path);
  return p;
}

}  // namespace

void RadarCube::save(const std::string& path) const {
  RcubWriter w(path, config, num_frames, start_time_ms);
  for (int f = 0; f < num_frames; ++f) w.append_frame(frame(f));
  w.close();
}

RadarCube RadarCube::load(const std::string& path) {
  RcubReader r(path);
  RadarCube cube;
  cube.config = r.config();
  cube.num_frames = r.num_frames();
  cube.start_time_ms = r.start_time_ms();
  const size_t total = cube.frame_size() * cube.num_frames;
  if (total * sizeof(cf32) > (3ULL << 30)) raise(Err::BadFile, "cube too large to load: " + path);
  cube.data.resize(total);
  for (int f = 0; f < cube.num_frames; ++f) r.read_frame(cube.frame(f));
  return cube;
}

struct RcubWriter::Impl {
  io::ChunkWriter w;
  size_t frame_floats;
  int frames_left;
  Impl(const std::string& path, const ChirpConfig& cfg, int num_frames, double start_ms)
      : w(path, kMagic, make_header(cfg, num_frames, start_ms)),
        frame_floats(static_cast<size_t>(cfg.chirps_per_frame) * cfg.num_channels *
                     cfg.samples_per_chirp * 2),
        frames_left(num_frames) {}
};

RcubWriter::RcubWriter(const std::string& path, const ChirpConfig& cfg, int num_frames,
                       double start_time_ms) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(path, cfg, num_frames, start_time_ms);
}

RcubWriter::~RcubWriter() = default;

void RcubWriter::append_frame(const cf32* frame_data) {
  if (impl_->frames_left <= 0) raise(Err::BadFile, "more frames appended than declared");
  impl_->w.append(reinterpret_cast<const float*>(frame_data), impl_->frame_floats);
  --impl_->frames_left;
}

void RcubWriter::close() {
  if (impl_->frames_left != 0)
    raise(Err::BadFile, "fewer frames appended than declared (" +
                            std::to_string(impl_->frames_left) + " missing)");
  impl_->w.close();
}

struct RcubReader::Impl {
  io::ChunkReader r;
  ParsedHeader h;
  size_t frame_floats;
  Impl(const std::string& path)
      : r(path, kMagic), h(parse_header(r.header(), path)),
        frame_floats(static_cast<size_t>(h.config.chirps_per_frame) * h.config.num_channels *
                     h.config.samples_per_chirp * 2) {
    if (r.remaining() != frame_floats * h.num_frames)
      raise(Err::BadFile, "payload size does not match header dims: " + path);
  }
};

RcubReader::RcubReader(const std::string& path) : impl_(std::make_unique<Impl>(path)) {}
RcubReader::~RcubReader() = default;

const ChirpConfig& RcubReader::config() const { return impl_->h.config; }
int RcubReader::num_frames() const { return impl_->h.num_frames; }
double RcubReader::start_time_ms() const { return impl_->h.start_time_ms; }

void RcubReader::read_frame(cf32* frame_data) {
  impl_->r.read(reinterpret_cast<float*>(frame_data), impl_->frame_floats);
}

}  // namespace radmon::sim
