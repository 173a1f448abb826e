#include "radmon/harness/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "radmon/dsp/range_profile.hpp"
#include "radmon/dsp/spectrogram.hpp"
#include "radmon/errors.hpp"
#include "radmon/rng.hpp"
#include "radmon/sim/radar_cube.hpp"
#include "radmon/sim/simulator.hpp"

namespace radmon::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Frames simulated per processing chunk. Chunking only bounds memory; the
// sample stream and the resulting spectrogram are identical to a single pass.
constexpr int kChunkFrames = 64;

std::vector<sim::Activity> all_classes() {
  std::vector<sim::Activity> v;
  for (int i = 0; i < sim::kNumActivities; ++i) v.push_back(static_cast<sim::Activity>(i));
  return v;
}

// Folds frames into the slow-time sample stream one chunk at a time so the
// full IQ cube never has to exist in memory.
class ChunkReducer {
 public:
  explicit ChunkReducer(const sim::ChirpConfig& cfg) {
    chunk_.config = cfg;
    chunk_.data.resize(chunk_.frame_size() * kChunkFrames);
  }

  void add(const sim::cf32* frame, double start_time_ms) {
    if (queued_ == 0) chunk_.start_time_ms = start_time_ms;
    std::copy(frame, frame + chunk_.frame_size(), chunk_.frame(queued_));
    if (++queued_ == kChunkFrames) flush();
  }

  dsp::JTFSpectrogram finish() {
    flush();
    return dsp::stft(series_);
  }

 private:
  void flush() {
    if (queued_ == 0) return;
    chunk_.num_frames = queued_;
    chunk_.data.resize(chunk_.frame_size() * queued_);
    auto profile = dsp::clutter_removal(dsp::range_fft(chunk_));
    auto part = dsp::coherent_accumulate(profile);
    if (series_.samples.empty()) {
      series_ = std::move(part);
    } else {
      series_.samples.insert(series_.samples.end(), part.samples.begin(), part.samples.end());
    }
    queued_ = 0;
    chunk_.data.resize(chunk_.frame_size() * kChunkFrames);
  }

  sim::RadarCube chunk_;
  dsp::SlowTimeSeries series_;
  int queued_ = 0;
};

dsp::JTFSpectrogram segment_spectrogram(const sim::ChirpConfig& cfg,
                                        const sim::MotionScript& script, uint64_t seed,
                                        int num_frames) {
  ChunkReducer reducer(cfg);
  sim::stream_frames(cfg, script, seed, num_frames, 0.0, [&](const sim::FrameView& f) {
    reducer.add(f.data, f.start_time_ms);
    return true;
  });
  return reducer.finish();
}

std::string window_filename(int subject, int session, const std::string& label, int index) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "u%d_s%d_%s_%04d.jtf0", subject, session, label.c_str(), index);
  return buf;
}

}  // namespace

dsp::JTFSpectrogram process_recording(const std::string& rcub_path) {
  sim::RcubReader reader(rcub_path);
  ChunkReducer reducer(reader.config());
  std::vector<sim::cf32> frame(sim::RadarCube{reader.config()}.frame_size());
  const double period_ms = reader.config().frame_period_s * 1e3;
  for (int f = 0; f < reader.num_frames(); ++f) {
    reader.read_frame(frame.data());
    reducer.add(frame.data(), reader.start_time_ms() + f * period_ms);
  }
  return reducer.finish();
}

std::vector<WindowRef> generate_corpus(const CorpusSpec& spec, const std::string& out_dir,
                                       const std::string& manifest_path) {
  spec.chirp.validate();
  if (spec.subjects < 1 || spec.sessions < 1 || spec.minutes_per_class <= 0 || spec.stride < 1)
    raise(Err::BadConfig, "corpus shape must be positive");
  const auto classes = spec.classes.empty() ? all_classes() : spec.classes;
  const auto dp = sim::derive_params(spec.chirp);
  const double segment_s = spec.minutes_per_class * 60.0 / spec.sessions;
  const int frames = static_cast<int>(segment_s / spec.chirp.frame_period_s + 1e-9);
  if (frames < 1) raise(Err::BadConfig, "segment shorter than one frame");

  fs::create_directories(out_dir);
  std::vector<WindowRef> refs;
  for (int subject = 0; subject < spec.subjects; ++subject) {
    const auto profile = sim::SubjectProfile::from_id(subject);
    for (int session = 0; session < spec.sessions; ++session) {
      for (size_t ci = 0; ci < classes.size(); ++ci) {
        const uint64_t script_seed = derive_seed(spec.seed, subject, session,
                                                 static_cast<uint64_t>(classes[ci]));
        const auto script =
            sim::make_script(classes[ci], segment_s, script_seed, dp, profile);
        auto spec_jtf =
            segment_spectrogram(spec.chirp, script, derive_seed(script_seed, 1), frames);
        const std::string label = sim::activity_name(classes[ci]);
        spec_jtf.label = label;
        spec_jtf.subject_id = subject;
        spec_jtf.session_id = session;
        const auto windows = dsp::frame_windows(spec_jtf, spec.stride);
        for (size_t wi = 0; wi < windows.size(); ++wi) {
          dsp::JTFSpectrogram w;
          w.num_columns = dsp::kWindowColumns;
          w.column_period_ms = spec_jtf.column_period_ms;
          w.v_max_mps = spec_jtf.v_max_mps;
          w.start_time_ms = windows[wi].start_time_ms;
          w.label = label;
          w.subject_id = subject;
          w.session_id = session;
          w.values = windows[wi].values;
          const std::string name =
              window_filename(subject, session, label, static_cast<int>(wi));
          w.save((fs::path(out_dir) / name).string());
          refs.push_back({name, label, subject, session});
        }
      }
    }
  }

  write_manifest(refs, manifest_path);
  // Re-read so the caller gets paths resolved exactly as a later run would.
  return read_manifest(manifest_path);
}

void write_manifest(const std::vector<WindowRef>& refs, const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Err::BadFile, "cannot write manifest " + path);
  for (const auto& r : refs) {
    fs::path p(r.path);
    std::error_code ec;
    const fs::path rel = p.is_absolute() ? fs::relative(p, base, ec) : p;
    json line = {{"path", (ec || rel.empty()) ? p.string() : rel.string()},
                 {"label", r.label},
                 {"subject", r.subject},
                 {"session", r.session}};
    out << line.dump() << "\n";
  }
  if (!out.flush()) raise(Err::BadFile, "short write on manifest " + path);
}

std::vector<WindowRef> read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Err::BadFile, "cannot open manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<WindowRef> refs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      WindowRef r;
      fs::path p(j.at("path").get<std::string>());
      r.path = (p.is_absolute() ? p : base / p).string();
      r.label = j.at("label").get<std::string>();
      r.subject = j.at("subject").get<int>();
      r.session = j.at("session").get<int>();
      refs.push_back(std::move(r));
    } catch (const json::exception& e) {
      raise(Err::BadFile, "manifest " + path + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return refs;
}

Split split_from_string(const std::string& name) {
  if (name == "session-independent") return Split::SessionIndependent;
  if (name == "unseen-subject") return Split::UnseenSubject;
  raise(Err::BadConfig, "unknown split " + name);
}

const char* split_name(Split s) {
  return s == Split::SessionIndependent ? "session-independent" : "unseen-subject";
}

namespace {

gru::Example load_example(const WindowRef& ref, int label_index) {
  auto w = dsp::JTFSpectrogram::load(ref.path);
  if (w.num_columns != dsp::kWindowColumns ||
      w.values.size() != static_cast<size_t>(dsp::kWindowColumns) * dsp::kDopplerBins)
    raise(Err::ConfigMismatch, ref.path + " is not a model input window");
  gru::Example ex;
  ex.x = std::move(w.values);
  ex.label = label_index;
  return ex;
}

}  // namespace

LabeledSets load_split(const std::vector<WindowRef>& refs, Split split) {
  if (refs.empty()) raise(Err::BadConfig, "manifest has no windows");

  // Canonical label order follows the activity enum so every corpus with the
  // same class set yields the same index assignment.
  std::map<int, std::string> ordered;
  for (const auto& r : refs)
    ordered[static_cast<int>(sim::activity_from_string(r.label))] = r.label;
  LabeledSets out;
  std::unordered_map<std::string, int> index;
  for (const auto& [_, name] : ordered) {
    index[name] = static_cast<int>(out.class_names.size());
    out.class_names.push_back(name);
  }

  std::set<int> sessions, subjects;
  for (const auto& r : refs) {
    sessions.insert(r.session);
    subjects.insert(r.subject);
  }

  int test_session = -1, test_subject = -1, val_session = -1;
  if (split == Split::SessionIndependent) {
    if (sessions.size() < 2) raise(Err::BadConfig, "session-independent split needs >= 2 sessions");
    test_session = *sessions.rbegin();
    if (sessions.size() > 2) val_session = *std::next(sessions.rbegin());
  } else {
    if (subjects.size() < 2) raise(Err::BadConfig, "unseen-subject split needs >= 2 subjects");
    test_subject = *subjects.rbegin();
    std::set<int> train_sessions;
    for (const auto& r : refs)
      if (r.subject != test_subject) train_sessions.insert(r.session);
    if (train_sessions.size() > 1) val_session = *train_sessions.rbegin();
  }

  for (const auto& r : refs) {
    const bool is_test =
        split == Split::SessionIndependent ? r.session == test_session : r.subject == test_subject;
    auto ex = load_example(r, index.at(r.label));
    if (is_test) {
      out.test.push_back(std::move(ex));
    } else if (r.session == val_session) {
      out.val.push_back(std::move(ex));
    } else {
      out.train.push_back(std::move(ex));
    }
  }
  if (out.val.empty()) out.val = out.train;  // nothing left to hold out
  if (out.train.empty() || out.test.empty())
    raise(Err::BadConfig, "split leaves an empty train or test set");
  return out;
}

EvalMetrics evaluate_model(const gru::GruModel& model, const gru::Dataset& test) {
  const int n = static_cast<int>(model.class_names.size());
  EvalMetrics m;
  m.count = static_cast<int>(test.size());
  m.confusion.assign(n, std::vector<int>(n, 0));
  for (const auto& ex : test) {
    if (ex.label < 0 || ex.label >= n) raise(Err::ConfigMismatch, "label outside model classes");
    const auto pred = gru::predict(model, ex.x.data(), ex.x.size());
    m.confusion[ex.label][pred.class_index] += 1;
  }

  int correct = 0;
  for (int c = 0; c < n; ++c) correct += m.confusion[c][c];
  m.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / test.size();

  m.precision.assign(n, 0.0);
  m.recall.assign(n, 0.0);
  m.f1.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    int col = 0, row = 0;
    for (int t = 0; t < n; ++t) {
      col += m.confusion[t][c];
      row += m.confusion[c][t];
    }
    m.precision[c] = col ? static_cast<double>(m.confusion[c][c]) / col : 0.0;
    m.recall[c] = row ? static_cast<double>(m.confusion[c][c]) / row : 0.0;
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
  }

  const auto it = std::find(model.class_names.begin(), model.class_names.end(),
                            sim::activity_name(sim::Activity::Walking));
  if (it != model.class_names.end()) {
    const int w = static_cast<int>(it - model.class_names.begin());
    int false_walk = 0, non_walk = 0;
    for (int t = 0; t < n; ++t) {
      if (t == w) continue;
      for (int p = 0; p < n; ++p) non_walk += m.confusion[t][p];
      false_walk += m.confusion[t][w];
    }
    m.walking_fpr = non_walk ? static_cast<double>(false_walk) / non_walk : 0.0;
  }
  return m;
}

std::string metrics_to_json(const EvalMetrics& m, const std::vector<std::string>& class_names) {
  json j = {{"v", 1},
            {"count", m.count},
            {"accuracy", m.accuracy},
            {"class_names", class_names},
            {"confusion", m.confusion},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"walking_fpr", m.walking_fpr}};
  return j.dump(2);
}

}  // namespace radmon::harness
