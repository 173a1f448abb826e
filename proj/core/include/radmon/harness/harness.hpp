#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radmon/dsp/spectrogram.hpp"
#include "radmon/gru/gru.hpp"
#include "radmon/sim/chirp_config.hpp"
#include "radmon/sim/motion.hpp"

namespace radmon::harness {

// Offline Doppler chain (range FFT, clutter removal, coherent accumulation,
// STFT) over a recorded cube file, in bounded memory.
dsp::JTFSpectrogram process_recording(const std::string& rcub_path);

// One labelled window on disk. `path` is stored relative to the manifest;
// read_manifest resolves it so the returned refs are directly loadable.
struct WindowRef {
  std::string path;
  std::string label;
  int subject = 0;
  int session = 0;
};

struct CorpusSpec {
  sim::ChirpConfig chirp;
  std::vector<sim::Activity> classes;  // empty selects all six
  int subjects = 2;
  int sessions = 5;
  double minutes_per_class = 8.0;  // per subject, split evenly across sessions
  int stride = 10;                 // window hop in spectrogram columns
  uint64_t seed = 1;
};

// Simulates every (subject, session, class) segment, runs the Doppler chain,
// and writes one JTF0 file per window under out_dir plus a JSON-lines
// manifest. Fully deterministic for a given spec.
std::vector<WindowRef> generate_corpus(const CorpusSpec& spec, const std::string& out_dir,
                                       const std::string& manifest_path);

void write_manifest(const std::vector<WindowRef>& refs, const std::string& path);
std::vector<WindowRef> read_manifest(const std::string& path);

enum class Split { SessionIndependent, UnseenSubject };

Split split_from_string(const std::string& name);
const char* split_name(Split s);

struct LabeledSets {
  gru::Dataset train, val, test;
  std::vector<std::string> class_names;  // label-index order, canonical
};

// Session-independent: the highest session id is the test set; the highest
// remaining session is held out for validation. Unseen-subject: the highest
// subject id is the test set and validation takes the highest session of the
// remaining subjects. When only one session is left for training the
// validation set aliases the training set rather than touching test data.
LabeledSets load_split(const std::vector<WindowRef>& refs, Split split);

struct EvalMetrics {
  int count = 0;
  double accuracy = 0;
  std::vector<std::vector<int>> confusion;  // [truth][predicted]
  std::vector<double> precision, recall, f1;
  double walking_fpr = 0;  // share of non-walking windows predicted walking
};

EvalMetrics evaluate_model(const gru::GruModel& model, const gru::Dataset& test);

std::string metrics_to_json(const EvalMetrics& m, const std::vector<std::string>& class_names);

}  // namespace radmon::harness
