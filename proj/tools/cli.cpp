#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radmon/errors.hpp"
#include "radmon/harness/harness.hpp"
#include "radmon/net/edge.hpp"
#include "radmon/net/process_config.hpp"
#include "radmon/net/service.hpp"
#include "radmon/pad/presence.hpp"
#include "radmon/rng.hpp"
#include "radmon/sim/radar_cube.hpp"
#include "radmon/sim/simulator.hpp"
#include "radmon/status/status.hpp"

namespace radmon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_config() {
  return std::string(RADMON_DEFAULT_CONFIG_DIR) + "/ti_awr1443.json";
}

sim::Activity parse_activity(const std::string& s) {
  auto lower = [](std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    return v;
  };
  const std::string want = lower(s);
  for (int i = 0; i < sim::kNumActivities; ++i) {
    const auto a = static_cast<sim::Activity>(i);
    if (want == lower(sim::activity_name(a))) return a;
  }
  raise(Err::UnknownActivity, s);
}

// "all", "four", or a comma-separated activity list.
std::vector<sim::Activity> parse_classes(const std::string& s) {
  if (s == "all" || s == "six" || s.empty()) return {};
  if (s == "four")
    return {sim::Activity::Empty, sim::Activity::Sedentary, sim::Activity::InPlaceMovement,
            sim::Activity::Walking};
  std::vector<sim::Activity> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_activity(item));
  }
  if (out.empty()) raise(Err::BadConfig, "no classes in " + s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(Err::BadFile, "cannot write " + path);
  f << text;
  if (!f.flush()) raise(Err::BadFile, "short write on " + path);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"room-level radar activity monitor"};
  app.require_subcommand(1);

  // --- params ---------------------------------------------------------
  std::string params_config = default_config();
  auto* params = app.add_subcommand("params", "print derived radar parameters");
  params->add_option("--config", params_config, "chirp config JSON");
  params->callback([&]() {
    const auto cfg = sim::ChirpConfig::from_json_file(params_config);
    out << sim::derive_params(cfg).to_json_text() << "\n";
  });

  // --- simulate -------------------------------------------------------
  struct {
    std::string config, activity = "Empty", out_path = "capture.rcub";
    double duration = 1.0;
    uint64_t seed = 1;
    int subject = 0;
  } sim_opt;
  sim_opt.config = default_config();
  auto* simulate = app.add_subcommand("simulate", "record a synthetic capture to an RCUB file");
  simulate->add_option("--config", sim_opt.config, "chirp config JSON");
  simulate->add_option("--activity", sim_opt.activity, "scene class, e.g. empty or walking");
  simulate->add_option("--duration", sim_opt.duration, "seconds")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_opt.seed, "drives both the scene and the noise");
  simulate->add_option("--subject", sim_opt.subject, "subject id for the motion templates")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", sim_opt.out_path, "output RCUB path");
  simulate->callback([&]() {
    const auto cfg = sim::ChirpConfig::from_json_file(sim_opt.config);
    const auto dp = sim::derive_params(cfg);
    const auto script = sim::make_script(parse_activity(sim_opt.activity), sim_opt.duration,
                                         sim_opt.seed, dp, sim::SubjectProfile::from_id(sim_opt.subject));
    const int frames = static_cast<int>(sim_opt.duration / cfg.frame_period_s + 1e-9);
    if (frames < 1) raise(Err::BadConfig, "duration shorter than one frame");
    sim::RcubWriter writer(sim_opt.out_path, cfg, frames, 0.0);
    sim::stream_frames(cfg, script, sim_opt.seed, frames, 0.0, [&](const sim::FrameView& f) {
      writer.append_frame(f.data);
      return true;
    });
    writer.close();
    out << json{{"frames", frames}, {"path", sim_opt.out_path}}.dump() << "\n";
  });

  // --- process --------------------------------------------------------
  struct {
    std::string in_path, out_path = "capture.jtf0";
  } proc_opt;
  auto* process = app.add_subcommand("process", "reduce an RCUB capture to a JTF0 spectrogram");
  process->add_option("--in", proc_opt.in_path, "input RCUB path")->required();
  process->add_option("--out", proc_opt.out_path, "output JTF0 path");
  process->callback([&]() {
    const auto spec = harness::process_recording(proc_opt.in_path);
    spec.save(proc_opt.out_path);
    out << json{{"columns", spec.num_columns}, {"path", proc_opt.out_path}}.dump() << "\n";
  });

  // --- dataset --------------------------------------------------------
  struct {
    std::string config, out_dir = "corpus", manifest, classes = "all";
    int subjects = 2, sessions = 5, stride = 10;
    double minutes_per_class = 8.0;
    uint64_t seed = 1;
  } ds_opt;
  ds_opt.config = default_config();
  auto* dataset = app.add_subcommand("dataset", "generate a labelled window corpus + manifest");
  dataset->add_option("--config", ds_opt.config, "chirp config JSON");
  dataset->add_option("--out-dir", ds_opt.out_dir, "directory for window files");
  dataset->add_option("--manifest", ds_opt.manifest, "manifest path (default out-dir/manifest.jsonl)");
  dataset->add_option("--subjects", ds_opt.subjects)->check(CLI::PositiveNumber);
  dataset->add_option("--sessions", ds_opt.sessions)->check(CLI::PositiveNumber);
  dataset->add_option("--minutes-per-class", ds_opt.minutes_per_class,
                      "per subject, split across sessions")
      ->check(CLI::PositiveNumber);
  dataset->add_option("--classes", ds_opt.classes, "all, four, or a comma-separated list");
  dataset->add_option("--stride", ds_opt.stride, "window hop in columns")->check(CLI::PositiveNumber);
  dataset->add_option("--seed", ds_opt.seed);
  dataset->callback([&]() {
    harness::CorpusSpec spec;
    spec.chirp = sim::ChirpConfig::from_json_file(ds_opt.config);
    spec.classes = parse_classes(ds_opt.classes);
    spec.subjects = ds_opt.subjects;
    spec.sessions = ds_opt.sessions;
    spec.minutes_per_class = ds_opt.minutes_per_class;
    spec.stride = ds_opt.stride;
    spec.seed = ds_opt.seed;
    const std::string manifest =
        ds_opt.manifest.empty() ? (fs::path(ds_opt.out_dir) / "manifest.jsonl").string()
                                : ds_opt.manifest;
    const auto refs = harness::generate_corpus(spec, ds_opt.out_dir, manifest);
    out << json{{"windows", refs.size()}, {"manifest", manifest}}.dump() << "\n";
  });

  // --- train ----------------------------------------------------------
  struct {
    std::string manifest, split = "session-independent", out_path = "model.grum", metrics;
    int layers = 2, hidden = 32, epochs = 20, batch = 512, plateau = 20;
    double lr = 0.01;
    uint64_t seed = 7;
  } tr_opt;
  auto* train_cmd = app.add_subcommand("train", "train a classifier from a manifest");
  train_cmd->add_option("--manifest", tr_opt.manifest)->required();
  train_cmd->add_option("--split", tr_opt.split, "session-independent or unseen-subject");
  train_cmd->add_option("--out", tr_opt.out_path, "output GRUM path");
  train_cmd->add_option("--metrics", tr_opt.metrics, "write training curves as JSON");
  train_cmd->add_option("--layers", tr_opt.layers)->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden", tr_opt.hidden)->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", tr_opt.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", tr_opt.batch)->check(CLI::PositiveNumber);
  train_cmd->add_option("--plateau", tr_opt.plateau)->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", tr_opt.lr)->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", tr_opt.seed);
  train_cmd->callback([&]() {
    const auto sets =
        harness::load_split(harness::read_manifest(tr_opt.manifest),
                            harness::split_from_string(tr_opt.split));
    auto model = gru::make_model(dsp::kDopplerBins, dsp::kWindowColumns,
                                 std::vector<int>(tr_opt.layers, tr_opt.hidden), {},
                                 sets.class_names, tr_opt.seed);
    gru::TrainConfig tc;
    tc.learning_rate = tr_opt.lr;
    tc.batch_size = tr_opt.batch;
    tc.epochs = tr_opt.epochs;
    tc.seed = tr_opt.seed;
    tc.plateau_epochs = tr_opt.plateau;
    const auto tm = gru::train(model, sets.train, sets.val, tc);
    gru::save_model(model, tr_opt.out_path);
    const json summary = {{"v", 1},
                          {"split", tr_opt.split},
                          {"class_names", sets.class_names},
                          {"train_loss", tm.train_loss},
                          {"train_accuracy", tm.train_accuracy},
                          {"val_loss", tm.val_loss},
                          {"val_accuracy", tm.val_accuracy},
                          {"best_epoch", tm.best_epoch},
                          {"epochs_run", tm.epochs_run}};
    if (!tr_opt.metrics.empty()) write_text(tr_opt.metrics, summary.dump(2) + "\n");
    out << json{{"epochs_run", tm.epochs_run},
                {"val_accuracy", tm.val_accuracy.empty() ? 0.0 : tm.val_accuracy.back()},
                {"model", tr_opt.out_path}}
               .dump()
        << "\n";
  });

  // --- eval -----------------------------------------------------------
  struct {
    std::string manifest, split = "session-independent", model, out_path;
  } ev_opt;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a manifest's test split");
  eval_cmd->add_option("--manifest", ev_opt.manifest)->required();
  eval_cmd->add_option("--split", ev_opt.split, "session-independent or unseen-subject");
  eval_cmd->add_option("--model", ev_opt.model)->required();
  eval_cmd->add_option("--out", ev_opt.out_path, "also write the metrics JSON here");
  eval_cmd->callback([&]() {
    const auto sets =
        harness::load_split(harness::read_manifest(ev_opt.manifest),
                            harness::split_from_string(ev_opt.split));
    const auto model = gru::load_model(ev_opt.model);
    if (model.class_names != sets.class_names)
      raise(Err::ConfigMismatch, "model classes differ from the manifest's");
    const auto metrics = harness::evaluate_model(model, sets.test);
    const std::string text = harness::metrics_to_json(metrics, sets.class_names);
    if (!ev_opt.out_path.empty()) write_text(ev_opt.out_path, text + "\n");
    out << text << "\n";
  });

  // --- serve ----------------------------------------------------------
  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "run the aggregation service");
  serve_cmd->add_option("--config", serve_config, "process config JSON")->required();
  serve_cmd->callback([&]() {
    const auto pc = net::load_process_config(serve_config);
    net::ServiceConfig sc;
    sc.bind_address = pc.bind_address;
    sc.report_address = pc.report_address;
    sc.model_path = pc.model_path;
    sc.store_path = pc.store_path;
    net::TelemetryService svc(sc);
    svc.start();
    out << json{{"telemetry_port", svc.telemetry_port()}, {"report_port", svc.report_port()}}.dump()
        << std::endl;
    svc.wait();
  });

  // --- edge -----------------------------------------------------------
  struct {
    std::string config, cube;
    bool loop = false, calibrate = false;
    int horizon_frames = 10;
    int pace_ms = 0;
  } edge_opt;
  auto* edge_cmd = app.add_subcommand("edge", "replay a capture through an edge node");
  edge_cmd->add_option("--config", edge_opt.config, "process config JSON")->required();
  edge_cmd->add_option("--cube", edge_opt.cube, "RCUB capture to replay")->required();
  edge_cmd->add_flag("--loop", edge_opt.loop, "replay the capture forever");
  edge_cmd->add_flag("--calibrate", edge_opt.calibrate,
                     "treat the capture as an empty room and write the calibration");
  edge_cmd->add_option("--horizon-frames", edge_opt.horizon_frames)->check(CLI::PositiveNumber);
  edge_cmd->add_option("--pace-ms", edge_opt.pace_ms,
                       "wall milliseconds per horizon, 0 replays at full speed")
      ->check(CLI::NonNegativeNumber);
  edge_cmd->callback([&]() {
    const auto pc = net::load_process_config(edge_opt.config);
    if (edge_opt.calibrate) {
      const auto cube = sim::RadarCube::load(edge_opt.cube);
      pad::ThresholdConfig thr;
      thr.kappa = pc.kappa;
      thr.horizon_frames = edge_opt.horizon_frames;
      const auto cal =
          pad::calibrate_empty(pad::room_from_string(pc.room), {dsp::range_fft(cube)}, thr);
      const auto sidecar = fs::path(pc.calibration_path).replace_extension(".coupling.bin");
      cal.save(pc.calibration_path, sidecar.string());
      out << json{{"baseline_mean", cal.baseline_mean},
                  {"baseline_std", cal.baseline_std},
                  {"path", pc.calibration_path}}
                 .dump()
          << "\n";
      return;
    }
    const auto stats = net::edge_run(pc, edge_opt.cube, edge_opt.loop, edge_opt.pace_ms);
    out << json{{"presence", stats.presence},
                {"jtf", stats.jtf},
                {"heartbeats", stats.heartbeats},
                {"delivered", stats.delivered},
                {"dropped", stats.dropped},
                {"reconnect_attempts", stats.reconnect_attempts}}
               .dump()
        << "\n";
  });

  // --- report ---------------------------------------------------------
  struct {
    std::string store, date;
  } rep_opt;
  auto* report_cmd = app.add_subcommand("report", "fold an event log into a daily report");
  report_cmd->add_option("--store", rep_opt.store, "event log path")->required();
  report_cmd->add_option("--date", rep_opt.date, "UTC day, YYYY-MM-DD")->required();
  report_cmd->callback([&]() {
    const auto events = status::EventStore::read_all(rep_opt.store);
    out << status::accumulate_report(events, rep_opt.date).to_json() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  } catch (const radmon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Err::BadFile ? 2 : 3;
  }
  return 0;
}

}  // namespace radmon::cli
