#pragma once

#include <string>
#include <vector>

namespace radmon::net {

// One JSON file per process. Edges read room/connect_address/calibration_path;
// the aggregator reads rooms/bind_address/report_address/model_path/store_path.
// Environment variables override top-level keys by their upper-snake name
// (model_path -> MODEL_PATH and so on).
struct ProcessConfig {
  std::string room = "livingroom";
  std::vector<std::string> rooms = {"bedroom", "livingroom", "washroom"};
  std::string bind_address = "127.0.0.1:7600";
  std::string report_address = "127.0.0.1:7601";
  std::string connect_address = "127.0.0.1:7600";
  std::string model_path;
  std::string store_path;
  std::string calibration_path;
  double kappa = 3.0;
  int stride = 10;
};

// Parse without touching the environment; unknown keys are rejected.
ProcessConfig process_config_from_json(const std::string& json_text);

// File load plus environment overrides.
ProcessConfig load_process_config(const std::string& path);

}  // namespace radmon::net
