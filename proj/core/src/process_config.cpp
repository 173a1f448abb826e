#include "radmon/net/process_config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radmon/errors.hpp"

namespace radmon::net {

namespace {

using nlohmann::json;

const char* kKnownKeys[] = {"room",       "rooms",          "bind_address",
                            "report_address", "connect_address", "model_path",
                            "store_path", "calibration_path", "kappa",
                            "stride"};

std::string upper_snake(const std::string& key) {
  std::string out = key;
  for (char& c : out) c = char(std::toupper(uint8_t(c)));
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void apply(ProcessConfig& cfg, const std::string& key, const json& v) {
  try {
    if (key == "room") cfg.room = v.get<std::string>();
    else if (key == "rooms") cfg.rooms = v.get<std::vector<std::string>>();
    else if (key == "bind_address") cfg.bind_address = v.get<std::string>();
    else if (key == "report_address") cfg.report_address = v.get<std::string>();
    else if (key == "connect_address") cfg.connect_address = v.get<std::string>();
    else if (key == "model_path") cfg.model_path = v.get<std::string>();
    else if (key == "store_path") cfg.store_path = v.get<std::string>();
    else if (key == "calibration_path") cfg.calibration_path = v.get<std::string>();
    else if (key == "kappa") cfg.kappa = v.get<double>();
    else if (key == "stride") cfg.stride = v.get<int>();
    else raise(Err::BadConfig, "unknown process config key '" + key + "'");
  } catch (const json::exception& e) {
    raise(Err::BadConfig, "bad value for '" + key + "': " + e.what());
  }
}

void validate(const ProcessConfig& cfg) {
  if (!(cfg.kappa > 0)) raise(Err::BadConfig, "kappa must be positive");
  if (cfg.stride <= 0) raise(Err::BadConfig, "stride must be positive");
}

}  // namespace

ProcessConfig process_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(Err::BadConfig, std::string("process config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) raise(Err::BadConfig, "process config must be a JSON object");
  ProcessConfig cfg;
  for (const auto& [key, value] : j.items()) apply(cfg, key, value);
  validate(cfg);
  return cfg;
}

ProcessConfig load_process_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Err::BadFile, "cannot read process config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ProcessConfig cfg = process_config_from_json(buf.str());

  for (const char* key : kKnownKeys) {
    const char* env = std::getenv(upper_snake(key).c_str());
    if (!env) continue;
    if (std::string(key) == "rooms") {
      cfg.rooms = split_csv(env);
    } else if (std::string(key) == "kappa" || std::string(key) == "stride") {
      try {
        apply(cfg, key, json::parse(env));
      } catch (const json::exception&) {
        raise(Err::BadConfig, "environment override " + upper_snake(key) +
                                  " is not a number: '" + env + "'");
      }
    } else {
      apply(cfg, key, json(std::string(env)));
    }
  }
  validate(cfg);
  return cfg;
}

}  // namespace radmon::net
