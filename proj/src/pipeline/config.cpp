#include "ddikit/pipeline/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <vector>

#include "ddikit/common/rng.hpp"

namespace ddikit::pipeline {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_uint64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" +
                      value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing junk");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

void apply_config(RunConfig& config, const std::map<std::string, std::string>& kv) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"dataset", [&](const std::string&, const std::string& v) { config.dataset_path = v; }},
      {"setting", [&](const std::string&, const std::string& v) { config.setting = v; }},
      {"folds",
       [&](const std::string& k, const std::string& v) {
         config.folds = static_cast<int>(parse_int(k, v));
       }},
      {"seed",
       [&](const std::string& k, const std::string& v) { config.seed = parse_uint64(k, v); }},
      {"k",
       [&](const std::string& k, const std::string& v) {
         config.k = static_cast<int>(parse_int(k, v));
       }},
      {"method", [&](const std::string&, const std::string& v) { config.method = v; }},
      {"demos",
       [&](const std::string& k, const std::string& v) {
         config.demos = static_cast<int>(parse_int(k, v));
       }},
      {"threads",
       [&](const std::string& k, const std::string& v) {
         config.threads = static_cast<int>(parse_int(k, v));
       }},
      {"parallel_folds",
       [&](const std::string& k, const std::string& v) {
         if (v == "true" || v == "1") {
           config.parallel_folds = true;
         } else if (v == "false" || v == "0") {
           config.parallel_folds = false;
         } else {
           throw ConfigError("config key '" + k + "': expected true/false, got '" + v + "'");
         }
       }},
      {"out_dir", [&](const std::string&, const std::string& v) { config.out_dir = v; }},
      {"bilinear.d",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.d = static_cast<int>(parse_int(k, v));
       }},
      {"bilinear.lr",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.lr = parse_double(k, v);
       }},
      {"bilinear.epochs",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.epochs = static_cast<int>(parse_int(k, v));
       }},
      {"bilinear.batch_size",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.batch_size = static_cast<int>(parse_int(k, v));
       }},
      {"bilinear.patience",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.patience = static_cast<int>(parse_int(k, v));
       }},
      {"bilinear.gen_loss",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.gen_loss = parse_double(k, v);
       }},
      {"bilinear.threshold",
       [&](const std::string& k, const std::string& v) {
         config.bilinear.threshold = parse_double(k, v);
       }},
      {"backend.kind", [&](const std::string&, const std::string& v) { config.backend.kind = v; }},
      {"backend.endpoint",
       [&](const std::string&, const std::string& v) { config.backend.endpoint = v; }},
      {"backend.model",
       [&](const std::string&, const std::string& v) { config.backend.model = v; }},
      {"backend.temperature",
       [&](const std::string& k, const std::string& v) {
         config.backend.temperature = parse_double(k, v);
       }},
      {"backend.timeout_ms",
       [&](const std::string& k, const std::string& v) {
         config.backend.timeout_ms = static_cast<int>(parse_int(k, v));
       }},
      {"backend.max_retries",
       [&](const std::string& k, const std::string& v) {
         config.backend.max_retries = static_cast<int>(parse_int(k, v));
       }},
      {"backend.api_key_env",
       [&](const std::string&, const std::string& v) { config.backend.api_key_env = v; }},
      {"backend.replay_path",
       [&](const std::string&, const std::string& v) { config.backend.replay_path = v; }},
  };
  (void)parse_bool;  // reserved for future boolean keys

  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
}

void validate(const RunConfig& config) {
  if (config.dataset_path.empty()) throw ConfigError("dataset path is required");
  if (config.setting != "transductive" && config.setting != "inductive") {
    throw ConfigError("setting must be 'transductive' or 'inductive', got '" +
                      config.setting + "'");
  }
  if (config.folds < 1) throw ConfigError("folds must be >= 1");
  if (config.setting == "transductive" && config.folds > 5) {
    throw ConfigError("transductive folds are capped at 5 (disjoint 20% test tiles)");
  }
  if (config.k < 1) throw ConfigError("k must be >= 1");
  if (config.method != "rv" && config.method != "bilinear" && config.method != "ic") {
    throw ConfigError("method must be 'rv', 'bilinear', or 'ic', got '" + config.method +
                      "'");
  }
  if (config.demos < 1) throw ConfigError("demos must be >= 1");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  if (config.out_dir.empty()) throw ConfigError("out_dir is required");
  if (config.bilinear.d < 2) throw ConfigError("bilinear.d must be >= 2");
  if (config.bilinear.epochs < 1) throw ConfigError("bilinear.epochs must be >= 1");
  if (config.bilinear.patience < 1) throw ConfigError("bilinear.patience must be >= 1");
  if (config.backend.kind != "null" && config.backend.kind != "replay" &&
      config.backend.kind != "http") {
    throw ConfigError("backend.kind must be 'null', 'replay', or 'http', got '" +
                      config.backend.kind + "'");
  }
}

// Execution details that cannot change result bytes (out_dir, threads,
// parallel_folds, backend networking knobs) stay out of the hash so the same
// experiment carries the same provenance id wherever and however it runs.
std::string config_hash(const RunConfig& config) {
  std::string canon;
  char buf[64];
  auto add = [&](const std::string& key, const std::string& value) {
    canon += key;
    canon += '=';
    canon += value;
    canon += '\n';
  };
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  add("dataset", config.dataset_path);
  add("setting", config.setting);
  add("folds", std::to_string(config.folds));
  add("seed", std::to_string(config.seed));
  add("k", std::to_string(config.k));
  add("method", config.method);
  add("demos", std::to_string(config.demos));
  add("bilinear.d", std::to_string(config.bilinear.d));
  add("bilinear.lr", num(config.bilinear.lr));
  add("bilinear.epochs", std::to_string(config.bilinear.epochs));
  add("bilinear.batch_size", std::to_string(config.bilinear.batch_size));
  add("bilinear.patience", std::to_string(config.bilinear.patience));
  add("bilinear.gen_loss", num(config.bilinear.gen_loss));
  add("bilinear.threshold", num(config.bilinear.threshold));
  add("backend.kind", config.backend.kind);
  add("backend.endpoint", config.backend.endpoint);
  add("backend.model", config.backend.model);
  add("backend.temperature", num(config.backend.temperature));
  add("backend.replay_path", config.backend.replay_path);
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

}  // namespace ddikit::pipeline
