#pragma once

// Run configuration: a simple "key = value" config file with CLI-flag
// overrides (flags win), validation, and a stable hash used to stamp output
// files.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "ddikit/prompting/backend.hpp"

namespace ddikit::pipeline {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BilinearSettings {
  int d = 16;
  double lr = 0.05;
  int epochs = 50;
  int batch_size = 0;  // <= 0: full batch
  int patience = 3;
  double gen_loss = 0.0;
  double threshold = 0.5;
};

struct BackendSettings {
  std::string kind = "null";  // null | replay | http
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  int timeout_ms = 30000;
  int max_retries = 3;
  std::string api_key_env = "DDIKIT_API_KEY";
  std::string replay_path;
};

struct RunConfig {
  std::string dataset_path;
  std::string setting = "transductive";  // transductive | inductive
  int folds = 5;
  std::uint64_t seed = 42;
  int k = 50;
  std::string method = "rv";  // rv | bilinear | ic
  int demos = 5;              // demonstrations per in-context prompt
  int threads = 1;            // batch-prediction worker threads
  bool parallel_folds = false;  // run folds concurrently (outputs are identical)
  std::string out_dir = "out";
  BilinearSettings bilinear;
  BackendSettings backend;
};

// Reads "key = value" lines; '#' starts a comment; blank lines ignored.
// Unknown keys are a ConfigError naming the line.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies key/value pairs onto a config (file first, then flag overrides).
// Validates types and ranges; throws ConfigError.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& kv);

// Final invariant check (K >= 1, folds >= 1, method/setting valid, ...).
void validate(const RunConfig& config);

// 16-hex-digit FNV-1a hash of the canonical serialization; stable across
// runs and platforms.
std::string config_hash(const RunConfig& config);

}  // namespace ddikit::pipeline
