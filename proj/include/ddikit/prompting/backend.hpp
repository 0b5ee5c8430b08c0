#pragma once

// Completion backends behind a single-operation interface. The replay
// backend answers from a fixture keyed by prompt hash, which keeps the full
// in-context pipeline testable offline; the http backend posts prompts to a
// user-supplied JSON endpoint; the null backend always errors.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace ddikit::prompting {

struct BackendError : std::runtime_error {
  explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string send(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

// Always throws BackendError naming itself.
class NullBackend : public CompletionBackend {
 public:
  std::string send(const std::string& prompt) override;
  std::string name() const override { return "null"; }
};

// Answers from a JSONL fixture of {prompt_hash, completion} records, where
// prompt_hash is the 16-hex-digit FNV-1a hash of the prompt bytes.
// Deterministic; a missing hash is a BackendError.
class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(const std::string& fixture_path);
  std::string send(const std::string& prompt) override;
  std::string name() const override { return "replay"; }

  static std::string prompt_hash(const std::string& prompt);

 private:
  std::string path_;
  std::map<std::string, std::string> completions_;
};

// Posts {"model", "temperature", "prompt"} as JSON to an http:// endpoint
// and reads {"completion": "..."} back. The API key is read from the named
// environment variable and sent as a bearer token when present. Retries
// connection failures and 429/5xx responses with exponential backoff.
struct HttpBackendConfig {
  std::string endpoint;  // e.g. "http://localhost:8080/v1/complete"
  std::string model;
  double temperature = 0.0;
  int timeout_ms = 30000;
  int max_retries = 3;
  std::string api_key_env = "DDIKIT_API_KEY";
};

class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string send(const std::string& prompt) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

// Factory for the CLI/pipeline: kind is "null", "replay", or "http".
std::unique_ptr<CompletionBackend> make_backend(const std::string& kind,
                                                const std::string& replay_path,
                                                const HttpBackendConfig& http_config);

}  // namespace ddikit::prompting
