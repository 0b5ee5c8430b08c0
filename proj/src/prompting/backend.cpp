#include "ddikit/prompting/backend.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/common/rng.hpp"

namespace ddikit::prompting {

std::string NullBackend::send(const std::string&) {
  throw BackendError(
      "completion backend 'null' cannot serve requests; configure the replay or http "
      "backend");
}

std::string ReplayBackend::prompt_hash(const std::string& prompt) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return buf;
}

ReplayBackend::ReplayBackend(const std::string& fixture_path) : path_(fixture_path) {
  try {
    jsonl::for_each(path_, [&](std::size_t line_no, const jsonl::json& row) {
      if (jsonl::is_header(row)) return;
      if (!row.contains("prompt_hash") || !row.contains("completion")) {
        throw BackendError(path_ + ":" + std::to_string(line_no) +
                           ": replay rows need prompt_hash and completion");
      }
      completions_[row.at("prompt_hash").get<std::string>()] =
          row.at("completion").get<std::string>();
    });
  } catch (const jsonl::IoError& e) {
    throw BackendError(e.what());
  }
}

std::string ReplayBackend::send(const std::string& prompt) {
  const std::string hash = prompt_hash(prompt);
  auto it = completions_.find(hash);
  if (it == completions_.end()) {
    throw BackendError("replay fixture '" + path_ + "' has no completion for prompt hash " +
                       hash);
  }
  return it->second;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw BackendError("http backend endpoint must start with http:// (got '" + url +
                       "'); TLS endpoints are not supported by this build");
  }
  const std::size_t host_begin = scheme.size();
  const std::size_t path_begin = url.find('/', host_begin);
  std::string authority = path_begin == std::string::npos
                              ? url.substr(host_begin)
                              : url.substr(host_begin, path_begin - host_begin);
  path_ = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    host_ = authority.substr(0, colon);
    port_ = std::atoi(authority.c_str() + colon + 1);
    if (port_ <= 0) throw BackendError("bad port in endpoint '" + url + "'");
  } else {
    host_ = authority;
    port_ = 80;
  }
  if (host_.empty()) throw BackendError("bad host in endpoint '" + url + "'");
}

std::string HttpBackend::send(const std::string& prompt) {
  jsonl::json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["prompt"] = prompt;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key != nullptr && key[0] != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
    }
    httplib::Client client(host_, port_);
    client.set_connection_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    httplib::Result res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failure (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError("http backend: unexpected status " + std::to_string(res->status) +
                         " from " + config_.endpoint);
    }
    jsonl::json reply = jsonl::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("completion") ||
        !reply.at("completion").is_string()) {
      throw BackendError("http backend: response is not {\"completion\": string}");
    }
    return reply.at("completion").get<std::string>();
  }
  throw BackendError("http backend: giving up after " +
                     std::to_string(config_.max_retries + 1) + " attempts; last error: " +
                     last_error);
}

std::unique_ptr<CompletionBackend> make_backend(const std::string& kind,
                                                const std::string& replay_path,
                                                const HttpBackendConfig& http_config) {
  if (kind == "null") return std::make_unique<NullBackend>();
  if (kind == "replay") {
    if (replay_path.empty()) {
      throw BackendError("replay backend needs a fixture path (backend.replay_path)");
    }
    return std::make_unique<ReplayBackend>(replay_path);
  }
  if (kind == "http") return std::make_unique<HttpBackend>(http_config);
  throw BackendError("unknown completion backend '" + kind + "'");
}

}  // namespace ddikit::prompting
