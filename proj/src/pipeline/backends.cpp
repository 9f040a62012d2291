#include "horae/pipeline.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace horae::pipeline {

using nlohmann::json;

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') {
    return std::nullopt;
  }
  return std::string(v);
}

std::optional<long long> positive_integer(const std::string& text) {
  if (text.empty() || text.size() > 12) {
    return std::nullopt;
  }
  long long value = 0;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      return std::nullopt;
    }
    value = value * 10 + (c - '0');
  }
  return value > 0 ? std::optional<long long>(value) : std::nullopt;
}

bool retryable(int status) { return status == 429 || status >= 500; }

} // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
  case Phase::EventExtraction: return "event-extraction";
  case Phase::LogicExtraction: return "logic-extraction";
  case Phase::PatternMatching: return "pattern-matching";
  }
  return "event-extraction";
}

std::string normalize_prompt(std::string_view prompt) {
  std::string out;
  bool space = false;
  for (char c : prompt) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) {
      out += ' ';
      space = false;
    }
    out += c;
  }
  return out;
}

MockBackend::MockBackend(std::map<std::string, std::string> responses) {
  for (auto& [prompt, text] : responses) {
    responses_[normalize_prompt(prompt)] = std::move(text);
  }
}

MockBackend MockBackend::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InvalidArgument(std::string("mock fixture is not valid JSON: ") + err.what());
  }
  if (!doc.is_object()) {
    throw InvalidArgument("mock fixture must map prompts to responses");
  }
  std::map<std::string, std::string> responses;
  for (const auto& [prompt, value] : doc.items()) {
    if (!value.is_string()) {
      throw InvalidArgument("mock response for '" + prompt + "' is not a string");
    }
    responses[prompt] = value.get<std::string>();
  }
  return MockBackend(std::move(responses));
}

MockBackend MockBackend::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::string MockBackend::complete(const BackendRequest& request) const {
  auto it = responses_.find(normalize_prompt(request.prompt));
  if (it == responses_.end()) {
    throw BackendError("mock backend has no response for: " + normalize_prompt(request.prompt));
  }
  return it->second;
}

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig config;
  if (auto url = env("HORAE_BACKEND_URL")) {
    config.base_url = *url;
  }
  if (auto token = env("HORAE_BACKEND_TOKEN")) {
    config.token = *token;
  }
  if (auto ms = env("HORAE_BACKEND_TIMEOUT_MS")) {
    auto value = positive_integer(*ms);
    if (!value) {
      throw InvalidArgument("HORAE_BACKEND_TIMEOUT_MS must be a positive integer");
    }
    config.timeout = std::chrono::milliseconds(*value);
  }
  return config;
}

std::size_t concurrency_from_env() {
  if (auto text = env("HORAE_CONCURRENCY")) {
    if (auto value = positive_integer(*text)) {
      return static_cast<std::size_t>(*value);
    }
  }
  return kDefaultConcurrency;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw InvalidArgument("HTTP backend needs a base URL (HORAE_BACKEND_URL)");
  }
  if (config_.retries < 0) {
    throw InvalidArgument("retry count must not be negative");
  }
}

std::string HttpBackend::complete(const BackendRequest& request) const {
  // httplib rejects https outright when built without TLS.
  std::unique_ptr<httplib::Client> holder;
  try {
    holder = std::make_unique<httplib::Client>(config_.base_url);
  } catch (const std::invalid_argument&) {
  }
  if (!holder || !holder->is_valid()) {
    throw BackendError("unsupported backend URL " + config_.base_url + " (plain http only)");
  }
  httplib::Client& client = *holder;
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  if (!config_.token.empty()) {
    client.set_bearer_token_auth(config_.token);
  }
  std::string body = json{{"prompt", request.prompt}}.dump();
  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post("/v1/complete", body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (retryable(res->status)) {
        continue;
      }
      throw BackendError("backend answered " + last_error + " for " + std::string(to_string(request.phase)));
    }
    try {
      return json::parse(res->body).at("text").get<std::string>();
    } catch (const json::exception& err) {
      throw BackendError(std::string("malformed backend reply: ") + err.what());
    }
  }
  throw BackendError("backend unavailable after " + std::to_string(config_.retries + 1) +
                     " attempts (" + last_error + ")");
}

} // namespace horae::pipeline
