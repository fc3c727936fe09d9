#include "argplan/http_provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "argplan/error.hpp"

namespace argplan {
namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return (value != nullptr && *value != '\0') ? std::string(value) : std::move(fallback);
}

bool retryable(int status) { return status >= 500; }

}  // namespace

ProviderConfig ProviderConfig::from_env() {
  ProviderConfig config;
  config.base_url = env_or("LLM_BASE_URL", config.base_url);
  config.model = env_or("LLM_MODEL", config.model);
  config.api_key = env_or("LLM_API_KEY", "");
  return config;
}

void ProviderConfig::validate() const {
  if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "provider timeout must be positive");
  if (max_retries < 0) throw Error(ErrorCode::InvalidArgument, "max_retries must be >= 0");
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    throw Error(ErrorCode::InvalidArgument, "base_url must start with http:// or https://");
  }
}

nlohmann::json chat_request_body(const ProviderConfig& config, const RenderedPrompt& prompt) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : prompt.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  return {{"model", config.model}, {"messages", std::move(messages)},
          {"temperature", prompt.temperature}};
}

std::string parse_chat_response(std::string_view body) {
  auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw ProviderError(ErrorCode::ProviderHttpError, "completion response is not JSON", 200);
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw ProviderError(ErrorCode::ProviderHttpError, "completion response has no choices", 200);
  }
  const auto& choice = doc["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw ProviderError(ErrorCode::ProviderHttpError, "completion response has no message content",
                        200);
  }
  return choice["message"]["content"].get<std::string>();
}

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.base_url.find("://") + 3;
  const auto path_start = config_.base_url.find('/', scheme_end);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.base_url;
  } else {
    scheme_host_port_ = config_.base_url.substr(0, path_start);
    path_prefix_ = config_.base_url.substr(path_start);
  }
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpProvider::complete(const RenderedPrompt& prompt) {
  const std::string body = chat_request_body(config_, prompt).dump();
  const std::string path = path_prefix_ + "/chat/completions";
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto backoff = config_.backoff_base;
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    auto result = client.Post(path, headers, body, "application/json");
    std::optional<ProviderError> failure;
    if (!result) {
      const auto err = result.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      failure.emplace(timed_out ? ErrorCode::ProviderTimeout : ErrorCode::ProviderHttpError,
                      "request to " + scheme_host_port_ + path + " failed: " + httplib::to_string(err));
    } else if (result->status >= 200 && result->status < 300) {
      return parse_chat_response(result->body);
    } else {
      ProviderError error(ErrorCode::ProviderHttpError,
                          "completion endpoint returned HTTP " + std::to_string(result->status),
                          result->status);
      if (!retryable(result->status)) throw error;
      failure.emplace(std::move(error));
    }
    if (attempt >= config_.max_retries) throw *failure;
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace argplan
