#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "argplan/provider.hpp"

namespace argplan {

struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 2;
  /// First retry waits this long; each further retry doubles it.
  std::chrono::milliseconds backoff_base{500};

  /// Defaults overridden by LLM_BASE_URL, LLM_MODEL and LLM_API_KEY.
  static ProviderConfig from_env();
  /// Throws InvalidArgument when timeout <= 0 or max_retries < 0.
  void validate() const;
};

/// Request body in the common chat-completions schema.
nlohmann::json chat_request_body(const ProviderConfig& config, const RenderedPrompt& prompt);

/// Extracts choices[0].message.content. Throws ProviderHttpError on a body
/// that does not follow the schema.
std::string parse_chat_response(std::string_view body);

/// POSTs to {base_url}/chat/completions. Transport failures and 5xx replies
/// are retried with exponential backoff; 4xx replies fail immediately.
class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(ProviderConfig config);

  std::string complete(const RenderedPrompt& prompt) override;

  const ProviderConfig& config() const { return config_; }

 private:
  ProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace argplan
