#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace dsqa {

enum class PromptTag { EntityLookup, SqlGen, ChartGen };

std::string_view to_string(PromptTag tag);
PromptTag prompt_tag_from_string(std::string_view name);

struct CompletionRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.1;
  int max_tokens = 2048;
  PromptTag tag = PromptTag::SqlGen;
  /// Version of the prompt template that produced the prompts; part of the digest.
  std::string template_version;
};

/// Throws Error(Config) when temperature is outside [0, 2] or max_tokens <= 0.
void validate_request(const CompletionRequest& req);

/// Canonical JSON text of the request (sorted keys, no whitespace).
std::string canonical_request_json(const CompletionRequest& req);
/// sha256 of canonical_request_json.
std::string request_digest(const CompletionRequest& req);

struct CompletionResult {
  std::string text;      // fence-stripped
  std::string raw_text;  // as returned by the provider
  std::string provider;
  std::string digest;
  std::int64_t latency_ms = 0;
  bool truncated = false;
};

struct CompletionRecord {
  std::string request_digest;
  std::string response_text;
  std::string provider;
  std::int64_t latency_ms = 0;
};

/// Removes a surrounding ```lang ... ``` block if present; otherwise trims.
/// When several fenced blocks exist, the first is returned.
std::string strip_code_fence(std::string_view text);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  /// Returns the raw completion; `truncated` is set when the provider stopped
  /// at the token limit.
  virtual std::string complete(const CompletionRequest& req, bool& truncated) = 0;
};

/// Serves recorded completions from `<dir>/<digest>.json`.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::string dir);
  std::string name() const override { return "mock"; }
  std::string complete(const CompletionRequest& req, bool& truncated) override;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
};

/// Chat-completions style HTTP provider. The API key is read from the named
/// environment variable at construction.
class OpenAiCompatibleProvider : public Provider {
 public:
  OpenAiCompatibleProvider(std::string base_url, std::string model, std::string api_key_env);
  std::string name() const override { return "openai-compatible:" + model_; }
  std::string complete(const CompletionRequest& req, bool& truncated) override;

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_;
};

struct ProviderConfig {
  std::string kind = "mock";  // mock | openai
  std::string mock_dir;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
};

std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

enum class RecordOutcome { Written, Overwritten, Disabled };

struct RecordResult {
  RecordOutcome outcome = RecordOutcome::Disabled;
  CompletionRecord record;
  std::string warning;
};

/// Writes fixture files consumed by MockProvider. Writes for one digest are
/// serialized; files are replaced atomically.
class Recorder {
 public:
  Recorder(std::string dir, bool enabled = true);
  RecordResult record(const CompletionRequest& req, const std::string& response, const std::string& provider = "recorded",
                      std::int64_t latency_ms = 0);
  bool enabled() const { return enabled_; }

 private:
  std::string dir_;
  bool enabled_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> digest_locks_;
};

/// Routes each request to the provider configured for its tag.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Provider> fallback);
  void set_provider(PromptTag tag, std::shared_ptr<Provider> provider);
  CompletionResult complete(const CompletionRequest& req) const;
  bool has_provider() const { return fallback_ != nullptr; }

 private:
  std::shared_ptr<Provider> fallback_;
  std::map<PromptTag, std::shared_ptr<Provider>> by_tag_;
};

}  // namespace dsqa
