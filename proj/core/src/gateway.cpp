#include "dsqa/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "json.hpp"

#include "dsqa/error.hpp"
#include "dsqa/http.hpp"
#include "dsqa/text.hpp"

namespace dsqa {

namespace {

using json = nlohmann::json;

json request_to_json(const CompletionRequest& req) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return json{{"max_tokens", req.max_tokens},
              {"system_prompt", req.system_prompt},
              {"tag", std::string(to_string(req.tag))},
              {"temperature", req.temperature},
              {"template_version", req.template_version},
              {"user_prompt", req.user_prompt}};
}

std::string fixture_path(const std::string& dir, const std::string& digest) {
  return (std::filesystem::path(dir) / (digest + ".json")).string();
}

}  // namespace

std::string_view to_string(PromptTag tag) {
  switch (tag) {
    case PromptTag::EntityLookup: return "entity_lookup";
    case PromptTag::SqlGen: return "sql_gen";
    case PromptTag::ChartGen: return "chart_gen";
  }
  return "?";
}

PromptTag prompt_tag_from_string(std::string_view name) {
  if (name == "entity_lookup") return PromptTag::EntityLookup;
  if (name == "sql_gen") return PromptTag::SqlGen;
  if (name == "chart_gen") return PromptTag::ChartGen;
  throw Error(ErrorCode::Config, "unknown prompt tag '" + std::string(name) + "'");
}

void validate_request(const CompletionRequest& req) {
  if (!(req.temperature >= 0.0 && req.temperature <= 2.0))
    throw Error(ErrorCode::Config, "temperature must be within [0, 2]");
  if (req.max_tokens <= 0) throw Error(ErrorCode::Config, "max_tokens must be positive");
}

std::string canonical_request_json(const CompletionRequest& req) { return request_to_json(req).dump(); }

std::string request_digest(const CompletionRequest& req) { return sha256_hex(canonical_request_json(req)); }

std::string strip_code_fence(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return std::string(trim(text));
  auto line_end = text.find('\n', open);
  if (line_end == std::string_view::npos) return std::string(trim(text));
  auto close = text.find("```", line_end + 1);
  auto body = text.substr(line_end + 1, close == std::string_view::npos ? std::string_view::npos : close - line_end - 1);
  return std::string(trim(body));
}

// ---------------------------------------------------------------- providers

MockProvider::MockProvider(std::string dir) : dir_(std::move(dir)) {}

std::string MockProvider::complete(const CompletionRequest& req, bool& truncated) {
  auto digest = request_digest(req);
  auto path = fixture_path(dir_, digest);
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::MockMiss,
                "no recorded completion for " + std::string(to_string(req.tag)) + " request " + digest, digest);
  try {
    auto doc = json::parse(read_file(path));
    truncated = doc.value("truncated", false);
    return doc.at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "fixture " + path + ": " + e.what());
  }
}

OpenAiCompatibleProvider::OpenAiCompatibleProvider(std::string base_url, std::string model, std::string api_key_env)
    : base_url_(std::move(base_url)), model_(std::move(model)) {
  const char* key = std::getenv(api_key_env.c_str());
  if (!key || !*key) throw Error(ErrorCode::Config, "live provider requires credentials in $" + api_key_env);
  api_key_ = key;
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string OpenAiCompatibleProvider::complete(const CompletionRequest& req, bool& truncated) {
  json body{{"model", model_},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens},
            {"messages", json::array({{{"role", "system"}, {"content", req.system_prompt}},
                                      {{"role", "user"}, {"content", req.user_prompt}}})}};
  auto text = http_post_json(base_url_ + "/chat/completions", body.dump(), {{"Authorization", "Bearer " + api_key_}});
  try {
    auto doc = json::parse(text);
    const auto& choice = doc.at("choices").at(0);
    truncated = choice.value("finish_reason", "") == "length";
    auto content = choice.at("message").at("content").get<std::string>();
    if (content.empty()) throw Error(ErrorCode::Provider, "provider returned empty completion");
    return content;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Provider, std::string("malformed provider response: ") + e.what());
  }
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
  if (config.kind == "mock") {
    if (config.mock_dir.empty()) throw Error(ErrorCode::Config, "mock provider requires a fixture directory");
    return std::make_shared<MockProvider>(config.mock_dir);
  }
  if (config.kind == "openai") return std::make_shared<OpenAiCompatibleProvider>(config.base_url, config.model, config.api_key_env);
  throw Error(ErrorCode::Config, "unknown provider kind '" + config.kind + "'");
}

// ---------------------------------------------------------------- recorder

Recorder::Recorder(std::string dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

RecordResult Recorder::record(const CompletionRequest& req, const std::string& response, const std::string& provider,
                              std::int64_t latency_ms) {
  RecordResult out;
  out.record = {request_digest(req), response, provider, latency_ms};
  if (!enabled_) {
    out.outcome = RecordOutcome::Disabled;
    out.warning = "recording disabled";
    return out;
  }
  std::shared_ptr<std::mutex> lock;
  {
    std::lock_guard g(mutex_);
    auto& slot = digest_locks_[out.record.request_digest];
    if (!slot) slot = std::make_shared<std::mutex>();
    lock = slot;
  }
  std::lock_guard g(*lock);
  auto path = fixture_path(dir_, out.record.request_digest);
  out.outcome = RecordOutcome::Written;
  if (std::filesystem::exists(path)) {
    out.outcome = RecordOutcome::Overwritten;
    out.warning = "overwrote recorded completion " + out.record.request_digest;
  }
  json doc{{"digest", out.record.request_digest},
           {"tag", std::string(to_string(req.tag))},
           {"template_version", req.template_version},
           {"request", request_to_json(req)},
           {"response", response},
           {"provider", provider},
           {"latency_ms", latency_ms}};
  try {
    write_file_atomic(path, doc.dump(2) + "\n");
  } catch (const Error& e) {
    throw Error(ErrorCode::Storage, std::string("cannot record completion: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------- gateway

Gateway::Gateway(std::shared_ptr<Provider> fallback) : fallback_(std::move(fallback)) {}

void Gateway::set_provider(PromptTag tag, std::shared_ptr<Provider> provider) { by_tag_[tag] = std::move(provider); }

CompletionResult Gateway::complete(const CompletionRequest& req) const {
  validate_request(req);
  auto it = by_tag_.find(req.tag);
  const auto& provider = it != by_tag_.end() ? it->second : fallback_;
  if (!provider) throw Error(ErrorCode::Config, "no provider configured for " + std::string(to_string(req.tag)));
  auto start = std::chrono::steady_clock::now();
  CompletionResult out;
  out.digest = request_digest(req);
  out.raw_text = provider->complete(req, out.truncated);
  out.latency_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  out.provider = provider->name();
  out.text = strip_code_fence(out.raw_text);
  if (out.text.empty()) throw Error(ErrorCode::Provider, "empty completion for " + std::string(to_string(req.tag)));
  return out;
}

}  // namespace dsqa
