#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmbi/spec_schema.hpp"

namespace llmbi {

/// Template revision; fixtures are keyed on rendered prompt bytes, so any
/// template edit invalidates them and must bump this.
inline constexpr std::string_view kPromptTemplateVersion = "v1";

std::string_view prior_prompt_template();
std::string_view model_prompt_template();

/// Fills `{parameter_name}` and `{belief_text}`. Throws Error(EmptyInput).
std::string render_prior_prompt(std::string_view parameter_name, std::string_view belief_text);

/// Fills `{description}` verbatim; no escaping of `---` or anything else.
std::string render_model_prompt(std::string_view description);

enum class LlmMode { Live, Replay, Record };

std::string_view to_string(LlmMode mode);
LlmMode parse_llm_mode(std::string_view text);

struct LlmConfig {
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env = "LLM_API_KEY";
  double temperature = 0.0;
  std::chrono::seconds timeout{60};
  int max_retries = 2;
  LlmMode mode = LlmMode::Replay;
  std::filesystem::path fixtures_dir;
  /// JSON pointer to the reply text in the endpoint's response. Empty
  /// tries the common chat-completion shapes in turn.
  std::string response_pointer;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// Lower-case hex SHA-256 of the prompt bytes.
std::string prompt_hash(std::string_view prompt);

struct Fixture {
  std::string prompt_hash;
  std::string response_text;
  std::string model_name;
  std::string timestamp;
};

/// One `<hash>.json` file per fixture. Writes are serialized process-wide.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<Fixture> find(std::string_view hash) const;
  void save(const Fixture& fixture) const;
  std::filesystem::path path_for(std::string_view hash) const;

 private:
  std::filesystem::path dir_;
};

/// Sends one user message and returns the reply text. Replay mode reads a
/// fixture (Error(FixtureMiss) if absent); record mode calls live and then
/// persists the reply. Live errors: MissingApiKey (checked before any I/O),
/// HttpError, Timeout. The API key never appears in error text.
std::string call_llm(std::string_view prompt, const LlmConfig& cfg);

/// Builds the JSON request body for the generic chat endpoint.
std::string chat_request_body(std::string_view prompt, const LlmConfig& cfg);

/// Pulls the reply text out of an endpoint response body.
std::string extract_reply_text(std::string_view response_body, std::string_view pointer);

/// Prompts, raw replies and parser warnings from one elicitation.
struct ElicitationLog {
  std::vector<std::string> prompts;
  std::vector<std::string> responses;
  std::vector<std::string> warnings;
};

/// Render, call, sanitize, parse. An invalid reply is retried up to
/// cfg.max_retries times with a one-line correction note appended to the
/// prompt. Throws Error(ElicitationFailed) carrying the last parse error and
/// an excerpt of the last reply.
DistributionSpec elicit_prior(std::string_view parameter_name, std::string_view belief_text, const LlmConfig& cfg,
                              ElicitationLog* log = nullptr);

ModelSpec elicit_model(std::string_view description, const LlmConfig& cfg, ElicitationLog* log = nullptr);

/// The correction note appended on retry.
std::string correction_note(std::string_view error_message);

}  // namespace llmbi
