#include "llmbi/elicitation.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "llmbi/error.hpp"
#include "llmbi/util.hpp"

namespace llmbi {

namespace {

using nlohmann::json;

std::string substitute(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string_view>> vars) {
  // Single left-to-right pass so substituted text is never rescanned.
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool matched = false;
    if (tmpl[i] == '{') {
      for (const auto& [key, value] : vars) {
        if (tmpl.substr(i + 1, key.size()) == key && i + 1 + key.size() < tmpl.size() && tmpl[i + 1 + key.size()] == '}') {
          out += value;
          i += key.size() + 2;
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += tmpl[i++];
  }
  return out;
}

std::string excerpt(std::string_view text, std::size_t limit = 200) {
  if (text.size() <= limit) return std::string(text);
  return std::string(text.substr(0, limit)) + "...";
}

std::string scrub(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (std::size_t pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos)) {
    text.replace(pos, secret.size(), "[redacted]");
  }
  return text;
}

std::mutex& fixture_write_mutex() {
  static std::mutex m;
  return m;
}

struct Endpoint {
  std::string origin;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "endpoint_url needs a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string live_call(std::string_view prompt, const LlmConfig& cfg) {
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::MissingApiKey, "environment variable " + cfg.api_key_env + " is not set");
  }
  const std::string secret = key;
  const Endpoint ep = split_url(cfg.endpoint_url);

  httplib::Client client(ep.origin);
  client.set_connection_timeout(cfg.timeout);
  client.set_read_timeout(cfg.timeout);
  client.set_write_timeout(cfg.timeout);
  httplib::Headers headers{{"Authorization", "Bearer " + secret}};

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(ep.path, headers, chat_request_body(prompt, cfg), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= cfg.timeout)) {
      throw Error(ErrorCode::Timeout, "no response from " + ep.origin + " within " + std::to_string(cfg.timeout.count()) + " s");
    }
    throw Error(ErrorCode::HttpError, scrub("request to " + ep.origin + " failed: " + httplib::to_string(err), secret));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::HttpError, scrub("status " + std::to_string(res->status) + ": " + excerpt(res->body), secret));
  }
  try {
    return extract_reply_text(res->body, cfg.response_pointer);
  } catch (const Error& e) {
    throw Error(e.code(), scrub(e.detail(), secret));
  }
}

}  // namespace

std::string render_prior_prompt(std::string_view parameter_name, std::string_view belief_text) {
  if (parameter_name.empty()) throw Error(ErrorCode::EmptyInput, "parameter name is empty");
  if (belief_text.empty()) throw Error(ErrorCode::EmptyInput, "belief text is empty");
  return substitute(prior_prompt_template(), {{"parameter_name", parameter_name}, {"belief_text", belief_text}});
}

std::string render_model_prompt(std::string_view description) {
  if (description.empty()) throw Error(ErrorCode::EmptyInput, "description is empty");
  return substitute(model_prompt_template(), {{"description", description}});
}

std::string_view to_string(LlmMode mode) {
  switch (mode) {
    case LlmMode::Live: return "live";
    case LlmMode::Replay: return "replay";
    case LlmMode::Record: return "record";
  }
  return "?";
}

LlmMode parse_llm_mode(std::string_view text) {
  if (text == "live") return LlmMode::Live;
  if (text == "replay") return LlmMode::Replay;
  if (text == "record") return LlmMode::Record;
  throw Error(ErrorCode::InvalidConfig, "unknown llm mode '" + std::string(text) + "' (live, replay, record)");
}

void LlmConfig::validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::InvalidConfig, "temperature must be >= 0");
  if (timeout.count() <= 0) throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
  if (max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (mode != LlmMode::Replay && endpoint_url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "endpoint_url is required in " + std::string(to_string(mode)) + " mode");
  }
  if (mode != LlmMode::Live && fixtures_dir.empty()) {
    throw Error(ErrorCode::InvalidConfig, "fixtures_dir is required in " + std::string(to_string(mode)) + " mode");
  }
}

std::string prompt_hash(std::string_view prompt) { return sha256_hex(prompt); }

std::filesystem::path FixtureStore::path_for(std::string_view hash) const { return dir_ / (std::string(hash) + ".json"); }

std::optional<Fixture> FixtureStore::find(std::string_view hash) const {
  std::ifstream in(path_for(hash), std::ios::binary);
  if (!in) return std::nullopt;
  json body;
  try {
    in >> body;
    Fixture f;
    f.prompt_hash = body.at("prompt_hash").get<std::string>();
    f.response_text = body.at("response_text").get<std::string>();
    if (auto meta = body.find("metadata"); meta != body.end() && meta->is_object()) {
      f.model_name = meta->value("model_name", "");
      f.timestamp = meta->value("timestamp", "");
    }
    if (f.prompt_hash != hash) {
      throw Error(ErrorCode::IoError, "fixture " + path_for(hash).string() + " records a different prompt_hash");
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "fixture " + path_for(hash).string() + ": " + e.what());
  }
}

void FixtureStore::save(const Fixture& fixture) const {
  nlohmann::ordered_json body;
  body["prompt_hash"] = fixture.prompt_hash;
  body["response_text"] = fixture.response_text;
  body["metadata"] = {{"model_name", fixture.model_name}, {"timestamp", fixture.timestamp}};

  std::lock_guard lock(fixture_write_mutex());
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  const auto target = path_for(fixture.prompt_hash);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << body.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot write '" + target.string() + "': " + ec.message());
}

std::string chat_request_body(std::string_view prompt, const LlmConfig& cfg) {
  nlohmann::ordered_json body;
  body["model"] = cfg.model_name;
  body["messages"] = json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
  body["temperature"] = cfg.temperature;
  return body.dump();
}

std::string extract_reply_text(std::string_view response_body, std::string_view pointer) {
  json body = json::parse(response_body, nullptr, false);
  if (body.is_discarded()) throw Error(ErrorCode::HttpError, "response body is not JSON: " + excerpt(response_body));
  static const std::vector<std::string> defaults = {
      "/choices/0/message/content", "/candidates/0/content/parts/0/text", "/content/0/text", "/message/content",
      "/response"};
  std::vector<std::string> candidates;
  if (pointer.empty()) {
    candidates = defaults;
  } else {
    candidates.emplace_back(pointer);
  }
  for (const auto& p : candidates) {
    try {
      const json::json_pointer ptr(p);
      if (body.contains(ptr) && body.at(ptr).is_string()) return body.at(ptr).get<std::string>();
    } catch (const json::exception&) {
      if (!pointer.empty()) throw Error(ErrorCode::InvalidConfig, "bad response pointer '" + p + "'");
    }
  }
  throw Error(ErrorCode::HttpError, "no reply text in response: " + excerpt(response_body));
}

std::string call_llm(std::string_view prompt, const LlmConfig& cfg) {
  cfg.validate();
  const std::string hash = prompt_hash(prompt);
  switch (cfg.mode) {
    case LlmMode::Replay: {
      const auto fixture = FixtureStore(cfg.fixtures_dir).find(hash);
      if (!fixture) throw Error(ErrorCode::FixtureMiss, "no fixture for prompt hash " + hash + " in " + cfg.fixtures_dir.string());
      return fixture->response_text;
    }
    case LlmMode::Live:
      return live_call(prompt, cfg);
    case LlmMode::Record: {
      std::string reply = live_call(prompt, cfg);
      FixtureStore(cfg.fixtures_dir).save({hash, reply, cfg.model_name, utc_now_iso8601()});
      return reply;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown llm mode");
}

std::string correction_note(std::string_view error_message) {
  std::string msg(error_message);
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return "Previous response was invalid: " + msg + ". Respond with only the JSON object.";
}

namespace {

template <class Parse>
auto elicit(const std::string& base_prompt, const LlmConfig& cfg, ElicitationLog* log, Parse parse) {
  std::string prompt = base_prompt;
  std::string last_error;
  std::string last_reply;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (log) log->prompts.push_back(prompt);
    try {
      last_reply = call_llm(prompt, cfg);
    } catch (const Error& e) {
      // A replay store has no answer for an unrecorded correction prompt.
      if (e.code() == ErrorCode::FixtureMiss && attempt > 0) break;
      throw;
    }
    if (log) log->responses.push_back(last_reply);
    try {
      std::vector<std::string> warnings;
      auto result = parse(sanitize_llm_text(last_reply), &warnings);
      if (log) log->warnings.insert(log->warnings.end(), warnings.begin(), warnings.end());
      return result;
    } catch (const Error& e) {
      last_error = e.what();
    }
    prompt = base_prompt + "\n" + correction_note(last_error);
  }
  throw Error(ErrorCode::ElicitationFailed,
              "no valid reply after " + std::to_string(cfg.max_retries + 1) + " attempt(s); last error: " + last_error +
                  "; last reply: " + excerpt(last_reply));
}

}  // namespace

DistributionSpec elicit_prior(std::string_view parameter_name, std::string_view belief_text, const LlmConfig& cfg,
                              ElicitationLog* log) {
  const std::string name(parameter_name);
  return elicit(render_prior_prompt(parameter_name, belief_text), cfg, log,
                [&](const std::string& text, std::vector<std::string>* warnings) {
                  ParsedPrior parsed = parse_prior_json(text, warnings);
                  if (parsed.name && *parsed.name != name) {
                    warnings->push_back("reply names parameter '" + *parsed.name + "', expected '" + name + "'");
                  }
                  return parsed.spec;
                });
}

ModelSpec elicit_model(std::string_view description, const LlmConfig& cfg, ElicitationLog* log) {
  return elicit(render_model_prompt(description), cfg, log,
                [](const std::string& text, std::vector<std::string>* warnings) { return parse_model_json(text, warnings); });
}

}  // namespace llmbi
