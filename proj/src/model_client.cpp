#include "cua/model_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cua/util.hpp"

namespace cua::cot {

using nlohmann::json;
using nlohmann::ordered_json;

std::string request_hash(const ChatRequest& request) {
  ordered_json j;
  j["purpose"] = request.purpose;
  j["system"] = request.system;
  j["attempt"] = request.attempt;
  j["messages"] = ordered_json::array();
  for (const ChatMessage& m : request.messages) {
    ordered_json mj;
    mj["role"] = m.role;
    mj["text"] = m.text;
    mj["images"] = m.images;
    j["messages"].push_back(std::move(mj));
  }
  return sha256_hex(j.dump());
}

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string all_text(const ChatRequest& request) {
  std::string out = request.system;
  for (const ChatMessage& m : request.messages) out += "\n" + m.text;
  return out;
}

}  // namespace

std::string MockModelClient::complete(const ChatRequest& request) {
  calls_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    seen_.push_back(request);
    auto it = scripted_.find(request.purpose);
    if (it != scripted_.end() && !it->second.empty()) {
      std::string reply = std::move(it->second.front());
      it->second.pop_front();
      return reply;
    }
  }
  std::string digest = request_hash(request).substr(0, 8);
  std::string text = all_text(request);
  if (request.purpose == "reflector") {
    return "<verdict>correct</verdict>\n"
           "<rationale>The action matches the visible transition (" + digest + ").</rationale>\n"
           "<state_change>The screen content advanced to the next state (" + digest + ").</state_change>";
  }
  if (request.purpose == "generator") {
    std::string action_desc;
    if (contains(text, "computer.terminate")) {
      action_desc = contains(text, "failure")
                        ? "Terminate the task and report failure."
                        : "Terminate the task and report successful completion.";
    } else {
      action_desc = "Perform the scripted interaction on the highlighted target (" + digest + ").";
    }
    return "<observation>The screen shows the working area in state " + digest + ".</observation>\n"
           "<thought>The previous steps progressed as intended; continuing with the planned interaction keeps the task on track.</thought>\n"
           "<action_description>" + action_desc + "</action_description>";
  }
  if (request.purpose == "summarizer") {
    return "<refined_instruction>Complete the demonstrated workflow precisely (" + digest + ").</refined_instruction>\n"
           "<score_alignment>7</score_alignment>\n"
           "<score_efficiency>8</score_efficiency>\n"
           "<score_difficulty>5</score_difficulty>";
  }
  if (request.purpose == "privacy") {
    return "<privacy>None</privacy>";
  }
  return "<verdict>correct</verdict>";
}

void MockModelClient::enqueue(const std::string& purpose, std::string reply) {
  std::lock_guard<std::mutex> lock(mutex_);
  scripted_[purpose].push_back(std::move(reply));
}

std::vector<ChatRequest> MockModelClient::seen() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return seen_;
}

CachedModelClient::CachedModelClient(std::shared_ptr<ModelClient> inner,
                                     std::filesystem::path cache_dir)
    : inner_(std::move(inner)), dir_(std::move(cache_dir)) {
  std::filesystem::create_directories(dir_);
}

std::string CachedModelClient::complete(const ChatRequest& request) {
  std::string key = request_hash(request);
  std::filesystem::path entry = dir_ / (key + ".json");
  if (std::filesystem::exists(entry)) {
    json j = json::parse(read_file(entry), nullptr, false);
    if (!j.is_discarded() && j.contains("response")) {
      hits_.fetch_add(1);
      return j.at("response").get<std::string>();
    }
  }
  if (!inner_)
    throw CuaError(Err::backend_error,
                   "replay cache miss for request " + key.substr(0, 12));
  std::string response = inner_->complete(request);
  misses_.fetch_add(1);
  ordered_json j;
  j["request_hash"] = key;
  j["purpose"] = request.purpose;
  j["response"] = response;
  atomic_write(entry, j.dump(2) + "\n");
  return response;
}

BackendConfig load_backend_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    throw CuaError(Err::input_error, "backend config is not valid JSON");
  BackendConfig cfg;
  cfg.endpoint = j.at("endpoint").get<std::string>();
  cfg.auth_env = j.value("auth_env", "");
  cfg.model = j.value("model", "");
  cfg.max_in_flight = j.value("max_in_flight", 4);
  cfg.retry_limit = j.value("retry_limit", 3);
  cfg.backoff_ms = j.value("backoff_ms", std::int64_t{250});
  return cfg;
}

HttpModelClient::HttpModelClient(BackendConfig config) : config_(std::move(config)) {
  std::string url = config_.endpoint;
  std::string rest;
  if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
    port_ = 80;
  } else {
    throw CuaError(Err::input_error, "endpoint must be http://host[:port]/path");
  }
  std::size_t slash = rest.find('/');
  std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  std::size_t colon = hostport.find(':');
  if (colon == std::string::npos) {
    host_ = hostport;
  } else {
    host_ = hostport.substr(0, colon);
    port_ = std::stoi(hostport.substr(colon + 1));
  }
}

std::string HttpModelClient::complete(const ChatRequest& request) {
  ordered_json body;
  body["model"] = config_.model;
  body["purpose"] = request.purpose;
  body["system"] = request.system;
  body["messages"] = ordered_json::array();
  for (const ChatMessage& m : request.messages) {
    ordered_json mj;
    mj["role"] = m.role;
    ordered_json content = ordered_json::array();
    if (!m.text.empty()) content.push_back({{"type", "text"}, {"text", m.text}});
    for (const std::string& image : m.images)
      content.push_back({{"type", "image"}, {"path", image}});
    mj["content"] = std::move(content);
    body["messages"].push_back(std::move(mj));
  }

  httplib::Client client(host_, port_);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    const char* token = std::getenv(config_.auth_env.c_str());
    if (token) headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::int64_t backoff = config_.backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, config_.retry_limit); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed";
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) {
      last_error = "response is not JSON";
      continue;
    }
    if (j.contains("response")) return j.at("response").get<std::string>();
    if (j.contains("content") && j.at("content").is_string())
      return j.at("content").get<std::string>();
    if (j.contains("choices") && !j.at("choices").empty())
      return j.at("choices")[0].at("message").at("content").get<std::string>();
    last_error = "response lacks content";
  }
  throw CuaError(Err::backend_error, "backend failed: " + last_error);
}

}  // namespace cua::cot
