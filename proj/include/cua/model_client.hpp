#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cua/types.hpp"

namespace cua::cot {

struct ChatMessage {
  std::string role;  // "user" | "assistant"
  std::string text;
  std::vector<std::string> images;  // file references
};

struct ChatRequest {
  std::string purpose;  // reflector | generator | summarizer | privacy
  std::string system;
  std::vector<ChatMessage> messages;
  int attempt = 1;  // >1 re-asks after a malformed reply; part of the key
};

/// Content-addressed cache key: SHA-256 over the canonical encoding.
std::string request_hash(const ChatRequest& request);

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Deterministic stand-in backend. Replies are well-formed tagged responses
/// derived from the request hash; tests may enqueue scripted replies per
/// purpose, consumed FIFO before the defaults.
class MockModelClient : public ModelClient {
 public:
  std::string complete(const ChatRequest& request) override;
  void enqueue(const std::string& purpose, std::string reply);
  int calls() const { return calls_.load(); }
  std::vector<ChatRequest> seen() const;

 private:
  std::atomic<int> calls_{0};
  mutable std::mutex mutex_;
  std::map<std::string, std::deque<std::string>> scripted_;
  std::vector<ChatRequest> seen_;
};

/// Wraps a backend with a content-addressed response cache (one file per
/// request hash). Without an inner backend it replays only; a miss is a
/// backend error.
class CachedModelClient : public ModelClient {
 public:
  CachedModelClient(std::shared_ptr<ModelClient> inner,
                    std::filesystem::path cache_dir);
  std::string complete(const ChatRequest& request) override;
  int hits() const { return hits_.load(); }
  int misses() const { return misses_.load(); }

 private:
  std::shared_ptr<ModelClient> inner_;
  std::filesystem::path dir_;
  std::atomic<int> hits_{0};
  std::atomic<int> misses_{0};
};

struct BackendConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/complete
  std::string auth_env;  // name of the env var holding the token
  std::string model;
  int max_in_flight = 4;
  int retry_limit = 3;
  std::int64_t backoff_ms = 250;
};

BackendConfig load_backend_config(const std::filesystem::path& path);

/// Remote HTTP backend speaking a small JSON chat protocol.
class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(BackendConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  BackendConfig config_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

}  // namespace cua::cot
