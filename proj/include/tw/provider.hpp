#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "tw/common.hpp"

namespace tw {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.7;
  int max_tokens = 2048;
};

class TextProvider {
 public:
  virtual ~TextProvider() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Pure function of (seed, prompt). Recognizes the shipped templates by their
// section markers and answers in the format each template asks for, echoing
// names embedded in the prompt so downstream parsers see consistent text.
// Thread safe; complete() has no mutable state.
class MockProvider : public TextProvider {
 public:
  explicit MockProvider(uint64_t seed = 0) : seed_(seed) {}
  std::string complete(const CompletionRequest& request) override;
  std::string name() const override { return "mock"; }

 private:
  uint64_t seed_;
};

struct HttpProviderConfig {
  std::string endpoint;  // http://host:port/path
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  int retries = 2;
  int backoff_ms = 50;
  int timeout_s = 30;
};

// POSTs {"model","prompt","temperature","max_tokens"} and expects
// {"completion": "..."} back. Retries transport failures and 5xx with a small
// backoff; 4xx fails immediately.
class HttpProvider : public TextProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  std::string complete(const CompletionRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpProviderConfig config_;
  std::string host_;
  std::string path_;
};

// Wraps another provider and counts calls; lets tests assert cache behavior.
class CountingProvider : public TextProvider {
 public:
  explicit CountingProvider(TextProvider& inner) : inner_(inner) {}
  std::string complete(const CompletionRequest& request) override {
    calls_.fetch_add(1);
    return inner_.complete(request);
  }
  std::string name() const override { return inner_.name(); }
  int calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  TextProvider& inner_;
  std::atomic<int> calls_{0};
};

}  // namespace tw
