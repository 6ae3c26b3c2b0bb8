// Copyright 2026 The nvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Chat-completions transport: request shaping, retry with exponential
// backoff, a shared token-bucket rate limiter and a per-run request budget.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace nvlab {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int total_tokens = 0;
};

struct ChatResult {
  std::string text;
  TokenUsage usage;
  int retries = 0;  // transient failures absorbed before success
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResult complete(const std::string& model, const std::vector<ChatMessage>& transcript,
                              double temperature) = 0;
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
  double multiplier = 2.0;

  // base_delay * multiplier^retry, capped at max_delay.
  std::chrono::milliseconds delay_for(int retry) const;
};

// Statuses worth retrying: 408, 409, 429 and 5xx, plus transport failures
// reported as status 0.
bool is_retryable_status(int status);

// Token bucket shared by every client talking to one endpoint.
class RateLimiter {
 public:
  // rate <= 0 disables limiting.
  RateLimiter(double requests_per_second, double burst);
  void acquire();

 private:
  std::mutex mutex_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// Caps the number of HTTP attempts in one run.
class RequestBudget {
 public:
  explicit RequestBudget(std::int64_t limit) : remaining_(limit) {}
  // Throws TransportError when the budget is spent.
  void consume();
  std::int64_t remaining() const { return remaining_.load(); }

 private:
  std::atomic<std::int64_t> remaining_;
};

// Appends one JSON line per HTTP attempt.
class RequestLog {
 public:
  explicit RequestLog(const std::filesystem::path& path);
  void write(const std::string& json_line);

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

struct HttpChatOptions {
  std::string endpoint;  // full URL of the chat-completions route
  std::string api_key;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
  std::shared_ptr<RateLimiter> rate_limiter;
  std::shared_ptr<RequestBudget> budget;
  std::shared_ptr<RequestLog> log;
  // Replaced in tests to avoid real sleeps.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);
  ChatResult complete(const std::string& model, const std::vector<ChatMessage>& transcript,
                      double temperature) override;

 private:
  HttpChatOptions options_;
  std::string base_url_;
  std::string path_;
};

// Request body for the chat-completions wire format.
std::string chat_request_body(const std::string& model, const std::vector<ChatMessage>& transcript,
                              double temperature);

// Extracts choices[0].message.content and usage; throws TransportError on a
// malformed body.
ChatResult parse_chat_response(const std::string& body);

// UTC timestamp with millisecond precision, e.g. 2026-01-02T03:04:05.678Z.
std::string utc_timestamp();

}  // namespace nvlab
