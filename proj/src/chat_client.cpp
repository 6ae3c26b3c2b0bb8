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
#include "nvlab/chat_client.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include "httplib.h"
#include "json.hpp"

#include "nvlab/error.hpp"

namespace nvlab {

using json = nlohmann::json;

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
  const double raw = double(base_delay.count()) * std::pow(multiplier, retry);
  const double capped = std::min(raw, double(max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

bool is_retryable_status(int status) {
  return status == 0 || status == 408 || status == 409 || status == 429 ||
         (status >= 500 && status <= 599);
}

RateLimiter::RateLimiter(double requests_per_second, double burst)
    : rate_(requests_per_second),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    // Holding the lock while waiting serializes bursts across sessions.
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
  }
}

void RequestBudget::consume() {
  if (remaining_.fetch_sub(1) <= 0) {
    remaining_.fetch_add(1);
    throw TransportError("request budget exhausted");
  }
}

RequestLog::RequestLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw Error("cannot open request log " + path.string());
}

void RequestLog::write(const std::string& json_line) {
  std::lock_guard lock(mutex_);
  out_ << json_line << '\n';
  out_.flush();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

std::string chat_request_body(const std::string& model, const std::vector<ChatMessage>& transcript,
                              double temperature) {
  json messages = json::array();
  for (const auto& m : transcript) messages.push_back({{"role", m.role}, {"content", m.content}});
  json body{{"model", model}, {"messages", messages}, {"temperature", temperature}};
  return body.dump();
}

ChatResult parse_chat_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
  ChatResult result;
  try {
    const auto& message = doc.at("choices").at(0).at("message");
    const auto& content = message.at("content");
    if (!content.is_string()) throw TransportError("chat response content is not a string");
    result.text = content.get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("chat response missing choices[0].message.content: ") +
                         e.what());
  }
  if (const auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    result.usage.prompt_tokens = usage->value("prompt_tokens", 0);
    result.usage.completion_tokens = usage->value("completion_tokens", 0);
    result.usage.total_tokens =
        usage->value("total_tokens", result.usage.prompt_tokens + result.usage.completion_tokens);
  }
  return result;
}

HttpChatClient::HttpChatClient(HttpChatOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint", "expected an absolute http(s) URL, got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  base_url_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

ChatResult HttpChatClient::complete(const std::string& model,
                                    const std::vector<ChatMessage>& transcript,
                                    double temperature) {
  const std::string body = chat_request_body(model, transcript, temperature);
  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  for (int attempt = 0;; ++attempt) {
    if (options_.budget) options_.budget->consume();
    if (options_.rate_limiter) options_.rate_limiter->acquire();

    const std::string sent_at = utc_timestamp();
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body, "application/json");
    const double latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const int status = res ? res->status : 0;
    std::string error_text;
    if (!res) error_text = httplib::to_string(res.error());

    std::optional<ChatResult> parsed;
    std::string parse_error;
    if (status == 200) {
      try {
        parsed = parse_chat_response(res->body);
      } catch (const TransportError& e) {
        parse_error = e.what();
      }
    }

    if (options_.log) {
      json line{{"sent_at", sent_at},
                {"received_at", utc_timestamp()},
                {"model", model},
                {"attempt", attempt},
                {"status", status},
                {"latency_ms", std::round(latency_ms * 1000.0) / 1000.0},
                {"request_messages", transcript.size()}};
      if (parsed) {
        line["prompt_tokens"] = parsed->usage.prompt_tokens;
        line["completion_tokens"] = parsed->usage.completion_tokens;
        line["response"] = parsed->text;
      }
      if (!error_text.empty()) line["error"] = error_text;
      if (!parse_error.empty()) line["error"] = parse_error;
      options_.log->write(line.dump());
    }

    if (parsed) {
      parsed->retries = attempt;
      return *std::move(parsed);
    }
    if (status == 200) throw TransportError(parse_error, status);

    if (status == 401 || status == 403) {
      throw AuthError(fmt::format("chat endpoint rejected the credential (HTTP {})", status),
                      status);
    }
    if (!is_retryable_status(status)) {
      throw TransportError(
          fmt::format("chat endpoint returned HTTP {}: {}", status, res ? res->body : error_text),
          status);
    }
    if (attempt >= options_.retry.max_retries) {
      throw TransportError(
          fmt::format("chat request failed after {} retries (last status {}{}{})", attempt, status,
                      error_text.empty() ? "" : ", ", error_text),
          status);
    }

    auto delay = options_.retry.delay_for(attempt);
    if (res && res->has_header("Retry-After")) {
      try {
        const auto hinted = std::chrono::milliseconds(
            static_cast<std::int64_t>(std::stod(res->get_header_value("Retry-After")) * 1000.0));
        delay = std::min(std::max(delay, hinted), options_.retry.max_delay);
      } catch (const std::exception&) {
        // HTTP-date form; keep the computed backoff.
      }
    }
    options_.sleep(delay);
  }
}

}  // namespace nvlab
