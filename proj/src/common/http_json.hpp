#pragma once

#include <chrono>
#include <functional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace redline::http {

struct RetryPolicy {
  int retries = 3;  // attempts after the first failure
  std::chrono::milliseconds backoff_base{200};
  std::chrono::seconds timeout{120};
};

/// A failed exchange. `retriable` is false for 4xx replies.
struct HttpError : std::runtime_error {
  HttpError(const std::string& message, bool retriable) : std::runtime_error(message), retriable(retriable) {}
  bool retriable;
};

struct BadUrl : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A JSON-over-HTTP service rooted at an http:// URL.
class JsonEndpoint {
 public:
  explicit JsonEndpoint(std::string url, RetryPolicy policy = {});

  const std::string& url() const { return url_; }
  const RetryPolicy& policy() const { return policy_; }

  /// POST `body` to `path` once. Throws HttpError.
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  /// POST with retries and exponential backoff. `check` may throw HttpError
  /// to reject a reply, which then counts as a failed attempt.
  nlohmann::json post_with_retries(const std::string& path, const nlohmann::json& body,
                                   const std::function<void(const nlohmann::json&)>& check = {}) const;

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string base_path_;
  RetryPolicy policy_;
};

}  // namespace redline::http
