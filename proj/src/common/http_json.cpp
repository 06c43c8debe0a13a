#include "common/http_json.hpp"

#include <thread>

#include "httplib.h"

namespace redline::http {

JsonEndpoint::JsonEndpoint(std::string url, RetryPolicy policy) : url_(std::move(url)), policy_(policy) {
  while (!url_.empty() && url_.back() == '/') url_.pop_back();
  const std::string scheme = "http://";
  if (url_.compare(0, scheme.size(), scheme) != 0) throw BadUrl("url must start with http://: " + url_);
  std::string rest = url_.substr(scheme.size());
  auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) base_path_ = rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    host_ = authority.substr(0, colon);
    try {
      std::size_t used = 0;
      port_ = std::stoi(authority.substr(colon + 1), &used);
      if (used != authority.size() - colon - 1 || port_ <= 0 || port_ > 65535) throw BadUrl("");
    } catch (const std::exception&) {
      throw BadUrl("bad port in url: " + url_);
    }
  } else {
    host_ = authority;
  }
  if (host_.empty()) throw BadUrl("url has no host: " + url_);
}

nlohmann::json JsonEndpoint::post(const std::string& path, const nlohmann::json& body) const {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(policy_.timeout);
  client.set_read_timeout(policy_.timeout);
  client.set_write_timeout(policy_.timeout);
  auto res = client.Post(base_path_ + path, body.dump(), "application/json");
  if (!res) throw HttpError(url_ + path + ": " + httplib::to_string(res.error()), true);
  if (res->status != 200)
    throw HttpError(url_ + path + " returned HTTP " + std::to_string(res->status),
                    res->status < 400 || res->status >= 500);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw HttpError(url_ + path + " reply is not JSON: " + e.what(), true);
  }
}

nlohmann::json JsonEndpoint::post_with_retries(const std::string& path, const nlohmann::json& body,
                                               const std::function<void(const nlohmann::json&)>& check) const {
  for (int attempt = 0;; ++attempt) {
    try {
      auto reply = post(path, body);
      if (check) check(reply);
      return reply;
    } catch (const HttpError& e) {
      if (!e.retriable || attempt >= policy_.retries) throw;
    }
    std::this_thread::sleep_for(policy_.backoff_base * (1 << attempt));
  }
}

}  // namespace redline::http
