#include "embedding/remote.hpp"

#include <cmath>

namespace redline::embedding {

namespace {

using Kind = EmbeddingError::Kind;

void check_reply(const nlohmann::json& reply, std::size_t expected) {
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array())
    throw http::HttpError("embed reply lacks a vectors array", true);
  const auto& vectors = reply["vectors"];
  if (vectors.size() != expected)
    throw http::HttpError("embed reply has " + std::to_string(vectors.size()) + " vectors for " +
                              std::to_string(expected) + " texts",
                          true);
  for (const auto& v : vectors) {
    if (!v.is_array()) throw http::HttpError("embed reply vector is not an array", true);
    for (const auto& x : v)
      if (!x.is_number() || !std::isfinite(x.get<double>()))
        throw http::HttpError("embed reply vector holds a non-finite value", true);
  }
}

}  // namespace

RemoteProvider::RemoteProvider(std::string url, http::RetryPolicy policy) {
  try {
    endpoint_ = std::make_unique<http::JsonEndpoint>(std::move(url), policy);
  } catch (const http::BadUrl& e) {
    throw EmbeddingError(Kind::InvalidInput, std::string("embedding provider: ") + e.what());
  }
}

std::vector<EmbeddingVector> RemoteProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const std::string pid = id();
  for (std::size_t begin = 0; begin < texts.size(); begin += kBatchSize) {
    std::size_t end = std::min(texts.size(), begin + kBatchSize);
    nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                                              texts.begin() + static_cast<std::ptrdiff_t>(end))}};
    nlohmann::json reply;
    try {
      reply = endpoint_->post_with_retries("/embed", body, [&](const nlohmann::json& r) { check_reply(r, end - begin); });
    } catch (const http::HttpError& e) {
      throw EmbeddingError(Kind::ProviderUnavailable, std::string("embedding provider unavailable: ") + e.what());
    }
    for (const auto& v : reply["vectors"]) {
      if (v.empty()) throw EmbeddingError(Kind::DimensionMismatch, "embedding provider returned an empty vector");
      if (!out.empty() && v.size() != out.front().dim)
        throw EmbeddingError(Kind::DimensionMismatch, "embedding provider returned dims " +
                                                          std::to_string(out.front().dim) + " and " +
                                                          std::to_string(v.size()));
      EmbeddingVector e;
      e.dim = v.size();
      e.values.reserve(v.size());
      for (const auto& x : v) e.values.push_back(static_cast<float>(x.get<double>()));
      e.provider_id = pid;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace redline::embedding
