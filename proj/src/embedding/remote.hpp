#pragma once

#include <string>
#include <vector>

#include "common/http_json.hpp"
#include "embedding/embedding.hpp"

namespace redline::embedding {

/// Client of an embedding service: POST <url>/embed with {"texts": [...]},
/// expecting {"vectors": [[...], ...], "model": str}.
class RemoteProvider : public Provider {
 public:
  static constexpr std::size_t kBatchSize = 32;

  explicit RemoteProvider(std::string url, http::RetryPolicy policy = {});

  std::string id() const override { return "remote:" + endpoint_->url(); }
  InputKind input_kind() const override { return InputKind::SourceText; }
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::unique_ptr<http::JsonEndpoint> endpoint_;
};

}  // namespace redline::embedding
