#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "embedding/embedding.hpp"

namespace redline::embedding {

/// Hex SHA-256 of `text`.
std::string sha256_hex(std::string_view text);

/// Append-only on-disk vector store. Record layout (little endian):
///   u32 key_len | key bytes | u32 dim | dim x f32
/// Later records for the same key win; a truncated trailing record is
/// ignored. Thread-safe.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path file);

  static std::string key_for(const std::string& provider_id, std::string_view text);

  std::optional<std::vector<float>> get(const std::string& key) const;
  void put(const std::string& key, const std::vector<float>& values);
  std::size_t size() const;
  const std::filesystem::path& path() const { return file_; }

 private:
  void load();

  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::vector<float>> entries_;
};

/// Serves vectors from `cache` and asks `inner` only for misses.
class CachedProvider : public Provider {
 public:
  CachedProvider(Provider& inner, EmbeddingCache& cache) : inner_(inner), cache_(cache) {}

  std::string id() const override { return inner_.id(); }
  InputKind input_kind() const override { return inner_.input_kind(); }
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

 private:
  Provider& inner_;
  EmbeddingCache& cache_;
};

}  // namespace redline::embedding
