#include "embedding/cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace redline::embedding {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

static_assert(sizeof(float) == 4, "f32 required");

}  // namespace

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path file) : file_(std::move(file)) { load(); }

std::string EmbeddingCache::key_for(const std::string& provider_id, std::string_view text) {
  return provider_id + "\n" + sha256_hex(text);
}

void EmbeddingCache::load() {
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  std::size_t pos = 0, n = data.size();
  while (pos + 4 <= n) {
    std::uint32_t key_len = get_u32(p + pos);
    if (pos + 4 + key_len + 4 > n) break;
    std::string key(data, pos + 4, key_len);
    std::uint32_t dim = get_u32(p + pos + 4 + key_len);
    std::size_t values_at = pos + 8 + key_len;
    if (values_at + std::size_t{dim} * 4 > n) break;
    std::vector<float> values(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      std::uint32_t bits = get_u32(p + values_at + 4 * i);
      std::memcpy(&values[i], &bits, 4);
    }
    entries_[std::move(key)] = std::move(values);
    pos = values_at + std::size_t{dim} * 4;
  }
}

std::optional<std::vector<float>> EmbeddingCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::put(const std::string& key, const std::vector<float>& values) {
  std::string record;
  put_u32(record, static_cast<std::uint32_t>(key.size()));
  record += key;
  put_u32(record, static_cast<std::uint32_t>(values.size()));
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(record, bits);
  }
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it != entries_.end() && it->second == values) return;
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write embedding cache " + file_.string());
  out.write(record.data(), static_cast<std::streamsize>(record.size()));
  out.flush();
  entries_[key] = values;
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::vector<EmbeddingVector> CachedProvider::embed_batch(const std::vector<std::string>& texts) {
  const std::string pid = inner_.id();
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::string> keys(texts.size());
  std::vector<std::size_t> missing;
  std::vector<std::string> missing_texts;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = EmbeddingCache::key_for(pid, texts[i]);
    if (auto hit = cache_.get(keys[i])) {
      out[i].dim = hit->size();
      out[i].values = std::move(*hit);
      out[i].provider_id = pid;
    } else {
      missing.push_back(i);
      missing_texts.push_back(texts[i]);
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_.embed_batch(missing_texts);
    for (std::size_t k = 0; k < missing.size(); ++k) {
      cache_.put(keys[missing[k]], fresh[k].values);
      out[missing[k]] = std::move(fresh[k]);
    }
  }
  return out;
}

}  // namespace redline::embedding
