#include "embedding/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace redline::embedding {

std::string provider_input(const source::FunctionUnit& fn, InputKind kind, bool strip_docstrings) {
  if (kind == InputKind::NormalizedBody) return fn.normalized_body;
  return strip_docstrings ? source::strip_docstring(fn.body_text) : fn.body_text;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string BaselineProvider::id() const { return "baseline-" + std::to_string(dim_); }

EmbeddingVector BaselineProvider::embed(const std::string& text) const {
  std::vector<double> acc(dim_, 0.0);
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == start) break;
    std::uint64_t h = fnv1a64(std::string_view(text).substr(start, i - start));
    acc[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : acc) norm += x * x;
  norm = std::sqrt(norm);
  EmbeddingVector v;
  v.dim = dim_;
  v.provider_id = id();
  v.values.resize(dim_, 0.0f);
  if (norm > 0.0)
    for (std::size_t k = 0; k < dim_; ++k) v.values[k] = static_cast<float>(acc[k] / norm);
  return v;
}

std::vector<EmbeddingVector> BaselineProvider::embed_batch(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

bool is_zero(const EmbeddingVector& v) {
  return std::all_of(v.values.begin(), v.values.end(), [](float x) { return x == 0.0f; });
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.provider_id != b.provider_id)
    throw EmbeddingError(EmbeddingError::Kind::ProviderMismatch,
                         "cannot compare vectors from '" + a.provider_id + "' and '" + b.provider_id + "'");
  if (a.values.size() != b.values.size())
    throw EmbeddingError(EmbeddingError::Kind::DimensionMismatch, "vector dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double x = a.values[i], y = b.values[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw EmbeddingError(EmbeddingError::Kind::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace redline::embedding
