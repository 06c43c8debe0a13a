#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "source_parser/source_parser.hpp"

namespace redline::embedding {

struct EmbeddingVector {
  std::vector<float> values;
  std::size_t dim = 0;
  std::string provider_id;

  bool operator==(const EmbeddingVector&) const = default;
};

class EmbeddingError : public std::runtime_error {
 public:
  enum class Kind { ProviderUnavailable, DimensionMismatch, ZeroVector, ProviderMismatch, InvalidInput };
  EmbeddingError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// What a provider wants to see of a function.
enum class InputKind { NormalizedBody, SourceText };

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual InputKind input_kind() const = 0;
  /// Order- and length-preserving. Safe for concurrent calls.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

/// The text handed to `provider` for one function.
std::string provider_input(const source::FunctionUnit& fn, InputKind kind, bool strip_docstrings = false);

/// Feature-hashing bag of whitespace-separated tokens: FNV-1a 64 picks one
/// of `dim` buckets and the top hash bit picks the sign; L2-normalized.
class BaselineProvider : public Provider {
 public:
  static constexpr std::size_t kDefaultDim = 512;
  explicit BaselineProvider(std::size_t dim = kDefaultDim) : dim_(dim) {}

  std::string id() const override;
  InputKind input_kind() const override { return InputKind::NormalizedBody; }
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

  EmbeddingVector embed(const std::string& text) const;

 private:
  std::size_t dim_;
};

std::uint64_t fnv1a64(std::string_view bytes);

bool is_zero(const EmbeddingVector& v);

/// Cosine similarity in double precision, clamped to [-1, 1]. Throws
/// EmbeddingError(ProviderMismatch | DimensionMismatch | ZeroVector).
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace redline::embedding
