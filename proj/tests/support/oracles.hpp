#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace redline::oracle {

// Longest common subsequence by memoized recursion over suffixes.
inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> long {
    if (i == a.size() || j == b.size()) return 0;
    long& slot = memo[i][j];
    if (slot >= 0) return slot;
    if (a[i] == b[j]) return slot = 1 + go(i + 1, j + 1);
    return slot = std::max(go(i + 1, j), go(i, j + 1));
  };
  return static_cast<std::size_t>(go(0, 0));
}

inline double diff_ratio(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  return 2.0 * static_cast<double>(lcs(a, b)) / static_cast<double>(a.size() + b.size());
}

// FNV-1a 64 computed bytewise with the published offset basis and prime.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
  return h;
}

// Sparse signed bucket counts of a whitespace-split token bag.
inline std::map<std::size_t, double> hashed_bag(const std::string& text, std::size_t dim) {
  std::map<std::size_t, double> bag;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::uint64_t h = fnv1a64(tok);
    bag[static_cast<std::size_t>(h % dim)] += (h & (1ull << 63)) ? -1.0 : 1.0;
  }
  return bag;
}

// Cosine of two hashed bags, straight from the sparse counts.
inline double hashed_bag_cosine(const std::string& a, const std::string& b, std::size_t dim) {
  auto x = hashed_bag(a, dim), y = hashed_bag(b, dim);
  double dot = 0, nx = 0, ny = 0;
  for (auto& [k, v] : x) {
    nx += v * v;
    auto it = y.find(k);
    if (it != y.end()) dot += v * it->second;
  }
  for (auto& [k, v] : y) ny += v * v;
  return dot / std::sqrt(nx * ny);
}

// Plain double cosine of two dense vectors.
inline double dense_cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * double(b[i]);
    na += double(a[i]) * double(a[i]);
    nb += double(b[i]) * double(b[i]);
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace redline::oracle
