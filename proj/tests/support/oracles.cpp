#include "oracles.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>

namespace oracle {

using adaptchunk::Chunking;
using adaptchunk::Document;

namespace {

std::vector<bool> cut_flags(const Document& doc, const Chunking& chunking) {
  std::vector<bool> cut(doc.length() + 1, false);
  for (std::size_t k = 0; k + 1 < chunking.chunks.size(); ++k) cut[chunking.chunks[k].end] = true;
  return cut;
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  }
  return h;
}

std::map<std::size_t, double> buckets(const std::string& text, std::size_t d) {
  std::map<std::size_t, double> out;
  std::string w;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const char c = i < text.size() ? text[i] : ' ';
    if (std::isalnum(static_cast<unsigned char>(c))) {
      w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!w.empty()) {
      out[fnv(w) % d] += 1;
      w.clear();
    }
  }
  return out;
}

std::string slice(const Document& doc, std::size_t a, std::size_t b) { return std::string(doc.slice(a, b)); }

}  // namespace

std::optional<double> rc(const Document& doc, const Chunking& chunking) {
  if (doc.coref_pairs.empty()) return std::nullopt;
  const auto cut = cut_flags(doc, chunking);
  std::size_t broken = 0;
  for (const auto& p : doc.coref_pairs) {
    bool hit = false;
    for (std::size_t b = 1; b < doc.length(); ++b) {
      if (cut[b] && p.entity_start < b && b <= p.pronoun_end) hit = true;
    }
    broken += hit;
  }
  return 1.0 - static_cast<double>(broken) / static_cast<double>(doc.coref_pairs.size());
}

double bi(const Document& doc, const Chunking& chunking, std::size_t tau) {
  const auto cut = cut_flags(doc, chunking);
  std::size_t intact = 0;
  for (const auto& blk : doc.blocks) {
    bool broken = false;
    for (std::size_t b = 1; b < doc.length(); ++b) {
      const long lo = static_cast<long>(blk.start) + static_cast<long>(tau);
      const long hi = static_cast<long>(blk.end) - static_cast<long>(tau);
      if (cut[b] && lo < static_cast<long>(b) && static_cast<long>(b) < hi) broken = true;
    }
    intact += !broken;
  }
  return static_cast<double>(intact) / static_cast<double>(doc.blocks.size());
}

double sc(const std::vector<std::size_t>& sizes, std::size_t lo, std::size_t hi) {
  std::size_t ok = 0;
  for (auto s : sizes) ok += (s >= lo && s <= hi);
  return static_cast<double>(ok) / static_cast<double>(sizes.size());
}

std::optional<double> bow_cosine(const std::string& a, const std::string& b, std::size_t d) {
  const auto x = buckets(a, d), y = buckets(b, d);
  if (x.empty() || y.empty()) return std::nullopt;
  double dot = 0, nx = 0, ny = 0;
  for (auto [k, v] : x) {
    nx += v * v;
    auto it = y.find(k);
    if (it != y.end()) dot += v * it->second;
  }
  for (auto [k, v] : y) ny += v * v;
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

std::optional<double> icc(const Document& doc, const Chunking& chunking, std::size_t d) {
  double total = 0;
  std::size_t used = 0;
  for (const auto& c : chunking.chunks) {
    std::vector<std::string> pieces;
    for (const auto& blk : doc.blocks) {
      const std::size_t a = std::max(blk.start, c.start), b = std::min(blk.end, c.end);
      if (a >= b) continue;
      std::string t = slice(doc, a, b);
      const auto first = t.find_first_not_of(" \t\n\r\f\v");
      if (first == std::string::npos) continue;
      t = t.substr(first, t.find_last_not_of(" \t\n\r\f\v") - first + 1);
      pieces.push_back(t);
    }
    if (pieces.size() < 2) continue;
    const std::string whole = slice(doc, c.start, c.end);
    double sum = 0;
    std::size_t n = 0;
    for (const auto& p : pieces) {
      if (auto cos = bow_cosine(p, whole, d)) {
        sum += *cos;
        ++n;
      }
    }
    if (n < 2) continue;
    total += sum / static_cast<double>(n);
    ++used;
  }
  if (!used) return std::nullopt;
  return std::max(0.0, total / static_cast<double>(used));
}

std::vector<std::vector<std::size_t>> windows(const std::vector<std::size_t>& sizes, std::size_t budget,
                                              std::size_t step) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < sizes.size(); i += step) {
    if (sizes.size() - i < 2) break;
    std::vector<std::size_t> w;
    std::size_t total = 0;
    for (std::size_t j = i; j < sizes.size(); ++j) {
      if (w.size() >= 2 && total + sizes[j] > budget) break;
      w.push_back(j);
      total += sizes[j];
    }
    out.push_back(w);
  }
  return out;
}

std::optional<double> dcc(const Document& doc, const Chunking& chunking, std::size_t budget, std::size_t step,
                          std::size_t d) {
  std::vector<std::size_t> sizes;
  for (const auto& c : chunking.chunks) sizes.push_back(ws_tokens(slice(doc, c.start, c.end)));
  double total = 0;
  std::size_t used = 0;
  for (const auto& w : windows(sizes, budget, step)) {
    std::string text;
    for (auto k : w) text += slice(doc, chunking.chunks[k].start, chunking.chunks[k].end);
    double sum = 0;
    std::size_t n = 0;
    for (auto k : w) {
      if (auto cos = bow_cosine(text, slice(doc, chunking.chunks[k].start, chunking.chunks[k].end), d)) {
        sum += *cos;
        ++n;
      }
    }
    if (!n) continue;
    total += sum / static_cast<double>(n);
    ++used;
  }
  if (!used) return std::nullopt;
  return std::max(0.0, total / static_cast<double>(used));
}

std::size_t ws_tokens(const std::string& s) {
  std::size_t n = 0;
  bool in = false;
  for (unsigned char c : s) {
    const bool space = std::isspace(c);
    if (!space && !in) ++n;
    in = !space;
  }
  return n;
}

}  // namespace oracle
