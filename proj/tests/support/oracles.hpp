#pragma once

// Brute-force reference implementations used to check the library.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "adaptchunk/document.hpp"

namespace oracle {

// RC by scanning every offset 1..L-1 for a chunk boundary.
std::optional<double> rc(const adaptchunk::Document& doc, const adaptchunk::Chunking& chunking);

// BI by scanning every offset 1..L-1.
double bi(const adaptchunk::Document& doc, const adaptchunk::Chunking& chunking, std::size_t tau);

double sc(const std::vector<std::size_t>& sizes, std::size_t lo, std::size_t hi);

// Cosine of two ASCII texts as bags of lowercase alphanumeric words hashed
// into d buckets. nullopt when either side has no words.
std::optional<double> bow_cosine(const std::string& a, const std::string& b, std::size_t d = 256);

std::optional<double> icc(const adaptchunk::Document& doc, const adaptchunk::Chunking& chunking, std::size_t d = 256);

// Window index sets over chunk sizes, as in the DCC definition.
std::vector<std::vector<std::size_t>> windows(const std::vector<std::size_t>& sizes, std::size_t budget,
                                              std::size_t step);

std::optional<double> dcc(const adaptchunk::Document& doc, const adaptchunk::Chunking& chunking, std::size_t budget,
                          std::size_t step, std::size_t d = 256);

// Whitespace-run token count, written independently of the library.
std::size_t ws_tokens(const std::string& s);

}  // namespace oracle
