#pragma once

// Word co-occurrence probabilities p(target | context) from a whitespace
// tokenized corpus. Line breaks are ignored; the corpus is one token stream.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "srsvd/matrix.hpp"

namespace srsvd {

struct CoocSpec {
  std::size_t contexts = 1000;  // m, most frequent context words
  std::size_t targets = 1000;   // n, most frequent target words
  std::size_t window = 5;       // symmetric radius
  std::filesystem::path tokens;
};

struct Cooccurrence {
  SparseMatrix matrix;  // contexts x targets
  std::vector<std::string> context_words;
  std::vector<std::string> target_words;
};

std::vector<std::string> read_tokens(const std::filesystem::path& path);

// Most frequent `limit` words; equal counts are ordered lexicographically.
std::vector<std::string> top_words(const std::vector<std::string>& tokens, std::size_t limit);

// Entry (j, i) is the fraction of occurrences of context word j whose window
// (positions p - window .. p + window, excluding p) contains target word i.
// Vocabularies are capped at the number of distinct words.
Cooccurrence build_cooccurrence(const std::vector<std::string>& tokens, std::size_t contexts,
                                std::size_t targets, std::size_t window);
Cooccurrence build_cooccurrence(const CoocSpec& spec);

}  // namespace srsvd
