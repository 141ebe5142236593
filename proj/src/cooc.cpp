#include "srsvd/cooc.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "srsvd/error.hpp"

namespace srsvd {

std::vector<std::string> read_tokens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open token file '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string word;
  while (in >> word) tokens.push_back(std::move(word));
  if (in.bad()) fail(ErrorCode::io, "read error on '" + path.string() + "'");
  return tokens;
}

std::vector<std::string> top_words(const std::vector<std::string>& tokens, std::size_t limit) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : tokens) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) out.push_back(ranked[i].first);
  return out;
}

Cooccurrence build_cooccurrence(const std::vector<std::string>& tokens, std::size_t contexts,
                                std::size_t targets, std::size_t window) {
  if (contexts == 0 || targets == 0) {
    fail(ErrorCode::invalid_argument, "vocabulary sizes must be at least 1");
  }
  if (window == 0) fail(ErrorCode::invalid_argument, "window radius must be at least 1");
  if (tokens.empty()) fail(ErrorCode::invalid_argument, "empty vocabulary: corpus has no tokens");

  Cooccurrence out{SparseMatrix(1, 1, {0, 0}, {}, {}), top_words(tokens, contexts),
                   top_words(tokens, targets)};

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::unordered_map<std::string_view, std::size_t> context_index;
  std::unordered_map<std::string_view, std::size_t> target_index;
  for (std::size_t j = 0; j < out.context_words.size(); ++j) context_index[out.context_words[j]] = j;
  for (std::size_t i = 0; i < out.target_words.size(); ++i) target_index[out.target_words[i]] = i;

  std::vector<std::size_t> ctx(tokens.size(), none);
  std::vector<std::size_t> tgt(tokens.size(), none);
  for (std::size_t p = 0; p < tokens.size(); ++p) {
    if (auto it = context_index.find(tokens[p]); it != context_index.end()) ctx[p] = it->second;
    if (auto it = target_index.find(tokens[p]); it != target_index.end()) tgt[p] = it->second;
  }

  const std::size_t n_targets = out.target_words.size();
  std::vector<std::size_t> occurrences(out.context_words.size(), 0);
  std::unordered_map<std::size_t, std::size_t> counts;  // j * n_targets + i
  // Stamp per target so a target seen twice in one window counts once.
  std::vector<std::size_t> stamp(n_targets, none);

  for (std::size_t p = 0; p < tokens.size(); ++p) {
    const std::size_t j = ctx[p];
    if (j == none) continue;
    ++occurrences[j];
    const std::size_t lo = p >= window ? p - window : 0;
    const std::size_t hi = std::min(tokens.size() - 1, p + window);
    for (std::size_t r = lo; r <= hi; ++r) {
      if (r == p) continue;
      const std::size_t i = tgt[r];
      if (i == none || stamp[i] == p) continue;
      stamp[i] = p;
      ++counts[j * n_targets + i];
    }
  }

  std::vector<Triplet> triplets;
  triplets.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    const std::size_t j = key / n_targets;
    const std::size_t i = key % n_targets;
    triplets.push_back(
        {j, i, static_cast<double>(count) / static_cast<double>(occurrences[j])});
  }
  out.matrix = SparseMatrix::from_triplets(out.context_words.size(), n_targets, std::move(triplets));
  return out;
}

Cooccurrence build_cooccurrence(const CoocSpec& spec) {
  return build_cooccurrence(read_tokens(spec.tokens), spec.contexts, spec.targets, spec.window);
}

}  // namespace srsvd
