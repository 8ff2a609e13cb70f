#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schmm/common.hpp"
#include "schmm/model.hpp"

namespace schmm {

// Token <-> index map. Index 0 is always the end-of-sentence marker; index 1
// is the unknown-word bucket whenever any corpus token was filtered out.
struct Vocab {
  static constexpr const char* kEosSymbol = "</s>";
  static constexpr const char* kUnkSymbol = "<unk>";
  static constexpr uint32_t kEos = 0;

  std::vector<std::string> words;               // index -> token
  std::unordered_map<std::string, uint32_t> ids;  // token -> index
  bool has_unk = false;

  uint32_t size() const { return static_cast<uint32_t>(words.size()); }
  // Maps filtered/unseen tokens to <unk>; throws a data error if the vocab
  // was built without one.
  uint32_t id_or_unk(const std::string& w) const;
};

// The single long observation sequence. holdout_start marks where the final
// contiguous test segment begins (== size() until a split is applied).
struct TokenStream {
  std::vector<uint32_t> tokens;
  uint32_t W = 0;
  size_t holdout_start = 0;

  size_t size() const { return tokens.size(); }
  std::span<const uint32_t> train_view() const {
    return {tokens.data(), holdout_start};
  }
  std::span<const uint32_t> test_view() const {
    return {tokens.data() + holdout_start, tokens.size() - holdout_start};
  }
};

// One sentence per line, whitespace-separated tokens; blank lines skipped.
std::vector<std::vector<std::string>> read_corpus(const std::string& path);

// Frequency-ranked vocabulary (ties broken by first appearance). Tokens seen
// fewer than min_count times, or ranked beyond max_size (0 = unlimited), fall
// into <unk>.
Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences,
                  int min_count = 1, uint32_t max_size = 0);

// Shuffles sentence order with the seeded engine, then concatenates
// sentences, appending one EOS after each.
TokenStream prepare_stream(const std::vector<std::vector<std::string>>& sentences,
                           const Vocab& vocab, uint64_t seed);

// Marks the final ceil(holdout_frac * T) tokens as the test segment and
// returns (train view, test view). Throws if either side would be empty.
std::pair<std::span<const uint32_t>, std::span<const uint32_t>> train_test_split(
    TokenStream& stream, double holdout_frac);

// Draws HMM parameters (rows ~ Dirichlet(concentration)), starts the chain at
// the stationary distribution of the drawn transition matrix, and simulates T
// tokens.
std::pair<PointParams, TokenStream> generate_synthetic(int K, int W, int64_t T,
                                                       double concentration,
                                                       uint64_t seed);

// Vocab file: token <tab> index, sorted by index.
void save_vocab(const Vocab& vocab, const std::string& path);
Vocab load_vocab(const std::string& path);

// Stream cache: 8-byte magic, u64 little-endian length, then T little-endian
// u32 token ids.
void save_stream(const TokenStream& stream, const std::string& path);
TokenStream load_stream(const std::string& path);

}  // namespace schmm
