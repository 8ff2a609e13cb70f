#include "schmm/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "schmm/markov.hpp"

static_assert(std::endian::native == std::endian::little,
              "stream cache I/O assumes a little-endian host");

namespace schmm {

namespace {

constexpr char kStreamMagic[8] = {'S', 'C', 'H', 'M', 'M', 'T', 'S', '1'};

// Inverse-CDF draw from an unnormalized nonnegative weight vector.
int sample_categorical(std::mt19937_64& rng, const double* w, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i];
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (int i = 0; i < n; ++i) {
    u -= w[i];
    if (u <= 0.0) return i;
  }
  return n - 1;  // roundoff spill
}

void dirichlet_row(std::mt19937_64& rng, double concentration, double* row, int n) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    row[i] = gamma(rng);
    total += row[i];
  }
  // A row of all-underflowed gammas (tiny concentration) would not normalize.
  if (!(total > 0.0)) {
    for (int i = 0; i < n; ++i) row[i] = 1.0;
    total = n;
  }
  for (int i = 0; i < n; ++i) row[i] /= total;
}

}  // namespace

uint32_t Vocab::id_or_unk(const std::string& w) const {
  auto it = ids.find(w);
  if (it != ids.end()) return it->second;
  if (!has_unk) {
    fail(ErrorKind::data, "token '" + w + "' not in vocabulary (built without <unk>)");
  }
  return ids.at(kUnkSymbol);
}

std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open corpus file: " + path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> sent;
    std::string tok;
    while (ls >> tok) sent.push_back(std::move(tok));
    if (!sent.empty()) sentences.push_back(std::move(sent));
  }
  if (sentences.empty()) fail(ErrorKind::data, "corpus is empty: " + path);
  return sentences;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& sentences,
                  int min_count, uint32_t max_size) {
  if (sentences.empty()) fail(ErrorKind::data, "cannot build vocabulary from empty corpus");

  struct Entry {
    int64_t count = 0;
    size_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry> freq;
  size_t order = 0;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      if (tok == Vocab::kEosSymbol || tok == Vocab::kUnkSymbol) {
        fail(ErrorKind::data, "corpus contains reserved symbol: " + tok);
      }
      auto [it, fresh] = freq.try_emplace(tok);
      if (fresh) it->second.first_seen = order++;
      ++it->second.count;
    }
  }

  std::vector<std::pair<std::string, Entry>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });

  size_t kept = 0;
  for (const auto& [tok, e] : ranked) {
    (void)tok;
    if (e.count < min_count) break;  // ranked by count, rest are below too
    if (max_size != 0 && kept >= max_size) break;
    ++kept;
  }

  Vocab v;
  v.has_unk = kept < ranked.size();
  v.words.push_back(Vocab::kEosSymbol);
  if (v.has_unk) v.words.push_back(Vocab::kUnkSymbol);
  for (size_t i = 0; i < kept; ++i) v.words.push_back(ranked[i].first);
  for (uint32_t i = 0; i < v.words.size(); ++i) v.ids[v.words[i]] = i;
  return v;
}

TokenStream prepare_stream(const std::vector<std::vector<std::string>>& sentences,
                           const Vocab& vocab, uint64_t seed) {
  std::vector<size_t> order(sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  TokenStream stream;
  stream.W = vocab.size();
  size_t total = sentences.size();
  for (const auto& s : sentences) total += s.size();
  stream.tokens.reserve(total);
  for (size_t i : order) {
    for (const auto& tok : sentences[i]) stream.tokens.push_back(vocab.id_or_unk(tok));
    stream.tokens.push_back(Vocab::kEos);
  }
  stream.holdout_start = stream.tokens.size();
  return stream;
}

std::pair<std::span<const uint32_t>, std::span<const uint32_t>> train_test_split(
    TokenStream& stream, double holdout_frac) {
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) {
    fail(ErrorKind::invalid_argument, "holdout_frac must be in (0,1), got " +
                                          std::to_string(holdout_frac));
  }
  const size_t T = stream.size();
  const auto test_len = static_cast<size_t>(std::ceil(holdout_frac * static_cast<double>(T)));
  if (test_len == 0 || test_len >= T) {
    fail(ErrorKind::data, "degenerate train/test split (T=" + std::to_string(T) +
                              ", holdout=" + std::to_string(test_len) + ")");
  }
  stream.holdout_start = T - test_len;
  return {stream.train_view(), stream.test_view()};
}

std::pair<PointParams, TokenStream> generate_synthetic(int K, int W, int64_t T,
                                                       double concentration,
                                                       uint64_t seed) {
  if (K < 2 || W < 2 || T < 1) {
    fail(ErrorKind::invalid_argument, "generate_synthetic requires K>=2, W>=2, T>=1");
  }
  if (!(concentration > 0.0)) {
    fail(ErrorKind::invalid_argument, "concentration must be > 0");
  }
  std::mt19937_64 rng(seed);
  PointParams params{Mat(K, K), Mat(K, W), {}};
  for (int k = 0; k < K; ++k) dirichlet_row(rng, concentration, params.theta.row(k), K);
  for (int k = 0; k < K; ++k) dirichlet_row(rng, concentration, params.phi.row(k), W);
  params.init = stationary_distribution(params.theta);

  TokenStream stream;
  stream.W = static_cast<uint32_t>(W);
  stream.tokens.resize(static_cast<size_t>(T));
  int z = sample_categorical(rng, params.init.data(), K);
  for (int64_t t = 0; t < T; ++t) {
    stream.tokens[t] = static_cast<uint32_t>(sample_categorical(rng, params.phi.row(z), W));
    z = sample_categorical(rng, params.theta.row(z), K);
  }
  stream.holdout_start = stream.tokens.size();
  return {std::move(params), std::move(stream)};
}

void save_vocab(const Vocab& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::data, "cannot write vocab file: " + path);
  for (uint32_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words[i] << '\t' << i << '\n';
  }
  if (!out.flush()) fail(ErrorKind::data, "failed writing vocab file: " + path);
}

Vocab load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open vocab file: " + path);
  Vocab v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorKind::artifact, "malformed vocab line in " + path + ": " + line);
    }
    std::string tok = line.substr(0, tab);
    uint32_t idx = 0;
    try {
      idx = static_cast<uint32_t>(std::stoul(line.substr(tab + 1)));
    } catch (const std::exception&) {
      fail(ErrorKind::artifact, "malformed vocab index in " + path + ": " + line);
    }
    if (idx != v.words.size()) {
      fail(ErrorKind::artifact, "vocab indices out of order in " + path);
    }
    v.words.push_back(tok);
  }
  if (v.words.empty() || v.words[0] != Vocab::kEosSymbol) {
    fail(ErrorKind::artifact, "vocab file missing EOS at index 0: " + path);
  }
  v.has_unk = v.words.size() > 1 && v.words[1] == Vocab::kUnkSymbol;
  for (uint32_t i = 0; i < v.words.size(); ++i) v.ids[v.words[i]] = i;
  return v;
}

void save_stream(const TokenStream& stream, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::data, "cannot write stream cache: " + tmp);
    out.write(kStreamMagic, sizeof(kStreamMagic));
    const uint64_t T = stream.tokens.size();
    out.write(reinterpret_cast<const char*>(&T), sizeof(T));
    out.write(reinterpret_cast<const char*>(stream.tokens.data()),
              static_cast<std::streamsize>(T * sizeof(uint32_t)));
    if (!out.flush()) fail(ErrorKind::data, "failed writing stream cache: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    fail(ErrorKind::data, "cannot move stream cache into place: " + path);
  }
}

TokenStream load_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "cannot open stream cache: " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kStreamMagic, 8) != 0) {
    fail(ErrorKind::artifact, "bad stream cache magic: " + path);
  }
  uint64_t T = 0;
  if (!in.read(reinterpret_cast<char*>(&T), sizeof(T))) {
    fail(ErrorKind::artifact, "truncated stream cache header: " + path);
  }
  TokenStream stream;
  stream.tokens.resize(T);
  if (!in.read(reinterpret_cast<char*>(stream.tokens.data()),
               static_cast<std::streamsize>(T * sizeof(uint32_t)))) {
    fail(ErrorKind::artifact, "truncated stream cache body: " + path);
  }
  uint32_t maxtok = 0;
  for (uint32_t t : stream.tokens) maxtok = std::max(maxtok, t);
  stream.W = stream.tokens.empty() ? 0 : maxtok + 1;
  stream.holdout_start = stream.tokens.size();
  return stream;
}

}  // namespace schmm
