#include "bellrank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "bellrank/errors.hpp"
#include "bellrank/rng.hpp"

namespace bellrank {

namespace {

bool is_ascii_alnum(unsigned char c) {
  return c < 0x80 && std::isalnum(c) != 0;
}

// Strip leading/trailing ASCII punctuation; bytes >= 0x80 count as letters.
std::string_view strip_edges(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end) {
    const unsigned char c = static_cast<unsigned char>(token[begin]);
    if (c >= 0x80 || is_ascii_alnum(c)) break;
    ++begin;
  }
  while (end > begin) {
    const unsigned char c = static_cast<unsigned char>(token[end - 1]);
    if (c >= 0x80 || is_ascii_alnum(c)) break;
    --end;
  }
  return token.substr(begin, end - begin);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const PreprocessConfig& config) {
  if (config.min_token_length < 1) {
    throw std::invalid_argument("min_token_length must be >= 1");
  }
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    std::size_t end = pos;
    while (end < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    if (end == pos) break;
    std::string_view raw = text.substr(pos, end - pos);
    pos = end;

    if (config.strip_punctuation) raw = strip_edges(raw);
    if (raw.empty()) continue;

    std::string token(raw);
    if (config.case_fold) {
      for (char& c : token) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    if (config.stopword_list && config.stopword_list->count(token) > 0) {
      continue;
    }
    if (token.size() < static_cast<std::size_t>(config.min_token_length)) {
      continue;
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

RankedCorpus rank_token_counts(const std::map<std::string, std::uint64_t>& counts) {
  std::vector<TokenRankEntry> by_count;
  by_count.reserve(counts.size());
  for (const auto& [token, count] : counts) {
    if (count > 0) by_count.push_back({token, 0, count});
  }
  std::sort(by_count.begin(), by_count.end(),
            [](const TokenRankEntry& lhs, const TokenRankEntry& rhs) {
              if (lhs.count != rhs.count) return lhs.count > rhs.count;
              return lhs.token < rhs.token;
            });

  std::vector<RankEntry> entries;
  entries.reserve(by_count.size());
  for (std::size_t i = 0; i < by_count.size(); ++i) {
    by_count[i].rank = i + 1;
    entries.push_back({i + 1, by_count[i].count});
  }

  RankedCorpus corpus;
  corpus.table = RankTable(std::move(entries),
                           static_cast<std::uint64_t>(by_count.size()));
  corpus.token_map = std::move(by_count);
  return corpus;
}

RankedCorpus build_rank_table(std::span<const std::string> tokens) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& token : tokens) ++counts[token];
  return rank_token_counts(counts);
}

HoldoutSplit split_holdout(std::span<const std::string> tokens,
                           double test_fraction, std::uint64_t seed) {
  if (tokens.size() < 2) {
    throw DegenerateSplitError("holdout needs at least 2 token occurrences");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0,1)");
  }

  Xoshiro256pp rng(stream_seed(seed, 0x401d));
  std::vector<std::string> train_tokens;
  std::vector<std::string> test_tokens;
  train_tokens.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (rng.u01() < test_fraction) {
      test_tokens.push_back(token);
    } else {
      train_tokens.push_back(token);
    }
  }
  if (train_tokens.empty()) {
    throw DegenerateSplitError("every occurrence fell into the test split");
  }

  const RankedCorpus train_corpus = build_rank_table(train_tokens);

  std::map<std::string, std::uint64_t> train_rank;
  for (const auto& entry : train_corpus.token_map) {
    train_rank[entry.token] = entry.rank;
  }

  std::map<std::uint64_t, std::uint64_t> test_counts;
  std::uint64_t oov = 0;
  for (const auto& token : test_tokens) {
    const auto it = train_rank.find(token);
    if (it == train_rank.end()) {
      ++oov;
    } else {
      ++test_counts[it->second];
    }
  }

  std::vector<RankEntry> test_entries;
  test_entries.reserve(test_counts.size());
  for (const auto& [rank, count] : test_counts) {
    test_entries.push_back({rank, count});
  }

  HoldoutSplit split;
  split.train = train_corpus.table;
  split.test = RankTable(std::move(test_entries), split.train.support());
  split.oov_count = oov;
  return split;
}

}  // namespace bellrank
