#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bellrank/rankfit.hpp"

namespace bellrank {

// Preprocessing switches, echoed verbatim into every output for provenance.
// Lemmatization is deliberately absent: it needs a language resource this
// pipeline does not carry, and recording that fact beats implying it ran.
struct PreprocessConfig {
  bool case_fold = true;
  bool strip_punctuation = true;
  std::optional<std::set<std::string>> stopword_list;
  int min_token_length = 1;
};

// Whitespace tokenization with optional ASCII case folding, optional
// stripping of leading/trailing non-alphanumeric bytes (multibyte UTF-8
// sequences are left intact), stopword removal and a minimum length filter.
// Deterministic; empty input yields an empty sequence.
std::vector<std::string> tokenize(std::string_view text,
                                  const PreprocessConfig& config);

struct TokenRankEntry {
  std::string token;
  std::uint64_t rank = 0;
  std::uint64_t count = 0;
};

struct RankedCorpus {
  RankTable table;
  std::vector<TokenRankEntry> token_map;  // rank order
};

// Counts per distinct token; ranks by descending count with lexicographic
// tie-break, which makes the table invariant under permutations of the
// input sequence.
RankedCorpus build_rank_table(std::span<const std::string> tokens);

// Same rank assignment for pre-aggregated (token, count) data.
RankedCorpus rank_token_counts(const std::map<std::string, std::uint64_t>& counts);

struct HoldoutSplit {
  RankTable train;
  RankTable test;         // ranks defined by the TRAIN ordering
  std::uint64_t oov_count = 0;  // test occurrences of tokens unseen in train
};

// Occurrence-level thinning: each token occurrence lands in the test set
// independently with probability test_fraction. Both tables use the train
// table's rank assignment so a holdout likelihood is well-posed; test tokens
// absent from train are tallied as out-of-vocabulary and enter neither
// likelihood. Throws DegenerateSplitError if the train side ends up empty.
HoldoutSplit split_holdout(std::span<const std::string> tokens,
                           double test_fraction, std::uint64_t seed);

}  // namespace bellrank
