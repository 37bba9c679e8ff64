#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bellrank/behavior.hpp"
#include "bellrank/corpus.hpp"
#include "bellrank/inference.hpp"
#include "bellrank/rankfit.hpp"

namespace bellrank {

// All readers throw SchemaViolationError on malformed input: wrong header,
// wrong arity, out-of-range values, unreadable file.

// Header `x,y,a,b,count`. Outcomes are +1/-1, or 0/1 when bit_outcomes is
// set (mapped via a = (-1)^bit). Duplicate rows sum.
OutcomeCountTable read_counts_csv(const std::filesystem::path& path,
                                  bool bit_outcomes = false);

// Header `participant_id,x,y,a,b`, one row per trial.
std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path,
                                         bool bit_outcomes = false);

struct RankCsvData {
  RankTable table;
  bool from_tokens = false;                // true when header was token,count
  std::vector<TokenRankEntry> token_map;   // populated when from_tokens
};

// Header `rank,count` (ranks must be positive, duplicates rejected) or
// `token,count` (ranks assigned by descending count, lexicographic ties).
RankCsvData read_rank_csv(const std::filesystem::path& path);

void write_counts_csv(const std::filesystem::path& path,
                      const OutcomeCountTable& counts);

void write_rank_csv(const std::filesystem::path& path, const RankTable& table);

void write_token_map_csv(const std::filesystem::path& path,
                         const std::vector<TokenRankEntry>& token_map);

// First line of the file, for sniffing counts vs trials inputs.
std::string read_csv_header(const std::filesystem::path& path);

}  // namespace bellrank
