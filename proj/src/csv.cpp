#include "bellrank/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bellrank/errors.hpp"

namespace bellrank {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaViolationError("cannot open '" + path.string() + "'");
  }
  return in;
}

long long parse_int(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaViolationError("expected integer for " + what + ", got '" +
                               raw + "'");
  }
  return value;
}

int parse_setting(const std::string& raw, const std::string& what) {
  const long long v = parse_int(raw, what);
  if (v != 0 && v != 1) {
    throw SchemaViolationError(what + " must be 0 or 1, got '" + raw + "'");
  }
  return static_cast<int>(v);
}

int parse_outcome(const std::string& raw, const std::string& what,
                  bool bit_outcomes) {
  const long long v = parse_int(raw, what);
  if (bit_outcomes) {
    if (v != 0 && v != 1) {
      throw SchemaViolationError(what + " must be 0 or 1 under --bit-outcomes, got '" +
                                 raw + "'");
    }
    return v == 0 ? 1 : -1;
  }
  if (v != 1 && v != -1) {
    throw SchemaViolationError(what + " must be +1 or -1, got '" + raw + "'");
  }
  return static_cast<int>(v);
}

void expect_header(const std::string& line, const std::string& expected,
                   const std::filesystem::path& path) {
  std::string got = trim(line);
  std::string want = expected;
  auto strip_spaces = [](std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    return s;
  };
  if (strip_spaces(got) != strip_spaces(want)) {
    throw SchemaViolationError("'" + path.string() + "': expected header '" +
                               expected + "', got '" + trim(line) + "'");
  }
}

}  // namespace

std::string read_csv_header(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaViolationError("'" + path.string() + "' is empty");
  }
  return trim(line);
}

OutcomeCountTable read_counts_csv(const std::filesystem::path& path,
                                  bool bit_outcomes) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaViolationError("'" + path.string() + "' is empty");
  }
  expect_header(line, "x,y,a,b,count", path);

  OutcomeCountTable counts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) + ": expected 5 fields");
    }
    const int x = parse_setting(fields[0], "x");
    const int y = parse_setting(fields[1], "y");
    const int a = parse_outcome(fields[2], "a", bit_outcomes);
    const int b = parse_outcome(fields[3], "b", bit_outcomes);
    const long long count = parse_int(fields[4], "count");
    if (count < 0) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) + ": negative count");
    }
    counts.add(x, y, a, b, static_cast<std::uint64_t>(count));
  }
  return counts;
}

std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path,
                                         bool bit_outcomes) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaViolationError("'" + path.string() + "' is empty");
  }
  expect_header(line, "participant_id,x,y,a,b", path);

  std::vector<TrialRecord> trials;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) + ": expected 5 fields");
    }
    TrialRecord record;
    record.participant_id = trim(fields[0]);
    if (record.participant_id.empty()) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) + ": empty participant_id");
    }
    record.x = parse_setting(fields[1], "x");
    record.y = parse_setting(fields[2], "y");
    record.a = parse_outcome(fields[3], "a", bit_outcomes);
    record.b = parse_outcome(fields[4], "b", bit_outcomes);
    trials.push_back(std::move(record));
  }
  return trials;
}

RankCsvData read_rank_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaViolationError("'" + path.string() + "' is empty");
  }
  const std::string header = trim(line);
  const bool from_tokens = header == "token,count";
  if (!from_tokens && header != "rank,count") {
    throw SchemaViolationError("'" + path.string() +
                               "': expected header 'rank,count' or 'token,count'");
  }

  RankCsvData data;
  data.from_tokens = from_tokens;

  if (from_tokens) {
    std::map<std::string, std::uint64_t> counts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 2) {
        throw SchemaViolationError("'" + path.string() + "' line " +
                                   std::to_string(line_no) + ": expected 2 fields");
      }
      const std::string token = trim(fields[0]);
      const long long count = parse_int(fields[1], "count");
      if (token.empty() || count < 0) {
        throw SchemaViolationError("'" + path.string() + "' line " +
                                   std::to_string(line_no) + ": bad token row");
      }
      counts[token] += static_cast<std::uint64_t>(count);
    }
    auto corpus = rank_token_counts(counts);
    data.table = std::move(corpus.table);
    data.token_map = std::move(corpus.token_map);
    return data;
  }

  std::vector<RankEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) + ": expected 2 fields");
    }
    const long long rank = parse_int(fields[0], "rank");
    const long long count = parse_int(fields[1], "count");
    if (rank < 1 || count < 0) {
      throw SchemaViolationError("'" + path.string() + "' line " +
                                 std::to_string(line_no) +
                                 ": rank must be >= 1 and count >= 0");
    }
    entries.push_back({static_cast<std::uint64_t>(rank),
                       static_cast<std::uint64_t>(count)});
  }
  std::sort(entries.begin(), entries.end(),
            [](const RankEntry& lhs, const RankEntry& rhs) {
              return lhs.rank < rhs.rank;
            });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].rank == entries[i - 1].rank) {
      throw SchemaViolationError("'" + path.string() + "': duplicate rank " +
                                 std::to_string(entries[i].rank));
    }
  }
  const std::uint64_t support = entries.empty() ? 0 : entries.back().rank;
  try {
    data.table = RankTable(std::move(entries), support);
  } catch (const InvalidRankTableError& e) {
    throw SchemaViolationError("'" + path.string() + "': " + e.what());
  }
  return data;
}

void write_counts_csv(const std::filesystem::path& path,
                      const OutcomeCountTable& counts) {
  std::ofstream out(path);
  if (!out) {
    throw SchemaViolationError("cannot write '" + path.string() + "'");
  }
  out << "x,y,a,b,count\n";
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a : {1, -1}) {
        for (int b : {1, -1}) {
          out << x << ',' << y << ',' << a << ',' << b << ','
              << counts.count(x, y, a, b) << '\n';
        }
      }
    }
  }
}

void write_rank_csv(const std::filesystem::path& path, const RankTable& table) {
  std::ofstream out(path);
  if (!out) {
    throw SchemaViolationError("cannot write '" + path.string() + "'");
  }
  out << "rank,count\n";
  for (const auto& entry : table.entries()) {
    out << entry.rank << ',' << entry.count << '\n';
  }
}

void write_token_map_csv(const std::filesystem::path& path,
                         const std::vector<TokenRankEntry>& token_map) {
  std::ofstream out(path);
  if (!out) {
    throw SchemaViolationError("cannot write '" + path.string() + "'");
  }
  out << "token,rank,count\n";
  for (const auto& entry : token_map) {
    out << entry.token << ',' << entry.rank << ',' << entry.count << '\n';
  }
}

}  // namespace bellrank
