// bellrank: CHSH/Bell analysis and rank-frequency model selection.
//
// Subcommands:
//   simulate  generate counts from a reference behavior (PR box, singlet, LHV)
//   chsh      analyze a counts or trials CSV: bounds, intervals, diagnostics
//   fit       fit rank-frequency families and rank them by AIC/BIC
//   corpus    tokenize text and emit rank tables
//
// Exit codes: 0 success, 1 analysis infeasible, 2 input/schema/usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bellrank/behavior.hpp"
#include "bellrank/chsh.hpp"
#include "bellrank/corpus.hpp"
#include "bellrank/csv.hpp"
#include "bellrank/errors.hpp"
#include "bellrank/inference.hpp"
#include "bellrank/rankfit.hpp"
#include "bellrank/report.hpp"
#include "bellrank/rng.hpp"
#include "bellrank/sampling.hpp"
#include "bellrank/simulators.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw bellrank::SchemaViolationError("cannot write '" + path.string() + "'");
  }
  out << text;
}

void emit_report(const fs::path& out_dir, const std::string& filename,
                 const bellrank::RunManifest& manifest, const json& analysis) {
  fs::create_directories(out_dir);
  const json report = bellrank::make_report(manifest, analysis);
  write_text_file(out_dir / filename, bellrank::render_json(report));
  std::cout << (out_dir / filename).string() << "\n";
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  bool pr_box = false;
  std::vector<double> singlet;  // a0 a1 b0 b1
  std::vector<double> lhv;      // 16 weights
  double visibility = 1.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& args, const fs::path& out_dir) {
  int scenarios = (args.pr_box ? 1 : 0) + (args.singlet.empty() ? 0 : 1) +
                  (args.lhv.empty() ? 0 : 1);
  if (scenarios != 1) {
    throw bellrank::UsageError(
        "exactly one of --pr-box, --singlet, --lhv is required");
  }

  bellrank::RunManifest manifest = bellrank::RunManifest::make("simulate");
  json scenario;
  bellrank::BehaviorTable behavior = bellrank::pr_box_behavior();
  if (args.pr_box) {
    scenario = {{"kind", "pr_box"}};
  } else if (!args.singlet.empty()) {
    const auto angles = bellrank::SingletAngles::from_radians(
        args.singlet[0], args.singlet[1], args.singlet[2], args.singlet[3]);
    behavior = bellrank::singlet_behavior(angles);
    scenario = {{"kind", "singlet"},
                {"angles",
                 {{"a0", angles.a0},
                  {"a1", angles.a1},
                  {"b0", angles.b0},
                  {"b1", angles.b1}}}};
  } else {
    if (args.lhv.size() != 16) {
      throw bellrank::UsageError("--lhv takes exactly 16 weights");
    }
    std::array<double, 16> weights{};
    std::copy(args.lhv.begin(), args.lhv.end(), weights.begin());
    behavior = bellrank::lhv_behavior(weights);
    scenario = {{"kind", "lhv"}, {"weights", args.lhv}};
  }
  if (args.visibility != 1.0) {
    behavior = bellrank::mix_with_noise(behavior, args.visibility);
  }
  scenario["visibility"] = args.visibility;

  manifest.config = scenario;
  manifest.seeds = {{"sampling", args.seed}};

  const auto counts = bellrank::sample_trials(behavior, args.n, args.seed);
  fs::create_directories(out_dir);
  bellrank::write_counts_csv(out_dir / "counts.csv", counts);
  std::cout << (out_dir / "counts.csv").string() << "\n";

  const auto matrix = bellrank::correlation_matrix(behavior);
  json analysis = {
      {"scenario", scenario},
      {"n_per_block", args.n},
      {"behavior", bellrank::behavior_to_json(behavior)},
      {"correlation", bellrank::correlation_to_json(matrix)},
      {"nonsignalling_residual", bellrank::nonsignalling_residual(behavior)},
      {"chsh", bellrank::chsh_report_to_json(bellrank::chsh_report(matrix))},
  };
  emit_report(out_dir, "simulate_report.json", manifest, analysis);
  return 0;
}

// ---- chsh ------------------------------------------------------------------

struct ChshArgs {
  std::string input;
  std::string format = "auto";  // counts | trials | auto
  bool bit_outcomes = false;
  std::string convention = "+++-";  // or "all"
  int resamples = 1000;
  std::uint64_t seed = 0;
  double level = 0.95;
  bool t_test = false;
  double t_null = 2.0;
  int permutations = 0;
  bool decompose = false;
  double tolerance = 1e-9;
};

bellrank::SignConvention pick_convention(const std::string& requested,
                                         const bellrank::ChshReport& report) {
  if (requested != "all") {
    return bellrank::SignConvention::from_string(requested);
  }
  std::string best;
  double best_abs = -1.0;
  for (const auto& [name, s] : report.s_by_convention) {
    if (std::fabs(s) > best_abs) {
      best_abs = std::fabs(s);
      best = name;
    }
  }
  return bellrank::SignConvention::from_string(best);
}

int run_chsh(const ChshArgs& args, const fs::path& out_dir) {
  const fs::path input(args.input);
  std::string format = args.format;
  if (format == "auto") {
    const std::string header = bellrank::read_csv_header(input);
    if (header.rfind("participant_id", 0) == 0) {
      format = "trials";
    } else {
      format = "counts";
    }
  }

  std::vector<bellrank::TrialRecord> trials;
  bellrank::OutcomeCountTable counts;
  if (format == "trials") {
    trials = bellrank::read_trials_csv(input, args.bit_outcomes);
    for (const auto& trial : trials) {
      counts.add(trial.x, trial.y, trial.a, trial.b);
    }
  } else if (format == "counts") {
    counts = bellrank::read_counts_csv(input, args.bit_outcomes);
  } else {
    throw bellrank::UsageError("--format must be counts, trials or auto");
  }

  bellrank::RunManifest manifest = bellrank::RunManifest::make("chsh");
  manifest.inputs = {input.string()};
  manifest.config = {
      {"format", format},
      {"outcome_encoding", args.bit_outcomes ? "bits" : "pm1"},
      {"convention", args.convention},
      {"resamples", args.resamples},
      {"level", args.level},
      {"t_test", args.t_test},
      {"permutations", args.permutations},
      {"decompose", args.decompose},
      {"tolerance", args.tolerance},
  };
  manifest.seeds = {{"bootstrap", args.seed}, {"permutation", args.seed}};

  const auto behavior = bellrank::normalize_counts(counts);
  const auto matrix = bellrank::correlation_matrix(behavior);
  const auto report = bellrank::chsh_report(matrix);
  const auto convention = pick_convention(args.convention, report);

  json analysis = {
      {"behavior", bellrank::behavior_to_json(behavior)},
      {"correlation", bellrank::correlation_to_json(matrix)},
      {"nonsignalling_residual", bellrank::nonsignalling_residual(behavior)},
      {"chsh", bellrank::chsh_report_to_json(report)},
  };

  bellrank::IntervalEstimate ci;
  if (args.convention == "all") {
    ci = bellrank::bootstrap_ci_chsh_max(counts, args.resamples, args.seed,
                                         args.level);
  } else {
    ci = bellrank::bootstrap_ci_chsh(counts, convention, args.resamples,
                                     args.seed, args.level);
  }
  json ci_json = bellrank::interval_to_json(ci);
  ci_json["statistic"] =
      args.convention == "all" ? "s_max_abs" : "S[" + convention.str() + "]";
  analysis["bootstrap_ci"] = std::move(ci_json);

  if (format == "trials") {
    const auto participant =
        bellrank::participant_level_chsh(trials, convention);
    json included = json::array();
    std::vector<double> per_unit_s;
    for (const auto& entry : participant.included) {
      included.push_back({{"participant_id", entry.participant_id},
                          {"s", entry.s},
                          {"n_per_block", entry.n_per_block}});
      per_unit_s.push_back(entry.s);
    }
    analysis["participant_level"] = {
        {"convention", convention.str()},
        {"included", std::move(included)},
        {"excluded", participant.excluded},
    };

    if (args.t_test) {
      json block;
      block["convention"] = convention.str();
      block["null_value"] = args.t_null;
      try {
        const auto t = bellrank::naive_t_test(per_unit_s, args.t_null);
        block["result"] = bellrank::t_test_to_json(t);
      } catch (const bellrank::Error& e) {
        block["error"] = {{"code", e.code()}, {"message", e.what()}};
      }
      analysis["naive_t_test_for_comparison"] = std::move(block);
    }

    if (args.permutations > 0) {
      const auto perm = bellrank::permutation_test_chsh(
          trials, convention, args.permutations, args.seed);
      json perm_json = bellrank::permutation_to_json(perm);
      perm_json["convention"] = convention.str();
      analysis["permutation_test"] = std::move(perm_json);
    }
  } else if (args.t_test || args.permutations > 0) {
    throw bellrank::UsageError(
        "--t-test and --permutations need per-trial input (trials CSV)");
  }

  if (args.decompose) {
    const auto decomposition =
        bellrank::local_model_decompose(behavior, args.tolerance);
    analysis["local_decomposition"] =
        bellrank::decomposition_to_json(decomposition);
  }

  emit_report(out_dir, "chsh_report.json", manifest, analysis);
  return 0;
}

// ---- fit ---------------------------------------------------------------------

struct FitArgs {
  std::string input;
  bool raw_text = false;
  std::vector<std::string> families;
  std::uint64_t support = 0;  // 0 = max observed rank
  double holdout = 0.0;
  std::uint64_t seed = 0;
};

// Binomial thinning of a rank table: the rank-level analog of sending each
// token occurrence to the test side with probability `fraction`.
std::pair<bellrank::RankTable, bellrank::RankTable> thin_rank_table(
    const bellrank::RankTable& table, double fraction, std::uint64_t seed) {
  std::vector<bellrank::RankEntry> train_entries;
  std::vector<bellrank::RankEntry> test_entries;
  bellrank::Xoshiro256pp rng(bellrank::stream_seed(seed, 0x7e57));
  for (const auto& entry : table.entries()) {
    const std::uint64_t to_test =
        bellrank::binomial_draw(entry.count, fraction, rng);
    if (entry.count - to_test > 0) {
      train_entries.push_back({entry.rank, entry.count - to_test});
    }
    if (to_test > 0) test_entries.push_back({entry.rank, to_test});
  }
  if (train_entries.empty()) {
    throw bellrank::DegenerateSplitError("holdout left the training side empty");
  }
  return {bellrank::RankTable(std::move(train_entries), table.support()),
          bellrank::RankTable(std::move(test_entries), table.support())};
}

int run_fit(const FitArgs& args, const fs::path& out_dir) {
  std::vector<bellrank::Family> families;
  if (args.families.empty()) {
    families = bellrank::all_families();
  } else {
    for (const auto& name : args.families) {
      families.push_back(bellrank::family_from_name(name));
    }
  }
  if (families.size() < 2) {
    throw bellrank::UsageError("--families needs at least 2 entries");
  }

  bellrank::RankTable table;
  std::optional<std::vector<std::string>> tokens;
  if (args.raw_text) {
    std::ifstream in(args.input, std::ios::binary);
    if (!in) {
      throw bellrank::SchemaViolationError("cannot open '" + args.input + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    tokens = bellrank::tokenize(text, bellrank::PreprocessConfig{});
    table = bellrank::build_rank_table(*tokens).table;
  } else {
    table = bellrank::read_rank_csv(args.input).table;
  }
  if (table.total() == 0) {
    throw bellrank::InvalidRankTableError("input has no observations");
  }

  std::uint64_t support = args.support == 0 ? table.max_rank() : args.support;

  bellrank::RunManifest manifest = bellrank::RunManifest::make("fit");
  manifest.inputs = {args.input};
  json family_names = json::array();
  for (auto family : families) family_names.push_back(bellrank::family_name(family));
  manifest.config = {
      {"raw_text", args.raw_text},
      {"families", family_names},
      {"support", support},
      {"holdout", args.holdout},
  };
  manifest.seeds = {{"holdout", args.seed}};

  // Optional holdout split happens before fitting so the fit never sees the
  // test counts.
  std::optional<bellrank::RankTable> test_table;
  std::uint64_t oov = 0;
  if (args.holdout > 0.0) {
    if (!(args.holdout < 1.0)) {
      throw bellrank::UsageError("--holdout must lie in (0,1)");
    }
    if (tokens) {
      auto split = bellrank::split_holdout(*tokens, args.holdout, args.seed);
      table = split.train;
      test_table = split.test;
      oov = split.oov_count;
      support = args.support == 0 ? table.max_rank() : args.support;
    } else {
      auto [train, test] = thin_rank_table(table, args.holdout, args.seed);
      table = train;
      test_table = test;
    }
  }

  const auto selection = bellrank::model_select(table, families, support);

  json ranked = json::array();
  for (const auto& fit : selection.ranked) {
    ranked.push_back(bellrank::fit_result_to_json(fit));
  }
  json failed = json::array();
  for (const auto& [family, message] : selection.failed) {
    failed.push_back({{"family", bellrank::family_name(family)},
                      {"message", message}});
  }

  json analysis = {
      {"n_total", table.total()},
      {"n_ranks", table.entries().size()},
      {"support", support},
      {"model_selection", {{"ranked", std::move(ranked)}, {"failed", std::move(failed)}}},
  };

  for (const auto& fit : selection.ranked) {
    if (fit.spec.family == bellrank::Family::kBeRank &&
        !table.entries().empty()) {
      const bellrank::RankInterval observed{table.entries().front().rank,
                                            table.max_rank()};
      analysis["regime_report"] = bellrank::regime_report_to_json(
          bellrank::zipf_regime_report(fit.spec, observed));
      break;
    }
  }

  if (test_table) {
    json holdout = {{"train_n", table.total()},
                    {"test_n", test_table->total()},
                    {"oov_count", oov}};
    json per_family = json::object();
    for (const auto& fit : selection.ranked) {
      per_family[bellrank::family_name(fit.spec.family)] =
          bellrank::holdout_loglik(fit, *test_table);
    }
    holdout["loglik"] = std::move(per_family);
    analysis["holdout"] = std::move(holdout);
  }

  // Plot-ready curves: observed counts next to each family's expected counts.
  {
    fs::create_directories(out_dir);
    std::ofstream curves(out_dir / "fit_curves.csv", std::ios::binary);
    if (!curves) {
      throw bellrank::SchemaViolationError("cannot write fit_curves.csv");
    }
    curves << "rank,observed";
    for (const auto& fit : selection.ranked) {
      curves << ',' << bellrank::family_name(fit.spec.family);
    }
    curves << '\n';
    const double n_total = static_cast<double>(table.total());
    for (const auto& entry : table.entries()) {
      curves << entry.rank << ',' << entry.count;
      for (const auto& fit : selection.ranked) {
        curves << ',' << n_total * bellrank::pmf(fit.spec, entry.rank);
      }
      curves << '\n';
    }
    std::cout << (out_dir / "fit_curves.csv").string() << "\n";
  }

  emit_report(out_dir, "fit_report.json", manifest, analysis);
  return 0;
}

// ---- corpus ------------------------------------------------------------------

struct CorpusArgs {
  std::string input;
  bool keep_case = false;
  bool keep_punctuation = false;
  std::string stopword_file;
  int min_length = 1;
};

int run_corpus(const CorpusArgs& args, const fs::path& out_dir) {
  std::ifstream in(args.input, std::ios::binary);
  if (!in) {
    throw bellrank::SchemaViolationError("cannot open '" + args.input + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  bellrank::PreprocessConfig config;
  config.case_fold = !args.keep_case;
  config.strip_punctuation = !args.keep_punctuation;
  config.min_token_length = args.min_length;
  if (!args.stopword_file.empty()) {
    std::ifstream stop(args.stopword_file);
    if (!stop) {
      throw bellrank::SchemaViolationError("cannot open stopword file '" +
                                           args.stopword_file + "'");
    }
    std::set<std::string> stopwords;
    std::string word;
    while (std::getline(stop, word)) {
      if (!word.empty() && word.back() == '\r') word.pop_back();
      if (!word.empty()) stopwords.insert(word);
    }
    config.stopword_list = std::move(stopwords);
  }

  const auto tokens = bellrank::tokenize(text, config);
  const auto corpus = bellrank::build_rank_table(tokens);

  bellrank::RunManifest manifest = bellrank::RunManifest::make("corpus");
  manifest.inputs = {args.input};
  json config_echo = {
      {"case_fold", config.case_fold},
      {"strip_punctuation", config.strip_punctuation},
      {"min_token_length", config.min_token_length},
      {"lemmatization", false},  // not performed; recorded so reports say so
      {"stopword_count",
       config.stopword_list ? config.stopword_list->size() : 0},
  };
  manifest.config = config_echo;

  fs::create_directories(out_dir);
  bellrank::write_rank_csv(out_dir / "rank.csv", corpus.table);
  bellrank::write_token_map_csv(out_dir / "tokens.csv", corpus.token_map);
  std::cout << (out_dir / "rank.csv").string() << "\n"
            << (out_dir / "tokens.csv").string() << "\n";

  json analysis = {
      {"n_tokens", corpus.table.total()},
      {"n_types", corpus.table.entries().size()},
      {"config", config_echo},
  };
  emit_report(out_dir, "corpus_report.json", manifest, analysis);
  return 0;
}

void print_error(const std::string& code, const std::string& message) {
  const json error = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << error.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHSH/Bell analysis and rank-frequency model selection"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory")
      ->envname("BELLRANK_OUT");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "generate counts from a reference behavior");
  simulate->fallthrough();
  simulate->add_flag("--pr-box", simulate_args.pr_box, "PR-box behavior");
  simulate->add_option("--singlet", simulate_args.singlet,
                       "singlet angles a0 a1 b0 b1 (radians)")
      ->expected(4);
  simulate->add_option("--lhv", simulate_args.lhv,
                       "weights over the 16 deterministic strategies")
      ->expected(16);
  simulate->add_option("--visibility", simulate_args.visibility,
                       "mix toward uniform noise, v in [0,1]");
  simulate->add_option("--n", simulate_args.n, "trials per setting pair")
      ->required();
  simulate->add_option("--seed", simulate_args.seed, "sampling seed");

  ChshArgs chsh_args;
  auto* chsh = app.add_subcommand("chsh", "analyze counts or trials");
  chsh->fallthrough();
  chsh->add_option("input", chsh_args.input, "counts or trials CSV")
      ->required();
  chsh->add_option("--format", chsh_args.format, "counts | trials | auto");
  chsh->add_flag("--bit-outcomes", chsh_args.bit_outcomes,
                 "outcomes encoded as 0/1, mapped via a = (-1)^bit");
  chsh->add_option("--convention", chsh_args.convention,
                   "sign convention, e.g. +++- , or 'all'");
  chsh->add_option("--resamples", chsh_args.resamples,
                   "bootstrap resamples (>= 100)");
  chsh->add_option("--seed", chsh_args.seed, "resampling seed");
  chsh->add_option("--level", chsh_args.level, "confidence level");
  chsh->add_flag("--t-test", chsh_args.t_test,
                 "include the naive one-sample t-test block (trials input)");
  chsh->add_option("--t-null", chsh_args.t_null, "t-test null value");
  chsh->add_option("--permutations", chsh_args.permutations,
                   "permutation-test draws (trials input)");
  chsh->add_flag("--decompose", chsh_args.decompose,
                 "attempt a local-model decomposition");
  chsh->add_option("--tolerance", chsh_args.tolerance,
                   "decomposition tolerance");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit rank-frequency families");
  fit->fallthrough();
  fit->add_option("input", fit_args.input, "rank CSV, token CSV, or text file")
      ->required();
  fit->add_flag("--raw-text", fit_args.raw_text,
                "treat input as plain text (corpus pipeline, default config)");
  fit->add_option("--families", fit_args.families,
                  "family names (default: all)")
      ->delimiter(',');
  fit->add_option("--V", fit_args.support,
                  "support size (default: max observed rank)");
  fit->add_option("--holdout", fit_args.holdout,
                  "held-out fraction in (0,1); 0 disables");
  fit->add_option("--seed", fit_args.seed, "holdout seed");

  CorpusArgs corpus_args;
  auto* corpus = app.add_subcommand("corpus", "tokenize text, emit rank tables");
  corpus->fallthrough();
  corpus->add_option("input", corpus_args.input, "UTF-8 text file")->required();
  corpus->add_flag("--keep-case", corpus_args.keep_case, "disable case folding");
  corpus->add_flag("--keep-punct", corpus_args.keep_punctuation,
                   "keep leading/trailing punctuation");
  corpus->add_option("--stopwords", corpus_args.stopword_file,
                     "stopword file, one token per line");
  corpus->add_option("--min-len", corpus_args.min_length,
                     "minimum token length");

  try {
    app.parse(argc, argv);
    const fs::path out(out_dir);
    if (simulate->parsed()) return run_simulate(simulate_args, out);
    if (chsh->parsed()) return run_chsh(chsh_args, out);
    if (fit->parsed()) return run_fit(fit_args, out);
    if (corpus->parsed()) return run_corpus(corpus_args, out);
    throw bellrank::UsageError("a subcommand is required");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("Usage", e.what());
    return 2;
  } catch (const bellrank::SchemaViolationError& e) {
    print_error(e.code(), e.what());
    return 2;
  } catch (const bellrank::UsageError& e) {
    print_error(e.code(), e.what());
    return 2;
  } catch (const bellrank::Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    print_error("Usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return 1;
  }
}
