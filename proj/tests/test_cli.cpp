// End-to-end tests driving the CLI binary. The binary path comes in as
// --cli=<path> (wired up by CTest); everything runs inside a scratch
// directory under the system temp dir.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bellrank/csv.hpp"
#include "bellrank/rankfit.hpp"
#include "schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli_path;
const std::string kSchemaDir = std::string(BELLRANK_SOURCE_DIR) + "/schemas/";

struct RunResult {
  int exit_code;
  std::string stdout_text;
  std::string stderr_text;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& workdir,
                  const std::string& env_prefix = "") {
  const fs::path out_file = workdir / "stdout.txt";
  const fs::path err_file = workdir / "stderr.txt";
  const std::string command = (env_prefix.empty() ? "" : env_prefix + " ") +
                              g_cli_path + " " + args + " > " +
                              out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.stdout_text = slurp(out_file);
  result.stderr_text = slurp(err_file);
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bellrank_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json load_json(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("simulate is deterministic given a seed") {
  const auto dir = fresh_dir("sim_determinism");
  const auto r1 = run_cli("simulate --pr-box --n 1000 --seed 7 --out " +
                              (dir / "a").string(),
                          dir);
  const auto r2 = run_cli("simulate --pr-box --n 1000 --seed 7 --out " +
                              (dir / "b").string(),
                          dir);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir / "a" / "counts.csv") == slurp(dir / "b" / "counts.csv"));
  const auto ja = load_json(dir / "a" / "simulate_report.json");
  const auto jb = load_json(dir / "b" / "simulate_report.json");
  CHECK(ja["analysis"].dump() == jb["analysis"].dump());
}

TEST_CASE("simulate --singlet reports the Tsirelson value") {
  const auto dir = fresh_dir("sim_singlet");
  const auto r = run_cli(
      "simulate --singlet 0 1.5707963 0.7853982 2.3561945 --n 100 --seed 1 "
      "--out " + dir.string(),
      dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "simulate_report.json");
  CHECK(std::fabs(report["analysis"]["chsh"]["s_max_abs"].get<double>() -
                  2.0 * std::sqrt(2.0)) < 1e-6);
  const auto schema =
      schema_check::load_schema(kSchemaDir + "simulate-analysis.v1.json");
  CHECK(schema_check::validate(report["analysis"], schema) == "");
}

TEST_CASE("simulate without --n is a usage error (exit 2)") {
  const auto dir = fresh_dir("sim_usage");
  const auto r = run_cli("simulate --pr-box --out " + dir.string(), dir);
  CHECK(r.exit_code == 2);
  const auto error = json::parse(r.stderr_text);
  CHECK(error["error"]["code"] == "Usage");
}

TEST_CASE("simulate output round-trips into chsh unchanged") {
  const auto dir = fresh_dir("roundtrip");
  REQUIRE(run_cli("simulate --pr-box --n 1000 --seed 3 --out " + dir.string(),
                  dir)
              .exit_code == 0);
  const auto r = run_cli("chsh " + (dir / "counts.csv").string() +
                             " --resamples 200 --seed 5 --out " +
                             (dir / "analysis").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "analysis" / "chsh_report.json");
  CHECK(report["analysis"]["chsh"]["classification"] == "SUPRA_QUANTUM");
  CHECK(report["analysis"]["chsh"]["s_max_abs"].get<double>() ==
        doctest::Approx(4.0));

  const auto envelope =
      schema_check::load_schema(kSchemaDir + "report-envelope.v1.json");
  CHECK(schema_check::validate(report, envelope) == "");
  const auto schema =
      schema_check::load_schema(kSchemaDir + "chsh-analysis.v1.json");
  CHECK(schema_check::validate(report["analysis"], schema) == "");

  // --convention all switches the bootstrap statistic to max-|S|
  const auto r_all = run_cli("chsh " + (dir / "counts.csv").string() +
                                 " --convention all --resamples 150 --out " +
                                 (dir / "all").string(),
                             dir);
  REQUIRE(r_all.exit_code == 0);
  const auto report_all = load_json(dir / "all" / "chsh_report.json");
  CHECK(report_all["analysis"]["bootstrap_ci"]["statistic"] == "s_max_abs");
}

TEST_CASE("chsh on LHV counts: LOCAL with a CI excluding the quantum bound") {
  const auto dir = fresh_dir("lhv");
  // strategy 0 at visibility 0.6 -> S = 1.2
  std::string weights = "1";
  for (int i = 0; i < 15; ++i) weights += " 0";
  REQUIRE(run_cli("simulate --lhv " + weights +
                      " --visibility 0.6 --n 10000 --seed 11 --out " +
                      dir.string(),
                  dir)
              .exit_code == 0);
  const auto r = run_cli("chsh " + (dir / "counts.csv").string() +
                             " --resamples 500 --seed 2 --out " +
                             (dir / "analysis").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "analysis" / "chsh_report.json");
  CHECK(report["analysis"]["chsh"]["classification"] == "LOCAL");
  CHECK(report["analysis"]["bootstrap_ci"]["upper"].get<double>() <
        2.0 * std::sqrt(2.0));
  CHECK(report["analysis"]["bootstrap_ci"]["lower"].get<double>() < 1.25);
  CHECK(report["analysis"]["bootstrap_ci"]["upper"].get<double>() > 1.15);
}

TEST_CASE("chsh on trials input: participant block, t-test, permutations") {
  const auto dir = fresh_dir("trials");
  std::ofstream csv(dir / "trials.csv");
  csv << "participant_id,x,y,a,b\n";
  // three participants, one full quadruple each, outcomes all (+1,+1)
  for (int p = 1; p <= 3; ++p) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        csv << "p" << p << ',' << x << ',' << y << ",1,1\n";
      }
    }
  }
  // one participant missing block (1,1)
  csv << "p4,0,0,1,1\np4,0,1,1,1\np4,1,0,1,1\n";
  csv.close();

  const auto r = run_cli("chsh " + (dir / "trials.csv").string() +
                             " --resamples 200 --seed 9 --permutations 99 "
                             "--t-test --out " + (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "chsh_report.json");
  const auto& analysis = report["analysis"];
  CHECK(analysis["participant_level"]["included"].size() == 3);
  CHECK(analysis["participant_level"]["excluded"] == json::array({"p4"}));
  // all participant S identical -> the naive t-test degenerates, and the
  // report records that instead of inventing a number
  CHECK(analysis["naive_t_test_for_comparison"].contains("error"));
  CHECK(analysis["naive_t_test_for_comparison"]["error"]["code"] ==
        "ZeroVariance");
  CHECK(analysis["permutation_test"]["n_permutations"] == 99);
}

TEST_CASE("malformed CSV exits 2 with a SchemaViolation error object") {
  const auto dir = fresh_dir("malformed");
  std::ofstream csv(dir / "bad.csv");
  csv << "x,y,a,b,count\n0,0,1,1,notanumber\n";
  csv.close();
  const auto r = run_cli("chsh " + (dir / "bad.csv").string() + " --out " +
                             dir.string(),
                         dir);
  CHECK(r.exit_code == 2);
  const auto error = json::parse(r.stderr_text);
  CHECK(error["error"]["code"] == "SchemaViolation");

  std::ofstream csv2(dir / "badheader.csv");
  csv2 << "foo,bar\n1,2\n";
  csv2.close();
  const auto r2 = run_cli("chsh " + (dir / "badheader.csv").string() +
                              " --out " + dir.string(),
                          dir);
  CHECK(r2.exit_code == 2);
}

TEST_CASE("bit-encoded outcomes are accepted with --bit-outcomes") {
  const auto dir = fresh_dir("bits");
  std::ofstream csv(dir / "bits.csv");
  csv << "x,y,a,b,count\n";
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          csv << x << ',' << y << ',' << a << ',' << b << ",25\n";
  csv.close();
  const auto r = run_cli("chsh " + (dir / "bits.csv").string() +
                             " --bit-outcomes --resamples 150 --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "chsh_report.json");
  CHECK(report["manifest"]["config"]["outcome_encoding"] == "bits");
  CHECK(report["analysis"]["chsh"]["classification"] == "LOCAL");
  // same file without the flag misparses outcome 0 -> schema error
  const auto r2 = run_cli("chsh " + (dir / "bits.csv").string() + " --out " +
                              (dir / "out2").string(),
                          dir);
  CHECK(r2.exit_code == 2);
}

TEST_CASE("fit: synthetic rank table, holdout block, curves sidecar") {
  const auto dir = fresh_dir("fit");
  bellrank::FamilySpec truth;
  truth.family = bellrank::Family::kZipf;
  truth.params = {{"s", 1.1}};
  truth.support = 500;
  const auto table = bellrank::sample_rank_table(truth, 60000, 5);
  bellrank::write_rank_csv(dir / "rank.csv", table);

  const auto r = run_cli("fit " + (dir / "rank.csv").string() +
                             " --families ZIPF,ZIPF_MANDELBROT,MB_EXPONENTIAL"
                             " --holdout 0.2 --seed 4 --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "fit_report.json");
  const auto schema =
      schema_check::load_schema(kSchemaDir + "fit-analysis.v1.json");
  CHECK(schema_check::validate(report["analysis"], schema) == "");

  const auto& ranked = report["analysis"]["model_selection"]["ranked"];
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0]["family"] != "MB_EXPONENTIAL");  // exponential can't win here
  CHECK(report["analysis"]["holdout"]["loglik"].size() == 3);

  const std::string curves = slurp(dir / "out" / "fit_curves.csv");
  CHECK(curves.rfind("rank,observed", 0) == 0);

  // deterministic given the manifest
  const auto r2 = run_cli("fit " + (dir / "rank.csv").string() +
                              " --families ZIPF,ZIPF_MANDELBROT,MB_EXPONENTIAL"
                              " --holdout 0.2 --seed 4 --out " +
                              (dir / "out2").string(),
                          dir);
  REQUIRE(r2.exit_code == 0);
  const auto report2 = load_json(dir / "out2" / "fit_report.json");
  CHECK(report["analysis"].dump() == report2["analysis"].dump());
}

TEST_CASE("infeasible analysis exits 1 (SignallingInput from --decompose)") {
  const auto dir = fresh_dir("exit1");
  REQUIRE(run_cli("simulate --pr-box --n 200 --seed 1 --out " + dir.string(),
                  dir)
              .exit_code == 0);
  // finite-sample PR counts signal at ~1/sqrt(n); the default decomposition
  // tolerance (1e-9) must refuse rather than decompose a signalling table
  const auto r = run_cli("chsh " + (dir / "counts.csv").string() +
                             " --resamples 150 --decompose --out " +
                             (dir / "out").string(),
                         dir);
  CHECK(r.exit_code == 1);
  const auto error = json::parse(r.stderr_text);
  CHECK(error["error"]["code"] == "SignallingInput");

  // a sampling-scale tolerance (above the ~0.085 empirical NS residual,
  // below the ~0.15 distance to the local polytope) lets the analysis run
  // and report infeasibility with a CHSH certificate
  const auto r2 = run_cli("chsh " + (dir / "counts.csv").string() +
                              " --resamples 150 --decompose --tolerance 0.1 "
                              "--out " + (dir / "out2").string(),
                          dir);
  CHECK(r2.exit_code == 0);
  const auto report = load_json(dir / "out2" / "chsh_report.json");
  CHECK(report["analysis"]["local_decomposition"]["feasible"] == false);
  CHECK(std::fabs(report["analysis"]["local_decomposition"]["certificate"]
                      ["s_value"].get<double>()) > 2.0);
}

TEST_CASE("BELLRANK_OUT provides the default output directory") {
  const auto dir = fresh_dir("envvar");
  const auto r = run_cli("simulate --pr-box --n 100 --seed 2", dir,
                         "BELLRANK_OUT=" + (dir / "envout").string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir / "envout" / "counts.csv"));
  CHECK(fs::exists(dir / "envout" / "simulate_report.json"));
}

TEST_CASE("fit with default families includes the BE regime report") {
  const auto dir = fresh_dir("fit_default");
  bellrank::FamilySpec truth;
  truth.family = bellrank::Family::kZipf;
  truth.params = {{"s", 1.1}};
  truth.support = 300;
  bellrank::write_rank_csv(dir / "rank.csv",
                           bellrank::sample_rank_table(truth, 30000, 8));
  const auto r = run_cli("fit " + (dir / "rank.csv").string() + " --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "fit_report.json");
  const auto& ranked = report["analysis"]["model_selection"]["ranked"];
  CHECK(ranked.size() == 7);
  // Zipf truth: a power-law family wins, and the BE fit lands in the
  // near-Zipf corner so the regime diagnostics ship with the report
  const std::string winner = ranked[0]["family"].get<std::string>();
  CHECK((winner == "ZIPF" || winner == "ZIPF_MANDELBROT"));
  REQUIRE(report["analysis"].contains("regime_report"));
  CHECK(report["analysis"]["regime_report"].contains("zipf_window"));
}

TEST_CASE("fit with a single family is a usage error") {
  const auto dir = fresh_dir("fit_usage");
  std::ofstream csv(dir / "rank.csv");
  csv << "rank,count\n1,5\n2,3\n";
  csv.close();
  const auto r = run_cli("fit " + (dir / "rank.csv").string() +
                             " --families ZIPF --out " + dir.string(),
                         dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("corpus emits rank tables, token map and config echo") {
  const auto dir = fresh_dir("corpus");
  std::ofstream text(dir / "text.txt");
  text << "The cat. The hat!\nA cat sat; the HAT sat.\n";
  text.close();

  const auto r = run_cli("corpus " + (dir / "text.txt").string() + " --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "corpus_report.json");
  const auto schema =
      schema_check::load_schema(kSchemaDir + "corpus-analysis.v1.json");
  CHECK(schema_check::validate(report["analysis"], schema) == "");
  CHECK(report["analysis"]["config"]["lemmatization"] == false);

  const std::string rank_csv = slurp(dir / "out" / "rank.csv");
  CHECK(rank_csv.rfind("rank,count", 0) == 0);
  const std::string tokens_csv = slurp(dir / "out" / "tokens.csv");
  CHECK(tokens_csv.find("the,1,3") != std::string::npos);

  // the emitted rank table feeds straight back into `fit`
  const auto r2 = run_cli("fit " + (dir / "out" / "rank.csv").string() +
                              " --families ZIPF,MB_EXPONENTIAL --out " +
                              (dir / "fit").string(),
                          dir);
  CHECK(r2.exit_code == 0);
}

TEST_CASE("fit --raw-text routes through the corpus pipeline") {
  const auto dir = fresh_dir("rawtext");
  std::ofstream text(dir / "text.txt");
  // enough token mass for every family fit to be well-posed
  for (int i = 0; i < 120; ++i) {
    text << "alpha ";
    if (i % 2 == 0) text << "beta ";
    if (i % 3 == 0) text << "gamma ";
    if (i % 5 == 0) text << "delta ";
    if (i % 12 == 0) text << "epsilon zeta ";
  }
  text.close();
  const auto r = run_cli("fit " + (dir / "text.txt").string() +
                             " --raw-text --families ZIPF,MB_EXPONENTIAL,"
                             "YULE_SIMON --holdout 0.3 --seed 2 --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "fit_report.json");
  CHECK(report["analysis"]["model_selection"]["ranked"].size() == 3);
  CHECK(report["analysis"]["holdout"].contains("oov_count"));
}

TEST_CASE("token,count input routes through rank assignment") {
  const auto dir = fresh_dir("tokens_csv");
  std::ofstream csv(dir / "tokens.csv");
  csv << "token,count\nzeta,3\nalpha,7\nmid,3\n";
  csv.close();
  const auto r = run_cli("fit " + (dir / "tokens.csv").string() +
                             " --families ZIPF,MB_EXPONENTIAL --out " +
                             (dir / "out").string(),
                         dir);
  REQUIRE(r.exit_code == 0);
  const auto report = load_json(dir / "out" / "fit_report.json");
  CHECK(report["analysis"]["n_total"] == 13);
  CHECK(report["analysis"]["n_ranks"] == 3);
}

int main(int argc, char** argv) {
  doctest::Context context;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--cli=", 0) == 0) {
      g_cli_path = arg.substr(6);
    }
  }
  context.applyCommandLine(argc, argv);
  if (g_cli_path.empty()) {
    std::fprintf(stderr, "missing required --cli=<path-to-bellrank>\n");
    return 1;
  }
  return context.run();
}
