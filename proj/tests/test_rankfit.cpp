#include <doctest.h>

#include <cmath>
#include <vector>

#include "bellrank/errors.hpp"
#include "bellrank/rankfit.hpp"
#include "bellrank/rng.hpp"

using namespace bellrank;

namespace {

FamilySpec spec_of(Family family, std::map<std::string, double> params,
                   std::uint64_t support) {
  FamilySpec spec;
  spec.family = family;
  spec.params = std::move(params);
  spec.support = support;
  return spec;
}

// In-domain random parameter draws per family, for normalization fuzzing.
FamilySpec random_spec(Family family, std::uint64_t support,
                       Xoshiro256pp& rng) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.u01(); };
  switch (family) {
    case Family::kBeRank: {
      const double b = std::exp(u(0.0, std::log(2.0 * support)));
      const double a = std::exp(-1.0 / b) + std::pow(10.0, u(-3.0, 1.0));
      return spec_of(family, {{"A", a}, {"B", b}}, support);
    }
    case Family::kMbExponential:
      return spec_of(family, {{"B", std::exp(u(0.0, std::log(2.0 * support)))}},
                     support);
    case Family::kZipf:
      return spec_of(family, {{"s", u(0.05, 4.0)}}, support);
    case Family::kZipfMandelbrot:
      return spec_of(family, {{"s", u(0.05, 4.0)}, {"q", u(-0.9, 20.0)}},
                     support);
    case Family::kDiscreteLognormal:
      return spec_of(family,
                     {{"mu", u(-2.0, std::log(static_cast<double>(support)))},
                      {"sigma", u(0.2, 4.0)}},
                     support);
    case Family::kStretchedExponential:
      return spec_of(family,
                     {{"lambda", std::exp(u(0.0, std::log(2.0 * support)))},
                      {"beta", u(0.05, 1.0)}},
                     support);
    case Family::kYuleSimon:
      return spec_of(family, {{"rho", u(0.1, 8.0)}}, support);
  }
  throw std::logic_error("unreachable");
}

double be_exact_unnormalized(double a, double b, double i) {
  return 1.0 / (a * std::exp(i / b) - 1.0);
}

// Brute-force widest-window oracle for the Zipf-window search: try every
// (lo,hi) pair and test whether some constant c matches within 5%.
std::pair<std::uint64_t, std::uint64_t> brute_force_window(
    double a, double b, std::uint64_t lo, std::uint64_t hi, double thr) {
  std::pair<std::uint64_t, std::uint64_t> best{0, 0};
  std::uint64_t best_width = 0;
  for (std::uint64_t w_lo = lo; w_lo <= hi; ++w_lo) {
    for (std::uint64_t w_hi = w_lo; w_hi <= hi; ++w_hi) {
      double g_min = 1e300, g_max = -1e300;
      for (std::uint64_t i = w_lo; i <= w_hi; ++i) {
        const double g =
            be_exact_unnormalized(a, b, static_cast<double>(i)) * i;
        g_min = std::fmin(g_min, g);
        g_max = std::fmax(g_max, g);
      }
      if (g_max / g_min <= (1.0 + thr) / (1.0 - thr) &&
          w_hi - w_lo + 1 > best_width) {
        best = {w_lo, w_hi};
        best_width = w_hi - w_lo + 1;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("pmf: ZIPF s=1 over V=3 is the harmonic split") {
  const auto spec = spec_of(Family::kZipf, {{"s", 1.0}}, 3);
  CHECK(pmf(spec, 1) == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
  CHECK(pmf(spec, 2) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
  CHECK(pmf(spec, 3) == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("BE_RANK unnormalized weight at A=2, B=10, i=1") {
  const auto spec = spec_of(Family::kBeRank, {{"A", 2.0}, {"B", 10.0}}, 100);
  const double oracle = 1.0 / (2.0 * std::exp(0.1) - 1.0);
  CHECK(std::exp(log_weight(spec, 1)) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(0.82621).epsilon(1e-4));
}

TEST_CASE("BE_RANK domain: A <= e^{-1/B} is rejected") {
  const auto bad = spec_of(Family::kBeRank, {{"A", 0.5}, {"B", 10.0}}, 100);
  CHECK_THROWS_AS(pmf(bad, 1), ParamOutOfDomainError);
  // boundary: A exactly e^{-1/B} still pins the denominator to 0 at i -> 1
  const auto boundary = spec_of(
      Family::kBeRank, {{"A", std::exp(-1.0 / 10.0)}, {"B", 10.0}}, 100);
  CHECK_THROWS_AS(pmf(boundary, 1), ParamOutOfDomainError);
}

TEST_CASE("every family's pmf sums to 1 over its support") {
  Xoshiro256pp rng(2718);
  for (Family family : all_families()) {
    for (int rep = 0; rep < 100; ++rep) {
      const std::uint64_t support = 2 + rng.below(400);
      const auto spec = random_spec(family, support, rng);
      double total = 0.0;
      for (std::uint64_t i = 1; i <= support; ++i) total += pmf(spec, i);
      INFO(family_name(family), " rep ", rep);
      CHECK(std::fabs(total - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("pmf: rank outside support") {
  const auto spec = spec_of(Family::kZipf, {{"s", 1.0}}, 10);
  CHECK_THROWS_AS(pmf(spec, 0), RankOutOfSupportError);
  CHECK_THROWS_AS(pmf(spec, 11), RankOutOfSupportError);
}

TEST_CASE("loglik: spec examples") {
  SUBCASE("mass at rank 1 with a steep ZIPF approaches 0 from below") {
    const RankTable table({{1, 100}}, 5);
    const auto steep = spec_of(Family::kZipf, {{"s", 40.0}}, 5);
    const double ll = loglik(steep, table);
    CHECK(ll < 0.0);
    CHECK(ll > -1e-10);
  }

  SUBCASE("uniform counts against the flat-ZIPF limit") {
    const std::uint64_t v = 50;
    std::vector<RankEntry> entries;
    for (std::uint64_t i = 1; i <= v; ++i) entries.push_back({i, 20});
    const RankTable table(entries, v);
    const auto flat = spec_of(Family::kZipf, {{"s", 1e-9}}, v);
    const double expected =
        static_cast<double>(table.total()) * std::log(1.0 / v);
    CHECK(loglik(flat, table) == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("empty table scores 0 for any spec") {
    const RankTable empty({}, 0);
    CHECK(loglik(spec_of(Family::kZipf, {{"s", 1.0}}, 10), empty) == 0.0);
    CHECK(loglik(spec_of(Family::kYuleSimon, {{"rho", 2.0}}, 10), empty) == 0.0);
  }
}

TEST_CASE("loglik is never positive") {
  Xoshiro256pp rng(99);
  for (Family family : all_families()) {
    for (int rep = 0; rep < 30; ++rep) {
      const std::uint64_t support = 5 + rng.below(200);
      const auto spec = random_spec(family, support, rng);
      std::vector<RankEntry> entries;
      for (std::uint64_t i = 1; i <= support; ++i) {
        const std::uint64_t c = rng.below(8);
        if (c > 0) entries.push_back({i, c});
      }
      if (entries.empty()) entries.push_back({1, 1});
      const RankTable table(entries, support);
      CHECK(loglik(spec, table) <= 0.0);
    }
  }
}

TEST_CASE("AIC/BIC identities hold exactly") {
  const auto table = sample_rank_table(
      spec_of(Family::kZipf, {{"s", 1.3}}, 500), 20000, 4);
  const auto fit = fit_mle(Family::kZipf, table, 500);
  CHECK(fit.aic == 2.0 * fit.k - 2.0 * fit.loglik);
  CHECK(fit.bic == fit.k * std::log(static_cast<double>(table.total())) -
                       2.0 * fit.loglik);
}

TEST_CASE("RankTable invariants") {
  CHECK_THROWS_AS(RankTable({{2, 1}, {2, 3}}, 5), InvalidRankTableError);
  CHECK_THROWS_AS(RankTable({{3, 1}, {2, 3}}, 5), InvalidRankTableError);
  CHECK_THROWS_AS(RankTable({{0, 1}}, 5), InvalidRankTableError);
  CHECK_THROWS_AS(RankTable({{1, 1}, {9, 3}}, 5), InvalidRankTableError);
  const RankTable ok({{1, 5}, {4, 2}}, 4);
  CHECK(ok.total() == 7);
  CHECK(ok.max_rank() == 4);
}

TEST_CASE("be_small_i_approx: sub-1% accuracy in the small-i regime") {
  const double a = 1.001, b = 1e4;
  double worst = 0.0;
  for (std::uint64_t i = 1; i <= 100; ++i) {
    const double exact = be_exact_unnormalized(a, b, static_cast<double>(i));
    const double approx = be_small_i_approx(a, b, i);
    worst = std::fmax(worst, std::fabs(approx / exact - 1.0));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("be_tail_approx: A=2, B=10, i=100 is accurate to 1e-4") {
  const double exact = be_exact_unnormalized(2.0, 10.0, 100.0);
  const double approx = be_tail_approx(2.0, 10.0, 100);
  CHECK(std::fabs(approx / exact - 1.0) < 1e-4);
}

TEST_CASE("approximants reject i = 0 and bad params") {
  CHECK_THROWS_AS(be_small_i_approx(1.5, 10.0, 0), RankOutOfSupportError);
  CHECK_THROWS_AS(be_tail_approx(1.5, 10.0, 0), RankOutOfSupportError);
  CHECK_THROWS_AS(be_small_i_approx(0.5, 10.0, 1), ParamOutOfDomainError);
  CHECK_THROWS_AS(be_tail_approx(2.0, -1.0, 1), ParamOutOfDomainError);
}

TEST_CASE("approximant errors are monotone in their regimes") {
  // the small-rank-form error grows with i (so it shrinks as i/B -> 0)...
  const double a = 1.01, b = 1e3;
  double previous = -1.0;
  for (std::uint64_t i = 1; i <= 200; i += 1) {
    const double exact = be_exact_unnormalized(a, b, static_cast<double>(i));
    const double err = std::fabs(be_small_i_approx(a, b, i) / exact - 1.0);
    CHECK(err >= previous - 1e-15);
    previous = err;
  }
  // ...and the tail error shrinks as A e^{i/B} grows.
  previous = 1e300;
  for (std::uint64_t i = 10; i <= 200; i += 1) {
    const double exact = be_exact_unnormalized(2.0, 10.0, static_cast<double>(i));
    const double err = std::fabs(be_tail_approx(2.0, 10.0, i) / exact - 1.0);
    CHECK(err <= previous + 1e-15);
    previous = err;
  }
}

TEST_CASE("zipf_regime_report: window matches the brute-force oracle") {
  struct Case {
    double a, b;
    std::uint64_t lo, hi;
  };
  const Case cases[] = {
      {2.0, 10.0, 1, 100},        // exponential-dominated, narrow window
      {1.000001, 1e4, 1, 100},    // deep Zipf regime, full window
      {1.001, 1e6, 1, 100},       // offset-dominated (flat), narrow window
      {1.05, 300.0, 1, 120},
  };
  for (const auto& c : cases) {
    const auto spec =
        spec_of(Family::kBeRank, {{"A", c.a}, {"B", c.b}}, c.hi);
    const auto report = zipf_regime_report(spec, {c.lo, c.hi});
    const auto oracle = brute_force_window(c.a, c.b, c.lo, c.hi, 0.05);
    INFO("A=", c.a, " B=", c.b);
    REQUIRE(report.zipf_window.has_value());
    const std::uint64_t got_width =
        report.zipf_window->hi - report.zipf_window->lo + 1;
    const std::uint64_t oracle_width = oracle.second - oracle.first + 1;
    CHECK(got_width == oracle_width);
  }
}

TEST_CASE("zipf_regime_report: deep-Zipf parameters cover all ranks") {
  const auto spec =
      spec_of(Family::kBeRank, {{"A", 1.000001}, {"B", 1e4}}, 100);
  const auto report = zipf_regime_report(spec, {1, 100});
  REQUIRE(report.zipf_window.has_value());
  CHECK(report.zipf_window->lo == 1);
  CHECK(report.zipf_window->hi == 100);
  CHECK(report.small_i_max_rel_err >= 0.0);
  CHECK(report.small_i_max_rel_err < 0.01);
  CHECK(report.a_minus_1 == doctest::Approx(1e-6));
  CHECK(report.i_over_b_max == doctest::Approx(0.01));
}

TEST_CASE("zipf_regime_report: exponential regime leaves only a sliver") {
  // At A=2, B=10 the curve is exponential almost everywhere; w(i)*i is
  // stationary near i = B, so a short window survives there but nothing
  // resembling global Zipf behavior.
  const auto spec = spec_of(Family::kBeRank, {{"A", 2.0}, {"B", 10.0}}, 100);
  const auto report = zipf_regime_report(spec, {1, 100});
  REQUIRE(report.zipf_window.has_value());
  const std::uint64_t width =
      report.zipf_window->hi - report.zipf_window->lo + 1;
  CHECK(width <= 12);
  CHECK(report.zipf_window->lo > 1);
  CHECK(report.zipf_window->hi < 100);
}

TEST_CASE("zipf_regime_report: rejects non-BE specs") {
  const auto zipf = spec_of(Family::kZipf, {{"s", 1.0}}, 10);
  CHECK_THROWS_AS(zipf_regime_report(zipf, {1, 10}), ParamOutOfDomainError);
}

TEST_CASE("spacing_exponent: quadratic, constant and linear spectra") {
  std::vector<LevelEntry> quadratic;
  for (std::uint64_t n = 1; n <= 50; ++n) {
    quadratic.push_back({n, static_cast<double>(n) * static_cast<double>(n)});
  }
  const auto fit2 = spacing_exponent(quadratic);
  CHECK(std::fabs(fit2.d - 2.0) <= 1e-6);
  CHECK(fit2.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<LevelEntry> constant;
  for (std::uint64_t n = 1; n <= 10; ++n) constant.push_back({n, 3.5});
  const auto fit0 = spacing_exponent(constant);
  CHECK(fit0.d == doctest::Approx(0.0));
  CHECK(fit0.r_squared == doctest::Approx(1.0));

  std::vector<LevelEntry> linear;
  for (std::uint64_t n = 2; n <= 40; n += 2) {
    linear.push_back({n, 0.25 * static_cast<double>(n)});
  }
  const auto fit1 = spacing_exponent(linear);
  CHECK(std::fabs(fit1.d - 1.0) <= 1e-9);
}

TEST_CASE("spacing_exponent: error paths") {
  CHECK_THROWS_AS(
      spacing_exponent(std::vector<LevelEntry>{{1, 1.0}, {2, 4.0}}),
      TooFewLevelsError);
  CHECK_THROWS_AS(spacing_exponent(
                      std::vector<LevelEntry>{{1, 1.0}, {2, 0.0}, {3, 9.0}}),
                  NonPositiveLevelError);
  CHECK_THROWS_AS(spacing_exponent(
                      std::vector<LevelEntry>{{1, 1.0}, {1, 4.0}, {3, 9.0}}),
                  NonPositiveLevelError);
}

TEST_CASE("sample_rank_table: determinism and mass conservation") {
  const auto spec = spec_of(Family::kZipfMandelbrot,
                            {{"s", 1.2}, {"q", 2.0}}, 1000);
  const auto t1 = sample_rank_table(spec, 50000, 9);
  const auto t2 = sample_rank_table(spec, 50000, 9);
  CHECK(t1.total() == 50000);
  CHECK(t1.entries().size() == t2.entries().size());
  bool identical = true;
  for (std::size_t i = 0; i < t1.entries().size(); ++i) {
    identical = identical && t1.entries()[i].rank == t2.entries()[i].rank &&
                t1.entries()[i].count == t2.entries()[i].count;
  }
  CHECK(identical);
  const auto t3 = sample_rank_table(spec, 50000, 10);
  CHECK(t3.total() == 50000);
}
