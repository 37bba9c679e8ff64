#include "bellrank/rankfit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "bellrank/errors.hpp"
#include "bellrank/nelder_mead.hpp"
#include "bellrank/rng.hpp"
#include "bellrank/sampling.hpp"

namespace bellrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unconstrained optimizer coordinates are clamped here before mapping into
// the natural domain; e^30 ~ 1e13 covers every realistic parameter while
// keeping the transforms overflow-free.
constexpr double kThetaClamp = 30.0;

double clamp_theta(double t) {
  if (std::isnan(t)) return 0.0;
  return std::clamp(t, -kThetaClamp, kThetaClamp);
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::kBeRank:
      return "BE_RANK";
    case Family::kMbExponential:
      return "MB_EXPONENTIAL";
    case Family::kZipf:
      return "ZIPF";
    case Family::kZipfMandelbrot:
      return "ZIPF_MANDELBROT";
    case Family::kDiscreteLognormal:
      return "DISCRETE_LOGNORMAL";
    case Family::kStretchedExponential:
      return "STRETCHED_EXPONENTIAL";
    case Family::kYuleSimon:
      return "YULE_SIMON";
  }
  throw std::invalid_argument("unknown family");
}

Family family_from_name(const std::string& name) {
  for (Family f : all_families()) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown family name '" + name + "'");
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> families = {
      Family::kBeRank,
      Family::kMbExponential,
      Family::kZipf,
      Family::kZipfMandelbrot,
      Family::kDiscreteLognormal,
      Family::kStretchedExponential,
      Family::kYuleSimon,
  };
  return families;
}

int family_param_count(Family family) {
  switch (family) {
    case Family::kBeRank:
    case Family::kZipfMandelbrot:
    case Family::kDiscreteLognormal:
    case Family::kStretchedExponential:
      return 2;
    default:
      return 1;
  }
}

std::vector<std::string> family_param_names(Family family) {
  switch (family) {
    case Family::kBeRank:
      return {"A", "B"};
    case Family::kMbExponential:
      return {"B"};
    case Family::kZipf:
      return {"s"};
    case Family::kZipfMandelbrot:
      return {"s", "q"};
    case Family::kDiscreteLognormal:
      return {"mu", "sigma"};
    case Family::kStretchedExponential:
      return {"lambda", "beta"};
    case Family::kYuleSimon:
      return {"rho"};
  }
  throw std::invalid_argument("unknown family");
}

// ---- rank tables -----------------------------------------------------------

RankTable::RankTable(std::vector<RankEntry> entries, std::uint64_t support)
    : entries_(std::move(entries)), support_(support) {
  std::uint64_t previous = 0;
  for (const auto& entry : entries_) {
    if (entry.rank == 0) {
      throw InvalidRankTableError("ranks start at 1");
    }
    if (entry.rank <= previous) {
      throw InvalidRankTableError("ranks must be strictly increasing");
    }
    previous = entry.rank;
    total_ += entry.count;
  }
  if (!entries_.empty() && support_ < entries_.back().rank) {
    throw InvalidRankTableError("support V must cover the largest rank");
  }
}

double FamilySpec::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) {
    throw ParamOutOfDomainError(family_name(family) + " is missing parameter '" +
                                name + "'");
  }
  return it->second;
}

// ---- shared evaluation core ------------------------------------------------

namespace {

// Internal parameterization used by both the public API and the optimizer.
// Meaning by family:
//   BE_RANK                a = delta (= ln A + 1/B, > 0), b = B
//   MB_EXPONENTIAL         a = B
//   ZIPF                   a = s
//   ZIPF_MANDELBROT        a = s, b = q
//   DISCRETE_LOGNORMAL     a = mu, b = sigma
//   STRETCHED_EXPONENTIAL  a = lambda, b = beta
//   YULE_SIMON             a = rho
// BE uses delta rather than A so that the near-Zipf corner (A barely above
// e^{-1/B}) never cancels to zero inside the hot loop.
struct ShapeParams {
  double a = 0.0;
  double b = 0.0;
};

struct FitWorkspace {
  std::vector<double> log_i;     // ln(i), i = 1..V
  std::vector<double> lgamma_i;  // lnGamma(i), filled on first Yule-Simon use
  std::vector<double> lw;        // scratch log-weights

  void prepare(std::uint64_t support) {
    const std::size_t v = static_cast<std::size_t>(support);
    if (log_i.size() < v) {
      const std::size_t old = log_i.size();
      log_i.resize(v);
      for (std::size_t i = old; i < v; ++i) {
        log_i[i] = std::log(static_cast<double>(i + 1));
      }
    }
    lw.resize(v);
  }

  void prepare_lgamma(std::uint64_t support) {
    const std::size_t v = static_cast<std::size_t>(support);
    if (lgamma_i.size() < v) {
      const std::size_t old = lgamma_i.size();
      lgamma_i.resize(v);
      for (std::size_t i = old; i < v; ++i) {
        lgamma_i[i] = std::lgamma(static_cast<double>(i + 1));
      }
    }
  }
};

// Fills ws.lw[i-1] = ln w(i) for i = 1..V. Returns false when the params-
// although transformed into the nominal domain - still produce no usable
// weight (all -inf), which the optimizer treats as an infeasible point.
bool fill_log_weights(Family family, const ShapeParams& p, std::uint64_t support,
                      FitWorkspace& ws) {
  ws.prepare(support);
  const std::size_t v = static_cast<std::size_t>(support);
  switch (family) {
    case Family::kBeRank: {
      const double delta = p.a;
      const double inv_b = 1.0 / p.b;
      if (!(delta > 0.0)) return false;
      for (std::size_t i = 0; i < v; ++i) {
        const double t = delta + static_cast<double>(i) * inv_b;
        ws.lw[i] = t > 36.0 ? -t : -std::log(std::expm1(t));
      }
      return true;
    }
    case Family::kMbExponential: {
      const double inv_b = 1.0 / p.a;
      for (std::size_t i = 0; i < v; ++i) {
        ws.lw[i] = -static_cast<double>(i + 1) * inv_b;
      }
      return true;
    }
    case Family::kZipf: {
      const double s = p.a;
      for (std::size_t i = 0; i < v; ++i) ws.lw[i] = -s * ws.log_i[i];
      return true;
    }
    case Family::kZipfMandelbrot: {
      const double s = p.a;
      const double q = p.b;
      for (std::size_t i = 0; i < v; ++i) {
        ws.lw[i] = -s * std::log(static_cast<double>(i + 1) + q);
      }
      return true;
    }
    case Family::kDiscreteLognormal: {
      const double mu = p.a;
      const double inv_sigma = 1.0 / p.b;
      for (std::size_t i = 0; i < v; ++i) {
        const double z = (ws.log_i[i] - mu) * inv_sigma;
        ws.lw[i] = -0.5 * z * z - ws.log_i[i];
      }
      return true;
    }
    case Family::kStretchedExponential: {
      const double log_lambda = std::log(p.a);
      const double beta = p.b;
      for (std::size_t i = 0; i < v; ++i) {
        ws.lw[i] = -std::exp(beta * (ws.log_i[i] - log_lambda));
      }
      return true;
    }
    case Family::kYuleSimon: {
      const double rho = p.a;
      ws.prepare_lgamma(support);
      const double lg_rho = std::lgamma(rho + 1.0);
      for (std::size_t i = 0; i < v; ++i) {
        ws.lw[i] = ws.lgamma_i[i] + lg_rho -
                   std::lgamma(static_cast<double>(i + 1) + rho + 1.0);
      }
      return true;
    }
  }
  return false;
}

double logsumexp(std::span<const double> values) {
  double max = -kInf;
  for (double value : values) max = std::fmax(max, value);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double value : values) sum += std::exp(value - max);
  return max + std::log(sum);
}

double loglik_impl(Family family, const ShapeParams& p, std::uint64_t support,
                   std::span<const RankEntry> entries, std::uint64_t total,
                   FitWorkspace& ws) {
  if (total == 0) return 0.0;
  if (!fill_log_weights(family, p, support, ws)) return -kInf;
  const double log_z = logsumexp(std::span<const double>(ws.lw.data(),
                                                         static_cast<std::size_t>(support)));
  if (!std::isfinite(log_z)) return -kInf;
  double ll = 0.0;
  for (const auto& entry : entries) {
    if (entry.count == 0) continue;
    const double lw = ws.lw[static_cast<std::size_t>(entry.rank - 1)];
    ll += static_cast<double>(entry.count) * (lw - log_z);
  }
  return ll;
}

ShapeParams shape_from_spec(const FamilySpec& spec) {
  ShapeParams p;
  switch (spec.family) {
    case Family::kBeRank: {
      const double a = spec.param("A");
      const double b = spec.param("B");
      p.a = std::log(a) + 1.0 / b;  // delta
      p.b = b;
      break;
    }
    case Family::kMbExponential:
      p.a = spec.param("B");
      break;
    case Family::kZipf:
      p.a = spec.param("s");
      break;
    case Family::kZipfMandelbrot:
      p.a = spec.param("s");
      p.b = spec.param("q");
      break;
    case Family::kDiscreteLognormal:
      p.a = spec.param("mu");
      p.b = spec.param("sigma");
      break;
    case Family::kStretchedExponential:
      p.a = spec.param("lambda");
      p.b = spec.param("beta");
      break;
    case Family::kYuleSimon:
      p.a = spec.param("rho");
      break;
  }
  return p;
}

}  // namespace

void validate_params(const FamilySpec& spec) {
  if (spec.support < 1) {
    throw RankOutOfSupportError("support V must be at least 1");
  }
  const auto require_finite = [&](const char* name, double value) {
    if (!std::isfinite(value)) {
      throw ParamOutOfDomainError(family_name(spec.family) + ": parameter " +
                                  name + " must be finite");
    }
  };
  switch (spec.family) {
    case Family::kBeRank: {
      const double a = spec.param("A");
      const double b = spec.param("B");
      require_finite("A", a);
      require_finite("B", b);
      if (!(b > 0.0)) {
        throw ParamOutOfDomainError("BE_RANK requires B > 0");
      }
      if (!(a > 0.0) || !(std::log(a) + 1.0 / b > 0.0)) {
        throw ParamOutOfDomainError(
            "BE_RANK requires A > e^{-1/B}; the weight denominator "
            "A*e^{i/B} - 1 must be positive from rank 1 on");
      }
      break;
    }
    case Family::kMbExponential: {
      const double b = spec.param("B");
      require_finite("B", b);
      if (!(b > 0.0)) {
        throw ParamOutOfDomainError("MB_EXPONENTIAL requires B > 0");
      }
      break;
    }
    case Family::kZipf: {
      const double s = spec.param("s");
      require_finite("s", s);
      if (!(s > 0.0)) {
        throw ParamOutOfDomainError("ZIPF requires s > 0");
      }
      break;
    }
    case Family::kZipfMandelbrot: {
      const double s = spec.param("s");
      const double q = spec.param("q");
      require_finite("s", s);
      require_finite("q", q);
      if (!(s > 0.0) || !(q > -1.0)) {
        throw ParamOutOfDomainError("ZIPF_MANDELBROT requires s > 0 and q > -1");
      }
      break;
    }
    case Family::kDiscreteLognormal: {
      const double mu = spec.param("mu");
      const double sigma = spec.param("sigma");
      require_finite("mu", mu);
      require_finite("sigma", sigma);
      if (!(sigma > 0.0)) {
        throw ParamOutOfDomainError("DISCRETE_LOGNORMAL requires sigma > 0");
      }
      break;
    }
    case Family::kStretchedExponential: {
      const double lambda = spec.param("lambda");
      const double beta = spec.param("beta");
      require_finite("lambda", lambda);
      require_finite("beta", beta);
      if (!(lambda > 0.0) || !(beta > 0.0 && beta <= 1.0)) {
        throw ParamOutOfDomainError(
            "STRETCHED_EXPONENTIAL requires lambda > 0 and 0 < beta <= 1");
      }
      break;
    }
    case Family::kYuleSimon: {
      const double rho = spec.param("rho");
      require_finite("rho", rho);
      if (!(rho > 0.0)) {
        throw ParamOutOfDomainError("YULE_SIMON requires rho > 0");
      }
      break;
    }
  }
}

double log_weight(const FamilySpec& spec, std::uint64_t i) {
  validate_params(spec);
  if (i < 1 || i > spec.support) {
    throw RankOutOfSupportError("rank " + std::to_string(i) +
                                " outside support 1.." +
                                std::to_string(spec.support));
  }
  thread_local FitWorkspace ws;
  if (!fill_log_weights(spec.family, shape_from_spec(spec), spec.support, ws)) {
    throw ParamOutOfDomainError(family_name(spec.family) +
                                ": no usable weight at these parameters");
  }
  return ws.lw[static_cast<std::size_t>(i - 1)];
}

double log_normalizer(const FamilySpec& spec) {
  validate_params(spec);
  thread_local FitWorkspace ws;
  if (!fill_log_weights(spec.family, shape_from_spec(spec), spec.support, ws)) {
    throw ParamOutOfDomainError(family_name(spec.family) +
                                ": no usable weight at these parameters");
  }
  return logsumexp(std::span<const double>(ws.lw.data(),
                                           static_cast<std::size_t>(spec.support)));
}

double pmf(const FamilySpec& spec, std::uint64_t i) {
  validate_params(spec);
  if (i < 1 || i > spec.support) {
    throw RankOutOfSupportError("rank " + std::to_string(i) +
                                " outside support 1.." +
                                std::to_string(spec.support));
  }
  thread_local FitWorkspace ws;
  if (!fill_log_weights(spec.family, shape_from_spec(spec), spec.support, ws)) {
    throw ParamOutOfDomainError(family_name(spec.family) +
                                ": no usable weight at these parameters");
  }
  const double log_z = logsumexp(std::span<const double>(
      ws.lw.data(), static_cast<std::size_t>(spec.support)));
  return std::exp(ws.lw[static_cast<std::size_t>(i - 1)] - log_z);
}

double loglik(const FamilySpec& spec, const RankTable& table) {
  validate_params(spec);
  if (table.total() == 0) return 0.0;
  if (table.max_rank() > spec.support) {
    throw RankOutOfSupportError("table max rank " +
                                std::to_string(table.max_rank()) +
                                " exceeds support " +
                                std::to_string(spec.support));
  }
  thread_local FitWorkspace ws;
  return loglik_impl(spec.family, shape_from_spec(spec), spec.support,
                     table.entries(), table.total(), ws);
}

// ---- maximum-likelihood fitting ---------------------------------------------

namespace {

// theta -> shape transforms. Every natural-domain constraint is carried by
// the transform, so the optimizer never needs rejection logic.
ShapeParams shape_from_theta(Family family, std::span<const double> theta) {
  ShapeParams p;
  const double t0 = clamp_theta(theta[0]);
  const double t1 = theta.size() > 1 ? clamp_theta(theta[1]) : 0.0;
  switch (family) {
    case Family::kBeRank: {
      const double b = std::exp(t1);
      const double z = t0 + 1.0 / b;  // ln(A e^{1/B} - 1) at A = e^{-1/B} + e^{t0}
      p.a = z > 36.0 ? z : std::log1p(std::exp(z));
      p.b = b;
      break;
    }
    case Family::kMbExponential:
      p.a = std::exp(t0);
      break;
    case Family::kZipf:
      p.a = std::exp(t0);
      break;
    case Family::kZipfMandelbrot:
      p.a = std::exp(t0);
      p.b = std::expm1(t1);  // q > -1
      break;
    case Family::kDiscreteLognormal:
      p.a = t0;
      p.b = std::exp(t1);
      break;
    case Family::kStretchedExponential:
      p.a = std::exp(t0);
      p.b = 1.0 / (1.0 + std::exp(-t1));  // beta in (0,1)
      break;
    case Family::kYuleSimon:
      p.a = std::exp(t0);
      break;
  }
  return p;
}

std::map<std::string, double> params_from_shape(Family family,
                                                const ShapeParams& p) {
  std::map<std::string, double> out;
  switch (family) {
    case Family::kBeRank: {
      const double b = p.b;
      double a = std::exp(p.a - 1.0 / b);
      // Reporting A in natural form can round onto the pole A = e^{-1/B};
      // nudge by ulps until the public domain check accepts it again.
      for (int guard = 0; guard < 8; ++guard) {
        if (std::log(a) + 1.0 / b > 0.0) break;
        a = std::nextafter(a, kInf);
      }
      out["A"] = a;
      out["B"] = b;
      break;
    }
    case Family::kMbExponential:
      out["B"] = p.a;
      break;
    case Family::kZipf:
      out["s"] = p.a;
      break;
    case Family::kZipfMandelbrot:
      out["s"] = p.a;
      out["q"] = p.b;
      break;
    case Family::kDiscreteLognormal:
      out["mu"] = p.a;
      out["sigma"] = p.b;
      break;
    case Family::kStretchedExponential:
      out["lambda"] = p.a;
      out["beta"] = p.b;
      break;
    case Family::kYuleSimon:
      out["rho"] = p.a;
      break;
  }
  return out;
}

std::vector<double> logspace(double lo_exp10, double hi_exp10, int n) {
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0
                               : static_cast<double>(i) /
                                     static_cast<double>(n - 1);
    values[static_cast<std::size_t>(i)] =
        std::pow(10.0, lo_exp10 + frac * (hi_exp10 - lo_exp10));
  }
  return values;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0
                               : static_cast<double>(i) /
                                     static_cast<double>(n - 1);
    values[static_cast<std::size_t>(i)] = lo + frac * (hi - lo);
  }
  return values;
}

// Start lattices, in optimizer coordinates. Scale parameters are laid out
// log-spaced between 1 and the support V; shape exponents span roughly
// 0.2..5; the stretched-exponential beta lattice is log-spaced in odds.
std::vector<std::vector<double>> start_lattice(Family family,
                                               std::uint64_t support, int n) {
  const double log10_v = std::log10(static_cast<double>(std::max<std::uint64_t>(support, 2)));
  auto to_log = [](std::vector<double> values) {
    for (double& value : values) value = std::log(value);
    return values;
  };
  switch (family) {
    case Family::kBeRank:
      // first axis: A - e^{-1/B} in 1e-4..10, second: B in 1..V
      return {to_log(logspace(-4.0, 1.0, n)), to_log(logspace(0.0, log10_v, n))};
    case Family::kMbExponential:
      return {to_log(logspace(0.0, log10_v, n))};
    case Family::kZipf:
      return {to_log(logspace(-0.7, 0.7, n))};
    case Family::kZipfMandelbrot: {
      // second axis: q + 1 in 10^-0.5..10^1.5
      auto qp1 = logspace(-0.5, 1.5, n);
      for (double& value : qp1) value = std::log(value);
      return {to_log(logspace(-0.7, 0.7, n)), qp1};
    }
    case Family::kDiscreteLognormal:
      // mu spans the log-rank range directly
      return {linspace(0.0, std::log(static_cast<double>(std::max<std::uint64_t>(support, 2))), n),
              to_log(logspace(-0.3, 0.6, n))};
    case Family::kStretchedExponential: {
      auto odds = logspace(-1.0, 1.0, n);
      for (double& value : odds) value = std::log(value);
      return {to_log(logspace(0.0, log10_v, n)), odds};
    }
    case Family::kYuleSimon:
      return {to_log(logspace(-0.5, 1.0, n))};
  }
  throw std::invalid_argument("unknown family");
}

struct StartOutcome {
  double loglik = -kInf;
  std::vector<double> theta;
  long evaluations = 0;
  bool nm_converged = false;
};

}  // namespace

FitResult fit_mle(Family family, const RankTable& table, std::uint64_t support,
                  const OptimizerConfig& config) {
  if (table.total() < 1) {
    throw InvalidRankTableError("fit requires at least one observation");
  }
  if (support < std::max<std::uint64_t>(table.max_rank(), 1)) {
    throw RankOutOfSupportError("support V must cover the table's max rank");
  }

  const auto lattice = start_lattice(family, support, config.starts_per_dim);
  const std::size_t dim = lattice.size();

  std::vector<std::vector<double>> starts;
  if (dim == 1) {
    for (double t0 : lattice[0]) starts.push_back({t0});
  } else {
    for (double t0 : lattice[0]) {
      for (double t1 : lattice[1]) starts.push_back({t0, t1});
    }
  }

  const auto entries = std::span<const RankEntry>(table.entries());
  const std::uint64_t total = table.total();

  NelderMeadOptions nm_options;
  nm_options.tolerance = config.nm_tolerance;
  nm_options.max_iterations = config.nm_max_iterations;

  std::vector<StartOutcome> outcomes(starts.size());
  auto run_start = [&](std::size_t index, FitWorkspace& ws) {
    auto objective = [&](std::span<const double> theta) {
      const ShapeParams p = shape_from_theta(family, theta);
      return -loglik_impl(family, p, support, entries, total, ws);
    };
    const NelderMeadResult nm =
        nelder_mead(objective, starts[index], nm_options);
    StartOutcome outcome;
    outcome.loglik = -nm.value;
    outcome.theta = nm.x;
    outcome.evaluations = nm.evaluations;
    outcome.nm_converged = nm.converged;
    outcomes[index] = std::move(outcome);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = config.parallel_starts
                               ? std::min<unsigned>(hw, static_cast<unsigned>(starts.size()))
                               : 1u;
  if (workers > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    tasks.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&] {
        FitWorkspace ws;
        for (;;) {
          const std::size_t index = next.fetch_add(1);
          if (index >= outcomes.size()) break;
          run_start(index, ws);
        }
      }));
    }
    for (auto& task : tasks) task.get();
  } else {
    FitWorkspace ws;
    for (std::size_t index = 0; index < outcomes.size(); ++index) {
      run_start(index, ws);
    }
  }

  // Deterministic selection: best log-likelihood, ties to the lower start
  // index, independent of how starts were scheduled.
  std::size_t best = outcomes.size();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!std::isfinite(outcomes[i].loglik)) continue;
    if (best == outcomes.size() || outcomes[i].loglik > outcomes[best].loglik) {
      best = i;
    }
  }
  if (best == outcomes.size()) {
    throw OptimizationFailedError(family_name(family) +
                                  ": no start reached a finite log-likelihood");
  }
  double second = -kInf;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (i == best || !std::isfinite(outcomes[i].loglik)) continue;
    second = std::fmax(second, outcomes[i].loglik);
  }

  FitResult result;
  result.spec.family = family;
  result.spec.support = support;
  result.spec.params =
      params_from_shape(family, shape_from_theta(family, outcomes[best].theta));
  result.loglik = outcomes[best].loglik;
  result.k = family_param_count(family);
  result.aic = 2.0 * result.k - 2.0 * result.loglik;
  result.bic = static_cast<double>(result.k) * std::log(static_cast<double>(total)) -
               2.0 * result.loglik;
  result.trace.n_starts = static_cast<int>(outcomes.size());
  for (const auto& outcome : outcomes) {
    result.trace.n_evaluations += outcome.evaluations;
  }
  result.trace.best_start = static_cast<int>(best);
  result.trace.best_pair_gap =
      std::isfinite(second) ? outcomes[best].loglik - second : kInf;
  result.converged = result.trace.best_pair_gap <= config.start_agreement;
  return result;
}

ModelSelection model_select(const RankTable& table,
                            const std::vector<Family>& families,
                            std::uint64_t support,
                            const OptimizerConfig& config) {
  if (families.size() < 2) {
    throw std::invalid_argument("model selection requires at least 2 families");
  }
  ModelSelection selection;
  for (Family family : families) {
    try {
      selection.ranked.push_back(fit_mle(family, table, support, config));
    } catch (const OptimizationFailedError& e) {
      selection.failed.emplace_back(family, e.what());
    }
  }
  if (selection.ranked.empty()) {
    throw OptimizationFailedError("every requested family failed to fit");
  }
  std::sort(selection.ranked.begin(), selection.ranked.end(),
            [](const FitResult& lhs, const FitResult& rhs) {
              if (lhs.aic != rhs.aic) return lhs.aic < rhs.aic;
              if (lhs.k != rhs.k) return lhs.k < rhs.k;
              return family_name(lhs.spec.family) < family_name(rhs.spec.family);
            });
  return selection;
}

double holdout_loglik(const FitResult& fit, const RankTable& test_table) {
  if (test_table.max_rank() > fit.spec.support) {
    throw RankOutOfSupportError("held-out ranks exceed the fitted support");
  }
  return loglik(fit.spec, test_table);
}

// ---- BE regime diagnostics ---------------------------------------------------

namespace {

void check_be_domain(double a_param, double b_param) {
  if (!(b_param > 0.0) || !std::isfinite(a_param) || !std::isfinite(b_param) ||
      !(a_param > 0.0) || !(std::log(a_param) + 1.0 / b_param > 0.0)) {
    throw ParamOutOfDomainError("BE approximant requires B > 0 and A > e^{-1/B}");
  }
}

double be_exact_weight(double a_param, double b_param, double i) {
  const double t = std::log(a_param) + i / b_param;
  return t > 36.0 ? std::exp(-t) : 1.0 / std::expm1(t);
}

}  // namespace

double be_small_i_approx(double a_param, double b_param, std::uint64_t i) {
  check_be_domain(a_param, b_param);
  if (i < 1) {
    throw RankOutOfSupportError("rank support starts at 1");
  }
  return 1.0 /
         ((a_param - 1.0) + a_param / b_param * static_cast<double>(i));
}

double be_tail_approx(double a_param, double b_param, std::uint64_t i) {
  check_be_domain(a_param, b_param);
  if (i < 1) {
    throw RankOutOfSupportError("rank support starts at 1");
  }
  return std::exp(-static_cast<double>(i) / b_param) / a_param;
}

RegimeReport zipf_regime_report(const FamilySpec& spec, RankInterval observed) {
  if (spec.family != Family::kBeRank) {
    throw ParamOutOfDomainError("regime report applies to BE_RANK fits only");
  }
  validate_params(spec);
  if (observed.lo < 1 || observed.hi < observed.lo) {
    throw RankOutOfSupportError("invalid observed-rank interval");
  }
  const double a_param = spec.param("A");
  const double b_param = spec.param("B");

  RegimeReport report;
  report.a_minus_1 = a_param - 1.0;
  report.i_over_b_max = static_cast<double>(observed.hi) / b_param;

  // Tail regime begins once A e^{i/B} clears this factor; below it the
  // exponential form is not meaningfully "the tail".
  constexpr double kTailFactor = 10.0;

  double small_err = 0.0;
  double tail_err = 0.0;
  bool tail_seen = false;
  for (std::uint64_t i = observed.lo; i <= observed.hi; ++i) {
    const double exact = be_exact_weight(a_param, b_param, static_cast<double>(i));
    const double approx5 = be_small_i_approx(a_param, b_param, i);
    small_err = std::fmax(small_err, std::fabs(approx5 / exact - 1.0));
    const double growth =
        a_param * std::exp(static_cast<double>(i) / b_param);
    if (growth >= kTailFactor) {
      const double approx6 = be_tail_approx(a_param, b_param, i);
      tail_err = std::fmax(tail_err, std::fabs(approx6 / exact - 1.0));
      tail_seen = true;
    }
  }
  if (!tail_seen) {
    const double exact =
        be_exact_weight(a_param, b_param, static_cast<double>(observed.hi));
    tail_err = std::fabs(be_tail_approx(a_param, b_param, observed.hi) / exact - 1.0);
  }
  report.small_i_max_rel_err = small_err;
  report.tail_max_rel_err = tail_err;

  // Widest window where w(i) matches const/i within the threshold: const can
  // be chosen freely, so a window qualifies iff the spread of ln(w(i) * i)
  // stays below ln((1+thr)/(1-thr)). Two pointers with monotonic deques;
  // first widest window wins.
  const double thr = report.zipf_window_threshold;
  const double max_span = std::log((1.0 + thr) / (1.0 - thr));
  std::deque<std::pair<std::uint64_t, double>> maxq, minq;
  std::optional<RankInterval> window;
  std::uint64_t left = observed.lo;
  for (std::uint64_t right = observed.lo; right <= observed.hi; ++right) {
    const double g = std::log(be_exact_weight(a_param, b_param,
                                              static_cast<double>(right))) +
                     std::log(static_cast<double>(right));
    while (!maxq.empty() && maxq.back().second <= g) maxq.pop_back();
    maxq.emplace_back(right, g);
    while (!minq.empty() && minq.back().second >= g) minq.pop_back();
    minq.emplace_back(right, g);
    while (maxq.front().second - minq.front().second > max_span) {
      if (maxq.front().first == left) maxq.pop_front();
      if (minq.front().first == left) minq.pop_front();
      ++left;
    }
    const std::uint64_t width = right - left + 1;
    if (!window || width > window->hi - window->lo + 1) {
      window = RankInterval{left, right};
    }
  }
  report.zipf_window = window;
  return report;
}

SpacingFit spacing_exponent(std::span<const LevelEntry> levels) {
  if (levels.size() < 3) {
    throw TooFewLevelsError("spacing fit needs at least 3 levels");
  }
  std::uint64_t previous = 0;
  for (const auto& level : levels) {
    if (level.n == 0 || !(level.energy > 0.0)) {
      throw NonPositiveLevelError("levels require n >= 1 and E_n > 0");
    }
    if (level.n <= previous) {
      throw NonPositiveLevelError("level indices must be strictly increasing");
    }
    previous = level.n;
  }

  const double count = static_cast<double>(levels.size());
  double mean_u = 0.0;
  double mean_v = 0.0;
  for (const auto& level : levels) {
    mean_u += std::log(static_cast<double>(level.n));
    mean_v += std::log(level.energy);
  }
  mean_u /= count;
  mean_v /= count;

  double suu = 0.0;
  double suv = 0.0;
  double svv = 0.0;
  for (const auto& level : levels) {
    const double du = std::log(static_cast<double>(level.n)) - mean_u;
    const double dv = std::log(level.energy) - mean_v;
    suu += du * du;
    suv += du * dv;
    svv += dv * dv;
  }

  SpacingFit fit;
  fit.d = suv / suu;
  if (svv <= 1e-30) {
    fit.r_squared = 1.0;  // constant spectrum: the flat fit is exact
  } else {
    const double ss_res = svv - suv * suv / suu;
    fit.r_squared = 1.0 - ss_res / svv;
  }
  return fit;
}

RankTable sample_rank_table(const FamilySpec& spec, std::uint64_t total,
                            std::uint64_t seed) {
  validate_params(spec);
  thread_local FitWorkspace ws;
  if (!fill_log_weights(spec.family, shape_from_spec(spec), spec.support, ws)) {
    throw ParamOutOfDomainError(family_name(spec.family) +
                                ": no usable weight at these parameters");
  }
  const std::size_t v = static_cast<std::size_t>(spec.support);
  double max = -kInf;
  for (std::size_t i = 0; i < v; ++i) max = std::fmax(max, ws.lw[i]);
  std::vector<double> weights(v);
  for (std::size_t i = 0; i < v; ++i) weights[i] = std::exp(ws.lw[i] - max);

  Xoshiro256pp rng(stream_seed(seed, 0x5a3f));
  const auto counts = multinomial_draw(total, weights, rng);

  std::vector<RankEntry> entries;
  for (std::size_t i = 0; i < v; ++i) {
    if (counts[i] > 0) {
      entries.push_back({static_cast<std::uint64_t>(i + 1), counts[i]});
    }
  }
  return RankTable(std::move(entries), spec.support);
}

}  // namespace bellrank
