#pragma once

#include <cstdint>

namespace bellrank {

// log Beta(a, b)
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double beta_inc(double a, double b, double x);

// P(T <= t) for Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

// log of the binomial pmf at k.
double binomial_log_pmf(std::uint64_t k, std::uint64_t n, double p);

// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

}  // namespace bellrank
