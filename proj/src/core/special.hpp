// Special functions: normal cdf/quantile, binomial tail, Student-t cdf,
// regularized incomplete beta/gamma, median.
#pragma once

#include <cstdint>
#include <vector>

namespace rfts::numkit {

double normal_pdf(double x);

// Phi(x); saturates to 0/1 in the extreme tails, absolute error <= 1e-9.
double normal_cdf(double x);

// Phi^{-1}(p) for p in (0,1); rational approximation refined by one Halley
// step on normal_cdf, |Phi(Phi^{-1}(p)) - p| <= 1e-8.
double normal_quantile(double p);

// P(Binomial(m, p) <= k), exact tail sum evaluated in log space.
double binomial_cdf(std::int64_t k, std::int64_t m, double p);

// Smallest k with binomial_cdf(k, m, p) >= alpha.
std::int64_t binomial_quantile(double alpha, std::int64_t m, double p);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// cdf of Student's t with nu > 0 degrees of freedom.
double student_t_cdf(double x, double nu);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// P(ChiSq_k <= x); convenience wrapper over gamma_p.
double chi_squared_cdf(double x, double k);

// Middle order statistic; mean of the two middle values for even length.
double median(std::vector<double> values);

}  // namespace rfts::numkit
