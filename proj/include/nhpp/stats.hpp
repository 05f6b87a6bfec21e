#ifndef NHPP_STATS_HPP
#define NHPP_STATS_HPP

#include <cstddef>

namespace nhpp::stats {

double normal_pdf(double x, double mu, double sigma);
double normal_cdf(double x, double mu, double sigma);
double normal_quantile(double p); // standard normal inverse CDF

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double gammp(double a, double x);
double gammq(double a, double x);

// P(N >= k) for N ~ Poisson(m), evaluated in log space; exact 0 at m = 0.
double poisson_tail(double m, unsigned k);

// pdf / cdf of the norm of a d-dimensional isotropic N(0, sigma^2 I) vector
// (sigma times a chi(d) variable).
double chi_pdf(double x, unsigned d, double sigma);
double chi_cdf(double x, unsigned d, double sigma);

// Mean / sample variance / quantile (linear interpolation) helpers.
double mean(const double* x, std::size_t n);
double sample_variance(const double* x, std::size_t n);
double quantile(double* sorted_begin, std::size_t n, double q); // sorted input

} // namespace nhpp::stats

#endif
