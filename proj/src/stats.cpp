#include "nhpp/stats.hpp"
#include "nhpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhpp::stats {

double normal_pdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw invalid_input("normal_quantile: p outside (0,1)");
    // Acklam's rational approximation, then one Halley refinement step.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x, 0.0, 1.0) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gser(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw numerical_error("gammp: series did not converge");
}

// Continued fraction for Q(a,x), valid for x >= a + 1.
double gcf(double a, double x) {
    const double eps = 1e-15, fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw numerical_error("gammq: continued fraction did not converge");
}

} // namespace

double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw invalid_input("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gser(a, x) : 1.0 - gcf(a, x);
}

double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw invalid_input("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gser(a, x) : gcf(a, x);
}

double poisson_tail(double m, unsigned k) {
    if (m < 0.0) throw invalid_input("poisson_tail: negative mean");
    if (k == 0) return 1.0;
    if (m == 0.0) return 0.0;
    // log of sum_{i=0}^{k-1} m^i e^{-m} / i!, via logsumexp
    double lmax = -std::numeric_limits<double>::infinity();
    const double logm = std::log(m);
    for (unsigned i = 0; i < k; ++i)
        lmax = std::max(lmax, i * logm - m - std::lgamma(i + 1.0));
    double s = 0.0;
    for (unsigned i = 0; i < k; ++i)
        s += std::exp(i * logm - m - std::lgamma(i + 1.0) - lmax);
    double lcdf = lmax + std::log(s);
    if (lcdf >= 0.0) return 0.0; // rounding: CDF == 1
    return -std::expm1(lcdf);
}

double chi_pdf(double x, unsigned d, double sigma) {
    if (sigma <= 0.0 || d == 0) throw invalid_input("chi_pdf: bad parameters");
    if (x < 0.0) return 0.0;
    if (x == 0.0) return d == 1 ? 2.0 * normal_pdf(0.0, 0.0, sigma) : 0.0;
    double z = x / sigma;
    double logp = (d - 1.0) * std::log(z) - 0.5 * z * z -
                  (0.5 * d - 1.0) * std::log(2.0) - std::lgamma(0.5 * d) -
                  std::log(sigma);
    return std::exp(logp);
}

double chi_cdf(double x, unsigned d, double sigma) {
    if (sigma <= 0.0 || d == 0) throw invalid_input("chi_cdf: bad parameters");
    if (x <= 0.0) return 0.0;
    double z = x / sigma;
    return gammp(0.5 * d, 0.5 * z * z);
}

double mean(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return n ? s / n : 0.0;
}

double sample_variance(const double* x, std::size_t n) {
    if (n < 2) return 0.0;
    double m = mean(x, n), s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - m;
        s += d * d;
    }
    return s / (n - 1);
}

double quantile(double* sorted, std::size_t n, double q) {
    if (n == 0) throw invalid_input("quantile: empty input");
    if (q <= 0.0) return sorted[0];
    if (q >= 1.0) return sorted[n - 1];
    double pos = q * (n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - lo;
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace nhpp::stats
