#ifndef NHPP_NOISE_HPP
#define NHPP_NOISE_HPP

#include "nhpp/rng.hpp"

#include <cstddef>
#include <vector>

namespace nhpp {

/// Measurement-error model for event positions. Degenerate-zero and
/// isotropic-gaussian act on displacements; gridded-empirical is a
/// piecewise-constant density over a local coordinate patch (used both for
/// displacement noise and for per-event localization maps).
class NoiseModel {
public:
    enum class Kind { degenerate_zero, isotropic_gaussian, gridded_empirical };

    static NoiseModel degenerate_zero(std::size_t dim);
    static NoiseModel isotropic_gaussian(std::vector<double> sigma);
    /// Regular grid over [lo, hi] per dimension with row-major nonnegative
    /// cell weights summing to 1 (within 1e-9).
    static NoiseModel gridded_empirical(std::vector<double> lo, std::vector<double> hi,
                                        std::vector<std::size_t> shape,
                                        std::vector<double> weights);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    const std::vector<double>& sigma() const { return sigma_; }
    const std::vector<double>& patch_lower() const { return lo_; }
    const std::vector<double>& patch_upper() const { return hi_; }
    const std::vector<std::size_t>& grid_shape() const { return shape_; }
    const std::vector<double>& grid_weights() const { return weights_; }

    /// One draw of the perturbation (cell-then-uniform for gridded models).
    std::vector<double> sample(Rng& rng) const;

    /// pdf at displacement e. The degenerate point mass reports +infinity at
    /// the zero vector (sentinel, never to be multiplied) and 0 elsewhere.
    double density(const std::vector<double>& e) const;
    double log_density(const std::vector<double>& e) const;

    /// Density of max{|eps_1|,...,|eps_k|} at x for i.i.d. copies of this
    /// model: k F^{k-1}(x) f(x) with f, F the pdf/cdf of |eps| in
    /// metric-weighted units. Only i.i.d.-capable kinds with an isotropic
    /// metric norm are supported.
    double radial_max_pdf(unsigned k, double x,
                          const std::vector<double>& metric_weights = {}) const;
    double radial_max_cdf(unsigned k, double x,
                          const std::vector<double>& metric_weights = {}) const;
    /// Smallest x with radial_max_cdf(k, x) >= p (bisection).
    double radial_max_quantile(unsigned k, double p,
                               const std::vector<double>& metric_weights = {}) const;

private:
    NoiseModel(Kind k, std::size_t d) : kind_(k), dim_(d) {}
    double metric_sigma(const std::vector<double>& metric_weights) const;

    Kind kind_;
    std::size_t dim_;
    std::vector<double> sigma_;            // isotropic gaussian, per dimension
    std::vector<double> lo_, hi_;          // gridded patch bounds
    std::vector<std::size_t> shape_;       // gridded grid shape
    std::vector<double> weights_;          // row-major cell weights
    std::vector<double> cum_weights_;      // sampling CDF
    double cell_volume_ = 0.0;
};

} // namespace nhpp

#endif
