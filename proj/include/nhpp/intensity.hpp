#ifndef NHPP_INTENSITY_HPP
#define NHPP_INTENSITY_HPP

#include "nhpp/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace nhpp {

/// Hyperparameters of the FRB detection intensity over (alpha, delta, DM):
///   g(delta, DM) = exp(c/(1 + d cos delta) - u^{3/2}) * cos(delta) * u^3,
///   u = (DM + DM0 / cos^b(phi - delta)) / DMstar,
/// spread uniformly over the alpha extent and scaled so the total mass over
/// the domain equals n_frbs.
struct FrbHyperparams {
    double n_frbs = 0.0;  // expected event count over the domain
    double b = 0.0;       // sensitivity steepness exponent
    double c = 0.0;       // exposure amplitude
    double d = 0.0;       // exposure shape
    double dm0 = 0.0;     // DM intercept, pc cm^-3
    double dm_star = 0.0; // characteristic DM width, pc cm^-3

    static constexpr double telescope_latitude_deg = 49.32;

    std::array<double, 6> as_array() const { return {n_frbs, b, c, d, dm0, dm_star}; }
    static FrbHyperparams from_array(const std::array<double, 6>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }
};

struct GaussianComponent {
    std::array<double, 2> mean{};
    std::array<double, 4> cov{}; // row-major 2x2, symmetric positive definite
};

/// Parametric NHPP intensity over a bounded domain. Models are immutable
/// after construction; the normalization integral is computed at build time
/// by nested midpoint quadrature with Richardson acceleration, refined until
/// successive estimates agree to 1e-6 relative.
class IntensityModel {
public:
    enum class Kind { homogeneous, bivariate_gaussian, gaussian_mixture, frb };

    static IntensityModel homogeneous(double rate, Domain domain);
    static IntensityModel bivariate_gaussian(double total, const GaussianComponent& g,
                                             Domain domain);
    static IntensityModel gaussian_mixture(double total, double q,
                                           const GaussianComponent& first,
                                           const GaussianComponent& second, Domain domain);
    static IntensityModel frb(const FrbHyperparams& params, Domain domain);

    /// The two bound-validation intensities (unit square, total mass 200).
    static IntensityModel reference_gaussian();
    static IntensityModel reference_mixture();
    /// Default FRB detection domain: alpha in [0,360) wrapped, delta in
    /// [-11, 90] deg, DM in (0, 5000] pc cm^-3, unit metric weights.
    static Domain default_frb_domain();

    double eval(const Point& s) const;
    double total_mass() const { return total_mass_; }
    double normalized_density(const Point& s) const;

    struct BallMass {
        double estimate = 0.0;
        double std_error = 0.0;
    };
    /// Monte Carlo estimate of the intensity mass in a metric ball (points
    /// outside the domain contribute zero). Deterministic given the seed.
    BallMass integrate_ball(const Sphere& ball, std::size_t n_mc,
                            std::uint64_t seed) const;

    /// Grid-estimated supremum of the intensity over the domain, inflated by
    /// 10%; the rejection-sampling envelope.
    double envelope_sup() const { return envelope_sup_; }

    Kind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    const FrbHyperparams& frb_params() const { return frb_; }
    std::string kind_name() const;

private:
    IntensityModel(Kind k, Domain dom) : kind_(k), domain_(std::move(dom)) {}
    void finalize(); // normalization + envelope
    double unnormalized(const Point& s) const;
    double unnormalized2d(double a, double b) const; // effective (non-alpha) dims

    Kind kind_;
    Domain domain_;
    double rate_ = 0.0;  // homogeneous
    double target_total_ = 0.0;
    double mixing_q_ = 1.0;
    GaussianComponent comp1_, comp2_;
    FrbHyperparams frb_{};
    double norm_ = 1.0; // integral of the unnormalized form over the domain
    double total_mass_ = 0.0;
    double envelope_sup_ = 0.0;
};

} // namespace nhpp

#endif
