#include "nhpp/intensity.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/rng.hpp"

#include <cmath>

namespace nhpp {

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;

double gaussian2(const GaussianComponent& g, double x, double y) {
    const double s11 = g.cov[0], s12 = g.cov[1], s22 = g.cov[3];
    const double det = s11 * s22 - s12 * s12;
    const double dx = x - g.mean[0], dy = y - g.mean[1];
    const double q = (s22 * dx * dx - 2.0 * s12 * dx * dy + s11 * dy * dy) / det;
    return std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(det));
}

void check_gaussian(const GaussianComponent& g) {
    const double det = g.cov[0] * g.cov[3] - g.cov[1] * g.cov[1];
    if (!(g.cov[0] > 0.0) || !(det > 0.0))
        throw config_error("gaussian intensity: covariance not positive definite");
}

double ball_volume(unsigned d, double r) {
    return std::pow(M_PI, 0.5 * d) * std::pow(r, static_cast<double>(d)) /
           std::tgamma(0.5 * d + 1.0);
}

} // namespace

IntensityModel IntensityModel::homogeneous(double rate, Domain domain) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw config_error("homogeneous intensity: rate must be positive");
    IntensityModel m(Kind::homogeneous, std::move(domain));
    m.rate_ = rate;
    m.finalize();
    return m;
}

IntensityModel IntensityModel::bivariate_gaussian(double total, const GaussianComponent& g,
                                                  Domain domain) {
    if (!(total > 0.0)) throw config_error("intensity: total mass must be positive");
    if (domain.dim() != 2) throw config_error("bivariate gaussian intensity needs a 2D domain");
    check_gaussian(g);
    IntensityModel m(Kind::bivariate_gaussian, std::move(domain));
    m.target_total_ = total;
    m.comp1_ = g;
    m.finalize();
    return m;
}

IntensityModel IntensityModel::gaussian_mixture(double total, double q,
                                                const GaussianComponent& first,
                                                const GaussianComponent& second,
                                                Domain domain) {
    if (!(total > 0.0)) throw config_error("intensity: total mass must be positive");
    if (!(q >= 0.0 && q <= 1.0)) throw config_error("mixture weight outside [0,1]");
    if (domain.dim() != 2) throw config_error("gaussian mixture intensity needs a 2D domain");
    check_gaussian(first);
    check_gaussian(second);
    IntensityModel m(Kind::gaussian_mixture, std::move(domain));
    m.target_total_ = total;
    m.mixing_q_ = q;
    m.comp1_ = first;
    m.comp2_ = second;
    m.finalize();
    return m;
}

IntensityModel IntensityModel::frb(const FrbHyperparams& p, Domain domain) {
    if (domain.dim() != 3) throw config_error("frb intensity needs a 3D (alpha, delta, DM) domain");
    if (!(p.n_frbs > 0.0) || !(p.b > 0.0) || !(p.c > 0.0) || !(p.d > 0.0) ||
        !(p.dm_star > 0.0))
        throw config_error("frb intensity: N_FRBs, b, c, d, DM* must all be positive");
    const double phi = FrbHyperparams::telescope_latitude_deg;
    // cos(phi - delta) must stay positive across the declination range
    if (phi - domain.lower[1] >= 90.0 || phi - domain.upper[1] <= -90.0)
        throw config_error("frb intensity: cos(phi - delta) <= 0 inside the domain");
    const double worst_cos = std::min(std::cos((phi - domain.lower[1]) * kDeg2Rad),
                                      std::cos((phi - domain.upper[1]) * kDeg2Rad));
    if (domain.lower[2] + p.dm0 / std::pow(worst_cos, p.b) < 0.0)
        throw config_error("frb intensity: DM + DM0/cos^b(phi-delta) negative in the domain");
    IntensityModel m(Kind::frb, std::move(domain));
    m.target_total_ = p.n_frbs;
    m.frb_ = p;
    m.finalize();
    return m;
}

Domain IntensityModel::default_frb_domain() {
    return Domain({0.0, -11.0, 0.0}, {360.0, 90.0, 5000.0}, {1.0, 1.0, 1.0}, true);
}

IntensityModel IntensityModel::reference_gaussian() {
    GaussianComponent g;
    g.mean = {0.64, 0.61};
    g.cov = {0.016, 0.007, 0.007, 0.02};
    return bivariate_gaussian(200.0, g, Domain::unit_square());
}

IntensityModel IntensityModel::reference_mixture() {
    GaussianComponent g1, g2;
    g1.mean = {0.64, 0.61};
    g1.cov = {0.016, 0.007, 0.007, 0.02};
    g2.mean = {0.25, 0.14};
    g2.cov = {0.007, 0.0005, 0.0005, 0.002};
    return gaussian_mixture(200.0, 0.71, g1, g2, Domain::unit_square());
}

double IntensityModel::unnormalized2d(double a, double b) const {
    switch (kind_) {
    case Kind::homogeneous:
        return 1.0;
    case Kind::bivariate_gaussian:
        return gaussian2(comp1_, a, b);
    case Kind::gaussian_mixture:
        return mixing_q_ * gaussian2(comp1_, a, b) +
               (1.0 - mixing_q_) * gaussian2(comp2_, a, b);
    case Kind::frb: {
        const double delta = a, dm = b;
        const double cosz = std::cos((FrbHyperparams::telescope_latitude_deg - delta) * kDeg2Rad);
        const double u = (dm + frb_.dm0 / std::pow(cosz, frb_.b)) / frb_.dm_star;
        if (u < 0.0) return 0.0;
        const double cosd = std::cos(delta * kDeg2Rad);
        return std::exp(frb_.c / (1.0 + frb_.d * cosd) - std::pow(u, 1.5)) * cosd * u * u * u;
    }
    }
    return 0.0;
}

double IntensityModel::unnormalized(const Point& s) const {
    if (kind_ == Kind::frb) return unnormalized2d(s[1], s[2]);
    return unnormalized2d(s[0], s[1]);
}

void IntensityModel::finalize() {
    if (kind_ == Kind::homogeneous) {
        norm_ = domain_.volume();
        total_mass_ = rate_ * norm_;
        envelope_sup_ = rate_ * 1.1;
        return;
    }
    // effective (non-alpha) dimensions carrying the structure of the model
    const std::size_t da = kind_ == Kind::frb ? 1 : 0;
    const std::size_t db = kind_ == Kind::frb ? 2 : 1;
    const double alo = domain_.lower[da], ahi = domain_.upper[da];
    const double blo = domain_.lower[db], bhi = domain_.upper[db];

    auto midpoint = [&](std::size_t n) {
        const double ha = (ahi - alo) / n, hb = (bhi - blo) / n;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = alo + (i + 0.5) * ha;
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                row += unnormalized2d(x, blo + (j + 0.5) * hb);
            s += row;
        }
        return s * ha * hb;
    };

    // nested midpoint doubling with Richardson acceleration
    const double rel_tol = 1e-6;
    std::size_t n = 32;
    double prev = midpoint(n);
    double prev_rich = prev;
    bool have_rich = false;
    bool converged = false;
    for (int level = 0; level < 9; ++level) {
        n *= 2;
        double cur = midpoint(n);
        double rich = (4.0 * cur - prev) / 3.0;
        if (have_rich && std::fabs(rich - prev_rich) <= rel_tol * std::fabs(rich)) {
            prev_rich = rich;
            converged = true;
            break;
        }
        prev = cur;
        prev_rich = rich;
        have_rich = true;
    }
    if (!converged)
        throw numerical_error("intensity normalization quadrature did not converge");
    norm_ = prev_rich;
    if (!(norm_ > 0.0) || !std::isfinite(norm_))
        throw config_error("intensity: total mass not finite and positive");
    if (kind_ == Kind::frb) norm_ *= domain_.extent(0); // alpha is uniform
    total_mass_ = target_total_;

    // 256x256 grid supremum for the rejection-sampling envelope
    double sup = 0.0;
    const std::size_t ng = 256;
    for (std::size_t i = 0; i < ng; ++i) {
        const double x = alo + (i + 0.5) * (ahi - alo) / ng;
        for (std::size_t j = 0; j < ng; ++j)
            sup = std::max(sup, unnormalized2d(x, blo + (j + 0.5) * (bhi - blo) / ng));
    }
    envelope_sup_ = 1.1 * sup * total_mass_ / norm_;
}

double IntensityModel::eval(const Point& s) const {
    if (s.dim() != domain_.dim())
        throw invalid_input("IntensityModel::eval: dimension mismatch");
    for (double x : s.coords)
        if (!std::isfinite(x)) throw invalid_input("IntensityModel::eval: non-finite coordinate");
    if (!domain_.contains(s)) return 0.0;
    if (kind_ == Kind::homogeneous) return rate_;
    return total_mass_ * unnormalized(s) / norm_;
}

double IntensityModel::normalized_density(const Point& s) const {
    return eval(s) / total_mass_;
}

IntensityModel::BallMass IntensityModel::integrate_ball(const Sphere& ball, std::size_t n_mc,
                                                        std::uint64_t seed) const {
    if (ball.radius < 0.0) throw invalid_input("integrate_ball: negative radius");
    if (ball.radius == 0.0) return {0.0, 0.0};
    if (n_mc < 1) throw invalid_input("integrate_ball: n_mc must be >= 1");
    const unsigned d = static_cast<unsigned>(domain_.dim());
    double vol = ball_volume(d, ball.radius);
    for (double w : domain_.weights) vol /= w;

    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point s(std::vector<double>(d, 0.0));
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < n_mc; ++t) {
        // uniform draw in the metric ball: random direction, radius ~ r u^{1/d}
        double z[8], nrm = 0.0;
        for (unsigned i = 0; i < d; ++i) {
            z[i] = gauss(rng);
            nrm += z[i] * z[i];
        }
        nrm = std::sqrt(nrm);
        const double rad = ball.radius * std::pow(unif(rng), 1.0 / d);
        for (unsigned i = 0; i < d; ++i)
            s[i] = ball.center[i] + rad * z[i] / (nrm * domain_.weights[i]);
        s = domain_.wrapped(s);
        const double v = eval(s);
        sum += v;
        sum2 += v * v;
    }
    const double m = sum / n_mc;
    const double var = n_mc > 1 ? (sum2 - n_mc * m * m) / (n_mc - 1.0) : 0.0;
    return {vol * m, vol * std::sqrt(std::max(var, 0.0) / n_mc)};
}

std::string IntensityModel::kind_name() const {
    switch (kind_) {
    case Kind::homogeneous: return "homogeneous";
    case Kind::bivariate_gaussian: return "bivariate-gaussian";
    case Kind::gaussian_mixture: return "gaussian-mixture";
    case Kind::frb: return "frb";
    }
    return "?";
}

} // namespace nhpp
