#include "nhpp/noise.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nhpp {

NoiseModel NoiseModel::degenerate_zero(std::size_t dim) {
    if (dim == 0) throw invalid_input("NoiseModel: zero dimension");
    return NoiseModel(Kind::degenerate_zero, dim);
}

NoiseModel NoiseModel::isotropic_gaussian(std::vector<double> sigma) {
    if (sigma.empty()) throw invalid_input("NoiseModel: empty sigma");
    for (double s : sigma)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw invalid_input("NoiseModel: sigma must be nonnegative and finite");
    NoiseModel m(Kind::isotropic_gaussian, sigma.size());
    m.sigma_ = std::move(sigma);
    return m;
}

NoiseModel NoiseModel::gridded_empirical(std::vector<double> lo, std::vector<double> hi,
                                         std::vector<std::size_t> shape,
                                         std::vector<double> weights) {
    const std::size_t d = lo.size();
    if (d == 0 || hi.size() != d || shape.size() != d)
        throw invalid_input("NoiseModel: inconsistent grid specification");
    std::size_t ncells = 1;
    double cellvol = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        if (!(lo[i] < hi[i]) || shape[i] == 0)
            throw invalid_input("NoiseModel: bad grid patch");
        ncells *= shape[i];
        cellvol *= (hi[i] - lo[i]) / shape[i];
    }
    if (weights.size() != ncells)
        throw invalid_input("NoiseModel: weight count does not match grid shape");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw invalid_input("NoiseModel: negative grid weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw invalid_input("NoiseModel: grid weights must sum to 1");
    NoiseModel m(Kind::gridded_empirical, d);
    m.lo_ = std::move(lo);
    m.hi_ = std::move(hi);
    m.shape_ = std::move(shape);
    m.weights_ = std::move(weights);
    m.cell_volume_ = cellvol;
    m.cum_weights_.resize(ncells);
    std::partial_sum(m.weights_.begin(), m.weights_.end(), m.cum_weights_.begin());
    m.cum_weights_.back() = 1.0;
    return m;
}

std::vector<double> NoiseModel::sample(Rng& rng) const {
    std::vector<double> e(dim_, 0.0);
    switch (kind_) {
    case Kind::degenerate_zero:
        break;
    case Kind::isotropic_gaussian: {
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t i = 0; i < dim_; ++i) e[i] = sigma_[i] * g(rng);
        break;
    }
    case Kind::gridded_empirical: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double t = u(rng);
        std::size_t cell = static_cast<std::size_t>(
            std::lower_bound(cum_weights_.begin(), cum_weights_.end(), t) -
            cum_weights_.begin());
        // unravel the row-major cell index, then place uniformly in the cell
        for (std::size_t i = dim_; i-- > 0;) {
            const std::size_t idx = cell % shape_[i];
            cell /= shape_[i];
            const double h = (hi_[i] - lo_[i]) / shape_[i];
            e[i] = lo_[i] + (idx + u(rng)) * h;
        }
        break;
    }
    }
    return e;
}

double NoiseModel::density(const std::vector<double>& e) const {
    if (e.size() != dim_) throw invalid_input("NoiseModel::density: dimension mismatch");
    switch (kind_) {
    case Kind::degenerate_zero: {
        for (double x : e)
            if (x != 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    case Kind::isotropic_gaussian: {
        double p = 1.0;
        for (std::size_t i = 0; i < dim_; ++i) p *= stats::normal_pdf(e[i], 0.0, sigma_[i]);
        return p;
    }
    case Kind::gridded_empirical: {
        std::size_t cell = 0;
        for (std::size_t i = 0; i < dim_; ++i) {
            if (e[i] < lo_[i] || e[i] > hi_[i]) return 0.0;
            const double h = (hi_[i] - lo_[i]) / shape_[i];
            std::size_t idx = std::min(static_cast<std::size_t>((e[i] - lo_[i]) / h),
                                       shape_[i] - 1);
            cell = cell * shape_[i] + idx;
        }
        return weights_[cell] / cell_volume_;
    }
    }
    return 0.0;
}

double NoiseModel::log_density(const std::vector<double>& e) const {
    const double p = density(e);
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double NoiseModel::metric_sigma(const std::vector<double>& w) const {
    if (kind_ != Kind::isotropic_gaussian)
        throw invalid_input("radial law: only isotropic-gaussian noise supports the i.i.d. form");
    double s0 = -1.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double s = sigma_[i] * (w.empty() ? 1.0 : w[i]);
        if (s0 < 0.0)
            s0 = s;
        else if (std::fabs(s - s0) > 1e-9 * std::max(s, s0))
            throw invalid_input("radial law: noise is not isotropic under the metric weights");
    }
    if (!(s0 > 0.0)) throw invalid_input("radial law: zero sigma");
    return s0;
}

double NoiseModel::radial_max_pdf(unsigned k, double x,
                                  const std::vector<double>& w) const {
    if (k < 1) throw invalid_input("radial_max_pdf: k must be >= 1");
    const double s = metric_sigma(w);
    const unsigned d = static_cast<unsigned>(dim_);
    const double f = stats::chi_pdf(x, d, s);
    if (k == 1) return f;
    const double F = stats::chi_cdf(x, d, s);
    return k * std::pow(F, k - 1.0) * f;
}

double NoiseModel::radial_max_cdf(unsigned k, double x,
                                  const std::vector<double>& w) const {
    if (k < 1) throw invalid_input("radial_max_cdf: k must be >= 1");
    const double s = metric_sigma(w);
    return std::pow(stats::chi_cdf(x, static_cast<unsigned>(dim_), s), static_cast<double>(k));
}

double NoiseModel::radial_max_quantile(unsigned k, double p,
                                       const std::vector<double>& w) const {
    if (!(p >= 0.0 && p < 1.0)) throw invalid_input("radial_max_quantile: p outside [0,1)");
    const double s = metric_sigma(w);
    double hi = 10.0 * s * std::sqrt(static_cast<double>(dim_));
    while (radial_max_cdf(k, hi, w) < p) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radial_max_cdf(k, mid, w) < p ? lo : hi) = mid;
    }
    return hi;
}

} // namespace nhpp
