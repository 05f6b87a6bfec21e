#include "nhpp/geometry.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <numeric>

namespace nhpp {

Domain::Domain(std::vector<double> lo, std::vector<double> hi,
               std::vector<double> w, bool wrap)
    : lower(std::move(lo)), upper(std::move(hi)), weights(std::move(w)), wrap_first(wrap) {
    if (lower.size() != upper.size() || lower.size() != weights.size() || lower.empty())
        throw invalid_input("Domain: inconsistent or empty bounds");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i]))
            throw invalid_input("Domain: lower must be < upper in every dimension");
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw invalid_input("Domain: metric weights must be positive");
    }
}

bool Domain::contains(const Point& p) const {
    if (p.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        double x = p[i];
        if (wrap_first && i == 0) {
            // periodic coordinate is in-domain after wrapping
            if (!std::isfinite(x)) return false;
            continue;
        }
        if (!(x >= lower[i] && x <= upper[i])) return false;
    }
    return true;
}

double Domain::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= extent(i);
    return v;
}

Point Domain::wrapped(Point p) const {
    if (wrap_first && p.dim() == dim()) {
        const double period = wrap_period();
        double x = p[0] - lower[0];
        x -= period * std::floor(x / period);
        p[0] = x + lower[0];
    }
    return p;
}

Domain Domain::unit_square(double weight) {
    return Domain({0.0, 0.0}, {1.0, 1.0}, {weight, weight}, false);
}

double metric_distance(const Point& a, const Point& b, const Domain& domain) {
    if (a.dim() != domain.dim() || b.dim() != domain.dim())
        throw invalid_input("metric_distance: dimension mismatch");
    double s2 = 0.0;
    for (std::size_t i = 0; i < domain.dim(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i]))
            throw invalid_input("metric_distance: non-finite coordinate");
        double d = a[i] - b[i];
        if (i == 0 && domain.wrap_first) {
            const double period = domain.wrap_period();
            d = std::fabs(d);
            d = std::fmod(d, period);
            d = std::min(d, period - d);
        }
        d *= domain.weights[i];
        s2 += d * d;
    }
    return std::sqrt(s2);
}

namespace {

using Vec = std::vector<double>;

double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct Ball {
    Vec center;
    double r2 = -1.0; // negative: empty ball
};

bool contains(const Ball& b, const Vec& p) {
    if (b.r2 < 0.0) return false;
    return dist2(p, b.center) <= b.r2 * (1.0 + 1e-10) + 1e-30;
}

// Circumscribing ball of an affinely independent support set: the center is
// the point of the support's affine hull equidistant from all members.
Ball ball_from_support(const std::vector<const Vec*>& support) {
    Ball b;
    if (support.empty()) return b;
    const Vec& p0 = *support[0];
    const std::size_t m = support.size() - 1;
    if (m == 0) {
        b.center = p0;
        b.r2 = 0.0;
        return b;
    }
    const std::size_t d = p0.size();
    // A t = rhs with A_{jk} = 2 v_j . v_k, rhs_j = v_j . v_j, v_j = p_j - p0.
    std::vector<Vec> v(m, Vec(d));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < d; ++i) v[j][i] = (*support[j + 1])[i] - p0[i];
    std::vector<Vec> A(m, Vec(m));
    Vec rhs(m);
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            double dot = std::inner_product(v[j].begin(), v[j].end(), v[k].begin(), 0.0);
            A[j][k] = 2.0 * dot;
            scale = std::max(scale, std::fabs(A[j][k]));
        }
        rhs[j] = 0.5 * A[j][j];
    }
    // Gaussian elimination with partial pivoting; near-zero pivots mark an
    // affinely dependent (duplicate) member, whose coefficient is dropped.
    Vec t(m, 0.0);
    std::vector<std::size_t> col(m);
    std::iota(col.begin(), col.end(), std::size_t{0});
    const double tol = std::max(scale, 1.0) * 1e-13;
    std::size_t row = 0;
    for (std::size_t c = 0; c < m && row < m; ++c) {
        std::size_t piv = row;
        for (std::size_t rr = row + 1; rr < m; ++rr)
            if (std::fabs(A[rr][c]) > std::fabs(A[piv][c])) piv = rr;
        if (std::fabs(A[piv][c]) <= tol) continue;
        std::swap(A[row], A[piv]);
        std::swap(rhs[row], rhs[piv]);
        for (std::size_t rr = row + 1; rr < m; ++rr) {
            double f = A[rr][c] / A[row][c];
            for (std::size_t cc = c; cc < m; ++cc) A[rr][cc] -= f * A[row][cc];
            rhs[rr] -= f * rhs[row];
        }
        col[row] = c;
        ++row;
    }
    for (std::size_t rr = row; rr-- > 0;) {
        double s = rhs[rr];
        for (std::size_t cc = col[rr] + 1; cc < m; ++cc) s -= A[rr][cc] * t[cc];
        t[col[rr]] = s / A[rr][col[rr]];
    }
    b.center = p0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < d; ++i) b.center[i] += t[j] * v[j][i];
    b.r2 = 0.0;
    for (const Vec* p : support) b.r2 = std::max(b.r2, dist2(*p, b.center));
    return b;
}

// Move-to-front Welzl on the scaled point list.
Ball welzl_mtf(std::vector<Vec>& pts, std::list<std::size_t>& order,
               std::list<std::size_t>::iterator end_it,
               std::vector<const Vec*>& support, std::size_t dim) {
    Ball b = ball_from_support(support);
    if (support.size() == dim + 1) return b;
    for (auto it = order.begin(); it != end_it;) {
        auto next = std::next(it);
        const Vec& p = pts[*it];
        if (!contains(b, p)) {
            support.push_back(&p);
            b = welzl_mtf(pts, order, it, support, dim);
            support.pop_back();
            order.splice(order.begin(), order, it);
        }
        it = next;
    }
    return b;
}

} // namespace

Sphere min_bounding_sphere(const std::vector<Point>& points, const Domain& domain) {
    if (points.empty())
        throw invalid_input("min_bounding_sphere: empty point list");
    const std::size_t d = domain.dim();
    const double ref = points.front().dim() == d && domain.wrap_first
                           ? points.front()[0]
                           : 0.0;
    std::vector<Vec> scaled(points.size(), Vec(d));
    for (std::size_t n = 0; n < points.size(); ++n) {
        const Point& p = points[n];
        if (p.dim() != d)
            throw invalid_input("min_bounding_sphere: dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) {
            double x = p[i];
            if (!std::isfinite(x))
                throw invalid_input("min_bounding_sphere: non-finite coordinate");
            if (i == 0 && domain.wrap_first) {
                // unwrap around the first point so cluster members are contiguous
                const double period = domain.wrap_period();
                x = ref + std::remainder(x - ref, period);
            }
            scaled[n][i] = x * domain.weights[i];
        }
    }
    std::list<std::size_t> order;
    {
        std::vector<std::size_t> idx(points.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(0x5ebULL); // fixed shuffle: results independent of call order
        std::shuffle(idx.begin(), idx.end(), rng);
        order.assign(idx.begin(), idx.end());
    }
    std::vector<const Vec*> support;
    Ball b = welzl_mtf(scaled, order, order.end(), support, d);

    Sphere s;
    s.radius = std::sqrt(std::max(b.r2, 0.0));
    s.center.coords.resize(d);
    for (std::size_t i = 0; i < d; ++i) s.center[i] = b.center[i] / domain.weights[i];
    s.center = domain.wrapped(s.center);
    return s;
}

} // namespace nhpp
