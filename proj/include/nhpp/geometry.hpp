#ifndef NHPP_GEOMETRY_HPP
#define NHPP_GEOMETRY_HPP

#include <cstddef>
#include <vector>

namespace nhpp {

/// A point in the detection domain. For the FRB domain the coordinates are
/// (alpha [deg], delta [deg], DM [pc cm^-3]); the library itself is
/// dimension-agnostic.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }
};

/// Axis-aligned bounded domain with per-dimension metric weights. A single
/// weighted Euclidean metric is formed over heterogeneous units:
///   d(a,b)^2 = sum_i w_i^2 (a_i - b_i)^2,
/// with the first coordinate optionally periodic (shortest arc), used for
/// right ascension.
struct Domain {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> weights; // all > 0
    bool wrap_first = false;     // treat dim 0 as periodic over [lower0, upper0)

    Domain() = default;
    Domain(std::vector<double> lo, std::vector<double> hi,
           std::vector<double> w, bool wrap = false);

    std::size_t dim() const { return lower.size(); }
    double extent(std::size_t i) const { return upper[i] - lower[i]; }
    double wrap_period() const { return upper[0] - lower[0]; }
    bool contains(const Point& p) const;
    double volume() const;

    /// Wrap the first coordinate into [lower0, upper0) when periodic.
    Point wrapped(Point p) const;

    static Domain unit_square(double weight = 1.0);
};

struct Sphere {
    Point center;
    double radius = 0.0; // in metric-weighted units
};

/// Weighted Euclidean distance between two in-domain points; the periodic
/// coordinate difference is taken along the shortest arc.
double metric_distance(const Point& a, const Point& b, const Domain& domain);

/// Smallest enclosing ball of a nonempty point set under the domain metric
/// (move-to-front Welzl). With a periodic first coordinate the points are
/// unwrapped around the first point before solving; intended for clusters
/// spanning less than half the period.
Sphere min_bounding_sphere(const std::vector<Point>& points, const Domain& domain);

} // namespace nhpp

#endif
