#ifndef NHPP_CONTACT_HPP
#define NHPP_CONTACT_HPP

#include "nhpp/geometry.hpp"
#include "nhpp/intensity.hpp"
#include "nhpp/noise.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nhpp {

/// Query for the k-contact distance probability at (s0, r).
struct ContactQuery {
    Point s0;
    double r = 0.0;  // metric-weighted units
    unsigned k = 1;
};

/// P(d_k(s0, X) <= r) for the noiseless process: the Poisson tail
/// 1 - sum_{i=0}^{k-1} M^i e^{-M} / i! with M the ball mass, evaluated in
/// log space and clamped to [0,1].
double berman_cdf(const IntensityModel& model, const ContactQuery& q,
                  std::size_t n_mc, std::uint64_t seed);

struct BoundResult {
    double value = 0.0;     // clamped to [0,1]
    double std_error = 0.0; // combined MC / quadrature error
    double raw = 0.0;       // pre-clamp estimate
};

/// Upper bound on P(d_k(s0, Y) <= r) for noisy observations: outer Monte
/// Carlo over joint error draws, Berman tail at radius r + max|eps_i| per
/// draw. One noise model per cluster member (length k).
BoundResult contact_bound(const IntensityModel& model,
                          const std::vector<NoiseModel>& noise_per_event,
                          const ContactQuery& q, std::size_t n_outer,
                          std::size_t n_inner, std::uint64_t seed);

/// The i.i.d. simplification of the bound: 1D quadrature of the Berman tail
/// at radius r + x against the density of max|eps| (k F^{k-1} f), truncated
/// where the max-CDF exceeds 1 - 1e-10.
BoundResult contact_bound_iid(const IntensityModel& model, const NoiseModel& noise,
                              const ContactQuery& q, std::size_t n_grid,
                              std::size_t n_inner, std::uint64_t seed);

/// One posterior-conditional intensity draw per replicate (callers may cache
/// built models; the callable owns any randomness via the supplied rng).
using ModelSampler = std::function<const IntensityModel&(Rng&)>;
/// One true-position draw per cluster member per replicate.
using PointSampler = std::function<Point(Rng&)>;

struct PcSimulation {
    double median = 0.0;
    double ci_lo = 0.0; // 2.5% replicate quantile
    double ci_hi = 0.0; // 97.5% replicate quantile
    std::vector<double> replicates;
};

/// Direct simulation of the probability of coincidence: per replicate, draw
/// an intensity from the posterior and true member positions from their
/// localization densities, take the minimal bounding sphere of the drawn
/// positions and evaluate the Berman CDF there with k = cluster size.
PcSimulation simulate_pc(const ModelSampler& draw_model,
                         const std::vector<PointSampler>& draw_members,
                         const Domain& domain, std::size_t n_rep,
                         std::size_t n_inner, std::uint64_t seed,
                         unsigned workers = 1);

struct ClusterPc {
    std::string id;
    double pc = 0.0;    // simulated median
    double bound = 0.0; // upper bound
};

struct PreviousPc {
    std::string id;
    double pc_prev = 0.0;
};

struct ComparisonRow {
    std::string id;
    double pc = 0.0, bound = 0.0, pc_prev = 0.0;
    double improvement = 0.0; // previous / new
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> unmatched; // ids present on only one side
    double median_improvement = 0.0;
    std::size_t n_improved = 0;
};

ComparisonTable compare_with_previous(const std::vector<ClusterPc>& results,
                                      const std::vector<PreviousPc>& previous);

} // namespace nhpp

#endif
