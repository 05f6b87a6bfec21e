#include "nhpp/contact.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/parallel.hpp"
#include "nhpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhpp {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Berman tail at ball mass M +/- its MC standard error, used to propagate
// the inner integration error through the nonlinear tail.
double tail_spread(double m, double se, unsigned k) {
    if (se <= 0.0) return 0.0;
    const double hi = stats::poisson_tail(m + se, k);
    const double lo = stats::poisson_tail(std::max(m - se, 0.0), k);
    return 0.5 * (hi - lo);
}

double metric_norm(const std::vector<double>& e, const Domain& dom) {
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double d = e[i] * dom.weights[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

double berman_cdf(const IntensityModel& model, const ContactQuery& q,
                  std::size_t n_mc, std::uint64_t seed) {
    if (q.r < 0.0) throw invalid_input("berman_cdf: negative radius");
    if (q.k < 1) throw invalid_input("berman_cdf: k must be >= 1");
    const auto mass = model.integrate_ball({q.s0, q.r}, n_mc, seed);
    return clamp01(stats::poisson_tail(mass.estimate, q.k));
}

BoundResult contact_bound(const IntensityModel& model,
                          const std::vector<NoiseModel>& noise_per_event,
                          const ContactQuery& q, std::size_t n_outer,
                          std::size_t n_inner, std::uint64_t seed) {
    if (noise_per_event.size() != q.k)
        throw invalid_input("contact_bound: need one noise model per cluster member");
    if (n_outer < 1) throw invalid_input("contact_bound: n_outer must be >= 1");
    const Domain& dom = model.domain();
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < n_outer; ++t) {
        Rng rng = make_rng(seed, t);
        double max_eps = 0.0;
        for (const NoiseModel& nm : noise_per_event)
            max_eps = std::max(max_eps, metric_norm(nm.sample(rng), dom));
        const auto mass =
            model.integrate_ball({q.s0, q.r + max_eps}, n_inner, derive_seed(seed, t + n_outer));
        const double p = stats::poisson_tail(mass.estimate, q.k);
        sum += p;
        sum2 += p * p;
    }
    const double m = sum / n_outer;
    const double var = n_outer > 1 ? (sum2 - n_outer * m * m) / (n_outer - 1.0) : 0.0;
    BoundResult r;
    r.raw = m;
    r.value = clamp01(m);
    r.std_error = std::sqrt(std::max(var, 0.0) / n_outer);
    return r;
}

BoundResult contact_bound_iid(const IntensityModel& model, const NoiseModel& noise,
                              const ContactQuery& q, std::size_t n_grid,
                              std::size_t n_inner, std::uint64_t seed) {
    if (q.k < 1) throw invalid_input("contact_bound_iid: k must be >= 1");
    if (noise.kind() == NoiseModel::Kind::gridded_empirical)
        throw invalid_input("contact_bound_iid: gridded noise is not i.i.d.-capable");
    if (noise.kind() == NoiseModel::Kind::degenerate_zero) {
        // max|eps| is identically zero: the bound collapses to the Berman CDF
        const auto mass = model.integrate_ball({q.s0, q.r}, n_inner, seed);
        BoundResult r;
        r.raw = stats::poisson_tail(mass.estimate, q.k);
        r.value = clamp01(r.raw);
        r.std_error = tail_spread(mass.estimate, mass.std_error, q.k);
        return r;
    }
    if (n_grid < 2) throw invalid_input("contact_bound_iid: n_grid must be >= 2");
    const auto& w = model.domain().weights;
    const double x_max = noise.radial_max_quantile(q.k, 1.0 - 1e-10, w);
    const double h = x_max / n_grid;
    double sum = 0.0, var = 0.0;
    for (std::size_t j = 0; j < n_grid; ++j) {
        const double x = (j + 0.5) * h;
        const double pdf = noise.radial_max_pdf(q.k, x, w);
        if (pdf == 0.0) continue;
        const auto mass =
            model.integrate_ball({q.s0, q.r + x}, n_inner, derive_seed(seed, j));
        sum += h * pdf * stats::poisson_tail(mass.estimate, q.k);
        const double d = h * pdf * tail_spread(mass.estimate, mass.std_error, q.k);
        var += d * d;
    }
    BoundResult r;
    r.raw = sum;
    r.value = clamp01(sum);
    r.std_error = std::sqrt(var);
    return r;
}

PcSimulation simulate_pc(const ModelSampler& draw_model,
                         const std::vector<PointSampler>& draw_members,
                         const Domain& domain, std::size_t n_rep,
                         std::size_t n_inner, std::uint64_t seed, unsigned workers) {
    const unsigned k = static_cast<unsigned>(draw_members.size());
    if (k < 2) throw invalid_input("simulate_pc: cluster size must be >= 2");
    if (n_rep < 1) throw invalid_input("simulate_pc: n_rep must be >= 1");
    PcSimulation out;
    out.replicates.resize(n_rep);
    parallel_for(n_rep, workers, [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        const IntensityModel& model = draw_model(rng);
        std::vector<Point> xs;
        xs.reserve(k);
        for (const auto& draw : draw_members) xs.push_back(draw(rng));
        const Sphere sphere = min_bounding_sphere(xs, domain);
        out.replicates[t] =
            berman_cdf(model, {sphere.center, sphere.radius, k}, n_inner,
                       derive_seed(seed, t + n_rep));
    });
    std::vector<double> sorted = out.replicates;
    std::sort(sorted.begin(), sorted.end());
    out.median = stats::quantile(sorted.data(), sorted.size(), 0.5);
    out.ci_lo = stats::quantile(sorted.data(), sorted.size(), 0.025);
    out.ci_hi = stats::quantile(sorted.data(), sorted.size(), 0.975);
    return out;
}

ComparisonTable compare_with_previous(const std::vector<ClusterPc>& results,
                                      const std::vector<PreviousPc>& previous) {
    ComparisonTable table;
    std::vector<bool> prev_used(previous.size(), false);
    std::vector<double> ratios;
    for (const auto& res : results) {
        const PreviousPc* match = nullptr;
        for (std::size_t i = 0; i < previous.size(); ++i)
            if (previous[i].id == res.id) {
                match = &previous[i];
                prev_used[i] = true;
                break;
            }
        if (!match) {
            table.unmatched.push_back(res.id);
            continue;
        }
        ComparisonRow row;
        row.id = res.id;
        row.pc = res.pc;
        row.bound = res.bound;
        row.pc_prev = match->pc_prev;
        row.improvement = res.pc > 0.0
                              ? match->pc_prev / res.pc
                              : std::numeric_limits<double>::infinity();
        if (row.improvement > 1.0) ++table.n_improved;
        ratios.push_back(row.improvement);
        table.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < previous.size(); ++i)
        if (!prev_used[i]) table.unmatched.push_back(previous[i].id);
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        table.median_improvement = stats::quantile(ratios.data(), ratios.size(), 0.5);
    }
    return table;
}

} // namespace nhpp
