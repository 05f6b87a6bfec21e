#include "nhpp/simulate.hpp"
#include "nhpp/contact.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/parallel.hpp"

#include <atomic>
#include <cmath>

namespace nhpp {

std::size_t sample_count(const IntensityModel& model, Rng& rng) {
    std::poisson_distribution<long> pois(model.total_mass());
    return static_cast<std::size_t>(pois(rng));
}

std::vector<Point> sample_positions(const IntensityModel& model, std::size_t n, Rng& rng) {
    std::vector<Point> out;
    out.reserve(n);
    const Domain& dom = model.domain();
    const std::size_t d = dom.dim();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double envelope = model.envelope_sup();
    while (out.size() < n) {
        Point s(std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i)
            s[i] = dom.lower[i] + unif(rng) * dom.extent(i);
        const double lam = model.eval(s);
        if (lam > envelope) {
            // envelope too small: re-estimate and restart the batch
            envelope = 1.1 * lam;
            out.clear();
            continue;
        }
        if (unif(rng) * envelope <= lam) out.push_back(std::move(s));
    }
    return out;
}

SyntheticDataset make_dataset(const IntensityModel& model, const NoiseModel& noise,
                              std::uint64_t seed, std::size_t max_noise_retries) {
    if (noise.dim() != model.domain().dim())
        throw invalid_input("make_dataset: noise dimension does not match the domain");
    Rng rng = make_rng(seed);
    SyntheticDataset ds;
    ds.seed = seed;
    ds.n = sample_count(model, rng);
    ds.true_positions = sample_positions(model, ds.n, rng);
    ds.noisy_positions.reserve(ds.n);
    const Domain& dom = model.domain();
    for (const Point& x : ds.true_positions) {
        Point y;
        bool ok = false;
        for (std::size_t attempt = 0; attempt <= max_noise_retries; ++attempt) {
            const auto eps = noise.sample(rng);
            y = x;
            for (std::size_t i = 0; i < eps.size(); ++i) y[i] += eps[i];
            y = dom.wrapped(y);
            if (dom.contains(y)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw numerical_error("make_dataset: noise boundary rejection exceeded retry limit");
        ds.noisy_positions.push_back(std::move(y));
    }
    return ds;
}

std::vector<BoundValidationTable> bound_validation_experiment(const BoundValidationConfig& cfg) {
    IntensityModel model = cfg.intensity_kind == "mixture"
                               ? IntensityModel::reference_mixture()
                               : IntensityModel::reference_gaussian();
    if (cfg.intensity_kind != "gaussian" && cfg.intensity_kind != "mixture")
        throw config_error("bound_validation_experiment: intensity kind must be gaussian or mixture");
    if (cfg.n_test_points == 0 || cfg.n_replicates == 0)
        throw config_error("bound_validation_experiment: counts must be positive");
    const Domain& dom = model.domain();
    const std::size_t d = dom.dim();

    // shared test points across noise levels
    std::vector<Point> test_points;
    {
        Rng rng = make_rng(cfg.seed, 0x70);
        if (cfg.intensity_weighted_test_points) {
            test_points = sample_positions(model, cfg.n_test_points, rng);
        } else {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (std::size_t i = 0; i < cfg.n_test_points; ++i) {
                Point s(std::vector<double>(d, 0.0));
                for (std::size_t j = 0; j < d; ++j)
                    s[j] = dom.lower[j] + unif(rng) * dom.extent(j);
                test_points.push_back(std::move(s));
            }
        }
    }

    std::vector<BoundValidationTable> tables;
    for (std::size_t cell = 0; cell < cfg.sigma_err.size(); ++cell) {
        const double sigma = cfg.sigma_err[cell];
        const NoiseModel noise =
            sigma > 0.0 ? NoiseModel::isotropic_gaussian(std::vector<double>(d, sigma))
                        : NoiseModel::degenerate_zero(d);
        const std::uint64_t cell_seed = derive_seed(cfg.seed, 1000 + cell);

        // empirical frequency of >= k events within r, per test point
        std::vector<std::atomic<std::size_t>> hits(cfg.n_test_points);
        for (auto& h : hits) h.store(0);
        parallel_for(cfg.n_replicates, cfg.workers, [&](std::size_t rep) {
            const SyntheticDataset ds =
                make_dataset(model, noise, derive_seed(cell_seed, rep));
            for (std::size_t t = 0; t < cfg.n_test_points; ++t) {
                unsigned within = 0;
                for (const Point& y : ds.noisy_positions) {
                    if (metric_distance(test_points[t], y, dom) <= cfg.r &&
                        ++within >= cfg.k)
                        break;
                }
                if (within >= cfg.k) hits[t].fetch_add(1);
            }
        });

        BoundValidationTable table;
        table.intensity_kind = cfg.intensity_kind;
        table.sigma_err = sigma;
        table.n_replicates = cfg.n_replicates;
        table.rows.resize(cfg.n_test_points);
        parallel_for(cfg.n_test_points, cfg.workers, [&](std::size_t t) {
            BoundValidationRow row;
            row.s0 = test_points[t];
            row.lambda_s0 = model.eval(test_points[t]);
            row.frequency = static_cast<double>(hits[t].load()) / cfg.n_replicates;
            const ContactQuery q{test_points[t], cfg.r, cfg.k};
            const BoundResult b =
                sigma > 0.0
                    ? contact_bound_iid(model, noise, q, cfg.bound_n_grid,
                                        cfg.bound_n_inner, derive_seed(cell_seed, 1u << 20 | t))
                    : contact_bound_iid(model, noise, q, 2, cfg.bound_n_inner,
                                        derive_seed(cell_seed, 1u << 20 | t));
            row.bound = b.value;
            row.bound_se = b.std_error;
            table.rows[t] = std::move(row);
        });
        tables.push_back(std::move(table));
    }
    return tables;
}

} // namespace nhpp
