#ifndef NHPP_SIMULATE_HPP
#define NHPP_SIMULATE_HPP

#include "nhpp/intensity.hpp"
#include "nhpp/noise.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nhpp {

struct SyntheticDataset {
    std::vector<Point> true_positions;
    std::vector<Point> noisy_positions;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

/// Poisson draw of the event count with mean equal to the total mass.
std::size_t sample_count(const IntensityModel& model, Rng& rng);

/// n i.i.d. draws from the normalized intensity via rejection sampling with a
/// uniform envelope at the grid-estimated supremum (inflated by 10%). An
/// envelope violation discards accepted draws, re-estimates the envelope and
/// restarts.
std::vector<Point> sample_positions(const IntensityModel& model, std::size_t n, Rng& rng);

/// Full synthetic draw: count, true positions, then per-event perturbation
/// with out-of-domain samples rejected and redrawn (max_noise_retries guard).
SyntheticDataset make_dataset(const IntensityModel& model, const NoiseModel& noise,
                              std::uint64_t seed, std::size_t max_noise_retries = 1000);

struct BoundValidationConfig {
    std::string intensity_kind = "gaussian"; // gaussian | mixture
    std::vector<double> sigma_err = {1e-3, 1e-2, 1e-1};
    double r = 1e-2;
    unsigned k = 2;
    std::size_t n_test_points = 500;
    std::size_t n_replicates = 5000;
    bool intensity_weighted_test_points = false; // default: uniform over domain
    std::size_t bound_n_grid = 48;
    std::size_t bound_n_inner = 2000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct BoundValidationRow {
    Point s0;
    double lambda_s0 = 0.0;
    double frequency = 0.0; // empirical P(>= k events within r) over replicates
    double bound = 0.0;
    double bound_se = 0.0;
};

struct BoundValidationTable {
    std::string intensity_kind;
    double sigma_err = 0.0;
    std::size_t n_replicates = 0;
    std::vector<BoundValidationRow> rows;
};

/// The bound-validation experiment: for each test point, the empirical
/// frequency of >= k noisy events within r across replicate datasets, next
/// to the analytic upper bound. One table per noise level.
std::vector<BoundValidationTable> bound_validation_experiment(const BoundValidationConfig& cfg);

} // namespace nhpp

#endif
