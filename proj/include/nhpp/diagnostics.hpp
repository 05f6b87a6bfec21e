#ifndef NHPP_DIAGNOSTICS_HPP
#define NHPP_DIAGNOSTICS_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace nhpp {

struct GelmanRubinResult {
    double rhat = 1.0;
    bool degenerate = false; // zero within-chain variance
};

/// Classic (non-split) Gelman-Rubin R-hat: sqrt(var+ / W) with
/// var+ = (n-1)/n W + B/n. Pass split=true to halve each chain first.
GelmanRubinResult gelman_rubin(const std::vector<std::vector<double>>& chains,
                               bool split = false);

struct EssResult {
    double ess = 0.0;
    bool degenerate = false; // constant chain
};

/// Effective sample size n / (1 + 2 sum rho_t) with Geyer initial-monotone
/// truncation of the paired autocorrelation sums.
EssResult effective_sample_size(const std::vector<double>& chain);

struct ParameterDiagnostics {
    std::string name;
    double rhat = 1.0;
    std::vector<double> ess_per_chain;
    double ess_pooled = 0.0;
    bool rhat_exceeded = false;
    bool low_ess = false;
    bool degenerate = false;
};

struct DiagnosticsReport {
    std::vector<ParameterDiagnostics> parameters;
    double rhat_threshold = 1.01;
    double ess_threshold = 400.0;
    std::size_t n_chains = 0;
    std::size_t chain_length = 0;
    bool converged = true; // no threshold exceedances
};

/// Per-parameter report over equal-length chains of theta draws.
DiagnosticsReport diagnose_chains(
    const std::vector<std::vector<std::array<double, 6>>>& chains,
    double rhat_threshold = 1.01, double ess_threshold = 400.0);

} // namespace nhpp

#endif
