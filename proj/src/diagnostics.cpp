#include "nhpp/diagnostics.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhpp {

GelmanRubinResult gelman_rubin(const std::vector<std::vector<double>>& chains_in,
                               bool split) {
    std::vector<std::vector<double>> chains;
    if (split) {
        for (const auto& c : chains_in) {
            const std::size_t h = c.size() / 2;
            chains.emplace_back(c.begin(), c.begin() + h);
            chains.emplace_back(c.begin() + h, c.begin() + 2 * h);
        }
    } else {
        chains = chains_in;
    }
    const std::size_t m = chains.size();
    if (m < 2) throw invalid_input("gelman_rubin: need at least 2 chains");
    const std::size_t n = chains[0].size();
    if (n < 4) throw invalid_input("gelman_rubin: chains too short");
    for (const auto& c : chains)
        if (c.size() != n) throw invalid_input("gelman_rubin: unequal chain lengths");

    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = stats::mean(chains[j].data(), n);
        w += stats::sample_variance(chains[j].data(), n);
    }
    w /= m;
    GelmanRubinResult res;
    if (!(w > 0.0)) {
        res.degenerate = true;
        res.rhat = 1.0;
        return res;
    }
    const double b_over_n = stats::sample_variance(means.data(), m); // B/n
    const double var_plus = (n - 1.0) / n * w + b_over_n;
    res.rhat = std::sqrt(var_plus / w);
    return res;
}

EssResult effective_sample_size(const std::vector<double>& chain) {
    const std::size_t n = chain.size();
    if (n < 8) throw invalid_input("effective_sample_size: chain too short");
    const double m = stats::mean(chain.data(), n);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = chain[i] - m;
    double gamma0 = 0.0;
    for (double x : centered) gamma0 += x * x;
    gamma0 /= n;

    EssResult res;
    if (!(gamma0 > 0.0)) {
        res.ess = static_cast<double>(n);
        res.degenerate = true;
        return res;
    }

    auto rho = [&](std::size_t t) {
        double s = 0.0;
        for (std::size_t i = 0; i + t < n; ++i) s += centered[i] * centered[i + t];
        return s / (n * gamma0);
    };

    // Geyer: sum paired autocorrelations until the first nonpositive pair,
    // forcing the pair sequence to be nonincreasing.
    double tau = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        double pair = rho(t) + rho(t + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
    }
    tau -= 1.0; // rho_0 counted twice in the paired sums
    tau = std::max(tau, 1.0);
    res.ess = std::min(static_cast<double>(n), n / tau);
    return res;
}

DiagnosticsReport diagnose_chains(
    const std::vector<std::vector<std::array<double, 6>>>& chains,
    double rhat_threshold, double ess_threshold) {
    if (chains.size() < 2)
        throw invalid_input("diagnose_chains: need at least 2 chains");
    const std::size_t n = chains[0].size();
    for (const auto& c : chains)
        if (c.size() != n) throw invalid_input("diagnose_chains: unequal chain lengths");

    static const char* names[6] = {"N_FRBs", "b", "c", "d", "DM0", "DM*"};
    DiagnosticsReport report;
    report.rhat_threshold = rhat_threshold;
    report.ess_threshold = ess_threshold;
    report.n_chains = chains.size();
    report.chain_length = n;
    for (int p = 0; p < 6; ++p) {
        ParameterDiagnostics pd;
        pd.name = names[p];
        std::vector<std::vector<double>> series;
        for (const auto& c : chains) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = c[i][p];
            series.push_back(std::move(v));
        }
        const auto gr = gelman_rubin(series);
        pd.rhat = gr.rhat;
        pd.degenerate = gr.degenerate;
        for (const auto& v : series) {
            const auto ess = effective_sample_size(v);
            pd.ess_per_chain.push_back(ess.ess);
            pd.ess_pooled += ess.ess;
            pd.degenerate = pd.degenerate || ess.degenerate;
        }
        pd.rhat_exceeded = pd.rhat > rhat_threshold;
        pd.low_ess = pd.ess_pooled < ess_threshold;
        report.converged = report.converged && !pd.rhat_exceeded;
        report.parameters.push_back(std::move(pd));
    }
    return report;
}

} // namespace nhpp
