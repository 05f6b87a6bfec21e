#include "nhpp/mcmc.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/parallel.hpp"
#include "nhpp/simulate.hpp"
#include "nhpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nhpp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

PriorMarginal PriorMarginal::uniform(double lo, double hi) {
    if (!(lo < hi)) throw invalid_input("PriorMarginal::uniform: lo must be < hi");
    PriorMarginal m;
    m.kind_ = Kind::uniform;
    m.a_ = lo;
    m.b_ = hi;
    return m;
}

PriorMarginal PriorMarginal::normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw invalid_input("PriorMarginal::normal: sigma must be > 0");
    PriorMarginal m;
    m.kind_ = Kind::normal;
    m.a_ = mu;
    m.b_ = sigma;
    return m;
}

PriorMarginal PriorMarginal::truncated_normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw invalid_input("PriorMarginal::truncated_normal: sigma must be > 0");
    PriorMarginal m;
    m.kind_ = Kind::truncated_normal;
    m.a_ = mu;
    m.b_ = sigma;
    m.log_trunc_mass_ = std::log(1.0 - stats::normal_cdf(0.0, mu, sigma));
    return m;
}

double PriorMarginal::log_pdf(double x) const {
    switch (kind_) {
    case Kind::uniform:
        return (x >= a_ && x <= b_) ? -std::log(b_ - a_) : kNegInf;
    case Kind::normal: {
        const double z = (x - a_) / b_;
        return -0.5 * z * z - std::log(b_) - 0.5 * std::log(2.0 * M_PI);
    }
    case Kind::truncated_normal: {
        if (x <= 0.0) return kNegInf;
        const double z = (x - a_) / b_;
        return -0.5 * z * z - std::log(b_) - 0.5 * std::log(2.0 * M_PI) - log_trunc_mass_;
    }
    }
    return kNegInf;
}

double PriorMarginal::inv_cdf(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw invalid_input("PriorMarginal::inv_cdf: u outside (0,1)");
    switch (kind_) {
    case Kind::uniform:
        return a_ + u * (b_ - a_);
    case Kind::normal:
        return a_ + b_ * stats::normal_quantile(u);
    case Kind::truncated_normal: {
        const double f0 = stats::normal_cdf(0.0, a_, b_);
        return a_ + b_ * stats::normal_quantile(f0 + u * (1.0 - f0));
    }
    }
    return 0.0;
}

bool PriorMarginal::in_support(double x) const {
    switch (kind_) {
    case Kind::uniform: return x >= a_ && x <= b_;
    case Kind::normal: return std::isfinite(x);
    case Kind::truncated_normal: return x > 0.0;
    }
    return false;
}

double PriorMarginal::central90_width() const {
    return inv_cdf(0.95) - inv_cdf(0.05);
}

Hyperprior Hyperprior::frb_default() {
    Hyperprior p{{PriorMarginal::uniform(128.8, 2362.8), PriorMarginal::normal(1.45, 0.12),
                  PriorMarginal::uniform(0.0, 10.0), PriorMarginal::uniform(0.0, 10.0),
                  PriorMarginal::truncated_normal(560.0, 560.0),
                  PriorMarginal::truncated_normal(404.0, 404.0)}};
    return p;
}

double Hyperprior::log_pdf(const std::array<double, 6>& theta) const {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) {
        s += marginals[i].log_pdf(theta[i]);
        if (s == kNegInf) return kNegInf;
    }
    return s;
}

bool Hyperprior::in_support(const std::array<double, 6>& theta) const {
    for (int i = 0; i < 6; ++i)
        if (!marginals[i].in_support(theta[i])) return false;
    return true;
}

std::array<double, 6> Hyperprior::sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(
        std::numeric_limits<double>::min(), 1.0);
    std::array<double, 6> theta{};
    for (int i = 0; i < 6; ++i) theta[i] = marginals[i].inv_cdf(u(rng));
    return theta;
}

double log_likelihood(const IntensityModel& model,
                      const std::vector<Point>& latent_positions,
                      const std::vector<double>& noise_log_densities) {
    if (latent_positions.size() != noise_log_densities.size())
        throw invalid_input("log_likelihood: latent/noise size mismatch");
    const std::size_t n = latent_positions.size();
    double s = -model.total_mass() - std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = model.eval(latent_positions[i]);
        if (!(lam > 0.0)) return kNegInf;
        s += std::log(lam) + noise_log_densities[i];
    }
    return s;
}

std::vector<std::array<double, 6>> lhs_starts(const Hyperprior& prior,
                                              std::size_t n_chains, Rng& rng) {
    if (n_chains < 1) throw invalid_input("lhs_starts: n_chains must be >= 1");
    std::uniform_real_distribution<double> u(std::numeric_limits<double>::min(), 1.0);
    std::vector<std::array<double, 6>> starts(n_chains);
    for (int p = 0; p < 6; ++p) {
        std::vector<double> vals(n_chains);
        for (std::size_t j = 0; j < n_chains; ++j)
            vals[j] = prior.marginals[p].inv_cdf((j + u(rng)) / n_chains);
        std::shuffle(vals.begin(), vals.end(), rng);
        for (std::size_t i = 0; i < n_chains; ++i) starts[i][p] = vals[i];
    }
    return starts;
}

namespace {

// Lower Cholesky of a 6x6 covariance, with diagonal jitter added until the
// factorization succeeds.
std::array<double, 36> cholesky6(std::array<double, 36> cov) {
    double scale = 0.0;
    for (int i = 0; i < 6; ++i) scale = std::max(scale, cov[i * 6 + i]);
    double jitter = scale > 0.0 ? scale * 1e-12 : 1e-12;
    for (int attempt = 0; attempt < 40; ++attempt) {
        std::array<double, 36> L{};
        bool ok = true;
        for (int i = 0; i < 6 && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = cov[i * 6 + j] + (i == j ? jitter : 0.0);
                for (int k = 0; k < j; ++k) s -= L[i * 6 + k] * L[j * 6 + k];
                if (i == j) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    L[i * 6 + i] = std::sqrt(s);
                } else {
                    L[i * 6 + j] = s / L[j * 6 + j];
                }
            }
        }
        if (ok) return L;
        jitter *= 10.0;
    }
    throw numerical_error("proposal covariance is not positive definite");
}

struct LatentState {
    Point x;             // (alpha, delta, dm)
    double log_lambda;   // log intensity at x
    double log_noise;    // localization + DM noise log density at x
};

ModelFactory default_factory() {
    return [](const std::array<double, 6>& theta, const Domain& dom) {
        return IntensityModel::frb(FrbHyperparams::from_array(theta), dom);
    };
}

} // namespace

PosteriorChain run_chain(const EventCatalog& catalog, const Hyperprior& prior,
                         const McmcConfig& config) {
    if (catalog.size() == 0) throw invalid_input("run_chain: empty catalog");
    if (config.n_iter <= config.burn_in)
        throw config_error("run_chain: n_iter must exceed burn_in");
    const Domain dom = config.domain.value_or(IntensityModel::default_frb_domain());
    const ModelFactory factory =
        config.model_factory ? config.model_factory : default_factory();
    catalog.validate(dom);
    const std::size_t n = catalog.size();

    Rng rng = make_rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::array<double, 6> theta =
        config.initial_theta ? *config.initial_theta : prior.sample(rng);
    if (!prior.in_support(theta))
        throw config_error("run_chain: initial theta outside the prior support");
    std::optional<IntensityModel> model;
    try {
        model.emplace(factory(theta, dom));
    } catch (const config_error& e) {
        throw config_error(std::string("run_chain: invalid initial theta: ") + e.what());
    }

    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<LatentState> latents(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = catalog.events[i];
        LatentState st;
        st.x = Point{e.alpha, e.delta, e.dm};
        const double lam = model->eval(st.x);
        st.log_lambda = lam > 0.0 ? std::log(lam) : kNegInf;
        st.log_noise = e.loc_log_density(e.alpha, e.delta) +
                       std::log(stats::normal_pdf(0.0, 0.0, e.dm_sigma));
        latents[i] = std::move(st);
    }

    double log_prior = prior.log_pdf(theta);
    double sum_log_lambda = 0.0, sum_log_noise = 0.0;
    for (const auto& st : latents) {
        sum_log_lambda += st.log_lambda;
        sum_log_noise += st.log_noise;
    }

    // initial proposal: diagonal, 1% of each prior's central 90% width
    std::array<double, 36> prop_chol{};
    for (int i = 0; i < 6; ++i)
        prop_chol[i * 6 + i] = 0.01 * prior.marginals[i].central90_width();

    std::vector<std::array<double, 6>> adapt_buffer;
    adapt_buffer.reserve(std::min(config.adapt_at, config.n_iter));

    PosteriorChain chain;
    chain.seed = config.seed;
    chain.burn_in = config.burn_in;
    chain.thin = std::max<std::size_t>(config.thin, 1);
    std::size_t acc_theta = 0, acc_pos = 0, acc_dm = 0;
    std::size_t window_acc = 0;
    const std::size_t window = 200;

    for (std::size_t it = 1; it <= config.n_iter; ++it) {
        // --- block 1: joint Gaussian random-walk on theta
        {
            std::array<double, 6> z{}, proposal = theta;
            for (int i = 0; i < 6; ++i) z[i] = gauss(rng);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j <= i; ++j) proposal[i] += prop_chol[i * 6 + j] * z[j];
            const double lp_prop = prior.log_pdf(proposal);
            bool accept = false;
            if (lp_prop > kNegInf) {
                std::optional<IntensityModel> prop_model;
                try {
                    prop_model.emplace(factory(proposal, dom));
                } catch (const config_error&) {
                } catch (const numerical_error&) {
                }
                if (prop_model) {
                    double sum_prop = 0.0;
                    for (const auto& st : latents) {
                        const double lam = prop_model->eval(st.x);
                        if (!(lam > 0.0)) {
                            sum_prop = kNegInf;
                            break;
                        }
                        sum_prop += std::log(lam);
                    }
                    // Stage-I noise terms are unchanged by theta and cancel
                    const double cur = log_prior - model->total_mass() + sum_log_lambda;
                    const double prop =
                        lp_prop - prop_model->total_mass() + sum_prop;
                    if (prop > kNegInf &&
                        std::log(unif(rng)) < prop - cur) {
                        accept = true;
                        theta = proposal;
                        model = std::move(prop_model);
                        log_prior = lp_prop;
                        sum_log_lambda = sum_prop;
                        for (auto& st : latents) {
                            const double lam = model->eval(st.x);
                            st.log_lambda = std::log(lam);
                        }
                    }
                }
            }
            if (accept) {
                ++acc_theta;
                ++window_acc;
            }
        }

        // --- block 2: independence sampler for (alpha, delta) per event
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = catalog.events[i];
            LatentState& st = latents[i];
            const auto pos = e.loc_sample(rng);
            Point x_prop = st.x;
            x_prop[0] = pos[0];
            x_prop[1] = pos[1];
            x_prop = dom.wrapped(x_prop);
            const double lam = model->eval(x_prop);
            if (!(lam > 0.0)) continue;
            const double log_lam = std::log(lam);
            // the localization density is both the Stage-I term and the
            // proposal, so the MH ratio reduces to the intensity ratio
            if (st.log_lambda == kNegInf ||
                std::log(unif(rng)) < log_lam - st.log_lambda) {
                const double new_loc = e.loc_log_density(x_prop[0], x_prop[1]);
                const double dm_term =
                    std::log(stats::normal_pdf(e.dm - st.x[2], 0.0, e.dm_sigma));
                sum_log_lambda += log_lam - st.log_lambda;
                sum_log_noise += (new_loc + dm_term) - st.log_noise;
                st.x = x_prop;
                st.log_lambda = log_lam;
                st.log_noise = new_loc + dm_term;
                ++acc_pos;
            }
        }

        // --- block 3: Gaussian random-walk on DM per event
        for (std::size_t i = 0; i < n; ++i) {
            const auto& e = catalog.events[i];
            LatentState& st = latents[i];
            const double dm_prop = st.x[2] + e.dm_sigma * gauss(rng);
            Point x_prop = st.x;
            x_prop[2] = dm_prop;
            const double lam = model->eval(x_prop);
            if (!(lam > 0.0)) continue;
            const double log_lam = std::log(lam);
            const double noise_prop =
                std::log(stats::normal_pdf(e.dm - dm_prop, 0.0, e.dm_sigma));
            const double noise_cur =
                std::log(stats::normal_pdf(e.dm - st.x[2], 0.0, e.dm_sigma));
            const double delta = (log_lam + noise_prop) -
                                 (st.log_lambda + noise_cur);
            if (st.log_lambda == kNegInf || std::log(unif(rng)) < delta) {
                const double loc_term = st.log_noise - noise_cur;
                sum_log_lambda += log_lam - st.log_lambda;
                sum_log_noise += noise_prop - noise_cur;
                st.x = x_prop;
                st.log_lambda = log_lam;
                st.log_noise = loc_term + noise_prop;
                ++acc_dm;
            }
        }

        if (it <= config.adapt_at) {
            adapt_buffer.push_back(theta);
            // Staged adaptive Metropolis: periodically re-estimate the proposal
            // covariance from the trailing half of the draws so far (dropping
            // the transient from a dispersed start), with the optimal
            // random-walk scaling 2.38^2/d and a diagonal floor to keep the
            // proposal nonsingular. Frozen after adapt_at.
            if ((it % 250 == 0 || it == config.adapt_at) && adapt_buffer.size() >= 4) {
                const std::size_t half = adapt_buffer.size() / 2;
                const double cnt = static_cast<double>(adapt_buffer.size() - half);
                std::array<double, 36> cov{};
                std::array<double, 6> m{};
                for (std::size_t t = half; t < adapt_buffer.size(); ++t)
                    for (int i = 0; i < 6; ++i) m[i] += adapt_buffer[t][i] / cnt;
                for (std::size_t t = half; t < adapt_buffer.size(); ++t)
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j)
                            cov[i * 6 + j] += (adapt_buffer[t][i] - m[i]) *
                                              (adapt_buffer[t][j] - m[j]) / (cnt - 1.0);
                const double scale = 2.38 * 2.38 / 6.0;
                for (double& v : cov) v *= scale;
                for (int i = 0; i < 6; ++i) {
                    const double w0 = 0.001 * prior.marginals[i].central90_width();
                    cov[i * 6 + i] = std::max(cov[i * 6 + i], w0 * w0);
                }
                prop_chol = cholesky6(cov);
            }
        }

        if (it % window == 0) {
            if (window_acc == 0) chain.degenerate_warning = true;
            window_acc = 0;
        }

        if (it > config.burn_in && (it - config.burn_in) % chain.thin == 0) {
            chain.draws.push_back(theta);
            chain.log_posts.push_back(log_prior - model->total_mass() + sum_log_lambda +
                                      sum_log_noise - log_n_fact);
        }
    }

    chain.acc_theta = static_cast<double>(acc_theta) / config.n_iter;
    chain.acc_pos = static_cast<double>(acc_pos) / (config.n_iter * n);
    chain.acc_dm = static_cast<double>(acc_dm) / (config.n_iter * n);
    // frozen proposal covariance, reported as L L^T
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double s = 0.0;
            for (int k = 0; k < 6; ++k)
                s += prop_chol[i * 6 + k] * prop_chol[j * 6 + k];
            chain.proposal_cov[i * 6 + j] = s;
        }
    return chain;
}

CoverageResult coverage_study(const Hyperprior& prior, const CoverageConfig& config) {
    if (config.n_replicates < 1 || config.n_chains < 1)
        throw invalid_input("coverage_study: counts must be >= 1");
    if (!prior.in_support(config.theta_star))
        throw invalid_input("coverage_study: theta_star outside the prior support");
    const Domain dom =
        config.mcmc.domain.value_or(IntensityModel::default_frb_domain());
    const ModelFactory factory =
        config.mcmc.model_factory ? config.mcmc.model_factory : default_factory();
    const IntensityModel truth = factory(config.theta_star, dom);

    CoverageResult result;
    result.n_replicates = config.n_replicates;
    result.intervals.resize(config.n_replicates);
    std::vector<std::array<bool, 6>> covered(config.n_replicates);

    parallel_for(config.n_replicates, config.workers, [&](std::size_t rep) {
        const std::uint64_t rep_seed = derive_seed(config.seed, rep);
        const NoiseModel noise = NoiseModel::isotropic_gaussian(
            {config.loc_sigma, config.loc_sigma, config.dm_sigma});
        const SyntheticDataset ds = make_dataset(truth, noise, rep_seed);

        EventCatalog cat;
        for (std::size_t i = 0; i < ds.n; ++i) {
            CatalogEvent e;
            e.id = "E" + std::to_string(i);
            e.alpha = ds.noisy_positions[i][0];
            e.delta = ds.noisy_positions[i][1];
            e.dm = ds.noisy_positions[i][2];
            e.dm_sigma = config.dm_sigma;
            e.loc_sigma = config.loc_sigma;
            cat.events.push_back(std::move(e));
        }

        Rng start_rng = make_rng(rep_seed, 0xa11);
        const auto starts = lhs_starts(prior, config.n_chains, start_rng);
        std::vector<std::array<double, 6>> pooled;
        for (std::size_t c = 0; c < config.n_chains; ++c) {
            McmcConfig mc = config.mcmc;
            mc.seed = derive_seed(rep_seed, c + 1);
            mc.initial_theta = starts[c];
            mc.domain = dom;
            mc.model_factory = factory;
            const PosteriorChain chain = run_chain(cat, prior, mc);
            pooled.insert(pooled.end(), chain.draws.begin(), chain.draws.end());
        }

        const double alpha_tail = 0.5 * (1.0 - config.ci_level);
        for (int p = 0; p < 6; ++p) {
            std::vector<double> v(pooled.size());
            for (std::size_t i = 0; i < pooled.size(); ++i) v[i] = pooled[i][p];
            std::sort(v.begin(), v.end());
            const double lo = stats::quantile(v.data(), v.size(), alpha_tail);
            const double hi = stats::quantile(v.data(), v.size(), 1.0 - alpha_tail);
            result.intervals[rep][p] = {lo, hi};
            covered[rep][p] =
                config.theta_star[p] >= lo && config.theta_star[p] <= hi;
        }
    });

    for (std::size_t rep = 0; rep < config.n_replicates; ++rep)
        for (int p = 0; p < 6; ++p)
            if (covered[rep][p]) ++result.covered[p];
    return result;
}

} // namespace nhpp
