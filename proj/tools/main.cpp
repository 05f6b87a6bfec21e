// nhppc: command-line front end for the nhpp library.
//
// Commands: simulate, fit, pc, validate-bound, coverage, diagnose.
// Every command takes a JSON config (--config) plus optional --seed/--workers
// overrides; outputs are written atomically and manifests embed config and
// input hashes so a rerun with the same config is byte-identical.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 convergence failure.
#include <CLI11.hpp>
#include <json.hpp>

#include "nhpp/catalog.hpp"
#include "nhpp/contact.hpp"
#include "nhpp/diagnostics.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/mcmc.hpp"
#include "nhpp/simulate.hpp"
#include "nhpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace nhpp;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitConvergence = 4;

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

json load_config(const GlobalOpts& g, const std::vector<std::string>& allowed_keys) {
    if (g.config_path.empty()) throw config_error("--config is required");
    std::ifstream in(g.config_path);
    if (!in) throw data_error("cannot open config file: " + g.config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw config_error("config root must be a JSON object");
    for (const auto& [key, _] : cfg.items())
        if (std::find(allowed_keys.begin(), allowed_keys.end(), key) ==
            allowed_keys.end())
            throw config_error("unknown config key '" + key + "'");
    return cfg;
}

std::uint64_t config_hash(const json& cfg) {
    const std::string dump = cfg.dump();
    return hash_bytes(dump.data(), dump.size());
}

std::string resolve(const std::string& base_config, const std::string& path) {
    const fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_config).parent_path() / p).string();
}

Domain parse_domain(const json& j) {
    if (!j.contains("lower") || !j.contains("upper"))
        throw config_error("domain needs 'lower' and 'upper' arrays");
    std::vector<double> lo = j.at("lower").get<std::vector<double>>();
    std::vector<double> hi = j.at("upper").get<std::vector<double>>();
    std::vector<double> w(lo.size(), 1.0);
    if (j.contains("weights")) w = j.at("weights").get<std::vector<double>>();
    const bool wrap = j.value("wrap_first", false);
    try {
        return Domain(std::move(lo), std::move(hi), std::move(w), wrap);
    } catch (const invalid_input& e) {
        throw config_error(std::string("bad domain: ") + e.what());
    }
}

GaussianComponent parse_component(const json& j) {
    GaussianComponent g;
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<double>>();
    if (mean.size() != 2 || cov.size() != 4)
        throw config_error("gaussian component needs mean[2] and cov[4]");
    std::copy(mean.begin(), mean.end(), g.mean.begin());
    std::copy(cov.begin(), cov.end(), g.cov.begin());
    return g;
}

IntensityModel parse_model(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "homogeneous") {
        Domain dom = j.contains("domain") ? parse_domain(j.at("domain"))
                                          : Domain::unit_square();
        return IntensityModel::homogeneous(j.at("rate").get<double>(), dom);
    }
    if (kind == "reference-gaussian") return IntensityModel::reference_gaussian();
    if (kind == "reference-mixture") return IntensityModel::reference_mixture();
    if (kind == "gaussian") {
        Domain dom = j.contains("domain") ? parse_domain(j.at("domain"))
                                          : Domain::unit_square();
        return IntensityModel::bivariate_gaussian(
            j.at("total").get<double>(), parse_component(j.at("component")), dom);
    }
    if (kind == "mixture") {
        Domain dom = j.contains("domain") ? parse_domain(j.at("domain"))
                                          : Domain::unit_square();
        return IntensityModel::gaussian_mixture(
            j.at("total").get<double>(), j.at("q").get<double>(),
            parse_component(j.at("first")), parse_component(j.at("second")), dom);
    }
    if (kind == "frb") {
        Domain dom = j.contains("domain") ? parse_domain(j.at("domain"))
                                          : IntensityModel::default_frb_domain();
        const auto th = j.at("theta").get<std::vector<double>>();
        if (th.size() != 6)
            throw config_error("frb model needs theta = [n_frbs, b, c, d, dm0, dm_star]");
        std::array<double, 6> a{};
        std::copy(th.begin(), th.end(), a.begin());
        return IntensityModel::frb(FrbHyperparams::from_array(a), dom);
    }
    throw config_error("unknown model kind '" + kind + "'");
}

NoiseModel parse_noise(const json& j, std::size_t dim) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return NoiseModel::degenerate_zero(dim);
    if (kind == "gaussian") {
        auto sigma = j.at("sigma").get<std::vector<double>>();
        if (sigma.size() == 1) sigma.assign(dim, sigma[0]);
        if (sigma.size() != dim)
            throw config_error("noise sigma length does not match the domain");
        return NoiseModel::isotropic_gaussian(std::move(sigma));
    }
    throw config_error("unknown noise kind '" + kind + "'");
}

void write_json(const std::string& path, const json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

// --- simulate --------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g) {
    const json cfg = load_config(g, {"model", "noise", "seed", "out", "dm_sigma",
                                     "loc_sigma"});
    const std::uint64_t seed = g.seed.value_or(cfg.value("seed", 0ULL));
    const auto model = parse_model(cfg.at("model"));
    const std::size_t dim = model.domain().dim();
    const auto noise = cfg.contains("noise") ? parse_noise(cfg.at("noise"), dim)
                                             : NoiseModel::degenerate_zero(dim);
    const std::string out = cfg.at("out").get<std::string>();

    const auto ds = make_dataset(model, noise, seed);

    // catalogs are 3D (alpha, delta, dm); 2D models emit a plain point table
    const std::string data_path = out + (dim == 3 ? ".catalog" : ".points");
    if (dim == 3) {
        const double dm_sigma = cfg.value("dm_sigma", 1.0);
        const double loc_sigma =
            cfg.value("loc_sigma",
                      noise.kind() == NoiseModel::Kind::isotropic_gaussian
                          ? noise.sigma()[0]
                          : 0.1);
        EventCatalog cat;
        for (std::size_t i = 0; i < ds.n; ++i) {
            CatalogEvent e;
            e.id = "E" + std::to_string(i);
            e.alpha = ds.noisy_positions[i][0];
            e.delta = ds.noisy_positions[i][1];
            e.dm = ds.noisy_positions[i][2];
            e.dm_sigma = dm_sigma;
            e.loc_sigma = loc_sigma;
            cat.events.push_back(std::move(e));
        }
        write_catalog(cat, data_path);
    } else {
        std::ostringstream table;
        table << "#nhpp-points v1\n#columns x y\n";
        char buf[80];
        for (const auto& p : ds.noisy_positions) {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p[0], p[1]);
            table << buf;
        }
        atomic_write(data_path, table.str());
    }

    json manifest;
    manifest["format"] = "nhpp-manifest v1";
    manifest["command"] = "simulate";
    manifest["seed"] = seed;
    manifest["config_hash"] = config_hash(cfg);
    manifest["model"] = model.kind_name();
    manifest["total_mass"] = model.total_mass();
    manifest["n_events"] = ds.n;
    manifest["noiseless"] = noise.kind() == NoiseModel::Kind::degenerate_zero;
    manifest["data_file"] = fs::path(data_path).filename().string();
    manifest["data_hash"] = hash_file(data_path);
    write_json(out + ".manifest.json", manifest);

    std::printf("simulate: %zu events -> %s\n", ds.n, data_path.c_str());
    return 0;
}

// --- fit -------------------------------------------------------------------

json diagnostics_to_json(const DiagnosticsReport& rep) {
    json out;
    out["rhat_threshold"] = rep.rhat_threshold;
    out["ess_threshold"] = rep.ess_threshold;
    out["n_chains"] = rep.n_chains;
    out["chain_length"] = rep.chain_length;
    out["converged"] = rep.converged;
    out["parameters"] = json::array();
    for (const auto& p : rep.parameters) {
        json jp;
        jp["name"] = p.name;
        jp["rhat"] = p.rhat;
        jp["ess_pooled"] = p.ess_pooled;
        jp["ess_per_chain"] = p.ess_per_chain;
        jp["rhat_exceeded"] = p.rhat_exceeded;
        jp["low_ess"] = p.low_ess;
        jp["degenerate"] = p.degenerate;
        out["parameters"].push_back(std::move(jp));
    }
    return out;
}

void print_diagnostics(const DiagnosticsReport& rep) {
    std::printf("%-8s %10s %12s %s\n", "param", "rhat", "ess_pooled", "flags");
    for (const auto& p : rep.parameters) {
        std::string flags;
        if (p.rhat_exceeded) flags += " rhat>thr";
        if (p.low_ess) flags += " low-ess";
        if (p.degenerate) flags += " degenerate";
        std::printf("%-8s %10.5f %12.1f%s\n", p.name.c_str(), p.rhat, p.ess_pooled,
                    flags.c_str());
    }
}

int cmd_fit(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"catalog", "n_chains", "n_iter", "burn_in", "adapt_at", "thin", "seed",
            "out", "rhat_threshold", "ess_threshold", "format", "domain"});
    const std::string catalog_path = resolve(g.config_path, cfg.at("catalog"));
    const EventCatalog cat = read_catalog(catalog_path);
    const std::uint64_t catalog_hash = hash_file(catalog_path);
    const std::uint64_t seed = g.seed.value_or(cfg.value("seed", 0ULL));
    const std::size_t n_chains = cfg.value("n_chains", 4u);
    if (n_chains < 2) throw config_error("fit: n_chains must be >= 2");
    const double rhat_threshold = cfg.value("rhat_threshold", 1.01);
    const double ess_threshold = cfg.value("ess_threshold", 400.0);
    const std::string format = cfg.value("format", "csv");
    if (format != "csv" && format != "binary")
        throw config_error("fit: format must be csv or binary");
    const std::string out = cfg.at("out").get<std::string>();

    McmcConfig mc;
    mc.n_iter = cfg.value("n_iter", 5000u);
    mc.burn_in = cfg.value("burn_in", 1000u);
    mc.adapt_at = cfg.value("adapt_at", 1000u);
    mc.thin = cfg.value("thin", 1u);
    if (cfg.contains("domain")) mc.domain = parse_domain(cfg.at("domain"));
    const Domain dom = mc.domain.value_or(IntensityModel::default_frb_domain());
    cat.validate(dom);

    const auto prior = Hyperprior::frb_default();
    Rng start_rng = make_rng(seed, 0xa11);
    const auto starts = lhs_starts(prior, n_chains, start_rng);

    const std::uint64_t cfg_hash = config_hash(cfg);
    std::vector<std::vector<std::array<double, 6>>> chains;
    std::vector<std::string> chain_files;
    bool degenerate = false;
    for (std::size_t c = 0; c < n_chains; ++c) {
        McmcConfig one = mc;
        one.seed = derive_seed(seed, c + 1);
        one.initial_theta = starts[c];
        const PosteriorChain chain = run_chain(cat, prior, one);
        degenerate = degenerate || chain.degenerate_warning;

        ChainFile file;
        file.seed = one.seed;
        file.config_hash = cfg_hash;
        file.catalog_hash = catalog_hash;
        file.burn_in = chain.burn_in;
        file.thin = chain.thin;
        file.acc_theta = chain.acc_theta;
        file.acc_pos = chain.acc_pos;
        file.acc_dm = chain.acc_dm;
        file.draws = chain.draws;
        file.log_posts = chain.log_posts;
        const std::string path =
            out + ".chain" + std::to_string(c) + (format == "csv" ? ".csv" : ".bin");
        if (format == "csv")
            write_chain_csv(file, path);
        else
            write_chain_binary(file, path);
        chain_files.push_back(path);
        chains.push_back(chain.draws);
        std::printf("fit: chain %zu done, acc(theta)=%.3f acc(pos)=%.3f acc(dm)=%.3f\n",
                    c, chain.acc_theta, chain.acc_pos, chain.acc_dm);
    }

    const auto rep = diagnose_chains(chains, rhat_threshold, ess_threshold);
    print_diagnostics(rep);
    if (degenerate) std::printf("warning: a zero-acceptance window was observed\n");

    json report = diagnostics_to_json(rep);
    report["seed"] = seed;
    report["config_hash"] = cfg_hash;
    report["catalog_hash"] = catalog_hash;
    report["chain_files"] = json::array();
    for (const auto& p : chain_files)
        report["chain_files"].push_back(fs::path(p).filename().string());
    report["degenerate_warning"] = degenerate;
    write_json(out + ".diagnostics.json", report);

    for (const auto& p : rep.parameters)
        if (p.rhat_exceeded) return kExitConvergence;
    return 0;
}

// --- pc --------------------------------------------------------------------

int cmd_pc(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"catalog", "chains", "theta", "count_scale", "n_rep", "n_inner",
            "bound_n_outer", "seed", "out", "previous", "domain"});
    const std::string catalog_path = resolve(g.config_path, cfg.at("catalog"));
    const EventCatalog cat = read_catalog(catalog_path);
    const std::uint64_t seed = g.seed.value_or(cfg.value("seed", 0ULL));
    const Domain dom = cfg.contains("domain") ? parse_domain(cfg.at("domain"))
                                              : IntensityModel::default_frb_domain();
    cat.validate(dom);
    const double count_scale = cfg.value("count_scale", 1.0);
    if (!(count_scale > 0.0)) throw config_error("pc: count_scale must be positive");
    const std::size_t n_rep = cfg.value("n_rep", 1000u);
    const std::size_t n_inner = cfg.value("n_inner", 20000u);
    const std::size_t bound_n_outer = cfg.value("bound_n_outer", 2000u);
    const std::string out = cfg.at("out").get<std::string>();

    // posterior draws, either from stored chains or one fixed theta
    std::vector<std::array<double, 6>> draws;
    if (cfg.contains("chains")) {
        for (const auto& jp : cfg.at("chains")) {
            const std::string path = resolve(g.config_path, jp.get<std::string>());
            const ChainFile file = path.size() > 4 && path.substr(path.size() - 4) == ".bin"
                                       ? read_chain_binary(path)
                                       : read_chain_csv(path);
            draws.insert(draws.end(), file.draws.begin(), file.draws.end());
        }
        if (draws.empty()) throw data_error("pc: chain files contain no draws");
    } else if (cfg.contains("theta")) {
        const auto th = cfg.at("theta").get<std::vector<double>>();
        if (th.size() != 6) throw config_error("pc: theta must have 6 entries");
        std::array<double, 6> a{};
        std::copy(th.begin(), th.end(), a.begin());
        draws.push_back(a);
    } else {
        throw config_error("pc: either 'chains' or 'theta' is required");
    }

    // clusters from the catalog labels
    std::map<std::string, std::vector<const CatalogEvent*>> clusters;
    for (const auto& e : cat.events)
        if (!e.cluster.empty()) clusters[e.cluster].push_back(&e);
    if (clusters.empty()) throw data_error("pc: catalog has no cluster labels");
    for (const auto& [id, members] : clusters)
        if (members.size() < 2)
            throw data_error("pc: cluster '" + id + "' has fewer than 2 members");

    // models are built lazily per distinct posterior draw and cached
    std::map<std::size_t, IntensityModel> cache;
    std::mutex cache_mutex;
    auto model_for = [&](std::size_t idx) -> const IntensityModel& {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(idx);
        if (it == cache.end()) {
            FrbHyperparams p = FrbHyperparams::from_array(draws[idx]);
            p.n_frbs *= count_scale;
            it = cache.emplace(idx, IntensityModel::frb(p, dom)).first;
        }
        return it->second;
    };

    json results = json::array();
    std::vector<ClusterPc> pcs;
    std::ostringstream table;
    table << "#nhpp-pc v1\n#columns cluster k radius pc_median pc_lo pc_hi bound bound_se\n";
    for (const auto& [id, members] : clusters) {
        std::vector<Point> obs;
        for (const auto* e : members) obs.push_back(Point{e->alpha, e->delta, e->dm});
        const Sphere sphere = min_bounding_sphere(obs, dom);
        const unsigned k = static_cast<unsigned>(members.size());

        ModelSampler draw_model = [&](Rng& rng) -> const IntensityModel& {
            std::uniform_int_distribution<std::size_t> pick(0, draws.size() - 1);
            return model_for(pick(rng));
        };
        std::vector<PointSampler> samplers;
        for (const auto* e : members)
            samplers.push_back([e](Rng& rng) {
                const auto pos = e->loc_sample(rng);
                std::normal_distribution<double> gdm(e->dm, e->dm_sigma);
                return Point{pos[0], pos[1], gdm(rng)};
            });
        const auto pc = simulate_pc(draw_model, samplers, dom, n_rep, n_inner,
                                    derive_seed(seed, hash_bytes(id.data(), id.size())),
                                    g.workers.value_or(1));

        // the bound under each event's own localization noise, at the
        // posterior-mean model
        std::array<double, 6> mean_theta{};
        for (const auto& d : draws)
            for (int j = 0; j < 6; ++j) mean_theta[j] += d[j] / draws.size();
        FrbHyperparams mp = FrbHyperparams::from_array(mean_theta);
        mp.n_frbs *= count_scale;
        const auto mean_model = IntensityModel::frb(mp, dom);
        std::vector<NoiseModel> noises;
        for (const auto* e : members) {
            if (e->loc_map)
                noises.push_back(NoiseModel::isotropic_gaussian(
                    {0.5 * (e->loc_map->patch_upper()[0] - e->loc_map->patch_lower()[0]),
                     0.5 * (e->loc_map->patch_upper()[1] - e->loc_map->patch_lower()[1]),
                     e->dm_sigma}));
            else
                noises.push_back(NoiseModel::isotropic_gaussian(
                    {e->loc_sigma, e->loc_sigma, e->dm_sigma}));
        }
        const auto bound = contact_bound(
            mean_model, noises, {sphere.center, sphere.radius, k}, bound_n_outer,
            n_inner, derive_seed(seed + 1, hash_bytes(id.data(), id.size())));

        json row;
        row["cluster"] = id;
        row["k"] = k;
        row["radius"] = sphere.radius;
        row["pc_median"] = pc.median;
        row["pc_lo"] = pc.ci_lo;
        row["pc_hi"] = pc.ci_hi;
        row["bound"] = bound.value;
        row["bound_se"] = bound.std_error;
        results.push_back(row);
        pcs.push_back({id, pc.median, bound.value});
        char buf[240];
        std::snprintf(buf, sizeof(buf), "%s %u %.10g %.10g %.10g %.10g %.10g %.10g\n",
                      id.c_str(), k, sphere.radius, pc.median, pc.ci_lo, pc.ci_hi,
                      bound.value, bound.std_error);
        table << buf;
        std::printf("pc: cluster %s k=%u radius=%.4g median=%.4g bound=%.4g\n",
                    id.c_str(), k, sphere.radius, pc.median, bound.value);
    }

    json report;
    report["format"] = "nhpp-pc v1";
    report["seed"] = seed;
    report["config_hash"] = config_hash(cfg);
    report["n_posterior_draws"] = draws.size();
    report["count_scale"] = count_scale;
    report["clusters"] = results;

    if (cfg.contains("previous")) {
        std::vector<PreviousPc> prev;
        for (const auto& jp : cfg.at("previous"))
            prev.push_back({jp.at("id").get<std::string>(),
                            jp.at("pc").get<double>()});
        const auto comp = compare_with_previous(pcs, prev);
        json jcomp;
        jcomp["median_improvement"] = comp.median_improvement;
        jcomp["n_improved"] = comp.n_improved;
        jcomp["unmatched"] = comp.unmatched;
        jcomp["rows"] = json::array();
        for (const auto& r : comp.rows) {
            json jr;
            jr["id"] = r.id;
            jr["pc"] = r.pc;
            jr["pc_prev"] = r.pc_prev;
            jr["improvement"] = r.improvement;
            jcomp["rows"].push_back(std::move(jr));
        }
        report["comparison"] = std::move(jcomp);
    }

    atomic_write(out + ".pc.txt", table.str());
    write_json(out + ".pc.json", report);
    return 0;
}

// --- validate-bound --------------------------------------------------------

int cmd_validate_bound(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"kinds", "sigma_err", "r", "k", "n_test_points", "n_replicates",
            "intensity_weighted_test_points", "bound_n_grid", "bound_n_inner",
            "seed", "out"});
    const std::uint64_t seed = g.seed.value_or(cfg.value("seed", 0ULL));
    std::vector<std::string> kinds{"gaussian", "mixture"};
    if (cfg.contains("kinds")) kinds = cfg.at("kinds").get<std::vector<std::string>>();
    const std::string out = cfg.at("out").get<std::string>();

    json summary;
    summary["format"] = "nhpp-bound-validation v1";
    summary["seed"] = seed;
    summary["config_hash"] = config_hash(cfg);
    summary["cells"] = json::array();

    for (const auto& kind : kinds) {
        BoundValidationConfig bc;
        bc.intensity_kind = kind;
        if (cfg.contains("sigma_err"))
            bc.sigma_err = cfg.at("sigma_err").get<std::vector<double>>();
        bc.r = cfg.value("r", 1e-2);
        bc.k = cfg.value("k", 2u);
        bc.n_test_points = cfg.value("n_test_points", 500u);
        bc.n_replicates = cfg.value("n_replicates", 5000u);
        bc.intensity_weighted_test_points =
            cfg.value("intensity_weighted_test_points", false);
        bc.bound_n_grid = cfg.value("bound_n_grid", 48u);
        bc.bound_n_inner = cfg.value("bound_n_inner", 2000u);
        bc.seed = derive_seed(seed, hash_bytes(kind.data(), kind.size()));
        bc.workers = g.workers.value_or(1);
        const auto tables = bound_validation_experiment(bc);

        for (const auto& table : tables) {
            char name[120];
            std::snprintf(name, sizeof(name), "%s.%s.sigma%g.csv", out.c_str(),
                          kind.c_str(), table.sigma_err);
            std::ostringstream csv;
            csv << "#nhpp-bound-validation v1\n";
            csv << "x,y,lambda,frequency,bound,bound_se\n";
            std::size_t violations = 0;
            std::vector<double> ratios;
            for (const auto& row : table.rows) {
                char line[200];
                std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                              row.s0[0], row.s0[1], row.lambda_s0, row.frequency,
                              row.bound, row.bound_se);
                csv << line;
                const double se = std::sqrt(row.frequency * (1.0 - row.frequency) /
                                            table.n_replicates);
                if (row.bound < row.frequency - 3.0 * se) ++violations;
                if (row.frequency > 0.0) ratios.push_back(row.bound / row.frequency);
            }
            atomic_write(name, csv.str());

            std::sort(ratios.begin(), ratios.end());
            json cell;
            cell["intensity"] = kind;
            cell["sigma_err"] = table.sigma_err;
            cell["n_replicates"] = table.n_replicates;
            cell["dominance_violations"] = violations;
            cell["file"] = fs::path(name).filename().string();
            if (!ratios.empty()) {
                cell["ratio_q50"] = stats::quantile(ratios.data(), ratios.size(), 0.5);
                cell["ratio_q95"] = stats::quantile(ratios.data(), ratios.size(), 0.95);
                cell["ratio_max"] = ratios.back();
            }
            summary["cells"].push_back(std::move(cell));
            std::printf("validate-bound: %s sigma=%g violations=%zu\n", kind.c_str(),
                        table.sigma_err, violations);
        }
    }
    write_json(out + ".summary.json", summary);
    return 0;
}

// --- coverage --------------------------------------------------------------

int cmd_coverage(const GlobalOpts& g) {
    const json cfg = load_config(
        g, {"theta_star", "n_replicates", "n_chains", "loc_sigma", "dm_sigma",
            "ci_level", "n_iter", "burn_in", "adapt_at", "thin", "seed", "out"});
    CoverageConfig cc;
    if (cfg.contains("theta_star")) {
        const auto th = cfg.at("theta_star").get<std::vector<double>>();
        if (th.size() != 6) throw config_error("coverage: theta_star needs 6 entries");
        std::copy(th.begin(), th.end(), cc.theta_star.begin());
    }
    cc.n_replicates = cfg.value("n_replicates", 10u);
    cc.n_chains = cfg.value("n_chains", 2u);
    cc.loc_sigma = cfg.value("loc_sigma", 0.5);
    cc.dm_sigma = cfg.value("dm_sigma", 2.0);
    cc.ci_level = cfg.value("ci_level", 0.90);
    cc.mcmc.n_iter = cfg.value("n_iter", 5000u);
    cc.mcmc.burn_in = cfg.value("burn_in", 1000u);
    cc.mcmc.adapt_at = cfg.value("adapt_at", 1000u);
    cc.mcmc.thin = cfg.value("thin", 1u);
    cc.seed = g.seed.value_or(cfg.value("seed", 0ULL));
    cc.workers = g.workers.value_or(1);
    const std::string out = cfg.at("out").get<std::string>();

    const auto res = coverage_study(Hyperprior::frb_default(), cc);

    static const char* names[6] = {"N_FRBs", "b", "c", "d", "DM0", "DM*"};
    json report;
    report["format"] = "nhpp-coverage v1";
    report["seed"] = cc.seed;
    report["config_hash"] = config_hash(cfg);
    report["n_replicates"] = res.n_replicates;
    report["ci_level"] = cc.ci_level;
    report["covered"] = json::object();
    std::printf("coverage over %zu replicates:\n", res.n_replicates);
    for (int p = 0; p < 6; ++p) {
        report["covered"][names[p]] = res.covered[p];
        std::printf("  %-8s %u/%zu\n", names[p], res.covered[p], res.n_replicates);
    }
    json intervals = json::array();
    for (const auto& rep : res.intervals) {
        json jr = json::object();
        for (int p = 0; p < 6; ++p) jr[names[p]] = {rep[p][0], rep[p][1]};
        intervals.push_back(std::move(jr));
    }
    report["intervals"] = std::move(intervals);
    write_json(out + ".coverage.json", report);
    return 0;
}

// --- diagnose --------------------------------------------------------------

int cmd_diagnose(const GlobalOpts& g) {
    const json cfg = load_config(g, {"chains", "rhat_threshold", "ess_threshold",
                                     "split", "out"});
    const double rhat_threshold = cfg.value("rhat_threshold", 1.01);
    const double ess_threshold = cfg.value("ess_threshold", 400.0);
    if (!cfg.contains("chains")) throw config_error("diagnose: 'chains' is required");

    std::vector<std::vector<std::array<double, 6>>> chains;
    for (const auto& jp : cfg.at("chains")) {
        const std::string path = resolve(g.config_path, jp.get<std::string>());
        const ChainFile file = path.size() > 4 && path.substr(path.size() - 4) == ".bin"
                                   ? read_chain_binary(path)
                                   : read_chain_csv(path);
        if (file.draws.empty()) throw data_error("diagnose: empty chain " + path);
        chains.push_back(file.draws);
    }
    const std::size_t shortest =
        std::min_element(chains.begin(), chains.end(), [](const auto& a, const auto& b) {
            return a.size() < b.size();
        })->size();
    for (auto& c : chains) c.resize(shortest);

    const auto rep = diagnose_chains(chains, rhat_threshold, ess_threshold);
    print_diagnostics(rep);
    if (cfg.contains("out"))
        write_json(cfg.at("out").get<std::string>() + ".diagnostics.json",
                   diagnostics_to_json(rep));
    for (const auto& p : rep.parameters)
        if (p.rhat_exceeded) return kExitConvergence;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nhpp-contact: noisy nonhomogeneous Poisson process toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::uint64_t seed_opt = 0;
    unsigned workers_opt = 0;
    app.add_option("--config", g.config_path, "JSON configuration file")
        ->each([](const std::string&) {});
    auto* seed_flag = app.add_option("--seed", seed_opt, "override the config seed");
    auto* workers_flag =
        app.add_option("--workers", workers_opt, "worker thread count");

    int (*handler)(const GlobalOpts&) = nullptr;
    const std::pair<const char*, int (*)(const GlobalOpts&)> commands[] = {
        {"simulate", cmd_simulate},     {"fit", cmd_fit},
        {"pc", cmd_pc},                 {"validate-bound", cmd_validate_bound},
        {"coverage", cmd_coverage},     {"diagnose", cmd_diagnose}};
    const char* descriptions[] = {"draw a synthetic dataset",
                                  "run MCMC chains on a catalog",
                                  "probability of coincidence for labeled clusters",
                                  "bound-versus-frequency experiment",
                                  "credible-interval coverage study",
                                  "convergence diagnostics on stored chains"};
    for (std::size_t i = 0; i < 6; ++i) {
        auto fn = commands[i].second;
        auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
        sub->fallthrough(); // allow --config/--seed/--workers after the command
        sub->callback([&handler, fn] { handler = fn; });
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_flag->count() > 0) g.seed = seed_opt;
    if (workers_flag->count() > 0) g.workers = workers_opt;

    try {
        return handler(g);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const invalid_input& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
