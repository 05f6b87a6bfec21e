#include "nhpp/catalog.hpp"
#include "nhpp/errors.hpp"
#include "nhpp/stats.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace nhpp {

namespace fs = std::filesystem;

double CatalogEvent::loc_log_density(double a, double d) const {
    if (loc_map) return loc_map->log_density({a, d});
    if (!(loc_sigma > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(stats::normal_pdf(a, alpha, loc_sigma)) +
           std::log(stats::normal_pdf(d, delta, loc_sigma));
}

std::array<double, 2> CatalogEvent::loc_sample(Rng& rng) const {
    if (loc_map) {
        const auto s = loc_map->sample(rng);
        return {s[0], s[1]};
    }
    std::normal_distribution<double> g(0.0, loc_sigma);
    return {alpha + g(rng), delta + g(rng)};
}

void EventCatalog::validate(const Domain& domain) const {
    std::unordered_set<std::string> seen;
    for (const auto& e : events) {
        if (e.id.empty() || !seen.insert(e.id).second)
            throw data_error("catalog: missing or duplicate event id '" + e.id + "'");
        if (!domain.contains(Point{e.alpha, e.delta, e.dm}))
            throw data_error("catalog: event " + e.id + " outside the domain");
        if (!(e.dm_sigma > 0.0))
            throw data_error("catalog: event " + e.id + " has nonpositive DM sigma");
        if (!e.loc_map && !(e.loc_sigma > 0.0))
            throw data_error("catalog: event " + e.id + " has no usable localization");
    }
}

EventCatalog read_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open catalog file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "#nhpp-catalog v1")
        throw data_error("catalog: missing or unsupported format header in " + path);
    const fs::path base = fs::path(path).parent_path();
    EventCatalog cat;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        CatalogEvent e;
        std::string loc, cluster;
        if (!(row >> e.id >> e.alpha >> e.delta >> e.dm >> e.dm_sigma >> loc >> cluster))
            throw data_error("catalog: malformed row: " + line);
        if (loc.rfind("gauss:", 0) == 0) {
            e.loc_sigma = std::stod(loc.substr(6));
        } else if (loc.rfind("map:", 0) == 0) {
            e.loc_map_ref = loc.substr(4);
            e.loc_map = read_raster_map((base / e.loc_map_ref).string());
            if (e.loc_map->dim() != 2)
                throw data_error("catalog: localization map for " + e.id + " is not 2D");
        } else {
            throw data_error("catalog: unknown localization spec '" + loc + "'");
        }
        if (cluster != "-") e.cluster = cluster;
        cat.events.push_back(std::move(e));
    }
    return cat;
}

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

void write_catalog(const EventCatalog& catalog, const std::string& path) {
    std::ostringstream out;
    out << "#nhpp-catalog v1\n";
    out << "#columns id alpha_deg delta_deg dm dm_sigma loc cluster\n";
    for (const auto& e : catalog.events) {
        out << e.id << ' ' << format_double(e.alpha) << ' ' << format_double(e.delta)
            << ' ' << format_double(e.dm) << ' ' << format_double(e.dm_sigma) << ' ';
        if (e.loc_map)
            out << "map:" << e.loc_map_ref;
        else
            out << "gauss:" << format_double(e.loc_sigma);
        out << ' ' << (e.cluster.empty() ? "-" : e.cluster) << '\n';
    }
    atomic_write(path, out.str());
}

NoiseModel read_raster_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open raster map: " + path);
    std::string line, word;
    if (!std::getline(in, line) || line != "#nhpp-rastermap v1")
        throw data_error("raster map: missing format header in " + path);
    std::size_t d = 0;
    if (!(in >> word >> d) || word != "dim" || d == 0)
        throw data_error("raster map: bad 'dim' line in " + path);
    std::vector<double> lo(d), hi(d);
    if (!(in >> word) || word != "bounds")
        throw data_error("raster map: bad 'bounds' line in " + path);
    for (std::size_t i = 0; i < d; ++i)
        if (!(in >> lo[i] >> hi[i])) throw data_error("raster map: truncated bounds");
    std::vector<std::size_t> shape(d);
    std::size_t ncells = 1;
    if (!(in >> word) || word != "shape")
        throw data_error("raster map: bad 'shape' line in " + path);
    for (std::size_t i = 0; i < d; ++i) {
        if (!(in >> shape[i])) throw data_error("raster map: truncated shape");
        ncells *= shape[i];
    }
    std::vector<double> weights(ncells);
    for (std::size_t i = 0; i < ncells; ++i)
        if (!(in >> weights[i])) throw data_error("raster map: truncated weights");
    try {
        return NoiseModel::gridded_empirical(std::move(lo), std::move(hi),
                                             std::move(shape), std::move(weights));
    } catch (const invalid_input& e) {
        throw data_error(std::string("raster map ") + path + ": " + e.what());
    }
}

void write_raster_map(const NoiseModel& map, const std::string& path) {
    if (map.kind() != NoiseModel::Kind::gridded_empirical)
        throw invalid_input("write_raster_map: not a gridded model");
    std::ostringstream out;
    out << "#nhpp-rastermap v1\n";
    out << "dim " << map.dim() << "\n";
    out << "bounds";
    for (std::size_t i = 0; i < map.dim(); ++i)
        out << ' ' << format_double(map.patch_lower()[i]) << ' '
            << format_double(map.patch_upper()[i]);
    out << "\nshape";
    for (std::size_t n : map.grid_shape()) out << ' ' << n;
    out << "\n";
    const auto& w = map.grid_weights();
    for (std::size_t i = 0; i < w.size(); ++i)
        out << format_double(w[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
    out << "\n";
    atomic_write(path, out.str());
}

void write_chain_csv(const ChainFile& chain, const std::string& path) {
    std::ostringstream out;
    out << "#nhpp-chain v1\n";
    out << "#seed=" << chain.seed << "\n";
    out << "#config_hash=" << chain.config_hash << "\n";
    out << "#catalog_hash=" << chain.catalog_hash << "\n";
    out << "#burn_in=" << chain.burn_in << "\n";
    out << "#thin=" << chain.thin << "\n";
    out << "#acc_theta=" << format_double(chain.acc_theta)
        << " acc_pos=" << format_double(chain.acc_pos)
        << " acc_dm=" << format_double(chain.acc_dm) << "\n";
    out << "n_frbs,b,c,d,dm0,dm_star,log_post\n";
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
        const auto& t = chain.draws[i];
        for (int j = 0; j < 6; ++j) out << format_double(t[j]) << ',';
        out << format_double(chain.log_posts[i]) << '\n';
    }
    atomic_write(path, out.str());
}

ChainFile read_chain_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open chain file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "#nhpp-chain v1")
        throw data_error("chain file: missing format header in " + path);
    ChainFile chain;
    auto parse_meta = [&](const std::string& l) {
        std::istringstream ss(l.substr(1));
        std::string kv;
        while (ss >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "seed") chain.seed = std::stoull(val);
            else if (key == "config_hash") chain.config_hash = std::stoull(val);
            else if (key == "catalog_hash") chain.catalog_hash = std::stoull(val);
            else if (key == "burn_in") chain.burn_in = std::stoull(val);
            else if (key == "thin") chain.thin = std::stoull(val);
            else if (key == "acc_theta") chain.acc_theta = std::stod(val);
            else if (key == "acc_pos") chain.acc_pos = std::stod(val);
            else if (key == "acc_dm") chain.acc_dm = std::stod(val);
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            parse_meta(line);
            continue;
        }
        if (line.rfind("n_frbs", 0) == 0) continue; // column header
        std::istringstream row(line);
        std::array<double, 6> t{};
        double lp = 0.0;
        char comma;
        for (int j = 0; j < 6; ++j)
            if (!(row >> t[j] >> comma)) throw data_error("chain file: malformed row");
        if (!(row >> lp)) throw data_error("chain file: malformed row");
        chain.draws.push_back(t);
        chain.log_posts.push_back(lp);
    }
    return chain;
}

void write_chain_binary(const ChainFile& chain, const std::string& path) {
    std::ostringstream out(std::ios::binary);
    const char magic[8] = {'N', 'H', 'P', 'P', 'C', 'H', 'N', '1'};
    out.write(magic, 8);
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(chain.seed);
    put_u64(chain.config_hash);
    put_u64(chain.catalog_hash);
    put_u64(chain.burn_in);
    put_u64(chain.thin);
    put_f64(chain.acc_theta);
    put_f64(chain.acc_pos);
    put_f64(chain.acc_dm);
    put_u64(chain.draws.size());
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
        for (double v : chain.draws[i]) put_f64(v);
        put_f64(chain.log_posts[i]);
    }
    atomic_write(path, out.str());
}

ChainFile read_chain_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open chain file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "NHPPCHN1")
        throw data_error("chain file: bad binary magic in " + path);
    auto get_u64 = [&] {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    auto get_f64 = [&] {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    ChainFile chain;
    chain.seed = get_u64();
    chain.config_hash = get_u64();
    chain.catalog_hash = get_u64();
    chain.burn_in = get_u64();
    chain.thin = get_u64();
    chain.acc_theta = get_f64();
    chain.acc_pos = get_f64();
    chain.acc_dm = get_f64();
    const std::uint64_t n = get_u64();
    for (std::uint64_t i = 0; i < n; ++i) {
        std::array<double, 6> t{};
        for (double& v : t) v = get_f64();
        chain.draws.push_back(t);
        chain.log_posts.push_back(get_f64());
    }
    if (!in) throw data_error("chain file: truncated binary data in " + path);
    return chain;
}

std::uint64_t hash_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file for hashing: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    return hash_bytes(bytes.data(), bytes.size());
}

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw data_error("cannot write to " + tmp);
        out << contents;
        if (!out) throw data_error("write failed for " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw data_error("rename failed for " + path + ": " + ec.message());
}

} // namespace nhpp
