#ifndef NHPP_CATALOG_HPP
#define NHPP_CATALOG_HPP

#include "nhpp/geometry.hpp"
#include "nhpp/noise.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nhpp {

/// One observed event: sky position and DM with their measurement-error
/// description. The localization is either an isotropic Gaussian sigma (deg)
/// or a gridded map over an absolute (alpha, delta) patch.
struct CatalogEvent {
    std::string id;
    double alpha = 0.0;    // deg
    double delta = 0.0;    // deg
    double dm = 0.0;       // pc cm^-3
    double dm_sigma = 0.0; // pc cm^-3
    double loc_sigma = 0.0; // deg; used when no map is attached
    std::optional<NoiseModel> loc_map; // 2D gridded density over (alpha, delta)
    std::string loc_map_ref; // sidecar file path as written in the catalog
    std::string cluster;     // membership label; empty when unlabeled

    /// Log density of the localization p.d.f. at an (alpha, delta) position.
    double loc_log_density(double a, double d) const;
    /// One draw from the localization p.d.f.
    std::array<double, 2> loc_sample(Rng& rng) const;
};

struct EventCatalog {
    std::vector<CatalogEvent> events;

    std::size_t size() const { return events.size(); }
    void validate(const Domain& domain) const; // unique ids, in-domain, sigmas > 0
};

/// Catalog file: '#nhpp-catalog v1' header, then whitespace-delimited rows
///   id alpha delta dm dm_sigma loc cluster
/// with loc either 'gauss:<sigma_deg>' or 'map:<relative path>', and '-' for
/// no cluster label. Map sidecars are loaded relative to the catalog file.
EventCatalog read_catalog(const std::string& path);
void write_catalog(const EventCatalog& catalog, const std::string& path);

/// Raster noise-map sidecar: '#nhpp-rastermap v1', 'dim <d>',
/// 'bounds <lo_1> <hi_1> ... <lo_d> <hi_d>', 'shape <n_1> ... <n_d>', then
/// n_1*...*n_d row-major weights.
NoiseModel read_raster_map(const std::string& path);
void write_raster_map(const NoiseModel& map, const std::string& path);

/// Persisted MCMC chain: hyperparameter draws plus metadata.
struct ChainFile {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t catalog_hash = 0;
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    double acc_theta = 0.0, acc_pos = 0.0, acc_dm = 0.0;
    std::vector<std::array<double, 6>> draws; // (N_FRBs, b, c, d, DM0, DM*)
    std::vector<double> log_posts;
};

/// CSV and compact binary chain formats (chosen by file extension elsewhere).
void write_chain_csv(const ChainFile& chain, const std::string& path);
ChainFile read_chain_csv(const std::string& path);
void write_chain_binary(const ChainFile& chain, const std::string& path);
ChainFile read_chain_binary(const std::string& path);

/// FNV-1a over a file's bytes; manifests embed these for reproducibility.
std::uint64_t hash_file(const std::string& path);
std::uint64_t hash_bytes(const void* data, std::size_t n);

/// Write-to-temp-then-rename helper used by all persisted outputs.
void atomic_write(const std::string& path, const std::string& contents);

} // namespace nhpp

#endif
