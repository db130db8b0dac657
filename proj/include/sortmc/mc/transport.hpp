// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sortmc/mc/geometry.hpp"
#include "sortmc/mc/material.hpp"
#include "sortmc/presort.hpp"
#include "sortmc/records.hpp"
#include "sortmc/rng.hpp"
#include "sortmc/worker_pool.hpp"

namespace sortmc::mc {

struct Particle {
    std::uint64_t id = 0; // unique within a cycle
    Vec3 position;
    Vec3 direction; // unit
    int group = 0;
    double weight = 1.0;
    int cell = 0;
    bool alive = true;
    std::uint64_t event_counter = 0; // position in the particle's RNG stream
};

enum class SortMode {
    None,
    AdaptiveEachGeneration,
    BitonicEachGeneration,
    AdaptiveEveryKEvents,
    BitonicEveryKEvents,
};

enum class KeyScheme { Group, Cell, CellThenGroup };

struct SortStrategy {
    SortMode mode = SortMode::None;
    std::uint64_t k_events = 1;
    KeyScheme key_scheme = KeyScheme::CellThenGroup;

    void validate() const; // k_events >= 1 for the EveryK modes
};

struct CycleConfig {
    std::size_t particles_per_cycle = 10000;
    unsigned inactive_cycles = 20;
    unsigned total_cycles = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TallySet {
    int cells = 0;
    int groups = 0;
    std::vector<double> flux;          // [cell*groups + g] track-length, per source particle
    std::vector<double> flux_rel_err;  // relative std of the mean over active cycles
    std::vector<double> fission_power; // [cell], normalized to sum 1
    std::vector<double> keff_cycle;    // collision estimator, every cycle
    double keff_mean = 0.0;            // over active cycles
    double keff_std = 0.0;             // std of the mean
};

/// One row per sort_bank invocation. Only the first four fields reach
/// presort_trace.csv; the rest support analysis and tests.
struct TraceRow {
    unsigned cycle = 0;
    unsigned event_pass = 0;
    double inversion_fraction = 0.0;
    std::uint64_t sorted_runs = 0;
    std::size_t bank_size = 0;
    std::uint64_t sort_comparisons = 0;          // 0 in mode None
    std::uint64_t bitonic_comparator_equiv = 0;  // network cost for this bank size
};

struct RunResult {
    TallySet tallies;
    std::vector<TraceRow> trace;
    std::uint64_t lost_particles = 0;
    std::uint64_t total_histories = 0;
};

/// Banked fission site awaiting resampling into the next cycle's source.
struct FissionSite {
    Vec3 position;
    int cell = 0;
    double weight = 1.0;
    std::uint64_t parent_id = 0;  // canonical ordering key: (parent_id,
    std::uint64_t parent_seq = 0; // parent_seq) is strategy- and worker-independent
};

/// Mutable state threaded through the event passes of one cycle.
struct CycleContext {
    std::uint64_t seed = 0;
    unsigned cycle = 0;
    double k_run = 1.0; // previous cycle's collision estimate

    // One entry per particle flight; reduced in (id, seq) order at cycle end.
    struct TallyEvent {
        std::uint64_t id = 0;
        std::uint64_t seq = 0;
        std::int32_t cell = 0;
        std::int32_t group = 0;
        double track = 0.0;     // weight * flight distance
        double k_contrib = 0.0; // weight * nu_sigma_f / sigma_t at a collision
    };
    std::vector<TallyEvent> events;
    std::vector<FissionSite> sites;
    std::uint64_t lost = 0;
};

/// Weight ledger of one pass; banked counts the parent weight entering the
/// fission channel.
struct PassBalance {
    double pre_weight = 0.0;
    double surviving = 0.0;
    double absorbed = 0.0;
    double banked = 0.0;
    double leaked = 0.0;
};

/// One event for every live particle, in three staged passes over the bank:
/// distance sampling, advance (collision site / surface with reflection or
/// vacuum kill), collision processing (scatter, fission banking, capture).
/// Dead particles are compacted out. Per-particle counter-based RNG makes
/// the physics independent of bank order and worker partitioning.
PassBalance transport_event_iteration(std::vector<Particle>& bank, const Geometry& geom,
                                      std::span<const MaterialMG> materials,
                                      CycleContext& ctx, WorkerPool* pool = nullptr);

struct SortBankResult {
    SortStats stats;
    PresortReport report; // measured before any permutation
};

/// Builds each particle's key per the strategy's key scheme, measures the
/// bank's presortedness, then applies the strategy's algorithm. Mode None
/// measures but does not permute.
SortBankResult sort_bank(std::vector<Particle>& bank, const SortStrategy& strategy,
                         int groups, unsigned workers = 1);

/// Systematic (comb) resampling of exactly `target` sites, weights reset
/// to 1. Throws std::runtime_error on an empty site list and
/// std::invalid_argument on target == 0.
std::vector<FissionSite> sample_fission_bank(std::span<const FissionSite> sites,
                                             std::size_t target, rng::Stream& stream);

/// Power iteration over `cfg.total_cycles` generations. For fixed inputs the
/// keff_cycle vector and all tallies are bitwise identical across sorting
/// strategies and worker counts.
RunResult run_eigenvalue(const Geometry& geom, std::span<const MaterialMG> materials,
                         const CycleConfig& cfg, const SortStrategy& strategy,
                         unsigned workers = 1, bool trace_enabled = true);

// Run outputs.
void write_keff_csv(const TallySet& tallies, unsigned inactive_cycles,
                    const std::filesystem::path& path);
void write_flux_csv(const TallySet& tallies, const std::filesystem::path& path);
void write_presort_trace_csv(std::span<const TraceRow> trace,
                             const std::filesystem::path& path);

/// Comparator count of the bitonic network for a bank of n records.
std::uint64_t bitonic_comparator_count(std::size_t n);

} // namespace sortmc::mc
