// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sortmc/records.hpp"

namespace sortmc {

/// Sweep domains and timing discipline for the benchmark harness.
struct SweepConfig {
    std::vector<AlgorithmId> algorithms{AlgorithmId::AdaptiveSingleThread,
                                        AlgorithmId::PartitionMultiThread,
                                        AlgorithmId::BitonicNetwork};
    std::vector<std::size_t> sizes = default_sizes(); // size sweep, strictly increasing
    std::vector<double> ratios = default_ratios();    // ratio sweep, strictly increasing
    std::size_t fixed_n = 1u << 20;                   // array length of the ratio sweep
    unsigned repetitions = 9;
    unsigned warmup = 1;
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::size_t max_bytes = std::size_t{2} << 30; // per-array memory cap

    static std::vector<std::size_t> default_sizes(); // 2^9 .. 2^20
    static std::vector<double> default_ratios();     // 1e-7 .. 1

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// One measured sweep row. skip_reason is non-empty when the row was not
/// measured (e.g. memory cap); such rows never reach the CSV.
struct BenchRecord {
    AlgorithmId algorithm = AlgorithmId::AdaptiveSingleThread;
    std::size_t n = 0;
    std::optional<double> r;
    std::uint64_t median_nanos = 0;
    std::uint64_t min_nanos = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t stages = 0;
    unsigned repetitions = 0;
    std::string skip_reason;
};

/// Fresh uniform random array per repetition (seeds derived from cfg.seed),
/// sort timed in isolation and verified afterwards, median and min reported.
std::vector<BenchRecord> run_size_sweep(const SweepConfig& cfg);

/// Partially sorted arrays of length cfg.fixed_n at each swap ratio.
std::vector<BenchRecord> run_ratio_sweep(const SweepConfig& cfg);

/// Columns: algorithm,n,r,median_nanos,min_nanos,comparisons,stages,repetitions.
/// r stays empty for size-sweep rows. Written atomically (temp + rename).
void write_csv(std::span<const BenchRecord> records, const std::filesystem::path& path);

/// Inverse of write_csv, for replotting existing results.
std::vector<BenchRecord> read_csv(const std::filesystem::path& path);

} // namespace sortmc
