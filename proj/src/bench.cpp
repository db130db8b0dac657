// SPDX-License-Identifier: Apache-2.0

#include "sortmc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sortmc/presort.hpp"
#include "sortmc/rng.hpp"
#include "sortmc/sort_core.hpp"

namespace sortmc {
namespace {

SortStats dispatch_sort(AlgorithmId algo, std::span<KeyRecord> arr, unsigned workers) {
    switch (algo) {
        case AlgorithmId::AdaptiveSingleThread: return sort_adaptive(arr);
        case AlgorithmId::PartitionMultiThread: return sort_parallel(arr, workers);
        case AlgorithmId::BitonicNetwork: return sort_bitonic(arr, workers);
    }
    throw std::invalid_argument("unknown algorithm id");
}

// Order-independent content fingerprint; catches lost/duplicated records.
std::uint64_t multiset_checksum(std::span<const KeyRecord> arr) {
    std::uint64_t sum = 0;
    for (const KeyRecord& r : arr)
        sum += rng::mix64(r.key ^ rng::mix64(r.payload));
    return sum;
}

void verify_sorted(std::span<const KeyRecord> arr, std::uint64_t checksum_before,
                   AlgorithmId algo, std::size_t n) {
    for (std::size_t i = 1; i < arr.size(); ++i)
        if (arr[i] < arr[i - 1])
            throw std::runtime_error("post-sort verification failed (order): algorithm=" +
                                     std::string(algorithm_name(algo)) +
                                     " n=" + std::to_string(n));
    if (multiset_checksum(arr) != checksum_before)
        throw std::runtime_error("post-sort verification failed (content): algorithm=" +
                                 std::string(algorithm_name(algo)) +
                                 " n=" + std::to_string(n));
}

std::uint64_t lower_median(std::vector<std::uint64_t> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

// Memory cap estimate: input records plus the bitonic network's padded split
// buffers, the worst consumer in the suite.
std::size_t bytes_needed(std::size_t n) {
    return n * sizeof(KeyRecord) + next_power_of_two(n) * 2 * sizeof(std::uint64_t) * 2;
}

BenchRecord measure_point(const SweepConfig& cfg, AlgorithmId algo, std::size_t n,
                          std::optional<double> r, std::uint64_t point_tag) {
    BenchRecord rec;
    rec.algorithm = algo;
    rec.n = n;
    rec.r = r;
    rec.repetitions = cfg.repetitions;

    if (bytes_needed(n) > cfg.max_bytes) {
        rec.skip_reason = "n=" + std::to_string(n) + " exceeds memory cap of " +
                          std::to_string(cfg.max_bytes) + " bytes";
        return rec;
    }

    std::vector<std::uint64_t> nanos, comps, stages;
    nanos.reserve(cfg.repetitions);
    const unsigned total = cfg.warmup + cfg.repetitions;
    for (unsigned rep = 0; rep < total; ++rep) {
        const std::uint64_t rep_seed = rng::stream_base(cfg.seed, point_tag, rep);
        std::vector<KeyRecord> arr =
            r ? gen_partially_sorted({n, *r, rep_seed}) : gen_uniform_random(n, rep_seed);
        const std::uint64_t checksum = multiset_checksum(arr);

        SortStats stats = dispatch_sort(algo, arr, cfg.workers); // the only timed region
        verify_sorted(arr, checksum, algo, n);

        if (rep >= cfg.warmup) {
            nanos.push_back(stats.wall_nanos);
            comps.push_back(stats.comparisons);
            stages.push_back(stats.stages);
        }
    }

    rec.median_nanos = lower_median(nanos);
    rec.min_nanos = *std::min_element(nanos.begin(), nanos.end());
    rec.comparisons = lower_median(comps); // medians keep the column seed-reproducible
    rec.stages = lower_median(stages);
    return rec;
}

std::uint64_t point_tag(AlgorithmId algo, std::uint64_t a, std::uint64_t b) {
    return (static_cast<std::uint64_t>(algo) << 56) ^ rng::mix64(a ^ rng::mix64(b));
}

} // namespace

std::vector<std::size_t> SweepConfig::default_sizes() {
    std::vector<std::size_t> sizes;
    for (unsigned k = 9; k <= 20; ++k)
        sizes.push_back(std::size_t{1} << k);
    return sizes;
}

std::vector<double> SweepConfig::default_ratios() {
    return {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
}

void SweepConfig::validate() const {
    if (repetitions < 1)
        throw std::invalid_argument("SweepConfig.repetitions must be >= 1");
    if (workers < 1)
        throw std::invalid_argument("SweepConfig.workers must be >= 1");
    if (algorithms.empty())
        throw std::invalid_argument("SweepConfig.algorithms must not be empty");
    if (!std::is_sorted(sizes.begin(), sizes.end(), std::less_equal<>()))
        throw std::invalid_argument("SweepConfig.sizes must be strictly increasing");
    if (!std::is_sorted(ratios.begin(), ratios.end(), std::less_equal<>()))
        throw std::invalid_argument("SweepConfig.ratios must be strictly increasing");
    for (double r : ratios)
        if (r < 0.0 || r > 1.0)
            throw std::invalid_argument("SweepConfig.ratios entries must be in [0, 1]");
}

std::vector<BenchRecord> run_size_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<BenchRecord> records;
    for (AlgorithmId algo : cfg.algorithms)
        for (std::size_t n : cfg.sizes)
            records.push_back(measure_point(cfg, algo, n, std::nullopt, point_tag(algo, n, 0)));
    return records;
}

std::vector<BenchRecord> run_ratio_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<BenchRecord> records;
    for (AlgorithmId algo : cfg.algorithms)
        for (double r : cfg.ratios) {
            const auto rbits = static_cast<std::uint64_t>(r * 1e9);
            records.push_back(
                measure_point(cfg, algo, cfg.fixed_n, r, point_tag(algo, rbits, 1)));
        }
    return records;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_csv(std::span<const BenchRecord> records, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw std::runtime_error("write_csv: cannot open " + tmp.string());
        out << "algorithm,n,r,median_nanos,min_nanos,comparisons,stages,repetitions\n";
        for (const BenchRecord& rec : records) {
            if (!rec.skip_reason.empty())
                continue;
            out << algorithm_name(rec.algorithm) << ',' << rec.n << ','
                << (rec.r ? format_double(*rec.r) : "") << ',' << rec.median_nanos << ','
                << rec.min_nanos << ',' << rec.comparisons << ',' << rec.stages << ','
                << rec.repetitions << '\n';
        }
        if (!out.flush())
            throw std::runtime_error("write_csv: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<BenchRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line != "algorithm,n,r,median_nanos,min_nanos,comparisons,stages,repetitions")
        throw std::runtime_error("read_csv: unexpected header in " + path.string());

    std::vector<BenchRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (line.back() == ',')
            fields.emplace_back();
        if (fields.size() != 8)
            throw std::runtime_error("read_csv: malformed row at line " +
                                     std::to_string(line_no));

        BenchRecord rec;
        bool known = false;
        for (AlgorithmId id : {AlgorithmId::AdaptiveSingleThread,
                               AlgorithmId::PartitionMultiThread, AlgorithmId::BitonicNetwork})
            if (fields[0] == algorithm_name(id)) {
                rec.algorithm = id;
                known = true;
            }
        if (!known)
            throw std::runtime_error("read_csv: unknown algorithm '" + fields[0] +
                                     "' at line " + std::to_string(line_no));
        rec.n = std::stoull(fields[1]);
        if (!fields[2].empty())
            rec.r = std::stod(fields[2]);
        rec.median_nanos = std::stoull(fields[3]);
        rec.min_nanos = std::stoull(fields[4]);
        rec.comparisons = std::stoull(fields[5]);
        rec.stages = std::stoull(fields[6]);
        rec.repetitions = static_cast<unsigned>(std::stoul(fields[7]));
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace sortmc
