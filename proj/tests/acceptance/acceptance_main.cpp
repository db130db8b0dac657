// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, exit 0 only if all pass.
// Thresholds, sizes and seeds are pinned here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sortmc/bench.hpp"
#include "sortmc/mc/transport.hpp"
#include "sortmc/presort.hpp"
#include "sortmc/rng.hpp"
#include "sortmc/sort_core.hpp"

using namespace sortmc;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = SORTMC_DATA_DIR;

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty())
            detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (detail.empty())
            detail = what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Cross-algorithm sorting correctness.

Check criterion_sorting_correctness() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    rng::Stream lens{rng::stream_base(2026, 0xACC1)};
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const std::size_t n = lens.next_below(4097);
        std::vector<KeyRecord> input(n);
        rng::Stream s{rng::stream_base(2026, trial)};
        const std::uint64_t mod = n / 2 + 1; // guaranteed key ties
        for (std::size_t i = 0; i < n; ++i)
            input[i] = KeyRecord{s.next_below(mod), i};

        std::vector<KeyRecord> expected = input;
        std::sort(expected.begin(), expected.end());

        auto a = input;
        sort_adaptive(a);
        auto b = input;
        sort_parallel(b, 4);
        auto d = input;
        sort_bitonic(d, 2);

        if (a != expected)
            c.fail("adaptive output wrong at trial " + std::to_string(trial));
        if (b != expected)
            c.fail("parallel output wrong at trial " + std::to_string(trial));
        if (d != expected)
            c.fail("bitonic output wrong at trial " + std::to_string(trial));
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0)
        c.fail("runtime " + fmt("%.1f", elapsed) + "s exceeds 10s");
    c.note("1000 arrays identical across algorithms, " + fmt("%.1f", elapsed) + "s");
    return c;
}

// --------------------------------------------------------------------------
// 2. Zero-one principle, exhaustive for n in {2,4,8,16}.

Check criterion_zero_one() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t tested = 0;
    for (std::size_t n : {2u, 4u, 8u, 16u}) {
        std::vector<std::vector<BitonicComparator>> stages;
        for (const auto& st : bitonic_stage_schedule(n))
            stages.push_back(stage_comparators(st, n));
        const std::size_t patterns = std::size_t{1} << n;
        for (std::size_t bits = 0; bits < patterns; ++bits) {
            std::vector<std::uint64_t> keys(n);
            for (std::size_t i = 0; i < n; ++i)
                keys[i] = (bits >> i) & 1u;
            for (const auto& stage : stages)
                for (const auto& comp : stage) {
                    const bool wrong = comp.ascending ? keys[comp.lo] > keys[comp.hi]
                                                      : keys[comp.lo] < keys[comp.hi];
                    if (wrong)
                        std::swap(keys[comp.lo], keys[comp.hi]);
                }
            if (!std::is_sorted(keys.begin(), keys.end())) {
                c.fail("unsorted at n=" + std::to_string(n) + " bits=" + std::to_string(bits));
                return c;
            }
            ++tested;
        }
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 5.0)
        c.fail("runtime " + fmt("%.1f", elapsed) + "s exceeds 5s");
    c.note(std::to_string(tested) + " binary inputs sorted, " + fmt("%.1f", elapsed) + "s");
    return c;
}

// --------------------------------------------------------------------------
// 3 + 4 share one ratio sweep: n = 2^20, default ratios, 9 repetitions.

struct RatioSweepData {
    std::map<double, BenchRecord> adaptive;
    std::map<double, BenchRecord> bitonic;
};

RatioSweepData run_acceptance_ratio_sweep() {
    SweepConfig cfg;
    cfg.algorithms = {AlgorithmId::AdaptiveSingleThread, AlgorithmId::BitonicNetwork};
    cfg.fixed_n = std::size_t{1} << 20;
    cfg.repetitions = 9;
    cfg.warmup = 1;
    cfg.workers = 1;
    cfg.seed = 20260810;

    RatioSweepData data;
    for (const BenchRecord& rec : run_ratio_sweep(cfg)) {
        auto& side = rec.algorithm == AlgorithmId::AdaptiveSingleThread ? data.adaptive
                                                                        : data.bitonic;
        side[*rec.r] = rec;
    }
    return data;
}

Check criterion_obliviousness(const RatioSweepData& sweep) {
    Check c;
    const BenchRecord& first = sweep.bitonic.begin()->second;
    std::uint64_t wall_min = UINT64_MAX, wall_max = 0;
    for (const auto& [r, rec] : sweep.bitonic) {
        if (rec.comparisons != first.comparisons)
            c.fail("comparator count varies at r=" + fmt("%g", r));
        if (rec.stages != first.stages)
            c.fail("stage count varies at r=" + fmt("%g", r));
        wall_min = std::min(wall_min, rec.median_nanos);
        wall_max = std::max(wall_max, rec.median_nanos);
    }
    const double spread = static_cast<double>(wall_max) / static_cast<double>(wall_min);
    if (!(spread < 1.5))
        c.fail("wall-time spread " + fmt("%.3f", spread) + " >= 1.5");
    c.note("comparators " + std::to_string(first.comparisons) + " exactly constant, wall spread " +
           fmt("%.3f", spread));
    return c;
}

Check criterion_crossover(const RatioSweepData& sweep) {
    Check c;
    for (double r : {1e-7, 1e-6, 1e-5}) {
        const BenchRecord& a = sweep.adaptive.at(r);
        const BenchRecord& b = sweep.bitonic.at(r);
        if (!(a.median_nanos < b.median_nanos))
            c.fail("adaptive not strictly faster than bitonic at r=" + fmt("%g", r));
    }
    const double slow = static_cast<double>(sweep.adaptive.at(1.0).median_nanos);
    const double fast = static_cast<double>(sweep.adaptive.at(1e-7).median_nanos);
    const double ratio = slow / fast;
    if (!(ratio >= 3.0))
        c.fail("adaptive r=1 vs r=1e-7 ratio " + fmt("%.2f", ratio) + " < 3");
    c.note("adaptive < bitonic for every r <= 1e-5; adaptive disorder slowdown " +
           fmt("%.1f", ratio) + "x");
    return c;
}

// --------------------------------------------------------------------------
// 5. Log-log linearity over n in [2^14, 2^20].

Check criterion_loglog_linearity() {
    Check c;
    SweepConfig cfg;
    cfg.sizes.clear();
    for (unsigned k = 14; k <= 20; ++k)
        cfg.sizes.push_back(std::size_t{1} << k);
    cfg.repetitions = 5;
    cfg.warmup = 1;
    cfg.workers = 1;
    cfg.seed = 424242;

    const auto records = run_size_sweep(cfg);
    for (AlgorithmId algo : cfg.algorithms) {
        std::vector<double> xs, ys;
        for (const BenchRecord& rec : records)
            if (rec.algorithm == algo) {
                xs.push_back(std::log(static_cast<double>(rec.n)));
                ys.push_back(std::log(static_cast<double>(rec.median_nanos)));
            }
        const std::size_t m = xs.size();
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < m; ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(m);
        my /= static_cast<double>(m);
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
            syy += (ys[i] - my) * (ys[i] - my);
        }
        const double r2 = sxy * sxy / (sxx * syy);
        if (!(r2 > 0.98))
            c.fail(std::string(algorithm_name(algo)) + " R^2 " + fmt("%.4f", r2) + " <= 0.98");
        else
            c.detail += std::string(c.detail.empty() ? "" : ", ") +
                        std::string(algorithm_name(algo)) + " R^2=" + fmt("%.4f", r2);
    }
    return c;
}

// --------------------------------------------------------------------------
// 6. Merge-count inversion oracle vs brute force, exact equality.

Check criterion_inversion_oracle() {
    Check c;
    rng::Stream lens{rng::stream_base(77, 0x0E7)};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = lens.next_below(2049);
        std::vector<KeyRecord> arr(n);
        rng::Stream s{rng::stream_base(77, trial)};
        for (std::size_t i = 0; i < n; ++i)
            arr[i] = KeyRecord{s.next_below(n / 3 + 2), i};

        std::uint64_t brute = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (arr[i].key > arr[j].key)
                    ++brute;

        if (presort_report(arr).inversions != brute) {
            c.fail("mismatch at trial " + std::to_string(trial) + " (n=" + std::to_string(n) +
                   ")");
            return c;
        }
    }
    c.note("200 arrays, merge count == brute force");
    return c;
}

// --------------------------------------------------------------------------
// 7. Transport physics oracle: infinite-medium k within 3 sigma.

mc::MaterialMG one_group_material(double sigma_t, double sigma_s, double sigma_f,
                                  double nu_sigma_f) {
    mc::MaterialMG mat;
    mat.groups = 1;
    mat.sigma_t = {sigma_t};
    mat.sigma_s = {sigma_s};
    mat.sigma_f = {sigma_f};
    mat.nu_sigma_f = {nu_sigma_f};
    mat.chi = {1.0};
    return mat;
}

Check criterion_transport_oracle() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();

    const std::vector<mc::MaterialMG> sets{
        one_group_material(1.0, 0.60, 0.20, 0.50), // k = 1.25
        one_group_material(1.0, 0.50, 0.20, 0.60), // k = 1.20
        one_group_material(2.0, 1.00, 0.40, 1.10), // k = 1.10
        one_group_material(1.0, 0.70, 0.10, 0.24), // k = 0.80
        one_group_material(1.5, 0.90, 0.30, 0.66), // k = 1.10
    };

    mc::CycleConfig cfg;
    cfg.particles_per_cycle = 10000;
    cfg.inactive_cycles = 20;
    cfg.total_cycles = 100;

    const mc::Geometry geom = mc::Geometry::infinite_medium();
    double worst_z = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        cfg.seed = 9000 + i;
        const double k_true = mc::analytic_kinf_oracle(sets[i]).k;
        const auto run = mc::run_eigenvalue(geom, std::vector<mc::MaterialMG>{sets[i]}, cfg,
                                            mc::SortStrategy{}, 1, false);
        const double z =
            (run.tallies.keff_mean - k_true) / std::max(run.tallies.keff_std, 1e-12);
        worst_z = std::max(worst_z, std::fabs(z));
        if (!(std::fabs(z) < 3.0))
            c.fail("one-group set " + std::to_string(i) + ": z=" + fmt("%.2f", z) +
                   " (k_true=" + fmt("%.4f", k_true) + ")");
    }

    mc::MaterialMG two_group;
    two_group.groups = 2;
    two_group.sigma_t = {1.0, 2.0};
    two_group.sigma_s = {0.5, 0.3, 0.0, 1.2};
    two_group.sigma_f = {0.05, 0.4};
    two_group.nu_sigma_f = {0.12, 1.0};
    two_group.chi = {1.0, 0.0};
    cfg.seed = 9100;
    const double k2_true = mc::analytic_kinf_oracle(two_group).k;
    const auto run2 = mc::run_eigenvalue(geom, std::vector<mc::MaterialMG>{two_group}, cfg,
                                         mc::SortStrategy{}, 1, false);
    const double z2 =
        (run2.tallies.keff_mean - k2_true) / std::max(run2.tallies.keff_std, 1e-12);
    worst_z = std::max(worst_z, std::fabs(z2));
    if (!(std::fabs(z2) < 3.0))
        c.fail("two-group set: z=" + fmt("%.2f", z2));

    const double elapsed = seconds_since(t0);
    if (elapsed >= 120.0)
        c.fail("runtime " + fmt("%.1f", elapsed) + "s exceeds 120s");
    c.note("6 infinite-medium runs within 3 sigma (worst |z|=" + fmt("%.2f", worst_z) + "), " +
           fmt("%.1f", elapsed) + "s");
    return c;
}

// --------------------------------------------------------------------------
// 8 + 9 share the reflected two-region pebble built from the bundled files.

std::vector<mc::MaterialMG> pebble_materials() {
    const auto defs = mc::load_materials(kDataDir / "htr10_materials.txt");
    const auto lib = mc::load_micro_library(kDataDir / "test_2g.lib");
    std::vector<mc::MaterialMG> mats;
    for (const std::string& name : {"Fuel kernel", "Pebble Carbon matrix"})
        for (const auto& [n, densities] : defs)
            if (n == name)
                mats.push_back(mc::macro_xs_build(densities, lib));
    return mats;
}

Check criterion_order_invariance() {
    Check c;
    const auto mats = pebble_materials();
    if (mats.size() != 2) {
        c.fail("pebble materials not found in bundled data");
        return c;
    }
    const auto geom =
        mc::Geometry::concentric_spheres({2.5, 3.0}, mc::BoundaryCondition::Reflective);

    mc::CycleConfig cfg;
    cfg.particles_per_cycle = 4096;
    cfg.inactive_cycles = 5;
    cfg.total_cycles = 15;
    cfg.seed = 77;

    const auto baseline = mc::run_eigenvalue(geom, mats, cfg, mc::SortStrategy{}, 1, false);
    int runs = 0;
    for (mc::SortMode mode :
         {mc::SortMode::None, mc::SortMode::AdaptiveEachGeneration,
          mc::SortMode::BitonicEachGeneration, mc::SortMode::AdaptiveEveryKEvents,
          mc::SortMode::BitonicEveryKEvents}) {
        for (unsigned workers : {1u, 4u, 8u}) {
            mc::SortStrategy strategy;
            strategy.mode = mode;
            strategy.k_events = 3;
            const auto run = mc::run_eigenvalue(geom, mats, cfg, strategy, workers, false);
            ++runs;
            if (run.tallies.keff_cycle != baseline.tallies.keff_cycle)
                c.fail("keff_cycle differs (mode " + std::to_string(static_cast<int>(mode)) +
                       ", workers " + std::to_string(workers) + ")");
            if (run.tallies.flux != baseline.tallies.flux)
                c.fail("flux differs (mode " + std::to_string(static_cast<int>(mode)) +
                       ", workers " + std::to_string(workers) + ")");
        }
    }
    c.note(std::to_string(runs) + " strategy/worker runs bitwise identical, k = " +
           mc::format_keff(baseline.tallies.keff_mean, baseline.tallies.keff_std));
    return c;
}

Check criterion_partial_sortedness() {
    Check c;
    const auto mats = pebble_materials();
    const auto geom =
        mc::Geometry::concentric_spheres({2.5, 3.0}, mc::BoundaryCondition::Reflective);

    mc::CycleConfig cfg;
    cfg.particles_per_cycle = 8192;
    cfg.inactive_cycles = 5;
    cfg.total_cycles = 25;
    cfg.seed = 303;

    mc::SortStrategy strategy;
    strategy.mode = mc::SortMode::AdaptiveEachGeneration;
    strategy.key_scheme = mc::KeyScheme::CellThenGroup;

    const auto run = mc::run_eigenvalue(geom, mats, cfg, strategy, 1, true);
    if (run.trace.size() != cfg.total_cycles) {
        c.fail("expected one trace row per generation, got " +
               std::to_string(run.trace.size()));
        return c;
    }

    std::vector<double> inversions;
    double worst_cost_share = 0.0;
    for (const mc::TraceRow& row : run.trace) {
        inversions.push_back(row.inversion_fraction);
        const double share = static_cast<double>(row.sort_comparisons) /
                             static_cast<double>(row.bitonic_comparator_equiv);
        worst_cost_share = std::max(worst_cost_share, share);
        if (!(share < 0.70))
            c.fail("cycle " + std::to_string(row.cycle) + ": adaptive comparisons are " +
                   fmt("%.0f", share * 100.0) + "% of the bitonic comparator count");
    }
    std::sort(inversions.begin(), inversions.end());
    const double median = inversions[inversions.size() / 2];
    if (!(median < 0.25))
        c.fail("median generation-boundary inversion_fraction " + fmt("%.3f", median) +
               " >= 0.25");
    c.note("median inversion_fraction " + fmt("%.3f", median) +
           ", adaptive/bitonic cost share worst " + fmt("%.1f", worst_cost_share * 100.0) +
           "%");
    return c;
}

// --------------------------------------------------------------------------
// 10. Material ingestion fidelity.

std::string canonical_sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5E", v);
    std::string s = buf; // e.g. 4.06384E-07
    const auto e = s.find('E');
    std::string mant = s.substr(0, e);
    std::string exp = s.substr(e + 1);
    const bool neg = exp[0] == '-';
    std::size_t i = 1;
    while (i + 1 < exp.size() && exp[i] == '0')
        ++i;
    return mant + "E" + (neg ? "-" : "") + exp.substr(i);
}

Check criterion_material_ingestion() {
    Check c;
    using Table = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>;
    const Table expected = {
        {"Pebble Carbon matrix",
         {{"B-10", "2.49298E-8"},
          {"B-11", "1.00345E-7"},
          {"C-12", "8.57768E-2"},
          {"C-13", "9.60880E-4"}}},
        {"Fuel kernel",
         {{"B-10", "4.06384E-7"},
          {"B-11", "1.63575E-6"},
          {"O-16", "4.64720E-2"},
          {"U-235", "3.99198E-3"},
          {"U-238", "1.92441E-2"}}},
        {"Buffer",
         {{"B-10", "1.58513E-8"},
          {"B-11", "6.38035E-8"},
          {"C-12", "5.45401E-2"},
          {"C-13", "6.10964E-4"}}},
        {"Pyrolytic Carbon (PyC)",
         {{"B-10", "2.73795E-8"},
          {"B-11", "1.10206E-7"},
          {"C-12", "9.42057E-2"},
          {"C-13", "1.05530E-3"}}},
        {"Silicon Carbide (SiC)",
         {{"C-12", "4.72306E-2"},
          {"C-13", "5.29082E-4"},
          {"Si-28", "4.40486E-2"},
          {"Si-29", "2.23666E-3"},
          {"Si-30", "1.47442E-3"}}},
    };

    const auto defs = mc::load_materials(kDataDir / "htr10_materials.txt");
    if (defs.size() != expected.size()) {
        c.fail("expected " + std::to_string(expected.size()) + " materials, loaded " +
               std::to_string(defs.size()));
        return c;
    }
    int checked = 0;
    for (std::size_t m = 0; m < expected.size(); ++m) {
        const auto& [name, nuclides] = expected[m];
        if (defs[m].first != name) {
            c.fail("material order/name mismatch: " + defs[m].first + " vs " + name);
            continue;
        }
        if (defs[m].second.size() != nuclides.size()) {
            c.fail(name + ": nuclide count mismatch");
            continue;
        }
        for (std::size_t i = 0; i < nuclides.size(); ++i) {
            const auto& loaded = defs[m].second[i];
            const auto& [nuc, density_str] = nuclides[i];
            if (loaded.nuclide != nuc)
                c.fail(name + ": nuclide " + loaded.nuclide + " vs " + nuc);
            if (loaded.density != std::strtod(density_str.c_str(), nullptr))
                c.fail(name + "/" + nuc + ": value differs from " + density_str);
            if (canonical_sci(loaded.density) != density_str)
                c.fail(name + "/" + nuc + ": string round-trip " +
                       canonical_sci(loaded.density) + " != " + density_str);
            ++checked;
        }
    }

    // One-group, sigma_t = 1 barn for every nuclide: the macroscopic total is
    // the density column sum.
    mc::MicroLibrary lib;
    lib.groups = 1;
    for (const char* n : {"B-10", "B-11", "O-16", "U-235", "U-238"})
        lib.nuclides[n] = mc::NuclideMicro{{1.0}, {0.0}, {0.0}, {0.0}, {0.0}};
    const auto& fuel = defs[1].second;
    const mc::MaterialMG mat = mc::macro_xs_build(fuel, lib);
    const double delta = std::fabs(mat.sigma_t[0] - 6.97102e-2);
    if (!(delta <= 1e-7))
        c.fail("fuel-kernel unit-sigma sum " + fmt("%.6E", mat.sigma_t[0]) +
               " off by more than 1e-7");

    c.note(std::to_string(checked) + " densities round-trip exactly; fuel sum " +
           canonical_sci(mat.sigma_t[0]));
    return c;
}

} // namespace

int main() {
    struct Row {
        int id;
        std::string name;
        Check result;
    };
    std::vector<Row> rows;

    const auto started = std::chrono::steady_clock::now();

    rows.push_back({1, "sorting correctness", criterion_sorting_correctness()});
    rows.push_back({2, "zero-one principle", criterion_zero_one()});
    {
        const RatioSweepData sweep = run_acceptance_ratio_sweep();
        rows.push_back({3, "bitonic obliviousness", criterion_obliviousness(sweep)});
        rows.push_back({4, "adaptive/bitonic crossover", criterion_crossover(sweep)});
    }
    rows.push_back({5, "log-log linearity", criterion_loglog_linearity()});
    rows.push_back({6, "inversion oracle", criterion_inversion_oracle()});
    rows.push_back({7, "transport physics oracle", criterion_transport_oracle()});
    rows.push_back({8, "order invariance", criterion_order_invariance()});
    rows.push_back({9, "partial-sortedness mechanism", criterion_partial_sortedness()});
    rows.push_back({10, "material ingestion", criterion_material_ingestion()});

    bool all_ok = true;
    for (const Row& row : rows) {
        all_ok = all_ok && row.result.ok;
        std::printf("[%s] criterion %2d: %s%s%s\n", row.result.ok ? "PASS" : "FAIL", row.id,
                    row.name.c_str(), row.result.detail.empty() ? "" : " -- ",
                    row.result.detail.c_str());
    }
    std::printf("%d/%zu criteria passed in %.1fs\n",
                static_cast<int>(std::count_if(rows.begin(), rows.end(),
                                               [](const Row& r) { return r.result.ok; })),
                rows.size(), seconds_since(started));
    return all_ok ? 0 : 1;
}
