// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "sortmc/mc/transport.hpp"

using namespace sortmc;
using namespace sortmc::mc;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = SORTMC_DATA_DIR;

MaterialMG one_group(double sigma_t, double sigma_s, double sigma_f, double nu_sigma_f) {
    MaterialMG mat;
    mat.groups = 1;
    mat.sigma_t = {sigma_t};
    mat.sigma_s = {sigma_s};
    mat.sigma_f = {sigma_f};
    mat.nu_sigma_f = {nu_sigma_f};
    mat.chi = {nu_sigma_f > 0.0 ? 1.0 : 0.0};
    return mat;
}

std::vector<Particle> point_bank(std::size_t n, int group = 0) {
    std::vector<Particle> bank(n);
    for (std::size_t i = 0; i < n; ++i) {
        bank[i].id = i;
        bank[i].position = {0.0, 0.0, 0.0};
        bank[i].direction = {0.0, 0.0, 1.0};
        bank[i].group = group;
        bank[i].cell = 0;
    }
    return bank;
}

std::vector<MaterialMG> pebble_materials() {
    auto defs = load_materials(kDataDir / "htr10_materials.txt");
    auto lib = load_micro_library(kDataDir / "test_2g.lib");
    std::vector<MaterialMG> mats;
    for (const std::string& name : {"Fuel kernel", "Pebble Carbon matrix"})
        for (const auto& [n, densities] : defs)
            if (n == name)
                mats.push_back(macro_xs_build(densities, lib));
    REQUIRE(mats.size() == 2);
    return mats;
}

} // namespace

TEST_CASE("sampled free path matches the exponential mean") {
    const std::size_t n = 100000;
    auto bank = point_bank(n);
    const std::vector<MaterialMG> mats{one_group(2.0, 0.0, 0.0, 0.0)}; // pure capture
    Geometry geom = Geometry::infinite_medium();

    CycleContext ctx;
    ctx.seed = 4;
    transport_event_iteration(bank, geom, mats, ctx);

    CHECK(bank.empty()); // pure capture: one collision kills everyone
    REQUIRE(ctx.events.size() == n);
    double total = 0.0;
    for (const auto& ev : ctx.events)
        total += ev.track;
    const double mean = total / static_cast<double>(n);
    const double sigma = 0.5 / std::sqrt(static_cast<double>(n)); // exp std = mean
    CHECK(std::fabs(mean - 0.5) < 3.0 * sigma);
}

TEST_CASE("reflection at the outer sphere") {
    Geometry geom = Geometry::concentric_spheres({3.0}, BoundaryCondition::Reflective);
    // near-void so the boundary is always hit first
    const std::vector<MaterialMG> mats{one_group(1e-12, 0.0, 0.0, 0.0)};

    auto bank = point_bank(64);
    for (auto& p : bank)
        p.position = {0.1 * (p.id % 7), 0.0, 2.9};
    CycleContext ctx;
    ctx.seed = 5;
    transport_event_iteration(bank, geom, mats, ctx);

    REQUIRE(bank.size() == 64);
    for (const auto& p : bank) {
        const double r = norm(p.position);
        CHECK(r <= 3.0 * (1.0 + 1e-12));
        CHECK(std::fabs(norm(p.direction) - 1.0) < 1e-9);
        const Vec3 n{p.position.x / r, p.position.y / r, p.position.z / r};
        CHECK(dot(p.direction, n) <= 0.0); // heading inward after reflection
    }
}

TEST_CASE("vacuum boundary leaks") {
    Geometry geom = Geometry::concentric_spheres({3.0}, BoundaryCondition::Vacuum);
    const std::vector<MaterialMG> mats{one_group(1e-12, 0.0, 0.0, 0.0)};
    auto bank = point_bank(50);
    CycleContext ctx;
    PassBalance balance = transport_event_iteration(bank, geom, mats, ctx);
    CHECK(bank.empty());
    CHECK(balance.leaked == doctest::Approx(50.0));
}

TEST_CASE("shell crossing updates the cell") {
    Geometry geom = Geometry::concentric_spheres({2.5, 3.0}, BoundaryCondition::Reflective);
    const std::vector<MaterialMG> mats{one_group(1e-12, 0.0, 0.0, 0.0),
                                       one_group(1e-12, 0.0, 0.0, 0.0)};
    auto bank = point_bank(8);
    CycleContext ctx;
    transport_event_iteration(bank, geom, mats, ctx);
    for (const auto& p : bank) {
        CHECK(p.cell == 1);
        CHECK(norm(p.position) == doctest::Approx(2.5));
    }
}

TEST_CASE("weight is conserved through a collision pass") {
    // scattering + fission + capture, two groups, reflective sphere
    MaterialMG mat;
    mat.groups = 2;
    mat.sigma_t = {1.0, 2.0};
    mat.sigma_s = {0.4, 0.2, 0.0, 1.0};
    mat.sigma_f = {0.1, 0.5};
    mat.nu_sigma_f = {0.25, 1.2};
    mat.chi = {1.0, 0.0};
    Geometry geom = Geometry::concentric_spheres({1.0}, BoundaryCondition::Vacuum);

    auto bank = point_bank(20000);
    for (auto& p : bank)
        p.group = p.id % 2;
    CycleContext ctx;
    ctx.seed = 12;
    PassBalance b = transport_event_iteration(bank, geom, std::vector<MaterialMG>{mat}, ctx);

    CHECK(b.pre_weight == doctest::Approx(20000.0));
    const double accounted = b.surviving + b.absorbed + b.banked + b.leaked;
    CHECK(std::fabs(accounted - b.pre_weight) / b.pre_weight < 1e-9);
    CHECK(b.banked > 0.0);
    CHECK(b.absorbed > 0.0);
    CHECK(b.leaked > 0.0);

    double surviving_weight = 0.0;
    for (const auto& p : bank)
        surviving_weight += p.weight;
    CHECK(surviving_weight == doctest::Approx(b.surviving));
}

TEST_CASE("direction stays normalized through scattering") {
    MaterialMG mat = one_group(1.0, 0.9, 0.0, 0.0);
    Geometry geom = Geometry::infinite_medium();
    auto bank = point_bank(2000);
    CycleContext ctx;
    ctx.seed = 3;
    for (int pass = 0; pass < 5 && !bank.empty(); ++pass) {
        transport_event_iteration(bank, geom, std::vector<MaterialMG>{mat}, ctx);
        for (const auto& p : bank)
            CHECK(std::fabs(norm(p.direction) - 1.0) < 1e-9);
    }
}

TEST_CASE("comb resampling") {
    rng::Stream stream{rng::stream_base(77, 0)};

    SUBCASE("equal weights, target equal to count: every site once") {
        std::vector<FissionSite> sites(100);
        for (std::size_t i = 0; i < sites.size(); ++i) {
            sites[i].parent_id = i;
            sites[i].weight = 1.0;
        }
        auto out = sample_fission_bank(sites, 100, stream);
        REQUIRE(out.size() == 100);
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].parent_id == i);
            CHECK(out[i].weight == 1.0);
        }
    }

    SUBCASE("weights (2,1,1), target 4: counts (2,1,1)") {
        std::vector<FissionSite> sites(3);
        sites[0] = {{}, 0, 2.0, 0, 0};
        sites[1] = {{}, 0, 1.0, 1, 0};
        sites[2] = {{}, 0, 1.0, 2, 0};
        for (int trial = 0; trial < 16; ++trial) { // any comb offset
            auto out = sample_fission_bank(sites, 4, stream);
            REQUIRE(out.size() == 4);
            int counts[3] = {0, 0, 0};
            for (const auto& s : out)
                ++counts[s.parent_id];
            CHECK(counts[0] == 2);
            CHECK(counts[1] == 1);
            CHECK(counts[2] == 1);
        }
    }

    SUBCASE("errors") {
        std::vector<FissionSite> sites(1);
        sites[0].weight = 1.0;
        CHECK_THROWS_AS(sample_fission_bank(sites, 0, stream), std::invalid_argument);
        CHECK_THROWS_WITH_AS(sample_fission_bank({}, 10, stream),
                             doctest::Contains("particles_per_cycle"), std::runtime_error);
    }
}

TEST_CASE("one-group infinite medium reproduces nu_sigma_f / sigma_a") {
    // k = 0.5 / (1.0 - 0.6) = 1.25
    MaterialMG mat = one_group(1.0, 0.6, 0.2, 0.5);
    const double k_true = analytic_kinf_oracle(mat).k;
    REQUIRE(k_true == doctest::Approx(1.25));

    Geometry geom = Geometry::infinite_medium();
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        CycleConfig cfg;
        cfg.particles_per_cycle = 2000;
        cfg.inactive_cycles = 10;
        cfg.total_cycles = 50;
        cfg.seed = seed;
        RunResult run = run_eigenvalue(geom, std::vector<MaterialMG>{mat}, cfg,
                                       SortStrategy{}, 1, false);
        const double z =
            (run.tallies.keff_mean - k_true) / std::max(run.tallies.keff_std, 1e-12);
        if (std::fabs(z) >= 4.0)
            ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("infinite-medium flux spectrum matches the balance solution") {
    MaterialMG mat;
    mat.groups = 2;
    mat.sigma_t = {1.0, 2.0};
    mat.sigma_s = {0.5, 0.3, 0.0, 1.2};
    mat.sigma_f = {0.05, 0.4};
    mat.nu_sigma_f = {0.12, 1.0};
    mat.chi = {1.0, 0.0};

    KinfSolution analytic = analytic_kinf_oracle(mat);
    CycleConfig cfg;
    cfg.particles_per_cycle = 4000;
    cfg.inactive_cycles = 10;
    cfg.total_cycles = 60;
    cfg.seed = 8;
    RunResult run = run_eigenvalue(Geometry::infinite_medium(), std::vector<MaterialMG>{mat},
                                   cfg, SortStrategy{}, 1, false);

    CHECK(std::fabs(run.tallies.keff_mean - analytic.k) < 3.0 * run.tallies.keff_std);

    const double total = run.tallies.flux[0] + run.tallies.flux[1];
    for (int g = 0; g < 2; ++g) {
        const double share = run.tallies.flux[g] / total;
        const double err = run.tallies.flux_rel_err[g] * share * 3.0 + 1e-12;
        CHECK(std::fabs(share - analytic.flux[g]) < std::max(err, 3e-3));
    }
}

TEST_CASE("order invariance across strategies and worker counts") {
    auto mats = pebble_materials();
    Geometry geom = Geometry::concentric_spheres({2.5, 3.0}, BoundaryCondition::Reflective);
    CycleConfig cfg;
    cfg.particles_per_cycle = 1500;
    cfg.inactive_cycles = 3;
    cfg.total_cycles = 10;
    cfg.seed = 21;

    SortStrategy baseline_strategy; // None
    RunResult baseline = run_eigenvalue(geom, mats, cfg, baseline_strategy, 1, false);
    REQUIRE(baseline.tallies.keff_cycle.size() == 10);

    for (SortMode mode : {SortMode::None, SortMode::AdaptiveEachGeneration,
                          SortMode::BitonicEachGeneration, SortMode::AdaptiveEveryKEvents,
                          SortMode::BitonicEveryKEvents}) {
        for (unsigned workers : {1u, 4u}) {
            SortStrategy strategy;
            strategy.mode = mode;
            strategy.k_events = 2;
            RunResult run = run_eigenvalue(geom, mats, cfg, strategy, workers, false);
            CHECK(run.tallies.keff_cycle == baseline.tallies.keff_cycle); // bitwise
            CHECK(run.tallies.flux == baseline.tallies.flux);
            CHECK(run.tallies.fission_power == baseline.tallies.fission_power);
        }
    }
}

TEST_CASE("sort_bank preserves ids and honors mode None") {
    auto bank = point_bank(1000);
    rng::Stream s{rng::stream_base(6, 0)};
    for (auto& p : bank) {
        p.cell = static_cast<int>(s.next_below(3));
        p.group = static_cast<int>(s.next_below(2));
    }
    const auto original = bank;

    SortStrategy none;
    auto r_none = sort_bank(bank, none, 2);
    CHECK(r_none.stats.comparisons == 0);
    for (std::size_t i = 0; i < bank.size(); ++i)
        CHECK(bank[i].id == original[i].id); // no permutation

    SortStrategy adaptive;
    adaptive.mode = SortMode::AdaptiveEachGeneration;
    auto r_sort = sort_bank(bank, adaptive, 2);
    CHECK(r_sort.stats.comparisons > 0);
    CHECK(r_sort.report.inversion_fraction == r_none.report.inversion_fraction);

    // sorted by (cell*G + group), id multiset unchanged
    std::vector<std::uint64_t> ids;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        if (i > 0) {
            const auto key = [&](const Particle& p) {
                return static_cast<std::uint64_t>(p.cell) * 2 + p.group;
            };
            CHECK(key(bank[i - 1]) <= key(bank[i]));
        }
        ids.push_back(bank[i].id);
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i)
        CHECK(ids[i] == i);

    // measuring again right after sorting reports zero disorder
    auto r_again = sort_bank(bank, none, 2);
    CHECK(r_again.report.inversion_fraction == 0.0);
    CHECK(r_again.report.sorted_runs == 1);
}

TEST_CASE("presort trace cadence and degenerate keys") {
    MaterialMG mat = one_group(1.0, 0.5, 0.2, 0.5);
    Geometry geom = Geometry::infinite_medium();
    CycleConfig cfg;
    cfg.particles_per_cycle = 400;
    cfg.inactive_cycles = 2;
    cfg.total_cycles = 6;
    cfg.seed = 2;

    SortStrategy per_gen;
    per_gen.mode = SortMode::AdaptiveEachGeneration;
    RunResult run =
        run_eigenvalue(geom, std::vector<MaterialMG>{mat}, cfg, per_gen, 1, true);
    CHECK(run.trace.size() == cfg.total_cycles); // one sort per generation
    for (const auto& row : run.trace) {
        CHECK(row.event_pass == 0);
        // single cell, single group: all keys equal
        CHECK(row.inversion_fraction == 0.0);
        CHECK(row.bitonic_comparator_equiv == bitonic_comparator_count(row.bank_size));
    }

    SortStrategy none;
    RunResult traced =
        run_eigenvalue(geom, std::vector<MaterialMG>{mat}, cfg, none, 1, true);
    CHECK(traced.trace.size() > cfg.total_cycles); // one row per event pass
    for (const auto& row : traced.trace)
        CHECK(row.sort_comparisons == 0);
}

TEST_CASE("pebble keff is self-consistent against a larger reference run") {
    auto mats = pebble_materials();
    Geometry geom = Geometry::concentric_spheres({2.5, 3.0}, BoundaryCondition::Reflective);

    CycleConfig reference;
    reference.particles_per_cycle = 100000;
    reference.inactive_cycles = 5;
    reference.total_cycles = 25;
    reference.seed = 51;
    RunResult big = run_eigenvalue(geom, mats, reference, SortStrategy{}, 1, false);

    CycleConfig small;
    small.particles_per_cycle = 10000;
    small.inactive_cycles = 5;
    small.total_cycles = 25;
    small.seed = 52;
    for (SortMode mode : {SortMode::None, SortMode::BitonicEachGeneration}) {
        SortStrategy strategy;
        strategy.mode = mode;
        RunResult run = run_eigenvalue(geom, mats, small, strategy, 1, false);
        const double sigma = std::sqrt(run.tallies.keff_std * run.tallies.keff_std +
                                       big.tallies.keff_std * big.tallies.keff_std);
        CHECK(std::fabs(run.tallies.keff_mean - big.tallies.keff_mean) < 3.0 * sigma);
    }
}

TEST_CASE("event passes perturb the sorted key order") {
    auto mats = pebble_materials();
    Geometry geom = Geometry::concentric_spheres({2.5, 3.0}, BoundaryCondition::Reflective);
    CycleConfig cfg;
    cfg.particles_per_cycle = 2000;
    cfg.inactive_cycles = 2;
    cfg.total_cycles = 8;
    cfg.seed = 61;

    SortStrategy none; // measure-only rows at every pass
    RunResult run = run_eigenvalue(geom, mats, cfg, none, 1, true);
    bool perturbed = false;
    for (const auto& row : run.trace)
        if (row.event_pass > 0 && row.inversion_fraction > 0.0)
            perturbed = true;
    CHECK(perturbed); // scattering moves particles across (cell, group) keys
}

TEST_CASE("run_eigenvalue validation") {
    MaterialMG mat = one_group(1.0, 0.5, 0.2, 0.5);
    Geometry geom = Geometry::infinite_medium();
    CycleConfig bad;
    bad.total_cycles = 5;
    bad.inactive_cycles = 5;
    CHECK_THROWS_WITH_AS(
        run_eigenvalue(geom, std::vector<MaterialMG>{mat}, bad, SortStrategy{}),
        doctest::Contains("total_cycles"), std::invalid_argument);

    CycleConfig cfg;
    cfg.particles_per_cycle = 10;
    cfg.inactive_cycles = 1;
    cfg.total_cycles = 3;
    MaterialMG inert = one_group(1.0, 0.5, 0.0, 0.0);
    CHECK_THROWS_WITH_AS(
        run_eigenvalue(geom, std::vector<MaterialMG>{inert}, cfg, SortStrategy{}),
        doctest::Contains("fissile"), std::invalid_argument);

    SortStrategy bad_strategy;
    bad_strategy.mode = SortMode::AdaptiveEveryKEvents;
    bad_strategy.k_events = 0;
    CHECK_THROWS_AS(
        run_eigenvalue(geom, std::vector<MaterialMG>{mat}, cfg, bad_strategy),
        std::invalid_argument);
}

TEST_CASE("run outputs are written") {
    MaterialMG mat = one_group(1.0, 0.5, 0.2, 0.5);
    CycleConfig cfg;
    cfg.particles_per_cycle = 300;
    cfg.inactive_cycles = 2;
    cfg.total_cycles = 5;
    RunResult run = run_eigenvalue(Geometry::infinite_medium(), std::vector<MaterialMG>{mat},
                                   cfg, SortStrategy{}, 1, true);

    const fs::path dir = fs::temp_directory_path() / "sortmc_transport_out";
    fs::create_directories(dir);
    write_keff_csv(run.tallies, cfg.inactive_cycles, dir / "keff.csv");
    write_flux_csv(run.tallies, dir / "flux.csv");
    write_presort_trace_csv(run.trace, dir / "presort_trace.csv");

    std::ifstream keff(dir / "keff.csv");
    std::string header;
    std::getline(keff, header);
    CHECK(header == "cycle,k_cycle,running_mean,running_std");
    std::size_t rows = 0;
    for (std::string line; std::getline(keff, line);)
        ++rows;
    CHECK(rows == cfg.total_cycles);
    fs::remove_all(dir);
}
