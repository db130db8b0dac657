// SPDX-License-Identifier: Apache-2.0

#include "sortmc/mc/transport.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sortmc/sort_core.hpp"

namespace sortmc::mc {
namespace {

constexpr std::uint64_t kCombTag = 0xC0B5A17E5ULL;
constexpr unsigned kMaxPassesPerCycle = 100000;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t particle_stream(std::uint64_t seed, unsigned cycle, std::uint64_t id) {
    return rng::stream_base(seed, cycle, id);
}

Vec3 isotropic_direction(rng::Stream& s) {
    const double mu = 2.0 * s.next_unit() - 1.0;
    const double phi = 2.0 * M_PI * s.next_unit();
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), mu};
}

int sample_cdf(rng::Stream& s, std::span<const double> weights, double total) {
    const double target = s.next_unit() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (target < cum)
            return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

struct WorkerScratch {
    std::vector<CycleContext::TallyEvent> events;
    std::vector<FissionSite> sites;
    PassBalance balance;
    std::uint64_t lost = 0;
};

void process_particle(Particle& p, const Geometry& geom, std::span<const MaterialMG> materials,
                      const CycleContext& ctx, WorkerScratch& out) {
    const MaterialMG& mat = materials[static_cast<std::size_t>(p.cell)];
    rng::Stream s{particle_stream(ctx.seed, ctx.cycle, p.id), p.event_counter};
    const std::uint64_t seq = p.event_counter;

    out.balance.pre_weight += p.weight;

    const double sigma_t = mat.sigma_t[static_cast<std::size_t>(p.group)];
    const double xi = s.next_unit();
    const double d_coll = sigma_t > 0.0 ? -std::log(1.0 - xi) / sigma_t : kInf;
    const Geometry::Crossing crossing = geom.next_boundary(p.position, p.direction, p.cell);
    const double t = std::min(d_coll, crossing.distance);

    if (!std::isfinite(t) || t < 0.0) {
        // Geometry inconsistency (or a void infinite medium): count and kill.
        p.alive = false;
        p.event_counter = s.counter;
        ++out.lost;
        return;
    }

    p.position = p.position + p.direction * t;
    CycleContext::TallyEvent ev{p.id, seq, p.cell, p.group, p.weight * t, 0.0};

    if (crossing.distance <= d_coll) {
        // Surface event. Snap onto the sphere to keep the next flight's
        // quadratic well conditioned.
        const double r = norm(p.position);
        if (r > 0.0)
            p.position = p.position * (crossing.surface_radius / r);
        if (crossing.outer_boundary) {
            if (geom.outer_bc() == BoundaryCondition::Reflective) {
                p.direction = reflect_at_sphere(p.position, p.direction);
            } else {
                p.alive = false;
                out.balance.leaked += p.weight;
            }
        } else {
            p.cell = crossing.next_cell;
        }
    } else {
        // Collision. Collision estimator first, then analog reaction sampling.
        const auto g = static_cast<std::size_t>(p.group);
        ev.k_contrib = p.weight * mat.nu_sigma_f[g] / sigma_t;

        const double scatter_row = mat.scatter_row_sum(p.group);
        const double p_scatter = scatter_row / sigma_t;
        const double p_fission = mat.sigma_f[g] / sigma_t;
        const double u = s.next_unit();

        if (u < p_scatter) {
            std::span<const double> row{mat.sigma_s.data() + g * mat.groups,
                                        static_cast<std::size_t>(mat.groups)};
            p.group = sample_cdf(s, row, scatter_row);
            p.direction = isotropic_direction(s);
        } else if (u < p_scatter + p_fission) {
            const double nu = mat.nu_sigma_f[g] / mat.sigma_f[g];
            const double yield = p.weight * nu / ctx.k_run;
            const auto count = static_cast<std::uint64_t>(std::floor(yield + s.next_unit()));
            if (count > 0) {
                const double site_weight = yield / static_cast<double>(count);
                for (std::uint64_t i = 0; i < count; ++i)
                    out.sites.push_back({p.position, p.cell, site_weight, p.id, seq});
            }
            out.balance.banked += p.weight;
            p.alive = false;
        } else {
            out.balance.absorbed += p.weight;
            p.alive = false;
        }
    }

    if (p.alive)
        out.balance.surviving += p.weight;
    p.event_counter = s.counter;
    out.events.push_back(ev);
}

} // namespace

void SortStrategy::validate() const {
    if ((mode == SortMode::AdaptiveEveryKEvents || mode == SortMode::BitonicEveryKEvents) &&
        k_events < 1)
        throw std::invalid_argument("SortStrategy.k_events must be >= 1 for EveryK modes");
}

void CycleConfig::validate() const {
    if (particles_per_cycle < 1)
        throw std::invalid_argument("CycleConfig.particles_per_cycle must be >= 1");
    if (total_cycles <= inactive_cycles)
        throw std::invalid_argument("CycleConfig.total_cycles must exceed inactive_cycles");
}

PassBalance transport_event_iteration(std::vector<Particle>& bank, const Geometry& geom,
                                      std::span<const MaterialMG> materials, CycleContext& ctx,
                                      WorkerPool* pool) {
    const unsigned workers = pool ? pool->workers() : 1;
    std::vector<WorkerScratch> scratch(workers);

    auto chunk = [&](unsigned w, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            process_particle(bank[i], geom, materials, ctx, scratch[w]);
    };
    if (pool)
        pool->parallel_for(bank.size(), chunk);
    else
        chunk(0, 0, bank.size());

    PassBalance balance;
    for (WorkerScratch& s : scratch) {
        balance.pre_weight += s.balance.pre_weight;
        balance.surviving += s.balance.surviving;
        balance.absorbed += s.balance.absorbed;
        balance.banked += s.balance.banked;
        balance.leaked += s.balance.leaked;
        ctx.lost += s.lost;
        ctx.events.insert(ctx.events.end(), s.events.begin(), s.events.end());
        ctx.sites.insert(ctx.sites.end(), s.sites.begin(), s.sites.end());
    }

    std::erase_if(bank, [](const Particle& p) { return !p.alive; });
    return balance;
}

namespace {

std::uint64_t bank_key(const Particle& p, KeyScheme scheme, int groups) {
    switch (scheme) {
        case KeyScheme::Group: return static_cast<std::uint64_t>(p.group);
        case KeyScheme::Cell: return static_cast<std::uint64_t>(p.cell);
        case KeyScheme::CellThenGroup:
            return static_cast<std::uint64_t>(p.cell) * static_cast<std::uint64_t>(groups) +
                   static_cast<std::uint64_t>(p.group);
    }
    return 0;
}

} // namespace

SortBankResult sort_bank(std::vector<Particle>& bank, const SortStrategy& strategy, int groups,
                         unsigned workers) {
    strategy.validate();
    SortBankResult result;

    std::vector<KeyRecord> recs(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i)
        recs[i] = KeyRecord{bank_key(bank[i], strategy.key_scheme, groups), i};

    result.report = presort_report(recs);

    switch (strategy.mode) {
        case SortMode::None:
            return result;
        case SortMode::AdaptiveEachGeneration:
        case SortMode::AdaptiveEveryKEvents:
            result.stats = sort_adaptive(recs);
            break;
        case SortMode::BitonicEachGeneration:
        case SortMode::BitonicEveryKEvents:
            result.stats = sort_bitonic(recs, workers);
            break;
    }

    std::vector<Particle> permuted(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i)
        permuted[i] = bank[recs[i].payload];
    bank.swap(permuted);
    return result;
}

std::vector<FissionSite> sample_fission_bank(std::span<const FissionSite> sites,
                                             std::size_t target, rng::Stream& stream) {
    if (sites.empty())
        throw std::runtime_error(
            "sample_fission_bank: fission bank is empty (subcritical extinction); "
            "increase particles_per_cycle");
    if (target == 0)
        throw std::invalid_argument("sample_fission_bank: target must be >= 1");

    double total = 0.0;
    for (const FissionSite& s : sites)
        total += s.weight;
    if (!(total > 0.0))
        throw std::runtime_error("sample_fission_bank: total site weight is not positive");

    const double stride = total / static_cast<double>(target);
    const double start = stream.next_unit() * stride;

    std::vector<FissionSite> out;
    out.reserve(target);
    std::size_t j = 0;
    double cum = sites[0].weight;
    for (std::size_t i = 0; i < target; ++i) {
        const double pos = start + static_cast<double>(i) * stride;
        while (pos >= cum && j + 1 < sites.size())
            cum += sites[++j].weight;
        FissionSite pick = sites[j];
        pick.weight = 1.0;
        out.push_back(pick);
    }
    return out;
}

std::uint64_t bitonic_comparator_count(std::size_t n) {
    const std::size_t padded = next_power_of_two(n);
    const auto k = static_cast<std::uint64_t>(std::bit_width(padded) - 1);
    return k * (k + 1) / 2 * (padded / 2);
}

namespace {

bool should_sort(const SortStrategy& strategy, unsigned pass) {
    switch (strategy.mode) {
        case SortMode::None:
            return true; // measure-only, every pass
        case SortMode::AdaptiveEachGeneration:
        case SortMode::BitonicEachGeneration:
            return pass == 0;
        case SortMode::AdaptiveEveryKEvents:
        case SortMode::BitonicEveryKEvents:
            return pass % strategy.k_events == 0;
    }
    return false;
}

int first_fissile_cell(std::span<const MaterialMG> materials) {
    for (std::size_t i = 0; i < materials.size(); ++i)
        if (materials[i].fissile())
            return static_cast<int>(i);
    throw std::invalid_argument("run_eigenvalue: no fissile material in the problem");
}

std::vector<Particle> initial_source(const Geometry& geom, std::span<const MaterialMG> materials,
                                     const CycleConfig& cfg) {
    const int cell = first_fissile_cell(materials);
    const MaterialMG& mat = materials[static_cast<std::size_t>(cell)];
    const double chi_total = 1.0;

    std::vector<Particle> bank(cfg.particles_per_cycle);
    for (std::size_t i = 0; i < bank.size(); ++i) {
        Particle& p = bank[i];
        p.id = i;
        rng::Stream s{particle_stream(cfg.seed, 0, p.id)};
        if (geom.is_infinite()) {
            p.position = {0.0, 0.0, 0.0};
        } else {
            const double r_out = geom.radii()[static_cast<std::size_t>(cell)];
            const double r_in = cell > 0 ? geom.radii()[static_cast<std::size_t>(cell) - 1] : 0.0;
            const double r3 =
                r_in * r_in * r_in +
                s.next_unit() * (r_out * r_out * r_out - r_in * r_in * r_in);
            p.position = isotropic_direction(s) * std::cbrt(r3);
        }
        p.cell = cell;
        p.direction = isotropic_direction(s);
        p.group = sample_cdf(s, mat.chi, chi_total);
        p.weight = 1.0;
        p.alive = true;
        p.event_counter = s.counter;
    }
    return bank;
}

std::vector<Particle> emit_from_sites(std::span<const FissionSite> picks,
                                      std::span<const MaterialMG> materials,
                                      std::uint64_t seed, unsigned cycle) {
    std::vector<Particle> bank(picks.size());
    for (std::size_t i = 0; i < picks.size(); ++i) {
        Particle& p = bank[i];
        const FissionSite& site = picks[i];
        p.id = i;
        rng::Stream s{particle_stream(seed, cycle, p.id)};
        p.position = site.position;
        p.cell = site.cell;
        p.direction = isotropic_direction(s);
        p.group = sample_cdf(s, materials[static_cast<std::size_t>(site.cell)].chi, 1.0);
        p.weight = site.weight;
        p.alive = true;
        p.event_counter = s.counter;
    }
    return bank;
}

} // namespace

RunResult run_eigenvalue(const Geometry& geom, std::span<const MaterialMG> materials,
                         const CycleConfig& cfg, const SortStrategy& strategy, unsigned workers,
                         bool trace_enabled) {
    cfg.validate();
    strategy.validate();
    if (workers < 1)
        throw std::invalid_argument("run_eigenvalue: workers must be >= 1");
    if (materials.empty() || static_cast<int>(materials.size()) != geom.cell_count())
        throw std::invalid_argument("run_eigenvalue: one material per geometry cell required");
    const int groups = materials[0].groups;
    for (const MaterialMG& m : materials)
        if (m.groups != groups)
            throw std::invalid_argument("run_eigenvalue: inconsistent group counts");

    const int cells = geom.cell_count();
    const std::size_t n_per_cycle = cfg.particles_per_cycle;
    const auto flux_size = static_cast<std::size_t>(cells) * static_cast<std::size_t>(groups);

    RunResult result;
    result.total_histories =
        static_cast<std::uint64_t>(n_per_cycle) * cfg.total_cycles;
    TallySet& tallies = result.tallies;
    tallies.cells = cells;
    tallies.groups = groups;
    tallies.flux.assign(flux_size, 0.0);
    tallies.flux_rel_err.assign(flux_size, 0.0);
    tallies.fission_power.assign(static_cast<std::size_t>(cells), 0.0);

    std::vector<double> flux_sum(flux_size, 0.0), flux_sq(flux_size, 0.0);
    std::vector<double> power_sum(static_cast<std::size_t>(cells), 0.0);
    std::vector<double> cycle_flux(flux_size), cycle_power(static_cast<std::size_t>(cells));

    std::optional<WorkerPool> pool;
    if (workers > 1)
        pool.emplace(workers);

    std::vector<Particle> source = initial_source(geom, materials, cfg);
    double k_run = 1.0;
    double k_active_sum = 0.0, k_active_sq = 0.0;
    const unsigned active_cycles = cfg.total_cycles - cfg.inactive_cycles;

    for (unsigned cycle = 0; cycle < cfg.total_cycles; ++cycle) {
        CycleContext ctx;
        ctx.seed = cfg.seed;
        ctx.cycle = cycle;
        ctx.k_run = k_run;

        std::vector<Particle> bank = std::move(source);
        source.clear();

        unsigned pass = 0;
        while (!bank.empty()) {
            if (should_sort(strategy, pass)) {
                SortBankResult sorted = sort_bank(bank, strategy, groups, workers);
                if (trace_enabled)
                    result.trace.push_back({cycle, pass, sorted.report.inversion_fraction,
                                            sorted.report.sorted_runs, bank.size(),
                                            sorted.stats.comparisons,
                                            bitonic_comparator_count(bank.size())});
            }
            transport_event_iteration(bank, geom, materials, ctx, pool ? &*pool : nullptr);
            if (++pass > kMaxPassesPerCycle)
                throw std::runtime_error("run_eigenvalue: event pass limit exceeded "
                                         "(non-absorbing material?)");
        }

        // Deterministic reduction: (id, seq) is unique per event and
        // independent of bank permutations and worker chunking.
        std::sort(ctx.events.begin(), ctx.events.end(),
                  [](const CycleContext::TallyEvent& a, const CycleContext::TallyEvent& b) {
                      return a.id != b.id ? a.id < b.id : a.seq < b.seq;
                  });
        double k_sum = 0.0;
        std::fill(cycle_flux.begin(), cycle_flux.end(), 0.0);
        std::fill(cycle_power.begin(), cycle_power.end(), 0.0);
        for (const CycleContext::TallyEvent& ev : ctx.events) {
            k_sum += ev.k_contrib;
            const auto cell = static_cast<std::size_t>(ev.cell);
            const auto idx = cell * static_cast<std::size_t>(groups) +
                             static_cast<std::size_t>(ev.group);
            cycle_flux[idx] += ev.track;
            cycle_power[cell] +=
                ev.track * materials[cell].sigma_f[static_cast<std::size_t>(ev.group)];
        }
        const double k_cycle = k_sum / static_cast<double>(n_per_cycle);
        tallies.keff_cycle.push_back(k_cycle);

        result.lost_particles += ctx.lost;
        if (static_cast<double>(result.lost_particles) >
            1e-6 * static_cast<double>(n_per_cycle) * (cycle + 1))
            throw std::runtime_error("run_eigenvalue: lost-particle fraction exceeded 1e-6");

        if (cycle >= cfg.inactive_cycles) {
            k_active_sum += k_cycle;
            k_active_sq += k_cycle * k_cycle;
            for (std::size_t i = 0; i < flux_size; ++i) {
                const double v = cycle_flux[i] / static_cast<double>(n_per_cycle);
                flux_sum[i] += v;
                flux_sq[i] += v * v;
            }
            for (std::size_t c = 0; c < cycle_power.size(); ++c)
                power_sum[c] += cycle_power[c];
        }

        k_run = k_cycle;

        if (cycle + 1 < cfg.total_cycles) {
            std::sort(ctx.sites.begin(), ctx.sites.end(),
                      [](const FissionSite& a, const FissionSite& b) {
                          return a.parent_id != b.parent_id ? a.parent_id < b.parent_id
                                                            : a.parent_seq < b.parent_seq;
                      });
            rng::Stream comb{rng::stream_base(cfg.seed, cycle + 1, kCombTag)};
            std::vector<FissionSite> picks =
                sample_fission_bank(ctx.sites, n_per_cycle, comb);
            source = emit_from_sites(picks, materials, cfg.seed, cycle + 1);
        }
    }

    const auto a = static_cast<double>(active_cycles);
    tallies.keff_mean = k_active_sum / a;
    if (active_cycles > 1) {
        const double var =
            (k_active_sq - k_active_sum * k_active_sum / a) / (a * (a - 1.0));
        tallies.keff_std = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    for (std::size_t i = 0; i < flux_size; ++i) {
        const double mean = flux_sum[i] / a;
        tallies.flux[i] = mean;
        if (active_cycles > 1 && mean > 0.0) {
            const double var = (flux_sq[i] - flux_sum[i] * flux_sum[i] / a) / (a * (a - 1.0));
            tallies.flux_rel_err[i] = var > 0.0 ? std::sqrt(var) / mean : 0.0;
        }
    }
    double power_total = 0.0;
    for (double p : power_sum)
        power_total += p;
    for (std::size_t c = 0; c < power_sum.size(); ++c)
        tallies.fission_power[c] = power_total > 0.0 ? power_sum[c] / power_total : 0.0;

    return result;
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& content,
                  const char* who) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw std::runtime_error(std::string(who) + ": cannot open " + tmp.string());
        out << content;
        if (!out.flush())
            throw std::runtime_error(std::string(who) + ": write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void write_keff_csv(const TallySet& tallies, unsigned inactive_cycles,
                    const std::filesystem::path& path) {
    std::string out = "cycle,k_cycle,running_mean,running_std\n";
    double sum = 0.0, sq = 0.0;
    unsigned active = 0;
    for (std::size_t c = 0; c < tallies.keff_cycle.size(); ++c) {
        const double k = tallies.keff_cycle[c];
        out += std::to_string(c) + "," + num(k) + ",";
        if (c >= inactive_cycles) {
            ++active;
            sum += k;
            sq += k * k;
            const double mean = sum / active;
            out += num(mean);
            out += ",";
            if (active > 1) {
                const double var =
                    (sq - sum * sum / active) / (static_cast<double>(active) * (active - 1.0));
                out += num(var > 0.0 ? std::sqrt(var) : 0.0);
            }
        } else {
            out += ",";
        }
        out += "\n";
    }
    atomic_write(path, out, "write_keff_csv");
}

void write_flux_csv(const TallySet& tallies, const std::filesystem::path& path) {
    std::string out = "cell,group,value,rel_err\n";
    for (int c = 0; c < tallies.cells; ++c)
        for (int g = 0; g < tallies.groups; ++g) {
            const auto idx = static_cast<std::size_t>(c) * tallies.groups +
                             static_cast<std::size_t>(g);
            out += std::to_string(c) + "," + std::to_string(g) + "," +
                   num(tallies.flux[idx]) + "," + num(tallies.flux_rel_err[idx]) + "\n";
        }
    atomic_write(path, out, "write_flux_csv");
}

void write_presort_trace_csv(std::span<const TraceRow> trace,
                             const std::filesystem::path& path) {
    std::string out = "cycle,event_pass,inversion_fraction,sorted_runs\n";
    for (const TraceRow& row : trace)
        out += std::to_string(row.cycle) + "," + std::to_string(row.event_pass) + "," +
               num(row.inversion_fraction) + "," + std::to_string(row.sorted_runs) + "\n";
    atomic_write(path, out, "write_presort_trace_csv");
}

} // namespace sortmc::mc
