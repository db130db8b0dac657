// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sortmc::mc {

/// Atomic density in units of 10^24 cm^-3 (atoms per barn-cm).
struct NuclideDensity {
    std::string nuclide;
    double density;
};

using MaterialDefinition = std::pair<std::string, std::vector<NuclideDensity>>;

/// Parses the line-oriented material format:
///   # comment
///   material <name, spaces allowed>
///   <nuclide> <density>
/// Unknown element symbols and negative densities raise std::runtime_error
/// naming the offending line.
std::vector<MaterialDefinition> load_materials(const std::filesystem::path& path);

/// Per-nuclide microscopic data in barns; sigma_s is the G*G scattering
/// matrix, row-major from-group -> to-group.
struct NuclideMicro {
    std::vector<double> sigma_t;
    std::vector<double> sigma_s;
    std::vector<double> sigma_f;
    std::vector<double> nu;
    std::vector<double> chi;
};

struct MicroLibrary {
    int groups = 0;
    std::map<std::string, NuclideMicro> nuclides;
};

/// Parses the micro-library grammar:
///   groups <G>
///   nuclide <name>
///   sigma_t <G values>
///   sigma_s <G*G values>        (row g: scatter from g into each g')
///   sigma_f <G values>          (optional, default 0)
///   nu      <G values>          (optional, default 0)
///   chi     <G values>          (optional, default 0; must sum to 1 if fissile)
/// Enforces sigma_t >= scatter row sum + sigma_f and non-negativity.
MicroLibrary load_micro_library(const std::filesystem::path& path);

/// Macroscopic multigroup material, cm^-1.
struct MaterialMG {
    int groups = 0;
    std::vector<double> sigma_t;    // [G]
    std::vector<double> sigma_s;    // [G*G] row-major g->g'
    std::vector<double> sigma_f;    // [G]
    std::vector<double> nu_sigma_f; // [G]
    std::vector<double> chi;        // [G], production-weighted over nuclides

    double scatter_row_sum(int g) const;
    bool fissile() const;
};

/// Sigma = sum_i N_i * sigma_i over the composition; throws
/// std::runtime_error naming any nuclide missing from the library.
MaterialMG macro_xs_build(std::span<const NuclideDensity> densities, const MicroLibrary& lib);

/// Infinite-medium fundamental mode: solves the G-group balance directly
/// (dense solve of M y = chi, k = nu_sigma_f . y). Returns k = 0 with a
/// zero flux for non-multiplying materials.
struct KinfSolution {
    double k = 0.0;
    std::vector<double> flux; // normalized to sum 1 when k > 0
};

KinfSolution analytic_kinf_oracle(const MaterialMG& mat);

/// "1.25013 (12)" style: mean with the standard deviation expressed in
/// units of the last printed digit.
std::string format_keff(double mean, double std_dev, int decimals = 5);

} // namespace sortmc::mc
