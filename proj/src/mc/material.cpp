// SPDX-License-Identifier: Apache-2.0

#include "sortmc/mc/material.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sortmc::mc {
namespace {

const std::set<std::string>& element_symbols() {
    static const std::set<std::string> symbols = {
        "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si",
        "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni",
        "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo",
        "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba",
        "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
        "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
        "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf",
        "Es", "Fm", "Md", "No", "Lr"};
    return symbols;
}

bool valid_nuclide_name(const std::string& name) {
    const std::size_t dash = name.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 >= name.size())
        return false;
    if (!element_symbols().count(name.substr(0, dash)))
        return false;
    int mass = 0;
    for (std::size_t i = dash + 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
            return false;
        mass = mass * 10 + (name[i] - '0');
    }
    return mass >= 1 && mass <= 300;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    std::size_t hash = line.find('#');
    return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

std::vector<MaterialDefinition> load_materials(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_materials: cannot open " + path.string());

    std::vector<MaterialDefinition> materials;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_comment(raw);
        if (line.empty())
            continue;
        if (line.rfind("material", 0) == 0 &&
            (line.size() == 8 || std::isspace(static_cast<unsigned char>(line[8])))) {
            const std::string name = trim(line.substr(8));
            if (name.empty())
                parse_fail(path, line_no, "material header without a name");
            materials.push_back({name, {}});
            continue;
        }
        if (materials.empty())
            parse_fail(path, line_no, "nuclide entry before any material header");

        std::istringstream fields(line);
        std::string nuclide;
        double density;
        if (!(fields >> nuclide >> density))
            parse_fail(path, line_no, "expected '<nuclide> <density>', got '" + line + "'");
        std::string rest;
        if (fields >> rest)
            parse_fail(path, line_no, "trailing tokens after density");
        if (!valid_nuclide_name(nuclide))
            parse_fail(path, line_no, "unknown nuclide name '" + nuclide + "'");
        if (density < 0.0)
            parse_fail(path, line_no, "negative density for '" + nuclide + "'");
        materials.back().second.push_back({nuclide, density});
    }
    return materials;
}

namespace {

std::vector<double> parse_values(const std::filesystem::path& path, std::size_t line_no,
                                 std::istringstream& fields, std::size_t expected,
                                 const std::string& what) {
    std::vector<double> values;
    double v;
    while (fields >> v)
        values.push_back(v);
    if (values.size() != expected)
        parse_fail(path, line_no,
                   what + ": expected " + std::to_string(expected) + " values, got " +
                       std::to_string(values.size()));
    for (double x : values)
        if (x < 0.0 || !std::isfinite(x))
            parse_fail(path, line_no, what + ": negative or non-finite entry");
    return values;
}

void validate_nuclide(const std::filesystem::path& path, const std::string& name,
                      const NuclideMicro& n, int groups) {
    for (int g = 0; g < groups; ++g) {
        double row = 0.0;
        for (int gp = 0; gp < groups; ++gp)
            row += n.sigma_s[static_cast<std::size_t>(g) * groups + gp];
        if (n.sigma_t[g] + 1e-12 < row + n.sigma_f[g])
            throw std::runtime_error(path.string() + ": nuclide " + name + " group " +
                                     std::to_string(g) +
                                     ": sigma_t below scatter row sum + sigma_f");
    }
    const double chi_sum = std::accumulate(n.chi.begin(), n.chi.end(), 0.0);
    const bool has_fission =
        std::any_of(n.sigma_f.begin(), n.sigma_f.end(), [](double v) { return v > 0.0; });
    if (has_fission && std::fabs(chi_sum - 1.0) > 1e-12)
        throw std::runtime_error(path.string() + ": nuclide " + name +
                                 ": chi must sum to 1 for fissile nuclides");
    if (!has_fission && chi_sum != 0.0 && std::fabs(chi_sum - 1.0) > 1e-12)
        throw std::runtime_error(path.string() + ": nuclide " + name + ": chi must sum to 0 or 1");
}

} // namespace

MicroLibrary load_micro_library(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_micro_library: cannot open " + path.string());

    MicroLibrary lib;
    std::string current;
    std::string raw;
    std::size_t line_no = 0;

    auto finish_nuclide = [&](const std::string& name) {
        if (name.empty())
            return;
        NuclideMicro& n = lib.nuclides[name];
        const auto g = static_cast<std::size_t>(lib.groups);
        if (n.sigma_t.size() != g)
            throw std::runtime_error(path.string() + ": nuclide " + name + " missing sigma_t");
        if (n.sigma_s.size() != g * g)
            throw std::runtime_error(path.string() + ": nuclide " + name + " missing sigma_s");
        if (n.sigma_f.empty())
            n.sigma_f.assign(g, 0.0);
        if (n.nu.empty())
            n.nu.assign(g, 0.0);
        if (n.chi.empty())
            n.chi.assign(g, 0.0);
        validate_nuclide(path, name, n, lib.groups);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_comment(raw);
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string keyword;
        fields >> keyword;

        if (keyword == "groups") {
            if (!(fields >> lib.groups) || lib.groups < 1)
                parse_fail(path, line_no, "groups must be a positive integer");
        } else if (keyword == "nuclide") {
            finish_nuclide(current);
            if (lib.groups == 0)
                parse_fail(path, line_no, "'groups' must precede the first nuclide");
            std::string name;
            if (!(fields >> name) || !valid_nuclide_name(name))
                parse_fail(path, line_no, "unknown nuclide name '" + name + "'");
            current = name;
            lib.nuclides[current] = NuclideMicro{};
        } else if (keyword == "sigma_t" || keyword == "sigma_f" || keyword == "nu" ||
                   keyword == "chi" || keyword == "sigma_s") {
            if (current.empty())
                parse_fail(path, line_no, "'" + keyword + "' before any nuclide");
            const auto g = static_cast<std::size_t>(lib.groups);
            const std::size_t expected = keyword == "sigma_s" ? g * g : g;
            auto values = parse_values(path, line_no, fields, expected, keyword);
            NuclideMicro& n = lib.nuclides[current];
            if (keyword == "sigma_t")
                n.sigma_t = std::move(values);
            else if (keyword == "sigma_s")
                n.sigma_s = std::move(values);
            else if (keyword == "sigma_f")
                n.sigma_f = std::move(values);
            else if (keyword == "nu")
                n.nu = std::move(values);
            else
                n.chi = std::move(values);
        } else {
            parse_fail(path, line_no, "unknown keyword '" + keyword + "'");
        }
    }
    finish_nuclide(current);
    return lib;
}

double MaterialMG::scatter_row_sum(int g) const {
    double row = 0.0;
    for (int gp = 0; gp < groups; ++gp)
        row += sigma_s[static_cast<std::size_t>(g) * groups + gp];
    return row;
}

bool MaterialMG::fissile() const {
    return std::any_of(nu_sigma_f.begin(), nu_sigma_f.end(), [](double v) { return v > 0.0; });
}

MaterialMG macro_xs_build(std::span<const NuclideDensity> densities, const MicroLibrary& lib) {
    MaterialMG mat;
    mat.groups = lib.groups;
    const auto g = static_cast<std::size_t>(lib.groups);
    mat.sigma_t.assign(g, 0.0);
    mat.sigma_s.assign(g * g, 0.0);
    mat.sigma_f.assign(g, 0.0);
    mat.nu_sigma_f.assign(g, 0.0);
    mat.chi.assign(g, 0.0);

    double chi_weight_total = 0.0;
    for (const NuclideDensity& nd : densities) {
        auto it = lib.nuclides.find(nd.nuclide);
        if (it == lib.nuclides.end())
            throw std::runtime_error("macro_xs_build: nuclide '" + nd.nuclide +
                                     "' not in the micro library");
        const NuclideMicro& micro = it->second;
        const double N = nd.density;
        double production = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            mat.sigma_t[i] += N * micro.sigma_t[i];
            mat.sigma_f[i] += N * micro.sigma_f[i];
            mat.nu_sigma_f[i] += N * micro.nu[i] * micro.sigma_f[i];
            production += N * micro.nu[i] * micro.sigma_f[i];
        }
        for (std::size_t i = 0; i < g * g; ++i)
            mat.sigma_s[i] += N * micro.sigma_s[i];
        // chi averaged over nuclides, weighted by fission production.
        for (std::size_t i = 0; i < g; ++i)
            mat.chi[i] += production * micro.chi[i];
        chi_weight_total += production;
    }
    if (chi_weight_total > 0.0)
        for (std::size_t i = 0; i < g; ++i)
            mat.chi[i] /= chi_weight_total;
    return mat;
}

namespace {

// Gaussian elimination with partial pivoting; a is row-major n x n.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col]))
                pivot = r;
        if (std::fabs(a[pivot * n + col]) < 1e-300)
            throw std::runtime_error("analytic_kinf_oracle: singular balance matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0)
                continue;
            for (std::size_t c = col; c < n; ++c)
                a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c)
            s -= a[r * n + c] * x[c];
        x[r] = s / a[r * n + r];
    }
    return x;
}

} // namespace

KinfSolution analytic_kinf_oracle(const MaterialMG& mat) {
    KinfSolution sol;
    const auto g = static_cast<std::size_t>(mat.groups);
    sol.flux.assign(g, 0.0);
    if (!mat.fissile())
        return sol; // k = 0 by convention

    // Balance: (diag(sigma_t) - S^T) y = chi, with a single fission spectrum
    // the operator is rank one and k = nu_sigma_f . y.
    std::vector<double> m(g * g, 0.0);
    for (std::size_t to = 0; to < g; ++to) {
        m[to * g + to] = mat.sigma_t[to];
        for (std::size_t from = 0; from < g; ++from)
            m[to * g + from] -= mat.sigma_s[from * g + to];
    }
    std::vector<double> y = solve_dense(std::move(m), mat.chi);
    double k = 0.0;
    for (std::size_t i = 0; i < g; ++i)
        k += mat.nu_sigma_f[i] * y[i];
    sol.k = k;

    double norm = std::accumulate(y.begin(), y.end(), 0.0);
    if (norm > 0.0)
        for (std::size_t i = 0; i < g; ++i)
            sol.flux[i] = y[i] / norm;
    return sol;
}

std::string format_keff(double mean, double std_dev, int decimals) {
    char buf[64];
    const double scale = std::pow(10.0, decimals);
    const auto units = static_cast<long long>(std::llround(std_dev * scale));
    std::snprintf(buf, sizeof buf, "%.*f (%lld)", decimals, mean, units);
    return buf;
}

} // namespace sortmc::mc
