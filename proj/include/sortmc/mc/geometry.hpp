// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace sortmc::mc {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

enum class BoundaryCondition { Reflective, Vacuum };

/// Concentric spherical shells around the origin (cell i lies between
/// radii[i-1] and radii[i]), or a single-cell infinite medium.
class Geometry {
public:
    static Geometry infinite_medium();
    /// radii strictly increasing; throws std::invalid_argument otherwise.
    static Geometry concentric_spheres(std::vector<double> radii, BoundaryCondition outer_bc);

    bool is_infinite() const { return infinite_; }
    int cell_count() const { return infinite_ ? 1 : static_cast<int>(radii_.size()); }
    BoundaryCondition outer_bc() const { return outer_bc_; }
    const std::vector<double>& radii() const { return radii_; }
    double outer_radius() const { return radii_.back(); }

    /// Cell containing the point; -1 when outside the outermost sphere.
    int locate(const Vec3& p) const;

    struct Crossing {
        double distance = std::numeric_limits<double>::infinity();
        int next_cell = 0;         // valid when !outer_boundary
        bool outer_boundary = false;
        double surface_radius = 0; // radius of the surface being crossed
    };

    /// Nearest shell surface from pos along dir (unit) within `cell`.
    /// Infinite geometry never reports a crossing.
    Crossing next_boundary(const Vec3& pos, const Vec3& dir, int cell) const;

private:
    bool infinite_ = false;
    std::vector<double> radii_;
    BoundaryCondition outer_bc_ = BoundaryCondition::Vacuum;
};

/// Specular reflection about the sphere normal at p (unit direction in,
/// unit direction out).
Vec3 reflect_at_sphere(const Vec3& p, const Vec3& dir);

} // namespace sortmc::mc
