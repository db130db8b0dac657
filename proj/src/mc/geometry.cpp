// SPDX-License-Identifier: Apache-2.0

#include "sortmc/mc/geometry.hpp"

#include <stdexcept>

namespace sortmc::mc {

Geometry Geometry::infinite_medium() {
    Geometry g;
    g.infinite_ = true;
    return g;
}

Geometry Geometry::concentric_spheres(std::vector<double> radii, BoundaryCondition outer_bc) {
    if (radii.empty())
        throw std::invalid_argument("Geometry: at least one shell radius required");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] <= 0.0)
            throw std::invalid_argument("Geometry: radii must be positive");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw std::invalid_argument("Geometry: radii must be strictly increasing");
    }
    Geometry g;
    g.radii_ = std::move(radii);
    g.outer_bc_ = outer_bc;
    return g;
}

int Geometry::locate(const Vec3& p) const {
    if (infinite_)
        return 0;
    const double r = norm(p);
    for (std::size_t i = 0; i < radii_.size(); ++i)
        if (r <= radii_[i] * (1.0 + 1e-12))
            return static_cast<int>(i);
    return -1;
}

Geometry::Crossing Geometry::next_boundary(const Vec3& pos, const Vec3& dir, int cell) const {
    Crossing crossing;
    if (infinite_)
        return crossing;

    const double b = dot(pos, dir);
    const double r2 = dot(pos, pos);

    // Inward surface first: reachable only when heading towards the origin.
    if (cell > 0 && b < 0.0) {
        const double rin = radii_[static_cast<std::size_t>(cell) - 1];
        const double disc = b * b - (r2 - rin * rin);
        if (disc >= 0.0) {
            const double t = -b - std::sqrt(disc);
            if (t >= 0.0) {
                crossing.distance = t;
                crossing.next_cell = cell - 1;
                crossing.surface_radius = rin;
                return crossing;
            }
        }
    }

    const double rout = radii_[static_cast<std::size_t>(cell)];
    const double disc = b * b - (r2 - rout * rout);
    if (disc < 0.0)
        return crossing; // numerically outside; caller treats inf as lost
    const double t = -b + std::sqrt(disc);
    if (t < 0.0)
        return crossing;
    crossing.distance = t;
    crossing.surface_radius = rout;
    if (static_cast<std::size_t>(cell) + 1 < radii_.size())
        crossing.next_cell = cell + 1;
    else
        crossing.outer_boundary = true;
    return crossing;
}

Vec3 reflect_at_sphere(const Vec3& p, const Vec3& dir) {
    const double r = norm(p);
    const Vec3 n{p.x / r, p.y / r, p.z / r};
    const double d = dot(dir, n);
    Vec3 out = dir - n * (2.0 * d);
    const double len = norm(out);
    return {out.x / len, out.y / len, out.z / len};
}

} // namespace sortmc::mc
