#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generates data/synthetic_23g.lib.

Smooth, physically flavored 23-group microscopic data for the ten nuclides
of the bundled pebble composition: a 1/v-style absorption trend, a banded
downscatter matrix wider for light nuclides, and a fast fission spectrum.
The numbers are synthetic; their only job is to satisfy the library
invariants and give the transport mini-app realistic group coupling.
"""

import math
import os

G = 23

# (name, scatter_barns, absorption_thermal, downscatter_width,
#  fission_thermal, nu_thermal, in_band_retention)
NUCLIDES = [
    ("B-10", 2.2, 3840.0, 2, 0.0, 0.0, 0.80),
    ("B-11", 4.9, 0.005, 2, 0.0, 0.0, 0.80),
    ("C-12", 4.7, 0.0035, 3, 0.0, 0.0, 0.75),
    ("C-13", 4.2, 0.0014, 3, 0.0, 0.0, 0.75),
    ("O-16", 3.8, 0.00019, 3, 0.0, 0.0, 0.78),
    ("Si-28", 2.1, 0.17, 2, 0.0, 0.0, 0.85),
    ("Si-29", 2.2, 0.12, 2, 0.0, 0.0, 0.85),
    ("Si-30", 2.3, 0.11, 2, 0.0, 0.0, 0.85),
    ("U-235", 12.0, 99.0, 1, 585.0, 2.43, 0.92),
    ("U-238", 9.5, 2.7, 1, 0.0, 0.0, 0.92),
]


def one_over_v(g, thermal_value):
    # Lethargy-ish interpolation from a small fast value up to the thermal one.
    t = g / (G - 1)
    fast = max(thermal_value * 1e-3, 1e-5)
    return fast * (thermal_value / fast) ** (t ** 1.5)


def scatter_matrix(total_scatter, width, retention):
    rows = []
    for g in range(G):
        row = [0.0] * G
        targets = [gp for gp in range(g, min(G, g + width + 1))]
        if g == G - 1:
            row[g] = total_scatter
        else:
            row[g] = total_scatter * retention
            spill = total_scatter - row[g]
            weights = [0.5 ** i for i in range(1, len(targets))]
            wsum = sum(weights)
            for i, gp in enumerate(targets[1:]):
                row[gp] = spill * weights[i] / wsum
            if len(targets) == 1:
                row[g] = total_scatter
        rows.append(row)
    return rows


def chi_spectrum():
    # Fission emission concentrated in the fastest groups.
    raw = [math.exp(-g / 2.5) for g in range(G)]
    raw = [v if g < 8 else 0.0 for g, v in enumerate(raw)]
    total = sum(raw)
    chi = [v / total for v in raw]
    partial = 0.0
    for v in chi[:-1]:
        partial += v
    chi[-1] = 1.0 - partial
    return chi


def fmt(values):
    return " ".join("%.17g" % v for v in values)


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..", "data", "synthetic_23g.lib")
    lines = [
        "# Synthetic 23-group microscopic library; generated by tools/make_synthetic_lib.py.",
        "# Group 0 is fastest. Cross sections in barns.",
        "groups %d" % G,
        "",
    ]
    chi = chi_spectrum()
    for name, sc, ab_th, width, fis_th, nu_th, retention in NUCLIDES:
        sig_s = scatter_matrix(sc, width, retention)
        sig_a = [one_over_v(g, ab_th) for g in range(G)]
        sig_f = [one_over_v(g, fis_th) if fis_th > 0 else 0.0 for g in range(G)]
        if fis_th > 0:
            # keep a fast-fission floor so every group multiplies a little
            sig_f = [max(f, 0.02 * fis_th * 1e-3) for f in sig_f]
        nu = [nu_th + 0.2 * (1.0 - g / (G - 1)) if fis_th > 0 else 0.0 for g in range(G)]
        sig_t = [sum(sig_s[g]) + sig_a[g] + sig_f[g] for g in range(G)]

        lines.append("nuclide %s" % name)
        lines.append("sigma_t " + fmt(sig_t))
        lines.append("sigma_s " + " ".join(fmt(row) for row in sig_s))
        if fis_th > 0:
            lines.append("sigma_f " + fmt(sig_f))
            lines.append("nu " + fmt(nu))
            lines.append("chi " + fmt(chi))
        lines.append("")

    with open(out_path, "w") as f:
        f.write("\n".join(lines))
    print("wrote", os.path.normpath(out_path))


if __name__ == "__main__":
    main()
