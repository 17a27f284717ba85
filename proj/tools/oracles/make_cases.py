#!/usr/bin/env python3
"""Regenerates tests/oracles/cases.json from independent reference computations.

Each case is evaluated by the C++ harness (ptess_oracles) against the library.
The reference values here never call into the library:

* delaunay_cells: brute-force enumeration over all d-subsets in exact rational
  arithmetic; a subset is a cell when its power-equal point gives every other
  point a strictly larger power.
* alpha_hat: 2-D quadrature of |y1 - y2|^(nu+1) exp(-(y1^2 + y2^2) / 2).
* volume_moment / importance_moment: Monte Carlo over i.i.d. Gaussian
  simplices (numpy), with the weighted moments as self-normalized ratios; the
  second family reruns the library's own sampler, so both sides carry an error.

Usage: make_cases.py [OUTPUT]   (default: tests/oracles/cases.json next to this repo)
"""

import itertools
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate

GENERATOR = "tools/oracles/make_cases.py"


def power_equal_point(pts):
    """Solve pow(w, p_i) = r for all i; pts are (v, h) with Fraction entries. None if singular."""
    m = len(pts[0][0])
    p0 = pts[0]
    # pow_i - pow_0 = -2 w.(v_i - v_0) + |v_i|^2 - |v_0|^2 + h_i - h_0 = 0
    rows, rhs = [], []
    for v, h in pts[1:]:
        rows.append([2 * (v[k] - p0[0][k]) for k in range(m)])
        rhs.append(sum(x * x for x in v) - sum(x * x for x in p0[0]) + h - p0[1])
    # Gauss-Jordan over the rationals.
    a = [row[:] + [b] for row, b in zip(rows, rhs)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    w = [a[k][m] / a[k][k] for k in range(m)]
    return w


def power(w, p):
    v, h = p
    return sum((wi - vi) ** 2 for wi, vi in zip(w, v)) + h


def brute_force_cells(points, d):
    exact = [([Fraction(x) for x in p[:-1]], Fraction(p[-1])) for p in points]
    cells = []
    for subset in itertools.combinations(range(len(points)), d):
        w = power_equal_point([exact[i] for i in subset])
        if w is None:
            continue
        r = power(w, exact[subset[0]])
        if all(power(w, exact[j]) > r for j in range(len(points)) if j not in subset):
            cells.append(list(subset))
    return sorted(cells)


def triangulation_cases(rng):
    cases = []
    for d in (2, 3):
        for k in range(40):
            n = rng.randint(d, 10)
            pts = []
            for _ in range(n):
                v = [round(rng.uniform(-1, 1), 6) for _ in range(d - 1)]
                h = round(rng.uniform(-0.6, 0.6), 6)
                pts.append(v + [h])
            cases.append({
                "id": f"delaunay_d{d}_{k:02d}",
                "family": "delaunay_cells",
                "provenance": "DERIVED",
                "oracle": "brute-force empty-region enumeration over all d-subsets, exact rationals",
                "inputs": {"d": d, "points": pts},
                "expected": brute_force_cells(pts, d),
                "tolerance": {"kind": "exact", "value": 0},
            })
    return cases


def alpha_hat_cases():
    cases = []
    for nu in (-1.0, 0.0, 1.0, 2.0):
        f = lambda y2, y1: abs(y1 - y2) ** (nu + 1) * math.exp(-(y1 * y1 + y2 * y2) / 2)
        # Split the inner integral at the kink y2 = y1.
        below, _ = integrate.dblquad(f, -np.inf, np.inf, lambda y1: -np.inf, lambda y1: y1, epsabs=1e-13, epsrel=1e-12)
        above, _ = integrate.dblquad(f, -np.inf, np.inf, lambda y1: y1, lambda y1: np.inf, epsabs=1e-13, epsrel=1e-12)
        cases.append({
            "id": f"alpha_hat_d2_nu{nu:+g}",
            "family": "alpha_hat",
            "provenance": "DERIVED",
            "oracle": "scipy dblquad of the unnormalized density over R^2, split at y1 = y2",
            "inputs": {"d": 2, "nu": nu},
            "expected": 1.0 / (below + above),
            "tolerance": {"kind": "rel", "value": 1e-7},
        })
    return cases


def gaussian_simplex_volumes(d, n, rng):
    m = d - 1
    y = rng.standard_normal((n, d, m))
    edges = y[:, 1:, :] - y[:, :1, :]
    return np.abs(np.linalg.det(edges)) / math.factorial(m)


def moment_mc_cases():
    cases = []
    rng = np.random.default_rng(20240611)
    n = 2_000_000
    for d in (2, 3, 4):
        vol = gaussian_simplex_volumes(d, n, rng)
        for nu in (-1.0, 0.0, 1.0):
            for s in (1.0, 2.0):
                w = vol ** (nu + 1)
                num = w * vol ** s
                a, b = num.mean(), w.mean()
                ratio = a / b
                # Delta method for a ratio of means.
                cov = np.cov(num, w)
                var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]) / (n * b * b)
                cases.append({
                    "id": f"moment_mc_d{d}_nu{nu:+g}_s{s:g}",
                    "family": "volume_moment",
                    "provenance": "DERIVED",
                    "oracle": f"numpy Monte Carlo, {n} i.i.d. Gaussian simplices, self-normalized weights",
                    "inputs": {"d": d, "nu": nu, "s": s},
                    "expected": {"value": float(ratio), "std_error": float(math.sqrt(var))},
                    "tolerance": {"kind": "se", "value": 4.0},
                })
                if d >= 3 and nu >= 0 and s == 1.0:
                    # Same reference, checked against the library's own sampler at runtime.
                    cases.append({
                        "id": f"importance_mc_d{d}_nu{nu:+g}_s{s:g}",
                        "family": "importance_moment",
                        "provenance": "DERIVED",
                        "oracle": f"numpy Monte Carlo, {n} i.i.d. Gaussian simplices, self-normalized weights",
                        "inputs": {"d": d, "nu": nu, "s": s, "n": 1_000_000, "seed": 97 + d},
                        "expected": {"value": float(ratio), "std_error": float(math.sqrt(var))},
                        "tolerance": {"kind": "se", "value": 4.0},
                    })
    return cases


def fixed_cases():
    sqrt3 = math.sqrt(3.0)
    return [
        {"id": "moment_d2_nu-1_s2", "family": "volume_moment", "provenance": "REFERENCE",
         "oracle": "stated special value", "inputs": {"d": 2, "nu": -1.0, "s": 2.0}, "expected": 2.0,
         "tolerance": {"kind": "rel", "value": 1e-12}},
        {"id": "moment_d3_nu0_s2", "family": "volume_moment", "provenance": "REFERENCE",
         "oracle": "stated special value", "inputs": {"d": 3, "nu": 0.0, "s": 2.0}, "expected": 4.5,
         "tolerance": {"kind": "rel", "value": 1e-12}},
        {"id": "moment_s0_is_one", "family": "volume_moment", "provenance": "TRIVIAL",
         "oracle": "zeroth moment of a probability law", "inputs": {"d": 4, "nu": 1.0, "s": 0.0},
         "expected": 1.0, "tolerance": {"kind": "rel", "value": 1e-14}},
        {"id": "face_intensities_d3", "family": "face_intensities", "provenance": "REFERENCE",
         "oracle": "stated planar intensities", "inputs": {"d": 3},
         "expected": [1 / (2 * sqrt3), 3 / (2 * sqrt3), 1 / sqrt3], "tolerance": {"kind": "rel", "value": 1e-12}},
        {"id": "regular_triangle_angle_sums", "family": "regular_angle_sums", "provenance": "TRIVIAL",
         "oracle": "angles of an equilateral triangle", "inputs": {"d": 3}, "expected": [0.5, 1.5, 1.0],
         "tolerance": {"kind": "rel", "value": 1e-12}},
    ]


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "tests/oracles/cases.json"
    rng = random.Random(7)
    cases = fixed_cases() + alpha_hat_cases() + triangulation_cases(rng) + moment_mc_cases()
    out.write_text(json.dumps({"generator": GENERATOR, "cases": cases}, indent=1) + "\n")
    print(f"wrote {len(cases)} cases to {out}")


if __name__ == "__main__":
    main()
