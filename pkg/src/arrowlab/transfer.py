"""Frobenius-Perron operators for the Renyi and baker maps on grid densities,
exact set image/counterimage enumeration, and convergence-mode classification
(Cesaro / weak / strong).

All set operations are integer arithmetic on cell indices; there is no
floating-point set geometry anywhere in this module.
"""

from __future__ import annotations

import numpy as np

from .grids import Density, GridSet, GridMismatchError, on_common_grid
from .maps import MapSpec


# ---------------------------------------------------------------------------
# density evolution
# ---------------------------------------------------------------------------

def fp_renyi(d: Density, base: int | None = None) -> Density:
    """One transfer-operator step for the beta-adic shift.

    (U rho)(x) = (1/b) sum_r rho((x+r)/b); exact on the grid.  The result is
    constant on level-(k-1) cells and is returned replicated at level k.
    """
    if d.dims != 1:
        raise ValueError("fp_renyi needs a 1D density")
    b = d.base if base is None else base
    if b != d.base:
        raise GridMismatchError("map base must match the grid base")
    k = d.levels[0]
    if k < 1:
        raise ValueError("level-0 grid cannot resolve preimages")
    n = b ** k
    j = np.arange(n)
    out = np.zeros(n)
    for r in range(b):
        out += d.values[(j + r * n) // b]
    return Density(b, out / b, normalize=False)


def fp_baker(d: Density, base: int | None = None) -> Density:
    """One baker transfer-operator step: exact cell rearrangement.

    A density on an (kx, ky) grid maps onto the (kx-1, ky+1) grid with the
    same number of equal-volume cells; values are carried over unchanged
    (the map preserves Lebesgue measure), so every L^p norm is conserved
    exactly.  The x-axis is refined first if kx < 1.
    """
    if d.dims != 2:
        raise ValueError("fp_baker needs a 2D density")
    b = d.base if base is None else base
    if b != d.base:
        raise GridMismatchError("map base must match the grid base")
    if d.levels[0] < 1:
        d = d.refined(axis=0)
    kx, ky = d.levels
    nx, ny = d.values.shape
    # cell (i, j) -> (i - r*b^(kx-1), j + r*b^ky) with r = i // b^(kx-1)
    i = np.arange(nx)[:, None]
    j = np.arange(ny)[None, :]
    r = i // (nx // b)
    new_i = i - r * (nx // b)
    new_j = j + r * ny
    out = np.zeros((nx // b, ny * b))
    out[new_i, new_j] = d.values
    return Density(b, out, normalize=False)


def fp_step(spec: MapSpec, d: Density) -> Density:
    return fp_renyi(d) if spec.kind == "renyi" else fp_baker(d)


def fp_iterate(spec: MapSpec, d: Density, t: int) -> Density:
    if spec.kind == "baker" and d.levels[0] < t:
        d = d.refined(axis=0, extra_levels=t - d.levels[0])
    for _ in range(t):
        d = fp_step(spec, d)
    return d


# ---------------------------------------------------------------------------
# exact set dynamics
# ---------------------------------------------------------------------------

def preimage_set(spec: MapSpec, a: GridSet) -> GridSet:
    """S^-1(A), exactly representable one level finer."""
    b = spec.base
    if spec.kind == "renyi":
        n = a.member.size
        # level-(k+1) cell c maps onto level-k cell c mod b^k
        img = np.arange(n * b) % n
        return GridSet(b, a.member[img])
    # baker: B^-1 maps (kx, ky) cells onto (kx+1, ky-1) cells; refine y first
    # if needed so ky >= 1.
    if a.levels[1] < 1:
        a = a.refined(axis=1)
    nx, ny = a.member.shape
    out = np.zeros((nx * b, ny // b), dtype=bool)
    i = np.arange(nx)[:, None]
    j = np.arange(ny)[None, :]
    s = j // (ny // b)
    new_j = j - s * (ny // b)
    new_i = i + s * nx
    out[new_i, new_j] = a.member
    return GridSet(b, out)


def image_set(spec: MapSpec, a: GridSet) -> GridSet:
    """S(A) by exact forward cell enumeration."""
    b = spec.base
    if spec.kind == "renyi":
        n = a.member.size
        if n == 1:
            return a
        out = np.zeros(n // b, dtype=bool)
        idx = np.arange(n) % (n // b)
        np.logical_or.at(out, idx, a.member)
        return GridSet(b, out)
    if a.levels[0] < 1:
        a = a.refined(axis=0)
    nx, ny = a.member.shape
    i = np.arange(nx)[:, None]
    j = np.arange(ny)[None, :]
    r = i // (nx // b)
    out = np.zeros((nx // b, ny * b), dtype=bool)
    out[i - r * (nx // b), j + r * ny] = a.member
    return GridSet(b, out)


def image_measure(spec: MapSpec, a: GridSet, t: int) -> float:
    """Lebesgue measure of S^t(A)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    for _ in range(t):
        a = image_set(spec, a)
    return float(a.volume())


def counterimage_measure(spec: MapSpec, a: GridSet, t: int) -> float:
    """Lebesgue measure of S^-t(A); equals measure(A) for these maps."""
    for _ in range(t):
        a = preimage_set(spec, a)
    return float(a.volume())


def correlation(a: GridSet, b_set: GridSet, spec: MapSpec, t: int) -> float:
    """Mixing correlation mu(A cap S^-t(B)) - mu(A) mu(B), exactly."""
    pre = b_set
    for _ in range(t):
        pre = preimage_set(spec, pre)
    am, pm = on_common_grid(a.member, pre.member, spec.base)
    joint = float(np.logical_and(am, pm).mean())
    return joint - a.volume() * b_set.volume()


# ---------------------------------------------------------------------------
# pairings and convergence
# ---------------------------------------------------------------------------

def weak_pairing(d: Density, g: np.ndarray) -> float:
    """(rho, g) = integral of rho*g; g given as cell values on a matching grid."""
    g = np.asarray(g, dtype=float)
    dv, gv = on_common_grid(d.values, g, d.base)
    return float((dv * gv).mean())


def cesaro_average(spec: MapSpec, d: Density, g: np.ndarray, big_t: int) -> float:
    """(1/T) sum_{k<T} (P_k rho, g)."""
    if big_t < 1:
        raise ValueError("T must be >= 1")
    total = 0.0
    cur = d
    for k in range(big_t):
        total += weak_pairing(cur, g)
        if k < big_t - 1:
            cur = fp_step(spec, cur)
    return total / big_t


def fit_geometric(series: np.ndarray):
    """Least-squares geometric fit on the positive tail; returns (rate, r2)."""
    series = np.asarray(series, dtype=float)
    pos = series > 0
    if pos.sum() < 3:
        return (0.0, 0.0)
    t = np.arange(len(series))[pos]
    y = np.log(series[pos])
    slope, icept = np.polyfit(t, y, 1)
    resid = y - (slope * t + icept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return (float(np.exp(slope)), float(r2))


def classify_series(series: np.ndarray):
    """Convergence verdict for a non-negative deviation series.

    Constant to 1e-12 total variation -> not convergent; otherwise a geometric
    fit on the last half must have R^2 > 0.99 and rate < 1.
    """
    series = np.asarray(series, dtype=float)
    if series.max() - series.min() < 1e-12:
        converged = bool(series.max() < 1e-12)
        return {"verdict": converged, "rate": 1.0 if not converged else 0.0,
                "r2": 1.0, "constant": True}
    if series[-1] < 1e-12:
        # decayed to exactly zero in finitely many steps
        rate, _ = fit_geometric(series)
        return {"verdict": True, "rate": rate, "r2": 1.0, "constant": False}
    tail = series[len(series) // 2:]
    rate, r2 = fit_geometric(tail)
    return {"verdict": bool(r2 > 0.99 and rate < 1.0), "rate": rate,
            "r2": r2, "constant": False}


def convergence_report(spec: MapSpec, d: Density, probes, t_max: int):
    """Cesaro / weak / strong convergence classification with fitted rates."""
    if t_max < 4:
        raise ValueError("t_max must be >= 4")
    if spec.kind == "baker" and d.levels[0] < t_max:
        d = d.refined(axis=0, extra_levels=t_max - d.levels[0])
    probes = [np.asarray(g, dtype=float) for g in probes]
    means = [float(np.mean(g)) for g in probes]

    weak_dev, strong_dev, pairings = [], [], []
    cur = d
    for t in range(t_max + 1):
        pr = [weak_pairing(cur, g) for g in probes]
        pairings.append(pr)
        weak_dev.append(max(abs(p - m) for p, m in zip(pr, means)))
        strong_dev.append(float(np.abs(cur.values - 1.0).mean()))
        if t < t_max:
            cur = fp_step(spec, cur)
    pairings = np.array(pairings)
    cesaro_dev = [
        max(abs(pairings[: t + 1, i].mean() - means[i]) for i in range(len(probes)))
        for t in range(t_max + 1)
    ]
    return {
        "cesaro": classify_series(np.array(cesaro_dev)),
        "weak": classify_series(np.array(weak_dev)),
        "strong": classify_series(np.array(strong_dev)),
        "series": {
            "weak": list(map(float, weak_dev)),
            "strong": list(map(float, strong_dev)),
            "cesaro": list(map(float, cesaro_dev)),
        },
    }
