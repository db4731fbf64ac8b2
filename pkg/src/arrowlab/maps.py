"""Point dynamics: Renyi (beta-adic shift) and baker maps, the baker-to-Renyi
factor projection, classical time reversal, and recurrence statistics.

Float orbits of x -> beta*x mod 1 collapse after ~53 steps in binary, so the
orbit utilities also run in exact rational arithmetic (Fraction), where the
map is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class MapSpec:
    kind: str  # "renyi" or "baker"
    base: int = 2

    def __post_init__(self):
        if self.kind not in ("renyi", "baker"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.base < 2:
            raise ValueError("base must be >= 2")


def renyi_step(x, base: int):
    """One step of multiplication by `base` modulo 1; exact on Fractions."""
    if not (0 <= x < 1):
        raise ValueError("x must lie in [0,1)")
    return (base * x) % 1


def baker_step(p, base: int):
    """Squeeze-stack baker step: (x,y) -> (b x - r, (y + r)/b), r = floor(b x)."""
    x, y = p
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("point must lie in the unit square")
    r = int(base * x)
    return (base * x - r, (y + r) / base)


def baker_inverse_step(p, base: int):
    """Inverse baker step: (x,y) -> ((x + s)/b, b y - s), s = floor(b y)."""
    x, y = p
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("point must lie in the unit square")
    s = int(base * y)
    return ((x + s) / base, base * y - s)


def factor_project(p):
    """Project a baker phase point onto the Renyi factor (the x coordinate)."""
    return p[0]


def time_reverse(p):
    """Velocity inversion (q, p) -> (q, -p); an involution."""
    q, mom = p
    return (q, -mom)


def orbit(x0, spec: MapSpec, n_steps: int):
    """Forward orbit [x0, S x0, ..., S^n x0]; exact if x0 is rational."""
    pts = [x0]
    x = x0
    for _ in range(n_steps):
        if spec.kind == "renyi":
            x = renyi_step(x, spec.base)
        else:
            x = baker_step(x, spec.base)
        pts.append(x)
    return pts


# ---------------------------------------------------------------------------
# toy reversible flow: harmonic oscillator with leapfrog
# ---------------------------------------------------------------------------

def _leapfrog(q, p, omega, t, dt):
    """Integrate H = p^2/2 + omega^2 q^2/2 with the (time-reversible) leapfrog."""
    n = int(round(abs(t) / dt))
    h = dt if t >= 0 else -dt
    w2 = omega * omega
    p = p - 0.5 * h * w2 * q
    for _ in range(n - 1):
        q = q + h * p
        p = p - h * w2 * q
    q = q + h * p
    p = p - 0.5 * h * w2 * q
    return q, p


def oscillator_flow(x0, omega: float, t: float, dt: float = 1e-3):
    q, p = x0
    if t == 0:
        return (q, p)
    return _leapfrog(q, p, omega, t, dt)


def reversibility_check(x0, omega: float = 1.0, t: float = 2 * np.pi,
                        dt: float = 1e-3):
    """Forward-reverse-forward-reverse round trip distance from x0.

    A time-reversible integrator returns to the initial point up to round-off.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t == 0:
        return 0.0
    p1 = oscillator_flow(x0, omega, t, dt)
    p2 = time_reverse(p1)
    p3 = oscillator_flow(p2, omega, t, dt)
    p4 = time_reverse(p3)
    return float(np.hypot(p4[0] - x0[0], p4[1] - x0[1]))


# ---------------------------------------------------------------------------
# recurrence statistics
# ---------------------------------------------------------------------------

def _random_fraction(rng, denom: int) -> Fraction:
    return Fraction(int(rng.integers(0, denom)), denom)


def recurrence_stats(spec: MapSpec, cells, level: int, n_samples: int,
                     max_t: int, seed: int = 0):
    """Fraction of points sampled in a beta-adic set that return by max_t.

    `cells` is a boolean membership array at `level` (1D for Renyi, 2D for
    baker).  Sampling and iteration use exact rationals with an odd prime
    denominator so long orbits do not collapse in floating point.
    """
    cells = np.asarray(cells, dtype=bool)
    if not cells.any():
        raise ValueError("recurrence set is empty")
    rng = np.random.default_rng(seed)
    denom = (1 << 61) - 1  # Mersenne prime, coprime to any reasonable base
    n_cells = spec.base ** level

    def in_set(pt):
        if spec.kind == "renyi":
            return bool(cells[int(pt * n_cells)])
        return bool(cells[int(pt[0] * n_cells), int(pt[1] * n_cells)])

    returned = np.zeros(max_t + 1)
    total = 0
    while total < n_samples:
        if spec.kind == "renyi":
            pt = _random_fraction(rng, denom)
        else:
            pt = (_random_fraction(rng, denom), _random_fraction(rng, denom))
        if not in_set(pt):
            continue
        total += 1
        x = pt
        for t in range(1, max_t + 1):
            x = renyi_step(x, spec.base) if spec.kind == "renyi" else baker_step(x, spec.base)
            if in_set(x):
                returned[t:] += 1
                break
    return {
        "n_samples": total,
        "seed": seed,
        "return_fraction": returned / total if total else returned,
    }
