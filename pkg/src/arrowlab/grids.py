"""Piecewise-constant densities on beta-adic grids, measures, Markov kernels,
and coarse-graining projectors.

The phase space is [0,1) (1D) or the unit square (2D), total volume 1.
Densities store per-cell values; measures multiply by cell volume.  2D grids
may be anisotropic (different refinement level per axis) because the baker
dynamics trades x-resolution for y-resolution one level per step.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


class GridMismatchError(ValueError):
    pass


class TrivialPartitionError(ValueError):
    pass


def _check_level(n: int, base: int) -> int:
    """Return k such that base**k == n, or raise."""
    k = 0
    m = 1
    while m < n:
        m *= base
        k += 1
    if m != n:
        raise ValueError(f"array size {n} is not a power of base {base}")
    return k


@dataclass(frozen=True)
class Density:
    """Non-negative piecewise-constant probability density on a beta-adic grid.

    values has shape (base**kx,) in 1D or (base**kx, base**ky) in 2D.
    """

    base: int
    values: np.ndarray
    normalize: bool = True

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        v = np.asarray(self.values, dtype=float)
        if v.ndim not in (1, 2):
            raise ValueError("values must be 1D or 2D")
        if np.any(v < 0):
            raise ValueError("density values must be non-negative")
        for n in v.shape:
            _check_level(n, self.base)
        if self.normalize:
            total = v.mean()  # sum(v)*cell_volume, cell_volume = 1/size
            if total <= 0:
                raise ValueError("cannot normalize an all-zero density")
            v = v / total
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def levels(self) -> tuple:
        return tuple(_check_level(n, self.base) for n in self.values.shape)

    @property
    def level(self) -> int:
        ks = self.levels
        if len(set(ks)) != 1:
            raise ValueError(f"anisotropic grid {ks} has no single level")
        return ks[0]

    @property
    def cell_volume(self) -> float:
        return 1.0 / self.values.size

    def refined(self, axis: int = 0, extra_levels: int = 1) -> "Density":
        """Exactly refine the grid along one axis (values replicated)."""
        v = np.repeat(self.values, self.base ** extra_levels, axis=axis)
        return Density(self.base, v, normalize=False)

    def marginal_x(self) -> "Density":
        """Integrate out y; exact for 2D grid densities."""
        if self.dims != 2:
            raise ValueError("marginal_x needs a 2D density")
        return Density(self.base, self.values.mean(axis=1), normalize=False)


def uniform_density(base: int, level: int, dims: int = 1) -> Density:
    shape = (base ** level,) * dims
    return Density(base, np.ones(shape), normalize=False)


@dataclass(frozen=True)
class GridSet:
    """Boolean membership on a beta-adic grid; pairs with a Density grid."""

    base: int
    member: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.member, dtype=bool)
        for n in m.shape:
            _check_level(n, self.base)
        m.setflags(write=False)
        object.__setattr__(self, "member", m)

    @property
    def dims(self) -> int:
        return self.member.ndim

    @property
    def levels(self) -> tuple:
        return tuple(_check_level(n, self.base) for n in self.member.shape)

    @property
    def cell_volume(self) -> float:
        return 1.0 / self.member.size

    def volume(self) -> float:
        """Lebesgue measure of the set."""
        return self.member.mean()

    def refined(self, axis: int = 0, extra_levels: int = 1) -> "GridSet":
        return GridSet(self.base, np.repeat(self.member, self.base ** extra_levels, axis=axis))

    def complement(self) -> "GridSet":
        return GridSet(self.base, ~self.member)


def interval_set(base: int, level: int, lo_cell: int, hi_cell: int) -> GridSet:
    """Cells lo_cell..hi_cell-1 at the given level (half-open interval)."""
    m = np.zeros(base ** level, dtype=bool)
    m[lo_cell:hi_cell] = True
    return GridSet(base, m)


def _common_shape(a_shape, b_shape, base):
    """Refinement factors taking each array to the least common grid."""
    facs_a, facs_b = [], []
    for na, nb in zip(a_shape, b_shape):
        n = max(na, nb)
        if n % na or n % nb:
            raise GridMismatchError(f"incompatible grid sizes {na} vs {nb}")
        facs_a.append(n // na)
        facs_b.append(n // nb)
    return facs_a, facs_b


def _refine_to(arr: np.ndarray, facs) -> np.ndarray:
    for ax, f in enumerate(facs):
        if f > 1:
            arr = np.repeat(arr, f, axis=ax)
    return arr


def on_common_grid(a: np.ndarray, b: np.ndarray, base: int):
    """Replicate both arrays onto their least common refinement."""
    if a.ndim != b.ndim:
        raise GridMismatchError("dimension mismatch")
    fa, fb = _common_shape(a.shape, b.shape, base)
    return _refine_to(a, fa), _refine_to(b, fb)


def l1_norm(d: Density) -> float:
    """Integral of |density| over the space."""
    return float(np.abs(d.values).mean())


def measure_of_set(d: Density, a: GridSet) -> float:
    """Probability mass the density assigns to the set."""
    if d.base != a.base:
        raise GridMismatchError("base mismatch")
    dv, am = on_common_grid(d.values, a.member, d.base)
    return float(np.where(am, dv, 0.0).mean())


@dataclass(frozen=True)
class StochasticKernel:
    """Column-stochastic transition matrix acting on cell-value vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("kernel must be a square matrix")
        if np.any(m < 0):
            raise ValueError("kernel entries must be non-negative")
        if not np.allclose(m.sum(axis=0), 1.0, atol=1e-10):
            raise ValueError("kernel columns must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def apply_markov(k: StochasticKernel, d: Density) -> Density:
    """Advance a density one step under the kernel; norm-preserving."""
    v = d.values
    if v.ndim != 1 or v.size != k.n:
        raise GridMismatchError("kernel size does not match grid")
    return Density(d.base, k.matrix @ v, normalize=False)


def apply_kernel_signed(k: StochasticKernel, values: np.ndarray) -> np.ndarray:
    """Apply the kernel to a signed grid function (contractivity checks only)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size != k.n:
        raise GridMismatchError("kernel size does not match grid")
    return k.matrix @ values


@dataclass(frozen=True)
class Partition:
    """Disjoint grid sets covering the space, all with positive measure."""

    cells: tuple

    def __post_init__(self):
        cells = tuple(self.cells)
        if len(cells) < 2:
            raise TrivialPartitionError("partition needs at least two cells")
        base = cells[0].base
        ms = [c.member for c in cells]
        ref = [on_common_grid(m, ms[0], base)[0] for m in ms]
        count = np.zeros_like(ref[0], dtype=int)
        for m in ref:
            if not m.any():
                raise TrivialPartitionError("partition cell has zero measure")
            count += m.astype(int)
        if np.any(count != 1):
            raise ValueError("partition cells must be disjoint and cover the space")
        object.__setattr__(self, "cells", cells)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.volume() for c in self.cells])


def square_partition(base: int, level: int, dims: int = 1) -> Partition:
    """The full beta-adic grid of the given level as a partition."""
    n = base ** level
    cells = []
    if dims == 1:
        for i in range(n):
            m = np.zeros(n, dtype=bool)
            m[i] = True
            cells.append(GridSet(base, m))
    else:
        for i in range(n):
            for j in range(n):
                m = np.zeros((n, n), dtype=bool)
                m[i, j] = True
                cells.append(GridSet(base, m))
    return Partition(tuple(cells))


def coarse_grain(d: Density, p: Partition) -> Density:
    """Project the density onto its per-cell averages (idempotent)."""
    shapes = {c.member.shape for c in p.cells} | {d.values.shape}
    # everything onto the least common grid
    out = None
    dv = d.values
    for c in p.cells:
        dvv, mm = on_common_grid(dv, c.member, d.base)
        if out is None:
            out = np.zeros_like(dvv)
        elif out.shape != dvv.shape:
            out, _ = on_common_grid(out, dvv, d.base)
        avg = dvv[mm].mean()
        out = np.where(mm, avg, out)
    return Density(d.base, out, normalize=False)


def coarse_values(d: Density, p: Partition) -> np.ndarray:
    """Per-partition-cell averages of the density."""
    vals = []
    for c in p.cells:
        dvv, mm = on_common_grid(d.values, c.member, d.base)
        vals.append(dvv[mm].mean())
    return np.array(vals)


def density_to_csv(d: Density) -> str:
    """Serialize: header `dims,base,level`, then `cell_index,value` rows."""
    buf = io.StringIO()
    levels = d.levels
    lvl = levels[0] if len(set(levels)) == 1 else max(levels)
    buf.write("dims,base,level\n")
    buf.write(f"{d.dims},{d.base},{lvl}\n")
    buf.write("cell_index,value\n")
    for i, v in enumerate(d.values.ravel()):
        buf.write(f"{i},{float(v)!r}\n")
    return buf.getvalue()


def density_from_csv(text: str) -> Density:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    dims, base, level = (int(x) for x in lines[1].split(","))
    vals = np.array([float(ln.split(",")[1]) for ln in lines[3:]])
    if dims == 2:
        n = base ** level
        vals = vals.reshape(n, n)
    return Density(base, vals, normalize=False)
