"""Spectral decomposition of the beta-adic transfer operator on polynomials.

Bernoulli polynomials B_n are right eigenvectors, U B_n = beta^-n B_n; the
dual (left) functionals pick off boundary derivatives.  With rational
coefficients everything here is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np
import sympy


class Poly:
    """Polynomial with exact (Fraction) or float coefficients, low order first."""

    def __init__(self, coeffs):
        cs = list(coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, s):
        return Poly([s * c for c in self.coeffs])

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly([0 * self.coeffs[0]])
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def integral01(self):
        """Integral over [0,1]."""
        total = 0
        for i, c in enumerate(self.coeffs):
            total = total + Fraction(1, i + 1) * c if isinstance(c, (int, Fraction)) \
                else total + c / (i + 1)
        return total

    def compose_affine(self, a, b) -> "Poly":
        """p(a*x + b), exact for rational a, b."""
        out = Poly([0 * self.coeffs[0]])
        xpow = Poly([1]) if not isinstance(self.coeffs[0], Fraction) else Poly([Fraction(1)])
        lin = Poly([b, a])
        for c in self.coeffs:
            out = out + xpow.scaled(c)
            xpow = _poly_mul(xpow, lin)
        return out

    def as_floats(self) -> "Poly":
        return Poly([float(c) for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out = [0 * (p.coeffs[0] * q.coeffs[0])] * (p.degree + q.degree + 1)
    for i, a in enumerate(p.coeffs):
        for j, b in enumerate(q.coeffs):
            out[i + j] = out[i + j] + a * b
    return Poly(out)


def bernoulli_poly(n: int) -> Poly:
    """B_n(x) with exact rational coefficients (B_0 = 1, B_1 = x - 1/2, ...)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = sympy.symbols("x")
    expr = sympy.bernoulli(n, x)
    poly = sympy.Poly(expr, x)
    cs = [Fraction(0)] * (n + 1)
    for (k,), c in poly.terms():
        cs[k] = Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
    return Poly(cs)


def fp_poly(p: Poly, base: int) -> Poly:
    """Transfer operator on a polynomial: (1/b) sum_r p((x+r)/b), exact."""
    inv = Fraction(1, base)
    acc = None
    for r in range(base):
        term = p.compose_affine(inv, Fraction(r, base))
        acc = term if acc is None else acc + term
    return acc.scaled(inv)


def left_functional(n: int, p: Poly):
    """Dual pairing (B~_n, p): integral for n=0, boundary jump of the
    (n-1)-th derivative over n! for n >= 1."""
    if n == 0:
        return p.integral01()
    q = p
    for _ in range(n - 1):
        q = q.derivative()
    return Fraction(q(1) - q(0), 1) / factorial(n) if isinstance(q(1), (int, Fraction)) \
        else (q(1) - q(0)) / factorial(n)


def expand(p: Poly, n_max: int | None = None):
    """Coefficients c_n with p = sum c_n B_n; exact for rational p."""
    if n_max is None:
        n_max = p.degree
    return [left_functional(n, p) for n in range(n_max + 1)]


def reconstruct(coeffs) -> Poly:
    out = Poly([Fraction(0)])
    for n, c in enumerate(coeffs):
        out = out + bernoulli_poly(n).scaled(c)
    return out


def evolve_spectral(p: Poly, base: int, t: int) -> Poly:
    """U^t p via the eigenbasis: c_n -> beta^-nt c_n."""
    cs = expand(p)
    scaled = [c * Fraction(1, base ** (n * t)) if isinstance(c, (int, Fraction))
              else c / base ** (n * t) for n, c in enumerate(cs)]
    return reconstruct(scaled)


def decompose_equilibrium(p: Poly):
    """Split p into its invariant part (the mean) and the decaying remainder."""
    mean = p.integral01()
    decaying = p - Poly([mean])
    return Poly([mean]), decaying


def biorthonormality_matrix(n_max: int):
    """Gram matrix (B~_m, B_n); the identity when all is well."""
    out = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        bn = bernoulli_poly(n)
        for m in range(n_max + 1):
            out[m, n] = float(left_functional(m, bn))
    return out


def sample_poly(p: Poly, base: int, level: int) -> np.ndarray:
    """Cell averages of p on the beta-adic grid (exact integrals per cell)."""
    n = base ** level
    # average over cell = (P(x_{i+1}) - P(x_i)) * n with P the antiderivative
    cs = [0.0] + [float(c) / (i + 1) for i, c in enumerate(p.coeffs)]
    big = Poly(cs)
    edges = np.arange(n + 1) / n
    vals = np.array([big(e) for e in edges])
    return (vals[1:] - vals[:-1]) * n


def basis_table(n_max: int, n_points: int = 101) -> str:
    """CSV: x plus B_0..B_n sampled on a uniform grid."""
    xs = np.linspace(0.0, 1.0, n_points)
    polys = [bernoulli_poly(n).as_floats() for n in range(n_max + 1)]
    lines = ["x," + ",".join(f"B{n}" for n in range(n_max + 1))]
    for x in xs:
        lines.append(",".join([repr(float(x))] + [repr(float(p(x))) for p in polys]))
    return "\n".join(lines) + "\n"
