"""Friedrichs resonance model: the resolvent function alpha(z), its
second-sheet zero (the resonance pole), survival probability by two
independent routes, mixed-state decay splits, the thermal many-mode state,
the Lambda-trace Lyapunov functional, and biorthogonal trace/energy checks.

Conventions: hbar = 1, continuum on [0, omega_max], default form factor
g(omega) = exp(-omega/2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate


def _default_g(w):
    return np.exp(-np.asarray(w) / 2.0)


@dataclass
class FriedrichsModel:
    omega1: float = 1.0
    lam: float = 0.1
    g: callable = field(default=_default_g)
    omega_max: float | None = None

    def __post_init__(self):
        if self.omega1 <= 0:
            raise ValueError("omega1 must be positive")
        if self.omega_max is None:
            self.omega_max = 20.0 * self.omega1

    def g2(self, w):
        return np.asarray(self.g(w)) ** 2


@dataclass
class ResonancePole:
    beta1: float
    gamma1: float
    residual: float

    @property
    def z(self) -> complex:
        return self.beta1 - 0.5j * self.gamma1


# ---------------------------------------------------------------------------
# the resolvent function alpha
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(400)


def _cauchy_integral(z: complex, model: FriedrichsModel) -> complex:
    """integral_0^W g^2(u)/(z-u) du for z off the real cut.

    Singularity subtraction keeps the quadrature uniformly accurate even for
    z within machine epsilon of the cut: the subtracted integrand is smooth
    and the pole term integrates to g^2(x0) log(z/(z-W)) in closed form
    (the principal log is the right branch for Im z != 0 since z-u never
    crosses the negative real axis along the contour).
    """
    w_max = model.omega_max
    u = 0.5 * w_max * (_GL_NODES + 1.0)
    wts = 0.5 * w_max * _GL_WEIGHTS
    x0 = min(max(z.real, 0.0), w_max)
    g2x = complex(model.g2(x0))
    smooth = np.sum(wts * (model.g2(u) - g2x) / (z - u))
    return complex(smooth + g2x * (np.log(z) - np.log(z - w_max)))


def principal_value_integral(omega: float, model: FriedrichsModel,
                             n_nodes: int = 400) -> float:
    """PV integral_0^W g^2(u)/(omega-u) du by singularity subtraction."""
    w_max = model.omega_max
    if not (0 < omega < w_max):
        raise ValueError("omega must lie inside the cut")
    x, wt = np.polynomial.legendre.leggauss(n_nodes)
    u = 0.5 * w_max * (x + 1.0)
    wts = 0.5 * w_max * wt
    g2w = float(model.g2(omega))
    integrand = (model.g2(u) - g2w) / (omega - u)
    return float(np.sum(wts * integrand) + g2w * np.log(omega / (w_max - omega)))


def alpha(z: complex, sheet: str, model: FriedrichsModel) -> complex:
    """alpha(z) = z - omega1 - lam^2 int g^2/(z-u) du; second sheet continues
    through the cut from above: alpha_II = alpha + 2 pi i lam^2 g^2(z)."""
    z = complex(z)
    if sheet not in ("first", "second"):
        raise ValueError("sheet must be 'first' or 'second'")
    if sheet == "first" and z.imag == 0.0 and 0 <= z.real <= model.omega_max:
        raise ValueError("z lies on the cut; use boundary_alpha")
    base = z - model.omega1 - model.lam ** 2 * _cauchy_integral(z, model)
    if sheet == "first":
        return base
    # analytic continuation of g^2 for the default exponential form factor
    g2z = np.exp(-z) if model.g is _default_g else complex(model.g(z)) ** 2
    return base + 2j * np.pi * model.lam ** 2 * g2z


def boundary_alpha(omega, model: FriedrichsModel):
    """alpha(omega + i0) on the cut: PV part + i pi lam^2 g^2."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    pv = np.array([principal_value_integral(w, model) for w in omega])
    out = omega - model.omega1 - model.lam ** 2 * pv \
        + 1j * np.pi * model.lam ** 2 * model.g2(omega)
    return out if out.size > 1 else complex(out[0])


def find_pole(model: FriedrichsModel, tol: float = 1e-12,
              max_iter: int = 100) -> ResonancePole:
    """Newton iteration for the second-sheet zero near omega1."""
    g2 = float(model.g2(model.omega1))
    z = model.omega1 - 1j * np.pi * model.lam ** 2 * g2
    if model.lam == 0.0:
        return ResonancePole(model.omega1, 0.0, 0.0)
    h = 1e-6
    for _ in range(max_iter):
        f = alpha(z, "second", model)
        if abs(f) < tol:
            break
        fp = (alpha(z + h, "second", model) - alpha(z - h, "second", model)) / (2 * h)
        step = f / fp
        z = z - step
        if abs(step) < tol:
            f = alpha(z, "second", model)
            break
    else:
        raise RuntimeError("pole search did not converge")
    gamma1 = -2.0 * z.imag
    if gamma1 <= 0:
        raise RuntimeError(f"found a pole with gamma1 = {gamma1} <= 0")
    return ResonancePole(float(z.real), float(gamma1), float(abs(f)))


# ---------------------------------------------------------------------------
# survival probability, two routes
# ---------------------------------------------------------------------------

def discretize(model: FriedrichsModel, n_modes: int = 2000):
    """(N+1)x(N+1) real symmetric Hamiltonian on a midpoint omega grid."""
    w_max = model.omega_max
    dw = w_max / n_modes
    wgrid = (np.arange(n_modes) + 0.5) * dw
    h = np.zeros((n_modes + 1, n_modes + 1))
    h[0, 0] = model.omega1
    h[np.arange(1, n_modes + 1), np.arange(1, n_modes + 1)] = wgrid
    coup = model.lam * np.asarray(model.g(wgrid)) * np.sqrt(dw)
    h[0, 1:] = coup
    h[1:, 0] = coup
    return h, wgrid


def survival_amplitude_oracle(model: FriedrichsModel, t_grid,
                              n_modes: int = 2000):
    """A(t) = <1|e^{-iHt}|1> by dense diagonalization of the discretization."""
    h, _ = discretize(model, n_modes)
    evals, evecs = np.linalg.eigh(h)
    w0 = np.abs(evecs[0, :]) ** 2
    t_grid = np.asarray(t_grid, dtype=float)
    return np.exp(-1j * np.outer(t_grid, evals)) @ w0


def spectral_density(model: FriedrichsModel, n_points: int = 40001):
    """psi(omega) = lam^2 g^2 / |alpha(omega+i0)|^2 on a fine midpoint grid."""
    w_max = model.omega_max
    dw = w_max / n_points
    wgrid = (np.arange(n_points) + 0.5) * dw
    x, wt = np.polynomial.legendre.leggauss(400)
    u = 0.5 * w_max * (x + 1.0)
    wts = 0.5 * w_max * wt
    g2u = model.g2(u)
    g2 = model.g2(wgrid)
    # PV via subtraction, vectorized over the evaluation grid
    pv = ((g2u[None, :] - g2[:, None]) / (wgrid[:, None] - u[None, :])) @ wts \
        + g2 * np.log(wgrid / (w_max - wgrid))
    a_plus = wgrid - model.omega1 - model.lam ** 2 * pv \
        + 1j * np.pi * model.lam ** 2 * g2
    psi = model.lam ** 2 * g2 / np.abs(a_plus) ** 2
    return wgrid, psi, dw


def survival_amplitude_quadrature(model: FriedrichsModel, t_grid,
                                  n_points: int = 40001):
    """A(t) = int psi(omega) e^{-i omega t} domega."""
    wgrid, psi, dw = spectral_density(model, n_points)
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty(t_grid.size, dtype=complex)
    chunk = 256
    for s in range(0, t_grid.size, chunk):
        ts = t_grid[s:s + chunk]
        out[s:s + chunk] = np.exp(-1j * np.outer(ts, wgrid)) @ psi * dw
    return out


def pole_approximation(pole: ResonancePole, t):
    """Pure exponential survival e^{-gamma1 t}."""
    return np.exp(-pole.gamma1 * np.asarray(t, dtype=float))


def recurrence_time(model: FriedrichsModel, n_modes: int = 2000) -> float:
    """Revival horizon of the uniform discretization, 2 pi / d omega."""
    return 2.0 * np.pi * n_modes / model.omega_max


def survival_probability(model: FriedrichsModel, t_grid,
                         n_modes: int = 2000, n_points: int = 40001):
    """P(t) by dense diagonalization and by spectral-density quadrature.

    Times beyond half the discretization recurrence horizon are flagged:
    there the oracle is contaminated by revivals.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ValueError("t must be non-negative")
    if model.lam == 0.0:
        ones = np.ones_like(t_grid)
        return {"t": t_grid, "p_oracle": ones, "p_quadrature": ones.copy(),
                "p_pole": ones.copy(), "flagged": np.zeros_like(t_grid, bool)}
    p_a = np.abs(survival_amplitude_oracle(model, t_grid, n_modes)) ** 2
    p_b = np.abs(survival_amplitude_quadrature(model, t_grid, n_points)) ** 2
    pole = find_pole(model)
    return {
        "t": t_grid,
        "p_oracle": p_a,
        "p_quadrature": p_b,
        "p_pole": pole_approximation(pole, t_grid),
        "flagged": t_grid > 0.5 * recurrence_time(model, n_modes),
        "pole": pole,
    }


def survival_to_csv(report) -> str:
    lines = ["t,P_oracle,P_quadrature,P_pole"]
    for t, a, b, c in zip(report["t"], report["p_oracle"],
                          report["p_quadrature"], report["p_pole"]):
        lines.append(f"{float(t)!r},{float(a)!r},{float(b)!r},{float(c)!r}")
    return "\n".join(lines) + "\n"


def pole_to_json(pole: ResonancePole, model: FriedrichsModel) -> str:
    return json.dumps({"beta1": pole.beta1, "gamma1": pole.gamma1,
                       "residual": pole.residual, "lambda": model.lam,
                       "omega1": model.omega1})


# ---------------------------------------------------------------------------
# decay splits of mixed states
# ---------------------------------------------------------------------------

def mixed_state_decay(rho11: float, rho_1w: np.ndarray, rho_ww: np.ndarray,
                      pole: ResonancePole, wgrid: np.ndarray, t: float):
    """Three-component split of a state built on the unstable level and the
    continuum: an invariant part (diagonal continuum weights), a cross term
    damped as e^{-gamma1 t/2} that oscillates at beta1, and the pole term
    damped as e^{-gamma1 t}.
    """
    rho_1w = np.asarray(rho_1w, dtype=complex)
    rho_ww = np.asarray(rho_ww, dtype=float)
    wgrid = np.asarray(wgrid, dtype=float)
    g1, b1 = pole.gamma1, pole.beta1
    w_half = float(np.exp(-0.5 * g1 * t))
    w_full = float(np.exp(-g1 * t))
    cross = rho_1w * np.exp(-1j * (b1 - wgrid) * t) * w_half
    return {
        "star": rho_ww,                 # time invariant
        "cross": cross,                 # weight e^{-gamma1 t/2}
        "pole": rho11 * w_full,         # weight e^{-gamma1 t}
        "weights": (1.0, w_half, w_full),
    }


def weak_distance(split, test_fn_values: np.ndarray, dw: float) -> float:
    """Pairing of the decaying components against a smooth test function."""
    test = np.asarray(test_fn_values, dtype=complex)
    cross = complex(np.sum(split["cross"] * test) * dw)
    return abs(split["pole"]) + abs(cross)


def thermal_many_mode(temperature: float, gamma: float, f, t,
                      omega_max: float | None = None, n_points: int = 4001):
    """rho(t) = rho* + rho1 e^{-gamma t} on an omega grid.

    rho* has Boltzmann weights Z T^{-3/2} e^{-omega/T} normalized to trace 1;
    rho1 is the fluctuation f(omega) with its mean removed so tr rho1 = 0
    exactly.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    w_max = 20.0 * temperature if omega_max is None else omega_max
    dw = w_max / n_points
    wgrid = (np.arange(n_points) + 0.5) * dw
    raw = temperature ** -1.5 * np.exp(-wgrid / temperature)
    norm = float(raw.sum() * dw)
    if not np.isfinite(norm) or norm <= 0:
        raise ValueError("equilibrium weights not normalizable")
    z_const = 1.0 / norm
    star = z_const * raw
    fl = np.asarray(f(wgrid), dtype=float)
    fl = fl - fl.mean()  # tr rho1 = 0 exactly
    state = star + fl * np.exp(-gamma * float(t))
    return {"omega": wgrid, "dw": dw, "star": star, "fluctuation": fl,
            "state": state, "Z": z_const,
            "trace": float(state.sum() * dw)}


# ---------------------------------------------------------------------------
# Lambda-trace Lyapunov functional
# ---------------------------------------------------------------------------

def damping_matrix(spectrum) -> np.ndarray:
    """Gamma_ij = gamma_i + gamma_j >= 0 from z_i = beta_i - i gamma_i/2."""
    z = np.asarray(spectrum, dtype=complex)
    if np.any(z.imag > 1e-15):
        raise ValueError("spectrum must have non-positive imaginary parts")
    gam = -2.0 * z.imag
    return gam[:, None] + gam[None, :]


def lambda_lyapunov(spectrum, rho0: np.ndarray, t_grid) -> np.ndarray:
    """Y(t) = sum_ij |rho_ij|^2 e^{-Gamma_ij t}; non-increasing in t."""
    rho0 = np.asarray(rho0, dtype=complex)
    gam = damping_matrix(spectrum)
    if rho0.shape != gam.shape:
        raise ValueError("state dimension must match the spectrum")
    t_grid = np.asarray(t_grid, dtype=float)
    w = np.abs(rho0) ** 2
    return np.array([float(np.sum(w * np.exp(-gam * t))) for t in t_grid])


# ---------------------------------------------------------------------------
# biorthogonal trace / energy checks
# ---------------------------------------------------------------------------

def trace_energy_checks(m: np.ndarray, t_grid=None) -> dict:
    """Finite-dimensional shadow of the pole-sector pairing algebra.

    For a real matrix with a complex-conjugate eigenvalue pair, the right
    eigenvector of z paired against the left eigenvector of z-bar has zero
    overlap (the zero-norm property), and the energy expectation in that
    pairing vanishes.  The trace of the similarity-evolved state is constant.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    evals, right = np.linalg.eig(m)
    left = np.linalg.inv(right)  # rows: left eigenvectors, biorthonormal
    # locate a complex eigenvalue (if any) and its conjugate partner
    report = {"eigenvalues": evals}
    cplx = np.where(np.abs(evals.imag) > 1e-12)[0]
    if cplx.size:
        i = cplx[0]
        j = int(np.argmin(np.abs(evals - evals[i].conj())))
        # self-pairing <z,-|z,-> ~ left vector of z-bar applied to right of z
        self_pair = complex(left[j] @ right[:, i])
        energy = complex(left[j] @ m @ right[:, i])
        report["self_pairing"] = abs(self_pair)
        report["pole_energy"] = abs(energy)
    else:
        # Hermitian-like limit: orthonormal pairing, positive traces
        report["self_pairing"] = None
        report["diag_pairings"] = np.real(np.einsum("ij,ji->i", left, right))
    if t_grid is not None:
        rng = np.random.default_rng(0)
        rho0 = rng.random((n, n)) + 1j * rng.random((n, n))
        rho0 = rho0 + rho0.conj().T
        rho0 /= np.trace(rho0).real
        traces = []
        for t in t_grid:
            phases = np.exp(-1j * np.asarray(evals) * t)
            prop = right @ np.diag(phases) @ left
            prop_inv = right @ np.diag(1.0 / phases) @ left
            traces.append(complex(np.trace(prop @ rho0 @ prop_inv)))
        traces = np.array(traces)
        report["trace_drift"] = float(np.abs(traces - traces[0]).max())
    return report
