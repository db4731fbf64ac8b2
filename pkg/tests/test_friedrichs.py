import numpy as np
import pytest
from scipy import integrate

from arrowlab.friedrichs import (FriedrichsModel, alpha, boundary_alpha,
                                 damping_matrix, discretize, find_pole,
                                 lambda_lyapunov, mixed_state_decay,
                                 pole_approximation, pole_to_json,
                                 principal_value_integral, recurrence_time,
                                 spectral_density, survival_amplitude_oracle,
                                 survival_amplitude_quadrature,
                                 survival_probability, survival_to_csv,
                                 thermal_many_mode, trace_energy_checks)

MODEL = FriedrichsModel(omega1=1.0, lam=0.1)


def test_alpha_free_theory():
    m0 = FriedrichsModel(omega1=1.0, lam=0.0)
    for z in (2 + 1j, 0.5 - 0.3j, -1 + 0j):
        assert alpha(z, "first", m0) == z - 1.0


def test_alpha_matches_adaptive_quadrature():
    z = 1.0 + 1.0j

    def re(u):
        return (np.exp(-u) / (z - u)).real

    def im(u):
        return (np.exp(-u) / (z - u)).imag

    r, _ = integrate.quad(re, 0, MODEL.omega_max, limit=200, epsabs=1e-13)
    i, _ = integrate.quad(im, 0, MODEL.omega_max, limit=200, epsabs=1e-13)
    oracle = z - 1.0 - 0.01 * complex(r, i)
    assert abs(alpha(z, "first", MODEL) - oracle) < 1e-8


def test_alpha_continuous_across_cut():
    for x in (0.5, 1.0, 3.0, 7.0):
        eps = 1e-10
        top = alpha(x + 1j * eps, "first", MODEL)
        bot = alpha(x - 1j * eps, "second", MODEL)
        assert abs(top - bot) < 1e-8


def test_alpha_rejects_cut_points():
    with pytest.raises(ValueError):
        alpha(1.0, "first", MODEL)
    with pytest.raises(ValueError):
        alpha(1.0 + 0.1j, "third", MODEL)


def test_boundary_alpha_is_cut_limit():
    for x in (0.3, 1.0, 5.0):
        lim = alpha(x + 1e-9j, "first", MODEL)
        assert abs(boundary_alpha(x, MODEL) - lim) < 1e-7


def test_principal_value_against_closed_form():
    # PV int_0^W e^-u/(w-u) du = e^-w (Ei(w) - Ei(w-W))
    from scipy.special import expi
    for w in (0.5, 1.0, 2.5):
        exact = np.exp(-w) * (expi(w) - expi(w - MODEL.omega_max))
        assert abs(principal_value_integral(w, MODEL) - exact) < 1e-10


def test_find_pole_residual_and_golden_rule():
    pole = find_pole(MODEL)
    assert pole.residual < 1e-10
    assert pole.gamma1 > 0
    golden = 2 * np.pi * MODEL.lam ** 2 * np.exp(-1.0)
    assert abs(pole.gamma1 - golden) / golden < 0.10
    shift = MODEL.lam ** 2 * principal_value_integral(1.0, MODEL)
    assert abs((pole.beta1 - 1.0) - shift) / abs(shift) < 0.10


def test_pole_approaches_bare_level():
    prev = None
    for lam in (0.05, 0.02, 0.01):
        p = find_pole(FriedrichsModel(1.0, lam))
        scaled = abs(p.z - 1.0) / lam ** 2
        if prev is not None:
            assert abs(scaled - prev) / prev < 0.05  # O(lam^2) scaling
        prev = scaled


def test_spectral_density_normalized():
    _, psi, dw = spectral_density(MODEL, 20001)
    assert abs(psi.sum() * dw - 1.0) < 1e-6


def test_survival_trivial_cases():
    rep = survival_probability(FriedrichsModel(1.0, 0.0), [0.0, 1.0, 10.0])
    assert np.allclose(rep["p_oracle"], 1.0)
    t = np.array([0.0])
    a = survival_amplitude_oracle(MODEL, t, n_modes=400)
    assert abs(abs(a[0]) ** 2 - 1.0) < 1e-12


def test_discretization_shape():
    h, w = discretize(MODEL, 100)
    assert h.shape == (101, 101)
    assert np.allclose(h, h.T)
    assert w.size == 100


def test_survival_two_paths_and_regimes():
    t = np.linspace(0, 200, 101)
    rep = survival_probability(MODEL, t, n_modes=2000, n_points=40001)
    assert not rep["flagged"].any()
    assert np.abs(rep["p_oracle"] - rep["p_quadrature"]).max() < 1e-3
    # Zeno: vanishing derivative at t=0 (P is even in t)
    dt = 1e-4
    pz = np.abs(survival_amplitude_quadrature(MODEL, [-dt, dt], 40001)) ** 2
    assert abs(pz[1] - pz[0]) / (2 * dt) < 1e-6
    # mid-regime exponential at the pole rate
    mask = (t >= 20) & (t <= 120)
    slope = np.polyfit(t[mask], np.log(rep["p_quadrature"][mask]), 1)[0]
    assert abs(-slope - rep["pole"].gamma1) / rep["pole"].gamma1 < 0.10


def test_khalfin_long_time_deviation():
    pole = find_pole(MODEL)
    t = np.linspace(500, 1000, 26)
    assert np.all(t[1:] > 0.5 * recurrence_time(MODEL))
    p = np.abs(survival_amplitude_quadrature(MODEL, t, 40001)) ** 2
    rel = np.abs(p - pole_approximation(pole, t)) / pole_approximation(pole, t)
    assert rel.max() > 0.10


def test_pole_approximation_values():
    pole = find_pole(MODEL)
    assert pole_approximation(pole, 0.0) == 1.0
    assert abs(pole_approximation(pole, 1.0 / pole.gamma1) - np.exp(-1)) < 1e-12


def test_mixed_state_decay_split():
    pole = find_pole(MODEL)
    w = np.linspace(0.01, 10, 100)
    star = np.exp(-w)
    star /= star.sum() * (w[1] - w[0])
    sp = mixed_state_decay(0.3, 0.1 * np.exp(-w), star, pole, w, t=2.0)
    assert np.array_equal(sp["star"], star)
    assert abs(sp["weights"][1] - np.exp(-0.5 * pole.gamma1 * 2.0)) < 1e-14
    assert abs(sp["weights"][2] - np.exp(-pole.gamma1 * 2.0)) < 1e-14
    # trivial: no unstable-level content -> the state is rho* for all t
    sp0 = mixed_state_decay(0.0, np.zeros_like(w), star, pole, w, t=5.0)
    assert sp0["pole"] == 0.0 and np.all(sp0["cross"] == 0)
    # the pole component decays at exactly gamma1
    ts = np.linspace(0.0, 5 / pole.gamma1, 20)
    vals = [mixed_state_decay(0.3, 0 * w, star, pole, w, t)["pole"] for t in ts]
    rate = -np.polyfit(ts, np.log(vals), 1)[0]
    assert abs(rate - pole.gamma1) / pole.gamma1 < 0.01


def test_thermal_many_mode():
    th = thermal_many_mode(0.7, 0.05, lambda x: 0.2 * np.sin(x), t=2.0)
    assert abs(th["trace"] - 1.0) < 1e-10
    assert abs(th["star"].sum() * th["dw"] - 1.0) < 1e-10
    assert abs(th["fluctuation"].sum() * th["dw"]) < 1e-12
    for t in (0.0, 1 / 0.05, 5 / 0.05):
        assert abs(thermal_many_mode(0.7, 0.05, lambda x: 0.2 * np.sin(x),
                                     t=t)["trace"] - 1.0) < 1e-10
    flat = thermal_many_mode(0.7, 0.05, lambda x: np.zeros_like(x), t=3.0)
    assert np.array_equal(flat["state"], flat["star"])
    with pytest.raises(ValueError):
        thermal_many_mode(-1.0, 0.05, lambda x: x, t=0.0)


def test_damping_matrix():
    g = damping_matrix([1 - 0.1j, 2 - 0.05j, 3 + 0j])
    assert np.allclose(g, g.T)
    assert np.all(g >= 0)
    assert g[2, 2] == 0.0
    with pytest.raises(ValueError):
        damping_matrix([1 + 0.1j])


def test_lambda_lyapunov_monotone_and_limits():
    z = [1 - 0.1j, 2 - 0.05j]
    rho = np.array([[0.5, 0.2 + 0.1j], [0.2 - 0.1j, 0.5]])
    t = np.linspace(0, 100, 200)
    y = lambda_lyapunov(z, rho, t)
    assert np.all(np.diff(y) <= 1e-12)
    assert y[-1] < 1e-3  # no undamped support -> decays to zero
    y0 = lambda_lyapunov([2.0 + 0j], np.array([[1.0]]), t)
    assert np.ptp(y0) == 0.0


def test_lambda_lyapunov_random_sweep():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        z = rng.random(n) * 3 - 0.5j * rng.random(n)
        r = rng.random((n, n)) + 1j * rng.random((n, n))
        y = lambda_lyapunov(z, r + r.conj().T, np.linspace(0, 30, 40))
        assert np.all(np.diff(y) <= 1e-12)


def test_trace_energy_checks_complex_pair():
    m = np.array([[1.0, 0.02], [-0.5, 1.0]])
    rep = trace_energy_checks(m, t_grid=np.linspace(0, 10, 11))
    assert rep["self_pairing"] < 1e-10
    assert rep["pole_energy"] < 1e-10
    assert rep["trace_drift"] < 1e-10


def test_trace_energy_checks_hermitian_limit():
    m = np.array([[2.0, 0.3], [0.3, 1.0]])
    rep = trace_energy_checks(m)
    assert rep["self_pairing"] is None
    assert np.allclose(rep["diag_pairings"], 1.0)


def test_serializers():
    pole = find_pole(MODEL)
    text = pole_to_json(pole, MODEL)
    assert '"gamma1"' in text and '"omega1"' in text
    rep = survival_probability(FriedrichsModel(1.0, 0.0), [0.0, 1.0])
    csv = survival_to_csv(rep)
    assert csv.splitlines()[0] == "t,P_oracle,P_quadrature,P_pole"
