import numpy as np
import pytest
from scipy.linalg import expm

from arrowlab.liouville import (check_density_matrix, conjugate_momentum_grid,
                                dephase_cesaro, dephase_evolution,
                                diagonal_part, expectation, is_self_associated,
                                liouvillian, matrix_from_json, matrix_to_json,
                                phase_space_integral, super_adjoint,
                                super_apply, super_associated, super_compose,
                                super_identity, super_product, super_transpose,
                                time_reversal_K, wigner_transform)

rng = np.random.default_rng(0)


def cmat(n=3):
    return rng.random((n, n)) + 1j * rng.random((n, n))


def herm(n=3):
    m = cmat(n)
    return m + m.conj().T


def test_super_product_acts_as_sandwich():
    for _ in range(20):
        a, b, g = cmat(), cmat(), cmat()
        assert np.allclose(super_apply(super_product(a, b), g), a @ g @ b,
                           atol=1e-12)
    g, b = cmat(), cmat()
    assert np.allclose(super_apply(super_identity(3), g), g)
    assert np.allclose(super_apply(super_product(np.eye(3), b), g), g @ b,
                       atol=1e-12)


def test_super_product_composition_rule():
    for _ in range(20):
        a, b, g, d = cmat(), cmat(), cmat(), cmat()
        lhs = super_compose(super_product(a, b), super_product(g, d))
        rhs = super_product(a @ g, d @ b)
        assert np.abs(lhs - rhs).max() < 1e-12


def test_conjugation_maps():
    a, b = cmat(), cmat()
    ab = super_product(a, b)
    assert np.allclose(super_transpose(ab), super_product(b, a))
    assert np.allclose(super_adjoint(ab),
                       super_product(a.conj().T, b.conj().T))
    assert np.allclose(super_associated(ab),
                       super_product(b.conj().T, a.conj().T))
    # involutions and the transpose-of-associated identity
    x = np.einsum("ik,jl->ijkl", cmat(), cmat()) + 0.3 * super_product(a, b)
    assert np.allclose(super_transpose(super_transpose(x)), x)
    assert np.allclose(super_adjoint(super_adjoint(x)), x)
    assert np.allclose(super_transpose(super_associated(x)), super_adjoint(x))


def test_self_associated_preserves_hermiticity():
    h = np.real(herm(4))
    il = 1j * liouvillian(h)
    assert is_self_associated(il)
    for _ in range(20):
        r = herm(4)
        out = super_apply(il, r)
        assert np.abs(out - out.conj().T).max() < 1e-12


def test_time_reversal():
    r = herm()
    assert np.allclose(time_reversal_K(time_reversal_K(r)), r)
    real_rho = np.real(r)
    assert np.allclose(time_reversal_K(real_rho), real_rho)
    h = np.real(herm(3))
    il = 1j * liouvillian(h)
    # K i L K = -i L entrywise for real H
    assert np.allclose(np.conj(il), -il)


def test_liouvillian_properties():
    assert np.abs(liouvillian(np.eye(4))).max() == 0.0
    w = np.array([0.3, 1.1, 2.0])
    L = liouvillian(np.diag(w))
    r = cmat()
    expect = (w[:, None] - w[None, :]) * r
    assert np.allclose(super_apply(L, r), expect, atol=1e-12)
    h = np.real(herm(4))
    L = liouvillian(h)
    assert np.abs(super_adjoint(L) - L).max() < 1e-12
    assert np.abs(super_transpose(L) + L).max() < 1e-12
    with pytest.raises(ValueError):
        liouvillian(cmat())


def test_check_density_matrix():
    r = herm()
    r = r / np.trace(r).real
    check_density_matrix(r)
    with pytest.raises(ValueError):
        check_density_matrix(r * 2)
    with pytest.raises(ValueError):
        check_density_matrix(cmat())


def test_dephase_against_matrix_exponential():
    w = np.array([0.0, 0.7, 1.9, 3.2])
    h = np.diag(w)
    r0 = herm(4)
    r0 = r0 / np.trace(r0).real
    for t in (0.0, 0.5, 2.0, 7.7):
        direct = expm(1j * h * t) @ r0 @ expm(-1j * h * t)
        assert np.allclose(dephase_evolution(r0, w, t), direct, atol=1e-12)
    # trace, hermiticity, diagonal, eigenvalues preserved
    rt = dephase_evolution(r0, w, 3.3)
    assert abs(np.trace(rt) - 1.0) < 1e-12
    assert np.abs(rt - rt.conj().T).max() < 1e-12
    assert np.allclose(np.diag(rt), np.diag(r0))
    assert np.allclose(np.sort(np.linalg.eigvalsh(rt)),
                       np.sort(np.linalg.eigvalsh(r0)), atol=1e-12)


def test_dephase_two_level_phase_flip():
    r0 = 0.5 * np.ones((2, 2), dtype=complex)
    rt = dephase_evolution(r0, [0.0, 1.0], np.pi)
    assert abs(rt[0, 1] + 0.5) < 1e-12


def test_evolution_reversibility_real_h():
    h = np.real(herm(4))
    r0 = herm(4)
    r0 = r0 / np.trace(r0).real
    t = 1.7
    fwd = expm(-1j * h * t) @ r0 @ expm(1j * h * t)
    back = expm(-1j * h * (-t)) @ r0 @ expm(1j * h * (-t))
    # evolving the conjugated state forward equals conjugating the
    # backward-evolved state
    lhs = expm(-1j * h * t) @ time_reversal_K(r0) @ expm(1j * h * t)
    assert np.allclose(lhs, time_reversal_K(back), atol=1e-12)
    assert not np.allclose(fwd, back, atol=1e-6)


def test_dephase_cesaro_decays_like_one_over_t():
    local = np.random.default_rng(17)
    n = 5
    w = np.array([0.0, 1.0, 2.2, 3.7, 5.1])
    r = local.random((n, n)) + 1j * local.random((n, n))
    r = r + r.conj().T
    r = r / np.trace(r).real
    obs = local.random((n, n))
    obs = obs + obs.T
    star = expectation(diagonal_part(r), obs).real
    devs = []
    for big_t in (50.0, 100.0, 200.0, 400.0):
        avg = dephase_cesaro(r, w, obs, big_t, n_steps=4000).real
        devs.append(abs(avg - star))
    # bounded oscillatory sums: T * deviation stays bounded
    assert all(t * d < 2.0 for t, d in zip((50, 100, 200, 400), devs))


def test_wigner_gaussian_ground_state():
    nq = 256
    q = np.linspace(-6, 6, nq)
    dq = q[1] - q[0]
    psi = np.pi ** -0.25 * np.exp(-q ** 2 / 2)
    rho = np.outer(psi, psi) * dq
    p = np.linspace(-6, 6, nq)
    rw = wigner_transform(rho, q, p)
    exact = np.exp(-q[:, None] ** 2 - p[None, :] ** 2) / np.pi
    assert np.abs(rw.real - exact).max() < 1e-3
    assert np.abs(rw.imag).max() < 1e-10


def test_wigner_trace_and_pairing_identities():
    nq = 256
    q = np.linspace(-6, 6, nq)
    dq = q[1] - q[0]
    psi = np.pi ** -0.25 * np.exp(-q ** 2 / 2)
    rho = np.outer(psi, psi) * dq
    p = conjugate_momentum_grid(q)
    rw = wigner_transform(rho, q, p)
    assert abs(phase_space_integral(rw, q, p) - 1.0) < 1e-6
    sym = np.broadcast_to(q[:, None] ** 2, (nq, nq))
    lhs = phase_space_integral(rw, q, p, sym)
    rhs = float(np.sum(np.diag(rho).real * q ** 2))
    assert abs(lhs - rhs) / abs(rhs) < 1e-4


def test_matrix_json_roundtrip():
    m = cmat()
    assert np.allclose(matrix_from_json(matrix_to_json(m)), m)
