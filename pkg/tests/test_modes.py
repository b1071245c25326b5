import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermi_lattice import (
    ChainParams,
    InvalidParametersError,
    OpeningFunction,
    Scenario,
    TrapParams,
    build_harmonic_chain,
    build_ion_trap,
    equilibrium_positions,
    site_coupling_row,
)
from fermi_lattice.modes import _jacobi_eigh


def canonical_norms(basis):
    return 2.0 * np.abs(basis.couplings) ** 2 @ basis.frequencies


# ---------------------------------------------------------------- chain

def test_chain_alpha_printed_formula():
    p = ChainParams(100, length=1.0, pinning=1.0, speed=1.0)
    assert p.alpha == 1.0 - 1.0 / (2 * 100**2)
    assert p.alpha == 0.99995


def test_chain_mode_zero_is_pinning_frequency():
    for params in (ChainParams(10), ChainParams(57, 2.0, 0.3, 1.7), ChainParams(4, 1, 3, 9)):
        basis = build_harmonic_chain(params)
        assert basis.frequencies[0] == pytest.approx(params.pinning, abs=1e-14)


def test_chain_first_mode_near_continuum_value():
    # omega_1 ~ 2 pi c / L to within 1.5% already at k=1 (fast convergence of
    # 2 pi k / sqrt(1 + 4 pi^2 k^2) to 1)
    basis = build_harmonic_chain(ChainParams(100))
    w1 = basis.frequencies[1]
    assert abs(w1 - 2 * np.pi) / w1 <= 0.015
    assert w1 == pytest.approx(np.sqrt(4 * np.pi**2 + 1), rel=5e-4)


def test_chain_alpha_out_of_range_names_inequality():
    with pytest.raises(InvalidParametersError, match="0 < alpha < 1"):
        ChainParams(2, length=10.0, pinning=1.0, speed=1.0)


def test_chain_mode_symmetry_is_exact():
    for n in (4, 99, 100, 1000):
        basis = build_harmonic_chain(ChainParams(n))
        w, lam = basis.frequencies, basis.couplings
        for k in range(1, n):
            assert w[k] == w[n - k]
        assert np.array_equal(lam[:, 1:], np.conj(lam[:, :0:-1]))


def test_chain_coupling_value():
    basis = build_harmonic_chain(ChainParams(4))
    row = site_coupling_row(basis, 0)
    np.testing.assert_allclose(row, 1.0 / np.sqrt(2 * 4 * basis.frequencies), rtol=1e-15)


def test_chain_coupling_magnitude_site_independent():
    basis = build_harmonic_chain(ChainParams(12))
    mags = np.abs(basis.couplings)
    assert np.max(np.abs(mags - mags[0])) <= 1e-14


def test_chain_determinism():
    a = build_harmonic_chain(ChainParams(64))
    b = build_harmonic_chain(ChainParams(64))
    assert np.array_equal(a.frequencies, b.frequencies)
    assert np.array_equal(a.couplings, b.couplings)


@settings(deadline=None, max_examples=40)
@given(
    n=st.integers(3, 400),
    length=st.floats(0.1, 10),
    pinning=st.floats(0.1, 5),
    speed=st.floats(0.5, 5),
)
def test_chain_canonical_normalization_property(n, length, pinning, speed):
    if length * pinning >= np.sqrt(2) * n * speed:
        with pytest.raises(InvalidParametersError):
            ChainParams(n, length, pinning, speed)
        return
    basis = build_harmonic_chain(ChainParams(n, length, pinning, speed))
    assert np.max(np.abs(canonical_norms(basis) - 1)) < 1e-10


# ---------------------------------------------------------------- trap

def test_trap_two_ions():
    basis = build_ion_trap(TrapParams(2))
    assert basis.frequencies[0] == pytest.approx(1.0, abs=1e-12)
    assert basis.frequencies[1] / basis.frequencies[0] == pytest.approx(np.sqrt(3), abs=1e-12)
    d = basis.couplings.real * np.sqrt(2 * basis.frequencies)[None, :]
    np.testing.assert_allclose(
        d, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-12)


def test_trap_three_ions_against_brute_force():
    basis = build_ion_trap(TrapParams(3))
    np.testing.assert_allclose(basis.frequencies**2, [1.0, 3.0, 29.0 / 5.0], atol=1e-10)

    # independent oracle: finite-difference Hessian at the solved equilibrium
    u = equilibrium_positions(3)
    assert u[2] == pytest.approx((5.0 / 4.0) ** (1.0 / 3.0), abs=1e-10)

    def grad(x):
        d = x[:, None] - x[None, :]
        np.fill_diagonal(d, np.inf)
        return x - np.sum(np.sign(d) / d**2, axis=1)

    h = 1e-6
    hess = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        hess[:, j] = (grad(u + e) - grad(u - e)) / (2 * h)
    evals = np.linalg.eigvalsh(0.5 * (hess + hess.T))
    np.testing.assert_allclose(basis.frequencies**2, evals, atol=1e-6)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_trap_orthonormal_modes(n):
    basis = build_ion_trap(TrapParams(n))
    d = basis.couplings.real * np.sqrt(2 * basis.frequencies)[None, :]
    assert np.max(np.abs(d.T @ d - np.eye(n))) <= 1e-10
    assert np.all(np.diff(basis.frequencies) > 0)
    assert np.max(np.abs(canonical_norms(basis) - 1)) < 1e-10
    # sign convention
    for k in range(n):
        col = d[:, k]
        assert col[np.flatnonzero(np.abs(col) > 1e-12)[0]] > 0


def test_trap_coupling_row_value(trap2):
    row = site_coupling_row(trap2, 0)
    w = trap2.frequencies
    np.testing.assert_allclose(row, [1 / np.sqrt(2 * w[0] * 2), 1 / np.sqrt(2 * w[1] * 2)],
                               atol=1e-12)


def test_trap_determinism():
    a = build_ion_trap(TrapParams(5))
    b = build_ion_trap(TrapParams(5))
    assert np.array_equal(a.frequencies, b.frequencies)
    assert np.array_equal(a.couplings, b.couplings)


def test_trap_needs_two_ions():
    with pytest.raises(InvalidParametersError):
        TrapParams(1)


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(7)
    for n in (2, 3, 6, 9):
        m = rng.standard_normal((n, n))
        m = m + m.T
        evals, evecs = _jacobi_eigh(m)
        order = np.argsort(evals)
        np.testing.assert_allclose(np.sort(evals), np.linalg.eigvalsh(m), atol=1e-12)
        recon = evecs[:, order] @ np.diag(np.sort(evals)) @ evecs[:, order].T
        np.testing.assert_allclose(recon, m, atol=1e-12)


# ---------------------------------------------------------------- scenario/openings

def test_site_coupling_row_range(chain100):
    with pytest.raises(IndexError):
        site_coupling_row(chain100, 100)
    with pytest.raises(IndexError):
        site_coupling_row(chain100, -1)


def test_scenario_validation():
    op = OpeningFunction.constant()
    with pytest.raises(InvalidParametersError):
        Scenario(3, 3, 1.0, 1.0, 1.0, op, op, 1.0)
    with pytest.raises(InvalidParametersError):
        Scenario(0, 1, 1.0, 1.0, -0.5, op, op, 1.0)
    # epsilon 0 stays legal: the switched-off baseline
    Scenario(0, 1, 1.0, 1.0, 0.0, op, op, 1.0)
    sc = Scenario.symmetric(0, 5, 2.0, 1.0, op, 1.0)
    with pytest.raises(IndexError):
        sc.check_sites(4)


def test_opening_values_and_support():
    t = np.linspace(-0.5, 0.5, 401)
    for op in (OpeningFunction.constant(),
               OpeningFunction.sin_sq_window(0.2),
               OpeningFunction.cos_sq_window(0.2),
               OpeningFunction.exp_ramp_then(0.3, OpeningFunction.cos_sq_window(0.2))):
        vals = op(t)
        assert np.all(vals >= 0) and np.all(vals <= 1)
    win = OpeningFunction.sin_sq_window(0.2)
    assert np.all(win(t[t < 0]) == 0)
    assert np.all(win(t[t > 0.2]) == 0)
    assert win(0.1) == pytest.approx(1.0)
    cos = OpeningFunction.cos_sq_window(0.2)
    assert cos(0.0) == pytest.approx(1.0)
    assert cos(0.2) == pytest.approx(0.0, abs=1e-30)


def test_opening_exp_components_reconstruct():
    t = np.linspace(0, 0.2, 101)
    for op in (OpeningFunction.sin_sq_window(0.2), OpeningFunction.cos_sq_window(0.2)):
        comps = op.exp_components()
        rebuilt = sum(c * np.exp(1j * nu * t) for c, nu in comps)
        np.testing.assert_allclose(rebuilt.imag, 0, atol=1e-15)
        np.testing.assert_allclose(rebuilt.real, op(t), atol=1e-14)


def test_opening_ramp_evaluation():
    op = OpeningFunction.exp_ramp_then(2.0, OpeningFunction.cos_sq_window(0.4))
    assert op(-2.0) == pytest.approx(np.exp(-1.0))
    assert op(0.0) == pytest.approx(1.0)
    assert op(0.4) == pytest.approx(0.0, abs=1e-30)
    assert op.post_ramp() == OpeningFunction.cos_sq_window(0.4)


def test_zero_window_is_switched_off():
    op = OpeningFunction.sin_sq_window(0.0)
    assert np.all(op(np.linspace(-1, 1, 11)) == 0)
    assert op.window_end == 0.0
