"""Eigendecomposition invariants and the Sturm-bisection cross-check."""

import numpy as np
import oracles
import pytest

from lmg_otoc import (Basis, DomainError, LmgParams, NumericalError,
                      QuenchSpec, SpinSector, build_hamiltonian,
                      build_postquench, build_sy_times_minus_i, build_sz,
                      eigh, propagator_phases)
from lmg_otoc.otoc import long_time_average, make_time_grid, quench_otoc
from lmg_otoc.spin_ops import OperatorMatrix


def _random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    a = (a + a.T) / 2
    return OperatorMatrix(SpinSector(n - 1), Basis.Z, a)


def test_diagonal_matrix():
    d = eigh(build_sz(SpinSector(4), Basis.Z))
    assert np.array_equal(d.values, SpinSector(4).m_values())
    assert d.dimension == 5


def test_invariants_on_random_matrices():
    rng = np.random.default_rng(11)
    for _ in range(5):
        op = _random_symmetric(rng, 50)
        d = eigh(op)
        eye = np.eye(50)
        assert np.max(np.abs(d.vectors.T @ d.vectors - eye)) < 1e-10
        recon = d.vectors @ np.diag(d.values) @ d.vectors.T
        assert np.max(np.abs(recon - op.entries)) < 1e-8 * np.linalg.norm(op.entries)
        assert np.all(np.diff(d.values) >= 0)


def test_rejects_skew_storage():
    with pytest.raises(DomainError):
        eigh(build_sy_times_minus_i(SpinSector(4), Basis.Z))


def test_convergence_failure_is_reported(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("did not converge")
    monkeypatch.setattr(np.linalg, "eigh", boom)
    with pytest.raises(NumericalError, match="5-dim"):
        eigh(build_sz(SpinSector(4), Basis.Z))


@pytest.mark.parametrize("n", [6, 18, 30])
def test_tridiagonal_eigenvalues_match_sturm_bisection(n):
    params = LmgParams(0.4, SpinSector(n))
    h = build_hamiltonian(params, Basis.X)
    got = eigh(h).values
    want = oracles.sturm_eigenvalues(np.diag(h.entries), np.diag(h.entries, 1))
    assert np.max(np.abs(got - want)) < 1e-10


def test_field_shift_obeys_eigenvalue_perturbation_bound():
    # |E_k(H + lam Sz) - E_k(H)| <= lam * ||Sz|| = lam * S
    for n, alpha, lam in ((20, 0.4, 1.0), (35, 0.2, 2.5)):
        params = LmgParams(alpha, SpinSector(n))
        e_bare = eigh(build_hamiltonian(params)).values
        e_shift = eigh(build_postquench(QuenchSpec(params, lam))).values
        bound = lam * params.sector.total_spin
        assert np.max(np.abs(e_shift - e_bare)) <= bound * (1 + 1e-12)


def test_propagator_phases():
    d = eigh(build_sz(SpinSector(2), Basis.Z))
    got = propagator_phases(d, 0.7)
    want = np.exp(1j * d.values * 0.7)
    assert np.array_equal(got, want)
    assert np.max(np.abs(np.abs(got) - 1.0)) < 1e-15


def test_degenerate_block_rotation_leaves_averages_alone():
    # alpha=0 spectra are doubly degenerate in +-m; the average must not
    # depend on which basis the solver picks inside each block
    params = LmgParams(0.0, SpinSector(10))
    spec = QuenchSpec(params, 0.5)
    times = make_time_grid(200.0, 0.1)
    baseline = long_time_average(quench_otoc(spec, times)).value

    d0 = eigh(build_hamiltonian(params, Basis.X))
    psi0 = d0.vectors[:, 0]
    df = eigh(build_postquench(spec, Basis.X))
    energies = df.values.copy()
    vectors = df.vectors.copy()

    # rotate inside every degenerate block of the evolving spectrum
    rng = np.random.default_rng(3)
    i = 0
    while i < energies.size:
        j = i + 1
        while j < energies.size and energies[j] - energies[j - 1] < 1e-10:
            j += 1
        if j - i > 1:
            block = rng.normal(size=(j - i, j - i))
            q, _ = np.linalg.qr(block)
            vectors[:, i:j] = vectors[:, i:j] @ q
        i = j

    sec = params.sector
    w_diag = sec.m_values() / sec.total_spin
    w_eig = vectors.T @ (w_diag[:, None] * vectors)
    psi_eig = vectors.T @ psi0
    u = w_eig @ psi_eig
    f = np.empty(times.size, dtype=complex)
    for k, t in enumerate(times):
        p = np.exp(1j * energies * t)
        x = np.conj(p) * u
        x = p * (w_eig @ x)
        x = np.conj(p) * (w_eig @ x)
        x = p * (w_eig @ x)
        f[k] = psi_eig @ x
    rotated = float(np.trapezoid(f.real, times) / (times[-1] - times[0]))
    assert abs(rotated - baseline) < 1e-8
