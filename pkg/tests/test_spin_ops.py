"""Collective spin operators: algebra invariants and frame changes."""

import numpy as np
import oracles
import pytest

from lmg_otoc import (Basis, DomainError, OperatorMatrix, SpinSector,
                      basis_change, build_sx, build_sy_times_minus_i,
                      build_sz, rotation_z_to_x, scaled_op)
from lmg_otoc.errors import BasisMismatchError

SECTORS = [SpinSector(n) for n in (1, 2, 3, 8, 21, 50)]


def _complex_sy(op):
    return 1j * op.entries


def test_sector_basics():
    sec = SpinSector(5)
    assert sec.twice_spin == 5
    assert sec.total_spin == 2.5
    assert sec.dimension == 6
    assert np.array_equal(sec.m_values(), np.arange(6) - 2.5)


@pytest.mark.parametrize("bad", [0, -3, 2.5, "4"])
def test_sector_rejects_bad_counts(bad):
    with pytest.raises((DomainError, TypeError)):
        SpinSector(bad)


def test_single_spin_x_matrix_in_z_basis():
    sec = SpinSector(1)
    sx = build_sx(sec, Basis.Z)
    assert np.array_equal(sx.entries, np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_two_spin_z_matrix_in_x_basis():
    sec = SpinSector(2)
    sz = build_sz(sec, Basis.X)
    r = 1.0 / np.sqrt(2.0)
    want = np.array([[0, r, 0], [r, 0, r], [0, r, 0]])
    assert np.max(np.abs(sz.entries - want)) < 1e-15


def test_four_spin_ladder_element():
    # coupling between the m=0 and m=1 eigenstates
    sec = SpinSector(4)
    sx = build_sx(sec, Basis.Z)
    assert abs(sx.entries[2, 3] - np.sqrt(6.0) / 2.0) < 1e-15
    sz = build_sz(sec, Basis.X)
    assert abs(sz.entries[2, 3] - np.sqrt(6.0) / 2.0) < 1e-15


@pytest.mark.parametrize("sec", SECTORS, ids=lambda s: f"N{s.n_spins}")
@pytest.mark.parametrize("basis", [Basis.Z, Basis.X])
def test_commutation_relations(sec, basis):
    sx = build_sx(sec, basis).entries
    sy = _complex_sy(build_sy_times_minus_i(sec, basis))
    sz = build_sz(sec, basis).entries
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-12
    assert np.max(np.abs(sy @ sz - sz @ sy - 1j * sx)) < 1e-12
    assert np.max(np.abs(sz @ sx - sx @ sz - 1j * sy)) < 1e-12


@pytest.mark.parametrize("sec", SECTORS, ids=lambda s: f"N{s.n_spins}")
@pytest.mark.parametrize("basis", [Basis.Z, Basis.X])
def test_casimir(sec, basis):
    sx = build_sx(sec, basis).entries
    k = build_sy_times_minus_i(sec, basis).entries
    sz = build_sz(sec, basis).entries
    s = sec.total_spin
    casimir = sx @ sx - k @ k + sz @ sz      # Sy^2 = -(K)^2 for K = -i Sy
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(sec.dimension))) < 1e-10


@pytest.mark.parametrize("sec", SECTORS, ids=lambda s: f"N{s.n_spins}")
def test_generator_spectra_are_magnetic_numbers(sec):
    for op in (build_sx(sec, Basis.Z), build_sz(sec, Basis.X),
               build_sz(sec, Basis.Z), build_sx(sec, Basis.X)):
        vals = np.linalg.eigvalsh(op.entries)
        assert np.max(np.abs(np.sort(vals) - sec.m_values())) < 1e-10
    for basis in (Basis.Z, Basis.X):
        k = build_sy_times_minus_i(sec, basis).entries
        vals = np.sort(np.linalg.eigvalsh(1j * k).real)
        assert np.max(np.abs(vals - sec.m_values())) < 1e-10


@pytest.mark.parametrize("sec", SECTORS, ids=lambda s: f"N{s.n_spins}")
def test_rotation_is_orthogonal(sec):
    u = rotation_z_to_x(sec)
    d = sec.dimension
    assert np.max(np.abs(u.T @ u - np.eye(d))) < 1e-12
    assert np.max(np.abs(u @ u.T - np.eye(d))) < 1e-12


def test_rotation_matches_bruteforce_states():
    for n in (2, 5, 12):
        u = rotation_z_to_x(SpinSector(n))
        brute = oracles.xbasis_states_bruteforce(n)
        assert np.max(np.abs(u - brute)) < 1e-10


@pytest.mark.parametrize("n", [1, 4, 17])
def test_basis_change_round_trip(n):
    sec = SpinSector(n)
    for build in (build_sx, build_sz, build_sy_times_minus_i):
        op = build(sec, Basis.Z)
        there = basis_change(op, Basis.X)
        back = basis_change(there, Basis.Z)
        assert np.max(np.abs(back.entries - op.entries)) < 1e-12
        assert back.basis == Basis.Z and there.basis == Basis.X


def test_basis_change_maps_builders_onto_each_other():
    sec = SpinSector(9)
    got = basis_change(build_sz(sec, Basis.Z), Basis.X)
    assert np.max(np.abs(got.entries - build_sz(sec, Basis.X).entries)) < 1e-12
    got = basis_change(build_sx(sec, Basis.Z), Basis.X)
    assert np.max(np.abs(got.entries - build_sx(sec, Basis.X).entries)) < 1e-12
    got = basis_change(build_sy_times_minus_i(sec, Basis.Z), Basis.X)
    assert np.max(np.abs(got.entries - build_sy_times_minus_i(sec, Basis.X).entries)) < 1e-12


def test_basis_change_rejects_same_frame():
    op = build_sz(SpinSector(3), Basis.Z)
    with pytest.raises(DomainError):
        basis_change(op, Basis.Z)


def test_scaled_op():
    sec = SpinSector(6)
    w = scaled_op(build_sx(sec, Basis.X), 1.0 / sec.total_spin)
    assert np.max(np.abs(np.diag(w.entries) - sec.m_values() / 3.0)) < 1e-15
    assert np.linalg.norm(w.entries, 2) <= 1.0 + 1e-12


def test_operator_matrix_validation():
    sec = SpinSector(2)
    with pytest.raises(DomainError):
        OperatorMatrix(sector=sec, basis=Basis.Z,
                       entries=np.arange(9.0).reshape(3, 3))
    with pytest.raises(DomainError):
        OperatorMatrix(sector=sec, basis=Basis.Z, entries=np.eye(3), skew=True)
    with pytest.raises(DomainError):
        OperatorMatrix(sector=sec, basis=Basis.Z, entries=np.eye(4))


def test_frame_mismatch_is_detected():
    sec = SpinSector(4)
    a = build_sx(sec, Basis.Z)
    b = build_sx(sec, Basis.X)
    from lmg_otoc.spin_ops import _require_same_frame
    with pytest.raises(BasisMismatchError):
        _require_same_frame(a, b)
    with pytest.raises(DomainError):
        _require_same_frame(a, build_sx(SpinSector(6), Basis.Z))


def test_entries_are_read_only():
    op = build_sz(SpinSector(4), Basis.Z)
    with pytest.raises(ValueError):
        op.entries[0, 0] = 5.0
