"""Out-of-time-order correlator engine.

Both protocols evolve W = V = S_x/S in the Heisenberg picture and read off

    F(t) = <psi| W(t) V W(t) V |psi>,     W(t) = exp(+iHt) W exp(-iHt),

with everything expressed in the eigenbasis of the evolving Hamiltonian:
the heavy objects are the real symmetric matrix of W in that basis and
the real coefficient vector of |psi>, prepared once; each time sample
then costs diagonal phase sandwiches plus dense matrix products.

Protocols:
  * quench: |psi> is the ground state of the bare Hamiltonian, evolution
    runs under the field-shifted one.
  * microcanonical: |psi> is the n-th eigenstate of the bare Hamiltonian,
    which also drives the evolution.

Complex numbers enter only through the phase factors; operators, states
and eigenvectors stay real throughout.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import eigh
from .errors import DomainError
from .model import LmgParams, QuenchSpec, build_hamiltonian, build_postquench
from .spin_ops import Basis

DEFAULT_AVERAGING_TIME = 1.0e4
DEFAULT_AVERAGING_DT = 0.5
DEFAULT_DYNAMICS_DT = 0.05

# time samples per dense-product batch; keeps the phase block cache-sized
_BLOCK = 2048


def make_time_grid(tmax: float, dt: float) -> np.ndarray:
    """Uniform grid over [0, tmax] whose end snaps to a whole step count."""
    if tmax <= 0 or dt <= 0:
        raise DomainError(f"need tmax > 0 and dt > 0, got tmax={tmax}, dt={dt}")
    steps = max(1, round(tmax / dt))
    return np.linspace(0.0, steps * dt, steps + 1)


def _validate_grid(times) -> np.ndarray:
    t = np.ascontiguousarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("time grid must be a nonempty 1-D array")
    if t[0] != 0.0:
        raise DomainError("time grid must start at t = 0")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise DomainError("time grid must be strictly ascending")
    return t


@dataclass(frozen=True)
class OtocSeries:
    """Sampled F(t) with the protocol and initial-state provenance."""

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    protocol: str
    state_label: str
    params: LmgParams
    field_strength: float = 0.0
    level: int | None = None


@dataclass(frozen=True)
class LongTimeAverage:
    """Trapezoidal mean of Re F over the sampled horizon.

    estimator_halfwidth is the absolute difference between the means over
    the full horizon and over its first half, a cheap convergence gauge.
    """

    value: float
    total_time: float
    sample_count: int
    estimator_halfwidth: float


@dataclass(frozen=True)
class CommutatorSeries:
    """Squared-commutator diagnostics alongside F(t).

    c_values follows the printed relation C = 2 Re A - 2 Re F. For the
    Hermitian, non-unitary choice W = V = S_x/S that relation coincides
    with the expectation of [W(t), V]^dag [W(t), V] only when the state is
    an eigenstate of the evolving Hamiltonian; the genuine commutator norm
    (always nonnegative) is kept separately in c_norm_values.
    """

    times: np.ndarray = field(repr=False)
    c_values: np.ndarray = field(repr=False)
    a_values: np.ndarray = field(repr=False)
    f_values: np.ndarray = field(repr=False)
    c_norm_values: np.ndarray = field(repr=False)
    protocol: str
    state_label: str


def _matmul_real_complex(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """a @ x for real a and C-contiguous complex x via one real GEMM."""
    rows = x.shape[0]
    out = a @ x.view(np.float64).reshape(rows, -1)
    return out.view(np.complex128)


def _frame_quench(spec: QuenchSpec):
    params = spec.params
    d0 = eigh(build_hamiltonian(params, Basis.X))
    psi0 = d0.vectors[:, 0]
    df = eigh(build_postquench(spec, Basis.X))
    w_diag = params.sector.m_values() / params.sector.total_spin
    w_eig = df.vectors.T @ (w_diag[:, None] * df.vectors)
    psi_eig = df.vectors.T @ psi0
    return df.values, w_eig, psi_eig


def _frame_micro(params: LmgParams):
    d = eigh(build_hamiltonian(params, Basis.X))
    w_diag = params.sector.m_values() / params.sector.total_spin
    w_eig = d.vectors.T @ (w_diag[:, None] * d.vectors)
    return d.values, w_eig


def _otoc_values(energies, w_eig, psi_eig, times) -> np.ndarray:
    """F(t) on the grid; three dense products per time block."""
    u = w_eig @ psi_eig
    out = np.empty(times.size, dtype=np.complex128)
    for lo in range(0, times.size, _BLOCK):
        t = times[lo:lo + _BLOCK]
        phases = np.exp(1j * energies[:, None] * t[None, :])
        x = np.conj(phases) * u[:, None]
        x = _matmul_real_complex(w_eig, x)
        x *= phases
        x = _matmul_real_complex(w_eig, x)          # V sandwich
        x *= np.conj(phases)
        x = _matmul_real_complex(w_eig, x)
        x *= phases
        out[lo:lo + t.size] = psi_eig @ x
    return out


def _otoc_with_commutator(energies, w_eig, psi_eig, times):
    """F, the A term, relation-C and the commutator norm, batched."""
    u = w_eig @ psi_eig
    n = times.size
    f = np.empty(n, dtype=np.complex128)
    a_term = np.empty(n, dtype=np.complex128)
    c_norm = np.empty(n)
    for lo in range(0, n, _BLOCK):
        t = times[lo:lo + _BLOCK]
        sl = slice(lo, lo + t.size)
        phases = np.exp(1j * energies[:, None] * t[None, :])
        wt_psi = phases * _matmul_real_complex(w_eig, np.conj(phases) * psi_eig[:, None])
        wt_v_psi = phases * _matmul_real_complex(w_eig, np.conj(phases) * u[:, None])
        v_wt_v_psi = _matmul_real_complex(w_eig, wt_v_psi)
        v_wt_psi = _matmul_real_complex(w_eig, wt_psi)
        f[sl] = np.einsum("ib,ib->b", np.conj(wt_psi), v_wt_v_psi)
        a_term[sl] = np.einsum("ib,ib->b", np.conj(wt_v_psi), wt_v_psi)
        diff = wt_v_psi - v_wt_psi
        c_norm[sl] = (diff.real ** 2 + diff.imag ** 2).sum(axis=0)
    c_rel = 2.0 * a_term.real - 2.0 * f.real
    return f, a_term, c_rel, c_norm


def quench_otoc(spec: QuenchSpec, times) -> OtocSeries:
    """F(t) for the quench protocol: ground state of the bare Hamiltonian,
    Heisenberg evolution under the field-shifted one."""
    t = _validate_grid(times)
    energies, w_eig, psi_eig = _frame_quench(spec)
    values = _otoc_values(energies, w_eig, psi_eig, t)
    p = spec.params
    return OtocSeries(
        times=t, values=values, protocol="quench",
        state_label=f"ground(alpha={p.alpha}, N={p.sector.n_spins})",
        params=p, field_strength=spec.field_strength)


def micro_otoc(params: LmgParams, n: int, times) -> OtocSeries:
    """F_n(t) in the n-th eigenstate, evolution under the bare Hamiltonian."""
    d = params.sector.dimension
    if not 0 <= n < d:
        raise DomainError(f"level index {n} outside [0, {d - 1}]")
    t = _validate_grid(times)
    energies, w_eig = _frame_micro(params)
    psi_eig = np.zeros(d)
    psi_eig[n] = 1.0
    values = _otoc_values(energies, w_eig, psi_eig, t)
    return OtocSeries(
        times=t, values=values, protocol="microcanonical",
        state_label=f"level(n={n}, alpha={params.alpha}, N={params.sector.n_spins})",
        params=params, level=n)


def micro_otoc_all(params: LmgParams, times) -> list[OtocSeries]:
    """F_n(t) for every level at once.

    One D x D product pair per time sample serves all levels together:
    with M(t) = W(t) V in the eigenbasis, F_n(t) = [M(t)^2]_{nn}.
    """
    t = _validate_grid(times)
    energies, w_eig = _frame_micro(params)
    d = energies.size
    values = np.empty((d, t.size), dtype=np.complex128)
    for j, tj in enumerate(t):
        p = np.exp(1j * energies * tj)
        m = p[:, None] * _matmul_real_complex(w_eig, np.ascontiguousarray(np.conj(p)[:, None] * w_eig))
        values[:, j] = np.einsum("ij,ji->i", m, m)
    return [OtocSeries(times=t, values=values[n].copy(), protocol="microcanonical",
                       state_label=f"level(n={n}, alpha={params.alpha}, N={params.sector.n_spins})",
                       params=params, level=n)
            for n in range(d)]


def micro_fbar_all(params: LmgParams, times):
    """Trapezoidal mean of Re F_n over the grid for every level, streamed.

    Returns (fbar, halfwidth) arrays of length D without materializing the
    D x len(times) series. halfwidth mirrors LongTimeAverage.
    """
    t = _validate_grid(times)
    if t.size < 2:
        raise DomainError("averaging needs at least two time samples")
    energies, w_eig = _frame_micro(params)
    d = energies.size
    w_full = _trapezoid_weights(t)
    half_idx = _half_horizon_index(t)
    w_half = np.zeros_like(w_full)
    w_half[:half_idx + 1] = _trapezoid_weights(t[:half_idx + 1])
    acc_full = np.zeros(d)
    acc_half = np.zeros(d)
    for j, tj in enumerate(t):
        p = np.exp(1j * energies * tj)
        m = p[:, None] * _matmul_real_complex(w_eig, np.ascontiguousarray(np.conj(p)[:, None] * w_eig))
        re = np.einsum("ij,ji->i", m, m).real
        acc_full += w_full[j] * re
        acc_half += w_half[j] * re
    return acc_full, np.abs(acc_full - acc_half)


def _trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """Weights turning a dot product into the trapezoidal mean over [t0, t_end]."""
    if t.size < 2:
        return np.zeros(t.size)
    w = np.zeros(t.size)
    dt = np.diff(t)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w / (t[-1] - t[0])


def _half_horizon_index(t: np.ndarray) -> int:
    """Largest index at or below half the horizon (at least 1)."""
    j = int(np.searchsorted(t, t[-1] / 2.0, side="right") - 1)
    return max(j, 1)


def long_time_average(series: OtocSeries) -> LongTimeAverage:
    t = series.times
    if t.size < 2:
        raise DomainError("averaging needs at least two time samples")
    re = series.values.real
    value = float(np.trapezoid(re, t) / (t[-1] - t[0]))
    j = _half_horizon_index(t)
    half = float(np.trapezoid(re[:j + 1], t[:j + 1]) / (t[j] - t[0]))
    return LongTimeAverage(value=value, total_time=float(t[-1]),
                           sample_count=int(t.size),
                           estimator_halfwidth=abs(value - half))


def commutator_series(spec: QuenchSpec, times) -> CommutatorSeries:
    """Quench-protocol F(t), A(t) and both C readings on the grid."""
    t = _validate_grid(times)
    energies, w_eig, psi_eig = _frame_quench(spec)
    f, a_term, c_rel, c_norm = _otoc_with_commutator(energies, w_eig, psi_eig, t)
    p = spec.params
    return CommutatorSeries(
        times=t, c_values=c_rel, a_values=a_term, f_values=f, c_norm_values=c_norm,
        protocol="quench",
        state_label=f"ground(alpha={p.alpha}, N={p.sector.n_spins})")


def commutator_series_micro(params: LmgParams, n: int, times) -> CommutatorSeries:
    """Microcanonical-protocol counterpart of commutator_series."""
    d = params.sector.dimension
    if not 0 <= n < d:
        raise DomainError(f"level index {n} outside [0, {d - 1}]")
    t = _validate_grid(times)
    energies, w_eig = _frame_micro(params)
    psi_eig = np.zeros(d)
    psi_eig[n] = 1.0
    f, a_term, c_rel, c_norm = _otoc_with_commutator(energies, w_eig, psi_eig, t)
    return CommutatorSeries(
        times=t, c_values=c_rel, a_values=a_term, f_values=f, c_norm_values=c_norm,
        protocol="microcanonical",
        state_label=f"level(n={n}, alpha={params.alpha}, N={params.sector.n_spins})")


def diagonal_ensemble_average(target, *, horizon: float | None = None,
                              gap_tol: float = 1e-10,
                              reference_horizon: float = DEFAULT_AVERAGING_TIME,
                              materiality: float = 1e-3) -> float:
    """Spectral-sum oracle for the long-time average of Re F.

    target is either a QuenchSpec (quench protocol) or a (params, n) pair
    (microcanonical). With horizon=None the infinite-time limit is taken:
    only terms whose four-energy combination is stationary survive, with
    degeneracies clustered at gap_tol; a warning is raised when gaps too
    small to dephase within reference_horizon move the answer by more than
    `materiality`. A finite horizon instead evaluates the exact mean of
    Re F over [0, horizon], every term weighted by its analytic window
    factor. Cost is O(D^4); intended for small sectors.
    """
    if isinstance(target, QuenchSpec):
        energies, w_eig, psi_eig = _frame_quench(target)
    else:
        params, n = target
        d = params.sector.dimension
        if not 0 <= n < d:
            raise DomainError(f"level index {n} outside [0, {d - 1}]")
        energies, w_eig = _frame_micro(params)
        psi_eig = np.zeros(d)
        psi_eig[n] = 1.0

    if horizon is not None:
        return _spectral_mean(energies, w_eig, psi_eig, horizon)

    labels = np.zeros(energies.size, dtype=int)
    for i in range(1, energies.size):
        labels[i] = labels[i - 1] + (1 if energies[i] - energies[i - 1] > gap_tol else 0)
    clustered = np.array([energies[labels == g].mean()
                          for g in range(labels[-1] + 1)])[labels]
    value = _spectral_mean(clustered, w_eig, psi_eig, None, gap_tol=gap_tol)
    finite = _spectral_mean(energies, w_eig, psi_eig, reference_horizon)
    if abs(finite - value) > materiality:
        warnings.warn(
            f"near-degenerate gaps below 2*pi/{reference_horizon:g} leave the "
            f"infinite-time average ({value:.6g}) materially different from the "
            f"horizon-{reference_horizon:g} mean ({finite:.6g})",
            stacklevel=2)
    return value


def _spectral_mean(energies, w_eig, psi_eig, horizon, gap_tol=1e-10) -> float:
    u = w_eig @ psi_eig
    d = energies.size
    total = 0.0
    for a in range(d):
        row = psi_eig[a] * w_eig[a]
        cols = np.nonzero(row)[0]
        for b in cols:
            g = (energies[a] - energies[b]) + energies[:, None] - energies[None, :]
            if horizon is None:
                kern = (np.abs(g) < 0.5 * gap_tol).astype(float)
            else:
                x = 0.5 * g * horizon
                kern = np.cos(x) * np.sinc(x / np.pi)
            quad = w_eig[b][:, None] * w_eig * u[None, :]
            total += row[b] * float((quad * kern).sum())
    return total
