"""Model assembly: the collective-spin Hamiltonian, its quenched variant,
the critical field strength, energy rescaling and the mean-field oracle.

The Hamiltonian is

    H = -(2(1-alpha)/S) S_x^2 + alpha (S_z + S),        0 <= alpha <= 1,

acting in the symmetric S = N/2 sector. A quench adds a longitudinal
field term lam * S_z at t = 0. In the X-basis H is tridiagonal:
diagonal -(2(1-alpha)/S) m^2 + alpha S, first off-diagonal
(alpha/2) sqrt(S(S+1) - m(m-1)). The excited-state critical energy sits
at E = 0 for 0 < alpha < 0.8.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .spin_ops import Basis, OperatorMatrix, SpinSector, build_sx, build_sz

CRITICAL_ENERGY = 0.0
ALPHA_QPT = 0.8


@dataclass(frozen=True)
class LmgParams:
    alpha: float
    sector: SpinSector

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class QuenchSpec:
    """Pre-quench model plus the field strength switched on at t = 0."""

    params: LmgParams
    field_strength: float

    def __post_init__(self):
        if self.field_strength < 0.0:
            raise DomainError(f"field strength must be nonnegative, got {self.field_strength}")


def build_hamiltonian(params: LmgParams, basis: Basis = Basis.X) -> OperatorMatrix:
    sector = params.sector
    alpha = params.alpha
    s = sector.total_spin
    if basis == Basis.X:
        m = sector.m_values()
        diag = -(2.0 * (1.0 - alpha) / s) * m * m + alpha * s
        off = (alpha / 2.0) * sector.ladder_strengths()
        entries = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    else:
        sx = build_sx(sector, Basis.Z).entries
        sx2 = sx @ sx
        sx2 = (sx2 + sx2.T) / 2      # restore exact symmetry after the product
        entries = (-(2.0 * (1.0 - alpha) / s) * sx2
                   + alpha * (build_sz(sector, Basis.Z).entries + s * np.eye(sector.dimension)))
    return OperatorMatrix(sector, basis, np.ascontiguousarray(entries))


def build_postquench(spec: QuenchSpec, basis: Basis = Basis.X) -> OperatorMatrix:
    h = build_hamiltonian(spec.params, basis)
    if spec.field_strength == 0.0:
        return h
    sz = build_sz(spec.params.sector, basis)
    entries = h.entries + spec.field_strength * sz.entries
    entries = (entries + entries.T) / 2
    return OperatorMatrix(spec.params.sector, basis, np.ascontiguousarray(entries))


def critical_lambda(alpha: float) -> float:
    """Field strength placing the quenched system at the critical energy.

    Valid only in the broken-symmetry phase alpha < 0.8; outside it the
    formula has no derivation, so the request is rejected rather than
    extrapolated.
    """
    if not 0.0 <= alpha < ALPHA_QPT:
        raise DomainError(f"critical field is defined for 0 <= alpha < {ALPHA_QPT}, got {alpha}")
    return (4.0 - 5.0 * alpha) / 2.0


def rescale_energies(energies) -> np.ndarray:
    """Affine map of an ascending spectrum onto [0, 2]."""
    e = np.asarray(energies, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise DomainError("spectrum must be a nonempty 1-D array")
    if np.any(np.diff(e) < 0):
        raise DomainError("spectrum must be ascending")
    span = e[-1] - e[0]
    if span <= 0.0:
        raise DomainError("degenerate spectrum: highest energy equals lowest")
    return 2.0 * (e - e[0]) / span


def rescale_energy_point(energies, value: float) -> float:
    """The same affine map applied to an arbitrary energy value."""
    e = np.asarray(energies, dtype=float)
    span = e[-1] - e[0]
    if span <= 0.0:
        raise DomainError("degenerate spectrum: highest energy equals lowest")
    return 2.0 * (float(value) - e[0]) / span


def critical_rescaled_energy(energies) -> float:
    return rescale_energy_point(energies, CRITICAL_ENERGY)


def classical_ground_energy(alpha: float) -> float:
    """Minimum of the classical energy surface per spin over the Bloch sphere.

    e(theta) = -(1-alpha) sin(theta)^2 + (alpha/2)(cos(theta) + 1),
    minimized over the polar angle with a bounded scalar search. Serves as
    the mean-field cross-check for finite-N ground energies per spin.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")

    def energy(theta):
        ct = np.cos(theta)
        return -(1.0 - alpha) * (1.0 - ct * ct) + 0.5 * alpha * (ct + 1.0)

    res = minimize_scalar(energy, bounds=(0.0, np.pi), method="bounded",
                          options={"xatol": 1e-13})
    # the pole theta=pi is a boundary candidate the bounded search cannot
    # quite reach; compare explicitly
    return float(min(res.fun, energy(np.pi), energy(0.0)))
