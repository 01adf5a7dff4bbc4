"""Collective spin operators for the symmetric S = N/2 sector.

All matrices are dense, real and D x D with D = N + 1, tagged with the
basis they are written in. Two bases are supported: the S_z eigenbasis
("z") and the S_x eigenbasis ("x"), both ordered by magnetic quantum
number ascending from -S to +S. S_y is kept real by storing the
antisymmetric matrix for (-i) S_y; the factor i is reattached only where
complex arithmetic is genuinely needed.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import BasisMismatchError, DomainError


class Basis(str, Enum):
    Z = "z"
    X = "x"


@dataclass(frozen=True)
class SpinSector:
    """The symmetric sector of N spin-1/2 sites: S = N/2, dimension N + 1.

    Half-integer bookkeeping stays exact by deriving everything from the
    integer N; twice the magnetic quantum numbers are integers.
    """

    n_spins: int

    def __post_init__(self):
        if not isinstance(self.n_spins, (int, np.integer)) or self.n_spins < 1:
            raise DomainError(f"n_spins must be a positive integer, got {self.n_spins!r}")

    @property
    def twice_spin(self) -> int:
        return self.n_spins

    @property
    def total_spin(self) -> float:
        return self.n_spins / 2

    @property
    def dimension(self) -> int:
        return self.n_spins + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers -S .. +S ascending. Exact in binary."""
        return (2.0 * np.arange(self.dimension) - self.n_spins) / 2.0

    def ladder_strengths(self) -> np.ndarray:
        """sqrt(S(S+1) - m(m-1)) coupling m-1 to m, for m = -S+1 .. +S.

        Evaluated from integers (twice-m) so the radicand is exact.
        """
        n = self.n_spins
        tm = 2 * np.arange(1, self.dimension) - n          # twice m
        return np.sqrt(float(n * (n + 2)) - tm * (tm - 2.0)) / 2.0


@dataclass(frozen=True)
class OperatorMatrix:
    """A collective-spin operator as a dense real matrix in a tagged basis.

    skew=True marks storage of (-i) times an imaginary-antisymmetric
    operator (only S_y uses this); such entries are antisymmetric instead
    of symmetric.
    """

    sector: SpinSector
    basis: Basis
    entries: np.ndarray = field(repr=False)
    skew: bool = False

    def __post_init__(self):
        d = self.sector.dimension
        e = self.entries
        if e.shape != (d, d) or e.dtype != np.float64:
            raise DomainError(f"entries must be float64 {d}x{d}, got {e.dtype} {e.shape}")
        if self.skew:
            if not np.array_equal(e, -e.T):
                raise DomainError("skew operator entries must be exactly antisymmetric")
        elif not np.array_equal(e, e.T):
            raise DomainError("operator entries must be exactly symmetric")
        e.setflags(write=False)


def _require_same_frame(a: OperatorMatrix, b: OperatorMatrix):
    if a.sector != b.sector:
        raise DomainError("operators live in different sectors")
    if a.basis != b.basis:
        raise BasisMismatchError(f"cannot combine {a.basis.value}-basis with {b.basis.value}-basis")


def _tridiagonal(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    m = np.diag(diag).astype(np.float64)
    m += np.diag(off, 1)
    m += np.diag(off, -1)
    return m


def build_sz(sector: SpinSector, basis: Basis = Basis.Z) -> OperatorMatrix:
    """S_z: diagonal m in its own basis, half-ladder tridiagonal in the X-basis."""
    if basis == Basis.Z:
        entries = np.diag(sector.m_values())
    else:
        c = sector.ladder_strengths()
        entries = _tridiagonal(np.zeros(sector.dimension), c / 2)
    return OperatorMatrix(sector, basis, entries)


def build_sx(sector: SpinSector, basis: Basis = Basis.Z) -> OperatorMatrix:
    """S_x: tridiagonal (S+ + S-)/2 in the Z-basis, diagonal m in the X-basis."""
    if basis == Basis.X:
        entries = np.diag(sector.m_values())
    else:
        c = sector.ladder_strengths()
        entries = _tridiagonal(np.zeros(sector.dimension), c / 2)
    return OperatorMatrix(sector, basis, entries)


def build_sy_times_minus_i(sector: SpinSector, basis: Basis = Basis.Z) -> OperatorMatrix:
    """The real antisymmetric matrix K with S_y = i K.

    In the Z-basis K = (S- - S+)/2. In the X-basis the phase convention
    that makes S_z real with positive off-diagonals fixes the opposite
    sign, K = (S+ - S-)/2 of the X-frame ladders; both satisfy the
    commutator algebra, which the tests verify after complexification.
    """
    c = sector.ladder_strengths()
    upper = c / 2 if basis == Basis.Z else -c / 2
    entries = np.diag(upper, 1) - np.diag(upper, -1)
    return OperatorMatrix(sector, basis, np.ascontiguousarray(entries), skew=True)


def scaled_op(op: OperatorMatrix, factor: float) -> OperatorMatrix:
    return OperatorMatrix(op.sector, op.basis, op.entries * float(factor), skew=op.skew)


@lru_cache(maxsize=16)
def rotation_z_to_x(sector: SpinSector) -> np.ndarray:
    """Orthogonal U with U^T M_z U giving the X-basis form, for every operator.

    A quarter turn generated by S_y maps the x-axis onto the z-axis; the
    trailing alternating-parity diagonal flips the X-basis state phases so
    that S_z comes out with positive off-diagonals.
    """
    k = build_sy_times_minus_i(sector, Basis.Z).entries
    u = expm((np.pi / 2) * k)
    u = u * ((-1.0) ** np.arange(sector.dimension))[None, :]
    return np.ascontiguousarray(u)


def basis_change(op: OperatorMatrix, target: Basis) -> OperatorMatrix:
    if op.basis == target:
        raise DomainError(f"operator already in {target.value}-basis")
    u = rotation_z_to_x(op.sector)
    if target == Basis.X:
        entries = u.T @ op.entries @ u
    else:
        entries = u @ op.entries @ u.T
    # conjugation by an orthogonal matrix preserves (anti)symmetry only up
    # to rounding; restore it exactly so downstream invariants stay strict
    entries = (entries - entries.T) / 2 if op.skew else (entries + entries.T) / 2
    return OperatorMatrix(op.sector, target, np.ascontiguousarray(entries), skew=op.skew)


def as_complex_operator(op: OperatorMatrix) -> np.ndarray:
    """The actual operator as a complex matrix (reattaches i for skew storage)."""
    if op.skew:
        return 1j * op.entries
    return op.entries.astype(complex)
