"""Order-parameter analysis on top of the OTOC engine.

Normalized long-time averages as functions of quench strength and of
eigenstate energy, parameter sweeps with per-cell diagnostics, the
near-critical spread diagnostic, and ordinary least-squares power-law
fits for the three scaling exponents.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import eigh
from .errors import DomainError, NumericalError
from .model import (LmgParams, QuenchSpec, build_hamiltonian, critical_lambda,
                    critical_rescaled_energy, rescale_energies)
from .otoc import (DEFAULT_AVERAGING_DT, DEFAULT_AVERAGING_TIME,
                   LongTimeAverage, long_time_average, make_time_grid,
                   micro_fbar_all, quench_otoc)
from .spin_ops import SpinSector

# Fit windows applied by default, on the fitting abscissa (distance from
# the critical point). Both exclude the finite-size saturation floor close
# to criticality; the field window additionally sits past the crossover
# hump where the asymptotic power law has set in.
DEFAULT_FIELD_FIT_WINDOW = (0.2, 0.5)
DEFAULT_ENERGY_FIT_WINDOW = (0.015, 0.1)
DEFAULT_SIZES = (100, 200, 300, 400)

WORKERS_ENV = "LMG_OTOC_WORKERS"

REFERENCE_FLOOR = 1e-12


@dataclass(frozen=True)
class AveragingConfig:
    """Horizon and sampling step used for long-time averages."""

    total_time: float = DEFAULT_AVERAGING_TIME
    dt: float = DEFAULT_AVERAGING_DT

    def __post_init__(self):
        if self.total_time <= 0 or self.dt <= 0 or self.dt > self.total_time:
            raise DomainError(f"invalid averaging config: T={self.total_time}, dt={self.dt}")

    def time_grid(self) -> np.ndarray:
        return make_time_grid(self.total_time, self.dt)


@dataclass(frozen=True)
class NormalizedAverage:
    """A raw long-time average together with its normalization reference.

    flagged marks cells whose half-horizon estimator drift is not small
    against the reference, i.e. the average may be under-converged.
    """

    raw: float
    reference: float
    value: float
    halfwidth: float
    flagged: bool


@dataclass(frozen=True)
class SweepGrid:
    alphas: tuple
    lambdas: tuple
    n_spins: int
    cells: list = field(repr=False)            # cells[i][j] or None on row abort
    lambda_c: tuple = ()                       # per alpha; None where undefined
    row_errors: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MicroScan:
    """Per-level long-time averages over the whole spectrum."""

    alpha: float
    n_spins: int
    energies: np.ndarray = field(repr=False)
    energies_per_spin: np.ndarray = field(repr=False)
    rescaled: np.ndarray = field(repr=False)
    fbar_raw: np.ndarray = field(repr=False)
    fbar_norm: np.ndarray = field(repr=False)
    halfwidths: np.ndarray = field(repr=False)
    flagged: np.ndarray = field(repr=False)
    critical_rescaled: float = 0.0


@dataclass(frozen=True)
class FitResult:
    """OLS power-law fit on log-log axes.

    window records the abscissa range of the points actually used, not the
    requested bounds. xs/ys carry those points for reporting.
    """

    exponent: float
    exponent_stderr: float
    amplitude: float
    window: tuple
    n_points: int
    xs: np.ndarray = field(repr=False, default=None)
    ys: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class DnDiagnostic:
    """Spread of the normalized average over levels bracketing the critical one."""

    n_c: int
    window: tuple
    value: float


def resolve_workers(requested=None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def quench_fbar(spec: QuenchSpec, config: AveragingConfig) -> LongTimeAverage:
    """Long-time average of Re F for one quench."""
    return long_time_average(quench_otoc(spec, config.time_grid()))


def _normalize(raw: LongTimeAverage, reference: float) -> NormalizedAverage:
    return NormalizedAverage(
        raw=raw.value, reference=reference, value=raw.value / reference,
        halfwidth=raw.estimator_halfwidth,
        flagged=not raw.estimator_halfwidth < 0.01 * abs(reference))


def quench_sweep(alphas, lambdas, n_spins: int, config: AveragingConfig,
                 max_workers=None, precomputed=None, on_cell=None) -> SweepGrid:
    """Normalized averages over an (alpha, lambda) grid.

    Each cell is an independent job; rows are normalized by their own
    lambda=0 average and abort (cells None) when that reference is
    numerically zero. precomputed maps (alpha, lambda) to (raw, halfwidth)
    pairs and lets interrupted runs resume; on_cell, when given, is called
    with (alpha, lambda, raw, halfwidth) as each fresh cell completes.
    """
    alphas = tuple(float(a) for a in alphas)
    lambdas = tuple(float(lam) for lam in lambdas)
    sector = SpinSector(n_spins)
    precomputed = dict(precomputed or {})

    lams_todo = ((0.0,) if 0.0 not in lambdas else ()) + lambdas
    wanted = [(a, lam) for a in alphas for lam in lams_todo
              if (a, lam) not in precomputed]

    def job(cell):
        a, lam = cell
        avg = quench_fbar(QuenchSpec(LmgParams(a, sector), lam), config)
        return cell, avg.value, avg.estimator_halfwidth

    def settle(cell, raw, halfwidth):
        precomputed[cell] = (raw, halfwidth)
        if on_cell is not None:
            on_cell(cell[0], cell[1], raw, halfwidth)

    workers = resolve_workers(max_workers)
    if workers > 1 and len(wanted) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(job, c) for c in wanted]
            for fut in as_completed(futures):
                settle(*fut.result())
    else:
        for c in wanted:
            settle(*job(c))

    critical = []
    for a in alphas:
        try:
            critical.append(critical_lambda(a))
        except DomainError:
            critical.append(None)

    cells = []
    row_errors = {}
    for a in alphas:
        ref = precomputed[(a, 0.0)][0]
        if abs(ref) < REFERENCE_FLOOR:
            message = (f"zero-field reference {ref:.3e} below "
                       f"{REFERENCE_FLOOR:g}; row aborted")
            row_errors[a] = message
            warnings.warn(f"alpha={a}: {message}", stacklevel=2)
            cells.append([None] * len(lambdas))
            continue
        row = []
        for lam in lambdas:
            raw, halfwidth = precomputed[(a, lam)]
            row.append(NormalizedAverage(
                raw=raw, reference=ref, value=raw / ref, halfwidth=halfwidth,
                flagged=not halfwidth < 0.01 * abs(ref)))
        cells.append(row)
    return SweepGrid(alphas=alphas, lambdas=lambdas, n_spins=n_spins,
                     cells=cells, lambda_c=tuple(critical), row_errors=row_errors)


def microcanonical_scan(params: LmgParams, config: AveragingConfig) -> MicroScan:
    """Normalized long-time average for every eigenstate of one model."""
    energies = eigh(build_hamiltonian(params)).values
    fbar, halfwidths = micro_fbar_all(params, config.time_grid())
    ref = fbar[0]
    if abs(ref) < REFERENCE_FLOOR:
        raise NumericalError(f"ground-state reference {ref:.3e} too small to normalize by")
    n = params.sector.n_spins
    return MicroScan(
        alpha=params.alpha, n_spins=n,
        energies=energies, energies_per_spin=energies / n,
        rescaled=rescale_energies(energies),
        fbar_raw=fbar, fbar_norm=fbar / ref, halfwidths=halfwidths,
        flagged=~(halfwidths < 0.01 * abs(ref)),
        critical_rescaled=critical_rescaled_energy(energies))


def fit_power_law(x, y, window=None) -> FitResult:
    """OLS fit of y = amplitude * x^exponent on log-log axes.

    Only strictly positive (x, y) pairs inside the window participate;
    fewer than three such points is an error rather than a fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    if window is not None:
        lo, hi = window
        mask &= (x >= lo) & (x <= hi)
    xs, ys = x[mask], y[mask]
    if xs.size < 3:
        raise DomainError(f"power-law fit needs at least 3 usable points, got {xs.size}")
    lx, ly = np.log(xs), np.log(ys)
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    slope, intercept = coef
    resid = ly - design @ coef
    dof = xs.size - 2
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    denom = float(((lx - lx.mean()) ** 2).sum())
    stderr = float(np.sqrt(sigma2 / denom)) if denom > 0 else float("inf")
    return FitResult(exponent=float(slope), exponent_stderr=stderr,
                     amplitude=float(np.exp(intercept)),
                     window=(float(xs.min()), float(xs.max())),
                     n_points=int(xs.size), xs=xs, ys=ys)


def scaling_mu(alpha: float, sizes=DEFAULT_SIZES,
               config: AveragingConfig = AveragingConfig(),
               max_workers=None) -> FitResult:
    """Decay exponent of the raw critical-field average against system size.

    Fits raw F-bar at lambda = lambda_c(alpha) over the given sizes and
    returns the exponent mu of the decay law size^(-mu); positive mu means
    the critical average shrinks with growing N.
    """
    lam_c = critical_lambda(alpha)
    sizes = tuple(int(s) for s in sizes)

    def job(n):
        return quench_fbar(QuenchSpec(LmgParams(alpha, SpinSector(n)), lam_c), config).value

    workers = resolve_workers(max_workers)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fbars = list(pool.map(job, sizes))
    else:
        fbars = [job(n) for n in sizes]
    fit = fit_power_law(np.array(sizes, dtype=float), np.array(fbars))
    return FitResult(exponent=-fit.exponent, exponent_stderr=fit.exponent_stderr,
                     amplitude=fit.amplitude, window=fit.window,
                     n_points=fit.n_points, xs=fit.xs, ys=fit.ys)


def scaling_gamma_lambda(alpha: float, n_spins: int,
                         lambdas=None,
                         config: AveragingConfig = AveragingConfig(),
                         window=DEFAULT_FIELD_FIT_WINDOW,
                         max_workers=None) -> FitResult:
    """Power law of the normalized average approaching the critical field
    from below: value ~ |lambda - lambda_c|^gamma.

    The default field grid spans the fit window in distance from the
    critical point, geometrically spaced.
    """
    lam_c = critical_lambda(alpha)
    if lambdas is None:
        distances = np.geomspace(window[0], window[1], 8)
        lambdas = lam_c - distances
        if np.any(lambdas < 0):
            raise DomainError(
                f"default fit window reaches below lambda=0 for alpha={alpha}; "
                f"pass an explicit field grid")
    else:
        lambdas = np.asarray(lambdas, dtype=float)
        distances = lam_c - lambdas
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas >= lam_c):
        raise DomainError("field grid must stay strictly below the critical field")
    if np.any(lambdas < 0):
        raise DomainError("field strengths must be nonnegative")
    sector = SpinSector(n_spins)

    def job(lam):
        return quench_fbar(QuenchSpec(LmgParams(alpha, sector), float(lam)), config).value

    todo = [0.0] + list(lambdas)
    workers = resolve_workers(max_workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(job, todo))
    else:
        out = [job(lam) for lam in todo]
    ref = out[0]
    if abs(ref) < REFERENCE_FLOOR:
        raise NumericalError("zero-field reference is numerically zero")
    norm = np.array(out[1:]) / ref
    return fit_power_law(distances, norm, window=window)


def scaling_gamma_epsilon(alpha: float, n_spins: int,
                          config: AveragingConfig = AveragingConfig(),
                          window=DEFAULT_ENERGY_FIT_WINDOW,
                          scan: MicroScan = None) -> FitResult:
    """Power law of the per-level normalized average approaching the
    critical energy from below, against rescaled-energy distance."""
    if scan is None:
        scan = microcanonical_scan(LmgParams(alpha, SpinSector(n_spins)),
                                   config)
    below = scan.energies < 0.0
    dist = scan.critical_rescaled - scan.rescaled[below]
    return fit_power_law(dist, scan.fbar_norm[below], window=window)


def dn_diagnostic(alpha: float, sizes,
                  config: AveragingConfig = AveragingConfig(),
                  scans=None) -> list:
    """(N, spread) pairs measuring how sharply the normalized average
    drops across the critical level; shrinking spread with growing N is
    the finite-size signature.

    The window covers levels [n_c - 15, n_c + 5] clipped to the spectrum,
    where n_c is the level closest to the critical energy (ties resolve
    to the lower index).
    """
    out = []
    for k, n in enumerate(int(s) for s in sizes):
        scan = scans[k] if scans is not None else microcanonical_scan(
            LmgParams(alpha, SpinSector(n)), config)
        n_c = int(np.argmin(np.abs(scan.energies)))
        lo = max(n_c - 15, 0)
        hi = min(n_c + 5, n)
        values = scan.fbar_norm[lo:hi + 1]
        out.append((n, DnDiagnostic(n_c=n_c, window=(lo, hi),
                                    value=float(values.max() - values.min()))))
    return out
