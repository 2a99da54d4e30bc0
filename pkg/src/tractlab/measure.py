"""Area and density estimation for nested survivor sets and escaping sets.

Square regions are classified cell-by-cell (center-point rule).  Two engines:

* tn_density iterates the log-coordinate map F and counts cells whose first
  n iterates stay in L = {Re F >= exp(b Re z)}; the count is nested in n by
  construction, so the density sequence is exactly nonincreasing.

* z_plane_escape_density iterates f itself; a cell survives level n when its
  first iterate already exceeds the escape radius and |f^{k+1}| >= |f^k| for
  all k <= n (monotone-growth proxy, also nested).  Overflow certifies escape.

dens(A, B) = area(A intersect B) / area(B) reduces to cell fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import (
    DomainError,
    FunctionSpec,
    LOG_OVERFLOW,
    ParameterError,
    log_eval_grid,
)

_EXIT_SENTINEL = -1


@dataclass(frozen=True)
class SquareRegion:
    """Axis-aligned square; q_square(w) is the square of side Re w centered at w."""

    center: complex
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise ParameterError("side must be positive")

    @classmethod
    def q_square(cls, center: complex) -> "SquareRegion":
        center = complex(center)
        if not center.real > 0:
            raise ParameterError("q_square needs Re center > 0")
        return cls(center=center, side=center.real)

    def cell_centers(self, resolution: int) -> np.ndarray:
        if resolution < 2:
            raise ParameterError("resolution too small")
        half = self.side / 2.0
        xs = self.center.real - half + (np.arange(resolution) + 0.5) * (self.side / resolution)
        ys = self.center.imag - half + (np.arange(resolution) + 0.5) * (self.side / resolution)
        return xs[None, :] + 1j * ys[:, None]


@dataclass(frozen=True)
class EscapeGridReport:
    """Per-cell first-failure index plus the density sequence dens(T_n, P).

    cell_exit == -1 marks cells that never failed within n_max.
    density_sequence[n] is the fraction of cells surviving level n; it is
    nonincreasing by construction.  For the log-coordinate engine,
    relative_density[n] = dens(T_n, T_0 intersect P).
    """

    kind: str
    region: SquareRegion
    resolution: int
    n_max: int
    cell_exit: np.ndarray = field(repr=False)
    density_sequence: np.ndarray
    relative_density: np.ndarray | None
    params: dict

    def __post_init__(self):
        d = self.density_sequence
        if np.any(d < -1e-12) or np.any(d > 1.0 + 1e-12):
            raise ParameterError("densities must lie in [0, 1]")
        if np.any(np.diff(d) > 1e-12):
            raise ParameterError("density sequence must be nonincreasing")


def _survival_densities(exit_idx: np.ndarray, n_max: int) -> np.ndarray:
    total = exit_idx.size
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        out[n] = np.count_nonzero((exit_idx == _EXIT_SENTINEL) | (exit_idx > n)) / total
    return out


def tn_density(
    spec: FunctionSpec,
    R: float,
    beta: float,
    region: SquareRegion,
    resolution: int = 256,
    n_max: int = 6,
) -> EscapeGridReport:
    """Nested densities of {z : F^k(z) in L for 0 <= k <= n} in the region.

    Cells outside W (or outside L) fail at level 0.  Orbits whose Re F
    overflows are certified members of every later level.
    """
    if resolution < 64:
        raise ParameterError("resolution must be at least 64")
    logR = math.log(R)
    Z = region.cell_centers(resolution).ravel()
    exit_idx = np.full(Z.shape, _EXIT_SENTINEL, dtype=np.int32)
    active = np.ones(Z.shape, dtype=bool)
    cur = Z.copy()
    for n in range(n_max + 1):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        z = cur[idx]
        safe = z.real <= LOG_OVERFLOW
        F = np.full(z.shape, complex(np.inf, 0.0), dtype=complex)
        if safe.any():
            with np.errstate(over="ignore", invalid="ignore"):
                F[safe] = log_eval_grid(spec, np.exp(z[safe]))
        re_f = F.real
        in_w = re_f > logR
        bx = beta * z.real
        with np.errstate(over="ignore"):
            thresh = np.where(bx <= LOG_OVERFLOW, np.exp(np.minimum(bx, LOG_OVERFLOW)), np.inf)
        in_l = in_w & ((re_f >= thresh) | (np.isposinf(re_f) & np.isposinf(thresh)))
        failed = ~in_l
        exit_idx[idx[failed]] = n
        active[idx[failed]] = False
        # overflowed survivors are certified: stop iterating them
        certified = in_l & np.isposinf(re_f)
        active[idx[certified]] = False
        cont = in_l & ~certified
        cur[idx[cont]] = F[cont]
        active_next = np.zeros_like(active)
        active_next[idx[cont]] = True
        active = active_next
    dens = _survival_densities(exit_idx, n_max)
    t0 = dens[0] if dens[0] > 0 else math.nan
    rel = dens / t0 if not math.isnan(t0) else np.full_like(dens, math.nan)
    return EscapeGridReport(
        kind="log_coordinate_survivors",
        region=region,
        resolution=resolution,
        n_max=n_max,
        cell_exit=exit_idx.reshape(resolution, resolution),
        density_sequence=dens,
        relative_density=rel,
        params={"R": R, "beta": beta, "spec": repr(spec)},
    )


def z_plane_escape_density(
    spec: FunctionSpec,
    region: SquareRegion,
    resolution: int = 256,
    n_max: int = 12,
    escape_radius: float = 50.0,
) -> EscapeGridReport:
    """Nested escape candidates under direct iteration of f.

    Level n requires |f(z)| >= escape_radius and monotone modulus growth
    |f^{k+1}| >= |f^k| for 1 <= k <= n; the modulus is tracked in log scale
    and overflow certifies the remaining levels.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    Z = region.cell_centers(resolution).ravel()
    exit_idx = np.full(Z.shape, _EXIT_SENTINEL, dtype=np.int32)
    logv = log_eval_grid(spec, Z)
    cur_logmod = logv.real
    cur = np.full(Z.shape, complex(np.inf, 0.0), dtype=complex)
    safe = cur_logmod <= LOG_OVERFLOW
    cur[safe] = np.exp(logv[safe])
    below = cur_logmod < math.log(escape_radius)
    exit_idx[below] = 0
    active = ~below & (cur_logmod <= LOG_OVERFLOW)
    for n in range(1, n_max + 1):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        with np.errstate(over="ignore", invalid="ignore"):
            logv = log_eval_grid(spec, cur[idx])
        new_logmod = logv.real
        shrunk = new_logmod < cur_logmod[idx]
        exit_idx[idx[shrunk]] = n
        active[idx[shrunk]] = False
        ok = ~shrunk
        cur_logmod[idx[ok]] = new_logmod[ok]
        certified = ok & (new_logmod > LOG_OVERFLOW)
        active[idx[certified]] = False
        cont = ok & ~certified
        cur[idx[cont]] = np.exp(logv[cont])
        keep = np.zeros_like(active)
        keep[idx[cont]] = True
        active = keep
    dens = _survival_densities(exit_idx, n_max)
    return EscapeGridReport(
        kind="z_plane_escape",
        region=region,
        resolution=resolution,
        n_max=n_max,
        cell_exit=exit_idx.reshape(resolution, resolution),
        density_sequence=dens,
        relative_density=None,
        params={"escape_radius": escape_radius, "spec": repr(spec)},
    )


def s_square_density(
    spec: FunctionSpec,
    R: float,
    beta: float,
    z: complex,
    resolution: int = 512,
) -> float:
    """Density of the complement of L in the square Q(z) of side Re z."""
    z = complex(z)
    if not z.real > 2.0 * math.log(R):
        raise DomainError("need Re z > 2 log R")
    region = SquareRegion.q_square(z)
    logR = math.log(R)
    P = region.cell_centers(resolution)
    with np.errstate(over="ignore", invalid="ignore"):
        F = log_eval_grid(spec, np.exp(P))
    re_f = F.real
    with np.errstate(over="ignore"):
        thresh = np.exp(np.minimum(beta * P.real, LOG_OVERFLOW))
    in_l = (re_f > logR) & (re_f >= thresh)
    return float(1.0 - np.count_nonzero(in_l) / in_l.size)


@dataclass(frozen=True)
class RefinementReport:
    """Stability of density sequences across a resolution-doubling chain."""

    resolutions: tuple
    tail_densities: tuple
    relative_changes: tuple
    stabilized: bool
    shrinking_in_n: bool
    tolerance: float


def refinement_study(reports, tolerance: float = 0.25) -> RefinementReport:
    """Compare density tails between successive resolutions of one region."""
    reports = list(reports)
    if len(reports) < 2:
        raise ParameterError("need at least two reports")
    r0 = reports[0]
    for r in reports[1:]:
        if r.region != r0.region or r.n_max != r0.n_max or r.kind != r0.kind:
            raise ParameterError("reports must share region, n_max and kind")
    resolutions = tuple(r.resolution for r in reports)
    if any(b != 2 * a for a, b in zip(resolutions, resolutions[1:])):
        raise ParameterError("resolutions must double along the chain")
    tails = tuple(float(r.density_sequence[-1]) for r in reports)
    changes = tuple(
        abs(b - a) / max(abs(b), 1e-12) for a, b in zip(tails, tails[1:])
    )
    shrinking = all(
        bool(np.all(np.diff(r.density_sequence) <= 1e-12)) and r.density_sequence[-1] < r.density_sequence[0]
        for r in reports
    )
    return RefinementReport(
        resolutions=resolutions,
        tail_densities=tails,
        relative_changes=changes,
        stabilized=all(c <= tolerance for c in changes),
        shrinking_in_n=shrinking,
        tolerance=tolerance,
    )
