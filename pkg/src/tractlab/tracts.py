"""Tract decomposition of super-level sets on polar grids, and radial diagnostics.

A polar grid over an annulus is classified cell-by-cell against
log |f| > log R, labelled into connected components (4-neighbour adjacency
with angular wraparound), and reduced to radial profiles: angular occupation
theta(r) of a tract, its starred variant (infinite where a full circle lies
inside one tract), the angular measure psi(r) of the sub-level where
log |f| >= r^b, the quadratic mean m(r) of log|f| - r^b over that set, and
log-substituted Tsuji-type integrals of pi / (t * profile(t)).

Verification reports compare log log M(r) against the component-count lower
bound, the Tsuji integral的 lower bound, and the slow-growth upper hypothesis
built from a Schroeder solution.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .catalog import (
    DomainError,
    FunctionSpec,
    ParameterError,
    log_modulus_grid,
    max_modulus,
)
from .schroeder import SchroederSolution

PROFILE_KINDS = ("theta", "theta_star", "psi", "m", "loglogM", "tsuji_integral")


@dataclass(frozen=True)
class PolarGrid:
    """Annulus discretization: log-spaced radial edges, uniform angles.

    Cell (i, j) covers [r_edges[i], r_edges[i+1]) x [2 pi j / n_theta,
    2 pi (j+1) / n_theta); membership is decided at cell centers.
    """

    r_edges: np.ndarray
    n_theta: int

    @classmethod
    def make(cls, r_min: float, r_max: float, n_r: int, n_theta: int) -> "PolarGrid":
        if not (0.0 < r_min < r_max):
            raise ParameterError("need 0 < r_min < r_max")
        if n_r < 2 or n_theta < 8:
            raise ParameterError("grid resolution too small")
        return cls(r_edges=np.geomspace(r_min, r_max, n_r + 1), n_theta=n_theta)

    @property
    def n_r(self) -> int:
        return len(self.r_edges) - 1

    @property
    def r_centers(self) -> np.ndarray:
        return np.sqrt(self.r_edges[:-1] * self.r_edges[1:])

    @property
    def theta_centers(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * (2.0 * math.pi / self.n_theta)

    def cell_centers(self) -> np.ndarray:
        r = self.r_centers[:, None]
        t = self.theta_centers[None, :]
        return r * np.exp(1j * t)


def _fill_log_modulus(spec: FunctionSpec, Z: np.ndarray, jobs: int | None) -> np.ndarray:
    """Row-chunked parallel grid fill; assembly order is fixed, so the result
    is independent of the worker count."""
    if jobs is None or jobs <= 1 or Z.shape[0] < 8:
        return log_modulus_grid(spec, Z)
    chunks = np.array_split(np.arange(Z.shape[0]), jobs)
    out = np.empty(Z.shape)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [(idx, pool.submit(log_modulus_grid, spec, Z[idx])) for idx in chunks if idx.size]
        for idx, fut in futures:
            out[idx] = fut.result()
    return out


@dataclass(frozen=True)
class TractDecomposition:
    """Labelled super-level set {log |f| > log R} on a polar grid.

    labels == 0 marks sub-level cells; components touching the outer ring are
    numbered 1..n_components (these are the tracts); bounded islands that
    miss the outer ring get labels above n_components.
    """

    spec: FunctionSpec
    grid: PolarGrid
    R: float
    labels: np.ndarray
    n_components: int
    n_islands: int
    log_mod: np.ndarray = field(repr=False)
    touched_boundary: dict = field(repr=False)

    @property
    def component_ids(self):
        return list(range(1, self.n_components + 1))

    def full_ring_component(self) -> np.ndarray:
        """Per ring: the component id covering the whole circle, else 0."""
        first = self.labels[:, :1]
        full = (self.labels == first).all(axis=1) & (first[:, 0] > 0)
        return np.where(full, first[:, 0], 0)


def decompose(
    spec: FunctionSpec,
    R: float,
    r_min: float,
    r_max: float,
    n_r: int = 256,
    n_theta: int = 1024,
    jobs: int | None = None,
) -> TractDecomposition:
    """Union-find labelling of {log|f| > log R} cells; N counts outer tracts."""
    spec.validate()
    f0 = None
    try:
        from .catalog import evaluate

        f0 = evaluate(spec, 0.0)
    except Exception:
        pass
    if f0 is not None and f0.value is not None and R <= abs(f0.value):
        raise ParameterError(f"need R > |f(0)| = {abs(f0.value)}")
    grid = PolarGrid.make(r_min, r_max, n_r, n_theta)
    lm = _fill_log_modulus(spec, grid.cell_centers(), jobs)
    mask = lm > math.log(R)
    labels, n_comp, n_islands, touched = _label_components(mask, grid)
    return TractDecomposition(
        spec=spec,
        grid=grid,
        R=R,
        labels=labels,
        n_components=n_comp,
        n_islands=n_islands,
        log_mod=lm,
        touched_boundary=touched,
    )


def _label_components(mask: np.ndarray, grid: PolarGrid):
    """Connected components of the mask: 4-neighbour, angular wraparound,
    radial adjacency between consecutive rings only."""
    n_r, n_t = mask.shape
    idx = np.arange(n_r * n_t).reshape(n_r, n_t)
    rows = []
    cols = []
    # angular neighbours (wraparound via roll)
    right = np.roll(mask, -1, axis=1)
    both = mask & right
    if both.any():
        rows.append(idx[both])
        cols.append(np.roll(idx, -1, axis=1)[both])
    # radial neighbours
    if n_r > 1:
        upper = mask[:-1] & mask[1:]
        if upper.any():
            rows.append(idx[:-1][upper])
            cols.append(idx[1:][upper])
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        data = np.ones(len(r), dtype=np.int8)
        g = coo_matrix((data, (r, c)), shape=(n_r * n_t, n_r * n_t))
        _, raw = connected_components(g, directed=False)
    else:
        raw = np.arange(n_r * n_t)
    raw = raw.reshape(n_r, n_t)
    raw = np.where(mask, raw + 1, 0)  # 0 = below threshold

    # order components: outer-ring tracts first (by first appearance on the
    # outer ring), then islands by first cell in scan order
    outer = raw[-1]
    ordered = []
    seen = set()
    for lab in outer[outer > 0]:
        if lab not in seen:
            seen.add(lab)
            ordered.append(lab)
    n_comp = len(ordered)
    for lab in raw[raw > 0]:
        if lab not in seen:
            seen.add(lab)
            ordered.append(lab)
    lut = np.zeros(n_r * n_t + 1, dtype=np.int32)
    for new, old in enumerate(ordered):
        lut[old] = new + 1
    labels = lut[raw]
    touched = {}
    for new, old in enumerate(ordered):
        touched[new + 1] = bool((raw[0] == old).any() or (raw[-1] == old).any())
    return labels, n_comp, len(ordered) - n_comp, touched


@dataclass(frozen=True)
class RadialProfile:
    """A sampled function of radius; theta_star uses +inf sentinels on rings
    fully inside one tract (their reciprocal contributes exactly 0)."""

    radii: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ParameterError(f"unknown profile kind {self.kind}")
        if len(self.radii) != len(self.values):
            raise ParameterError("radii/values length mismatch")


def theta_profile(dec: TractDecomposition, component: int) -> RadialProfile:
    """Angular measure of the component per ring."""
    _check_component(dec, component)
    counts = (dec.labels == component).sum(axis=1)
    values = counts * (2.0 * math.pi / dec.grid.n_theta)
    return RadialProfile(radii=dec.grid.r_centers, values=values, kind="theta")


def theta_star_profile(dec: TractDecomposition, component: int) -> RadialProfile:
    """theta(r), with +inf where the whole circle lies in one tract."""
    base = theta_profile(dec, component)
    full = dec.full_ring_component()
    values = np.where(full > 0, np.inf, base.values)
    return RadialProfile(radii=base.radii, values=values, kind="theta_star")


def psi_profile(
    dec: TractDecomposition,
    beta: float,
    component: int | None = None,
) -> RadialProfile:
    """Angular measure of {log|f| >= r^b} within a component (or all tracts)."""
    if not (0.0 < beta < 0.5):
        raise ParameterError("beta must lie in (0, 1/2)")
    if component is not None:
        _check_component(dec, component)
        in_comp = dec.labels == component
    else:
        in_comp = (dec.labels > 0) & (dec.labels <= dec.n_components)
    thresh = dec.grid.r_centers[:, None] ** beta
    hot = in_comp & (dec.log_mod >= thresh)
    values = hot.sum(axis=1) * (2.0 * math.pi / dec.grid.n_theta)
    return RadialProfile(radii=dec.grid.r_centers, values=values, kind="psi")


def m_profile(
    dec: TractDecomposition,
    beta: float,
    component: int | None = None,
) -> RadialProfile:
    """Quadratic mean (1/2pi) sum v(cell)^2 dtheta over {v >= 0} per ring,
    v = log|f| - r^b."""
    if not (0.0 < beta < 0.5):
        raise ParameterError("beta must lie in (0, 1/2)")
    if component is not None:
        _check_component(dec, component)
        in_comp = dec.labels == component
    else:
        in_comp = (dec.labels > 0) & (dec.labels <= dec.n_components)
    v = dec.log_mod - dec.grid.r_centers[:, None] ** beta
    hot = in_comp & (v >= 0.0)
    contrib = np.where(hot, v * v, 0.0)
    values = contrib.sum(axis=1) / dec.grid.n_theta
    return RadialProfile(radii=dec.grid.r_centers, values=values, kind="m")


def _check_component(dec: TractDecomposition, component: int) -> None:
    if not (1 <= component <= dec.n_components + dec.n_islands):
        raise DomainError(f"component {component} does not exist")


# ---------------------------------------------------------------------------
# Tsuji-type integrals


def tsuji_integral(profile: RadialProfile, r0: float, kappa: float, r: float) -> float:
    """pi * int_{r0}^{kappa r} dt / (t * profile(t)), trapezoid in log t.

    +inf profile entries (full-circle sentinel) contribute exactly 0.
    """
    if not (0.0 < kappa < 1.0):
        raise ParameterError("kappa must lie in (0, 1)")
    upper = kappa * r
    if not (r0 < upper):
        raise DomainError("need r0 < kappa * r")
    radii = profile.radii
    if r0 < radii[0] * (1 - 1e-9) or upper > radii[-1] * (1 + 1e-9):
        raise DomainError("profile does not cover [r0, kappa r]")
    with np.errstate(divide="ignore"):
        g = math.pi / profile.values  # 0 at +inf sentinels
    g = np.where(np.isfinite(g), g, np.inf)  # psi == 0 rings blow up honestly
    x = np.log(radii)
    lo, hi = math.log(r0), math.log(upper)
    xs = np.clip(x, lo, hi)
    gs = np.interp(xs, x, g)
    # trapezoid over the clipped knots plus exact endpoints
    knots = np.concatenate(([lo], xs[(xs > lo) & (xs < hi)], [hi]))
    vals = np.interp(knots, x, g)
    return float(np.trapezoid(vals, knots))


def tsuji_profile(profile: RadialProfile, r0: float, kappa: float, radii: np.ndarray) -> RadialProfile:
    values = np.array([tsuji_integral(profile, r0, kappa, float(r)) for r in radii])
    return RadialProfile(radii=np.asarray(radii, dtype=float), values=values, kind="tsuji_integral")


# ---------------------------------------------------------------------------
# verification reports


@dataclass(frozen=True)
class GrowthReport:
    """Residual sequence with summary bounds and a top-decade trend."""

    radii: np.ndarray
    residuals: np.ndarray
    min_residual: float
    max_residual: float
    slope_top_decade: float
    bounded_below: bool
    excluded_rings: int = 0
    passed: bool | None = None
    ratio_at_top: float | None = None


def _loglogM_on(spec: FunctionSpec, radii: np.ndarray, samples: int) -> np.ndarray:
    return np.array([max_modulus(spec, float(r), samples) for r in radii])


def _trend(radii: np.ndarray, residuals: np.ndarray) -> float:
    top = radii >= radii[-1] / 10.0
    if top.sum() < 3:
        top = np.arange(len(radii)) >= len(radii) - 3
    return float(np.polyfit(np.log(radii[top]), residuals[top], 1)[0])


def verify_dca(
    spec: FunctionSpec,
    dec: TractDecomposition,
    r_grid: np.ndarray,
    samples: int = 256,
) -> GrowthReport:
    """Residuals log log M(r) - (N/2) log r; bounded below for every catalog
    entry, identically small in the equality case."""
    if dec.n_components < 1:
        raise DomainError("decomposition has no tracts")
    r_grid = np.asarray(r_grid, dtype=float)
    lls = _loglogM_on(spec, r_grid, samples)
    residuals = lls - 0.5 * dec.n_components * np.log(r_grid)
    slope = _trend(r_grid, residuals)
    return GrowthReport(
        radii=r_grid,
        residuals=residuals,
        min_residual=float(residuals.min()),
        max_residual=float(residuals.max()),
        slope_top_decade=slope,
        bounded_below=bool(slope > -0.1 or residuals[-1] >= residuals.min()),
    )


def verify_theorem2(
    spec: FunctionSpec,
    dec: TractDecomposition,
    beta: float,
    r0: float,
    kappa: float,
    r_grid: np.ndarray,
    component: int = 1,
    c_budget: float = 5.0,
    samples: int = 256,
) -> GrowthReport:
    """Residuals log log M(r) - pi Int dt/(t psi(t)) for one tract.

    Rings where the full circle lies inside a single tract violate the
    circle-not-contained hypothesis and are excluded (counted in the report).
    """
    psi = psi_profile(dec, beta, component)
    full = dec.full_ring_component()
    excluded = int((full > 0).sum())
    values = np.where(full > 0, np.nan, psi.values)
    ok = ~np.isnan(values)
    if ok.sum() < 2:
        raise DomainError("circle-not-contained hypothesis fails on nearly every ring")
    if excluded:
        values = np.interp(np.log(psi.radii), np.log(psi.radii[ok]), values[ok])
    psi = RadialProfile(radii=psi.radii, values=values, kind="psi")
    return _growth_vs_integral(spec, psi, r0, kappa, r_grid, c_budget, samples, excluded)


def _growth_vs_integral(
    spec: FunctionSpec,
    profile: RadialProfile,
    r0: float,
    kappa: float,
    r_grid: np.ndarray,
    c_budget: float,
    samples: int,
    excluded: int = 0,
) -> GrowthReport:
    r_grid = np.asarray(r_grid, dtype=float)
    lls = _loglogM_on(spec, r_grid, samples)
    integrals = np.array([tsuji_integral(profile, r0, kappa, float(r)) for r in r_grid])
    residuals = lls - integrals
    inf_res = float(residuals.min())
    ratio = float(integrals[-1] / lls[-1]) if lls[-1] != 0 else math.inf
    return GrowthReport(
        radii=r_grid,
        residuals=residuals,
        min_residual=inf_res,
        max_residual=float(residuals.max()),
        slope_top_decade=_trend(r_grid, residuals),
        bounded_below=bool(inf_res > -c_budget),
        excluded_rings=excluded,
        passed=bool(inf_res > -c_budget),
        ratio_at_top=ratio,
    )


def theorem1_hypothesis(
    spec: FunctionSpec,
    dec: TractDecomposition,
    sol: SchroederSolution,
    r_grid: np.ndarray,
    samples: int = 256,
) -> GrowthReport:
    """Margins (N/2 + eps(r)) log r - log log M(r); PASS iff all >= 0."""
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.min() <= sol.xi:
        raise DomainError("r_grid must start above the fixed point xi")
    n = dec.n_components
    lls = _loglogM_on(spec, r_grid, samples)
    eps = np.array([sol.epsilon(float(r)) for r in r_grid])
    margins = (0.5 * n + eps) * np.log(r_grid) - lls
    return GrowthReport(
        radii=r_grid,
        residuals=margins,
        min_residual=float(margins.min()),
        max_residual=float(margins.max()),
        slope_top_decade=_trend(r_grid, margins),
        bounded_below=bool(margins.min() >= 0.0),
        passed=bool(margins.min() >= 0.0),
    )


@dataclass(frozen=True)
class ConvexityReport:
    radii: np.ndarray
    second_differences: np.ndarray
    min_second_difference: float
    tol: float
    passed: bool


def convexity_check(profile: RadialProfile, tol: float = 1e-3) -> ConvexityReport:
    """Discrete d^2 m / d(log r)^2 >= -tol * max(1, max m) on log-spaced radii."""
    if len(profile.radii) < 3:
        raise ParameterError("need at least 3 radii")
    x = np.log(profile.radii)
    if not np.allclose(np.diff(x), np.diff(x)[0], rtol=1e-6):
        raise ParameterError("profile radii must be log-spaced")
    m = profile.values
    second = m[2:] - 2.0 * m[1:-1] + m[:-2]
    budget = tol * max(1.0, float(np.max(m)))
    return ConvexityReport(
        radii=profile.radii[1:-1],
        second_differences=second,
        min_second_difference=float(second.min()),
        tol=tol,
        passed=bool(second.min() >= -budget),
    )
