"""Logarithmic change of variable F(z) = log f(e^z) and its iteration.

F maps each component of W = exp^-1({|f| > R}) onto the half-plane
Re w > log R; exp(F(z)) = f(e^z).  Lifts fix the branch by phase-unwrapping
along caller-supplied paths (principal phase at the first point).  Iteration
of F stays in log-modulus arithmetic, so Re F up to ~1e300 is representable;
past that an orbit is certified escaping by overflow.

Membership sets: L = {z in W : Re F(z) >= exp(b Re z)} and the nested
survivor sets of points whose first n iterates stay in L.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .catalog import (
    DomainError,
    FunctionSpec,
    LOG_OVERFLOW,
    log_derivative,
    log_eval,
    log_eval_grid,
)

TWO_PI = 2.0 * math.pi


class ContinuationError(RuntimeError):
    """Phase step between consecutive path samples too large to unwrap."""


@dataclass(frozen=True)
class LogCoordinateState:
    """A point z in the log plane with its lifted value F(z)."""

    z: complex
    F_value: complex
    branch_offset: int
    in_W: bool


def _log_f_of_exp(spec: FunctionSpec, z: complex) -> complex:
    """log f(e^z) without forming f(e^z); Re may be +-inf past the overflow
    horizon (certified escape / certified exit)."""
    x = z.real
    if x > LOG_OVERFLOW:
        # e^z not representable: the sign of Re F is decided by the phase
        from .catalog import ExpFamily

        if isinstance(spec, ExpFamily):
            c = math.cos(z.imag)
            re = math.inf if c > 0 else (-math.inf if c < 0 else 0.0)
            return complex(re, 0.0)
        # all other catalog families grow in every direction reachable here
        return complex(math.inf, 0.0)
    return log_eval(spec, cmath.exp(z))


def lift(
    spec: FunctionSpec,
    R: float,
    z: complex,
    prev: LogCoordinateState | None = None,
) -> LogCoordinateState:
    """Lift z into the log coordinate; continue the branch from prev if given.

    Raises DomainError outside W and ContinuationError when the principal
    phase step from prev is too close to pi to unwrap safely.
    """
    logR = math.log(R)
    F = _log_f_of_exp(spec, complex(z))
    if not F.real > logR:
        raise DomainError(f"z not in W: Re F = {F.real} <= log R = {logR}")
    offset = 0
    if prev is not None:
        target = prev.F_value.imag
        raw = F.imag
        k = round((target - raw) / TWO_PI)
        step = (raw + TWO_PI * k) - target
        # candidate neighbouring branches if the nearest jump looks extreme
        if abs(step) >= math.pi * 0.999:
            raise ContinuationError(
                f"phase jump {step:+.3f} rad between path samples; refine the path"
            )
        offset = prev.branch_offset + k
        F = complex(F.real, raw + TWO_PI * k)
    return LogCoordinateState(z=complex(z), F_value=F, branch_offset=offset, in_W=True)


def lift_path(spec: FunctionSpec, R: float, zs) -> list[LogCoordinateState]:
    """Lift a polyline of points with branch continuation along the sequence."""
    states: list[LogCoordinateState] = []
    prev = None
    for z in zs:
        prev = lift(spec, R, z, prev)
        states.append(prev)
    return states


def in_L(spec: FunctionSpec, R: float, beta: float, state: LogCoordinateState) -> bool:
    """Re F(z) >= exp(b Re z); boundary equality counts as inside."""
    if not state.in_W:
        return False
    x = state.z.real
    if beta * x > LOG_OVERFLOW:
        return state.F_value.real == math.inf
    return state.F_value.real >= math.exp(beta * x)


@dataclass(frozen=True)
class OrbitRecord:
    """Forward orbit of F from a seed in L.

    states[k+1].z equals states[k].F_value exactly; exit_index is the first k
    with states[k] outside L (None if no exit was recorded); escape_flag
    certifies Re F^n >= E_b^n(Re z_0) at every recorded step.
    """

    states: tuple
    exit_index: int | None
    escape_flag: bool
    overflow_certified: bool

    def to_rows(self):
        rows = []
        for n, s in enumerate(self.states):
            rows.append((n, s.z.real, s.z.imag, s.F_value.real, s.F_value.imag))
        return rows


def iterate_T(
    spec: FunctionSpec,
    R: float,
    beta: float,
    z: complex,
    n_max: int,
) -> OrbitRecord:
    """Iterate F up to n_max steps or the first exit from L."""
    logR = math.log(R)
    state = lift(spec, R, z)
    if not in_L(spec, R, beta, state):
        raise DomainError("seed not in L")
    states = [state]
    lower = complex(z).real  # E_b^n lower bound tracker
    certified_all = True
    overflow = False
    exit_index = None
    for n in range(1, n_max + 1):
        z_next = states[-1].F_value
        if z_next.real == math.inf:
            overflow = True
            break
        F = _log_f_of_exp(spec, z_next)
        in_w = F.real > logR
        st = LogCoordinateState(z=z_next, F_value=F, branch_offset=0, in_W=in_w)
        states.append(st)
        # certified lower bound E_b^n(Re z0)
        lower = math.exp(beta * lower) if beta * lower <= LOG_OVERFLOW else math.inf
        if not (F.real >= lower or (F.real == math.inf and lower == math.inf)):
            certified_all = False
        if not (in_w and in_L(spec, R, beta, st)):
            exit_index = n
            break
        if F.real == math.inf:
            overflow = True
            break
    escape = exit_index is None and (certified_all or overflow)
    return OrbitRecord(
        states=tuple(states),
        exit_index=exit_index,
        escape_flag=escape,
        overflow_certified=overflow,
    )


@dataclass(frozen=True)
class ExpansionReport:
    """Check of |F'(z)| >= (Re F(z) - log R) / (4 pi) over sample points."""

    checked: int
    skipped: int
    violations: int
    min_margin: float
    passed: bool


def check_expansion(spec: FunctionSpec, R: float, samples) -> ExpansionReport:
    """Evaluate the derivative bound at each sample z (in the log plane).

    F'(z) = e^z f'(e^z) / f(e^z) via the catalog's closed-form log-derivative.
    Samples outside W are skipped and counted.
    """
    logR = math.log(R)
    checked = 0
    skipped = 0
    violations = 0
    min_margin = math.inf
    for z in samples:
        z = complex(z)
        F = _log_f_of_exp(spec, z)
        if not (F.real > logR and math.isfinite(F.real)):
            skipped += 1
            continue
        u = cmath.exp(z)
        fp = abs(u * log_derivative(spec, u))
        bound = (F.real - logR) / (4.0 * math.pi)
        margin = fp - bound
        checked += 1
        if margin < min_margin:
            min_margin = margin
        if margin < 0.0:
            violations += 1
    return ExpansionReport(
        checked=checked,
        skipped=skipped,
        violations=violations,
        min_margin=min_margin,
        passed=violations == 0,
    )


def sample_tract_points(
    spec: FunctionSpec,
    R: float,
    n: int,
    x_range: tuple,
    seed: int = 0,
    margin: float = 1.0,
    y_range: tuple = (0.0, TWO_PI),
    max_tries: int = 400,
) -> np.ndarray:
    """Rejection-sample log-plane points with Re F >= log R + margin."""
    rng = np.random.default_rng(seed)
    out = []
    logR = math.log(R)
    tries = 0
    while len(out) < n and tries < max_tries:
        tries += 1
        xs = rng.uniform(x_range[0], x_range[1], 4 * n)
        ys = rng.uniform(y_range[0], y_range[1], 4 * n)
        zs = xs + 1j * ys
        vals = log_eval_grid(spec, np.exp(zs)).real
        good = zs[vals >= logR + margin]
        out.extend(good[: n - len(out)])
    if len(out) < n:
        raise DomainError("rejection sampling failed to fill the requested count")
    return np.array(out)
