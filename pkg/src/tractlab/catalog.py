"""Catalog of entire functions with overflow-safe, region-aware evaluation.

Families: lambda*e^z, sin(alpha z + beta), the Mittag-Leffler function
E_a (0 < a <= 2) together with E_a(z^N) and lambda*E_a(z^N), and integrals
f(z) = int_0^z P(t) e^{Q(t)} dt + c for polynomials P, Q.

Everything funnels through `log_eval`, which returns log f(z) as a finite
complex number even where f itself overflows double precision.  Mittag-Leffler
values switch between a power series (with precision escalation when the
float64 cancellation loss is too large) and an exponentially-improved
expansion: the exponential branch terms rho*exp(z^rho) that are Stokes-active
plus the algebraic inverse-power part, truncated at its smallest term.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

LOG_OVERFLOW = 700.0         # exp() still finite below this
_X_ASYM = 21.0               # use branch expansion once |z|**(1/a) reaches this
_LOSS_DOUBLE = 9.0           # nats of series cancellation tolerated in float64
_TAIL_KMAX = 80
_SERIES_CAP = 4000


class ParameterError(ValueError):
    """A FunctionSpec parameter is outside its admissible range."""


class DomainError(ValueError):
    """An operation was queried outside its domain."""


# ---------------------------------------------------------------------------
# function specs


@dataclass(frozen=True)
class ExpFamily:
    """f(z) = lam * e^z."""

    lam: complex = 1.0

    def validate(self) -> None:
        if self.lam == 0:
            raise ParameterError("lam must be nonzero")


@dataclass(frozen=True)
class SineFamily:
    """f(z) = sin(alpha z + beta)."""

    alpha: complex = 1.0
    beta: complex = 0.0

    def validate(self) -> None:
        if self.alpha == 0:
            raise ParameterError("alpha must be nonzero")


@dataclass(frozen=True)
class MittagLeffler:
    """f(z) = E_alpha(z) = sum z^n / Gamma(alpha n + 1)."""

    alpha: float

    def validate(self) -> None:
        if not (0.0 < self.alpha <= 2.0):
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")


@dataclass(frozen=True)
class MittagLefflerPower:
    """f(z) = E_alpha(z^n)."""

    alpha: float
    n: int

    def validate(self) -> None:
        MittagLeffler(self.alpha).validate()
        if self.n < 1:
            raise ParameterError("power must be a positive integer")


@dataclass(frozen=True)
class ScaledMittagLefflerPower:
    """f(z) = lam * E_alpha(z^n), lam > 0."""

    lam: float
    alpha: float
    n: int = 1

    def validate(self) -> None:
        MittagLefflerPower(self.alpha, self.n).validate()
        if not self.lam > 0:
            raise ParameterError("lam must be positive")


@dataclass(frozen=True)
class ErdosIntegral:
    """f(z) = int_0^z P(t) e^{Q(t)} dt + c, coefficients in ascending order."""

    p_coeffs: tuple
    q_coeffs: tuple
    c: complex = 0.0

    def validate(self) -> None:
        if not self.p_coeffs or not self.q_coeffs:
            raise ParameterError("polynomial coefficient sequences must be nonempty")


FunctionSpec = Union[
    ExpFamily,
    SineFamily,
    MittagLeffler,
    MittagLefflerPower,
    ScaledMittagLefflerPower,
    ErdosIntegral,
]


@dataclass(frozen=True)
class LogModulus:
    """log |f(z)|; overflow_safe marks values from an asymptotic/log-space path."""

    value: float
    overflow_safe: bool


@dataclass(frozen=True)
class FnValue:
    """f(z) with its log-modulus; value is None when |f(z)| overflows doubles."""

    value: complex | None
    log_modulus: float
    overflow: bool


# ---------------------------------------------------------------------------
# Mittag-Leffler machinery


def ml_series_switch(alpha: float) -> float:
    """Radius below which the power series is the default evaluation path."""
    return max(10.0, (30.0 * alpha) ** alpha)


@lru_cache(maxsize=64)
def _tail_coeffs(alpha: float):
    """Inverse-power coefficients: E_a(z) ~ ... - sum_k z^-k / Gamma(1 - a k).

    Returns (log|coef|, sign) per k, or None where Gamma(1 - a k) has a pole
    (the coefficient vanishes).  1/Gamma(1-x) = Gamma(x) sin(pi x) / pi.
    """
    out = []
    for k in range(1, _TAIL_KMAX + 1):
        ak = alpha * k
        m = round(ak)
        d = ak - m
        if abs(d) < 1e-9:
            out.append(None)
            continue
        s = (-1.0 if m % 2 else 1.0) * math.sin(math.pi * d)
        out.append((math.lgamma(ak) + math.log(abs(s) / math.pi), math.copysign(1.0, s)))
    return tuple(out)


@lru_cache(maxsize=64)
def _tail_breakpoints(alpha: float):
    """Lower envelope of the lines c_k - k*t (t = log|z|): optimal truncation
    index as a step function of t.  Returns (thresholds, kstars) for
    np.searchsorted."""
    coeffs = _tail_coeffs(alpha)
    lines = [(-(i + 1), c[0]) for i, c in enumerate(coeffs) if c is not None]
    # envelope of y = m*t + b with distinct negative slopes m, steepest wins for large t
    lines.sort(key=lambda mb: -mb[0])  # shallow first
    hull = []  # (m, b, t_from)
    for m, b in lines:
        while hull:
            m0, b0, t0 = hull[-1]
            t_cross = (b - b0) / (m0 - m)
            if t_cross <= t0:
                hull.pop()
            else:
                break
        t_from = -math.inf if not hull else (b - hull[-1][1]) / (hull[-1][0] - m)
        hull.append((m, b, t_from))
    thresholds = np.array([h[2] for h in hull[1:]])
    kstars = np.array([-int(h[0]) for h in hull])
    return thresholds, kstars


def _tail_kstar(alpha: float, t: float) -> int:
    thresholds, kstars = _tail_breakpoints(alpha)
    return int(kstars[np.searchsorted(thresholds, t)])


def _ml_tail(alpha: float, z: complex) -> complex:
    """Algebraic part of the expansion, truncated at its smallest term."""
    t = math.log(abs(z))
    phi = cmath.phase(z)
    kstar = _tail_kstar(alpha, t)
    coeffs = _tail_coeffs(alpha)
    acc = 0j
    for i in range(kstar):
        c = coeffs[i]
        if c is None:
            continue
        k = i + 1
        lm = c[0] - k * t
        if lm < -745.0:
            continue
        acc -= c[1] * cmath.exp(complex(lm, -k * phi))
    return acc


def _ml_tail_derivative(alpha: float, z: complex) -> complex:
    """d/dz of the algebraic part: sum_k k z^-(k+1) / Gamma(1 - a k)."""
    t = math.log(abs(z))
    phi = cmath.phase(z)
    kstar = _tail_kstar(alpha, t)
    coeffs = _tail_coeffs(alpha)
    acc = 0j
    for i in range(kstar):
        c = coeffs[i]
        if c is None:
            continue
        k = i + 1
        lm = c[0] + math.log(k) - (k + 1) * t
        if lm < -745.0:
            continue
        acc += c[1] * cmath.exp(complex(lm, -(k + 1) * phi))
    return acc


def _branch_args(alpha: float, theta: float, big_x: float):
    """Arguments of the Stokes-active branches of z^(1/alpha).

    A branch contributes rho*exp(X e^{i a}) while |a| stays inside the Stokes
    window 3pi/2 (shrunk by the transition width ~X^-1/2).  Branches that
    coincide with the principal one (integer 1/alpha) are dropped.
    """
    rho = 1.0 / alpha
    window = 1.5 * math.pi - 3.0 / math.sqrt(max(big_x, 1.0))
    args = []
    for k in (0, -1, 1):
        if k != 0:
            d = (2.0 * math.pi * rho) % (2.0 * math.pi)
            if min(d, 2.0 * math.pi - d) < 1e-9:
                continue
        a = rho * (theta + 2.0 * math.pi * k)
        if abs(a) <= window:
            args.append(a)
    return args


def _ml_series_f64(alpha: float, z: complex, derivative: bool = False) -> complex:
    """Plain float64 power series (caller guarantees acceptable cancellation)."""
    acc = 0j
    term = 1.0 + 0j  # z^n / Gamma(alpha n + 1)
    n_min = abs(z) ** (1.0 / alpha) / alpha
    n = 0
    while n < _SERIES_CAP:
        if derivative:
            if n > 0:
                acc += n * term / z
        else:
            acc += term
        if n > n_min and abs(term) < 1e-18 * (abs(acc) + 1e-280):
            break
        term = term * z * math.exp(math.lgamma(alpha * n + 1.0) - math.lgamma(alpha * (n + 1) + 1.0))
        n += 1
    return acc


def _ml_series_mp(alpha: float, z: complex, loss: float, derivative: bool = False) -> complex:
    """Arbitrary-precision series for cancellation beyond float64.

    Gamma arguments are formed inside mpmath: forming alpha*n + 1 in float64
    first perturbs huge terms enough to swamp the cancelled result.
    """
    import mpmath as mp

    dps = int(19 + loss / math.log(10.0)) + 4
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        zz = mp.mpc(z)
        s = mp.mpc(0)
        n_min = abs(z) ** (1.0 / alpha) / alpha
        n = 1 if derivative else 0
        while n < _SERIES_CAP:
            t = zz ** n / mp.gamma(a * n + 1)
            if derivative:
                t = t * n / zz
            s += t
            if n > max(4, n_min) and abs(t) < mp.mpf(10) ** (-dps + 2) * (abs(s) + 1):
                break
            n += 1
        return complex(s)


def _ml_loss(alpha: float, z: complex) -> float:
    """Estimated nats of cancellation in the series: log(max term / |E_a(z)|)."""
    big_x = abs(z) ** (1.0 / alpha)
    if big_x < 2.0:
        return 0.0
    re_w = big_x * math.cos(cmath.phase(z) / alpha)
    value_log_est = max(re_w - math.log(alpha), -math.log(3.0 * abs(z) + 3.0))
    return max(0.0, big_x - value_log_est)


def _ml_series_value(alpha: float, z: complex, derivative: bool = False) -> complex:
    loss = _ml_loss(alpha, z)
    if loss <= _LOSS_DOUBLE:
        return _ml_series_f64(alpha, z, derivative)
    return _ml_series_mp(alpha, z, loss, derivative)


def _ml_log_value(alpha: float, z: complex) -> complex:
    """log E_alpha(z); real part is -inf at zeros, finite otherwise, never +inf."""
    if z == 0:
        return 0j
    big_x = abs(z) ** (1.0 / alpha)
    if big_x < _X_ASYM and abs(z) <= ml_series_switch(alpha):
        v = _ml_series_value(alpha, z)
        if v == 0:
            return complex(-math.inf, 0.0)
        return cmath.log(v)
    # branch expansion
    theta = cmath.phase(z)
    rho = 1.0 / alpha
    ws = [big_x * cmath.exp(1j * a) for a in _branch_args(alpha, theta, big_x)]
    tail = _ml_tail(alpha, z)
    re_star = max((w.real for w in ws), default=-math.inf)
    if re_star - math.log(alpha) <= LOG_OVERFLOW:
        val = tail
        for w in ws:
            val += rho * cmath.exp(w)
        if val == 0:
            return complex(-math.inf, 0.0)
        return cmath.log(val)
    # log-space combination around the dominant branch
    w_star = max(ws, key=lambda w: w.real)
    s = 0j
    for w in ws:
        s += cmath.exp(w - w_star)
    # tail is negligible at this scale
    return w_star - math.log(alpha) + cmath.log(s)


def _ml_log_derivative(alpha: float, z: complex) -> complex:
    """E'_alpha(z) / E_alpha(z), region-aware."""
    if z == 0:
        return 1.0 / math.gamma(alpha + 1.0) + 0j
    big_x = abs(z) ** (1.0 / alpha)
    if big_x < _X_ASYM and abs(z) <= ml_series_switch(alpha):
        num = _ml_series_value(alpha, z, derivative=True)
        den = _ml_series_value(alpha, z)
        if den == 0:
            raise DomainError("log-derivative queried at a zero of E_alpha")
        return num / den
    theta = cmath.phase(z)
    rho = 1.0 / alpha
    ws = [big_x * cmath.exp(1j * a) for a in _branch_args(alpha, theta, big_x)]
    if not ws:
        num = _ml_tail_derivative(alpha, z)
        den = _ml_tail(alpha, z)
        return num / den
    w_star = max(ws, key=lambda w: w.real)
    num = 0j
    den = 0j
    for w in ws:
        e = cmath.exp(w - w_star)
        den += e
        num += rho * (w / z) * e
    scale = cmath.exp(-w_star) * alpha  # 1 / (rho e^{w*})
    if abs(w_star.real) < LOG_OVERFLOW:
        num += _ml_tail_derivative(alpha, z) * scale
        den += _ml_tail(alpha, z) * scale
    return num / den


def eval_mittag_leffler(alpha: float, z: complex) -> FnValue:
    """E_alpha(z) with overflow flagged through the log-modulus."""
    MittagLeffler(alpha).validate()
    logv = _ml_log_value(alpha, complex(z))
    return _fnvalue_from_log(logv)


# ---------------------------------------------------------------------------
# stable complex logs per family


def _log_sin(w: complex) -> complex:
    """log sin(w), stable for large |Im w|."""
    if abs(w.imag) < 20.0:
        s = cmath.sin(w)
        if s == 0:
            return complex(-math.inf, 0.0)
        return cmath.log(s)
    if w.imag > 0:
        # sin w = e^{-iw} (i/2) (1 - e^{2iw}),  |e^{2iw}| = e^{-2 Im w} << 1
        return -1j * w + complex(-math.log(2.0), math.pi / 2.0) + cmath.log(1 - cmath.exp(2j * w))
    return 1j * w + complex(-math.log(2.0), -math.pi / 2.0) + cmath.log(1 - cmath.exp(-2j * w))


def _log_erdos(spec: ErdosIntegral, z: complex) -> complex:
    v = _erdos_value(spec, z)
    if v == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(v)


@lru_cache(maxsize=8)
def _gauss_nodes(n: int):
    from scipy.special import roots_legendre

    x, w = roots_legendre(n)
    return x, w


def _erdos_value(spec: ErdosIntegral, z: complex) -> complex:
    """Adaptive Gauss-Legendre on the segment [0, z], panel doubling."""
    if z == 0:
        return complex(spec.c)
    p = np.asarray(spec.p_coeffs, dtype=complex)
    q = np.asarray(spec.q_coeffs, dtype=complex)

    def integral(panels: int) -> complex:
        x, w = _gauss_nodes(16)
        total = 0j
        for j in range(panels):
            a = z * (j / panels)
            b = z * ((j + 1) / panels)
            mid = (a + b) / 2.0
            half = (b - a) / 2.0
            t = mid + half * x
            vals = np.polynomial.polynomial.polyval(t, p) * np.exp(
                np.polynomial.polynomial.polyval(t, q)
            )
            total += half * np.sum(w * vals)
        return total

    prev = integral(1)
    panels = 2
    while panels <= 64:
        cur = integral(panels)
        if abs(cur - prev) <= 1e-10 * (1.0 + abs(cur)):
            return cur + spec.c
        prev = cur
        panels *= 2
    return prev + spec.c


def log_eval(spec: FunctionSpec, z: complex) -> complex:
    """log f(z) as a finite complex number (real part -inf only at zeros).

    The imaginary part is a branch of arg f(z); callers needing continuations
    unwrap it themselves (see logvar).
    """
    spec.validate()
    z = complex(z)
    if isinstance(spec, ExpFamily):
        return cmath.log(spec.lam) + z
    if isinstance(spec, SineFamily):
        return _log_sin(spec.alpha * z + spec.beta)
    if isinstance(spec, MittagLeffler):
        return _ml_log_value(spec.alpha, z)
    if isinstance(spec, MittagLefflerPower):
        return _ml_log_value(spec.alpha, z ** spec.n)
    if isinstance(spec, ScaledMittagLefflerPower):
        return math.log(spec.lam) + _ml_log_value(spec.alpha, z ** spec.n)
    if isinstance(spec, ErdosIntegral):
        return _log_erdos(spec, z)
    raise ParameterError(f"unknown spec {spec!r}")


def _fnvalue_from_log(logv: complex) -> FnValue:
    if logv.real > LOG_OVERFLOW:
        return FnValue(value=None, log_modulus=logv.real, overflow=True)
    if logv.real == -math.inf:
        return FnValue(value=0j, log_modulus=-math.inf, overflow=False)
    return FnValue(value=cmath.exp(logv), log_modulus=logv.real, overflow=False)


def evaluate(spec: FunctionSpec, z: complex) -> FnValue:
    """f(z), or an overflow-flagged result that still carries log|f(z)|."""
    return _fnvalue_from_log(log_eval(spec, z))


def log_modulus(spec: FunctionSpec, z: complex) -> LogModulus:
    """log |f(z)| with a flag marking asymptotic/log-space evaluation paths."""
    spec.validate()
    z = complex(z)
    asym = False
    if isinstance(spec, (MittagLeffler, MittagLefflerPower, ScaledMittagLefflerPower)):
        alpha = spec.alpha
        u = z ** spec.n if isinstance(spec, (MittagLefflerPower, ScaledMittagLefflerPower)) else z
        asym = abs(u) ** (1.0 / alpha) >= _X_ASYM or abs(u) > ml_series_switch(alpha)
    value = log_eval(spec, z).real
    return LogModulus(value=value, overflow_safe=asym or value > LOG_OVERFLOW)


def log_derivative(spec: FunctionSpec, z: complex) -> complex:
    """f'(z) / f(z) with closed forms per family (quadrature only for f itself)."""
    spec.validate()
    z = complex(z)
    if isinstance(spec, ExpFamily):
        return 1.0 + 0j
    if isinstance(spec, SineFamily):
        w = spec.alpha * z + spec.beta
        # cot(w) = i (e^{2iw} + 1) / (e^{2iw} - 1), |e^{2iw}| <= 1 for Im w >= 0
        if w.imag >= 0:
            e = cmath.exp(2j * w)
            return spec.alpha * 1j * (e + 1.0) / (e - 1.0)
        e = cmath.exp(-2j * w)
        return spec.alpha * (-1j) * (e + 1.0) / (e - 1.0)
    if isinstance(spec, MittagLeffler):
        return _ml_log_derivative(spec.alpha, z)
    if isinstance(spec, (MittagLefflerPower, ScaledMittagLefflerPower)):
        u = z ** spec.n
        return spec.n * z ** (spec.n - 1) * _ml_log_derivative(spec.alpha, u)
    if isinstance(spec, ErdosIntegral):
        p = np.asarray(spec.p_coeffs, dtype=complex)
        q = np.asarray(spec.q_coeffs, dtype=complex)
        fprime = complex(
            np.polynomial.polynomial.polyval(z, p) * cmath.exp(np.polynomial.polynomial.polyval(z, q))
        )
        f = _erdos_value(spec, z)
        if f == 0:
            raise DomainError("log-derivative queried at a zero")
        return fprime / f
    raise ParameterError(f"unknown spec {spec!r}")


# ---------------------------------------------------------------------------
# vectorized log-modulus / values over grids


def _ml_log_value_grid(alpha: float, Z: np.ndarray) -> np.ndarray:
    """Vectorized log E_alpha over a complex array (values as complex logs).

    Series points beyond the float64 cancellation budget are escalated through
    the scalar path, so grid and scalar evaluations agree.
    """
    Z = np.asarray(Z, dtype=complex)
    out = np.empty(Z.shape, dtype=complex)
    flat = Z.ravel()
    res = out.ravel()
    absz = np.abs(flat)
    big_x = np.where(absz > 0, absz ** (1.0 / alpha), 0.0)
    asym = (big_x >= _X_ASYM) | (absz > ml_series_switch(alpha))
    zero = absz == 0
    res[zero] = 0j

    # --- branch expansion region
    idx = np.nonzero(asym & ~zero)[0]
    if idx.size:
        z = flat[idx]
        X = big_x[idx]
        theta = np.angle(z)
        rho = 1.0 / alpha
        window = 1.5 * math.pi - 3.0 / np.sqrt(np.maximum(X, 1.0))
        exps = []  # (mask, w) per Stokes-active branch
        for k in (0, -1, 1):
            if k != 0:
                d = (2.0 * math.pi * rho) % (2.0 * math.pi)
                if min(d, 2.0 * math.pi - d) < 1e-9:
                    continue
            a = rho * (theta + 2.0 * math.pi * k)
            mask = np.abs(a) <= window
            if mask.any():
                exps.append((mask, X * np.exp(1j * a)))
        # algebraic tail, optimal truncation per point
        t = np.log(np.abs(z))
        phi = theta
        thresholds, kstars = _tail_breakpoints(alpha)
        kstar = kstars[np.searchsorted(thresholds, t)]
        tail = np.zeros(z.shape, dtype=complex)
        coeffs = _tail_coeffs(alpha)
        for i in range(int(kstar.max()) if kstar.size else 0):
            c = coeffs[i]
            if c is None:
                continue
            k = i + 1
            lm = c[0] - k * t
            use = (kstar > i) & (lm > -745.0)
            if use.any():
                tail[use] -= c[1] * np.exp(lm[use] + 1j * (-k * phi[use]))
        re_star = np.full(z.shape, -np.inf)
        for mask, w in exps:
            re_star = np.where(mask, np.maximum(re_star, w.real), re_star)
        logv = np.empty(z.shape, dtype=complex)
        direct = re_star - math.log(alpha) <= LOG_OVERFLOW
        if direct.any():
            val = tail.copy()
            for mask, w in exps:
                m = mask & direct
                if m.any():
                    val[m] += rho * np.exp(w[m])
            with np.errstate(divide="ignore", invalid="ignore"):
                lv = np.log(np.where(val == 0, 1.0, val))
            lv = np.where(val == 0, complex(-np.inf, 0.0), lv)
            logv[direct] = lv[direct]
        huge = ~direct
        if huge.any():
            # s keeps the branch phases; np.log wraps the total arg to (-pi, pi]
            s = np.zeros(z.shape, dtype=complex)
            for mask, w in exps:
                m = mask & huge
                if m.any():
                    s[m] += np.exp(w[m] - re_star[m])
            logv[huge] = (re_star - math.log(alpha))[huge] + np.log(s[huge])
        res[idx] = logv

    # --- series region
    idx = np.nonzero(~asym & ~zero)[0]
    if idx.size:
        z = flat[idx]
        re_w = big_x[idx] * np.cos(np.angle(z) / alpha)
        value_log_est = np.maximum(re_w - math.log(alpha), -np.log(3.0 * np.abs(z) + 3.0))
        loss = np.maximum(0.0, np.where(big_x[idx] < 2.0, 0.0, big_x[idx] - value_log_est))
        ok = loss <= _LOSS_DOUBLE
        if ok.any():
            zz = z[ok]
            acc = np.zeros(zz.shape, dtype=complex)
            term = np.ones(zz.shape, dtype=complex)
            n_min = (1.0 / alpha) * big_x[idx][ok].max() if zz.size else 0.0
            n = 0
            while n < _SERIES_CAP:
                acc += term
                if n > n_min and np.max(np.abs(term)) < 1e-18 * (np.max(np.abs(acc)) + 1e-280):
                    break
                term = term * zz * math.exp(
                    math.lgamma(alpha * n + 1.0) - math.lgamma(alpha * (n + 1) + 1.0)
                )
                n += 1
            with np.errstate(divide="ignore", invalid="ignore"):
                lv = np.log(np.where(acc == 0, 1.0, acc))
            lv = np.where(acc == 0, complex(-np.inf, 0.0), lv)
            sub = res[idx]
            sub[ok] = lv
            res[idx] = sub
        hard = np.nonzero(~ok)[0]
        if hard.size:
            sub = res[idx]
            for j in hard:
                sub[j] = _ml_log_value(alpha, complex(z[j]))
            res[idx] = sub
    return out


def log_eval_grid(spec: FunctionSpec, Z: np.ndarray) -> np.ndarray:
    """Vectorized log f over a complex array; real parts may be -inf at zeros."""
    spec.validate()
    Z = np.asarray(Z, dtype=complex)
    if isinstance(spec, ExpFamily):
        return cmath.log(spec.lam) + Z
    if isinstance(spec, SineFamily):
        W = spec.alpha * Z + spec.beta
        out = np.empty(W.shape, dtype=complex)
        small = np.abs(W.imag) < 20.0
        if small.any():
            s = np.sin(W[small])
            with np.errstate(divide="ignore", invalid="ignore"):
                lv = np.log(np.where(s == 0, 1.0, s))
            out[small] = np.where(s == 0, complex(-np.inf, 0.0), lv)
        up = ~small & (W.imag > 0)
        if up.any():
            w = W[up]
            out[up] = -1j * w + complex(-math.log(2.0), math.pi / 2.0) + np.log1p(-np.exp(2j * w))
        dn = ~small & (W.imag < 0)
        if dn.any():
            w = W[dn]
            out[dn] = 1j * w + complex(-math.log(2.0), -math.pi / 2.0) + np.log1p(-np.exp(-2j * w))
        return out
    if isinstance(spec, MittagLeffler):
        return _ml_log_value_grid(spec.alpha, Z)
    if isinstance(spec, MittagLefflerPower):
        return _ml_log_value_grid(spec.alpha, Z ** spec.n)
    if isinstance(spec, ScaledMittagLefflerPower):
        return math.log(spec.lam) + _ml_log_value_grid(spec.alpha, Z ** spec.n)
    if isinstance(spec, ErdosIntegral):
        flat = Z.ravel()
        out = np.array([_log_erdos(spec, complex(z)) for z in flat], dtype=complex)
        return out.reshape(Z.shape)
    raise ParameterError(f"unknown spec {spec!r}")


def log_modulus_grid(spec: FunctionSpec, Z: np.ndarray) -> np.ndarray:
    """Vectorized log |f| over a complex array."""
    return log_eval_grid(spec, Z).real


def eval_grid(spec: FunctionSpec, Z: np.ndarray) -> np.ndarray:
    """Vectorized f values; overflowing entries become complex infinities."""
    logv = log_eval_grid(spec, Z)
    out = np.empty(logv.shape, dtype=complex)
    ok = logv.real <= LOG_OVERFLOW
    out[ok] = np.exp(logv[ok])
    big = ~ok
    if big.any():
        out[big] = np.inf * np.exp(1j * logv.imag[big])
    return out


# ---------------------------------------------------------------------------
# maximum modulus, order, sector boundedness


def max_modulus(spec: FunctionSpec, r: float, samples: int = 256) -> float:
    """log log M(r, f): coarse circle sampling plus golden-section refinement."""
    if r <= 0:
        raise DomainError("radius must be positive")
    if samples < 64:
        raise ParameterError("samples must be at least 64")
    thetas = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    vals = log_modulus_grid(spec, r * np.exp(1j * thetas))
    i = int(np.argmax(vals))
    lo = thetas[i] - 2.0 * math.pi / samples
    hi = thetas[i] + 2.0 * math.pi / samples

    def g(t: float) -> float:
        return log_eval(spec, r * cmath.exp(1j * t)).real

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(40):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = g(d)
    log_m = max(float(np.max(vals)), fc, fd)
    if log_m <= 0.0:
        raise DomainError(f"M({r}) <= 1: log log M undefined")
    return math.log(log_m)


def order_estimate(
    spec: FunctionSpec,
    r_min: float,
    r_max: float,
    n_points: int = 16,
    samples: int = 256,
) -> float:
    """Least-squares slope of log log M(r) against log r on log-spaced radii."""
    if not (1.0 < r_min < r_max):
        raise DomainError("need 1 < r_min < r_max")
    if n_points < 3:
        raise ParameterError("n_points must be at least 3")
    radii = np.geomspace(r_min, r_max, n_points)
    y = np.array([max_modulus(spec, float(r), samples) for r in radii])
    x = np.log(radii)
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


@dataclass(frozen=True)
class SectorBoundReport:
    """Maximum of |E_alpha| over the sector around the negative real axis."""

    alpha: float
    r_max: float
    max_modulus: float
    argmax: complex
    bound: float
    passed: bool
    growth_trend: float  # slope of per-radius max against log r (top half)


def sector_bound_check(
    alpha: float,
    r_max: float,
    n_r: int = 48,
    n_theta: int = 33,
    bound: float = 10.0,
    r_min: float = 0.5,
) -> SectorBoundReport:
    """Sample |E_alpha| over { r e^{it} : |t - pi| <= (1 - alpha/2) pi }."""
    MittagLeffler(alpha).validate()
    half = (1.0 - alpha / 2.0) * math.pi
    radii = np.geomspace(r_min, r_max, n_r)
    thetas = math.pi + np.linspace(-half, half, n_theta)
    R, T = np.meshgrid(radii, thetas, indexing="ij")
    Z = R * np.exp(1j * T)
    lm = log_modulus_grid(MittagLeffler(alpha), Z)
    per_radius = lm.max(axis=1)
    i, j = np.unravel_index(int(np.argmax(lm)), lm.shape)
    top = n_r // 2
    trend = float(np.polyfit(np.log(radii[top:]), per_radius[top:], 1)[0])
    mx = float(math.exp(lm[i, j]))
    return SectorBoundReport(
        alpha=alpha,
        r_max=r_max,
        max_modulus=mx,
        argmax=complex(Z[i, j]),
        bound=bound,
        passed=mx <= bound,
        growth_trend=trend,
    )


def default_threshold(spec: FunctionSpec) -> float:
    """Default super-level threshold R: clear of |f(0)| and the singular values."""
    spec.validate()
    if isinstance(spec, ExpFamily):
        sing = abs(spec.lam)
    elif isinstance(spec, SineFamily):
        sing = 1.0  # critical values of sin are +-1
    elif isinstance(spec, (MittagLeffler, MittagLefflerPower)):
        sing = 5.0
    elif isinstance(spec, ScaledMittagLefflerPower):
        sing = 5.0 * spec.lam
    else:
        sing = 5.0
    f0 = evaluate(spec, 0.0)
    base = abs(f0.value) if f0.value is not None else math.inf
    return max(10.0, 2.0 * base, 2.0 * sing)
