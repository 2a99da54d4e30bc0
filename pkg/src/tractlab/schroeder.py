"""Repelling fixed point of E_b(x) = e^{bx} and its Koenigs linearization.

For 0 < b < 1/e the map E_b has a repelling real fixed point xi > e with
multiplier mu = b*xi > 1.  The linearizer phi solves phi(E_b(x)) = mu*phi(x),
phi(xi) = 0, phi'(xi) = 1, and is evaluated by pulling x back along the
inverse branch L(y) = log(y)/b (which attracts to xi) until it lands in a
small neighbourhood of xi, where a locally-computed power-series germ takes
over.  The germ avoids the float64 noise floor of the raw Koenigs limit
mu^n (L^n x - xi), which saturates near 1e-9 relative error.

eps(x) = 1/phi(x) is the slow decay rate; delta_sequence telescopes
eps(exp(x_n)) along orbits x_n = E_b^n(x_0) far past the floating-point
horizon using the functional equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import DomainError, ParameterError

_BETA_MAX = 1.0 / math.e
_GERM_TERMS = 10
_GERM_RADIUS = 1e-2


def _germ_coefficients(beta: float, xi: float, mu: float, terms: int) -> np.ndarray:
    """Power-series coefficients of phi at xi from the functional equation.

    With E(xi + h) = xi + sum e_k h^k (e_k = b^k xi / k!) and
    phi(xi + h) = sum a_k h^k, matching coefficients in
    phi(E(xi+h)) = mu phi(xi+h) gives a_1 = 1 and a triangular system for the
    rest: a_k (mu^k - mu) = -(lower-order contributions).
    """
    e = np.zeros(terms + 1)
    for k in range(1, terms + 1):
        e[k] = beta ** k * xi / math.factorial(k)
    a = np.zeros(terms + 1)
    a[1] = 1.0
    # powers of (E(xi+h) - xi) as polynomials in h, truncated
    epoly = e.copy()
    powers = [np.zeros(terms + 1), epoly]
    for m in range(2, terms + 1):
        nxt = np.zeros(terms + 1)
        prev = powers[m - 1]
        for i in range(m - 1, terms + 1):
            if prev[i] == 0.0:
                continue
            for j in range(1, terms + 1 - i):
                nxt[i + j] += prev[i] * e[j]
        powers.append(nxt)
    powers[0][0] = 1.0
    for k in range(2, terms + 1):
        lower = sum(a[m] * powers[m][k] for m in range(1, k))
        a[k] = -lower / (mu ** k - mu)
    return a


@dataclass(frozen=True)
class SchroederSolution:
    """Fixed point, multiplier and linearizer data for E_b(x) = e^{bx}."""

    beta: float
    xi: float
    mu: float
    koenigs_depth: int = 200
    tol: float = 1e-12
    germ: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.germ is None:
            object.__setattr__(
                self, "germ", _germ_coefficients(self.beta, self.xi, self.mu, _GERM_TERMS)
            )

    def phi(self, x: float) -> float:
        return phi(self, x)

    def epsilon(self, x: float) -> float:
        return epsilon(self, x)

    def phi_log(self, log_x: float) -> float:
        return phi_log(self, log_x)

    def epsilon_log(self, log_x: float) -> float:
        return 1.0 / phi_log(self, log_x)


def solve_fixed_point(beta: float, tol: float = 1e-12, koenigs_depth: int = 200) -> SchroederSolution:
    """Bisection for the repelling solution of e^{bx} = x on (e, inf)."""
    if not (0.0 < beta < _BETA_MAX):
        raise ParameterError(f"beta must lie in (0, 1/e), got {beta}")

    def g(x: float) -> float:
        return math.exp(beta * x) - x

    lo = math.e
    hi = 10.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise ParameterError("failed to bracket the repelling fixed point")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    xi = 0.5 * (lo + hi)
    mu = beta * xi
    germ = _germ_coefficients(beta, xi, mu, _GERM_TERMS)
    return SchroederSolution(beta=beta, xi=xi, mu=mu, koenigs_depth=koenigs_depth, tol=tol, germ=germ)


fixed_point = solve_fixed_point


def _germ_eval(sol: SchroederSolution, h: float) -> float:
    acc = 0.0
    for k in range(len(sol.germ) - 1, 0, -1):
        acc = (acc + sol.germ[k]) * h
    return acc


def _phi_from(sol: SchroederSolution, y: float, prefactor_steps: int) -> float:
    """Pull y back along L(y) = log(y)/b into the germ disc, then expand."""
    beta, xi, mu = sol.beta, sol.xi, sol.mu
    steps = prefactor_steps
    for _ in range(sol.koenigs_depth):
        h = y - xi
        if abs(h) <= _GERM_RADIUS:
            return mu ** steps * _germ_eval(sol, h)
        y = math.log(y) / beta
        steps += 1
    return mu ** steps * _germ_eval(sol, y - xi)


def phi(sol: SchroederSolution, x: float) -> float:
    """Linearizer value on [xi, inf); increasing, phi(xi) = 0."""
    if x < sol.xi:
        raise DomainError(f"phi defined on [xi, inf), got {x} < {sol.xi}")
    return _phi_from(sol, x, 0)


def phi_log(sol: SchroederSolution, log_x: float) -> float:
    """phi(e^u) for u = log x supplied directly (x itself may overflow).

    First inverse step taken analytically: L(e^u) = u / b.
    """
    if log_x <= 700.0 and math.exp(log_x) >= sol.xi:
        return _phi_from(sol, math.exp(log_x), 0)
    y1 = log_x / sol.beta
    if y1 < sol.xi:
        raise DomainError("phi_log argument below the fixed point")
    return _phi_from(sol, y1, 1)


def epsilon(sol: SchroederSolution, x: float) -> float:
    """eps(x) = 1/phi(x) on (xi, inf); positive and strictly decreasing."""
    if x <= sol.xi:
        raise DomainError(f"epsilon defined on (xi, inf), got {x}")
    return 1.0 / phi(sol, x)


@dataclass(frozen=True)
class DeltaSequence:
    """delta(x_n) = eps(exp(x_n)) along the orbit x_n = E_b^n(x_0)."""

    x0: float
    values: np.ndarray
    truncated: bool


def delta_sequence(sol: SchroederSolution, x0: float, n_max: int) -> DeltaSequence:
    """Values delta(x_n), n = 0..n_max, telescoped past the float horizon.

    While x_n is representable, delta(x_n) = 1/phi(e^{x_n}) via phi_log.
    Once x_{n+1} = e^{b x_n} overflows, the functional equation gives
    phi(e^{x_{n+1}}) = mu^2 phi(x_n + c) with c = -log(b)/b, and for
    still-later terms each step multiplies phi by exactly mu (to double
    precision), because the inverse orbit of e^{x_n} shadows x_{n-1}, x_{n-2}
    with corrections below 1 ulp.
    """
    if x0 <= sol.xi:
        raise DomainError("need x0 > xi")
    if x0 <= 700.0 and math.exp(x0) <= sol.xi:
        raise DomainError("need exp(x0) > xi")
    beta, mu = sol.beta, sol.mu
    c = -math.log(beta) / beta
    out = np.empty(n_max + 1)
    x = x0
    n = 0
    while n <= n_max:
        out[n] = 1.0 / phi_log(sol, x)
        if n == n_max:
            break
        if beta * x <= 700.0:
            x = math.exp(beta * x)
            n += 1
            continue
        # x_{n+1} = e^{bx} overflows.  Exactly: phi(e^{x_{n+1}}) = mu^2 phi(x_n + c),
        # and phi(e^{x_m}) = mu^{m-n+1} phi(x_n) for m >= n+2 (the inverse orbit
        # of e^{x_m} shadows x_{m-1}, x_{m-2}, ... with corrections below 1 ulp).
        first = mu * mu * _phi_from(sol, x + c, 0)
        anchor = mu * mu * mu * _phi_from(sol, x, 0)
        base = first
        for m in range(n + 1, n_max + 1):
            if not math.isfinite(base) or base <= 0.0:
                out[m:] = np.nan
                return DeltaSequence(x0=x0, values=out, truncated=True)
            out[m] = 1.0 / base
            base = anchor
            anchor *= mu
        break
    return DeltaSequence(x0=x0, values=out, truncated=False)


def partial_products(deltas: np.ndarray, eta: float) -> np.ndarray:
    """Running products of (1 - eta*delta_k); the measure-chain lower bounds."""
    factors = 1.0 - eta * np.asarray(deltas, dtype=float)
    if np.any(factors <= 0.0):
        raise DomainError("eta too large: a factor is nonpositive")
    return np.cumprod(factors)


def iterated_log_orbit(sol: SchroederSolution, x0: float, n_max: int, depth: int = 6) -> np.ndarray:
    """logs[n][j] = log^j(x_n) along x_n = E_b^n(x0), stable past overflow.

    Uses log x_{n+1} = b x_n and log^{j+1} x_{n+1} = log^j x_n + o(ulp) once
    lower levels overflow; +inf marks unrepresentable levels.
    """
    beta = sol.beta
    logs = np.full((n_max + 1, depth), np.inf)
    logs[0, 0] = x0
    for j in range(1, depth):
        v = logs[0, j - 1]
        logs[0, j] = math.log(v) if math.isfinite(v) and v > 0 else math.nan
    logb = math.log(beta)
    for n in range(1, n_max + 1):
        prev = logs[n - 1]
        cur = np.full(depth, np.inf)
        if math.isfinite(prev[0]):
            bx = beta * prev[0]
            cur[1] = bx
            if bx <= 700.0:
                cur[0] = math.exp(bx)
        for j in range(2, depth):
            v = cur[j - 1]
            if math.isnan(v):
                cur[j] = math.nan
            elif math.isfinite(v):
                cur[j] = math.log(v) if v > 0 else math.nan
            elif j == 2 and math.isfinite(prev[1]):
                cur[2] = logb + prev[1]  # log^2 x_{n+1} = log b + log x_n, exact
            elif math.isfinite(prev[j - 1]):
                cur[j] = prev[j - 1]  # level shift, below 1 ulp for huge lower level
        logs[n] = cur
    return logs
