"""Gram points and Gram intervals.

Indexing follows theta(t_n) = pi (n - 1), so t_0 ~ 9.667 and t_1 ~ 17.846.
The classical Gram point g_m (theta(g_m) = m pi) equals t_{m+1} here; use
:func:`to_classical` / :func:`from_classical` when exchanging data with
external tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from .errors import ConvergenceError, DomainError
from .special import T_MIN, theta, theta_prime

RESIDUAL_TOL = 1e-9
MAX_ITER = 64
NEWTON_STEPS = 8


@dataclass(frozen=True, order=True)
class GramPoint:
    n: int
    t: float


@dataclass(frozen=True)
class GramInterval:
    """The half-open interval G_n = (lo, hi] = (t_{n-1}, t_n]."""

    n: int
    lo: float
    hi: float

    def __contains__(self, x):
        return self.lo < x <= self.hi

    @property
    def width(self):
        return self.hi - self.lo


def to_classical(n: int) -> int:
    return n - 1


def from_classical(m: int) -> int:
    return m + 1


def _initial_guess(n):
    # theta(t) ~ (t/2) log(t / (2 pi e)) - pi/8 inverted with Lambert W
    x = (np.asarray(n, dtype=float) - 0.875) / math.e
    w = lambertw(x).real
    with np.errstate(divide="ignore", invalid="ignore"):
        guess = 2 * math.pi * math.e * np.exp(w)
    return np.maximum(guess, T_MIN + 1.0)


def _bisect(target, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if theta(mid) < target:
            lo = mid
        else:
            hi = mid
        if abs(theta(mid) - target) < RESIDUAL_TOL or hi - lo < 1e-14 * hi:
            return mid
    raise ConvergenceError(f"bisection failed for theta(t) = {target}")


def _solve(n: int) -> float:
    target = math.pi * (n - 1)
    t = float(_initial_guess(n))
    for _ in range(MAX_ITER):
        step = (theta(t) - target) / theta_prime(t)
        t_new = t - step
        if not t_new >= T_MIN:
            # Newton left the monotone branch; bracket and bisect instead
            lo, hi = T_MIN, max(t, 2 * T_MIN)
            while theta(hi) < target:
                hi *= 2
            return _bisect(target, lo, hi)
        t = t_new
        if abs(theta(t) - target) < RESIDUAL_TOL and abs(step) < 1e-12 * t:
            return t
    if abs(theta(t) - target) < RESIDUAL_TOL:
        return t
    raise ConvergenceError(f"Newton iteration for Gram point {n} did not converge")


def gram_point(n: int) -> GramPoint:
    """Solve theta(t) = pi (n - 1) for the Gram point t_n, n >= 0."""
    if n < 0:
        raise DomainError("Gram points are defined for n >= 0")
    return GramPoint(n=int(n), t=float(gram_heights(int(n), 1)[0]))


def gram_interval(n: int) -> GramInterval:
    if n < 1:
        raise DomainError("Gram intervals are defined for n >= 1")
    return GramInterval(n=int(n), lo=gram_point(n - 1).t, hi=gram_point(n).t)


def gram_heights(first: int, count: int) -> np.ndarray:
    """Heights t_first, ..., t_{first+count-1} as a float array.

    Vectorised Newton from the Lambert-W estimate.  Results do not depend on
    how a range is split into calls.
    """
    if first < 0 or count < 1:
        raise DomainError("need first >= 0 and count >= 1")
    n = np.arange(first, first + count, dtype=np.int64)
    target = math.pi * (n - 1)
    t = _initial_guess(n)
    # fixed iteration count: every height depends only on its own index
    for _ in range(NEWTON_STEPS):
        t_new = t - (theta(t) - target) / theta_prime(t)
        bad = ~(t_new >= T_MIN)
        if np.any(bad):
            t_new[bad] = [_solve(int(k)) for k in n[bad]]
        t = t_new
    residual = np.abs(theta(t) - target)
    if not np.all(residual < RESIDUAL_TOL):
        worst = int(n[np.argmax(residual)])
        raise ConvergenceError(f"Gram point {worst} residual above tolerance")
    return t


def gram_range(first: int, count: int) -> list[GramPoint]:
    t = gram_heights(first, count)
    return [GramPoint(n=first + i, t=float(x)) for i, x in enumerate(t)]


def gram_index_below(t: float) -> int:
    """Largest n >= 0 with t_n <= t (t must be >= t_0)."""
    n = math.floor(theta(t) / math.pi + 1.0)
    # guard the floor against rounding at a Gram point
    while n >= 0 and gram_point(n).t > t:
        n -= 1
    while gram_point(n + 1).t <= t:
        n += 1
    if n < 0:
        raise DomainError(f"height {t} lies below t_0")
    return n


class GramTable:
    """Growable cache of consecutive Gram heights starting at index 0."""

    def __init__(self, upto: int = 64):
        self._t = gram_heights(0, max(int(upto), 1) + 1)

    @property
    def size(self):
        return len(self._t)

    def ensure(self, n: int):
        if n >= len(self._t):
            extra = max(n + 1 - len(self._t), len(self._t) // 2)
            self._t = np.concatenate([self._t, gram_heights(len(self._t), extra)])

    def heights(self, lo: int, hi: int) -> np.ndarray:
        """Heights for indices lo..hi inclusive."""
        self.ensure(hi)
        return self._t[lo : hi + 1]

    def __getitem__(self, n: int) -> float:
        self.ensure(n)
        return float(self._t[n])

    def index_of(self, x) -> np.ndarray:
        """Smallest m with t_m >= x, i.e. the m with t_{m-1} < x <= t_m."""
        x = np.asarray(x, dtype=float)
        top = float(np.max(x)) if x.size else 0.0
        while self._t[-1] < top:
            self.ensure(2 * len(self._t))
        return np.searchsorted(self._t, x, side="left")
