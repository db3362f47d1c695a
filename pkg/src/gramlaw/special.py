"""Riemann-Siegel theta function, its derivatives, and the Z function.

All routines work in double precision and accept either a float or a numpy
array of heights.  Scalars in give Python floats out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._rs_coefficients import RS_CORRECTIONS
from .errors import DomainError

__all__ = [
    "T_MIN",
    "Z_T_MIN",
    "ThetaExpansion",
    "ZEvaluation",
    "bernoulli_even",
    "theta",
    "theta_prime",
    "theta_second",
    "z_function",
    "z_values",
]

T_MIN = 8.0
Z_T_MIN = 10.0
# Below this height the Riemann-Siegel remainder (through C4) is not yet
# accurate to 1e-8; the Euler-Maclaurin route is used instead.
EM_CUTOFF = 200.0

TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=None)
def bernoulli_even(count: int) -> tuple[Fraction, ...]:
    """Return (B_2, B_4, ..., B_{2 count}) as exact fractions."""
    size = 2 * count + 1
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (size + 1)
    values = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        values.append(a[0])
    return tuple(values[2 * n] for n in range(1, count + 1))


@dataclass(frozen=True)
class ThetaExpansion:
    """Asymptotic expansion of theta(t) truncated after ``order`` corrections.

    The n-th correction is c_n t^{-(2n-1)} with
    c_n = (2^{2n-1} - 1) / (2^{2n} 2n (2n-1)) (-1)^{n+1} B_{2n}.
    """

    order: int = 5
    t_min: float = T_MIN
    bernoulli: tuple[Fraction, ...] = field(init=False)
    coefficients: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 4:
            raise ValueError("order must be at least 4")
        b = bernoulli_even(self.order)
        coeffs = []
        for n, b2n in enumerate(b, start=1):
            c = Fraction(2 ** (2 * n - 1) - 1, 2 ** (2 * n) * 2 * n * (2 * n - 1))
            coeffs.append(float(c * (-1) ** (n + 1) * b2n))
        object.__setattr__(self, "bernoulli", b)
        object.__setattr__(self, "coefficients", tuple(coeffs))

    def _check(self, t):
        arr = np.asarray(t, dtype=float)
        if not np.all(arr >= self.t_min):
            raise DomainError(f"theta is defined here only for t >= {self.t_min}")
        return arr

    def theta(self, t):
        arr = self._check(t)
        inv = 1.0 / arr
        inv2 = inv * inv
        corr = np.zeros_like(arr)
        for c in reversed(self.coefficients):
            corr = corr * inv2 + c
        out = 0.5 * arr * np.log(arr / TWO_PI) - 0.5 * arr - math.pi / 8 + corr * inv
        return _like(t, out)

    def theta_prime(self, t):
        arr = self._check(t)
        inv2 = 1.0 / (arr * arr)
        corr = np.zeros_like(arr)
        for n in range(len(self.coefficients), 0, -1):
            corr = corr * inv2 - (2 * n - 1) * self.coefficients[n - 1]
        out = 0.5 * np.log(arr / TWO_PI) + corr * inv2
        return _like(t, out)

    def theta_second(self, t):
        arr = self._check(t)
        inv = 1.0 / arr
        inv2 = inv * inv
        corr = np.zeros_like(arr)
        for n in range(len(self.coefficients), 0, -1):
            corr = corr * inv2 + (2 * n - 1) * (2 * n) * self.coefficients[n - 1]
        out = 0.5 * inv + corr * inv2 * inv
        return _like(t, out)


def _like(t, out):
    if np.ndim(t) == 0:
        return float(out)
    return out


DEFAULT_EXPANSION = ThetaExpansion()


def theta(t):
    """Riemann-Siegel theta function; absolute error below 1e-10 for t >= 8."""
    return DEFAULT_EXPANSION.theta(t)


def theta_prime(t):
    return DEFAULT_EXPANSION.theta_prime(t)


def theta_second(t):
    return DEFAULT_EXPANSION.theta_second(t)


# ---------------------------------------------------------------- Z function

REMAINDER_ORDER = len(RS_CORRECTIONS)
_RS_COEFFS = [np.array(c[::-1]) for c in RS_CORRECTIONS]


def _rs_remainder(t, n_terms):
    a = np.sqrt(t / TWO_PI)
    u = (a - n_terms) - 0.5
    w = 1.0 / a
    total = np.zeros_like(t)
    scale = np.ones_like(t)
    for coeffs in _RS_COEFFS:
        poly = np.zeros_like(t)
        for c in coeffs:
            poly = poly * u + c
        total += poly * scale
        scale = scale * w
    sign = np.where(n_terms % 2 == 1, 1.0, -1.0)
    return sign * np.sqrt(w) * total


def _main_sum(t, th, n_terms):
    # Terms are accumulated in k order for every row, so each value depends
    # only on its own height and never on batch size or composition.
    order = np.argsort(-n_terms, kind="stable")
    ts, ths, ns = t[order], th[order], n_terms[order]
    acc = np.zeros_like(ts)
    active = len(ts)
    for k in range(1, int(ns[0]) + 1):
        while active and ns[active - 1] < k:
            active -= 1
        acc[:active] += np.cos(ths[:active] - ts[:active] * math.log(k)) / math.sqrt(k)
    out = np.empty_like(t)
    out[order] = 2.0 * acc
    return out


# Euler-Maclaurin tail coefficients B_{2j} / (2j)!
_EM_ORDER = 12
_EM_COEFFS = [
    float(b / math.factorial(2 * j))
    for j, b in enumerate(bernoulli_even(_EM_ORDER), start=1)
]


def _z_euler_maclaurin(t, th):
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        s = complex(0.5, ti)
        m = int(ti) + 20
        k = np.arange(1, m, dtype=float)
        head = np.sum(np.exp(-s * np.log(k)))
        nm = complex(m)
        total = head + nm ** (1 - s) / (s - 1) + 0.5 * nm ** (-s)
        rising = s
        power = nm ** (-s - 1)
        for j, c in enumerate(_EM_COEFFS, start=1):
            total += c * rising * power
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            power /= nm * nm
        out[i] = (np.exp(1j * th[i]) * total).real
    return out


def z_values(t):
    """Vectorised Z(t) for t >= T_MIN, without domain policy or metadata."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(arr >= T_MIN):
        raise DomainError(f"Z is evaluated only for t >= {T_MIN}")
    th = theta(arr)
    out = np.empty_like(arr)
    low = arr < EM_CUTOFF
    if np.any(low):
        out[low] = _z_euler_maclaurin(arr[low], th[low])
    high = ~low
    if np.any(high):
        th_h = th[high]
        t_h = arr[high]
        n_terms = np.floor(np.sqrt(t_h / TWO_PI)).astype(np.int64)
        out[high] = _main_sum(t_h, th_h, n_terms) + _rs_remainder(t_h, n_terms)
    if np.ndim(t) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class ZEvaluation:
    t: float
    value: float
    terms: int
    remainder_order: int


def z_function(t: float) -> ZEvaluation:
    """Evaluate the Riemann-Siegel Z function at a single height t >= 10.

    ``terms`` is the length of the Riemann-Siegel main sum.  Below
    ``EM_CUTOFF`` the value itself comes from Euler-Maclaurin summation of
    zeta(1/2 + it), and ``remainder_order`` is reported as 0.
    """
    if not t >= Z_T_MIN:
        raise DomainError(f"z_function requires t >= {Z_T_MIN}, got {t}")
    terms = math.floor(math.sqrt(t / TWO_PI))
    order = REMAINDER_ORDER if t >= EM_CUTOFF else 0
    return ZEvaluation(t=float(t), value=z_values(float(t)), terms=terms,
                       remainder_order=order)
