"""Per-index Gram's-law quantities derived from a certified zero table.

For an ordinate gamma_n and Gram points t_m (theta(t_m) = pi (m - 1)):

* ``delta_lower``  m - n with t_{m-1} < gamma_n <= t_m
* ``delta_upper``  m - n with gamma_m <= t_n < gamma_{m+1}; equals S(t_n)
* ``q``            (gamma_n - t_n) / (t_{n+1} - t_n)
* ``s_plus``       S(gamma_n + 0) = N(gamma_n + 0) - theta(gamma_n)/pi - 1
* ``s_minus``      S(gamma_n - 0) = S(gamma_n + 0) - kappa_n
* ``e_norm``       (gamma_n - t_n) theta'(t_N) sqrt(2 / L), L = ln ln N

Comparisons against Gram points are raw floating-point comparisons; an
ordinate equal to t_m falls into the closed upper end of G_m.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import CertificationError, CoverageError, DomainError
from .gram import GramTable
from .special import theta, theta_prime
from .zeros import ZeroTable

CSV_HEADER = ("n", "gamma", "t", "delta_lower", "delta_upper", "q", "e_norm",
              "s_gram", "s_plus", "s_minus", "kappa")
MIN_WINDOW_START = 16


@dataclass(frozen=True)
class SeqRecord:
    n: int
    gamma: float
    t: float
    delta_lower: int
    delta_upper: int
    q: float
    e_norm: float
    s_gram: int
    s_zero_plus: float
    s_zero_minus: float
    kappa: int

    def csv_row(self):
        return [str(self.n), _fmt(self.gamma), _fmt(self.t), str(self.delta_lower),
                str(self.delta_upper), _fmt(self.q), _fmt(self.e_norm),
                str(self.s_gram), _fmt(self.s_zero_plus), _fmt(self.s_zero_minus),
                str(self.kappa)]


def _fmt(x: float) -> str:
    return format(x, ".17g")


def log_log(n: int) -> float:
    if n < MIN_WINDOW_START:
        raise DomainError(f"window start {n} too low: need N >= {MIN_WINDOW_START}")
    return math.log(math.log(n))


def e_scale(window_start: int, gram: GramTable | None = None) -> float:
    """Factor theta'(t_N) sqrt(2 / L) turning gamma_n - t_n into e_n."""
    L = log_log(window_start)
    t_n = gram[window_start] if gram is not None else GramTable(window_start)[window_start]
    return theta_prime(t_n) * math.sqrt(2.0 / L)


@dataclass
class SeqArrays:
    """Column arrays of the per-index quantities for n in (start, start + length]."""

    start: int
    length: int
    n: np.ndarray
    gamma: np.ndarray
    t: np.ndarray
    t_next: np.ndarray
    t_start: float
    delta_lower: np.ndarray
    delta_upper: np.ndarray
    q: np.ndarray
    e_norm: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    kappa: np.ndarray

    @property
    def s_gram(self):
        return self.delta_upper

    @property
    def gap(self):
        return self.gamma - self.t

    def records(self) -> list[SeqRecord]:
        return [
            SeqRecord(int(self.n[i]), float(self.gamma[i]), float(self.t[i]),
                      int(self.delta_lower[i]), int(self.delta_upper[i]),
                      float(self.q[i]), float(self.e_norm[i]), int(self.delta_upper[i]),
                      float(self.s_plus[i]), float(self.s_minus[i]), int(self.kappa[i]))
            for i in range(self.length)
        ]


class GramLawSequences:
    """Derive Delta_n, Delta(n), q_n, S-values and e_n from a zero table."""

    def __init__(self, table: ZeroTable, gram: GramTable | None = None):
        if not table.certified:
            raise CertificationError("sequences require a certified zero table")
        self.table = table
        self.gram = gram if gram is not None else GramTable(table.last_index + 64)

    # ------------------------------------------------------------ scalar API

    def _gamma(self, n):
        try:
            return self.table.gamma(n)
        except CoverageError:
            raise CoverageError(f"table gap: gamma_{n} not available") from None

    def delta_lower(self, n: int) -> int:
        gamma = self._gamma(n)
        return int(self.gram.index_of(gamma)) - n

    def delta_upper(self, n: int) -> int:
        t_n = self.gram[n]
        if not self.table.covers(t_n):
            raise CoverageError(f"table gap: zeros around t_{n} = {t_n} not available")
        return self.table.count_upto(t_n) - n

    def s_at_gram(self, n: int) -> int:
        return self.delta_upper(n)

    def q_fraction(self, n: int) -> float:
        gamma = self._gamma(n)
        t0, t1 = self.gram[n], self.gram[n + 1]
        return (gamma - t0) / (t1 - t0)

    def s_at_zero(self, n: int, side: str = "plus") -> float:
        gamma = self._gamma(n)
        plus = self.table.count_upto(gamma) - theta(gamma) / math.pi - 1.0
        if side == "plus":
            return plus
        if side == "minus":
            return plus - int(self.table.kappas[n - self.table.first_index])
        raise ValueError("side must be 'plus' or 'minus'")

    def e_normalized(self, n: int, window_start: int) -> float:
        scale = e_scale(window_start, self.gram)
        return (self._gamma(n) - self.gram[n]) * scale

    def gram_law_holds(self, n: int) -> bool:
        return self.delta_lower(n) == 0

    # ------------------------------------------------------------ batch API

    def arrays(self, start: int, length: int) -> SeqArrays:
        """All quantities for n in (start, start + length].

        ``e_norm`` is NaN when start < 16, where ln ln N is not positive.
        """
        if length < 1:
            raise DomainError("window length must be at least 1")
        if start < 0:
            raise DomainError("window start must be non-negative")
        lo, hi = start + 1, start + length
        if lo < self.table.first_index or hi > self.table.last_index:
            raise CoverageError(
                f"window ({start}, {hi}] not covered by zero table "
                f"[{self.table.first_index}, {self.table.last_index}]")
        n = np.arange(lo, hi + 1, dtype=np.int64)
        i0 = lo - self.table.first_index
        gamma = self.table.gammas[i0 : i0 + length]
        kappa = self.table.kappas[i0 : i0 + length]
        heights = self.gram.heights(start, hi + 1)
        t, t_next = heights[1:-1], heights[2:]
        if not (self.table.covers(float(t[0])) and self.table.covers(float(t[-1]))):
            raise CoverageError(f"zero table does not reach past t_{hi}")
        delta_lower = self.gram.index_of(gamma).astype(np.int64) - n
        delta_upper = self.table.count_upto(t).astype(np.int64) - n
        q = (gamma - t) / (t_next - t)
        s_plus = self.table.count_upto(gamma) - theta(gamma) / math.pi - 1.0
        s_minus = s_plus - kappa
        if start >= MIN_WINDOW_START:
            e_norm = (gamma - t) * e_scale(start, self.gram)
        else:
            e_norm = np.full(length, math.nan)
        return SeqArrays(start, length, n, gamma, t, t_next, float(heights[0]),
                         delta_lower, delta_upper, q, e_norm, s_plus, s_minus, kappa)

    def records(self, start: int, length: int) -> list[SeqRecord]:
        return self.arrays(start, length).records()


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def records_from_csv(text: str) -> list[SeqRecord]:
    reader = csv.DictReader(io.StringIO(text))
    names = {"s_plus": "s_zero_plus", "s_minus": "s_zero_minus"}
    kinds = {f.name: f.type for f in fields(SeqRecord)}
    out = []
    for row in reader:
        kw = {}
        for key, value in row.items():
            name = names.get(key, key)
            kw[name] = int(value) if kinds[name] in ("int", int) else float(value)
        out.append(SeqRecord(**kw))
    return out


# ------------------------------------------------------------- S(t) plot data


@dataclass(frozen=True)
class SawtoothPoint:
    t: float
    s: float
    kind: str  # "curve" or "jump"


def s_sawtooth(table: ZeroTable, t_lo: float, t_hi: float,
               samples: int = 16) -> list[SawtoothPoint]:
    """Polyline of S(t) = N(t) - theta(t)/pi - 1 on [t_lo, t_hi].

    Between ordinates S is sampled at ``samples`` + 1 points; each ordinate
    contributes two "jump" points, S(gamma - 0) then S(gamma + 0).
    """
    if not t_lo < t_hi:
        raise DomainError("need t_lo < t_hi")
    if not (table.covers(t_lo) and table.covers(t_hi)):
        raise CoverageError(f"range [{t_lo}, {t_hi}] not covered by the zero table")
    g = table.gammas
    inside = np.unique(g[(g > t_lo) & (g <= t_hi)])
    cuts = [t_lo, *inside.tolist()]
    if cuts[-1] != t_hi:
        cuts.append(t_hi)
    points = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        # N is constant on (a, b): it equals the count just right of a
        count = table.count_upto(a)
        xs = np.linspace(a, b, samples + 1)
        s_vals = count - theta(xs) / math.pi - 1.0
        points.extend(SawtoothPoint(float(x), float(s), "curve") for x, s in zip(xs, s_vals))
        if b in inside:
            base = theta(b) / math.pi + 1.0
            points.append(SawtoothPoint(float(b), count - base, "jump"))
            points.append(SawtoothPoint(float(b), table.count_upto(b) - base, "jump"))
    return points


def sawtooth_to_csv(points) -> str:
    lines = ["t,S,kind"]
    lines.extend(f"{_fmt(p.t)},{_fmt(p.s)},{p.kind}" for p in points)
    return "\n".join(lines) + "\n"
