"""Critical-line zero tables: scanning, count certification, persistence.

Zeros are located by sign changes of Z(t) between Gram points.  Gram
points t_n with (-1)^(n-1) Z(t_n) > 0 are "good"; the stretch between two
consecutive good points is a Gram block, and a block of k intervals is
expected to hold k zeros.  Blocks showing fewer sign changes are sampled on
a uniform grid of 64, 128, ..., 4096 panels until the deficit closes.

Indices are earned rather than assumed: :func:`verify_count` recounts zeros
from a nearby Gram point whose neighbourhood obeys Gram's law (three
consecutive intervals with one sign change each), where S is taken as 0 so
that N(t_m) = m.  Below height 280 every good Gram point qualifies, since
|S(t)| < 1 there.
"""

from __future__ import annotations

import hashlib
import math
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CertificationError,
    ChecksumError,
    CoverageError,
    DomainError,
    TableFormatError,
    UnresolvedBlockError,
    VersionError,
)
from .gram import gram_heights, gram_index_below
from .special import T_MIN, theta, z_values

FORMAT_VERSION = "v1"
MAGIC = "#gramlaw-zeros"
COMPUTED_PRECISION = 1e-8
MAX_HEIGHT = 1.0e5 + 1000.0
MIN_PANELS = 64
MAX_PANELS = 4096
SMALL_S_HEIGHT = 280.0
CLOSE_PAIR = 1e-6
CHUNK = 4096


@dataclass(frozen=True)
class Zero:
    n: int
    gamma: float
    kappa: int = 1


@dataclass(eq=False)
class ZeroTable:
    """Contiguous run of ordinates gamma_first, gamma_{first+1}, ...

    An ordinate of multiplicity k occupies k consecutive slots with equal
    values, each carrying kappa = k.
    """

    first_index: int
    gammas: np.ndarray
    kappas: np.ndarray
    source: str = "computed"
    precision: float = COMPUTED_PRECISION
    certified: bool = False

    def __post_init__(self):
        self.gammas = np.asarray(self.gammas, dtype=float)
        self.kappas = np.asarray(self.kappas, dtype=np.int64)
        if self.source not in ("computed", "ingested"):
            raise ValueError(f"unknown source {self.source!r}")
        if len(self.gammas) != len(self.kappas):
            raise ValueError("gammas and kappas differ in length")
        _check_monotone(self.gammas)

    @classmethod
    def from_ordinates(cls, gammas, first_index=1, **kwargs):
        gammas = np.asarray(gammas, dtype=float)
        return cls(first_index, gammas, _kappas_from_ties(gammas), **kwargs)

    def __len__(self):
        return len(self.gammas)

    def __eq__(self, other):
        if not isinstance(other, ZeroTable):
            return NotImplemented
        return (
            self.first_index == other.first_index
            and self.source == other.source
            and self.precision == other.precision
            and self.certified == other.certified
            and np.array_equal(self.gammas, other.gammas)
            and np.array_equal(self.kappas, other.kappas)
        )

    @property
    def last_index(self):
        return self.first_index + len(self.gammas) - 1

    @property
    def zeros(self) -> list[Zero]:
        return [
            Zero(n=self.first_index + i, gamma=float(g), kappa=int(k))
            for i, (g, k) in enumerate(zip(self.gammas, self.kappas))
        ]

    def gamma(self, n: int) -> float:
        if not self.first_index <= n <= self.last_index:
            raise CoverageError(f"zero index {n} outside table "
                                f"[{self.first_index}, {self.last_index}]")
        return float(self.gammas[n - self.first_index])

    def covers(self, t: float) -> bool:
        if len(self.gammas) == 0:
            return False
        lower_ok = self.first_index == 1 or t >= self.gammas[0]
        return bool(lower_ok and t <= self.gammas[-1])

    def count_upto(self, t):
        """N(t) read off the table (with multiplicity); t may be an array."""
        t_arr = np.asarray(t, dtype=float)
        if t_arr.size and not (
            (self.first_index == 1 or t_arr.min() >= self.gammas[0])
            and t_arr.max() <= self.gammas[-1]
        ):
            raise CoverageError("height outside the table's covered range")
        out = self.first_index - 1 + np.searchsorted(self.gammas, t_arr, side="right")
        return int(out) if np.ndim(t) == 0 else out

    def slice_indices(self, lo: int, hi: int) -> "ZeroTable":
        """Sub-table for indices lo..hi inclusive, keeping certification."""
        if lo < self.first_index or hi > self.last_index:
            raise CoverageError("requested indices exceed the table")
        a, b = lo - self.first_index, hi - self.first_index + 1
        return ZeroTable(lo, self.gammas[a:b].copy(), self.kappas[a:b].copy(),
                         self.source, self.precision, self.certified)


def _check_monotone(gammas, lines=None):
    if len(gammas) == 0:
        return
    bad = np.nonzero(np.diff(gammas) < 0)[0]
    if len(bad):
        where = f" at line {lines[bad[0] + 1]}" if lines is not None else ""
        raise TableFormatError(f"ordinates are not non-decreasing{where}")
    if not gammas[0] > 0:
        raise TableFormatError("ordinates must be positive")


def _kappas_from_ties(gammas):
    kappas = np.ones(len(gammas), dtype=np.int64)
    i = 0
    while i < len(gammas):
        j = i
        while j + 1 < len(gammas) and gammas[j + 1] == gammas[i]:
            j += 1
        kappas[i : j + 1] = j - i + 1
        i = j + 1
    return kappas


# ------------------------------------------------------------ sign counting


def _signs(values):
    # an exact zero counts as positive; measure zero in practice
    return np.where(values < 0, -1, 1)


def _map_chunks(fn, arr, threads):
    if threads <= 1 or len(arr) <= CHUNK:
        return fn(arr)
    parts = [arr[i : i + CHUNK] for i in range(0, len(arr), CHUNK)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(fn, parts)))


def _sign_change_brackets(grid, values):
    s = _signs(values)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    return grid[idx], grid[idx + 1], values[idx], values[idx + 1]


def _count_changes(lo, hi, panels):
    grid = np.linspace(lo, hi, panels + 1)
    s = _signs(z_values(grid))
    return int(np.count_nonzero(s[1:] != s[:-1]))


def count_sign_changes(lo: float, hi: float) -> int:
    """Sign changes of Z on (lo, hi], refined until two grid levels agree."""
    panels = MIN_PANELS
    prev = _count_changes(lo, hi, panels)
    while panels < MAX_PANELS:
        panels *= 2
        cur = _count_changes(lo, hi, panels)
        if cur == prev:
            return cur
        prev = cur
    return prev


# ------------------------------------------------------------- refinement


def refine_roots(a, b, za, zb, threads=1, max_iter=200):
    """Illinois iteration on every bracket [a_i, b_i] with za_i zb_i < 0."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    za = np.array(za, dtype=float)
    zb = np.array(zb, dtype=float)
    side = np.zeros(len(a), dtype=np.int8)
    bisect_next = np.zeros(len(a), dtype=bool)
    active = np.arange(len(a))
    for _ in range(max_iter):
        width = b[active] - a[active]
        tol = np.maximum(1e-11, 8 * np.spacing(b[active]))
        done = (width <= tol) | (za[active] == 0) | (zb[active] == 0)
        active = active[~done]
        if len(active) == 0:
            break
        aa, bb, fa, fb = a[active], b[active], za[active], zb[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (aa * fb - bb * fa) / (fb - fa)
        mid = 0.5 * (aa + bb)
        use_mid = bisect_next[active] | ~np.isfinite(c) | (c <= aa) | (c >= bb)
        c = np.where(use_mid, mid, c)
        fc = _map_chunks(z_values, c, threads)
        same_b = _signs(fc) == _signs(fb)
        old_width = bb - aa
        # c replaces b
        nb = np.where(same_b, c, bb)
        nfb = np.where(same_b, fc, fb)
        nfa = np.where(same_b & (side[active] == -1), 0.5 * fa, fa)
        # c replaces a
        na = np.where(same_b, aa, c)
        nfa = np.where(same_b, nfa, fc)
        nfb = np.where(~same_b & (side[active] == 1), 0.5 * nfb, nfb)
        side[active] = np.where(same_b, -1, 1)
        a[active], b[active], za[active], zb[active] = na, nb, nfa, nfb
        bisect_next[active] = (nb - na) > 0.5 * old_width
    root = np.where(np.abs(za) < np.abs(zb), a, b)
    return root


# ------------------------------------------------------------------ scan


@dataclass
class ScanResult:
    """Ordinates found between two good Gram points.

    ``anchor`` is the index of the starting good Gram point; its ordinates
    receive indices anchor + 1, anchor + 2, ... under N(t_anchor) = anchor.
    """

    anchor: int
    end: int
    gammas: np.ndarray
    unresolved: list = field(default_factory=list)


def _good(n, z):
    return np.where((n - 1) % 2 == 0, z > 0, z < 0)


def scan_gram_range(n_lo: int, n_hi: int, threads: int = 1) -> ScanResult:
    """Locate all zeros between good Gram points enclosing [t_{n_lo}, t_{n_hi}]."""
    pad = 8
    while True:
        first = max(n_lo - pad, 0)
        idx = np.arange(first, n_hi + pad + 1)
        t = gram_heights(first, len(idx))
        if t[-1] > MAX_HEIGHT:
            raise DomainError("scan would exceed the supported height range")
        z = _map_chunks(z_values, t, threads)
        good = np.nonzero(_good(idx, z))[0]
        lo_ok = good[good <= n_lo - first]
        hi_ok = good[good >= n_hi - first]
        if len(lo_ok) and len(hi_ok):
            break
        if first == 0 and not len(lo_ok):
            raise DomainError("no good Gram point below the requested range")
        pad *= 2
    start, stop = lo_ok[-1], hi_ok[0]
    good = good[(good >= start) & (good <= stop)]

    lo_parts, hi_parts, zlo_parts, zhi_parts = [], [], [], []
    unresolved = []
    for g0, g1 in zip(good[:-1], good[1:]):
        expected = g1 - g0
        brackets = _sign_change_brackets(t[g0 : g1 + 1], z[g0 : g1 + 1])
        if len(brackets[0]) != expected:
            brackets = _subdivide_block(t[g0], t[g1], expected)
            if brackets is None:
                unresolved.append((int(idx[g0]), int(idx[g1]), float(t[g0]), float(t[g1])))
                continue
        for part, b in zip((lo_parts, hi_parts, zlo_parts, zhi_parts), brackets):
            part.append(b)
    if lo_parts:
        a, b, za, zb = (np.concatenate(p) for p in (lo_parts, hi_parts, zlo_parts, zhi_parts))
        gammas = refine_roots(a, b, za, zb, threads=threads)
    else:
        gammas = np.empty(0)
    return ScanResult(int(idx[start]), int(idx[stop]), gammas, unresolved)


def _subdivide_block(lo, hi, expected):
    panels = MIN_PANELS
    while panels <= MAX_PANELS:
        grid = np.linspace(lo, hi, panels + 1)
        vals = z_values(grid)
        brackets = _sign_change_brackets(grid, vals)
        if len(brackets[0]) == expected:
            return brackets
        panels *= 2
    return None


def _close_pairs(gammas):
    if len(gammas) < 2:
        return []
    spacing = 2 * math.pi / np.log(np.maximum(gammas[1:], 2 * math.pi * math.e) / (2 * math.pi))
    gaps = np.diff(gammas)
    return list(np.nonzero(gaps < CLOSE_PAIR * spacing)[0])


def find_zeros(t_lo: float, t_hi: float, threads: int = 1) -> list[Zero]:
    """All critical-line zeros with t_lo <= gamma <= t_hi, indexed.

    Raises UnresolvedBlockError if any Gram block keeps missing sign
    changes after maximal subdivision, or if two ordinates are closer than
    double precision can separate from a double zero.
    """
    if not (10.0 <= t_lo < t_hi <= MAX_HEIGHT):
        raise DomainError(f"need 10 <= t_lo < t_hi <= {MAX_HEIGHT}")
    res = _scan_heights(t_lo, t_hi, threads)
    keep = (res.gammas >= t_lo) & (res.gammas <= t_hi)
    offset = int(np.argmax(keep)) if keep.any() else 0
    return [
        Zero(n=res.anchor + 1 + offset + i, gamma=float(g))
        for i, g in enumerate(res.gammas[keep])
    ]


def _scan_heights(t_lo, t_hi, threads):
    n_lo = gram_index_below(t_lo)
    n_hi = gram_index_below(t_hi) + 1
    res = scan_gram_range(n_lo, n_hi, threads)
    if res.unresolved:
        raise UnresolvedBlockError(
            f"{len(res.unresolved)} Gram block(s) left unresolved", res.unresolved)
    close = _close_pairs(res.gammas)
    if close:
        pairs = [(float(res.gammas[i]), float(res.gammas[i + 1])) for i in close]
        raise UnresolvedBlockError("sign changes too close to separate", pairs)
    return res


def compute_table(first_index: int = 1, count: int = 100, threads: int = 1,
                  certify: bool = True) -> ZeroTable:
    """Compute gamma_first .. gamma_{first+count-1} and certify the table."""
    if first_index < 1 or count < 1:
        raise DomainError("need first_index >= 1 and count >= 1")
    margin = 40
    n_lo = max(first_index - margin, 0)
    n_hi = first_index + count + margin
    t_lo = max(float(gram_heights(n_lo, 1)[0]), 10.0)
    t_hi = float(gram_heights(n_hi, 1)[0])
    res = _scan_heights(t_lo, t_hi, threads)
    first_found = res.anchor + 1
    a = first_index - first_found
    b = a + count
    if a < 0 or b > len(res.gammas):
        raise CoverageError("scan did not reach the requested indices")
    gammas = res.gammas[a:b]
    table = ZeroTable(first_index, gammas, np.ones(count, dtype=np.int64),
                      source="computed", precision=COMPUTED_PRECISION)
    if certify:
        certify_table(table)
    return table


# ---------------------------------------------------------- certification


def _regular_interval(t, n):
    return count_sign_changes(t[n - 1], t[n]) == 1


def find_flank(t: float) -> int:
    """Index m of a Gram point t_m <= t at which N(t_m) = m is accepted."""
    m = gram_index_below(t)
    while m >= 0:
        lo = max(m - 2, 0)
        h = gram_heights(lo, m + 2 - lo)
        t_m = h[m - lo]
        if bool(_good(np.array([m]), np.array([z_values(t_m)]))[0]):
            if t_m < SMALL_S_HEIGHT:
                return m
            if all(count_sign_changes(h[k - 1 - lo], h[k - lo]) == 1
                   for k in (m - 1, m, m + 1)):
                return m
        m -= 1
    raise CertificationError(f"no anchoring Gram point found below {t}")


def analytic_count(t: float) -> int:
    """N(t) as round(theta(t)/pi + 1 + S~(t)) with S~ pinned at a flank."""
    m = find_flank(t)
    t_m = float(gram_heights(m, 1)[0])
    changes = 0
    lo = t_m
    k = m + 1
    while True:
        hi = min(float(gram_heights(k, 1)[0]), t)
        if hi > lo:
            changes += count_sign_changes(max(lo, T_MIN), hi)
        if hi >= t:
            break
        lo = hi
        k += 1
    s_tilde = m + changes - theta(t) / math.pi - 1.0
    return int(round(theta(t) / math.pi + 1.0 + s_tilde))


def verify_count(table: ZeroTable, t: float) -> int:
    """Table count of ordinates <= t, certified against the analytic count.

    On disagreement the table is marked uncertified and CertificationError
    is raised.
    """
    if not table.covers(t):
        raise CoverageError(f"height {t} outside the table's covered range")
    if t < T_MIN:
        raise DomainError(f"cannot certify counts below t = {T_MIN}")
    found = table.count_upto(t)
    expected = analytic_count(t)
    if found != expected:
        table.certified = False
        raise CertificationError(
            f"table counts {found} ordinates <= {t}, analytic count is {expected}")
    return found


def certify_table(table: ZeroTable) -> ZeroTable:
    if len(table) == 0:
        raise CertificationError("cannot certify an empty table")
    table.certified = False
    g = table.gammas
    # midpoints keep the check away from Z ~ 0 at the ordinates themselves
    if len(g) == 1:
        ends = [float(g[0])]
    else:
        ends = [0.5 * (g[0] + g[1]), 0.5 * (g[-2] + g[-1])]
    for t in ends:
        verify_count(table, t)
    table.certified = True
    return table


# -------------------------------------------------------------- file I/O


def ingest_table(path, offset: float = 0.0, first_index: int = 1,
                 precision: float | None = None, certify: bool = True) -> ZeroTable:
    """Read a plain-text list of ordinates, one per line, '#' for comments.

    Each value is shifted by ``offset``.  ``precision`` defaults to half a
    unit in the last decimal place of the least precise line.
    """
    values, lines, decimals = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text) + offset)
            except ValueError:
                raise TableFormatError(f"cannot parse ordinate {text!r}", line=lineno) from None
            lines.append(lineno)
            decimals.append(len(text.split(".", 1)[1]) if "." in text else 0)
    if not values:
        raise TableFormatError(f"{path}: no ordinates found")
    gammas = np.array(values)
    _check_monotone(gammas, lines)
    if precision is None:
        precision = 0.5 * 10.0 ** (-min(decimals))
    table = ZeroTable(first_index, gammas, _kappas_from_ties(gammas),
                      source="ingested", precision=precision)
    if certify:
        certify_table(table)
    return table


def _body_lines(table):
    return "".join(f"{table.first_index + i}\t{g:.17g}\n" for i, g in enumerate(table.gammas))


def save_table(table: ZeroTable, path) -> Path:
    if not table.certified:
        raise CertificationError("only certified tables are written to the cache")
    body = _body_lines(table)
    digest = hashlib.sha256(body.encode("ascii")).hexdigest()
    header = (f"{MAGIC} {FORMAT_VERSION} first={table.first_index} count={len(table)} "
              f"precision={table.precision!r} source={table.source}\n")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(header + body + f"#sha256={digest}\n", encoding="ascii")
    tmp.replace(path)
    return path


def load_table(path) -> ZeroTable:
    text = Path(path).read_text(encoding="ascii")
    lines = text.splitlines(keepends=True)
    if not lines or not lines[0].startswith(MAGIC):
        raise TableFormatError(f"{path}: missing {MAGIC} header", line=1)
    fields = lines[0].split()
    if len(fields) < 2 or fields[1] != FORMAT_VERSION:
        raise VersionError(f"{path}: unsupported version {fields[1:2]}")
    meta = dict(f.split("=", 1) for f in fields[2:] if "=" in f)
    if not lines[-1].startswith("#sha256=") or not lines[-1].endswith("\n"):
        raise ChecksumError(f"{path}: checksum line missing (truncated file?)")
    body = "".join(lines[1:-1])
    if hashlib.sha256(body.encode("ascii")).hexdigest() != lines[-1].strip()[len("#sha256="):]:
        raise ChecksumError(f"{path}: checksum mismatch")
    try:
        first = int(meta["first"])
        count = int(meta["count"])
        precision = float(meta["precision"])
    except (KeyError, ValueError) as exc:
        raise TableFormatError(f"{path}: bad header field ({exc})", line=1) from None
    gammas = np.empty(count)
    for i, line in enumerate(lines[1:-1]):
        idx, g = line.split("\t")
        if int(idx) != first + i:
            raise TableFormatError("indices are not contiguous", line=i + 2)
        gammas[i] = float(g)
    if len(lines) - 2 != count:
        raise TableFormatError(f"{path}: header count {count} != {len(lines) - 2} rows")
    return ZeroTable(first, gammas, _kappas_from_ties(gammas),
                     source=meta.get("source", "computed"), precision=precision,
                     certified=True)
