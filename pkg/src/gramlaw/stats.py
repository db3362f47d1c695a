"""Window statistics over Gram's-law sequences.

A window is the index range (N, N + M].  Counts and integer moments of the
integer-valued sequences are exact (Python integers); real-valued sums use
``math.fsum``, which is correctly rounded and therefore independent of
summation order.

Predicted values are the main terms of the asymptotic moment formulas with
L = ln ln N.  The accompanying error envelopes involve A = e^21 eps^-1.5
and are astronomically large at computable heights; they are reported, never
used as pass/fail thresholds.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CoverageError, DomainError
from .sequences import MIN_WINDOW_START, SeqArrays, log_log
from .special import theta_prime

QUANTITIES = ("delta_lower", "delta_upper", "gap", "s_plus", "s_minus")
CDF_QUANTITIES = ("delta_upper", "delta_lower", "e_norm", "s_plus", "s_minus")
INTEGER_QUANTITIES = ("delta_lower", "delta_upper")


@dataclass(frozen=True)
class Window:
    start: int
    length: int

    def __post_init__(self):
        if self.start < MIN_WINDOW_START:
            raise DomainError(f"window start must be >= {MIN_WINDOW_START}")
        if self.length < 1:
            raise DomainError("window length must be >= 1")

    @property
    def end(self):
        return self.start + self.length

    @classmethod
    def paper_preset(cls, start: int, eps: float = 0.001) -> "Window":
        """Window with M = floor(N^(27/82 + eps))."""
        return cls(start, max(1, math.floor(start ** (27 / 82 + eps))))


@dataclass(frozen=True)
class PaperConstants:
    eps: float = 0.001
    N: int = MIN_WINDOW_START
    A: float = field(init=False)
    B: float = field(init=False)
    C: float = field(init=False)
    L: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.eps <= 0.001:
            raise DomainError("eps must lie in (0, 0.001]")
        A = math.exp(21) * self.eps ** -1.5
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", A * A * math.exp(-8))
        object.__setattr__(self, "C", math.pi * math.e * math.sqrt(2 * math.e / 5) / A)
        object.__setattr__(self, "L", log_log(self.N))


def vk(a: float) -> float:
    """Gaussian absolute-moment constant 2^a Gamma((a+1)/2) / sqrt(pi)."""
    if not a > 0:
        raise DomainError("vk needs a > 0")
    return 2.0**a * math.gamma((a + 1) / 2) / math.sqrt(math.pi)


def phi_gaussian(x: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# ------------------------------------------------------------ window data


@dataclass
class WindowData:
    """Sequence columns restricted to one window, plus its constants."""

    window: Window
    seq: SeqArrays
    constants: PaperConstants

    @property
    def M(self):
        return self.window.length

    @property
    def L(self):
        return self.constants.L

    @property
    def theta_prime_start(self):
        return theta_prime(self.seq.t_start)

    def values(self, quantity: str) -> np.ndarray:
        if quantity == "gap":
            return self.seq.gap
        if quantity in ("delta_lower", "delta_upper", "s_plus", "s_minus", "e_norm"):
            return getattr(self.seq, quantity)
        raise DomainError(f"unknown quantity {quantity!r}")


def window_data(sequences, window: Window, eps: float = 0.001) -> WindowData:
    """Collect the window's columns from a GramLawSequences instance."""
    try:
        seq = sequences.arrays(window.start, window.length)
    except CoverageError:
        raise CoverageError(f"window ({window.start}, {window.end}] is not covered") from None
    return WindowData(window, seq, PaperConstants(eps, window.start))


def from_arrays(seq: SeqArrays, eps: float = 0.001) -> WindowData:
    window = Window(seq.start, seq.length)
    return WindowData(window, seq, PaperConstants(eps, seq.start))


# ----------------------------------------------------------------- counts


def _count(values, a, b):
    if not a < b:
        raise DomainError("need a < b")
    return int(np.count_nonzero((values > a) & (values <= b)))


def count_e(data: WindowData, a: int, b: int) -> int:
    """Number of n in the window with a < Delta_n <= b."""
    return _count(data.seq.delta_lower, a, b)


def count_f(data: WindowData, a: int, b: int) -> int:
    """Number of n in the window with a < Delta(n) <= b."""
    return _count(data.seq.delta_upper, a, b)


@dataclass(frozen=True)
class Lemma2Check:
    a: int
    b: int
    e: int
    f: int
    residual: int
    bound: int

    @property
    def passed(self):
        return abs(self.residual) <= self.bound


def check_lemma2(data: WindowData, a: int, b: int) -> Lemma2Check:
    """Compare e(a, b) with f(-(b+1), -(a+1)); the gap is at most |a|+|b|+2."""
    e = count_e(data, a, b)
    f = count_f(data, -(b + 1), -(a + 1))
    return Lemma2Check(a, b, e, f, e - f, abs(a) + abs(b) + 2)


def lemma2_sweep(data: WindowData, lo: int, hi: int) -> list[Lemma2Check]:
    return [check_lemma2(data, a, b) for a in range(lo, hi + 1) for b in range(a + 1, hi + 1)]


def partition_counts(data: WindowData, l: int) -> dict:
    """Cell counts e(nu-1, nu), e(-(nu+1), -nu) for nu = 1..l and e(-1, 0)."""
    cells = {"(-1,0]": count_e(data, -1, 0)}
    for nu in range(1, l + 1):
        cells[f"({nu - 1},{nu}]"] = count_e(data, nu - 1, nu)
        cells[f"({-(nu + 1)},{-nu}]"] = count_e(data, -(nu + 1), -nu)
    return cells


# ---------------------------------------------------------------- moments


@dataclass(frozen=True)
class MomentReport:
    window: Window
    quantity: str
    exponent: float
    signed: bool
    empirical: float
    predicted: float
    ratio: float | None
    predicted_error_envelope: float
    within_regime: bool

    def to_dict(self):
        out = asdict(self)
        out["window"] = {"start": self.window.start, "length": self.window.length}
        return out


def exact_power_sum(values, exponent: int, signed: bool = True) -> int:
    """Sum of v**exponent (or |v|**exponent) over integer values, exactly."""
    counts = Counter(int(v) for v in values)
    if signed:
        return sum(c * v**exponent for v, c in counts.items())
    return sum(c * abs(v) ** exponent for v, c in counts.items())


def float_power_sum(values, exponent: float, signed: bool = True) -> float:
    v = np.asarray(values, dtype=float)
    terms = v**exponent if signed else np.abs(v) ** exponent
    return math.fsum(terms.tolist())


def _is_integer(x):
    return float(x).is_integer()


def _safe_pow(base, power):
    try:
        return base**power
    except OverflowError:
        return math.inf


def _fractional_constants(quantity, a, A):
    if a <= 1:
        c = {"delta_lower": 91.0, "delta_upper": 90.0, "gap": 97.0,
             "s_plus": math.exp(5) * A**3, "s_minus": math.exp(5) * A**3}[quantity]
        return c, 0.5 * a
    c = {"delta_lower": 2**15.5, "delta_upper": 2**15.4, "gap": 2**15.6,
         "s_plus": 2**15.5, "s_minus": 2**15.5}[quantity]
    return c, 0.5 + ((a - 1) / 2) % 1.0


def _even_envelope(quantity, k, A, L):
    if quantity == "delta_lower":
        return 1.1 * _safe_pow(A, k) / math.sqrt(L)
    if quantity == "delta_upper":
        return _safe_pow(A, k) / math.sqrt(L)
    if quantity == "gap":
        return 0.4 * _safe_pow(4 * A * 3 ** (1 / 6), k) / math.sqrt(L)
    return 19 * A * _safe_pow(4 * A * math.sqrt(3), k) / math.sqrt(L)


def _odd_envelope(quantity, k, B, A, L, M, tp):
    bk = _safe_pow(B * k, k)
    if quantity == "delta_lower":
        return 3.6 / math.sqrt(B) * bk * M * L ** (k - 1)
    if quantity == "delta_upper":
        return 3.5 / math.sqrt(B) * bk * M * L ** (k - 1)
    if quantity == "gap":
        return 3.7 / math.sqrt(B) * (math.pi / tp) ** (2 * k - 1) * bk * M * L ** (k - 1)
    c_k = (math.e * A) ** 3 if k == 1 else 3.7 / math.sqrt(B) * bk
    return c_k * M * L ** (k - 1)


def moment(data: WindowData, quantity: str, exponent: float, signed: bool = True) -> MomentReport:
    """Empirical moment over the window next to its predicted main term.

    ``signed=True`` requires an integer exponent and sums x**p; otherwise
    |x|**a is summed for any a > 0.  Even signed moments coincide with the
    absolute ones.  Odd moments have no main term (predicted 0); their
    envelope is the stated bound on the sum itself.  ``within_regime`` is
    false when the exponent exceeds the range the asymptotics are proved for
    (k <= sqrt(L) for integer forms).
    """
    if quantity not in QUANTITIES:
        raise DomainError(f"quantity must be one of {QUANTITIES}")
    if not exponent > 0:
        raise DomainError("exponent must be positive")
    if signed and not _is_integer(exponent):
        raise DomainError("signed moments need an integer exponent")
    values = data.values(quantity)
    M, L = data.M, data.L
    const = data.constants
    tp = data.theta_prime_start
    scale = 2 * tp if quantity == "gap" else 2 * math.pi

    if quantity in INTEGER_QUANTITIES and _is_integer(exponent):
        empirical = float(exact_power_sum(values, int(exponent), signed))
    else:
        empirical = float_power_sum(values, float(exponent), signed)

    p = float(exponent)
    if signed and int(p) % 2 == 1:
        k = (int(p) + 1) // 2
        predicted = 0.0
        envelope = _odd_envelope(quantity, k, const.B, const.A, L, M, tp)
        in_regime = 1 <= k <= math.sqrt(L)
    elif _is_integer(p) and int(p) % 2 == 0:
        k = int(p) // 2
        predicted = vk(p) / scale**p * M * L**k
        envelope = predicted * _even_envelope(quantity, k, const.A, L)
        in_regime = 1 <= k <= math.sqrt(L)
    else:
        predicted = vk(p) / scale**p * M * L ** (0.5 * p)
        c, gamma = _fractional_constants(quantity, p, const.A)
        ln_l = math.log(L)
        envelope = predicted * c * _safe_pow(const.A / ln_l, gamma) if ln_l > 0 else math.inf
        bound = (math.e * ln_l / (10 * const.A * math.log(ln_l))) if ln_l > 1 else -math.inf
        in_regime = 0 < p <= bound
    ratio = empirical / predicted if predicted != 0 else None
    return MomentReport(data.window, quantity, p, bool(signed), empirical, predicted,
                        ratio, envelope, bool(in_regime))


# -------------------------------------------------------------------- CDF


@dataclass(frozen=True)
class CdfReport:
    """Empirical distribution on a grid against the Gaussian.

    ``grid`` rows are (x, nu(x)/M, Phi(x)); the first and last rows are the
    limits x = -inf and x = +inf.
    """

    window: Window
    quantity: str
    grid: list
    sup_discrepancy: float

    def to_dict(self):
        return {
            "window": {"start": self.window.start, "length": self.window.length},
            "quantity": self.quantity,
            "grid": [list(row) for row in self.grid],
            "sup_discrepancy": self.sup_discrepancy,
        }


def cdf_threshold(data: WindowData, quantity: str, x):
    """Map a Gaussian abscissa x to the threshold on the raw quantity."""
    if quantity == "e_norm":
        return np.asarray(x, dtype=float)
    return np.asarray(x, dtype=float) / math.pi * math.sqrt(data.L / 2)


def cdf_report(data: WindowData, quantity: str, lo: float = -4.0, hi: float = 4.0,
               step: float = 0.1) -> CdfReport:
    if quantity not in CDF_QUANTITIES:
        raise DomainError(f"quantity must be one of {CDF_QUANTITIES}")
    if not (step > 0 and lo < hi):
        raise DomainError("grid needs lo < hi and step > 0")
    count = int(round((hi - lo) / step))
    xs = [round(lo + i * step, 12) + 0.0 for i in range(count + 1)]
    values = np.sort(data.values(quantity))
    thresholds = cdf_threshold(data, quantity, xs)
    nu = np.searchsorted(values, thresholds, side="right")
    M = data.M
    rows = [(-math.inf, 0.0, 0.0)]
    sup = 0.0
    for x, k in zip(xs, nu):
        emp = int(k) / M
        phi = phi_gaussian(x)
        sup = max(sup, abs(emp - phi))
        rows.append((x, emp, phi))
    rows.append((math.inf, len(values) / M, 1.0))
    return CdfReport(data.window, quantity, rows, sup)


# ------------------------------------------------------- extremes, Selberg


@dataclass(frozen=True)
class Extremes:
    window: Window
    max_delta: int
    min_delta: int
    reference: float


def extremes(data: WindowData) -> Extremes:
    """Largest and smallest Delta_n with the growth benchmark (ln N / ln ln N)^(1/3)."""
    d = data.seq.delta_lower
    N = data.window.start
    ref = (math.log(N) / math.log(math.log(N))) ** (1 / 3)
    return Extremes(data.window, int(d.max()), int(d.min()), ref)


@dataclass(frozen=True)
class SelbergReport:
    window: Window
    violations: int
    envelope: float


def selberg_violations(data: WindowData, phi_growth) -> SelbergReport:
    """Count n with NOT( sqrt(lnln n)/Phi(n) < |Delta_n| <= Phi(n) sqrt(lnln n) ).

    The envelope is M (1/Phi(N) + Delta) with Delta = 2.2 e^22.4 eps^-1.5
    (ln L)^-0.5, the distribution-law remainder for Delta_n.
    """
    n = data.seq.n.astype(float)
    phi = np.asarray(phi_growth(n), dtype=float) * np.ones_like(n)
    if not np.all(phi > 0):
        raise DomainError("phi_growth must be positive on the window")
    root = np.sqrt(np.log(np.log(n)))
    d = np.abs(data.seq.delta_lower)
    ok = (root / phi < d) & (d <= phi * root)
    violations = int(np.count_nonzero(~ok))
    c = data.constants
    ln_l = math.log(c.L)
    delta = 2.2 * math.exp(22.4) * c.eps ** -1.5 / math.sqrt(ln_l) if ln_l > 0 else math.inf
    envelope = data.M * (1.0 / float(phi_growth(data.window.start)) + delta)
    return SelbergReport(data.window, violations, envelope)


# -------------------------------------------------------------- multiplicity


@dataclass(frozen=True)
class KappaReport:
    window: Window
    a: float
    n_j: dict
    K0: float
    K1: float
    K1_shifted: float
    lemma11_bound: float


def _distinct_multiplicities(gamma, kappa):
    """Multiplicities of the distinct ordinates, in order of appearance."""
    if len(gamma) == 0:
        return np.empty(0, dtype=np.int64)
    first = np.ones(len(gamma), dtype=bool)
    first[1:] = gamma[1:] != gamma[:-1]
    return kappa[first]


def kappa_stats(data: WindowData, a: float) -> KappaReport:
    """Multiplicity histogram, K0(a), K1(a) and the stated bound on K1(a).

    K0 sums kappa_n^a over all n in the window, K1 over distinct ordinates;
    K0(a) = K1(a + 1) is checked and a ValueError raised if it fails.
    """
    if not a >= 1:
        raise DomainError("kappa_stats needs a >= 1")
    kappa = data.seq.kappa
    distinct = _distinct_multiplicities(data.seq.gamma, kappa)
    n_j = dict(sorted(Counter(int(k) for k in distinct).items()))
    K0 = float_power_sum(kappa, a)
    K1 = float_power_sum(distinct, a)
    K1_shift = float_power_sum(distinct, a + 1)
    if not math.isclose(K0, K1_shift, rel_tol=1e-12):
        raise ValueError(f"K0({a}) = {K0} differs from K1({a + 1}) = {K1_shift}")
    C = data.constants.C
    log_bound = 8.4 + math.lgamma(a + 1) - (a + 1) * math.log(C) + math.log(data.M)
    bound = math.exp(log_bound) if log_bound < 709 else math.inf
    return KappaReport(data.window, float(a), n_j, K0, K1, K1_shift, bound)


def gap_residuals(data: WindowData) -> np.ndarray:
    """eps_n = (gamma_n - t_n) theta'(t_N) / pi - Delta_n over the window."""
    return data.seq.gap * data.theta_prime_start / math.pi - data.seq.delta_lower
