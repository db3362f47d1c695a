import bisect
import math

import numpy as np
import pytest

from conftest import read_fixture
from gramlaw.errors import CertificationError, CoverageError, DomainError
from gramlaw.gram import gram_heights, gram_point
from gramlaw.sequences import (CSV_HEADER, GramLawSequences, e_scale, records_from_csv,
                               records_to_csv, s_sawtooth, sawtooth_to_csv)
from gramlaw.special import theta, theta_prime
from gramlaw.zeros import ZeroTable


def test_first_index_examples(small_seq):
    assert small_seq.delta_lower(1) == 0
    assert small_seq.delta_upper(1) == 0
    assert small_seq.s_at_gram(1) == 0
    assert small_seq.gram_law_holds(1)
    assert abs(small_seq.q_fraction(1) - (14.134725 - 17.845600) / (23.170283 - 17.845600)) < 1e-3


def test_s_at_first_zero_matches_oracle(small_seq):
    (_, expected), = read_fixture("s_at_first_zero.tsv")
    assert abs(small_seq.s_at_zero(1, "plus") - expected) < 1e-9
    assert abs(small_seq.s_at_zero(1, "minus") - (expected - 1)) < 1e-9
    with pytest.raises(ValueError):
        small_seq.s_at_zero(1, "both")


def test_first_gram_law_failures(small_seq):
    arr = small_seq.arrays(0, 10_000)
    failures = arr.n[arr.delta_lower != 0]
    assert failures[:5].tolist() == [127, 136, 196, 213, 233]
    # independent check by direct interval membership
    t = gram_heights(0, 130)
    g = small_seq.table.gammas
    first = next(n for n in range(1, 130) if not t[n - 1] < g[n - 1] <= t[n])
    assert first == 127
    assert not small_seq.gram_law_holds(127)


def test_batch_matches_scalar(small_seq):
    arr = small_seq.arrays(4990, 40)
    for i, n in enumerate(arr.n):
        n = int(n)
        assert arr.delta_lower[i] == small_seq.delta_lower(n)
        assert arr.delta_upper[i] == small_seq.delta_upper(n)
        assert arr.q[i] == small_seq.q_fraction(n)
        assert arr.s_plus[i] == small_seq.s_at_zero(n, "plus")
        assert arr.e_norm[i] == small_seq.e_normalized(n, 4990)


def test_brute_force_recount(small_seq):
    arr = small_seq.arrays(5000, 1000)
    t = gram_heights(0, 6100).tolist()
    g = small_seq.table.gammas.tolist()
    for i, n in enumerate(range(5001, 6001)):
        gamma = g[n - 1]
        m = next(k for k in range(n - 20, n + 20) if t[k - 1] < gamma <= t[k])
        assert arr.delta_lower[i] == m - n
        count = sum(1 for x in g if x <= t[n])
        assert arr.delta_upper[i] == count - n


def test_invariants_up_to_ten_thousand(small_seq):
    arr = small_seq.arrays(0, 10_000)
    # key equality: Delta(n) = S(t_n) = N(t_n) - n, S computed from theta
    s_gram = small_seq.table.count_upto(arr.t) - theta(arr.t) / math.pi - 1.0
    assert np.max(np.abs(s_gram - np.rint(s_gram))) < 1e-6
    assert np.array_equal(arr.delta_upper, np.rint(s_gram).astype(np.int64))
    assert np.array_equal(arr.s_gram, arr.delta_upper)
    assert np.array_equal(arr.s_plus - arr.s_minus, arr.kappa)
    assert np.all(np.abs(arr.delta_lower) <= 8.9 * np.log(arr.n))


def test_sequence_bands_above_thousand(small_seq):
    arr = small_seq.arrays(1000, 9000)
    resid = arr.delta_lower - arr.q
    assert resid.min() >= -0.05 and resid.max() <= 1.05
    assert np.all(np.abs(arr.s_plus + arr.delta_lower) <= arr.kappa + 0.05)


def test_e_normalized(small_seq):
    arr = small_seq.arrays(5000, 200)
    factor = arr.e_norm / arr.gap
    assert np.allclose(factor, factor[0], rtol=1e-14)
    expected = theta_prime(gram_point(5000).t) * math.sqrt(2 / math.log(math.log(5000)))
    assert math.isclose(factor[0], expected, rel_tol=1e-14)
    assert e_scale(5000) == e_scale(5000, small_seq.gram)
    with pytest.raises(DomainError):
        small_seq.e_normalized(20, 15)


def test_e_norm_window_mean(big_seq):
    arr = big_seq.arrays(50_000, 50_000)
    mean = float(np.mean(arr.e_norm))
    L = math.log(math.log(50_000))
    # gamma_n sits on average about half a Gram spacing below t_n
    assert abs(mean + 0.5 * math.pi * math.sqrt(2 / L)) < 0.1
    assert abs(mean - (-1.3858711204470575)) < 1e-9


def test_nan_e_norm_below_sixteen(small_seq):
    arr = small_seq.arrays(0, 3)
    assert np.all(np.isnan(arr.e_norm))


def test_coverage_errors(small_seq):
    with pytest.raises(CoverageError):
        small_seq.arrays(10_050, 100)
    with pytest.raises(CoverageError):
        small_seq.delta_lower(20_000)
    with pytest.raises(DomainError):
        small_seq.arrays(5, 0)


def test_requires_certified_table():
    with pytest.raises(CertificationError):
        GramLawSequences(ZeroTable.from_ordinates([14.13, 21.02]))


def test_csv_round_trip(small_seq):
    records = small_seq.records(0, 5)
    text = records_to_csv(records)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    back = records_from_csv(text)
    assert [r.n for r in back] == [1, 2, 3, 4, 5]
    for a, b in zip(records, back):
        assert a.gamma == b.gamma and a.q == b.q and a.s_zero_plus == b.s_zero_plus
        assert a.delta_lower == b.delta_lower and a.kappa == b.kappa


def test_boundary_tie_goes_to_upper_end():
    t = gram_heights(0, 4)
    table = ZeroTable.from_ordinates([t[1], 21.0220396388, 25.0108575801], certified=True)
    seq = GramLawSequences(table)
    assert seq.delta_lower(1) == 0
    assert seq.q_fraction(1) == 0.0


# ------------------------------------------------------------- sawtooth


def test_sawtooth_first_zero_only(small_table):
    pts = s_sawtooth(small_table, 10.0, 18.0)
    jumps = [p for p in pts if p.kind == "jump"]
    assert len(jumps) == 2
    assert jumps[1].s - jumps[0].s == pytest.approx(1.0, abs=1e-12)
    assert jumps[0].t == small_table.gammas[0]


def test_sawtooth_three_jumps_and_slopes(small_table):
    pts = s_sawtooth(small_table, 10.0, 30.0, samples=8)
    jumps = [p for p in pts if p.kind == "jump"]
    assert len(jumps) == 6
    curve = [p for p in pts if p.kind == "curve"]
    for p, q in zip(curve[:-1], curve[1:]):
        if q.t > p.t and not any(p.t < g < q.t for g in small_table.gammas[:3]):
            mid = 0.5 * (p.t + q.t)
            slope = (q.s - p.s) / (q.t - p.t)
            assert slope == pytest.approx(-theta_prime(mid) / math.pi, rel=1e-3)
    text = sawtooth_to_csv(pts)
    assert text.startswith("t,S,kind\n") and text.count("jump") == 6


def test_sawtooth_uncovered(small_table):
    with pytest.raises(CoverageError):
        s_sawtooth(small_table, 10.0, 1e6)
