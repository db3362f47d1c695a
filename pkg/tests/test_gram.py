import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import read_fixture
from gramlaw.errors import DomainError
from gramlaw.gram import (GramTable, from_classical, gram_heights, gram_index_below,
                          gram_interval, gram_point, gram_range, to_classical)
from gramlaw.special import theta


@pytest.mark.parametrize("n,t", read_fixture("gram.tsv"))
def test_gram_points_match_oracle(n, t):
    assert abs(gram_point(int(n)).t - t) < 1e-8 * max(1.0, t / 1e4)


def test_first_gram_points():
    assert abs(gram_point(0).t - 9.6669080561) < 1e-8
    assert abs(gram_point(1).t - 17.8455995405) < 1e-8
    assert abs(gram_point(2).t - 23.1702827012) < 1e-8


def test_gram_interval_and_first_zero():
    g = gram_interval(1)
    assert g.lo == gram_point(0).t and g.hi == gram_point(1).t
    assert 14.1347251417 in g
    assert g.hi in g and g.lo not in g
    with pytest.raises(DomainError):
        gram_interval(0)


def test_interval_width_near_ten_thousand():
    w = gram_interval(10_000).width
    assert 0.5 * 2 * math.pi / math.log(1e4) <= w <= 2 * 2 * math.pi / math.log(1e4)


def test_gram_range_consistency():
    pts = gram_range(0, 3)
    assert [p.t for p in pts] == [gram_point(k).t for k in range(3)]
    assert gram_range(500, 1) == [gram_point(500)]


def test_spacing_follows_theta_prime():
    pts = gram_range(100_000, 10)
    d = np.diff([p.t for p in pts])
    t = np.array([p.t for p in pts[:-1]])
    # consecutive Gram points are pi / theta' apart to first order
    ratio = d * np.log(t / (2 * math.pi)) / (2 * math.pi)
    assert np.all(np.abs(ratio - 1) < 1e-3)
    # and within a factor two of 2 pi / ln n
    assert np.all((d > math.pi / math.log(1e5)) & (d < 4 * math.pi / math.log(1e5)))


def test_residual_and_monotonicity_bulk():
    n = np.arange(0, 120_000)
    t = gram_heights(0, len(n))
    assert np.all(np.abs(theta(t) - math.pi * (n - 1)) < 1e-9)
    assert np.all(np.diff(t) > 0)


def test_split_calls_agree():
    whole = gram_heights(40_000, 1000)
    parts = np.concatenate([gram_heights(40_000 + i, 100) for i in range(0, 1000, 100)])
    assert np.array_equal(whole, parts)


def test_classical_conversion():
    assert to_classical(from_classical(7)) == 7
    assert gram_point(from_classical(0)).t == gram_point(1).t
    assert abs(theta(gram_point(from_classical(5)).t) - 5 * math.pi) < 1e-9


def test_negative_index_rejected():
    with pytest.raises(DomainError):
        gram_point(-1)
    with pytest.raises(DomainError):
        gram_heights(0, 0)


def test_gram_table():
    table = GramTable(10)
    assert table[500] == gram_point(500).t
    h = table.heights(3, 6)
    assert len(h) == 4 and h[0] == gram_point(3).t
    m = table.index_of(np.array([14.1347251417, gram_point(4).t]))
    assert m.tolist() == [1, 4]


@settings(max_examples=100, deadline=None)
@given(st.floats(10.0, 60_000.0))
def test_index_below(t):
    n = gram_index_below(t)
    assert gram_point(n).t <= t < gram_point(n + 1).t
