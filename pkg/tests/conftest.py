import os
import time
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def read_fixture(name):
    rows = []
    for line in (FIXTURES / name).read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        key, value = line.split("\t")
        rows.append((float(key), float(value)))
    return rows


@pytest.fixture(scope="session")
def cache_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("gramlaw-cache")
    old = os.environ.get("GRAMLAW_CACHE_DIR")
    os.environ["GRAMLAW_CACHE_DIR"] = str(root)
    yield root
    if old is None:
        os.environ.pop("GRAMLAW_CACHE_DIR", None)
    else:
        os.environ["GRAMLAW_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def small_table():
    """Certified zeros 1..10100 (enough to derive every quantity for n <= 10^4)."""
    from gramlaw.zeros import compute_table

    return compute_table(1, 10100)


@pytest.fixture(scope="session")
def small_seq(small_table):
    from gramlaw.sequences import GramLawSequences

    return GramLawSequences(small_table)


@pytest.fixture(scope="session")
def big_run(cache_root):
    """First 100100 zeros computed through the on-disk cache, with wall time."""
    from gramlaw import pipeline

    start = time.perf_counter()
    table = pipeline.cached_table(1, 100100)
    return table, time.perf_counter() - start


@pytest.fixture(scope="session")
def big_seq(big_run):
    from gramlaw.sequences import GramLawSequences

    return GramLawSequences(big_run[0])
