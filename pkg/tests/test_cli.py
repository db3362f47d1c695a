import json

import numpy as np
import pytest

from conftest import read_fixture
from gramlaw import pipeline, stats
from gramlaw.cli import main
from gramlaw.sequences import GramLawSequences, records_to_csv
from gramlaw.serialize import dumps
from gramlaw.zeros import load_table, save_table


@pytest.fixture(autouse=True)
def _isolated_cache(cache_root):
    yield cache_root


@pytest.fixture(scope="module")
def table100(tmp_path_factory, cache_root):
    out = tmp_path_factory.mktemp("cli") / "z100.tsv"
    assert main(["zeros", "--upto-index", "100", "--out", str(out)]) == 0
    return out


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gram_command(capsys):
    code, out, _ = run(capsys, ["gram", "0", "--count", "3"])
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    expected = [t for _, t in read_fixture("gram.tsv")[:3]]
    assert [int(r[0]) for r in rows] == [0, 1, 2]
    assert np.allclose([float(r[1]) for r in rows], expected, atol=1e-8)
    code, out, _ = run(capsys, ["gram", "0", "--classical"])
    assert out.splitlines()[1].split("\t")[1] == rows[1][1]


def test_zeros_command(table100, capsys):
    table = load_table(table100)
    assert table.certified and len(table) == 100
    assert np.allclose(table.gammas[:3], [14.1347251417, 21.0220396388, 25.0108575801],
                       atol=1e-8)


def test_zeros_ingest_round_trip(tmp_path, table100, capsys):
    src = tmp_path / "plain.txt"
    src.write_text("".join(f"{g:.17g}\n" for g in load_table(table100).gammas))
    out = tmp_path / "ingested.tsv"
    code, text, _ = run(capsys, ["zeros", "--ingest", str(src), "--offset", "0",
                                 "--first-index", "1", "--out", str(out)])
    assert code == 0 and json.loads(text)["certified"] is True
    assert np.array_equal(load_table(out).gammas, load_table(table100).gammas)


def test_zeros_guard(capsys):
    code, _, err = run(capsys, ["zeros", "--upto-index", "200000"])
    assert code == 1 and "range too large" in err


def test_seq_small_window(table100, tmp_path, capsys):
    code, out, _ = run(capsys, ["seq", "--window", "0:3", "--table", str(table100)])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,gamma,t,delta_lower,delta_upper,q,e_norm,s_gram,s_plus,s_minus,kappa"
    assert len(lines) == 4 and lines[1].split(",")[3] == "0"
    expected = records_to_csv(GramLawSequences(load_table(table100)).records(0, 3))
    assert out == expected
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        main(["seq", "--window", "0:3", "--table", str(table100), "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_seq_rejects_empty_window(table100, capsys):
    code, _, err = run(capsys, ["seq", "--window", "5:0", "--table", str(table100)])
    assert code == 1
    code, _, _ = run(capsys, ["seq", "--window", "abc", "--table", str(table100)])
    assert code == 1


def test_uncovered_window_exit_code(table100, capsys):
    code, _, err = run(capsys, ["seq", "--window", "90:50", "--table", str(table100)])
    assert code == 2 and "not covered" in err


def test_stats_count_gap_sweep(capsys):
    code, out, _ = run(capsys, ["stats", "lemma2", "--a", "-5", "--b", "5",
                                "--window", "5000:5000"])
    assert code == 0
    assert out.splitlines()[-1] == "# 55/55 pass"


def test_stats_moments_is_thin_adapter(capsys):
    code, out, _ = run(capsys, ["stats", "moments", "--quantity", "delta_lower",
                                "--even-k", "1", "--window", "5000:1000"])
    assert code == 0
    table = pipeline.table_for_window(5000, 1000)
    data = stats.window_data(GramLawSequences(table), stats.Window(5000, 1000))
    assert out == dumps(stats.moment(data, "delta_lower", 2))
    report = json.loads(out)
    assert report["exponent"] == 2.0 and report["signed"] is True


def test_stats_moments_needs_one_exponent(capsys):
    code, _, _ = run(capsys, ["stats", "moments", "--window", "5000:100"])
    assert code == 1


def test_stats_cdf_endpoints(capsys):
    code, out, _ = run(capsys, ["stats", "cdf", "--quantity", "delta_upper",
                                "--window", "5000:1000"])
    grid = json.loads(out)["grid"]
    assert grid[0][1] == 0.0 and grid[-1][1] == 1.0
    assert grid[0][0] == "-inf" and grid[-1][0] == "inf"


def test_other_stats_commands(capsys):
    for argv in (["counts", "--a", "-1", "--b", "0"], ["extremes"], ["kappa", "--a", "2"],
                 ["selberg", "--phi", "loglog"], ["selberg", "--phi", "const:1e9"]):
        code, out, _ = run(capsys, ["stats", *argv, "--window", "5000:1000"])
        assert code == 0
        json.loads(out)
    code, _, _ = run(capsys, ["stats", "selberg", "--phi", "nope", "--window", "5000:1000"])
    assert code == 1


def test_window_preset(capsys):
    code, out, _ = run(capsys, ["seq", "--window", "5000", "--preset", "paper"])
    assert code == 0
    assert len(out.splitlines()) - 1 == stats.Window.paper_preset(5000).length


def test_plot_data(table100, capsys):
    code, out, _ = run(capsys, ["plot-data", "--from", "10", "--to", "30",
                                "--table", str(table100)])
    assert code == 0
    assert sum(line.endswith(",jump") for line in out.splitlines()) == 6
    code, out2, _ = run(capsys, ["plot-data", "--from", "10", "--to", "30"])
    assert out2 == out


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["gram", "x"]) == 1
    assert main(["gram", "--help"]) == 0


def test_cache_reuse_and_repair(cache_root, tmp_path):
    first = pipeline.cached_table(200, 260, root=tmp_path)
    path = pipeline.cache_path(200, 260, tmp_path)
    assert path.exists()
    assert pipeline.cached_table(210, 250, root=tmp_path) == first.slice_indices(210, 250)
    path.write_text(path.read_text()[:100])
    again = pipeline.cached_table(200, 260, root=tmp_path)
    assert np.array_equal(again.gammas, first.gammas)
