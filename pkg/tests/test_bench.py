from __future__ import annotations

import json

import pytest

from raicc.bench import AppOutcome, Score, bench_metrics, metrics_from_counts, run_bench
from raicc.corpus import CorpusError, benchmark_dir, expected_path


@pytest.mark.parametrize("counts, expected", [
    ((16, 2, 0), (0.8889, 1.0, 0.9412)),
    ((0, 0, 16), (0.0, 0.0, 0.0)),
    ((15, 3, 1), (0.8333, 0.9375, 0.8824)),
    ((16, 1, 0), (0.9412, 1.0, 0.9697)),
])
def test_metrics(counts, expected):
    assert tuple(round(x, 4) for x in metrics_from_counts(*counts)) == expected


def test_metrics_on_sets():
    assert bench_metrics(set(), set()) == (0.0, 0.0, 0.0)
    s = Score.of({"a", "b"}, {"b", "c"})
    assert (s.tp, s.fp, s.fn, s.precision, s.recall, s.f1) == (1, 1, 1, 0.5, 0.5, 0.5)


def test_verdicts():
    o = AppOutcome("x", True, 2, 1, 1, 0, 1, 2)
    assert (o.verdict(False), o.verdict(True)) == ("FN", "TP")
    n = AppOutcome("y", False, 2, 1, 1, 0, 0, 0)
    assert (n.verdict(False), n.verdict(True)) == ("TN", "FP")


def test_shipped_corpus_paths_agree(catalog):
    result = run_bench(benchmark_dir(), expected_path(), catalog)
    for app in result.apps:
        assert app.aicc_sites >= 1 and app.synthetic_links >= 1
        if app.expected_leak:
            assert app.path_components >= app.min_components


def test_missing_corpus_file(tmp_path, catalog):
    table = json.loads(expected_path().read_text())
    table["notThere"] = {"leak": True}
    bad = tmp_path / "expected.json"
    bad.write_text(json.dumps(table))
    with pytest.raises(CorpusError, match="notThere"):
        run_bench(benchmark_dir(), bad, catalog)


def test_missing_expected_entry(tmp_path, catalog):
    table = json.loads(expected_path().read_text())
    del table["send"]
    bad = tmp_path / "expected.json"
    bad.write_text(json.dumps(table))
    with pytest.raises(CorpusError, match="send has no"):
        run_bench(benchmark_dir(), bad, catalog)
