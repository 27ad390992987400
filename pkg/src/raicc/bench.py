"""Benchmark scoring: leak detection before and after instrumentation."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .catalog import AiccCatalog
from .config import AnalysisConfig
from .corpus import CorpusError, app_files, app_name, load_app, load_expected
from .pipeline import run_pipeline
from .taint import TaintConfig


def bench_metrics(found: set, expected: set) -> tuple[float, float, float]:
    """Precision, recall and F1 of ``found`` against ``expected``; undefined ratios are 0."""
    tp = len(found & expected)
    fp = len(found - expected)
    fn = len(expected - found)
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def metrics_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    found = {("tp", k) for k in range(tp)} | {("fp", k) for k in range(fp)}
    expected = {("tp", k) for k in range(tp)} | {("fn", k) for k in range(fn)}
    return bench_metrics(found, expected)


@dataclass(frozen=True)
class Score:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def of(cls, found: set, expected: set) -> "Score":
        p, r, f1 = bench_metrics(found, expected)
        return cls(len(found & expected), len(found - expected), len(expected - found), p, r, f1)

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class AppOutcome:
    app: str
    expected_leak: bool
    min_components: int
    aicc_sites: int
    synthetic_links: int
    leaks_before: int
    leaks_after: int
    path_components: int  # components on the longest reported leak path after instrumentation

    def verdict(self, found: bool) -> str:
        if found:
            return "TP" if self.expected_leak else "FP"
        return "FN" if self.expected_leak else "TN"

    def to_json(self) -> dict:
        return {
            "app": self.app, "expected_leak": self.expected_leak, "min_components": self.min_components,
            "aicc_sites": self.aicc_sites, "synthetic_links": self.synthetic_links,
            "leaks_before": self.leaks_before, "leaks_after": self.leaks_after,
            "path_components": self.path_components,
            "before": self.verdict(self.leaks_before > 0), "after": self.verdict(self.leaks_after > 0),
        }


@dataclass
class BenchResult:
    apps: list[AppOutcome]
    before: Score
    after: Score

    def to_json(self) -> dict:
        return {"before": self.before.to_json(), "after": self.after.to_json(),
                "apps": [a.to_json() for a in self.apps]}


def run_bench(corpus_dir, expected_file, catalog: AiccCatalog | None = None,
              config: AnalysisConfig | None = None, taint_config: TaintConfig | None = None) -> BenchResult:
    table = load_expected(expected_file)
    files = app_files(Path(corpus_dir))
    names = [app_name(p) for p in files]
    missing = sorted(set(table) - set(names))
    if missing:
        raise CorpusError(f"no corpus file for expected app(s): {', '.join(missing)}")
    outcomes = []
    for path, name in zip(files, names):
        if name not in table:
            raise CorpusError(f"{name} has no expected-results entry")
        res = run_pipeline(load_app(path), catalog, config, taint_config)
        longest = max((len(l.path) for l in res.leaks_after), default=0)
        outcomes.append(AppOutcome(
            name, table[name]["leak"], int(table[name].get("min_components", 1)), len(res.sites),
            sum(1 for l in res.links_after if l.synthetic), len(res.leaks_before), len(res.leaks_after), longest,
        ))
    expected = {o.app for o in outcomes if o.expected_leak}
    before = Score.of({o.app for o in outcomes if o.leaks_before}, expected)
    after = Score.of({o.app for o in outcomes if o.leaks_after}, expected)
    return BenchResult(outcomes, before, after)
