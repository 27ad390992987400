"""Corpus-wide AICC usage counts, with and without library code."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from . import data_text
from .catalog import AiccCatalog
from .mir.model import AppModel, StmtKind


def default_library_prefixes() -> tuple[str, ...]:
    lines = (l.strip() for l in data_text("library_prefixes.txt").splitlines())
    return tuple(l for l in lines if l and not l.startswith("#"))


def is_library(class_name: str, prefixes) -> bool:
    return any(class_name.startswith(p) for p in prefixes)


@dataclass
class AppUsage:
    app: str
    all_code: Counter = field(default_factory=Counter)
    developer: Counter = field(default_factory=Counter)


def count_usage(app: str, model: AppModel, catalog: AiccCatalog, exclude_prefixes=()) -> AppUsage:
    usage = AppUsage(app)
    for c, _, _, stmt in model.statements():
        if stmt.kind is not StmtKind.API_CALL or stmt.is_synthetic:
            continue
        entry = catalog.match_call(stmt.name, len(stmt.args))
        if entry is None:
            continue
        usage.all_code[entry.signature] += 1
        if not is_library(c.name, exclude_prefixes):
            usage.developer[entry.signature] += 1
    return usage


@dataclass(frozen=True)
class UsageSummary:
    aicc_methods: int
    apps_using: int
    apps_total: int

    @property
    def apps_pct(self) -> float:
        return 100.0 * self.apps_using / self.apps_total if self.apps_total else 0.0

    @property
    def ratio(self) -> float:
        """Calls per app, over apps with at least one call."""
        return self.aicc_methods / self.apps_using if self.apps_using else 0.0

    def to_json(self) -> dict:
        return {"aicc_calls": self.aicc_methods, "apps": self.apps_using, "apps_total": self.apps_total,
                "apps_pct": self.apps_pct, "ratio_per_app": self.ratio}


@dataclass(frozen=True)
class MethodRow:
    signature: str
    count: int
    share_pct: float
    apps: int

    def to_json(self) -> dict:
        return {"signature": self.signature, "count": self.count, "share_pct": self.share_pct, "apps": self.apps}


@dataclass
class CorpusStats:
    apps: list[AppUsage]
    without_libs: UsageSummary
    with_libs: UsageSummary
    methods: list[MethodRow]

    def to_json(self) -> dict:
        return {
            "summary": {"without_libs": self.without_libs.to_json(), "with_libs": self.with_libs.to_json()},
            "methods": [r.to_json() for r in self.methods],
            "apps": [{"app": u.app, "developer": sum(u.developer.values()), "all": sum(u.all_code.values())}
                     for u in self.apps],
        }


def _summary(counters: list[Counter]) -> UsageSummary:
    return UsageSummary(sum(sum(c.values()) for c in counters), sum(1 for c in counters if c), len(counters))


def summarize(usages: list[AppUsage]) -> CorpusStats:
    """Aggregate per-app usage; method rows count developer code only."""
    usages = sorted(usages, key=lambda u: u.app)
    total = Counter()
    apps = Counter()
    for u in usages:
        total.update(u.developer)
        apps.update(set(u.developer))
    n = sum(total.values())
    rows = [MethodRow(sig, k, 100.0 * k / n, apps[sig]) for sig, k in sorted(total.items(), key=lambda kv: (-kv[1], kv[0]))]
    return CorpusStats(usages, _summary([u.developer for u in usages]), _summary([u.all_code for u in usages]), rows)
