"""ICC-aware taint tracking over the link model.

Taint labels are produced by source API calls and ride through intent extras
key by key.  An ICC link delivers the extras of the intent it carries to every
``getIntent()`` of the target components; the propagation is re-run until the
set of delivered labels stops growing.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from . import data_text
from .coalprop import (
    AnalysisBudgetExceeded, IntentSenderValue, IntentValue, PendingIntentValue, PropResult, Refs, TaintLabel, VSet, analyze,
    signature_matches,
)
from .config import AnalysisConfig
from .linker import IccLink, intents_at
from .mir.model import AppModel, Local, StmtKind
from .resolver import pending_values


MAX_ROUNDS = 100


class TaintConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TaintConfig:
    sources: frozenset
    sinks: tuple[tuple[str, int | None], ...]  # (signature, operand index or None for any)

    def __post_init__(self):
        both = self.sources & {s for s, _ in self.sinks}
        if both:
            raise TaintConfigError(f"signatures cannot be both source and sink: {', '.join(sorted(both))}")

    def sink_operands(self, qname: str, n_operands: int) -> list[int]:
        idx: set[int] = set()
        for sig, arg in self.sinks:
            if signature_matches(qname, {sig}):
                idx |= set(range(n_operands)) if arg is None else ({arg} if arg < n_operands else set())
        return sorted(idx)


def parse_taint_config(text: str) -> TaintConfig:
    sources, sinks = set(), []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("source", "sink"):
            raise TaintConfigError(f"line {lineno}: expected 'source SIG' or 'sink SIG[:ARG]'")
        kind, sig = parts
        if kind == "source":
            sources.add(sig)
            continue
        arg = None
        if ":" in sig:
            sig, _, num = sig.rpartition(":")
            if not num.isdigit():
                raise TaintConfigError(f"line {lineno}: bad sink operand index {num!r}")
            arg = int(num)
        sinks.append((sig, arg))
    return TaintConfig(frozenset(sources), tuple(sorted(set(sinks), key=lambda s: (s[0], -1 if s[1] is None else s[1]))))


def default_taint_config() -> TaintConfig:
    return parse_taint_config(data_text("default_taint.txt"))


def load_taint_config(path) -> TaintConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_taint_config(fh.read())


@dataclass(frozen=True)
class LeakReport:
    source_site: str
    sink_site: str
    path: tuple[tuple[str, str], ...]  # (component, site that entered it); first entry is the source
    crosses_icc: bool
    via_synthetic: bool

    def to_json(self) -> dict:
        return {
            "source_site": self.source_site,
            "sink_site": self.sink_site,
            "path": [{"component": c, "site": s} for c, s in self.path],
            "crosses_icc": self.crosses_icc,
            "via_synthetic": self.via_synthetic,
        }


def value_taints(value, state) -> frozenset:
    """Every taint label reachable from an environment value."""
    if isinstance(value, VSet):
        return value.taints
    if isinstance(value, Refs):
        return frozenset().union(*(_intent_taints(iv) for iv in state.intents(value)))
    if isinstance(value, (PendingIntentValue, IntentSenderValue)):
        out = frozenset()
        for pv in pending_values(value) or ():
            for iv in pv.wrapped_intents:
                out |= _intent_taints(iv)
        return out
    return frozenset()


def _intent_taints(iv: IntentValue) -> frozenset:
    out = frozenset()
    for _, v in iv.extras:
        out |= v.taints
    if iv.other_extras is not None:
        out |= iv.other_extras.taints
    return out


def _delivered(iv: IntentValue, site: str, component: str) -> IntentValue:
    """Extras of ``iv`` as seen by ``component``: unknown values, relabelled taints."""
    relabel = lambda t: t.crossed(site, component)  # noqa: E731
    extras = tuple((k, VSet.unknown(v.taints).map_taints(relabel)) for k, v in iv.extras)
    other = iv.other_extras
    other = VSet.unknown(other.taints if other is not None else ()).map_taints(relabel)
    return replace(IntentValue.unknown(), extras=extras, other_extras=other)


def _incoming(model: AppModel, prop: PropResult, links) -> dict[str, IntentValue]:
    by_site: dict[str, list[IccLink]] = {}
    for link in links:
        by_site.setdefault(link.site_id, []).append(link)
    incoming: dict[str, IntentValue] = {}
    for site, group in by_site.items():
        stmt = prop.statement(site)
        intents = intents_at(prop, stmt)
        if len(intents) == len(group):
            pairs = list(zip(group, intents))
        else:
            pairs = [(l, iv) for l in group for iv in intents]
        for link, iv in pairs:
            if not _intent_taints(iv):
                continue
            for target in link.targets:
                value = _delivered(iv, site, target)
                incoming[target] = incoming[target].join(value) if target in incoming else value
    return incoming


def propagate(model: AppModel, links, config: TaintConfig, analysis: AnalysisConfig | None = None) -> PropResult:
    """Taint-mode propagation iterated to a fixpoint over ``links``."""
    incoming: dict[str, IntentValue] = {}
    for _ in range(MAX_ROUNDS):
        prop = analyze(model, analysis, sources=config.sources, incoming=incoming)
        new = _incoming(model, prop, links)
        if new == incoming:
            return prop
        incoming = new
    raise AnalysisBudgetExceeded(f"taint delivery did not stabilise after {MAX_ROUNDS} rounds")


def run_taint(model: AppModel, links, config: TaintConfig | None = None,
              analysis: AnalysisConfig | None = None) -> list[LeakReport]:
    """One leak per (source site, sink site) pair, with its shortest ICC path."""
    config = config or default_taint_config()
    prop = propagate(model, links, config, analysis)
    locate = prop.locations
    synthetic = {s.site_id for _, _, _, s in model.statements() if s.is_synthetic}
    best: dict[tuple[str, str], TaintLabel] = {}
    for c, _, _, stmt in model.statements():
        if stmt.kind is not StmtKind.API_CALL:
            continue
        slots = config.sink_operands(stmt.name, len(stmt.args))
        if not slots:
            continue
        state = prop.state_before(stmt.site_id)
        labels = set()
        for k in slots:
            arg = stmt.args[k]
            if isinstance(arg, Local):
                labels |= value_taints(state.env.get(arg.name), state)
        for label in labels:
            key = (label.source_site, stmt.site_id)
            old = best.get(key)
            if old is None or (len(label.hops), label.hops) < (len(old.hops), old.hops):
                best[key] = label
    leaks = []
    for (source, sink), label in sorted(best.items()):
        path = ((locate[source][0], source),) + tuple((comp, site) for site, comp in label.hops)
        leaks.append(LeakReport(source, sink, path, len(path) > 1,
                                any(site in synthetic for site, _ in label.hops)))
    return leaks
