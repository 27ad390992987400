"""ICC link model: edges from standard ICC call sites to target components."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .coalprop import (
    TOP, IntentSenderValue, IntentValue, PendingIntentValue, PropResult, Refs, analyze,
)
from .mir.model import AppModel, ComponentDecl, ComponentKind, Const, IntentFilter, Manifest, StmtKind
from .resolver import pending_values

ICC_CALLS = {
    "startActivity": ComponentKind.ACTIVITY,
    "startActivityForResult": ComponentKind.ACTIVITY,
    "startService": ComponentKind.SERVICE,
    "sendBroadcast": ComponentKind.RECEIVER,
}


class MatchKind(str, Enum):
    EXPLICIT = "Explicit"
    IMPLICIT = "Implicit"


class StatError(ValueError):
    pass


def icc_call_name(qname: str) -> str | None:
    name = qname.rsplit(".", 1)[-1]
    return name if name in ICC_CALLS else None


@dataclass(frozen=True)
class IccLink:
    source_class: str
    source_method: str
    site_id: str
    icc_call: str
    synthetic: bool
    target_type: ComponentKind
    targets: tuple[str, ...]
    match_kind: MatchKind
    dangling: bool = False
    intent: IntentValue = field(default=None, compare=False, hash=False)

    @property
    def source(self) -> tuple[str, str, str]:
        return (self.source_class, self.source_method, self.site_id)

    def key(self) -> tuple:
        return (self.site_id, self.icc_call, self.synthetic, self.target_type.value,
                self.targets, self.match_kind.value, self.dangling)

    def to_json(self) -> dict:
        return {
            "source": {"class": self.source_class, "method": self.source_method, "site": self.site_id},
            "call": self.icc_call,
            "synthetic": self.synthetic,
            "target_type": self.target_type.value,
            "match": self.match_kind.value,
            "targets": list(self.targets),
            "dangling": self.dangling,
        }


def filter_matches(intent: IntentValue, filt: IntentFilter) -> bool:
    if not filt.actions:
        return False
    if not intent.action.top and not any(a in filt.actions for a in intent.action.items if a is not None):
        return False
    cats = intent.categories
    if not cats.top and not any(s <= filt.categories for s in cats.sets):
        return False
    if filt.data_schemes and not intent.scheme.top:
        declared = [s for s in intent.scheme.items if s is not None]
        if declared and not any(s in filt.data_schemes for s in declared) and None not in intent.scheme.items:
            return False
    return True


def _implicit_targets(intent: IntentValue, comps: list[ComponentDecl]) -> list[str]:
    if intent.action.top:
        return [c.class_name for c in comps if c.exported]
    return [c.class_name for c in comps if any(filter_matches(intent, f) for f in c.filters)]


def match_intent(intent: IntentValue, manifest: Manifest, target_type: ComponentKind):
    """Return ``(match_kind, targets, dangling)`` for one intent value.

    A target class made only of concrete names is an explicit match (several
    names give several targets).  Otherwise the intent is matched against
    intent filters, and concrete class names it may also carry are added.
    """
    comps = [c for c in manifest.components if c.kind is target_type]
    declared = {c.class_name for c in comps}
    cls = intent.target_class
    named = sorted(v for v in cls.items if isinstance(v, str))
    if not cls.top and None not in cls.items and named:
        targets = tuple(n for n in named if n in declared)
        return MatchKind.EXPLICIT, targets, len(targets) < len(named)
    found = _implicit_targets(intent, comps)
    for n in named:
        if n in declared and n not in found:
            found.append(n)
    order = {c.class_name: k for k, c in enumerate(comps)}
    return MatchKind.IMPLICIT, tuple(sorted(found, key=order.__getitem__)), False


def _join_all(intents) -> IntentValue | None:
    out = None
    for iv in intents:
        out = iv if out is None else out.join(iv)
    return out


def intents_at(prop: PropResult, stmt) -> list[IntentValue]:
    """Intent values an ICC call may send, one per distinct intent object."""
    state = prop.state_before(stmt.site_id)
    if not stmt.args:
        return [IntentValue.unknown()]
    operand = stmt.args[0]
    value = state.env.get(operand.name, TOP) if not isinstance(operand, Const) else TOP
    if isinstance(value, Refs):
        found = state.intents(value)
        return found or [IntentValue.unknown()]
    if isinstance(value, (PendingIntentValue, IntentSenderValue)):
        wrapped = []
        for pv in pending_values(value) or ():
            wrapped.extend(pv.wrapped_intents)
        if len(stmt.args) > 1 and isinstance(stmt.args[1], Const):
            selector = stmt.args[1].value
            picked = _join_all(iv for iv in wrapped if (iv.origin_site or "") == selector)
            return [picked if picked is not None else IntentValue.unknown()]
        merged: dict = {}
        for iv in wrapped:
            merged[iv.origin_site] = merged[iv.origin_site].join(iv) if iv.origin_site in merged else iv
        return [merged[k] for k in sorted(merged, key=lambda s: s or "")] or [IntentValue.unknown()]
    return [IntentValue.unknown()]


def build_links(model: AppModel, prop: PropResult | None = None) -> list[IccLink]:
    """One link per (standard ICC call site, intent object), in model order.

    A synthetic call always yields exactly one link.
    """
    prop = prop or analyze(model)
    links = []
    for c, m, _, stmt in model.statements():
        if stmt.kind is not StmtKind.API_CALL:
            continue
        call = icc_call_name(stmt.name)
        if call is None:
            continue
        ttype = ICC_CALLS[call]
        intents = intents_at(prop, stmt)
        if stmt.is_synthetic:
            # one synthetic call stands for one resolved pair
            intents = [_join_all(intents)]
        for iv in intents:
            kind, targets, dangling = match_intent(iv, model.manifest, ttype)
            links.append(IccLink(c.name, m.name, stmt.site_id, call, stmt.is_synthetic, ttype,
                                 targets, kind, dangling, iv))
    return links


@dataclass(frozen=True)
class LinkStatRow:
    target_type: str
    before: int
    added: int
    increase: float | str  # percentage, or "+∞" for a zero baseline

    def to_json(self) -> dict:
        return {"target_type": self.target_type, "before": self.before, "added": self.added,
                "after": self.before + self.added, "increase_pct": self.increase}


def _increase(before: int, added: int):
    if before == 0:
        return "+∞" if added else 0.0
    return 100.0 * added / before


def link_stats(before, after) -> list[LinkStatRow]:
    """Per-type link counts and the share added by synthetic calls, plus a total row."""
    base = Counter(l.key() for l in before if not l.synthetic)
    kept = Counter(l.key() for l in after if not l.synthetic)
    missing = base - kept
    if missing:
        raise StatError(f"{sum(missing.values())} original link(s) missing from the instrumented link set")
    rows = []
    total_b = total_a = 0
    for kind in ComponentKind:
        b = sum(1 for l in before if l.target_type is kind and not l.synthetic)
        a = sum(1 for l in after if l.target_type is kind and l.synthetic)
        rows.append(LinkStatRow(kind.value, b, a, _increase(b, a)))
        total_b += b
        total_a += a
    rows.append(LinkStatRow("Total", total_b, total_a, _increase(total_b, total_a)))
    return rows
