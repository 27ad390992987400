"""Locate AICC call sites and recover the (target type, intent) pairs they launch."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .catalog import AiccCatalog, AiccCatalogEntry
from .coalprop import TOP, IntentSenderValue, IntentValue, PendingIntentValue, PropResult
from .coalprop.values import TARGET_TYPES
from .mir.model import AppModel, Local, StmtKind


@dataclass(frozen=True)
class AiccSite:
    site_id: str
    class_name: str
    method_name: str
    index: int
    catalog_entry: AiccCatalogEntry
    icc_operand: object  # Local or Const passed as the ICC object
    resolved: tuple[tuple[str, IntentValue], ...] = ()
    unresolved: bool = False
    pending_origins: tuple[str, ...] = ()

    @property
    def signature(self) -> str:
        return self.catalog_entry.signature

    @property
    def expects_result(self) -> bool:
        return self.catalog_entry.expects_result

    def to_json(self) -> dict:
        return {
            "site": self.site_id,
            "class": self.class_name,
            "method": self.method_name,
            "signature": self.signature,
            "arity": self.catalog_entry.arity,
            "icc_object": self.catalog_entry.icc_object_kind.value,
            "expects_result": self.expects_result,
            "unresolved": self.unresolved,
            "resolved": [{"type": t, "intent": iv.to_json()} for t, iv in self.resolved],
        }


def pending_values(value) -> list[PendingIntentValue] | None:
    """PendingIntent values behind an ICC object; None when unknown."""
    if isinstance(value, PendingIntentValue):
        return [value]
    if isinstance(value, IntentSenderValue):
        out = []
        for pv in value.wrapped_pending:
            inner = pending_values(pv)
            if inner is None:
                return None
            out.extend(inner)
        return out or None
    return None


def _intent_order(iv: IntentValue, positions: dict[str, int]):
    return (positions.get(iv.origin_site, len(positions)), iv.origin_site or "")


def resolve_value(value, positions: dict[str, int]) -> tuple[list[tuple[str, IntentValue]], list[str]] | None:
    """Cross product of target types and wrapped intents, or None when TOP."""
    pendings = pending_values(value)
    if pendings is None:
        return None
    types = set()
    intents: dict = {}
    origins = set()
    for pv in pendings:
        types |= pv.target_type
        origins |= pv.origin_sites
        for iv in pv.wrapped_intents:
            intents[iv.origin_site] = intents[iv.origin_site].join(iv) if iv.origin_site in intents else iv
    ordered = sorted(intents.values(), key=lambda iv: _intent_order(iv, positions))
    pairs = [(t, iv) for t in TARGET_TYPES if t in types for iv in ordered]
    return pairs, sorted(origins, key=lambda s: (positions.get(s, len(positions)), s))


def find_aicc_sites(model: AppModel, catalog: AiccCatalog, prop: PropResult) -> list[AiccSite]:
    """One :class:`AiccSite` per non-synthetic catalog-matching call, in model order."""
    positions = {s.site_id: k for k, (_, _, _, s) in enumerate(model.statements())}
    sites = []
    for c, m, i, stmt in model.statements():
        if stmt.kind is not StmtKind.API_CALL or stmt.is_synthetic:
            continue
        entry = catalog.match_call(stmt.name, len(stmt.args))
        if entry is None:
            continue
        operand = stmt.args[entry.call_operand_index()]
        value = TOP
        if isinstance(operand, Local):
            value = prop.value_at(stmt.site_id, operand.name, when="before")
        got = resolve_value(value, positions)
        if got is None or not got[0]:
            sites.append(AiccSite(stmt.site_id, c.name, m.name, i, entry, operand, (), True))
        else:
            pairs, origins = got
            sites.append(AiccSite(stmt.site_id, c.name, m.name, i, entry, operand, tuple(pairs), False, tuple(origins)))
    return sites


@dataclass(frozen=True)
class SiteReportRow:
    signature: str
    count: int
    share: float
    resolved_pct: float
    by_type: dict
    apps: int = 1

    def to_json(self) -> dict:
        return {
            "signature": self.signature,
            "count": self.count,
            "apps": self.apps,
            "share_pct": self.share,
            "resolved_pct": self.resolved_pct,
            "by_type": dict(self.by_type),
        }


def site_report(sites, apps_of: dict[str, set] | None = None) -> list[SiteReportRow]:
    """Per-signature counts sorted by descending count (ties by signature).

    ``apps_of`` optionally maps a signature to the set of apps using it.
    """
    sites = list(sites)
    if not sites:
        return []
    counts = Counter(s.signature for s in sites)
    resolved = Counter(s.signature for s in sites if not s.unresolved)
    types: dict = defaultdict(Counter)
    for s in sites:
        if s.unresolved:
            types[s.signature]["unresolved"] += 1
        for t in sorted({t for t, _ in s.resolved}, key=TARGET_TYPES.index):
            types[s.signature][t] += 1
    total = len(sites)
    rows = []
    for sig, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        by_type = {k: types[sig][k] for k in (*TARGET_TYPES, "unresolved") if types[sig][k]}
        apps = len(apps_of.get(sig, ())) if apps_of else 1
        rows.append(SiteReportRow(sig, n, 100.0 * n / total, 100.0 * resolved[sig] / n, by_type, apps))
    return rows
