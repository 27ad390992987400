"""Insert standard ICC calls after every AICC site.

Each resolved ``(type, intent)`` pair becomes one synthetic call placed right
after the AICC statement.  The call passes the intent's original local when it
still holds exactly the wrapped value at the site; otherwise it passes the ICC
object itself plus the intent's origin site as a selector, which the linker
uses to pick the wrapped intent.  Unresolved sites get one fallback call per
component type carrying the unknown ICC object.
"""
from __future__ import annotations

from .coalprop import PropResult, Refs
from .coalprop.values import TARGET_TYPES
from .mir.model import AppModel, Const, Local, Statement, StmtKind
from .resolver import AiccSite

SYNTHETIC_TAG = "raicc"
SITE_MARK = ".raicc"
FALLBACK_MARK = ".raicc-fallback"

STANDARD_CALLS = {"a": "startActivity", "s": "startService", "r": "sendBroadcast"}
RESULT_CALL = "startActivityForResult"


class StaleSites(ValueError):
    """Sites do not belong to the model being instrumented."""


def icc_call_for(target_type: str, expects_result: bool) -> str:
    if target_type == "a" and expects_result:
        return RESULT_CALL
    return STANDARD_CALLS[target_type]


def is_instrumented(model: AppModel) -> bool:
    return any(s.synthetic_tag == SYNTHETIC_TAG for _, _, _, s in model.statements())


def is_fallback(stmt: Statement) -> bool:
    return stmt.is_synthetic and FALLBACK_MARK in stmt.site_id


def aicc_site_of(stmt: Statement) -> str | None:
    """The AICC site a synthetic statement was generated for."""
    if stmt.synthetic_tag != SYNTHETIC_TAG or SITE_MARK not in stmt.site_id:
        return None
    return stmt.site_id.rsplit(SITE_MARK, 1)[0]


def strip_synthetic(model: AppModel) -> AppModel:
    for c, m in list(model.methods()):
        if any(s.is_synthetic for s in m.body):
            model = model.replace_method(c.name, m.with_body(s for s in m.body if not s.is_synthetic))
    return model


def _intent_local(site: AiccSite, origin: str | None, prop: PropResult | None, wanted) -> str | None:
    """A local that still refers to exactly the wrapped intent at the site."""
    if prop is None or origin is None:
        return None
    state = prop.state_before(site.site_id)
    if state.heap.get(origin) != wanted:
        return None
    target = Refs(frozenset([origin]))
    creator = None
    for c, m, _, stmt in prop.model.statements():
        if stmt.site_id in site.pending_origins and stmt.kind is StmtKind.PENDING_INTENT_CREATE:
            creator = stmt.args[0].name
            break
    candidates = ([creator] if creator else []) + sorted(state.env)
    for name in candidates:
        if state.env.get(name) == target:
            return name
    return None


def synthetic_statements(site: AiccSite, prop: PropResult | None = None) -> list[Statement]:
    out = []
    if site.unresolved:
        for k, t in enumerate(TARGET_TYPES, 1):
            out.append(Statement(StmtKind.API_CALL, name=icc_call_for(t, site.expects_result),
                                 args=(site.icc_operand,), site_id=f"{site.site_id}{FALLBACK_MARK}{k}",
                                 synthetic_tag=SYNTHETIC_TAG))
        return out
    for k, (t, iv) in enumerate(site.resolved, 1):
        local = _intent_local(site, iv.origin_site, prop, iv)
        if local is not None:
            args = (Local(local),)
        else:
            args = (site.icc_operand, Const(iv.origin_site or ""))
        out.append(Statement(StmtKind.API_CALL, name=icc_call_for(t, site.expects_result), args=args,
                             site_id=f"{site.site_id}{SITE_MARK}{k}", synthetic_tag=SYNTHETIC_TAG))
    return out


def instrument(model: AppModel, sites, prop: PropResult | None = None) -> AppModel:
    """Return a copy of ``model`` with synthetic ICC calls after each site.

    Sites that already have synthetic calls are left alone, so instrumenting
    twice is the same as instrumenting once.
    """
    index = model.site_index()
    done = {aicc_site_of(s) for _, _, _, s in model.statements()} - {None}
    per_method: dict[tuple[str, str], list[AiccSite]] = {}
    for site in sites:
        loc = index.get(site.site_id)
        if loc is None or loc != (site.class_name, site.method_name, site.index):
            raise StaleSites(f"site {site.site_id} not found in model")
        if site.site_id in done:
            continue
        per_method.setdefault((site.class_name, site.method_name), []).append(site)
    for (cls_name, meth_name), todo in per_method.items():
        method = model.cls(cls_name).method(meth_name)
        inserts = {s.index: synthetic_statements(s, prop) for s in todo}
        body = []
        for i, stmt in enumerate(method.body):
            body.append(stmt)
            body.extend(inserts.get(i, ()))
        model = model.replace_method(cls_name, method.with_body(body))
    return model
