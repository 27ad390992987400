"""Flow-sensitive composite constant propagation over MIR methods.

Each method body is solved with a worklist over its CFG.  Intent objects live
in an abstract heap keyed by their creation site; locals hold references into
it, so aliases observe each other's mutations.  ``invoke`` statements are
analyzed in the caller's context up to ``call_depth`` levels deep; deeper or
recursive calls return TOP and havoc any intents they were handed.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace

from ..config import AnalysisConfig
from ..mir.model import AppModel, ClassDef, Const, Local, MethodDef, Statement, StmtKind, successors
from .values import (
    FACTORY_TYPES, TOP, TOP_VSET, IntentSenderValue, IntentValue, PendingIntentValue, Refs, State,
    TaintLabel, VSet, join_values, merge_by_origin,
)


class AnalysisBudgetExceeded(RuntimeError):
    """The fixpoint did not converge within ``max_iterations`` statement visits."""


class UnknownSite(KeyError):
    pass


def signature_matches(qname: str, signatures) -> bool:
    """True when ``qname`` or its bare method name is listed in ``signatures``."""
    return qname in signatures or qname.rsplit(".", 1)[-1] in signatures


@dataclass
class PropResult:
    model: AppModel
    before: dict[str, State] = field(default_factory=dict)
    after: dict[str, State] = field(default_factory=dict)
    locations: dict[str, tuple[str, str, int]] = field(default_factory=dict)
    visits: int = 0

    def statement(self, site: str) -> Statement:
        cls_name, meth_name, idx = self._loc(site)
        return self.model.cls(cls_name).method(meth_name).body[idx]

    def _loc(self, site: str):
        try:
            return self.locations[site]
        except KeyError:
            raise UnknownSite(site) from None

    def state_before(self, site: str) -> State:
        self._loc(site)
        return self.before[site]

    def state_after(self, site: str) -> State:
        self._loc(site)
        return self.after[site]

    def raw_value(self, site: str, local: str, *, when: str = "after"):
        state = self.state_after(site) if when == "after" else self.state_before(site)
        return state.env.get(local, TOP)

    def value_at(self, site: str, local: str, *, when: str = "after"):
        """Abstract value of ``local`` just after (or before) the statement at ``site``.

        Intent locals come back as the joined :class:`IntentValue` of every
        object they may reference; anything that is not an ICC object is TOP.
        """
        state = self.state_after(site) if when == "after" else self.state_before(site)
        value = state.resolve(state.env.get(local, TOP))
        if isinstance(value, (IntentValue, PendingIntentValue, IntentSenderValue)):
            return value
        return TOP


def value_at(result: PropResult, site: str, local: str):
    return result.value_at(site, local)


def analyze(model: AppModel, config: AnalysisConfig | None = None, *, sources=frozenset(),
            incoming: dict[str, IntentValue] | None = None) -> PropResult:
    """Propagate Intent / PendingIntent / IntentSender values through ``model``.

    ``sources`` lists API signatures whose results are tainted; ``incoming``
    maps a component class to the value its ``getIntent()`` returns (TOP
    fields when absent).
    """
    return _Analyzer(model, config or AnalysisConfig(), frozenset(sources), incoming or {}).run()


class _Analyzer:
    def __init__(self, model: AppModel, config: AnalysisConfig, sources, incoming):
        self.model = model
        self.config = config
        self.sources = sources
        self.incoming = incoming
        self.result = PropResult(model)
        self.solved: set[tuple[str, str]] = set()
        self._simple = {}
        for c in model.classes:
            self._simple.setdefault(c.simple_name, []).append(c.name)

    def run(self) -> PropResult:
        invoked = set()
        for c, _, _, stmt in self.model.statements():
            if stmt.kind is StmtKind.LOCAL_CALL:
                target = self.model.resolve_callee(c.name, stmt.name)
                if target is not None:
                    invoked.add((target[0].name, target[1].name))
        order = [(c, m) for c, m in self.model.methods()]
        for c, m in order:
            if (c.name, m.name) not in invoked:
                self._solve_root(c, m)
        for c, m in order:
            if (c.name, m.name) not in self.solved:
                self._solve_root(c, m)
        for c, m, i, stmt in self.model.statements():
            self.result.locations[stmt.site_id] = (c.name, m.name, i)
            self.result.before.setdefault(stmt.site_id, State())
            self.result.after.setdefault(stmt.site_id, State())
        return self.result

    def _solve_root(self, c: ClassDef, m: MethodDef) -> None:
        entry = State({p: TOP for p in m.params})
        self.solve(c, m, entry, 0, ((c.name, m.name),))

    # -- intraprocedural fixpoint --------------------------------------------

    def solve(self, c: ClassDef, m: MethodDef, entry: State, depth: int, stack):
        """Fixpoint of one method body; returns (exit state or None, return value)."""
        self.solved.add((c.name, m.name))
        body = m.body
        n = len(body)
        if n == 0:
            return entry, None
        cap = self.config.widen_cap
        ins: list[State | None] = [None] * n
        outs: list[State | None] = [None] * n
        ins[0] = entry.widen(cap)
        work = [0]
        queued = {0}
        visits = 0
        while work:
            i = heapq.heappop(work)
            queued.discard(i)
            visits += 1
            if visits > self.config.max_iterations:
                raise AnalysisBudgetExceeded(
                    f"{c.name}.{m.name}: no fixpoint after {self.config.max_iterations} iterations"
                )
            out = self.transfer(c, body[i], ins[i], depth, stack).widen(cap)
            outs[i] = out
            for j in successors(m, i):
                new = out if ins[j] is None else ins[j].join(out).widen(cap)
                if ins[j] is None or new != ins[j]:
                    ins[j] = new
                    if j not in queued:
                        queued.add(j)
                        heapq.heappush(work, j)
        self.result.visits += visits

        exit_state = None
        ret = None
        for i, stmt in enumerate(body):
            site = stmt.site_id
            if ins[i] is not None:
                self._record(self.result.before, site, ins[i])
                self._record(self.result.after, site, outs[i])
            if outs[i] is None:
                continue
            if stmt.kind is StmtKind.RETURN:
                exit_state = outs[i] if exit_state is None else exit_state.join(outs[i])
                if stmt.args:
                    ret = join_values(ret, self.eval(stmt.args[0], ins[i]))
            elif i == n - 1 and stmt.kind is not StmtKind.GOTO:
                exit_state = outs[i] if exit_state is None else exit_state.join(outs[i])
        return exit_state, ret

    @staticmethod
    def _record(table: dict, site: str, state: State) -> None:
        table[site] = table[site].join(state) if site in table else state

    # -- transfer functions ---------------------------------------------------

    def eval(self, operand, state: State):
        if isinstance(operand, Const):
            return VSet.of(operand.value)
        return state.env.get(operand.name, TOP)

    def scalar(self, operand, state: State) -> VSet:
        """Value-set view of an operand; non-scalar values become TOP."""
        value = self.eval(operand, state)
        return value if isinstance(value, VSet) else TOP_VSET

    def qualify(self, values: VSet) -> VSet:
        """Map short class names onto the unique model class carrying them."""
        items = set()
        for v in values.items:
            if isinstance(v, str) and self.model.cls(v) is None:
                hits = self._simple.get(v.rsplit(".", 1)[-1], [])
                if len(hits) == 1 and (("." not in v) or hits[0].endswith("." + v)):
                    v = hits[0]
            items.add(v)
        return replace(values, items=frozenset(items))

    def transfer(self, c: ClassDef, stmt: Statement, state: State, depth: int, stack) -> State:
        kind = stmt.kind
        if kind in (StmtKind.IF_GOTO, StmtKind.GOTO, StmtKind.LABEL, StmtKind.RETURN):
            return state
        out = state.copy()
        if kind is StmtKind.CONST_ASSIGN:
            out.env[stmt.dest] = self.eval(stmt.args[0], state)
        elif kind is StmtKind.NEW_INTENT:
            self._allocate(out, stmt.site_id, IntentValue(origin_site=stmt.site_id))
            out.env[stmt.dest] = Refs(frozenset([stmt.site_id]))
        elif kind is StmtKind.GET_INCOMING_INTENT:
            given = self.incoming.get(c.name)
            value = replace(given, origin_site=stmt.site_id) if given is not None \
                else IntentValue.unknown(stmt.site_id)
            self._allocate(out, stmt.site_id, value)
            out.env[stmt.dest] = Refs(frozenset([stmt.site_id]))
        elif kind is StmtKind.INTENT_MUTATE:
            self._mutate(out, stmt, state)
        elif kind is StmtKind.PENDING_INTENT_CREATE:
            target = self.eval(stmt.args[0], state)
            if isinstance(target, Refs) and state.intents(target):
                wrapped = merge_by_origin(state.intents(target))
            else:
                wrapped = frozenset([IntentValue.unknown()])
            out.env[stmt.dest] = PendingIntentValue(
                frozenset([FACTORY_TYPES[stmt.name]]), wrapped, frozenset([stmt.site_id]))
        elif kind is StmtKind.INTENT_SENDER_GET:
            pi = state.env.get(stmt.base, TOP)
            out.env[stmt.dest] = IntentSenderValue(frozenset([pi])) if isinstance(pi, PendingIntentValue) else TOP
        elif kind is StmtKind.GET_EXTRA:
            base = state.env.get(stmt.base, TOP)
            key = stmt.args[0].value
            value = None
            if isinstance(base, Refs):
                for iv in state.intents(base):
                    value = iv.extra(key) if value is None else value.join(iv.extra(key))
            out.env[stmt.dest] = value if value is not None else TOP_VSET
        elif kind is StmtKind.API_CALL:
            if stmt.dest is not None:
                if signature_matches(stmt.name, self.sources):
                    out.env[stmt.dest] = VSet.tainted(TaintLabel(stmt.site_id))
                else:
                    out.env[stmt.dest] = TOP
        elif kind is StmtKind.LOCAL_CALL:
            return self._invoke(c, stmt, state, depth, stack)
        return out

    def _allocate(self, out: State, ref: str, value: IntentValue) -> None:
        if ref in out.heap:
            # a second object from the same site: keep both as a summary
            out.heap[ref] = out.heap[ref].join(value)
            out.summaries = out.summaries | {ref}
        else:
            out.heap[ref] = value

    def _mutate(self, out: State, stmt: Statement, state: State) -> None:
        base = state.env.get(stmt.base, TOP)
        if not isinstance(base, Refs):
            return
        strong = len(base.refs) == 1 and not (base.refs & state.summaries)
        for ref in base.refs:
            old = state.heap.get(ref)
            if old is None:
                continue
            new = self._apply_mutator(old, stmt, state)
            out.heap[ref] = new if strong else old.join(new)

    def _apply_mutator(self, iv: IntentValue, stmt: Statement, state: State) -> IntentValue:
        name = stmt.name
        if name == "putExtra":
            return iv.with_extra(stmt.args[0].value, self._payload(stmt.args[1], state))
        value = self.scalar(stmt.args[0], state)
        if name == "setAction":
            return replace(iv, action=value)
        if name == "setScheme":
            return replace(iv, scheme=value)
        if name == "setClass":
            return replace(iv, target_class=self.qualify(value))
        if name == "addCategory":
            return replace(iv, categories=iv.categories.add(value).widen(self.config.widen_cap))
        raise AssertionError(name)

    def _payload(self, operand, state: State) -> VSet:
        """Value stored by ``putExtra``: scalars as-is, nested ICC objects as TOP."""
        value = self.eval(operand, state)
        if isinstance(value, VSet):
            return value
        if isinstance(value, Refs):
            taints = set()
            for iv in state.intents(value):
                for _, v in iv.extras:
                    taints |= v.taints
            return VSet.unknown(taints)
        return TOP_VSET

    def _invoke(self, c: ClassDef, stmt: Statement, state: State, depth: int, stack) -> State:
        target = self.model.resolve_callee(c.name, stmt.name)
        args = [self.eval(a, state) for a in stmt.args]
        if target is not None:
            tc, tm = target
            key = (tc.name, tm.name)
            if depth < self.config.call_depth and key not in stack:
                entry = State(dict(zip(tm.params, args)), dict(state.heap), state.summaries)
                exit_state, ret = self.solve(tc, tm, entry, depth + 1, stack + (key,))
                out = state.copy()
                if exit_state is not None:
                    out.heap = dict(exit_state.heap)
                    out.summaries = exit_state.summaries
                if stmt.dest is not None:
                    out.env[stmt.dest] = ret if ret is not None else TOP
                return out
        out = state.copy()
        for value in args:
            if isinstance(value, Refs):
                for ref in value.refs:
                    if ref in out.heap:
                        out.heap[ref] = out.heap[ref].join(IntentValue.unknown(ref))
        if stmt.dest is not None:
            out.env[stmt.dest] = TOP
        return out
