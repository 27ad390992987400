"""Lattice elements for Intent / PendingIntent / IntentSender propagation.

Field value-sets are finite sets of constants that may widen to TOP.  Taint
labels ride alongside the constants and are never widened away, so a TOP
value can still be known to carry sensitive data.  ``None`` inside a value-set
stands for "field never set" (or "extra absent").
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Union


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


@dataclass(frozen=True, order=True)
class TaintLabel:
    """Sensitive value created at ``source_site``.

    ``hops`` lists the ICC crossings taken so far as ``(icc_site, component)``
    pairs, where ``component`` is the class the value was delivered to.
    """

    source_site: str
    hops: tuple[tuple[str, str], ...] = ()

    def crossed(self, icc_site: str, component: str) -> "TaintLabel | None":
        hop = (icc_site, component)
        if hop in self.hops:
            return None
        return TaintLabel(self.source_site, self.hops + (hop,))


def _sort_key(v):
    if v is None:
        return (0, "")
    if isinstance(v, int):
        return (1, f"{v:020d}" if v >= 0 else f"-{-v:020d}")
    return (2, v)


@dataclass(frozen=True)
class VSet:
    items: frozenset = frozenset()
    top: bool = False
    taints: frozenset = frozenset()

    def __post_init__(self):
        if self.top and self.items:
            object.__setattr__(self, "items", frozenset())

    @classmethod
    def of(cls, *values) -> "VSet":
        return cls(frozenset(values))

    @classmethod
    def unknown(cls, taints: Iterable[TaintLabel] = ()) -> "VSet":
        return cls(frozenset(), True, frozenset(taints))

    @classmethod
    def tainted(cls, label: TaintLabel) -> "VSet":
        return cls(frozenset(), False, frozenset([label]))

    @property
    def is_tainted(self) -> bool:
        return bool(self.taints)

    def __contains__(self, value) -> bool:
        return self.top or value in self.items

    def sorted_items(self) -> list:
        return sorted(self.items, key=_sort_key)

    def join(self, other: "VSet") -> "VSet":
        if self is other:
            return self
        return VSet(self.items | other.items, self.top or other.top, self.taints | other.taints)

    def widen(self, cap: int) -> "VSet":
        if not self.top and len(self.items) > cap:
            return VSet(frozenset(), True, self.taints)
        return self

    def singleton(self):
        """The only value in the set, or None when not exactly one known value."""
        if self.top or len(self.items) != 1:
            return None
        return next(iter(self.items))

    def map_taints(self, fn) -> "VSet":
        labels = frozenset(t for t in (fn(x) for x in self.taints) if t is not None)
        return replace(self, taints=labels)

    def to_json(self):
        if self.top:
            out = ["TOP"]
        else:
            out = [v for v in self.sorted_items()]
        if self.taints:
            out = out + ["<tainted>"]
        return out


UNSET = VSet.of(None)
TOP_VSET = VSet.unknown()


@dataclass(frozen=True)
class CatSet:
    """Possible category sets of an intent."""

    sets: frozenset = frozenset([frozenset()])
    top: bool = False

    def __post_init__(self):
        if self.top and self.sets:
            object.__setattr__(self, "sets", frozenset())

    @classmethod
    def unknown(cls) -> "CatSet":
        return cls(frozenset(), True)

    def __contains__(self, cats) -> bool:
        return self.top or frozenset(cats) in self.sets

    def add(self, values: VSet) -> "CatSet":
        # only string categories are tracked; anything else is unknown
        names = [v for v in values.items if isinstance(v, str)]
        if self.top or values.top or not names or len(names) < len(values.items):
            return CatSet.unknown()
        return CatSet(frozenset(s | {c} for s in self.sets for c in names))

    def join(self, other: "CatSet") -> "CatSet":
        if self.top or other.top:
            return CatSet.unknown()
        return CatSet(self.sets | other.sets)

    def widen(self, cap: int) -> "CatSet":
        if not self.top and len(self.sets) > cap:
            return CatSet.unknown()
        return self

    def to_json(self):
        if self.top:
            return ["TOP"]
        return sorted(sorted(s) for s in self.sets)


def _join_opt(a: VSet | None, b: VSet | None) -> VSet | None:
    if a is None and b is None:
        return None
    return (a or UNSET).join(b or UNSET)


@dataclass(frozen=True)
class IntentValue:
    action: VSet = UNSET
    categories: CatSet = CatSet()
    target_class: VSet = UNSET
    scheme: VSet = UNSET
    extras: tuple[tuple[str, VSet], ...] = ()
    other_extras: VSet | None = None  # value of every unlisted key; None = absent
    origin_site: str | None = None

    @classmethod
    def unknown(cls, origin: str | None = None, other_extras: VSet = TOP_VSET) -> "IntentValue":
        return cls(TOP_VSET, CatSet.unknown(), TOP_VSET, TOP_VSET, (), other_extras, origin)

    @property
    def extras_map(self) -> dict[str, VSet]:
        return dict(self.extras)

    def extra(self, key: str) -> VSet:
        for k, v in self.extras:
            if k == key:
                return v
        return self.other_extras if self.other_extras is not None else UNSET

    def with_extra(self, key: str, value: VSet) -> "IntentValue":
        ex = dict(self.extras)
        ex[key] = value
        return replace(self, extras=tuple(sorted(ex.items())))

    def is_unknown(self) -> bool:
        return self.action.top and self.target_class.top

    def join(self, other: "IntentValue") -> "IntentValue":
        if self == other:
            return self
        keys = sorted(set(self.extras_map) | set(other.extras_map))
        extras = tuple((k, self.extra(k).join(other.extra(k))) for k in keys)
        origin = self.origin_site if self.origin_site == other.origin_site else None
        return IntentValue(
            self.action.join(other.action),
            self.categories.join(other.categories),
            self.target_class.join(other.target_class),
            self.scheme.join(other.scheme),
            extras,
            _join_opt(self.other_extras, other.other_extras),
            origin,
        )

    def widen(self, cap: int) -> "IntentValue":
        extras = tuple((k, v.widen(cap)) for k, v in self.extras)
        other = self.other_extras.widen(cap) if self.other_extras is not None else None
        new = IntentValue(self.action.widen(cap), self.categories.widen(cap),
                          self.target_class.widen(cap), self.scheme.widen(cap),
                          extras, other, self.origin_site)
        return self if new == self else new

    def map_extra_taints(self, fn) -> "IntentValue":
        extras = tuple((k, v.map_taints(fn)) for k, v in self.extras)
        other = self.other_extras.map_taints(fn) if self.other_extras is not None else None
        return replace(self, extras=extras, other_extras=other)

    def to_json(self) -> dict:
        out = {
            "origin": self.origin_site,
            "action": self.action.to_json(),
            "categories": self.categories.to_json(),
            "target_class": self.target_class.to_json(),
            "scheme": self.scheme.to_json(),
            "extras": {k: v.to_json() for k, v in self.extras},
        }
        if self.other_extras is not None:
            out["other_extras"] = self.other_extras.to_json()
        return out


def merge_by_origin(intents: Iterable[IntentValue]) -> frozenset:
    """Collapse intents sharing an origin site into their join."""
    merged: dict = {}
    for iv in intents:
        key = iv.origin_site
        merged[key] = merged[key].join(iv) if key in merged else iv
    # joining two values from the same origin keeps that origin
    return frozenset(replace(v, origin_site=k) for k, v in merged.items())


TARGET_TYPES = ("a", "s", "r")
FACTORY_TYPES = {
    "getActivity": "a",
    "getService": "s",
    "getForegroundService": "s",
    "getBroadcast": "r",
}


@dataclass(frozen=True)
class PendingIntentValue:
    target_type: frozenset = frozenset()
    wrapped_intents: frozenset = frozenset()
    origin_sites: frozenset = frozenset()

    def join(self, other: "PendingIntentValue") -> "PendingIntentValue":
        if self == other:
            return self
        return PendingIntentValue(
            self.target_type | other.target_type,
            merge_by_origin(list(self.wrapped_intents) + list(other.wrapped_intents)),
            self.origin_sites | other.origin_sites,
        )

    def widen(self, cap: int) -> "PendingIntentValue":
        wrapped = frozenset(iv.widen(cap) for iv in self.wrapped_intents)
        return self if wrapped == self.wrapped_intents else replace(self, wrapped_intents=wrapped)

    def sorted_types(self) -> list[str]:
        return [t for t in TARGET_TYPES if t in self.target_type]

    def to_json(self) -> dict:
        return {
            "kind": "PendingIntent",
            "origins": sorted(self.origin_sites),
            "target_type": self.sorted_types(),
            "wrapped_intents": [iv.to_json() for iv in sorted(self.wrapped_intents, key=lambda v: v.origin_site or "")],
        }


def _merge_pending(values: Iterable[PendingIntentValue]) -> frozenset:
    merged: dict = {}
    for pv in values:
        key = pv.origin_sites
        merged[key] = merged[key].join(pv) if key in merged else pv
    return frozenset(merged.values())


@dataclass(frozen=True)
class IntentSenderValue:
    wrapped_pending: frozenset = frozenset()

    def join(self, other: "IntentSenderValue") -> "IntentSenderValue":
        if self == other:
            return self
        return IntentSenderValue(_merge_pending(list(self.wrapped_pending) + list(other.wrapped_pending)))

    def widen(self, cap: int) -> "IntentSenderValue":
        wrapped = frozenset(p.widen(cap) for p in self.wrapped_pending)
        return self if wrapped == self.wrapped_pending else IntentSenderValue(wrapped)

    def to_json(self) -> dict:
        return {"kind": "IntentSender",
                "wrapped_pending": [p.to_json() for p in sorted(self.wrapped_pending, key=lambda p: sorted(p.origin_sites))]}


@dataclass(frozen=True)
class Refs:
    """Abstract references to heap-allocated intents (keyed by creation site)."""

    refs: frozenset

    def join(self, other: "Refs") -> "Refs":
        return self if self == other else Refs(self.refs | other.refs)


AbstractValue = Union[VSet, Refs, PendingIntentValue, IntentSenderValue, IntentValue, _Top]


def join_values(a, b):
    """Join of two environment values; ``None`` is bottom (unbound)."""
    if a is None:
        return b
    if b is None or a is b:
        return a
    if a is TOP or b is TOP:
        return TOP
    if type(a) is type(b):
        return a.join(b)
    return TOP


def widen_value(v, cap: int):
    if v is TOP or isinstance(v, Refs):
        return v
    return v.widen(cap)


@dataclass
class State:
    """Environment plus intent heap at one program point."""

    env: dict = field(default_factory=dict)
    heap: dict = field(default_factory=dict)
    summaries: frozenset = frozenset()

    def copy(self) -> "State":
        return State(dict(self.env), dict(self.heap), self.summaries)

    def join(self, other: "State") -> "State":
        env = dict(self.env)
        for k, v in other.env.items():
            env[k] = join_values(env.get(k), v)
        heap = dict(self.heap)
        for k, v in other.heap.items():
            heap[k] = heap[k].join(v) if k in heap else v
        return State(env, heap, self.summaries | other.summaries)

    def widen(self, cap: int) -> "State":
        return State(
            {k: widen_value(v, cap) for k, v in self.env.items()},
            {k: v.widen(cap) for k, v in self.heap.items()},
            self.summaries,
        )

    def resolve(self, value):
        """Turn heap references into a single joined :class:`IntentValue`."""
        if isinstance(value, Refs):
            intents = self.intents(value)
            if not intents:
                return TOP
            out = intents[0]
            for iv in intents[1:]:
                out = out.join(iv)
            return out
        return value

    def intents(self, value: Refs) -> list[IntentValue]:
        return [self.heap[r] for r in sorted(value.refs) if r in self.heap]
