"""Immutable data model for MIR app models.

Everything here is a frozen dataclass holding tuples/frozensets, so models can
be shared freely and compared structurally with ``==``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Union


class ComponentKind(str, Enum):
    ACTIVITY = "Activity"
    SERVICE = "Service"
    RECEIVER = "BroadcastReceiver"

    @property
    def keyword(self) -> str:
        return _KIND_KEYWORDS[self]

    @classmethod
    def from_keyword(cls, word: str) -> "ComponentKind":
        for kind, kw in _KIND_KEYWORDS.items():
            if kw == word:
                return kind
        raise KeyError(word)


_KIND_KEYWORDS = {
    ComponentKind.ACTIVITY: "activity",
    ComponentKind.SERVICE: "service",
    ComponentKind.RECEIVER: "receiver",
}

CLASS_BASES = ("Activity", "Service", "BroadcastReceiver", "Plain")


class StmtKind(str, Enum):
    CONST_ASSIGN = "ConstAssign"
    NEW_INTENT = "NewIntent"
    INTENT_MUTATE = "IntentMutate"
    PENDING_INTENT_CREATE = "PendingIntentCreate"
    INTENT_SENDER_GET = "IntentSenderGet"
    API_CALL = "ApiCall"
    LOCAL_CALL = "LocalCall"
    GET_INCOMING_INTENT = "GetIncomingIntent"
    GET_EXTRA = "GetExtra"
    IF_GOTO = "IfGoto"
    GOTO = "Goto"
    LABEL = "Label"
    RETURN = "Return"


MUTATORS = ("setAction", "addCategory", "setClass", "setScheme", "putExtra")
PENDING_FACTORIES = ("getActivity", "getService", "getForegroundService", "getBroadcast")


@dataclass(frozen=True)
class Local:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Union[str, int]


Operand = Union[Local, Const]


@dataclass(frozen=True)
class Statement:
    """One three-address statement.

    Field use per kind:

    ========================  ======  ======  ===================  ==================
    kind                      dest    base    name                 args
    ========================  ======  ======  ===================  ==================
    ConstAssign               x       -       -                    (value,)
    NewIntent                 x       -       -                    ()
    IntentMutate              -       intent  mutator              (val,) / (key, val)
    PendingIntentCreate       x       -       factory              (intent, flags)
    IntentSenderGet           x       pi      -                    ()
    ApiCall                   x?      -       qualified API        args
    LocalCall                 x?      -       callee (maybe qual)  args
    GetIncomingIntent         x       -       -                    ()
    GetExtra                  x       intent  -                    (key,)
    IfGoto                    -       cond    label                ()
    Goto / Label              -       -       label                ()
    Return                    -       -       -                    () / (val,)
    ========================  ======  ======  ===================  ==================

    ``ConstAssign`` also admits a local operand, which makes the target an
    alias of the source local.
    """

    kind: StmtKind
    dest: str | None = None
    base: str | None = None
    name: str | None = None
    args: tuple[Operand, ...] = ()
    site_id: str = ""
    synthetic_tag: str | None = None

    @property
    def is_synthetic(self) -> bool:
        return bool(self.synthetic_tag)

    def uses(self) -> Iterator[str]:
        """Locals read by this statement."""
        if self.base is not None:
            yield self.base
        for arg in self.args:
            if isinstance(arg, Local):
                yield arg.name

    def jump_target(self) -> str | None:
        if self.kind in (StmtKind.IF_GOTO, StmtKind.GOTO):
            return self.name
        return None


@dataclass(frozen=True)
class IntentFilter:
    actions: frozenset[str] = frozenset()
    categories: frozenset[str] = frozenset()
    data_schemes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ComponentDecl:
    kind: ComponentKind
    class_name: str
    exported: bool = False
    filters: tuple[IntentFilter, ...] = ()


@dataclass(frozen=True)
class Manifest:
    components: tuple[ComponentDecl, ...] = ()

    def component(self, class_name: str) -> ComponentDecl | None:
        for comp in self.components:
            if comp.class_name == class_name:
                return comp
        return None


@dataclass(frozen=True)
class MethodDef:
    name: str
    params: tuple[str, ...] = ()
    body: tuple[Statement, ...] = ()
    labels: dict[str, int] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        # labels is always derived from body so that equality on body suffices.
        object.__setattr__(self, "labels", label_index(self.body))

    def with_body(self, body) -> "MethodDef":
        return replace(self, body=tuple(body))


@dataclass(frozen=True)
class ClassDef:
    name: str
    extends: str = "Plain"
    methods: tuple[MethodDef, ...] = ()

    def method(self, name: str) -> MethodDef | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None

    @property
    def simple_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class AppModel:
    package_name: str
    manifest: Manifest = Manifest()
    classes: tuple[ClassDef, ...] = ()

    def cls(self, name: str) -> ClassDef | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def methods(self) -> Iterator[tuple[ClassDef, MethodDef]]:
        for c in self.classes:
            for m in c.methods:
                yield c, m

    def statements(self) -> Iterator[tuple[ClassDef, MethodDef, int, Statement]]:
        """All statements in model order."""
        for c, m in self.methods():
            for i, stmt in enumerate(m.body):
                yield c, m, i, stmt

    def site_index(self) -> dict[str, tuple[str, str, int]]:
        """site_id -> (class, method, statement index)."""
        return {s.site_id: (c.name, m.name, i) for c, m, i, s in self.statements()}

    def statement_count(self) -> int:
        return sum(len(m.body) for _, m in self.methods())

    def replace_method(self, class_name: str, method: MethodDef) -> "AppModel":
        classes = []
        for c in self.classes:
            if c.name == class_name:
                c = replace(c, methods=tuple(method if m.name == method.name else m for m in c.methods))
            classes.append(c)
        return replace(self, classes=tuple(classes))

    def resolve_callee(self, caller_class: str, callee: str) -> tuple[ClassDef, MethodDef] | None:
        """Look up the target of an ``invoke``: bare names bind to the caller's class."""
        if "." in callee:
            cls_name, meth_name = callee.rsplit(".", 1)
        else:
            cls_name, meth_name = caller_class, callee
        c = self.cls(cls_name)
        if c is None:
            return None
        m = c.method(meth_name)
        return (c, m) if m is not None else None


def label_index(body) -> dict[str, int]:
    return {s.name: i for i, s in enumerate(body) if s.kind is StmtKind.LABEL}


def default_site_id(class_name: str, method_name: str, index: int) -> str:
    return f"{class_name}.{method_name}#{index}"


def successors(method: MethodDef, index: int) -> list[int]:
    """CFG successors of statement ``index`` inside ``method``."""
    stmt = method.body[index]
    nxt = index + 1
    fall = [nxt] if nxt < len(method.body) else []
    if stmt.kind is StmtKind.RETURN:
        return []
    if stmt.kind is StmtKind.GOTO:
        return [method.labels[stmt.name]]
    if stmt.kind is StmtKind.IF_GOTO:
        target = method.labels[stmt.name]
        return fall + ([target] if target not in fall else [])
    return fall
