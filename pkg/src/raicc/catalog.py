"""The AICC method catalog: framework methods that can launch components."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from . import data_text


class IccObjectKind(str, Enum):
    PENDING_INTENT = "PendingIntent"
    INTENT_SENDER = "IntentSender"


class CatalogError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


RECEIVER = "receiver"


@dataclass(frozen=True)
class AiccCatalogEntry:
    signature: str
    arity: int
    icc_object_kind: IccObjectKind
    icc_position: int | str  # RECEIVER or a 0-based parameter index
    expects_result: bool
    api_level_added: int
    api_level_removed: int | None = None
    provenance: str | None = None

    @property
    def method_name(self) -> str:
        return self.signature.rsplit(".", 1)[-1]

    @property
    def on_receiver(self) -> bool:
        return self.icc_position == RECEIVER

    def call_operand_index(self) -> int:
        """Index of the ICC object among a matching MIR call's operands."""
        return 0 if self.on_receiver else self.icc_position

    def operand_count(self) -> int:
        return self.arity + 1 if self.on_receiver else self.arity

    def position_text(self) -> str:
        return RECEIVER if self.on_receiver else f"param:{self.icc_position}"

    def to_line(self) -> str:
        parts = [self.signature, str(self.arity), self.icc_object_kind.value, self.position_text(),
                 "result" if self.expects_result else "noresult", f"added:{self.api_level_added}"]
        if self.api_level_removed is not None:
            parts.append(f"removed:{self.api_level_removed}")
        if self.provenance:
            parts.append(f"provenance:{self.provenance}")
        return " | ".join(parts)


class AiccCatalog:
    """Immutable collection of entries indexed by ``(signature, arity)``."""

    def __init__(self, entries=()):
        self.entries: tuple[AiccCatalogEntry, ...] = tuple(entries)
        self._index = {(e.signature, e.arity): e for e in self.entries}
        if len(self._index) != len(self.entries):
            raise CatalogError("duplicate signature")
        self._by_name: dict[str, list[AiccCatalogEntry]] = {}
        for e in self.entries:
            self._by_name.setdefault(e.signature, []).append(e)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, signature: str) -> bool:
        return signature in self._by_name

    def signatures(self) -> set[str]:
        return set(self._by_name)

    def lookup(self, signature: str, arity: int) -> AiccCatalogEntry | None:
        return self._index.get((signature, arity))

    def match_call(self, qname: str, n_operands: int) -> AiccCatalogEntry | None:
        """Entry matched by a MIR ``call qname(...)`` with ``n_operands`` operands."""
        for e in self._by_name.get(qname, ()):
            if e.operand_count() == n_operands:
                return e
        return None


def _parse_position(text: str, lineno: int):
    if text == RECEIVER:
        return RECEIVER
    if text.startswith("param:"):
        try:
            idx = int(text[6:])
        except ValueError:
            raise CatalogError(f"bad parameter index {text!r}", lineno) from None
        if idx < 0:
            raise CatalogError(f"negative parameter index {text!r}", lineno)
        return idx
    raise CatalogError(f"expected receiver or param:N, got {text!r}", lineno)


def _parse_level(text: str, prefix: str, lineno: int) -> int:
    try:
        value = int(text[len(prefix):])
    except ValueError:
        raise CatalogError(f"bad API level {text!r}", lineno) from None
    if value < 1:
        raise CatalogError(f"API level must be positive: {text!r}", lineno)
    return value


def parse_entry(line: str, lineno: int | None = None) -> AiccCatalogEntry:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) < 6:
        raise CatalogError("expected at least 6 '|'-separated fields", lineno)
    sig, arity_s, kind_s, pos_s, res_s, added_s, *rest = parts
    if not sig or any(not seg.isidentifier() for seg in sig.split(".")) or "." not in sig:
        raise CatalogError(f"bad signature {sig!r}", lineno)
    try:
        arity = int(arity_s)
    except ValueError:
        raise CatalogError(f"bad arity {arity_s!r}", lineno) from None
    if arity < 0:
        raise CatalogError("negative arity", lineno)
    try:
        kind = IccObjectKind(kind_s)
    except ValueError:
        raise CatalogError(f"unknown ICC object kind {kind_s!r}", lineno) from None
    position = _parse_position(pos_s, lineno)
    if position != RECEIVER and position >= arity:
        raise CatalogError(f"parameter index {position} out of range for arity {arity}", lineno)
    if res_s not in ("result", "noresult"):
        raise CatalogError(f"expected result or noresult, got {res_s!r}", lineno)
    if not added_s.startswith("added:"):
        raise CatalogError(f"expected added:N, got {added_s!r}", lineno)
    added = _parse_level(added_s, "added:", lineno)
    removed = provenance = None
    for extra in rest:
        if extra.startswith("removed:") and removed is None:
            removed = _parse_level(extra, "removed:", lineno)
            if removed <= added:
                raise CatalogError("removed level must be greater than added level", lineno)
        elif extra.startswith("provenance:") and provenance is None:
            provenance = extra[len("provenance:"):]
            if not provenance:
                raise CatalogError("empty provenance", lineno)
        else:
            raise CatalogError(f"unexpected field {extra!r}", lineno)
    return AiccCatalogEntry(sig, arity, kind, position, res_s == "result", added, removed, provenance)


def load_catalog(text: str) -> AiccCatalog:
    entries = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        entry = parse_entry(line, lineno)
        key = (entry.signature, entry.arity)
        if key in seen:
            raise CatalogError(f"duplicate signature {entry.signature}/{entry.arity} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        entries.append(entry)
    return AiccCatalog(entries)


def default_catalog_text() -> str:
    return data_text("aicc_methods.txt")


_DEFAULT: AiccCatalog | None = None


def default_catalog() -> AiccCatalog:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_catalog(default_catalog_text())
    return _DEFAULT


def lookup(catalog: AiccCatalog, call_signature: str, arity: int) -> AiccCatalogEntry | None:
    return catalog.lookup(call_signature, arity)


def api_level_histogram(catalog: AiccCatalog) -> dict[int, int]:
    return dict(sorted(Counter(e.api_level_added for e in catalog).items()))
