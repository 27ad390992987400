"""Structural checks run on every parsed model."""
from __future__ import annotations

import re

from .errors import ValidationError
from .model import AppModel, MethodDef, StmtKind

_ANNOT_RE = re.compile(r"[^()\s]+")


def validate(model: AppModel, source_info: dict | None = None) -> AppModel:
    """Raise :class:`ValidationError` for the first invariant violation found."""
    positions = (source_info or {}).get("components", {})

    seen = set()
    for comp in model.manifest.components:
        if comp.class_name in seen:
            raise ValidationError(f"duplicate component {comp.class_name}", *positions.get(comp.class_name, (None, None)))
        seen.add(comp.class_name)

    class_names = set()
    for c in model.classes:
        if c.name in class_names:
            raise ValidationError(f"duplicate class {c.name}")
        class_names.add(c.name)
        method_names = set()
        for m in c.methods:
            if m.name in method_names:
                raise ValidationError(f"duplicate method {c.name}.{m.name}")
            method_names.add(m.name)

    for comp in model.manifest.components:
        if comp.class_name not in class_names:
            raise ValidationError(
                f"component {comp.class_name} has no class definition",
                *positions.get(comp.class_name, (None, None)),
            )

    sites = set()
    for c, m, _, stmt in model.statements():
        if not _ANNOT_RE.fullmatch(stmt.site_id or ""):
            raise ValidationError(f"invalid site id {stmt.site_id!r} in {c.name}.{m.name}")
        if stmt.site_id in sites:
            raise ValidationError(f"duplicate site id {stmt.site_id}")
        sites.add(stmt.site_id)
        if stmt.synthetic_tag is not None and not _ANNOT_RE.fullmatch(stmt.synthetic_tag):
            raise ValidationError(f"invalid synthetic tag {stmt.synthetic_tag!r} at {stmt.site_id}")
        if stmt.kind is StmtKind.LOCAL_CALL:
            target = model.resolve_callee(c.name, stmt.name)
            if target is None:
                raise ValidationError(f"unknown method {stmt.name} invoked at {stmt.site_id}")
            if len(target[1].params) != len(stmt.args):
                raise ValidationError(
                    f"{stmt.name} takes {len(target[1].params)} arguments, "
                    f"{len(stmt.args)} given at {stmt.site_id}"
                )

    for c, m in model.methods():
        _check_labels(c.name, m)
        _check_definite_assignment(c.name, m)
    return model


def _check_labels(class_name: str, method: MethodDef) -> None:
    declared = set()
    for stmt in method.body:
        if stmt.kind is StmtKind.LABEL:
            if stmt.name in declared:
                raise ValidationError(f"duplicate label {stmt.name} in {class_name}.{method.name}")
            declared.add(stmt.name)
    for stmt in method.body:
        target = stmt.jump_target()
        if target is not None and target not in declared:
            raise ValidationError(f"dangling label {target}")


def _check_definite_assignment(class_name: str, method: MethodDef) -> None:
    """Every use must be preceded by a definition on every forward-only path."""
    body = method.body
    n = len(body)
    if n == 0:
        return
    preds: list[list[int]] = [[] for _ in range(n)]
    for i, stmt in enumerate(body):
        for j in _forward_successors(method, i):
            preds[j].append(i)
    params = frozenset(method.params)
    outs: list[frozenset | None] = [None] * n
    for i, stmt in enumerate(body):
        if i == 0:
            avail = params
        else:
            incoming = [outs[p] for p in preds[i] if outs[p] is not None]
            if not incoming:
                continue  # unreachable on the acyclic approximation
            avail = frozenset.intersection(*incoming)
        for name in stmt.uses():
            if name not in avail:
                raise ValidationError(
                    f"local {name} may be used before assignment at {stmt.site_id} "
                    f"in {class_name}.{method.name}"
                )
        outs[i] = avail | {stmt.dest} if stmt.dest is not None else avail


def _forward_successors(method: MethodDef, i: int) -> list[int]:
    stmt = method.body[i]
    out = []
    if stmt.kind not in (StmtKind.RETURN, StmtKind.GOTO) and i + 1 < len(method.body):
        out.append(i + 1)
    target = stmt.jump_target()
    if target is not None:
        j = method.labels[target]
        if j > i and j not in out:
            out.append(j)
    return out
