"""Pretty printer producing canonical MIR text."""
from __future__ import annotations

import json

from .model import AppModel, ComponentDecl, Const, MethodDef, Operand, Statement, StmtKind, default_site_id

INDENT = "  "


def _str(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _operand(op: Operand) -> str:
    if isinstance(op, Const):
        return _str(op.value) if isinstance(op.value, str) else str(op.value)
    return op.name


def _ops(args) -> str:
    return ", ".join(_operand(a) for a in args)


def format_statement(stmt: Statement) -> str:
    """Render one statement without annotations."""
    k = stmt.kind
    lhs = f"{stmt.dest} = " if stmt.dest is not None else ""
    if k is StmtKind.CONST_ASSIGN:
        arg = stmt.args[0]
        if isinstance(arg, Const):
            return f"{lhs}const {_operand(arg)}"
        return f"{lhs}{arg.name}"
    if k is StmtKind.NEW_INTENT:
        return f"{lhs}new Intent"
    if k is StmtKind.INTENT_MUTATE:
        if stmt.name == "putExtra":
            key, val = stmt.args
            return f"{stmt.base}.putExtra({_str(key.value)}, {_operand(val)})"
        return f"{stmt.base}.{stmt.name}({_operand(stmt.args[0])})"
    if k is StmtKind.PENDING_INTENT_CREATE:
        return f"{lhs}PendingIntent.{stmt.name}({_ops(stmt.args)})"
    if k is StmtKind.INTENT_SENDER_GET:
        return f"{lhs}{stmt.base}.getIntentSender()"
    if k is StmtKind.API_CALL:
        return f"{lhs}call {stmt.name}({_ops(stmt.args)})"
    if k is StmtKind.LOCAL_CALL:
        return f"{lhs}invoke {stmt.name}({_ops(stmt.args)})"
    if k is StmtKind.GET_INCOMING_INTENT:
        return f"{lhs}getIntent()"
    if k is StmtKind.GET_EXTRA:
        return f"{lhs}{stmt.base}.getExtra({_str(stmt.args[0].value)})"
    if k is StmtKind.IF_GOTO:
        return f"if {stmt.base} goto {stmt.name}"
    if k is StmtKind.GOTO:
        return f"goto {stmt.name}"
    if k is StmtKind.LABEL:
        return f"label {stmt.name}"
    if k is StmtKind.RETURN:
        return "return" + (f" {_operand(stmt.args[0])}" if stmt.args else "")
    raise ValueError(f"unknown statement kind {k}")


def _component(comp: ComponentDecl) -> list[str]:
    lines = [f"{INDENT}{comp.kind.keyword} {comp.class_name} {{"]
    if comp.exported != bool(comp.filters):
        lines.append(f"{INDENT * 2}exported: {'true' if comp.exported else 'false'}")
    for flt in comp.filters:
        lines.append(f"{INDENT * 2}filter {{")
        for word, values in (("action", flt.actions), ("category", flt.categories), ("scheme", flt.data_schemes)):
            for v in sorted(values):
                lines.append(f"{INDENT * 3}{word} {_str(v)}")
        lines.append(f"{INDENT * 2}}}")
    lines.append(f"{INDENT}}}")
    return lines


def _method(class_name: str, method: MethodDef) -> list[str]:
    lines = [f"{INDENT}method {method.name}({', '.join(method.params)}) {{"]
    for i, stmt in enumerate(method.body):
        text = format_statement(stmt)
        if stmt.site_id != default_site_id(class_name, method.name, i):
            text += f" @site({stmt.site_id})"
        if stmt.synthetic_tag:
            text += f" @synthetic({stmt.synthetic_tag})"
        lines.append(INDENT * 2 + text)
    lines.append(f"{INDENT}}}")
    return lines


def serialize_app(model: AppModel) -> str:
    lines = [f"app {_str(model.package_name)}", "manifest {"]
    for comp in model.manifest.components:
        lines.extend(_component(comp))
    lines.append("}")
    for c in model.classes:
        lines.append("")
        lines.append(f"class {c.name} extends {c.extends} {{")
        for j, m in enumerate(c.methods):
            if j:
                lines.append("")
            lines.extend(_method(c.name, m))
        lines.append("}")
    return "\n".join(lines) + "\n"
