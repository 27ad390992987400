"""MIR: the textual app-model representation (manifest, classes, statements)."""
from .errors import MirError, ParseError, ValidationError
from .model import (
    AppModel,
    ClassDef,
    ComponentDecl,
    ComponentKind,
    Const,
    IntentFilter,
    Local,
    Manifest,
    MethodDef,
    Operand,
    Statement,
    StmtKind,
    default_site_id,
    successors,
)
from .parser import parse_app, tokenize
from .serialize import format_statement, serialize_app
from .validate import validate


def read_app(path) -> AppModel:
    with open(path, encoding="utf-8") as fh:
        return parse_app(fh.read())


__all__ = [
    "AppModel", "ClassDef", "ComponentDecl", "ComponentKind", "Const", "IntentFilter",
    "Local", "Manifest", "MethodDef", "MirError", "Operand", "ParseError", "Statement",
    "StmtKind", "ValidationError", "default_site_id", "format_statement", "parse_app",
    "read_app", "serialize_app", "successors", "tokenize", "validate",
]
