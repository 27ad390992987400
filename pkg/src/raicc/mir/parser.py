"""Recursive-descent parser for MIR source text."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import MirError, ParseError
from .model import (
    CLASS_BASES,
    MUTATORS,
    PENDING_FACTORIES,
    AppModel,
    ClassDef,
    ComponentDecl,
    ComponentKind,
    Const,
    IntentFilter,
    Local,
    Manifest,
    MethodDef,
    Statement,
    StmtKind,
    default_site_id,
)
from .validate import validate

# Statement keywords cannot double as local names.
RESERVED = frozenset({"call", "invoke", "if", "goto", "label", "return"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<annot>@(?P<aname>[A-Za-z_]\w*)\((?P<araw>[^()\s]*)\))
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<punct>[{}(),.=:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | string | int | punct | annot | eof
    value: object
    line: int
    col: int
    extra: str = ""


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "aname" or kind == "araw":
            kind = "annot"
        lex = m.group(0)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "string":
            try:
                value = json.loads(lex)
            except ValueError:
                raise ParseError(f"bad string literal {lex}", line, col) from None
            tokens.append(Token("string", value, line, col))
        elif kind == "int":
            tokens.append(Token("int", int(lex), line, col))
        elif kind == "annot":
            tokens.append(Token("annot", m.group("aname"), line, col, m.group("araw")))
        else:
            tokens.append(Token(kind, lex, line, col))
        pos = m.end()
    tokens.append(Token("eof", None, line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.value)

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        return self.tok.kind in ("ident", "punct") and self.tok.value == value

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error(f"expected {value!r}, found {self.describe(self.tok)}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            raise self.error(f"expected {what}, found {self.describe(self.tok)}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        return self.expect_kind("ident", what).value

    def local_name(self) -> str:
        tok = self.tok
        name = self.ident("local name")
        if name in RESERVED:
            raise self.error(f"reserved word {name!r} cannot name a local", tok)
        return name

    def qname(self) -> str:
        parts = [self.ident("qualified name")]
        while self.at(".") and self.peek().kind == "ident":
            self.advance()
            parts.append(self.ident())
        return ".".join(parts)

    # -- top level -----------------------------------------------------
    def app(self) -> tuple[AppModel, dict]:
        self.expect("app")
        package = self.expect_kind("string", "package name string").value
        manifest, source_info = self.manifest()
        classes = []
        while self.at("class"):
            classes.append(self.class_def())
        if self.tok.kind != "eof":
            raise self.error(f"expected 'class' or end of input, found {self.describe(self.tok)}")
        return AppModel(package, manifest, tuple(classes)), source_info

    def manifest(self):
        self.expect("manifest")
        self.expect("{")
        comps = []
        positions = {}
        while not self.at("}"):
            tok = self.tok
            if tok.kind != "ident" or tok.value not in ("activity", "service", "receiver"):
                raise self.error(f"expected component declaration, found {self.describe(tok)}")
            self.advance()
            kind = ComponentKind.from_keyword(tok.value)
            name = self.qname()
            self.expect("{")
            exported = None
            if self.at("exported"):
                self.advance()
                self.expect(":")
                flag = self.ident("true or false")
                if flag not in ("true", "false"):
                    raise self.error(f"expected true or false, found {flag!r}")
                exported = flag == "true"
            filters = []
            while self.at("filter"):
                filters.append(self.intent_filter())
            self.expect("}")
            if exported is None:
                exported = bool(filters)
            comps.append(ComponentDecl(kind, name, exported, tuple(filters)))
            positions.setdefault(name, (tok.line, tok.col))
        self.expect("}")
        return Manifest(tuple(comps)), {"components": positions}

    def intent_filter(self) -> IntentFilter:
        self.expect("filter")
        self.expect("{")
        fields = {"action": set(), "category": set(), "scheme": set()}
        while not self.at("}"):
            tok = self.tok
            if tok.kind != "ident" or tok.value not in fields:
                raise self.error(f"expected action, category or scheme, found {self.describe(tok)}")
            self.advance()
            fields[tok.value].add(self.expect_kind("string", "string").value)
        self.expect("}")
        return IntentFilter(
            frozenset(fields["action"]), frozenset(fields["category"]), frozenset(fields["scheme"])
        )

    def class_def(self) -> ClassDef:
        self.expect("class")
        name = self.qname()
        self.expect("extends")
        base_tok = self.tok
        base = self.ident("base class")
        if base not in CLASS_BASES:
            raise self.error(f"unknown base class {base!r}", base_tok)
        self.expect("{")
        methods = []
        while not self.at("}"):
            methods.append(self.method(name))
        self.expect("}")
        return ClassDef(name, base, tuple(methods))

    def method(self, class_name: str) -> MethodDef:
        self.expect("method")
        name = self.ident("method name")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.local_name())
            while self.at(","):
                self.advance()
                params.append(self.local_name())
        self.expect(")")
        self.expect("{")
        body = []
        while not self.at("}"):
            stmt = self.statement()
            site, tag = self.annotations()
            if site is None:
                site = default_site_id(class_name, name, len(body))
            body.append(Statement(stmt.kind, stmt.dest, stmt.base, stmt.name, stmt.args, site, tag))
        self.expect("}")
        return MethodDef(name, tuple(params), tuple(body))

    def annotations(self):
        site = tag = None
        while self.tok.kind == "annot":
            tok = self.advance()
            if tok.value == "site":
                if site is not None:
                    raise self.error("duplicate @site annotation", tok)
                if not tok.extra:
                    raise self.error("empty @site annotation", tok)
                site = tok.extra
            elif tok.value == "synthetic":
                if not tok.extra:
                    raise self.error("empty @synthetic annotation", tok)
                tag = tok.extra
            else:
                raise self.error(f"unknown annotation @{tok.value}", tok)
        return site, tag

    # -- statements ----------------------------------------------------
    def value(self):
        tok = self.tok
        if tok.kind in ("string", "int"):
            self.advance()
            return Const(tok.value)
        if tok.kind == "ident":
            return Local(self.local_name())
        raise self.error(f"expected value, found {self.describe(tok)}")

    def values(self, close: str = ")") -> tuple:
        vals = []
        if not self.at(close):
            vals.append(self.value())
            while self.at(","):
                self.advance()
                vals.append(self.value())
        return tuple(vals)

    def call_tail(self, kind: StmtKind, dest):
        name = self.qname()
        self.expect("(")
        args = self.values()
        self.expect(")")
        return Statement(kind, dest=dest, name=name, args=args)

    def statement(self) -> Statement:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(f"expected statement, found {self.describe(tok)}")
        word = tok.value
        if word == "call":
            self.advance()
            return self.call_tail(StmtKind.API_CALL, None)
        if word == "invoke":
            self.advance()
            return self.call_tail(StmtKind.LOCAL_CALL, None)
        if word == "if":
            self.advance()
            cond = self.local_name()
            self.expect("goto")
            return Statement(StmtKind.IF_GOTO, base=cond, name=self.ident("label"))
        if word == "goto":
            self.advance()
            return Statement(StmtKind.GOTO, name=self.ident("label"))
        if word == "label":
            self.advance()
            return Statement(StmtKind.LABEL, name=self.ident("label"))
        if word == "return":
            self.advance()
            if self._return_has_value():
                return Statement(StmtKind.RETURN, args=(self.value(),))
            return Statement(StmtKind.RETURN)
        # statements starting with a local
        name = self.local_name()
        if self.at("="):
            self.advance()
            return self.assignment(name)
        if self.at("."):
            self.advance()
            mtok = self.tok
            mut = self.ident("mutator")
            if mut not in MUTATORS:
                raise self.error(f"unknown intent mutator {mut!r}", mtok)
            self.expect("(")
            if mut == "putExtra":
                key = self.expect_kind("string", "extra key string").value
                self.expect(",")
                args = (Const(key), self.value())
            else:
                args = (self.value(),)
            self.expect(")")
            return Statement(StmtKind.INTENT_MUTATE, base=name, name=mut, args=args)
        raise self.error(f"expected '=' or '.', found {self.describe(self.tok)}")

    def _return_has_value(self) -> bool:
        tok = self.tok
        if tok.kind in ("string", "int"):
            return True
        if tok.kind != "ident" or tok.value in RESERVED:
            return False
        # `return` followed by `x = ...` or `x.m(...)` starts a new statement
        nxt = self.peek()
        return not (nxt.kind == "punct" and nxt.value in ("=", "."))

    def assignment(self, dest: str) -> Statement:
        tok = self.tok
        if tok.kind in ("string", "int"):
            raise self.error("literal assignment needs 'const'")
        word = self.ident("right-hand side")
        if word == "const":
            vtok = self.tok
            if vtok.kind not in ("string", "int"):
                raise self.error(f"expected string or integer constant, found {self.describe(vtok)}")
            self.advance()
            return Statement(StmtKind.CONST_ASSIGN, dest=dest, args=(Const(vtok.value),))
        if word == "new":
            self.expect("Intent")
            return Statement(StmtKind.NEW_INTENT, dest=dest)
        if word == "call":
            return self.call_tail(StmtKind.API_CALL, dest)
        if word == "invoke":
            return self.call_tail(StmtKind.LOCAL_CALL, dest)
        if word == "getIntent":
            self.expect("(")
            self.expect(")")
            return Statement(StmtKind.GET_INCOMING_INTENT, dest=dest)
        if word == "PendingIntent" and self.at("."):
            self.advance()
            ftok = self.tok
            factory = self.ident("PendingIntent factory")
            if factory not in PENDING_FACTORIES:
                raise self.error(f"unknown PendingIntent factory {factory!r}", ftok)
            self.expect("(")
            intent = self.local_name()
            self.expect(",")
            flags = self.value()
            self.expect(")")
            return Statement(StmtKind.PENDING_INTENT_CREATE, dest=dest, name=factory,
                             args=(Local(intent), flags))
        if word in RESERVED:
            raise self.error(f"unexpected {word!r} on right-hand side", tok)
        # `x = y`, `x = y.getIntentSender()` or `x = y.getExtra("k")`
        if self.at("."):
            self.advance()
            mtok = self.tok
            meth = self.ident("method")
            self.expect("(")
            if meth == "getIntentSender":
                self.expect(")")
                return Statement(StmtKind.INTENT_SENDER_GET, dest=dest, base=word)
            if meth == "getExtra":
                key = self.expect_kind("string", "extra key string").value
                self.expect(")")
                return Statement(StmtKind.GET_EXTRA, dest=dest, base=word, args=(Const(key),))
            raise self.error(f"unknown method {meth!r} on local {word!r}", mtok)
        return Statement(StmtKind.CONST_ASSIGN, dest=dest, args=(Local(word),))


def parse_app(text: str, *, check: bool = True) -> AppModel:
    """Parse MIR source into a validated :class:`AppModel`.

    Raises :class:`ParseError` on grammar violations and
    :class:`ValidationError` when the model breaks a structural invariant.
    """
    if not isinstance(text, str):
        raise ParseError("MIR source must be text", 1, 1)
    try:
        model, info = _Parser(text).app()
    except MirError:
        raise
    except RecursionError:
        raise ParseError("input nests too deeply", 1, 1) from None
    if check:
        validate(model, info)
    return model
