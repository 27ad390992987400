from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_app, random_app_text, random_method_app
from raicc.mir import (
    ComponentKind, Const, Local, MirError, ParseError, Statement, StmtKind, ValidationError,
    parse_app, serialize_app, tokenize,
)

MINIMAL = 'app "a" manifest{} '


def test_minimal_app():
    model = parse_app(MINIMAL)
    assert model.package_name == "a"
    assert model.classes == ()
    assert model.manifest.components == ()


def test_alarm_broadcast_transcription(fixture_app):
    model = fixture_app("alarm_broadcast.mir")
    receivers = [c for c in model.manifest.components if c.kind is ComponentKind.RECEIVER]
    assert [c.class_name for c in receivers] == ["com.mal.AlarmListener"]
    aicc = [s for _, _, _, s in model.statements() if s.name == "android.app.AlarmManager.set"]
    assert len(aicc) == 1 and aicc[0].site_id == "alarm"


def test_dangling_label():
    text = 'app "a" manifest {} class a.X extends Plain { method m() { goto L9 } }'
    with pytest.raises(ValidationError, match="dangling label L9"):
        parse_app(text)


@pytest.mark.parametrize("text, message", [
    ('app "a" manifest { activity a.A { } }', "has no class definition"),
    ('app "a" manifest {} class a.X extends Plain { } class a.X extends Plain { }', "duplicate class a.X"),
    ('app "a" manifest {} class a.X extends Plain { method m() { } method m() { } }', "duplicate method"),
    ('app "a" manifest {} class a.X extends Plain { method m() { call f(y) } }', "before assignment"),
    ('app "a" manifest {} class a.X extends Plain { method m() { x = const 1 @site(s) y = const 2 @site(s) } }',
     "duplicate site id s"),
])
def test_validation_errors(text, message):
    with pytest.raises(ValidationError, match=message):
        parse_app(text)


@pytest.mark.parametrize("text", [
    "", "app", 'app "a"', 'app "a" manifest {', 'app "a" manifest {} class', 'app "a" manifest {} class a.X extends Thing { }',
    'app "a" manifest {} class a.X extends Plain { method m() { x = } }', '"unterminated', "app 'a'",
    'app "a" manifest {} class a.X extends Plain { method m() { x = PendingIntent.getFoo(i, 0) } }',
])
def test_parse_errors_have_positions(text):
    with pytest.raises(MirError) as info:
        parse_app(text)
    if isinstance(info.value, ParseError):
        assert info.value.line is not None and info.value.column is not None


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet='appmanifest{}()"=.,@ \nclassxtendsPlainmethodgoto1', max_size=80))
def test_parser_totality(text):
    try:
        parse_app(text)
    except MirError:
        pass


def test_default_export_rule():
    text = ('app "a" manifest { activity a.A { filter { action "X" } } activity a.B { }'
            ' activity a.C { exported: false filter { action "X" } } }'
            ' class a.A extends Activity { } class a.B extends Activity { } class a.C extends Activity { }')
    comps = {c.class_name: c for c in parse_app(text).manifest.components}
    assert comps["a.A"].exported is True
    assert comps["a.B"].exported is False
    assert comps["a.C"].exported is False


def test_default_site_ids_and_alias():
    text = 'app "a" manifest {} class a.X extends Plain { method m() { i = new Intent\n j = i @site(copy) } }'
    body = parse_app(text).classes[0].methods[0].body
    assert body[0].site_id == "a.X.m#0"
    assert body[1] == Statement(StmtKind.CONST_ASSIGN, dest="j", args=(Local("i"),), site_id="copy")


def test_tokenize_skips_comments():
    kinds = [t.value for t in tokenize('// note\napp "a"')]
    assert kinds[:2] == ["app", "a"]


def test_empty_manifest_round_trip():
    model = parse_app(MINIMAL)
    assert parse_app(serialize_app(model)) == model


def test_synthetic_tag_round_trip(fixture_app):
    model = fixture_app("explicit_icc.mir")
    cls = model.classes[0]
    meth = cls.methods[0]
    extra = Statement(StmtKind.API_CALL, name="startActivity", args=(Local("intent"),),
                      site_id="added.1", synthetic_tag="raicc")
    body = list(meth.body)
    body.insert(3, extra)
    model = model.replace_method(cls.name, meth.with_body(body))
    text = serialize_app(model)
    assert "@synthetic(raicc)" in text
    assert parse_app(text) == model


def test_constants_round_trip():
    text = 'app "a" manifest {} class a.X extends Plain { method m() { x = const "q\\"uote" y = const -4 return y } }'
    model = parse_app(text)
    assert model.classes[0].methods[0].body[1].args == (Const(-4),)
    assert parse_app(serialize_app(model)) == model


@pytest.mark.parametrize("seed", range(40))
def test_random_app_round_trip(seed):
    model = random_app(seed)
    text = serialize_app(model)
    again = parse_app(text)
    assert again == model
    assert serialize_app(again) == text
    assert [s.site_id for *_, s in again.statements()] == [s.site_id for *_, s in model.statements()]


@pytest.mark.parametrize("seed", range(40))
def test_random_method_round_trip(seed):
    model = parse_app(random_method_app(seed))
    assert parse_app(serialize_app(model)) == model


def test_generated_text_is_deterministic():
    assert random_app_text(7) == random_app_text(7)


def test_replace_method_keeps_others(fixture_app):
    model = fixture_app("alarm_broadcast.mir")
    cls = model.cls("com.mal.AlarmListener")
    meth = cls.methods[0]
    changed = model.replace_method(cls.name, replace(meth, body=meth.body[-1:]))
    assert changed.cls("com.mal.MainActivity") == model.cls("com.mal.MainActivity")
    assert len(changed.cls(cls.name).methods[0].body) == 1
