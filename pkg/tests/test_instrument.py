from __future__ import annotations

from dataclasses import replace

import pytest

from gen import random_app
from raicc.coalprop import IntentValue, VSet, analyze
from raicc.instrument import (
    StaleSites, aicc_site_of, instrument, is_fallback, is_instrumented, strip_synthetic, synthetic_statements,
)
from raicc.mir import Const, Local, StmtKind, parse_app, serialize_app
from raicc.resolver import find_aicc_sites


def _run(model, catalog):
    prop = analyze(model)
    sites = find_aicc_sites(model, catalog, prop)
    return sites, instrument(model, sites, prop)


def test_single_pair_shape(fixture_app, catalog):
    model = fixture_app("alarm_leak.mir")
    _, out = _run(model, catalog)
    body = out.cls("com.luc.MainActivity").method("onCreate").body
    idx = [s.site_id for s in body].index("set")
    added = body[idx + 1]
    assert added.kind is StmtKind.API_CALL and added.name == "startActivity"
    assert added.args == (Local("intent"),)
    assert added.synthetic_tag == "raicc"
    assert added.site_id == "set.raicc1"
    assert body[idx + 2].kind is StmtKind.RETURN


def test_no_sites_is_identity(fixture_app, catalog):
    model = fixture_app("explicit_icc.mir")
    sites, out = _run(model, catalog)
    assert sites == [] and out == model


def test_is_instrumented(fixture_app, catalog, corpus_apps):
    assert not any(is_instrumented(m) for m in corpus_apps.values())
    _, out = _run(fixture_app("alarm_broadcast.mir"), catalog)
    assert is_instrumented(out)


def test_three_pairs_order(fixture_app, catalog):
    model = fixture_app("alarm_broadcast.mir")
    (site,) = find_aicc_sites(model, catalog, analyze(model))
    i1 = IntentValue(action=VSet.of("X"), origin_site="o1")
    i2 = IntentValue(action=VSet.of("Y"), origin_site="o2")
    site = replace(site, resolved=(("a", i1), ("a", i2), ("r", i1)))
    out = instrument(model, [site])
    body = out.cls("com.mal.MainActivity").method("onCreate").body
    idx = [s.site_id for s in body].index("alarm")
    added = body[idx + 1: idx + 4]
    assert [s.name for s in added] == ["startActivity", "startActivity", "sendBroadcast"]
    assert [s.args[1] for s in added] == [Const("o1"), Const("o2"), Const("o1")]
    assert all(s.args[0] == Local("pi") for s in added)
    assert not body[idx + 4].is_synthetic


def test_start_activity_for_result(catalog):
    text = '''app "a" manifest { activity a.T { } } class a.M extends Plain { method m() {
      i = new Intent
      i.setClass("T")
      pi = PendingIntent.getActivity(i, 0)
      s = pi.getIntentSender()
      call android.app.Activity.startIntentSenderForResult(s, 1, 0, 0, 0, 0) @site(x)
    } } class a.T extends Activity { }'''
    _, out = _run(parse_app(text), catalog)
    names = [s.name for _, _, _, s in out.statements() if s.is_synthetic]
    assert names == ["startActivityForResult"]


def test_fallback_calls(catalog):
    text = ('app "a" manifest {} class a.M extends Plain { method m(p) {'
            ' call android.app.AlarmManager.set(0, 0, p) @site(x) } }')
    sites, out = _run(parse_app(text), catalog)
    assert sites[0].unresolved
    added = [s for _, _, _, s in out.statements() if s.is_synthetic]
    assert [s.name for s in added] == ["startActivity", "startService", "sendBroadcast"]
    assert [s.site_id for s in added] == ["x.raicc-fallback1", "x.raicc-fallback2", "x.raicc-fallback3"]
    assert all(is_fallback(s) and aicc_site_of(s) == "x" for s in added)
    assert all(s.args == (Local("p"),) for s in added)


def test_selector_when_origin_local_changed(catalog):
    text = '''app "a" manifest {} class a.M extends Plain { method m() {
      i = new Intent @site(n)
      pi = PendingIntent.getBroadcast(i, 0)
      i.setAction("LATER")
      call android.app.PendingIntent.send(pi) @site(s)
    } }'''
    _, out = _run(parse_app(text), catalog)
    (added,) = [s for _, _, _, s in out.statements() if s.is_synthetic]
    assert added.args == (Local("pi"), Const("n"))


def test_stale_sites(fixture_app, catalog):
    model = fixture_app("alarm_broadcast.mir")
    (site,) = find_aicc_sites(model, catalog, analyze(model))
    with pytest.raises(StaleSites):
        instrument(model, [replace(site, site_id="gone")])
    with pytest.raises(StaleSites):
        instrument(model, [replace(site, index=0)])


def test_inputs_not_mutated(fixture_app, catalog):
    model = fixture_app("alarm_leak.mir")
    before = serialize_app(model)
    _run(model, catalog)
    assert serialize_app(model) == before


def test_synthetic_statements_without_prop(fixture_app, catalog):
    model = fixture_app("alarm_leak.mir")
    (site,) = find_aicc_sites(model, catalog, analyze(model))
    (stmt,) = synthetic_statements(site)
    assert stmt.args == (Local("pi"), Const("newintent"))


@pytest.mark.parametrize("seed", range(50))
def test_round_trip_after_instrument(seed, catalog):
    _, out = _run(random_app(seed), catalog)
    again = parse_app(serialize_app(out))
    assert again == out
    assert strip_synthetic(again) == random_app(seed)
