from __future__ import annotations

import pytest

from gen import random_app
from raicc.coalprop import VSet, analyze
from raicc.config import AnalysisConfig
from raicc.mir import StmtKind, parse_app
from raicc.resolver import find_aicc_sites, pending_values, site_report


def _sites(model, catalog, config=None):
    return find_aicc_sites(model, catalog, analyze(model, config))


def test_alarm_broadcast_site(fixture_app, catalog):
    (site,) = _sites(fixture_app("alarm_broadcast.mir"), catalog)
    assert site.site_id == "alarm"
    assert site.signature == "android.app.AlarmManager.set"
    assert not site.unresolved
    [(t, iv)] = site.resolved
    assert t == "r"
    assert iv.target_class == VSet.of("com.mal.AlarmListener")


SENDER = '''app "a"
manifest { activity a.T { } }
class a.M extends Plain {
  method m() {
    i = new Intent
    i.setClass("T")
    pi = PendingIntent.getActivity(i, 0)
    s = pi.getIntentSender()
    call android.app.Activity.startIntentSenderForResult(s, 7, 0, 0, 0, 0) @site(sifr)
  }
}
class a.T extends Activity { }
'''


def test_intent_sender_unwrapped(catalog):
    (site,) = _sites(parse_app(SENDER), catalog)
    assert site.expects_result
    [(t, iv)] = site.resolved
    assert t == "a" and iv.target_class == VSet.of("a.T")


DEEP = '''app "a"
manifest { }
class a.M extends Plain {
  method m() {
    i = new Intent
    pi = PendingIntent.getService(i, 0)
    invoke a.H.one(pi)
  }
}
class a.H extends Plain {
  method one(p) {
    invoke a.H.two(p)
  }
  method two(q) {
    call android.app.AlarmManager.set(0, 0, q) @site(deep)
  }
}
'''


def test_beyond_call_depth_is_unresolved(catalog):
    (site,) = _sites(parse_app(DEEP), catalog)
    assert site.unresolved and site.resolved == ()
    (site,) = _sites(parse_app(DEEP), catalog, AnalysisConfig(call_depth=2))
    assert not site.unresolved and [t for t, _ in site.resolved] == ["s"]


def test_non_icc_argument_is_unresolved(catalog):
    text = ('app "a" manifest {} class a.M extends Plain { method m() { x = const 3\n'
            ' call android.app.AlarmManager.set(0, 0, x) } }')
    (site,) = _sites(parse_app(text), catalog)
    assert site.unresolved


def test_two_intents_one_pending(catalog):
    text = '''app "a" manifest {} class a.M extends Plain { method m() {
      a = new Intent @site(ia)
      b = new Intent @site(ib)
      c = const 1
      if c goto L
      x = a
      goto J
      label L
      x = b
      label J
      pi = PendingIntent.getBroadcast(x, 0)
      call android.app.PendingIntent.send(pi) @site(send)
    } }'''
    (site,) = _sites(parse_app(text), catalog)
    assert [(t, iv.origin_site) for t, iv in site.resolved] == [("r", "ia"), ("r", "ib")]


@pytest.mark.parametrize("seed", range(60))
def test_completeness_and_product(seed, catalog):
    model = random_app(seed)
    prop = analyze(model)
    sites = find_aicc_sites(model, catalog, prop)
    matching = [s.site_id for _, _, _, s in model.statements()
                if s.kind is StmtKind.API_CALL and catalog.match_call(s.name, len(s.args))]
    assert [s.site_id for s in sites] == matching
    for site in sites:
        assert not (site.unresolved and site.resolved)
        if site.unresolved:
            continue
        value = prop.value_at(site.site_id, site.icc_operand.name, when="before")
        pend = pending_values(value)
        types = set().union(*(p.target_type for p in pend))
        origins = {iv.origin_site for p in pend for iv in p.wrapped_intents}
        assert len(site.resolved) == len(types) * len(origins)


def test_site_report_counts(catalog):
    text = '''app "a" manifest {} class a.M extends Plain { method m() {
      i = new Intent
      pi = PendingIntent.getBroadcast(i, 0)
      call android.app.AlarmManager.set(0, 0, pi)
      call android.app.AlarmManager.set(0, 1, pi)
      call android.app.AlarmManager.set(0, 2, pi)
      call android.telephony.SmsManager.sendTextMessage("1", 0, "x", pi, 0)
    } }'''
    rows = site_report(_sites(parse_app(text), catalog))
    assert [(r.signature.rsplit(".", 1)[-1], r.count, r.share) for r in rows] == [
        ("set", 3, 75.0), ("sendTextMessage", 1, 25.0)]
    assert rows[0].by_type == {"r": 3}


def test_site_report_empty():
    assert site_report([]) == []


def test_corpus_signatures(catalog, corpus_apps):
    sites = [s for m in corpus_apps.values() for s in _sites(m, catalog)]
    rows = site_report(sites)
    assert len(rows) == 18
    assert round(sum(r.share for r in rows), 6) == 100.0
    assert all(r.resolved_pct == 100.0 for r in rows)


def test_deterministic_order(catalog):
    model = random_app(5)
    assert _sites(model, catalog) == _sites(model, catalog)
