from __future__ import annotations

import pytest

from gen import random_app
from raicc.coalprop import CatSet, IntentValue, VSet, analyze
from raicc.instrument import instrument
from raicc.linker import (
    ICC_CALLS, IccLink, MatchKind, StatError, build_links, filter_matches, link_stats, match_intent,
)
from raicc.mir import ComponentKind, IntentFilter, parse_app
from raicc.pipeline import run_pipeline
from raicc.resolver import find_aicc_sites


def test_explicit_link(fixture_app):
    (link,) = build_links(fixture_app("explicit_icc.mir"))
    assert link.match_kind is MatchKind.EXPLICIT
    assert link.target_type is ComponentKind.ACTIVITY
    assert link.targets == ("com.luc.TargetActivity",)
    assert not link.synthetic and not link.dangling


IMPLICIT = '''app "a"
manifest {
  receiver a.R { filter { action "GO" } }
  receiver a.Q { filter { action "STOP" } }
  activity a.A { filter { action "GO" } }
}
class a.M extends Plain { method m() {
  i = new Intent
  i.setAction("GO")
  call sendBroadcast(i) @site(b)
} }
class a.R extends BroadcastReceiver { }
class a.Q extends BroadcastReceiver { }
class a.A extends Activity { }
'''


def test_implicit_by_action():
    (link,) = build_links(parse_app(IMPLICIT))
    assert link.match_kind is MatchKind.IMPLICIT
    assert link.target_type is ComponentKind.RECEIVER
    assert link.targets == ("a.R",)


def test_unknown_action_reaches_exported():
    text = IMPLICIT.replace('i.setAction("GO")', 'x = call a.B.read()\n  i.setAction(x)')
    (link,) = build_links(parse_app(text))
    assert link.targets == ("a.R", "a.Q")


def test_alarm_broadcast_before_and_after(fixture_app, catalog):
    result = run_pipeline(fixture_app("alarm_broadcast.mir"), catalog, taint=False)
    assert result.links_before == []
    (link,) = result.links_after
    assert link.synthetic and link.icc_call == "sendBroadcast"
    assert link.target_type is ComponentKind.RECEIVER
    assert link.targets == ("com.mal.AlarmListener",)


def test_no_icc_no_links():
    assert build_links(parse_app('app "a" manifest {} class a.M extends Plain { method m() { return } }')) == []


def test_dangling_explicit():
    text = ('app "a" manifest {} class a.M extends Plain { method m() { i = new Intent\n'
            ' i.setClass("a.Gone")\n call startService(i) } }')
    (link,) = build_links(parse_app(text))
    assert link.match_kind is MatchKind.EXPLICIT and link.dangling and link.targets == ()


def test_one_link_per_intent_object():
    text = '''app "a" manifest { service a.S { } service a.T { } } class a.M extends Plain { method m() {
      a = new Intent
      a.setClass("a.S")
      b = new Intent
      b.setClass("a.T")
      c = const 1
      if c goto L
      x = a
      goto J
      label L
      x = b
      label J
      call startService(x) @site(s)
    } } class a.S extends Service { } class a.T extends Service { }'''
    links = build_links(parse_app(text))
    assert [l.targets for l in links] == [("a.S",), ("a.T",)]


def _iv(action=None, cats=(), scheme=None):
    cs = CatSet()
    for c in cats:
        cs = cs.add(VSet.of(c))
    return IntentValue(action=VSet.of(action), categories=cs, scheme=VSet.of(scheme))


def _filt(actions, cats=(), schemes=()):
    return IntentFilter(frozenset(actions), frozenset(cats), frozenset(schemes))


@pytest.mark.parametrize("iv, filt, ok", [
    (_iv("A"), _filt(("A",)), True),
    (_iv("B"), _filt(("A",)), False),
    (_iv("A"), _filt(()), False),
    (_iv("A", ["C"]), _filt(("A",), ("C", "D")), True),
    (_iv("A", ["E"]), _filt(("A",), ("C",)), False),
    (_iv("A", scheme="sms"), _filt(("A",), (), ("sms",)), True),
    (_iv("A", scheme="tel"), _filt(("A",), (), ("sms",)), False),
    (_iv("A"), _filt(("A",), (), ("sms",)), True),
])
def test_filter_rules(iv, filt, ok):
    assert filter_matches(iv, filt) is ok


def test_match_intent_mixes_named_and_filtered():
    model = parse_app(IMPLICIT)
    iv = IntentValue(action=VSet.of("GO"), target_class=VSet.of(None, "a.Q"))
    kind, targets, dangling = match_intent(iv, model.manifest, ComponentKind.RECEIVER)
    assert kind is MatchKind.IMPLICIT and targets == ("a.R", "a.Q") and not dangling


def _link(kind, synthetic, site="s"):
    return IccLink("C", "m", site, "startActivity", synthetic, kind, (), MatchKind.EXPLICIT)


def test_link_stats_percentages():
    before = [_link(ComponentKind.ACTIVITY, False, f"s{k}") for k in range(10)]
    after = before + [_link(ComponentKind.ACTIVITY, True, f"x{k}") for k in range(5)]
    rows = {r.target_type: r for r in link_stats(before, after)}
    assert (rows["Activity"].before, rows["Activity"].added, rows["Activity"].increase) == (10, 5, 50.0)
    assert rows["Total"].increase == 50.0


def test_link_stats_zero_baseline():
    rows = {r.target_type: r for r in link_stats([], [_link(ComponentKind.SERVICE, True)])}
    assert rows["Service"].increase == "+∞"
    assert rows["BroadcastReceiver"].increase == 0.0


def test_link_stats_missing_original():
    with pytest.raises(StatError):
        link_stats([_link(ComponentKind.ACTIVITY, False)], [])


@pytest.mark.parametrize("seed", range(40))
def test_links_agree_with_call_type(seed, catalog):
    model = random_app(seed)
    prop = analyze(model)
    inst = instrument(model, find_aicc_sites(model, catalog, prop), prop)
    for link in build_links(inst):
        assert link.target_type is ICC_CALLS[link.icc_call]
        declared = {c.class_name for c in inst.manifest.components if c.kind is link.target_type}
        assert set(link.targets) <= declared
