from __future__ import annotations

import pytest

from raicc.catalog import (
    AiccCatalog, CatalogError, IccObjectKind, api_level_histogram, default_catalog, load_catalog, lookup,
    parse_entry,
)


def test_alarm_set_entry(catalog):
    entry = lookup(catalog, "android.app.AlarmManager.set", 3)
    assert entry is not None
    assert entry.icc_object_kind is IccObjectKind.PENDING_INTENT
    assert entry.icc_position == 2
    assert not entry.on_receiver


def test_start_intent_sender_for_result(catalog):
    entry = lookup(catalog, "android.app.Activity.startIntentSenderForResult", 6)
    assert entry.icc_object_kind is IccObjectKind.INTENT_SENDER
    assert entry.expects_result


def test_send_on_receiver(catalog):
    entry = lookup(catalog, "android.app.PendingIntent.send", 0)
    assert entry.on_receiver
    assert entry.call_operand_index() == 0
    assert entry.operand_count() == 1


def test_non_aicc_lookup(catalog):
    assert lookup(catalog, "java.lang.String.concat", 1) is None
    assert lookup(catalog, "android.app.AlarmManager.set", 2) is None


def test_match_call_counts_receiver(catalog):
    assert catalog.match_call("android.app.PendingIntent.send", 1).arity == 0
    assert catalog.match_call("android.app.AlarmManager.set", 3).arity == 3
    assert catalog.match_call("android.app.AlarmManager.set", 4) is None


def test_empty_catalog():
    cat = load_catalog("")
    assert len(cat) == 0
    assert api_level_histogram(cat) == {}


def test_single_entry_histogram():
    cat = load_catalog("a.B.c | 1 | PendingIntent | param:0 | noresult | added:5\n")
    assert api_level_histogram(cat) == {5: 1}


def test_histogram_sums_to_size(catalog):
    assert sum(api_level_histogram(catalog).values()) == len(catalog)


def test_lookup_is_pure(catalog):
    assert lookup(catalog, "android.app.AlarmManager.set", 3) is lookup(catalog, "android.app.AlarmManager.set", 3)


@pytest.mark.parametrize("line, message", [
    ("a.B.c | 1 | PendingIntent | param:1 | noresult | added:1", "out of range"),
    ("a.B.c | 1 | PendingIntent | param:0 | noresult | added:5 | removed:5", "removed"),
    ("a.B.c | x | PendingIntent | param:0 | noresult | added:1", "arity"),
    ("a.B.c | 1 | Bundle | param:0 | noresult | added:1", "kind"),
    ("a.B.c | 1 | PendingIntent | param:0 | maybe | added:1", "result"),
    ("a.B.c | 1 | PendingIntent | param:0", "fields"),
])
def test_bad_entries(line, message):
    with pytest.raises(CatalogError, match=message):
        parse_entry(line, 3)


def test_duplicate_signature_reports_line():
    text = ("# header\n"
            "a.B.c | 1 | PendingIntent | param:0 | noresult | added:1\n"
            "a.B.c | 1 | PendingIntent | param:0 | noresult | added:2\n")
    with pytest.raises(CatalogError) as info:
        load_catalog(text)
    assert info.value.line == 3


def test_overloads_by_arity():
    cat = load_catalog("a.B.c | 1 | PendingIntent | param:0 | noresult | added:1\n"
                       "a.B.c | 2 | PendingIntent | param:1 | noresult | added:1\n")
    assert lookup(cat, "a.B.c", 2).icc_position == 1


def test_entry_line_round_trip(catalog):
    again = AiccCatalog(parse_entry(e.to_line()) for e in catalog)
    assert list(again) == list(catalog)


def test_default_catalog_removed_entries():
    removed = sorted(e.signature for e in default_catalog() if e.api_level_removed is not None)
    assert removed == ["android.app.Notification.setLatestEventInfo",
                       "android.telephony.gsm.SmsManager.sendMultipartTextMessage"]
