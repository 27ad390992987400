"""Composite constant propagation of ICC objects."""
from .analysis import AnalysisBudgetExceeded, PropResult, UnknownSite, analyze, signature_matches, value_at
from .values import (
    TOP, TOP_VSET, UNSET, CatSet, IntentSenderValue, IntentValue, PendingIntentValue, Refs, State,
    TaintLabel, VSet, join_values,
)

__all__ = [
    "AnalysisBudgetExceeded", "PropResult", "UnknownSite", "analyze", "signature_matches", "value_at",
    "TOP", "TOP_VSET", "UNSET", "CatSet", "IntentSenderValue", "IntentValue", "PendingIntentValue",
    "Refs", "State", "TaintLabel", "VSet", "join_values",
]
