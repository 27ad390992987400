"""ICC vulnerability findings: interceptable intents and exposed components."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .linker import IccLink, MatchKind
from .mir.model import AppModel


class VulnKind(str, Enum):
    INTERCEPTABLE_INTENT = "InterceptableIntent"
    EXPOSED_COMPONENT = "ExposedComponent"


@dataclass(frozen=True)
class VulnFinding:
    kind: VulnKind
    site_or_component: str
    detail: str
    via_synthetic: bool = False

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "where": self.site_or_component,
                "detail": self.detail, "via_synthetic": self.via_synthetic}


def scan(model: AppModel, links: list[IccLink]) -> list[VulnFinding]:
    findings = []
    for link in links:
        if link.match_kind is MatchKind.IMPLICIT:
            detail = f"implicit {link.icc_call} may reach {len(link.targets)} declared component(s)"
        elif not link.targets:
            detail = f"explicit {link.icc_call} names an undeclared component"
        else:
            continue
        findings.append(VulnFinding(VulnKind.INTERCEPTABLE_INTENT, link.site_id, detail, link.synthetic))
    for comp in model.manifest.components:
        if comp.exported and comp.filters:
            detail = f"exported {comp.kind.value} with {len(comp.filters)} intent filter(s)"
            findings.append(VulnFinding(VulnKind.EXPOSED_COMPONENT, comp.class_name, detail))
    return findings


def compare_summary(before: list[VulnFinding], after: list[VulnFinding]) -> dict:
    b, a = len(before), len(after)
    if b:
        increase = round(100.0 * (a - b) / b, 4)
    else:
        increase = "+∞" if a else 0.0
    return {"before_count": b, "after_count": a, "increase_pct": increase}
