"""The full before/after pipeline for one app model."""
from __future__ import annotations

from dataclasses import dataclass

from .catalog import AiccCatalog, default_catalog
from .coalprop import PropResult, analyze
from .config import AnalysisConfig
from .instrument import instrument
from .linker import IccLink, build_links
from .mir.model import AppModel
from .resolver import AiccSite, find_aicc_sites
from .taint import LeakReport, TaintConfig, default_taint_config, run_taint


@dataclass
class PipelineResult:
    model: AppModel
    prop: PropResult
    sites: list[AiccSite]
    instrumented: AppModel
    links_before: list[IccLink]
    links_after: list[IccLink]
    leaks_before: list[LeakReport] | None = None
    leaks_after: list[LeakReport] | None = None


def run_pipeline(model: AppModel, catalog: AiccCatalog | None = None, config: AnalysisConfig | None = None,
                 taint_config: TaintConfig | None = None, *, taint: bool = True) -> PipelineResult:
    """analyze, resolve, instrument, link (and optionally taint) before and after."""
    catalog = catalog if catalog is not None else default_catalog()
    prop = analyze(model, config)
    sites = find_aicc_sites(model, catalog, prop)
    inst = instrument(model, sites, prop)
    before = build_links(model, prop)
    after = build_links(inst, analyze(inst, config))
    result = PipelineResult(model, prop, sites, inst, before, after)
    if taint:
        tc = taint_config or default_taint_config()
        result.leaks_before = run_taint(model, before, tc, config)
        result.leaks_after = run_taint(inst, after, tc, config)
    return result
