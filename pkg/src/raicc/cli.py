"""Command-line driver."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .bench import run_bench
from .catalog import CatalogError, api_level_histogram, default_catalog, load_catalog
from .coalprop import AnalysisBudgetExceeded, analyze
from .config import ConfigError, load_config, parse_pairs
from .corpus import CorpusError, app_files, app_name, load_app
from .instrument import StaleSites, instrument
from .linker import StatError, build_links, link_stats
from .mir import MirError, read_app, serialize_app
from .pipeline import run_pipeline
from .report import render_table, to_csv, to_json
from .resolver import find_aicc_sites, site_report
from .stats import count_usage, default_library_prefixes, summarize
from .taint import TaintConfigError, default_taint_config, load_taint_config, run_taint
from .vulnscan import compare_summary, scan

INPUT_ERRORS = (MirError, CatalogError, ConfigError, CorpusError, TaintConfigError, StaleSites, StatError, OSError)


class Ctx:
    def __init__(self, catalog, config, fmt):
        self.catalog = catalog
        self.config = config
        self.fmt = fmt


def _fail(kind: str, exc: Exception, code: int):
    diag = {"error": kind, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            diag[attr] = getattr(exc, attr)
    click.echo(json.dumps(diag, ensure_ascii=False), err=True)
    sys.exit(code)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except AnalysisBudgetExceeded as exc:
            _fail("AnalysisBudgetExceeded", exc, 3)
        except INPUT_ERRORS as exc:
            _fail(type(exc).__name__, exc, 2)


def _emit(ctx: Ctx, payload, headers=None, rows=None):
    if ctx.fmt == "table" and headers is not None:
        click.echo(render_table(headers, rows), nl=False)
    else:
        click.echo(to_json(payload), nl=False)


def _out_dir(out):
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="raicc")
@click.option("--catalog", "catalog_path", type=click.Path(dir_okay=False), help="AICC catalog file (default: shipped).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), envvar="RAICC_CONFIG",
              help="key=value analysis config file (also $RAICC_CONFIG).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Override one config key.")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json", show_default=True)
@click.pass_context
def main(ctx, catalog_path, config_path, overrides, fmt):
    """Reveal atypical inter-component communication in MIR app models."""
    # errors here happen before a subcommand runs, so handle them locally
    try:
        catalog = default_catalog()
        if catalog_path:
            with open(catalog_path, encoding="utf-8") as fh:
                catalog = load_catalog(fh.read())
        config = load_config(config_path, parse_pairs("\n".join(overrides)) if overrides else None)
    except INPUT_ERRORS as exc:
        _fail(type(exc).__name__, exc, 2)
    ctx.obj = Ctx(catalog, config, fmt)


APP = click.argument("app", type=click.Path(dir_okay=False))


@main.command()
@APP
@click.pass_obj
def check(ctx: Ctx, app):
    """Parse and validate an app model."""
    model = read_app(app)
    payload = {"app": model.package_name, "status": "ok", "components": len(model.manifest.components),
               "classes": len(model.classes), "statements": model.statement_count()}
    _emit(ctx, payload, ["app", "status", "components", "classes", "statements"], [list(payload.values())])


@main.command("analyze")
@APP
@click.pass_obj
def analyze_cmd(ctx: Ctx, app):
    """Report the AICC sites of an app and what they launch."""
    model = read_app(app)
    sites = find_aicc_sites(model, ctx.catalog, analyze(model, ctx.config))
    rows = site_report(sites)
    payload = {"app": model.package_name, "sites": [s.to_json() for s in sites], "report": rows}
    _emit(ctx, payload, ["signature", "count", "share %", "resolved %", "types"],
          [[r.signature, r.count, r.share, r.resolved_pct, r.by_type] for r in rows])


def _sibling(app: str) -> Path:
    path = Path(app)
    stem = path.name[:-4] if path.name.endswith(".mir") else path.name
    return path.with_name(stem + ".raicc.mir")


@main.command("instrument")
@APP
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file (default: <name>.raicc.mir).")
@click.pass_obj
def instrument_cmd(ctx: Ctx, app, output):
    """Insert standard ICC calls after every AICC site."""
    model = read_app(app)
    prop = analyze(model, ctx.config)
    sites = find_aicc_sites(model, ctx.catalog, prop)
    out = instrument(model, sites, prop)
    target = Path(output) if output else _sibling(app)
    _write(target, serialize_app(out))
    payload = {"written": str(target), "sites": len(sites),
               "inserted": out.statement_count() - model.statement_count(),
               "fallback_sites": sum(1 for s in sites if s.unresolved)}
    _emit(ctx, payload, list(payload), [list(payload.values())])


LINK_HEADERS = ["site", "call", "synthetic", "type", "match", "targets"]


def _link_rows(links):
    return [[l.site_id, l.icc_call, l.synthetic, l.target_type.value, l.match_kind.value, list(l.targets) or "-"]
            for l in links]


@main.command()
@APP
@click.option("--compare", is_flag=True, help="Compare links before and after instrumentation.")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for links.json, stats.json/.csv, links.png.")
@click.pass_obj
def links(ctx: Ctx, app, compare, out):
    """Build the ICC link model."""
    model = read_app(app)
    if not compare:
        found = build_links(model, analyze(model, ctx.config))
        payload = [l.to_json() for l in found]
        _emit(ctx, payload, LINK_HEADERS, _link_rows(found))
        if out:
            _write(_out_dir(out) / "links.json", to_json(payload))
        return
    res = run_pipeline(model, ctx.catalog, ctx.config, taint=False)
    rows = link_stats(res.links_before, res.links_after)
    payload = {"before": [l.to_json() for l in res.links_before], "after": [l.to_json() for l in res.links_after],
               "stats": rows}
    headers = ["type", "before", "added", "increase %"]
    table = [[r.target_type, r.before, r.added, r.increase] for r in rows]
    _emit(ctx, payload, headers, table)
    d = _out_dir(out)
    if d:
        from .plotting import link_bars
        _write(d / "links.json", to_json({"before": payload["before"], "after": payload["after"]}))
        _write(d / "stats.json", to_json(rows))
        _write(d / "stats.csv", to_csv(headers, table))
        link_bars(d / "links.png", rows[:-1])


LEAK_HEADERS = ["source", "sink", "components", "crosses ICC", "via synthetic"]


@main.command()
@APP
@click.option("--raicc", "use_raicc", is_flag=True, help="Instrument before running the taint analysis.")
@click.option("--config", "taint_path", type=click.Path(dir_okay=False), help="Taint source/sink file.")
@click.pass_obj
def taint(ctx: Ctx, app, use_raicc, taint_path):
    """Detect source-to-sink flows across ICC links."""
    model = read_app(app)
    tc = load_taint_config(taint_path) if taint_path else default_taint_config()
    if use_raicc:
        res = run_pipeline(model, ctx.catalog, ctx.config, tc, taint=False)
        model, found_links = res.instrumented, res.links_after
    else:
        found_links = build_links(model, analyze(model, ctx.config))
    leaks = run_taint(model, found_links, tc, ctx.config)
    _emit(ctx, [l.to_json() for l in leaks], LEAK_HEADERS,
          [[l.source_site, l.sink_site, [c for c, _ in l.path], l.crosses_icc, l.via_synthetic] for l in leaks])


@main.command()
@APP
@click.option("--compare", is_flag=True, help="Scan before and after instrumentation.")
@click.pass_obj
def vulns(ctx: Ctx, app, compare):
    """Scan for interceptable intents and exposed components."""
    model = read_app(app)
    headers = ["kind", "where", "via synthetic", "detail"]
    rows = lambda fs: [[f.kind.value, f.site_or_component, f.via_synthetic, f.detail] for f in fs]  # noqa: E731
    if not compare:
        found = scan(model, build_links(model, analyze(model, ctx.config)))
        _emit(ctx, [f.to_json() for f in found], headers, rows(found))
        return
    res = run_pipeline(model, ctx.catalog, ctx.config, taint=False)
    before = scan(model, res.links_before)
    after = scan(res.instrumented, res.links_after)
    summary = compare_summary(before, after)
    payload = {"before": [f.to_json() for f in before], "after": [f.to_json() for f in after], "summary": summary}
    _emit(ctx, payload, ["before", "after", "increase %"],
          [[summary["before_count"], summary["after_count"], summary["increase_pct"]]])


@main.command()
@click.argument("directory", type=click.Path(file_okay=False))
@click.option("--exclude-prefix", "prefixes", multiple=True, help="Class-name prefix counted as library code.")
@click.option("--no-default-excludes", is_flag=True, help="Do not apply the shipped library prefix list.")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for stats.json, methods.csv, methods.png.")
@click.pass_obj
def stats(ctx: Ctx, directory, prefixes, no_default_excludes, out):
    """Count AICC calls over a directory of app models."""
    excluded = tuple(prefixes) + (() if no_default_excludes else default_library_prefixes())
    usages = [count_usage(app_name(p), load_app(p), ctx.catalog, excluded) for p in app_files(directory)]
    result = summarize(usages)
    headers = ["signature", "count", "share %", "apps"]
    table = [[r.signature, r.count, r.share_pct, r.apps] for r in result.methods]
    _emit(ctx, result, headers, table)
    d = _out_dir(out)
    if d:
        from .plotting import ranked_bars
        _write(d / "stats.json", to_json(result))
        _write(d / "methods.csv", to_csv(headers, table))
        ranked_bars(d / "methods.png", [r.signature for r in result.methods], [r.count for r in result.methods],
                    "AICC method usage in developer code", "calls")


@main.command()
@click.argument("corpus", type=click.Path(file_okay=False))
@click.argument("expected", type=click.Path(dir_okay=False))
@click.option("--taint-config", type=click.Path(dir_okay=False), help="Taint source/sink file.")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for bench.json, bench.csv, bench.png.")
@click.pass_obj
def bench(ctx: Ctx, corpus, expected, taint_config, out):
    """Score leak detection on a benchmark corpus before and after instrumentation."""
    tc = load_taint_config(taint_config) if taint_config else None
    result = run_bench(corpus, expected, ctx.catalog, ctx.config, tc)
    headers = ["column", "TP", "FP", "FN", "precision", "recall", "F1"]
    table = [[name, s.tp, s.fp, s.fn, s.precision, s.recall, s.f1]
             for name, s in (("before", result.before), ("after", result.after))]
    _emit(ctx, result, headers, table)
    d = _out_dir(out)
    if d:
        from .plotting import score_bars
        _write(d / "bench.json", to_json(result))
        app_headers = ["app", "expected_leak", "before", "after", "synthetic_links", "path_components"]
        app_rows = [[a.app, a.expected_leak, a.verdict(a.leaks_before > 0), a.verdict(a.leaks_after > 0),
                     a.synthetic_links, a.path_components] for a in result.apps]
        _write(d / "bench.csv", to_csv(headers, table))
        _write(d / "apps.csv", to_csv(app_headers, app_rows))
        score_bars(d / "bench.png", result.before, result.after)


@main.command("catalog")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for levels.json, levels.csv, levels.png.")
@click.pass_obj
def catalog_cmd(ctx: Ctx, out):
    """Summarize the AICC catalog by API level of introduction."""
    hist = api_level_histogram(ctx.catalog)
    payload = {"entries": len(ctx.catalog), "removed": sum(1 for e in ctx.catalog if e.api_level_removed),
               "histogram": hist}
    table = [[level, n] for level, n in hist.items()]
    _emit(ctx, payload, ["api level", "added"], table)
    d = _out_dir(out)
    if d:
        from .plotting import level_histogram
        _write(d / "levels.json", to_json(payload))
        _write(d / "levels.csv", to_csv(["api_level", "added"], table))
        level_histogram(d / "levels.png", hist)


if __name__ == "__main__":  # pragma: no cover
    main()
