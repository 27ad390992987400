"""The shipped 20-app benchmark corpus and its expected results."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..catalog import AiccCatalog, default_catalog
from ..mir import AppModel, MirError, StmtKind, parse_app


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    app_name: str
    has_leak: bool
    component_count: int
    aicc_methods_used: tuple[str, ...]
    user_interaction: bool

    def to_json(self) -> dict:
        return {"app": self.app_name, "leak": self.has_leak, "components": self.component_count,
                "aicc_methods": list(self.aicc_methods_used), "ui": self.user_interaction}


def corpus_root() -> Path:
    return Path(str(resources.files(__name__)))


def benchmark_dir() -> Path:
    return corpus_root() / "benchmark"


def expected_path() -> Path:
    return corpus_root() / "expected.json"


def load_expected(path) -> dict[str, dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read expected results {path}: {exc}") from None
    if not isinstance(data, dict):
        raise CorpusError("expected results must be a JSON object keyed by app name")
    for name, row in data.items():
        if not isinstance(row, dict) or not isinstance(row.get("leak"), bool):
            raise CorpusError(f"expected entry {name!r} needs a boolean 'leak'")
        if not isinstance(row.get("min_components", 1), int):
            raise CorpusError(f"expected entry {name!r}: 'min_components' must be an integer")
    return data


def app_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"not a directory: {directory}")
    return sorted(directory.glob("*.mir"), key=lambda p: p.name)


def app_name(path: Path) -> str:
    return path.name[: -len(".mir")]


def load_app(path: Path) -> AppModel:
    try:
        return parse_app(path.read_text(encoding="utf-8"))
    except MirError as exc:
        raise CorpusError(f"{path.name}: {exc}") from None


def aicc_methods(model: AppModel, catalog: AiccCatalog) -> tuple[str, ...]:
    found = set()
    for _, _, _, stmt in model.statements():
        if stmt.kind is StmtKind.API_CALL and not stmt.is_synthetic:
            entry = catalog.match_call(stmt.name, len(stmt.args))
            if entry is not None:
                found.add(entry.signature)
    return tuple(sorted(found))


def corpus_manifest(directory=None, expected=None, catalog: AiccCatalog | None = None) -> list[CorpusEntry]:
    """One entry per corpus app, sorted by name."""
    catalog = catalog or default_catalog()
    files = app_files(directory or benchmark_dir())
    table = load_expected(expected or expected_path())
    entries = []
    for path in files:
        name = app_name(path)
        if name not in table:
            raise CorpusError(f"{name} has no expected-results entry")
        model = load_app(path)
        row = table[name]
        entries.append(CorpusEntry(name, row["leak"], len(model.manifest.components),
                                   aicc_methods(model, catalog), bool(row.get("ui", False))))
    missing = set(table) - {e.app_name for e in entries}
    if missing:
        raise CorpusError(f"expected results name missing apps: {', '.join(sorted(missing))}")
    return entries
