"""Static revelation of atypical inter-component communication in app models.

Pipeline: parse MIR -> propagate Intent values -> find AICC sites ->
instrument with standard ICC calls -> link / taint / vulnerability analyses.
"""
from importlib import resources

__version__ = "0.1.0"


def data_text(name: str) -> str:
    """Read a text resource shipped under ``raicc/data``."""
    return resources.files(__name__).joinpath("data").joinpath(name).read_text(encoding="utf-8")
