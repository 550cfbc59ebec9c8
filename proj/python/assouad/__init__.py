"""Assouad-type dimensions of sets and measures on the line.

Inputs are the same JSON documents the command-line tool reads, passed as
dicts (or JSON strings); results come back as dicts. Rationals are "num/den"
strings throughout.
"""

import json as _json
import os as _os
from fractions import Fraction

from ._core import (
    AssouadError,
    CalibrationError,
    DomainError,
    InconclusiveError,
    PrecisionError,
)
from . import _core

__all__ = [
    "AssouadError", "CalibrationError", "DomainError", "InconclusiveError", "PrecisionError",
    "set_dimension", "measure_dimension", "doubling_check", "build_tree", "synthesize",
    "classify", "ball_mass", "accept",
]


def _text(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def set_dimension(set_descriptor, kind="upper", depth=12, threads=1):
    return _json.loads(_core.set_dimension(_text(set_descriptor), kind, depth, threads))


def measure_dimension(measure, kind="upper", threads=1):
    return _json.loads(_core.measure_dimension(_text(measure), kind, threads))


def doubling_check(measure, threads=1):
    return _json.loads(_core.measure_dimension(_text(measure), "doubling", threads))


def build_tree(spec):
    return _json.loads(_core.build_tree(_text(spec)))


def synthesize(measure):
    """Manifest and per-node weights of an "upper" or "lower_upper" rule."""
    return _json.loads(_core.synthesize(_text(measure)))


def classify(measure, last=64):
    return _json.loads(_core.classify(_text(measure), last))


def ball_mass(measure, x, R):
    """Exact (lo, hi) enclosure of the open-ball mass, as Fractions."""
    lo, hi = _core.ball_mass(_text(measure), str(x), str(R))
    return Fraction(lo), Fraction(hi)


def accept(only=(), seed=0, fault="", fixtures="", record_runtimes=False):
    """Runs acceptance criteria; fixtures default to the copy shipped in the wheel."""
    if not fixtures:
        bundled = _os.path.join(_os.path.dirname(__file__), "fixtures")
        if _os.path.isdir(bundled):
            fixtures = bundled
    return _json.loads(_core.accept(list(only), seed, fault, fixtures, record_runtimes))
