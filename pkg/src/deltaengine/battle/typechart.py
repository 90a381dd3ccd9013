"""Type effectiveness chart, loaded from the bundled CSV fixture.

The chart is data, not code: 18x18, row = attacking type, cell values in
{0, 0.5, 1, 2}. Multipliers are kept as integer fractions so damage stays
in exact integer arithmetic.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from importlib import resources
from typing import Dict, Sequence, Tuple

_CELL_VALUES = {"0": Fraction(0), "0.5": Fraction(1, 2), "1": Fraction(1), "2": Fraction(2)}

_chart: Dict[str, Dict[str, Fraction]] = {}
_types: Tuple[str, ...] = ()


def _load():
    global _chart, _types
    if _chart:
        return
    ref = resources.files("deltaengine.battle").joinpath("data/type_chart.csv")
    with ref.open("r", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0][1:]
    chart: Dict[str, Dict[str, Fraction]] = {}
    for row in rows[1:]:
        attacking, cells = row[0], row[1:]
        chart[attacking] = {d: _CELL_VALUES[c] for d, c in zip(header, cells)}
    _types = tuple(header)
    _chart = chart


def all_types() -> Tuple[str, ...]:
    _load()
    return _types


def is_type(name: str) -> bool:
    _load()
    return name in _chart


def type_multiplier(move_type: str, defender_types: Sequence[str]) -> Fraction:
    """Product of per-defending-type factors; one of 0, 1/4, 1/2, 1, 2, 4."""
    _load()
    if move_type not in _chart:
        raise KeyError(f"unknown move type {move_type!r}")
    mult = Fraction(1)
    for d in defender_types:
        if d not in _chart:
            raise KeyError(f"unknown defender type {d!r}")
        mult *= _chart[move_type][d]
    return mult
