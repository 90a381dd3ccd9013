"""Damage arithmetic. Level is fixed at 50; everything is integer math
with a floor after each multiplier, so results are exactly reproducible.
"""

from __future__ import annotations

from fractions import Fraction

STAGE_MIN, STAGE_MAX = -6, 6


def clamp_stage(value: int) -> int:
    return max(STAGE_MIN, min(STAGE_MAX, value))


def stage_adjusted(stat: int, stage: int) -> int:
    """(2+s)/2 for s >= 0, 2/(2-s) for s < 0, floored."""
    if stage >= 0:
        return (stat * (2 + stage)) // 2
    return (stat * 2) // (2 - stage)


def damage_amount(power: int, attack: int, defense: int, stab: bool, mult: Fraction) -> int:
    """Closed-form damage for already stage-adjusted attack/defense.

    Zero type multiplier means immune: exactly 0. Zero power contributes
    no base damage. Anything else lands for at least 1.
    """
    if mult == 0:
        return 0
    if power <= 0:
        value = 0
    else:
        base = (2 * 50) // 5 + 2
        mid = (base * power * attack) // max(1, defense)
        value = mid // 50 + 2
    if stab:
        value = (value * 3) // 2
    value = (value * mult.numerator) // mult.denominator
    return max(1, value)
