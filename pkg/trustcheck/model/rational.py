"""Exact probability values.

All probabilities are fractions.Fraction; files carry them as integers or
"num/den" strings so that nothing passes through binary floating point.
"""

import re
from collections.abc import Iterable, Mapping
from fractions import Fraction

from ..errors import ModelError

ZERO = Fraction(0)
ONE = Fraction(1)

PROBABILITY_PATTERN = re.compile(r"^\s*\d+\s*(/\s*\d+\s*)?$")


def parse_probability(value) -> Fraction:
    """Parse an int or a "num/den" string into a Fraction in [0, 1]."""
    if isinstance(value, bool) or isinstance(value, float):
        raise ModelError(
            f"probability {value!r} must be an integer or a 'num/den' string"
        )
    if isinstance(value, Fraction):
        fraction = value
    elif isinstance(value, int):
        fraction = Fraction(value)
    elif isinstance(value, str) and PROBABILITY_PATTERN.match(value):
        try:
            fraction = Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ModelError(f"probability '{value}' has a zero denominator")
    else:
        raise ModelError(
            f"probability {value!r} must be an integer or a 'num/den' string"
        )
    if not ZERO <= fraction <= ONE:
        raise ModelError(f"probability {value!r} outside [0, 1]")
    return fraction


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_distribution(dist: Mapping) -> bool:
    return sum(dist.values(), ZERO) == ONE and all(v >= 0 for v in dist.values())


def normalize(weights: Mapping) -> dict:
    """Rescale non-negative weights to sum to one, dropping zero entries."""
    total = sum(weights.values(), ZERO)
    if total == 0:
        raise ZeroDivisionError("cannot normalize all-zero weights")
    return {k: Fraction(v) / total for k, v in weights.items() if v != 0}


def uniform(items: Iterable) -> dict:
    items = list(items)
    return {item: Fraction(1, len(items)) for item in items}


def format_distribution(dist: Mapping, key=str) -> str:
    inner = ", ".join(f"{key(k)}:{format_fraction(v)}" for k, v in dist.items())
    return "<" + inner + ">"
