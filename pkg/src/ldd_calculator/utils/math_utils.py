from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence, Union

Number = Union[int, float, Fraction]


def horner(coeffs: Sequence[Number], z: Number) -> Number:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def lincomb(terms: Sequence[tuple[Number, Sequence[int]]], length: int) -> list[Number]:
    """Coefficientwise sum of scalar * vector; floats are summed with math.fsum."""
    exact = all(not isinstance(s, float) for s, _ in terms)
    out: list[Number] = []
    for w in range(length):
        parts = [s * v[w] for s, v in terms if w < len(v)]
        out.append(sum(parts, Fraction(0)) if exact else math.fsum(parts))
    return out


def series_divide(num: Sequence[Number], den: Sequence[Number], order: int) -> list[Number]:
    """Coefficients 0..order of num/den as a power series; den[0] must be nonzero."""
    assert den and den[0] != 0, "series denominator has zero constant term"
    out: list[Number] = []
    for i in range(order + 1):
        acc = num[i] if i < len(num) else 0
        for j in range(1, min(i, len(den) - 1) + 1):
            acc -= den[j] * out[i - j]
        out.append(Fraction(acc) / Fraction(den[0]) if not isinstance(acc, float) else acc / den[0])
    return out


def parse_number(text: str, exact: bool) -> Number:
    """'1/3', '0.001', '1e-3'; exact mode keeps decimal text exact as a Fraction."""
    text = text.strip()
    if exact:
        return Fraction(text)
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def as_exact(value: Number) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def render(value: Number) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return f"{value:.12g}"


def log_space(lo: float, hi: float, count: int) -> list[float]:
    if count == 1:
        return [lo]
    a, b = math.log10(lo), math.log10(hi)
    return [10 ** (a + (b - a) * i / (count - 1)) for i in range(count)]


def lin_space(lo: Number, hi: Number, count: int) -> list[Number]:
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
