"""The distinguished minus-infinity value.

``MINUS_INFINITY`` is the reported degree of a matrix whose Dieudonne
determinant vanishes (noncommutative rank below full).  It is a singleton,
not a sentinel integer: it compares below every number, absorbs addition and
subtraction of integers (so uniform cost shifts pass through), and serializes
as the string ``"-inf"``.
"""

from __future__ import annotations


class MinusInfinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    def __eq__(self, other) -> bool:
        return isinstance(other, MinusInfinity)

    def __hash__(self) -> int:
        return hash("MinusInfinity")

    def __lt__(self, other) -> bool:
        return not isinstance(other, MinusInfinity)

    def __le__(self, other) -> bool:
        return True

    def __gt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return isinstance(other, MinusInfinity)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self

    def __mul__(self, other):
        raise TypeError("cannot scale MINUS_INFINITY")

    def __reduce__(self):
        return (MinusInfinity, ())


MINUS_INFINITY = MinusInfinity()


def is_minus_infinity(value) -> bool:
    return isinstance(value, MinusInfinity)
