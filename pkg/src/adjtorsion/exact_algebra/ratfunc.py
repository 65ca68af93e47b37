"""Rational functions over Q in canonical (gcd-reduced, normalised) form."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polynomial import DimensionError, MultiPoly, poly_gcd


class RatFunc:
    """num/den with gcd(num, den) = 1 and den integral primitive with positive grlex leading coefficient.

    Because the representative is canonical, ``==`` is structural equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, reduced: bool = False):
        if den is None:
            den = MultiPoly.constant(num.nvars, 1)
        if num.nvars != den.nvars:
            raise DimensionError("numerator and denominator live in different rings")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = num
            self.den = MultiPoly.constant(num.nvars, 1)
            return
        if not reduced and not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        c, den = den.primitive()
        self.num = num.scale(1 / c) if c != 1 else num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls(p, reduced=True)

    @classmethod
    def constant(cls, nvars: int, c) -> "RatFunc":
        c = Fraction(c)
        return cls(MultiPoly.constant(nvars, c), reduced=True)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "RatFunc":
        return cls(MultiPoly.variable(nvars, i), reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.nvars != self.nvars:
                raise DimensionError("rational functions in different rings")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other, reduced=True)
        if isinstance(other, (int, Fraction)):
            return RatFunc.constant(self.nvars, other)
        raise TypeError(f"cannot combine RatFunc with {type(other).__name__}")

    def __add__(self, other):
        if not isinstance(other, (RatFunc, MultiPoly, int, Fraction)):
            return NotImplemented
        o = self._coerce(other)
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if self.den.is_constant():
            return RatFunc(self.num * o.den + o.num.scale(self.den.constant_value()), o.den * self.den)
        if o.den.is_constant():
            return RatFunc(self.num.scale(o.den.constant_value()) + o.num * self.den, self.den * o.den)
        g = poly_gcd(self.den, o.den)
        a = self.den.exact_div(g)
        b = o.den.exact_div(g)
        return RatFunc(self.num * b + o.num * a, a * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        if not isinstance(other, (RatFunc, MultiPoly, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatFunc(self.num.scale(other), self.den, reduced=True) if other else RatFunc.constant(self.nvars, 0)
        if not isinstance(other, (RatFunc, MultiPoly)):
            return NotImplemented
        o = self._coerce(other)
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc.constant(self.nvars, 0)
        # cross-cancel before multiplying keeps the operands small
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1 = self.num.exact_div(g1) if not g1.is_constant() else self.num
        d2 = o.den.exact_div(g1) if not g1.is_constant() else o.den
        n2 = o.num.exact_div(g2) if not g2.is_constant() else o.num
        d1 = self.den.exact_div(g2) if not g2.is_constant() else self.den
        return RatFunc(n1 * n2, d1 * d2, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFunc(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return RatFunc(self.num.scale(Fraction(1) / Fraction(other)), self.den, reduced=True)
        if not isinstance(other, (RatFunc, MultiPoly)):
            return NotImplemented
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k, reduced=True)

    def __eq__(self, other):
        if isinstance(other, (RatFunc, MultiPoly, int, Fraction)):
            o = self._coerce(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def diff(self, i: int) -> "RatFunc":
        return RatFunc(self.num.diff(i) * self.den - self.num * self.den.diff(i), self.den * self.den)

    def evaluate(self, values: Sequence):
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.num.evaluate(values) / d

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, nvars: int, data: dict) -> "RatFunc":
        return cls(MultiPoly.from_json(nvars, data["num"]), MultiPoly.from_json(nvars, data["den"]))

    def format(self, names=None) -> str:
        if self.den.is_constant() and self.den.constant_value() == 1:
            return self.num.format(names)
        return f"({self.num.format(names)})/({self.den.format(names)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RatFunc({self.format()!r})"
