"""Coefficient fields for the generic linear algebra.

Elements of every field support ``+ - * /`` directly; the field object supplies
constants, conversion, the zero test and the pivot rule used by elimination.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polynomial import MultiPoly, PrincipalIdeal
from .ratfunc import RatFunc


class PivotDegenerate(ArithmeticError):
    """No admissible pivot although the column is not identically zero."""


class Field:
    kind = "abstract"
    exact = True

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def convert(self, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        raise NotImplementedError

    def pivot_index(self, candidates: Sequence) -> int | None:
        """Index of the pivot among candidate entries, or None if all vanish."""
        for i, x in enumerate(candidates):
            if not self.is_zero(x):
                return i
        return None


class RationalField(Field):
    kind = "rational"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def convert(self, x):
        return Fraction(x)

    def is_zero(self, x):
        return x == 0

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class ComplexField(Field):
    """Double-precision complex numbers; partial pivoting by magnitude."""

    kind = "complex"
    exact = False

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def convert(self, x):
        if isinstance(x, RatFunc):
            raise TypeError("evaluate symbolic entries before converting to complex")
        return complex(x)

    def is_zero(self, x):
        return abs(x) <= self.tol

    def pivot_index(self, candidates):
        best, best_abs = None, self.tol
        for i, x in enumerate(candidates):
            if abs(x) > best_abs:
                best, best_abs = i, abs(x)
        return best

    def __repr__(self):
        return f"CC(tol={self.tol})"


CC = ComplexField()


class RatFuncField(Field):
    """Q(x_1, ..., x_n)."""

    kind = "ratfunc"

    def __init__(self, nvars: int):
        self.nvars = nvars

    def zero(self):
        return RatFunc.constant(self.nvars, 0)

    def one(self):
        return RatFunc.constant(self.nvars, 1)

    def convert(self, x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, MultiPoly):
            return RatFunc.from_poly(x)
        return RatFunc.constant(self.nvars, x)

    def gen(self, i: int) -> RatFunc:
        return RatFunc.variable(self.nvars, i)

    def is_zero(self, x):
        return x.is_zero()

    def pivot_index(self, candidates):
        # smallest non-zero entry keeps fraction growth down
        best, size = None, None
        for i, x in enumerate(candidates):
            if not x.is_zero():
                s = len(x.num) + len(x.den)
                if size is None or s < size:
                    best, size = i, s
        return best

    def __eq__(self, other):
        return isinstance(other, RatFuncField) and other.nvars == self.nvars

    def __hash__(self):
        return hash(("ratfunc", self.nvars))

    def __repr__(self):
        return f"QQ({self.nvars} vars)"


class QuotElt:
    """Element of the fraction field of Q[x]/(g): a polynomial in the main variable of degree < deg g,
    with coefficients in the rational function field of the remaining variables."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "QuotientField", coeffs: Sequence[RatFunc]):
        self.field = field
        self.coeffs = tuple(coeffs)

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def _coerce(self, other) -> "QuotElt":
        if isinstance(other, QuotElt):
            return other
        return self.field.convert(other)

    def __add__(self, other):
        o = self._coerce(other)
        return QuotElt(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return QuotElt(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        return QuotElt(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuotElt(self.field, self.field._reduce(_upoly_mul(self.coeffs, o.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "QuotElt":
        return QuotElt(self.field, self.field._invert(self.coeffs))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (QuotElt, RatFunc, MultiPoly, int, Fraction)):
            return (self - self._coerce(other)).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def to_ratfunc(self) -> RatFunc:
        """The canonical representative sum c_k x^k as a rational function in all variables."""
        x = RatFunc.variable(self.field.nvars, self.field.main)
        total = RatFunc.constant(self.field.nvars, 0)
        power = RatFunc.constant(self.field.nvars, 1)
        for c in self.coeffs:
            if not c.is_zero():
                total = total + c * power
            power = power * x
        return total

    def evaluate(self, values):
        return self.to_ratfunc().evaluate(values)

    def __repr__(self):
        return f"QuotElt({self.to_ratfunc().format()!r})"


def _upoly_mul(a, b):
    if not a or not b:
        return []
    zero = a[0] * 0
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _upoly_trim(a):
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def _upoly_divmod(a, b):
    a = _upoly_trim(a)
    b = _upoly_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    zero = b[0] * 0
    q = [zero] * max(len(a) - len(b) + 1, 0)
    lc_inv = b[-1].inverse()
    while a and len(a) >= len(b):
        k = len(a) - len(b)
        t = a[-1] * lc_inv
        q[k] = t
        for i, y in enumerate(b):
            a[k + i] = a[k + i] - t * y
        a = _upoly_trim(a)
    return q, a


class QuotientField(Field):
    """Fraction field of Q[x_1..x_n]/(g) for an irreducible (or at least square-free) generator g.

    Realised as K[x_m]/(g) with K = Q(other variables) and x_m a variable of smallest positive degree in g.
    An element is zero exactly when the numerator of any representative lies in the ideal (g),
    so the zero test is the ideal-aware test required for pivoting on the variety.
    """

    kind = "quotient"

    def __init__(self, ideal: PrincipalIdeal, main: int | None = None):
        self.ideal = ideal
        g = ideal.generator
        self.nvars = g.nvars
        degs = [(g.degree_in(i), -i) for i in range(self.nvars) if g.degree_in(i) > 0]
        if not degs:
            raise ValueError("generator must involve at least one variable")
        self.main = -min(degs)[1] if main is None else main
        self.degree = g.degree_in(self.main)
        parts = g.coefficients_in(self.main)
        zero = RatFunc.constant(self.nvars, 0)
        self._g = [RatFunc.from_poly(parts[k]) if k in parts else zero for k in range(self.degree + 1)]
        self._lc_inv = self._g[-1].inverse()

    def zero(self):
        return QuotElt(self, [RatFunc.constant(self.nvars, 0)] * self.degree)

    def one(self):
        return self.convert(1)

    def _reduce(self, coeffs):
        coeffs = list(coeffs)
        d = self.degree
        while len(coeffs) > d:
            top = coeffs.pop()
            if top.is_zero():
                continue
            t = top * self._lc_inv
            k = len(coeffs) - d
            for i in range(d):
                if not self._g[i].is_zero():
                    coeffs[k + i] = coeffs[k + i] - t * self._g[i]
        zero = RatFunc.constant(self.nvars, 0)
        coeffs += [zero] * (d - len(coeffs))
        return coeffs

    def _invert(self, coeffs):
        # extended Euclid in K[x_m]: s*a + t*g = 1
        a = _upoly_trim(coeffs)
        if not a:
            raise ZeroDivisionError("inverse of zero in the quotient field")
        zero = RatFunc.constant(self.nvars, 0)
        one = RatFunc.constant(self.nvars, 1)
        r0, r1 = list(self._g), a
        s0, s1 = [zero], [one]
        while len(_upoly_trim(r1)) > 1:
            q, r = _upoly_divmod(r0, r1)
            s2 = _upoly_sub(s0, _upoly_mul(q, s1))
            r0, r1 = r1, r
            s0, s1 = s1, s2
            if not r1:
                raise PivotDegenerate("element is a zero divisor modulo the gluing ideal")
        r1 = _upoly_trim(r1)
        if not r1:
            raise PivotDegenerate("element is a zero divisor modulo the gluing ideal")
        c = r1[0].inverse()
        return self._reduce([x * c for x in s1])

    def convert(self, x) -> QuotElt:
        if isinstance(x, QuotElt):
            return x
        if isinstance(x, (int, Fraction)):
            zero = RatFunc.constant(self.nvars, 0)
            return QuotElt(self, [RatFunc.constant(self.nvars, x)] + [zero] * (self.degree - 1))
        if isinstance(x, MultiPoly):
            x = RatFunc.from_poly(x)
        if isinstance(x, RatFunc):
            num = self._from_poly(x.num)
            if x.den.is_constant():
                return QuotElt(self, [c / x.den.constant_value() for c in num])
            den = self._from_poly(x.den)
            return QuotElt(self, num) * QuotElt(self, self._invert(den))
        raise TypeError(f"cannot convert {type(x).__name__} into the quotient field")

    def _from_poly(self, p: MultiPoly):
        parts = p.coefficients_in(self.main)
        zero = RatFunc.constant(self.nvars, 0)
        top = max(parts, default=0)
        coeffs = [RatFunc.from_poly(parts[k]) if k in parts else zero for k in range(top + 1)]
        return self._reduce(coeffs)

    def is_zero(self, x):
        return x.is_zero()

    def pivot_index(self, candidates):
        best, size = None, None
        for i, x in enumerate(candidates):
            if not x.is_zero():
                s = sum(len(c.num) + len(c.den) for c in x.coeffs)
                if size is None or s < size:
                    best, size = i, s
        return best

    def __repr__(self):
        return f"Frac(QQ[...]/({self.ideal.generator.format()}))"


def _upoly_sub(a, b):
    n = max(len(a), len(b))
    zero = (a or b)[0] * 0
    a = list(a) + [zero] * (n - len(a))
    b = list(b) + [zero] * (n - len(b))
    return _upoly_trim([x - y for x, y in zip(a, b)]) or [zero]
