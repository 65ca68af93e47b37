"""Dense linear algebra over any of the fields in :mod:`fields`."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

import numpy as np

from .fields import Field, PivotDegenerate, QQ
from .polynomial import DimensionError, MultiPoly, poly_gcd
from .ratfunc import RatFunc


class FieldMatrix:
    """Rectangular matrix whose entries lie in ``field``."""

    __slots__ = ("field", "rows")

    def __init__(self, field: Field, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix rows")
        self.field = field
        self.rows = [[field.convert(x) for x in r] for r in rows]

    @classmethod
    def _raw(cls, field, rows):
        m = cls.__new__(cls)
        m.field = field
        m.rows = rows
        return m

    @classmethod
    def zeros(cls, field: Field, n: int, m: int) -> "FieldMatrix":
        return cls._raw(field, [[field.zero() for _ in range(m)] for _ in range(n)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "FieldMatrix":
        out = cls.zeros(field, n, n)
        for i in range(n):
            out.rows[i][i] = field.one()
        return out

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence]) -> "FieldMatrix":
        return cls(field, [list(r) for r in zip(*cols)]) if cols else cls(field, [])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.shape[1])]

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [list(c) for c in zip(*self.rows)])

    def hstack(self, *others: "FieldMatrix") -> "FieldMatrix":
        rows = [list(r) for r in self.rows]
        for o in others:
            if o.shape[0] != self.shape[0]:
                raise DimensionError("hstack of matrices with different row counts")
            for r, s in zip(rows, o.rows):
                r.extend(s)
        return FieldMatrix._raw(self.field, rows)

    def vstack(self, *others: "FieldMatrix") -> "FieldMatrix":
        rows = [list(r) for r in self.rows]
        for o in others:
            if o.shape[1] != self.shape[1]:
                raise DimensionError("vstack of matrices with different column counts")
            rows.extend(list(r) for r in o.rows)
        return FieldMatrix._raw(self.field, rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [[self.rows[i][j] for j in cols] for i in rows])

    def map(self, fn: Callable, field: Field | None = None) -> "FieldMatrix":
        field = field or self.field
        return FieldMatrix(field, [[fn(x) for x in r] for r in self.rows])

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.field.zero()
        is_zero = self.field.is_zero
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(a, x) for a, x in enumerate(r) if not is_zero(x)]
            row = []
            for c in cols:
                s = zero
                for a, x in nz:
                    y = c[a]
                    if not is_zero(y):
                        s = s + x * y
                row.append(s)
            out.append(row)
        return FieldMatrix._raw(self.field, out)

    def apply(self, vec: Sequence) -> list:
        return [r[0] for r in (self @ FieldMatrix._raw(self.field, [[v] for v in vec])).rows]

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return FieldMatrix._raw(self.field, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in subtraction")
        return FieldMatrix._raw(self.field, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> "FieldMatrix":
        return FieldMatrix._raw(self.field, [[x * c for x in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(self.field.is_zero(x) for r in self.rows for x in r)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)

    def det(self):
        return det_fraction_free(self)

    def rank(self) -> int:
        return rref(self, track=False).rank

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix) or self.shape != other.shape:
            return False
        return (self - other).is_zero()

    def __repr__(self):
        return f"FieldMatrix({self.field!r}, {self.shape[0]}x{self.shape[1]})"


# ----------------------------------------------------------------------------
# determinants


def _bareiss(rows: list[list], is_zero, exact_div, pick) -> object:
    """Fraction-free elimination on a copy-owned square array; returns the determinant."""
    n = len(rows)
    sign = 1
    prev = None
    for k in range(n - 1):
        p = pick([rows[i][k] for i in range(k, n)])
        if p is None:
            return None
        if p:
            rows[k], rows[k + p] = rows[k + p], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            a = rows[i][k]
            ri = rows[i]
            rk = rows[k]
            for j in range(k + 1, n):
                v = pivot * ri[j]
                if not is_zero(a) and not is_zero(rk[j]):
                    v = v - a * rk[j]
                ri[j] = v if prev is None else exact_div(v, prev)
            ri[k] = rows[k][k] * 0
        prev = pivot
    d = rows[n - 1][n - 1]
    return -d if sign < 0 else d


def _pick_poly(cands):
    best, size = None, None
    for i, x in enumerate(cands):
        if not x.is_zero():
            s = len(x)
            if size is None or s < size:
                best, size = i, s
    return best


def _poly_exact_div(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero():
        return a
    return a.exact_div(b)


def det_fraction_free(m: FieldMatrix):
    """Exact determinant by fraction-free elimination (LU for complex doubles)."""
    n, k = m.shape
    if n != k:
        raise DimensionError(f"determinant of a non-square {n}x{k} matrix")
    field = m.field
    if n == 0:
        return field.one()
    if field.kind == "complex":
        return complex(np.linalg.det(m.to_numpy()))
    if field.kind == "rational":
        scale = Fraction(1)
        rows = []
        for r in m.rows:
            den = lcm(*(Fraction(x).denominator for x in r))
            scale /= den
            rows.append([int(Fraction(x) * den) for x in r])
        d = _bareiss(rows, lambda x: x == 0, lambda a, b: a // b, QQ.pivot_index)
        return Fraction(0) if d is None else Fraction(d) * scale
    if field.kind == "ratfunc":
        nv = field.nvars
        cols = m.columns()
        scale = RatFunc.constant(nv, 1)
        pcols = []
        for col in cols:
            den = MultiPoly.constant(nv, 1)
            for x in col:
                if not x.den.is_constant():
                    den = (den.exact_div(poly_gcd(den, x.den)) * x.den)
            den = den.primitive()[1]
            pcols.append([x.num * den.exact_div(x.den) if not x.is_zero() else x.num for x in col])
            scale = scale * RatFunc(MultiPoly.constant(nv, 1), den, reduced=True)
        rows = [list(r) for r in zip(*pcols)]
        # clear rational coefficients so the elimination runs on integers
        int_scale = Fraction(1)
        for i, r in enumerate(rows):
            den = lcm(*(Fraction(c).denominator for p in r for c in p.terms.values()), 1)
            if den != 1:
                rows[i] = [p.scale(den) for p in r]
                int_scale /= den
        d = _bareiss(rows, lambda x: x.is_zero(), _poly_exact_div, _pick_poly)
        if d is None or d.is_zero():
            return field.zero()
        return RatFunc(d.scale(int_scale), MultiPoly.constant(nv, 1)) * scale
    return _gauss_det(m)


def _gauss_det(m: FieldMatrix):
    field = m.field
    rows = [list(r) for r in m.rows]
    n = len(rows)
    d = field.one()
    for k in range(n):
        p = field.pivot_index([rows[i][k] for i in range(k, n)])
        if p is None:
            return field.zero()
        if p:
            rows[k], rows[k + p] = rows[k + p], rows[k]
            d = -d
        pivot = rows[k][k]
        d = d * pivot
        inv = field.one() / pivot
        for i in range(k + 1, n):
            if field.is_zero(rows[i][k]):
                continue
            f = rows[i][k] * inv
            rows[i] = rows[i][:k + 1] + [a - f * b for a, b in zip(rows[i][k + 1:], rows[k][k + 1:])]
    return d


def cofactor_det(m: FieldMatrix):
    """Laplace expansion along the first row; exponential, for small oracles only."""
    n, k = m.shape
    if n != k:
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return m.field.one()
    if n == 1:
        return m.rows[0][0]
    total = m.field.zero()
    for j in range(n):
        minor = m.submatrix(range(1, n), [c for c in range(n) if c != j])
        term = m.rows[0][j] * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# ----------------------------------------------------------------------------
# row reduction


@dataclass
class RrefResult:
    reduced: FieldMatrix
    pivots: list[int]
    transform: FieldMatrix

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def __iter__(self):
        return iter((self.reduced, self.pivots, self.transform))


def rref(m: FieldMatrix, pivot_rule: Callable | None = None, track: bool = True) -> RrefResult:
    """Gauss-Jordan elimination with transform T such that T @ m == reduced.

    ``pivot_rule(candidates)`` returns the index of the chosen pivot among the entries
    of the current column at or below the working row, or None when all are zero; it
    defaults to the field's own rule (ideal-aware for quotient fields).
    """
    field = m.field
    rule = pivot_rule or field.pivot_index
    n, k = m.shape
    rows = [list(r) for r in m.rows]
    t = [list(r) for r in FieldMatrix.identity(field, n).rows] if track else None
    pivots = []
    r = 0
    for c in range(k):
        if r == n:
            break
        cand = [rows[i][c] for i in range(r, n)]
        p = rule(cand)
        if p is None:
            if not field.exact or all(field.is_zero(x) for x in cand):
                continue
            raise PivotDegenerate(f"column {c} has no admissible pivot")
        p += r
        rows[r], rows[p] = rows[p], rows[r]
        if track:
            t[r], t[p] = t[p], t[r]
        try:
            inv = field.one() / rows[r][c]
        except ZeroDivisionError as exc:
            raise PivotDegenerate(f"pivot in column {c} is not invertible on the variety") from exc
        rows[r] = [x * inv for x in rows[r]]
        if track:
            t[r] = [x * inv for x in t[r]]
        for i in range(n):
            if i == r:
                continue
            f = rows[i][c]
            if field.is_zero(f):
                continue
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            if track:
                t[i] = [a - f * b for a, b in zip(t[i], t[r])]
            rows[i][c] = field.zero()
        pivots.append(c)
        r += 1
    if not field.exact:
        for i in range(r, n):
            rows[i] = [field.zero()] * k
    transform = FieldMatrix._raw(field, t) if track else None
    return RrefResult(FieldMatrix._raw(field, rows), pivots, transform)


def solve(m: FieldMatrix, rhs: Sequence) -> list | None:
    """One solution x of m x = rhs (free variables set to zero), or None if inconsistent."""
    n, k = m.shape
    aug = m.hstack(FieldMatrix(m.field, [[b] for b in rhs]))
    red, piv, _ = rref(aug, track=False)
    if k in piv:
        return None
    field = m.field
    x = [field.zero() for _ in range(k)]
    for i, c in enumerate(piv):
        x[c] = red.rows[i][k]
    return x


def nullspace(m: FieldMatrix) -> list[list]:
    """Basis of the kernel, one vector per free column."""
    field = m.field
    n, k = m.shape
    red, piv, _ = rref(m, track=False)
    basis = []
    for free in range(k):
        if free in piv:
            continue
        v = [field.zero() for _ in range(k)]
        v[free] = field.one()
        for i, c in enumerate(piv):
            v[c] = -red.rows[i][free]
        basis.append(v)
    return basis


def column_space_basis(vectors: Sequence[Sequence], field: Field) -> list[int]:
    """Indices of a maximal independent subset of the given vectors, chosen greedily."""
    if not vectors:
        return []
    m = FieldMatrix.from_columns(field, vectors)
    return rref(m, track=False).pivots


def rank(m: FieldMatrix) -> int:
    return rref(m, track=False).rank
