"""Words in the Moebius generators C(z) = 1 - z, R(z) = 1/z, H_s(z) = s z and their adjoint action.

The sl2 basis is (e, h, f) with h = diag(1/2, -1/2); a traceless [[a, b], [c, -a]] has coordinates (b, 2a, c).
Letters are evaluated as GL2 matrices; the adjoint action is insensitive to scalars.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from ..errors import DomainError, ParseError
from ..gluing import ShapeVector, zeta

# shape kinds: 0 -> z, 1 -> z', 2 -> z''
KIND_SUFFIX = ("", "'", "''")


@dataclass(frozen=True)
class Letter:
    kind: str  # "C", "R" or "H"
    monomial: tuple[tuple[int, int, int], ...] = ()  # (shape kind, tet index, exponent), sorted
    power: int = 1  # +1 or -1, only meaningful for H

    def inverse(self) -> "Letter":
        return self if self.kind in "CR" else Letter("H", self.monomial, -self.power)

    def format(self) -> str:
        if self.kind != "H":
            return self.kind
        parts = []
        for q, j, e in self.monomial:
            s = f"z{KIND_SUFFIX[q]}{j + 1}"
            parts.append(s if e == 1 else f"{s}^{e}")
        body = "*".join(parts) if parts else "1"
        return f"H({body})" + ("^-1" if self.power == -1 else "")


def _norm_monomial(items) -> tuple[tuple[int, int, int], ...]:
    acc: dict[tuple[int, int], int] = {}
    for q, j, e in items:
        acc[(q, j)] = acc.get((q, j), 0) + e
    return tuple(sorted((q, j, e) for (q, j), e in acc.items() if e))


def H(*factors: tuple[int, int, int], power: int = 1) -> Letter:
    return Letter("H", _norm_monomial(factors), power)


C = Letter("C")
R = Letter("R")


@dataclass(frozen=True)
class MobiusWord:
    letters: tuple[Letter, ...] = ()

    def __add__(self, other: "MobiusWord") -> "MobiusWord":
        return MobiusWord(self.letters + other.letters)

    def inverse(self) -> "MobiusWord":
        return MobiusWord(tuple(l.inverse() for l in reversed(self.letters)))

    def reduced(self) -> "MobiusWord":
        """Free reduction: C C, R R and H(m) H(m)^-1 cancel."""
        out: list[Letter] = []
        for l in self.letters:
            if l.kind == "H" and not l.monomial:
                continue
            if out and out[-1] == l.inverse() and (l.kind != "H" or out[-1].power == -l.power):
                out.pop()
            else:
                out.append(l)
        return MobiusWord(tuple(out))

    def __len__(self):
        return len(self.letters)

    def format(self) -> str:
        return " ".join(l.format() for l in self.letters)

    def __str__(self):
        return self.format() or "Id"


_TOKEN = re.compile(r"\s*(?:(C|R)|H\(([^)]*)\)(\^-1)?|(Id))")
_FACTOR = re.compile(r"z('{0,2})(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, n_tet: int | None = None) -> MobiusWord:
    """Parse e.g. ``"H(z'1)^-1 C R H(z2)^-1 C R"`` or ``"R C H(z''1*z'2)^-1"``; an empty string is the identity."""
    pos = 0
    letters = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"cannot parse Moebius word {text!r}", pos)
        if m.group(1):
            letters.append(Letter(m.group(1)))
        elif m.group(2) is not None:
            factors = []
            for part in m.group(2).split("*"):
                part = part.strip()
                if part == "1":
                    continue
                fm = _FACTOR.match(part)
                if not fm:
                    raise ParseError(f"bad monomial factor {part!r}", m.start(2))
                q = len(fm.group(1))
                j = int(fm.group(2)) - 1
                if j < 0 or (n_tet is not None and j >= n_tet):
                    raise ParseError(f"shape index out of range in {part!r}", m.start(2))
                factors.append((q, j, int(fm.group(3) or 1)))
            letters.append(H(*factors, power=-1 if m.group(3) else 1))
        pos = m.end()
    return MobiusWord(tuple(letters))


# ----------------------------------------------------------------------------
# evaluation


def _one_like(z: ShapeVector):
    from ..exact_algebra import RatFunc
    return RatFunc.constant(len(z), 1) if z.symbolic else 1 + 0j


def monomial_value(mono, z: ShapeVector):
    out = _one_like(z)
    for q, j, e in mono:
        v = z.triple(q)[j]
        out = out * v ** e
    return out


def dlog_monomial(mono, j: int, z: ShapeVector):
    """d/dz_j log of the monomial: the zeta functions weighted by exponents."""
    zt = zeta(z)
    out = _one_like(z) * 0
    for q, t, e in mono:
        if t == j:
            out = out + zt.triple(q)[t] * e
    return out


def letter_matrix(l: Letter, z: ShapeVector):
    one = _one_like(z)
    zero = one * 0
    if l.kind == "C":
        return [[-one, one], [zero, one]]
    if l.kind == "R":
        return [[zero, one], [one, zero]]
    m = monomial_value(l.monomial, z)
    if m == 0:
        raise DomainError("H letter evaluates to zero")
    return [[m, zero], [zero, one]] if l.power == 1 else [[one, zero], [zero, m]]


def mat2_mul(a, b):
    return [[a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]]]


def mat2_inv(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]


def mat2_identity(z: ShapeVector):
    one = _one_like(z)
    return [[one, one * 0], [one * 0, one]]


def word_matrix(w: MobiusWord, z: ShapeVector):
    out = mat2_identity(z)
    for l in w.letters:
        out = mat2_mul(out, letter_matrix(l, z))
    return out


def ad_matrix(m) -> list[list]:
    """3x3 matrix of X -> m X m^-1 in the basis (e, h, f)."""
    p, q = m[0]
    r, s = m[1]
    det = p * s - q * r
    if det == 0:
        raise DomainError("singular Moebius matrix")
    cols = [(p * p, -2 * p * r, -r * r), (-p * q, p * s + q * r, r * s), (-q * q, 2 * q * s, s * s)]
    return [[cols[j][i] / det for j in range(3)] for i in range(3)]


def ad_of_word(w: MobiusWord, z: ShapeVector) -> list[list]:
    return ad_matrix(word_matrix(w, z))


def traceless_coords(x) -> list:
    """(e, h, f) coordinates of the traceless part of a 2x2 matrix."""
    a = (x[0][0] - x[1][1]) / 2
    return [x[0][1], 2 * a, x[1][0]]


def coords_to_matrix(v):
    b, h2, c = v
    return [[h2 / 2, b], [c, -h2 / 2]]


def weil_cocycle(w: MobiusWord, j: int, z: ShapeVector) -> list:
    """(d/dz_j W) W^-1 in (e, h, f) coordinates, by the product rule over the letters."""
    prefix = mat2_identity(z)
    out = [_one_like(z) * 0] * 3
    for l in w.letters:
        if l.kind == "H":
            c = dlog_monomial(l.monomial, j, z)
            if c != 0:
                ad = ad_matrix(prefix)
                c = c * l.power
                out = [out[i] + ad[i][1] * c for i in range(3)]
        prefix = mat2_mul(prefix, letter_matrix(l, z))
    return out


def mat3_apply(m, v):
    return [sum((m[i][k] * v[k] for k in range(3)), m[i][0] * 0) for i in range(3)]


def mat3_mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(3)), a[i][0] * 0) for j in range(3)] for i in range(3)]


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


# ----------------------------------------------------------------------------
# chart maps for the automatic development

# S3 acting on (inf, 0, 1), as words and as images of (inf, 0, 1)
INF, ZERO, ONE, SHAPE = "inf", "0", "1", "z"
_S3 = {
    (): (INF, ZERO, ONE),
    ("C",): (INF, ONE, ZERO),
    ("R",): (ZERO, INF, ONE),
    ("C", "R"): (ONE, INF, ZERO),
    ("R", "C"): (ZERO, ONE, INF),
    ("C", "R", "C"): (ONE, ZERO, INF),
}
# image of the point z under each S3 element, as a monomial in (kind, exponent)
_S3_SHAPE = {(): (0, 1), ("C",): (1, -1), ("R",): (0, -1), ("C", "R"): (2, 1), ("R", "C"): (1, 1),
             ("C", "R", "C"): (2, -1)}


def _s3_word(names: Sequence[str]) -> MobiusWord:
    return MobiusWord(tuple(Letter(n) for n in names))


def _s3_apply(names, point):
    imgs = _S3[tuple(names)]
    return imgs[(INF, ZERO, ONE).index(point)]


def chart_word(points: Sequence[str], tet: int) -> MobiusWord:
    """Word of the Moebius map sending (inf, 0, 1) to ``points``, three distinct labels among
    inf, 0, 1 and the shape z of tetrahedron ``tet``."""
    points = tuple(points)
    if len(set(points)) != 3:
        raise ValueError("chart points must be distinct")
    if SHAPE not in points:
        for names, imgs in _S3.items():
            if imgs == points:
                return _s3_word(names)
        raise AssertionError("unreachable")
    missing = next(p for p in (INF, ZERO, ONE) if p not in points)
    # sigma moves the missing point to 1, so the other two land on {inf, 0}
    sigma = min((n for n in _S3 if _s3_apply(n, missing) == ONE), key=len)
    q, e = _S3_SHAPE[sigma]
    # H(s) tau sends (inf, 0, 1) to sigma(points); tau sends (inf, 0, 1) to H(s)^-1 sigma(points)
    moved = [SHAPE if p == SHAPE else _s3_apply(sigma, p) for p in points]
    pre = [ONE if p == SHAPE else p for p in moved]
    tau = next(n for n, imgs in _S3.items() if imgs == tuple(pre))
    return (_s3_word(sigma).inverse() + MobiusWord((H((q, tet, e)),)) + _s3_word(tau)).reduced()
