"""Torsion of based cochain complexes over an arbitrary field, modulo sign."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import IntegrityError
from .exact_algebra import QQ, Field, FieldMatrix, det_fraction_free, rank, rref, solve


class CohomologyBasisMismatch(IntegrityError):
    pass


class ExactnessError(IntegrityError):
    pass


@dataclass
class BasedComplex:
    """0 -> C^0 -> C^1 -> ... -> C^d -> 0.

    ``differentials[i]`` is the matrix of C^i -> C^{i+1} in standard coordinates.  The distinguished
    cochain basis of C^i is the standard one unless ``cbasis[i]`` supplies basis vectors as columns.
    ``hbasis[i]`` lists cocycles representing a basis of H^i.
    """
    field: Field
    dims: list[int]
    differentials: list[FieldMatrix]
    hbasis: list[list[list]] = None
    cbasis: list[FieldMatrix | None] = None

    def __post_init__(self):
        if len(self.differentials) != len(self.dims) - 1:
            raise IntegrityError("need one differential between each pair of consecutive degrees")
        for i, d in enumerate(self.differentials):
            if d.shape != (self.dims[i + 1], self.dims[i]) and not (self.dims[i] == 0 or self.dims[i + 1] == 0):
                raise IntegrityError(f"differential {i} has shape {d.shape}, expected {(self.dims[i + 1], self.dims[i])}")
        if self.hbasis is None:
            self.hbasis = [[] for _ in self.dims]
        if self.cbasis is None:
            self.cbasis = [None for _ in self.dims]

    @classmethod
    def from_matrices(cls, field_: Field, mats: Sequence[Sequence[Sequence]], dims: Sequence[int] | None = None,
                      hbasis=None, cbasis=None) -> "BasedComplex":
        ms = [FieldMatrix(field_, m) for m in mats]
        if dims is None:
            dims = [ms[0].shape[1]] + [m.shape[0] for m in ms] if ms else [0]
        return cls(field_, list(dims), ms, hbasis, cbasis)

    @property
    def length(self) -> int:
        return len(self.dims)

    def apply(self, i: int, v: Sequence) -> list:
        """delta^i v."""
        if i < 0 or i >= len(self.differentials) or self.dims[i + 1] == 0:
            return []
        return self.differentials[i].apply(v)

    def is_complex(self) -> bool:
        for i in range(len(self.differentials) - 1):
            a, b = self.differentials[i], self.differentials[i + 1]
            if self.dims[i] and self.dims[i + 2] and self.dims[i + 1]:
                if not (b @ a).is_zero():
                    return False
        return True

    def betti(self) -> list[int]:
        ranks = [self._rank(i) for i in range(len(self.differentials))]
        return [self.dims[i] - (ranks[i] if i < len(ranks) else 0) - (ranks[i - 1] if i > 0 else 0)
                for i in range(len(self.dims))]

    def _rank(self, i: int) -> int:
        if self.dims[i] == 0 or self.dims[i + 1] == 0:
            return 0
        return rank(self.differentials[i])


@dataclass
class TorsionChoices:
    """Optional overrides of the auxiliary choices made inside ``torsion``.

    ``image_bases[i]`` is a basis of B^i = im delta^{i-1} and ``lifts[i]`` a list of preimages
    of it in C^{i-1}; ``hreps[i]`` replaces the cohomology representatives."""
    image_bases: dict = field(default_factory=dict)
    lifts: dict = field(default_factory=dict)
    hreps: dict = field(default_factory=dict)


@dataclass
class TorsionResult:
    value: object
    factors: list
    details: dict


def _default_image(cx: BasedComplex, i: int):
    """Basis of B^{i+1} from the pivot columns of delta^i, with standard vectors as lifts."""
    f = cx.field
    if cx.dims[i] == 0 or cx.dims[i + 1] == 0:
        return [], []
    piv = rref(cx.differentials[i], track=False).pivots
    basis = [cx.differentials[i].column(p) for p in piv]
    lifts = []
    for p in piv:
        e = [f.zero() for _ in range(cx.dims[i])]
        e[p] = f.one()
        lifts.append(e)
    return basis, lifts


def _is_zero_vec(f: Field, v) -> bool:
    return all(f.is_zero(x) for x in v)


def torsion_details(cx: BasedComplex, choices: TorsionChoices | None = None) -> TorsionResult:
    f = cx.field
    choices = choices or TorsionChoices()
    n = len(cx.dims)
    images: list[list] = [[] for _ in range(n + 1)]
    lifts: list[list] = [[] for _ in range(n + 1)]
    for i in range(n - 1):
        b, s = _default_image(cx, i)
        if (i + 1) in choices.image_bases:
            b = [list(map(f.convert, v)) for v in choices.image_bases[i + 1]]
            s = None
        if (i + 1) in choices.lifts:
            s = [list(map(f.convert, v)) for v in choices.lifts[i + 1]]
        if s is None:
            s = []
            for v in b:
                x = solve(cx.differentials[i], v)
                if x is None:
                    raise IntegrityError(f"supplied image vector is not a coboundary in degree {i + 1}")
                s.append(x)
        for v, w in zip(b, s):
            if not _is_zero_vec(f, [a - c for a, c in zip(cx.apply(i, w), v)]):
                raise IntegrityError(f"supplied lift does not map onto the image basis in degree {i + 1}")
        images[i + 1], lifts[i] = b, s
    value = f.one()
    factors = []
    for i in range(n):
        h = choices.hreps.get(i, cx.hbasis[i])
        h = [list(map(f.convert, v)) for v in h]
        for v in h:
            if i < n - 1 and not _is_zero_vec(f, cx.apply(i, v)):
                raise CohomologyBasisMismatch(f"cohomology representative in degree {i} is not a cocycle")
        vecs = images[i] + h + lifts[i]
        if len(vecs) != cx.dims[i]:
            raise CohomologyBasisMismatch(
                f"degree {i}: {len(h)} cohomology vectors given, {cx.dims[i] - len(images[i]) - len(lifts[i])} needed")
        if cx.dims[i] == 0:
            factors.append(f.one())
            continue
        new = FieldMatrix.from_columns(f, vecs)
        d = det_fraction_free(new)
        if f.is_zero(d):
            raise CohomologyBasisMismatch(f"degree {i}: cohomology representatives are dependent modulo coboundaries")
        if cx.cbasis[i] is not None:
            c = det_fraction_free(cx.cbasis[i])
            d = d / c
        factors.append(d)
        value = value * d if i % 2 == 0 else value / d
    return TorsionResult(value, factors, {"image_dims": [len(b) for b in images[:n]]})


def torsion(cx: BasedComplex, choices: TorsionChoices | None = None):
    """Alternating product of basis-change determinants: even degrees contribute det(new basis / c),
    odd degrees its inverse.  Defined up to sign."""
    return torsion_details(cx, choices).value


def equal_up_to_sign(field_: Field, a, b) -> bool:
    return field_.is_zero(a - b) or field_.is_zero(a + b)


# ----------------------------------------------------------------------------
# short exact sequences


def _check_exact_ses(f: Field, iota: FieldMatrix, pi: FieldMatrix, dims):
    na, nb, nc = dims
    if na and nc and not (pi @ iota).is_zero():
        raise ExactnessError("pi . iota is not zero")
    ri = rank(iota) if na else 0
    rp = rank(pi) if nc else 0
    if ri != na:
        raise ExactnessError("iota is not injective")
    if rp != nc:
        raise ExactnessError("pi is not surjective")
    if ri + rp != nb:
        raise ExactnessError("image of iota differs from kernel of pi")


def ses_torsion(field_: Field, iota, pi, a_basis, b_basis, c_basis):
    """Torsion of 0 -> A -> B -> C -> 0 with cochain bases given as lists of column vectors."""
    iota = iota if isinstance(iota, FieldMatrix) else FieldMatrix(field_, iota)
    pi = pi if isinstance(pi, FieldMatrix) else FieldMatrix(field_, pi)
    na, nb, nc = len(a_basis), len(b_basis), len(c_basis)
    _check_exact_ses(field_, iota, pi, (na, nb, nc))

    def basis(vs):
        return FieldMatrix.from_columns(field_, vs) if vs else None

    cx = BasedComplex(field_, [na, nb, nc], [iota, pi], cbasis=[basis(a_basis), basis(b_basis), basis(c_basis)])
    return torsion(cx)


def check_compatible(field_: Field, iota, pi, a_basis, b_basis, c_basis) -> bool:
    """True when the bases are compatible, i.e. the sequence has torsion +-1."""
    t = ses_torsion(field_, iota, pi, a_basis, b_basis, c_basis)
    return equal_up_to_sign(field_, t, field_.one())


# ----------------------------------------------------------------------------
# random complexes and the multiplicativity harness


def _rand_q(rng: random.Random, lo=-4, hi=4) -> Fraction:
    den = rng.choice([1, 1, 1, 2, 3])
    return Fraction(rng.randint(lo, hi), den)


def random_invertible(rng: random.Random, n: int) -> list[list[Fraction]]:
    """L D U with random unit triangular factors and a random non-zero diagonal."""
    lower = [[_rand_q(rng) if i > j else Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    upper = [[_rand_q(rng) if i < j else Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    diag = [Fraction(rng.choice([1, -1, 2, -2, 3])) for _ in range(n)]
    return [[sum(lower[i][k] * diag[k] * upper[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _mat(rows) -> FieldMatrix:
    return FieldMatrix(QQ, rows)


def _inverse(m: FieldMatrix) -> FieldMatrix:
    return rref(m).transform


def random_complex(rng: random.Random, length: int, max_dim: int, betti: Sequence[int] | None = None):
    """Random based complex over the rationals with ranks chosen at random.

    Returns the complex together with its cohomology representatives."""
    betti = list(betti) if betti is not None else [0] * length
    ranks = [0] * (length + 1)  # ranks[i] = rank of delta^{i-1}; ranks[0] = ranks[length] = 0
    for i in range(1, length):
        ranks[i] = rng.randint(0, max(0, max_dim - ranks[i - 1] - betti[i - 1]))
    dims = [ranks[i] + betti[i] + ranks[i + 1] for i in range(length)]
    dims = [max(d, 0) for d in dims]
    # normal form: C^i = B^i (+) H^i (+) S^i with delta mapping S^i onto B^{i+1}
    normal = []
    for i in range(length - 1):
        m = [[Fraction(0)] * dims[i] for _ in range(dims[i + 1])]
        for r in range(ranks[i + 1]):
            m[r][ranks[i] + betti[i] + r] = Fraction(1)
        normal.append(m)
    ps = [random_invertible(rng, d) if d else [] for d in dims]
    pinv = [_inverse(_mat(p)).rows if p else [] for p in ps]
    diffs = []
    for i in range(length - 1):
        if dims[i] and dims[i + 1]:
            diffs.append(_mat(ps[i + 1]) @ _mat(normal[i]) @ _mat(pinv[i]))
        else:
            diffs.append(FieldMatrix(QQ, [[Fraction(0)] * dims[i] for _ in range(dims[i + 1])]))
    hb = []
    for i in range(length):
        vecs = []
        for r in range(betti[i]):
            e = [Fraction(0)] * dims[i]
            e[ranks[i] + r] = Fraction(1)
            vecs.append(_mat(ps[i]).apply(e) if dims[i] else [])
        hb.append(vecs)
    return BasedComplex(QQ, dims, diffs, hb)


@dataclass
class MultiplicativityReport:
    instances: int
    passed: int
    failures: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    negative_control_detected: bool = False

    @property
    def all_passed(self) -> bool:
        return self.passed == self.instances


def extension(rng: random.Random, A: BasedComplex, C: BasedComplex, incompatible: bool = False):
    """Random B with 0 -> A -> B -> C -> 0, B = A (+) C twisted by a random homotopy.

    The basis of B is iota(a) together with random lifts of c, which is graded-compatible unless
    ``incompatible`` scales one of its vectors."""
    n = len(A.dims)
    phis = [FieldMatrix(QQ, [[_rand_q(rng) for _ in range(C.dims[i])] for _ in range(A.dims[i])])
            for i in range(n)]

    def mat(m, r, c):
        return m if (r and c) else FieldMatrix(QQ, [[Fraction(0)] * c for _ in range(r)])

    diffs = []
    for i in range(n - 1):
        da = mat(A.differentials[i], A.dims[i + 1], A.dims[i])
        dc = mat(C.differentials[i], C.dims[i + 1], C.dims[i])
        # theta = dA phi^i - phi^{i+1} dC keeps delta_B^2 = 0
        x = FieldMatrix(QQ, [[Fraction(0)] * C.dims[i] for _ in range(A.dims[i + 1])])
        if A.dims[i + 1] and C.dims[i]:
            if A.dims[i]:
                x = x + da @ phis[i]
            if C.dims[i + 1]:
                x = x - phis[i + 1] @ dc
        rows = []
        for r in range(A.dims[i + 1]):
            rows.append([da.rows[r][j] for j in range(A.dims[i])] + [x.rows[r][j] for j in range(C.dims[i])])
        for r in range(C.dims[i + 1]):
            rows.append([Fraction(0)] * A.dims[i] + [dc.rows[r][j] for j in range(C.dims[i])])
        diffs.append(FieldMatrix(QQ, rows))
    dims = [a + c for a, c in zip(A.dims, C.dims)]
    cb = []
    flipped = False
    for i in range(n):
        na, nc = A.dims[i], C.dims[i]
        cols = []
        for j in range(na):
            cols.append([Fraction(int(r == j)) for r in range(na)] + [Fraction(0)] * nc)
        for j in range(nc):
            shift = [_rand_q(rng) for _ in range(na)]
            cols.append(shift + [Fraction(int(r == j)) for r in range(nc)])
        if incompatible and not flipped and cols:
            cols[0] = [3 * v for v in cols[0]]
            flipped = True
        cb.append(FieldMatrix.from_columns(QQ, cols) if cols else None)
    return BasedComplex(QQ, dims, diffs, [[] for _ in dims], cb)


def multiplicativity_harness(seed: int = 0, instances: int = 100, max_length: int = 3, max_dim: int = 5,
                             negative_control: bool = True) -> MultiplicativityReport:
    """Check Tor(B) = +-Tor(A) Tor(C) exactly on random short exact sequences of acyclic complexes."""
    rng = random.Random(seed)
    report = MultiplicativityReport(instances, 0)
    for k in range(instances):
        length = rng.randint(1, max_length)
        A = random_complex(rng, length, max_dim)
        C = random_complex(rng, length, max_dim)
        B = extension(rng, A, C)
        ratio = torsion(B) / (torsion(A) * torsion(C))
        report.ratios.append(ratio)
        if ratio in (1, -1):
            report.passed += 1
        else:
            report.failures.append((k, ratio))
    if negative_control:
        for _ in range(20):
            A = random_complex(rng, 2, max_dim)
            C = random_complex(rng, 2, max_dim)
            if sum(A.dims) + sum(C.dims) == 0:
                continue
            B = extension(rng, A, C, incompatible=True)
            ratio = torsion(B) / (torsion(A) * torsion(C))
            report.negative_control_detected = ratio not in (1, -1)
            break
    return report
