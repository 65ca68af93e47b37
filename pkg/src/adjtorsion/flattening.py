"""Strong combinatorial flattenings and their zeta-monomials."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, IntegrityError, SolverError
from .exact_algebra import RatFunc, solve_integer
from .gluing import ShapeVector, zeta
from .triangulation import GluingSystem


@dataclass(frozen=True)
class Flattening:
    f: tuple[int, ...]
    fp: tuple[int, ...]
    fpp: tuple[int, ...]

    @classmethod
    def of(cls, f, fp, fpp) -> "Flattening":
        return cls(tuple(int(x) for x in f), tuple(int(x) for x in fp), tuple(int(x) for x in fpp))

    @classmethod
    def from_json(cls, doc: dict) -> "Flattening":
        try:
            return cls.of(doc["f"], doc["fp"], doc["fpp"])
        except (KeyError, TypeError, ValueError) as exc:
            raise IntegrityError(f"flattening must have integer lists f, fp, fpp ({exc})") from exc

    def to_json(self) -> dict:
        return {"f": list(self.f), "fp": list(self.fp), "fpp": list(self.fpp)}

    def triple(self, q: int) -> tuple[int, ...]:
        return (self.f, self.fp, self.fpp)[q]


def _matvec(m, v):
    return [sum(a * b for a, b in zip(row, v)) for row in m]


def flattening_defects(gs: GluingSystem, fl: Flattening) -> list[str]:
    """Human-readable list of violated conditions (empty for a strong flattening)."""
    n = gs.N
    if not (len(fl.f) == len(fl.fp) == len(fl.fpp) == n):
        return [f"flattening vectors must have length {n}"]
    out = []
    for j in range(n):
        if fl.f[j] + fl.fp[j] + fl.fpp[j] != 1:
            out.append(f"f + f' + f'' is not 1 at tetrahedron {j}")
    edges = [a + b + c for a, b, c in zip(_matvec(gs.G, fl.f), _matvec(gs.Gp, fl.fp), _matvec(gs.Gpp, fl.fpp))]
    for i, e in enumerate(edges):
        if e != 2:
            out.append(f"edge {i} sums to {e}, expected 2")
    curves = [a + b + c for a, b, c in zip(_matvec(gs.C, fl.f), _matvec(gs.Cp, fl.fp), _matvec(gs.Cpp, fl.fpp))]
    for l, c in enumerate(curves):
        if c != 0:
            out.append(f"curve {l} sums to {c}, expected 0")
    return out


def is_strong_flattening(gs: GluingSystem, fl: Flattening) -> bool:
    return not flattening_defects(gs, fl)


def _flattening_system(gs: GluingSystem):
    """Integer system in (f, f') after substituting f'' = 1 - f - f'."""
    n = gs.N
    rows, rhs = [], []
    for mats, target in (((gs.G, gs.Gp, gs.Gpp), 2), ((gs.C, gs.Cp, gs.Cpp), 0)):
        a, b, c = mats
        for i in range(len(a)):
            rows.append([a[i][j] - c[i][j] for j in range(n)] + [b[i][j] - c[i][j] for j in range(n)])
            rhs.append(target - sum(c[i]))
    return rows, rhs


def _size_key(v: Sequence[int]):
    return sorted((abs(x) for x in v), reverse=True), [abs(x) for x in v], list(v)


def _reduce(x: list[int], kernel: list[list[int]], radius: int = 2) -> list[int]:
    """Shrink a particular solution by kernel combinations; deterministic."""
    best = list(x)
    improved = True
    while improved:
        improved = False
        # greedy single-vector moves first
        for k in kernel:
            for s in (1, -1):
                cand = [a + s * b for a, b in zip(best, k)]
                if _size_key(cand) < _size_key(best):
                    best, improved = cand, True
    if kernel and len(kernel) <= 4:
        for coeffs in itertools.product(range(-radius, radius + 1), repeat=len(kernel)):
            cand = [a + sum(c * k[i] for c, k in zip(coeffs, kernel)) for i, a in enumerate(best)]
            if _size_key(cand) < _size_key(best):
                best = cand
    return best


def solve_strong_flattening(gs: GluingSystem, hint: Flattening | None = None) -> Flattening:
    """A strong flattening; a valid hint is returned unchanged."""
    if hint is not None and is_strong_flattening(gs, hint):
        return hint
    rows, rhs = _flattening_system(gs)
    sol = solve_integer(rows, rhs)
    if sol is None:
        raise SolverError("no strong flattening exists; such flattenings always exist for a cusped hyperbolic "
                          "triangulation, so the gluing data is probably corrupted")
    x = _reduce(sol.particular, sol.kernel)
    n = gs.N
    f, fp = x[:n], x[n:]
    fl = Flattening.of(f, fp, [1 - a - b for a, b in zip(f, fp)])
    if not is_strong_flattening(gs, fl):
        raise SolverError("internal error: solver output is not a strong flattening")
    return fl


def zeta_monomial(fl: Flattening, z: ShapeVector):
    """prod_j zeta_j^f_j zeta'_j^f'_j zeta''_j^f''_j."""
    if len(fl.f) != len(z):
        raise IntegrityError("flattening and shapes have different lengths")
    zt = zeta(z)
    out = RatFunc.constant(len(z), 1) if z.symbolic else 1 + 0j
    for q in range(3):
        for v, e in zip(zt.triple(q), fl.triple(q)):
            if e:
                if not z.symbolic and v == 0:
                    raise DomainError("zeta vanishes where a negative power is needed")
                out = out * v ** e
    return out
