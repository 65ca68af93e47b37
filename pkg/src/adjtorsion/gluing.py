"""Thurston gluing and completeness equations: evaluation, Jacobians, Newton continuation, exact ideal.

Shapes are handled in two modes.  Numeric shapes are numpy complex arrays; symbolic shapes are
RatFunc entries in the variables z1..zN.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, IntegrityError, SolverError
from .exact_algebra import FieldMatrix, MultiPoly, PrincipalIdeal, RatFunc, RatFuncField
from .triangulation import GluingSystem

TWO_PI_I = 2j * math.pi
COMPLETE_SHAPE = complex(0.5, math.sqrt(3) / 2)


@dataclass
class ShapeVector:
    """Shape parameters z_j with companions z' = 1/(1-z) and z'' = 1 - 1/z."""
    z: list
    symbolic: bool = False
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.symbolic:
            self.z = [complex(x) for x in self.z]
            for j, x in enumerate(self.z):
                if x == 0 or x == 1:
                    raise DomainError(f"shape z{j + 1} = {x} is degenerate")
        else:
            for j, x in enumerate(self.z):
                if x == 0 or x == 1:
                    raise DomainError(f"shape z{j + 1} is degenerate")

    @classmethod
    def generic(cls, n: int) -> "ShapeVector":
        return cls([RatFunc.variable(n, j) for j in range(n)], symbolic=True)

    @classmethod
    def complete(cls, n: int) -> "ShapeVector":
        return cls([COMPLETE_SHAPE] * n)

    def __len__(self):
        return len(self.z)

    @property
    def zp(self) -> list:
        return [1 / (1 - x) for x in self.z]

    @property
    def zpp(self) -> list:
        return [1 - 1 / x for x in self.z]

    def triple(self, q: int) -> list:
        return (self.z, self.zp, self.zpp)[q]

    def array(self) -> np.ndarray:
        if self.symbolic:
            raise TypeError("symbolic shapes have no numeric array")
        return np.array(self.z, dtype=complex)

    def is_positive(self) -> bool:
        return not self.symbolic and all(x.imag > 0 for x in self.z)

    def to_json(self) -> list:
        return [[x.real, x.imag] for x in self.z]


@dataclass
class ZetaVector:
    zeta: list
    zetap: list
    zetapp: list

    def triple(self, q: int) -> list:
        return (self.zeta, self.zetap, self.zetapp)[q]


def zeta(z: ShapeVector) -> ZetaVector:
    """zeta = 1/z, zeta' = 1/(1-z), zeta'' = 1/(z(z-1))."""
    return ZetaVector([1 / x for x in z.z], [1 / (1 - x) for x in z.z], [1 / (x * (x - 1)) for x in z.z])


def _monomial(z: ShapeVector, rows: Sequence[Sequence[Sequence[int]]], i: int):
    one = RatFunc.constant(len(z), 1) if z.symbolic else 1 + 0j
    out = one
    for q in range(3):
        vals = z.triple(q)
        for j, e in enumerate(rows[q][i]):
            if e:
                out = out * vals[j] ** e
    return out


def eval_gluing(gs: GluingSystem, z: ShapeVector) -> list:
    """g_i = prod_j z_j^G_ij z'_j^G'_ij z''_j^G''_ij for every edge i."""
    _check_size(gs, z)
    mats = (gs.G, gs.Gp, gs.Gpp)
    return [_monomial(z, mats, i) for i in range(len(gs.G))]


def eval_curves(gs: GluingSystem, z: ShapeVector) -> list:
    """Multiplicative form prod z^C z'^C' z''^C'' of every ingested peripheral curve."""
    _check_size(gs, z)
    mats = (gs.C, gs.Cp, gs.Cpp)
    return [_monomial(z, mats, i) for i in range(len(gs.C))]


def _check_size(gs: GluingSystem, z: ShapeVector):
    if len(z) != gs.N:
        raise IntegrityError(f"expected {gs.N} shapes, got {len(z)}")


def _log_rows(rows, z: np.ndarray) -> np.ndarray:
    logs = [np.log(z), np.log(1 / (1 - z)), np.log(1 - 1 / z)]
    return sum(np.asarray(rows[q], dtype=float) @ logs[q] for q in range(3))


def log_parameter(gs: GluingSystem, z: ShapeVector, curves: Sequence[int] | None = None) -> np.ndarray:
    """u_l = sum_j C_lj log z_j + C'_lj log z'_j + C''_lj log z''_j with principal logarithms.

    By default the first k curves are used (one per cusp)."""
    _check_size(gs, z)
    if z.symbolic:
        raise TypeError("log-parameters are numeric only")
    arr = z.array()
    if np.any(arr.imag <= 0):
        raise DomainError("log-parameter needs shapes in the upper half-plane")
    idx = list(range(gs.k)) if curves is None else list(curves)
    mats = [np.asarray(m, dtype=float).reshape(len(gs.C), gs.N)[idx] for m in (gs.C, gs.Cp, gs.Cpp)]
    return _log_rows(mats, arr)


def _jacobian_rows(rows, z: ShapeVector):
    zt = zeta(z)
    n = len(z)
    if z.symbolic:
        field_ = RatFuncField(n)
        out = [[field_.zero() for _ in range(n)] for _ in rows[0]]
        for i in range(len(rows[0])):
            for j in range(n):
                for q in range(3):
                    e = rows[q][i][j]
                    if e:
                        out[i][j] = out[i][j] + zt.triple(q)[j] * e
        return FieldMatrix(field_, out)
    out = np.zeros((len(rows[0]), n), dtype=complex)
    for q in range(3):
        out += np.asarray(rows[q], dtype=float).reshape(len(rows[0]), n) * np.array(zt.triple(q))[None, :]
    return out


def jacobian_g(gs: GluingSystem, z: ShapeVector):
    """G diag(zeta) + G' diag(zeta') + G'' diag(zeta'').

    This is the Jacobian of the log-form edge map everywhere and of g itself on the variety."""
    _check_size(gs, z)
    return _jacobian_rows((gs.G, gs.Gp, gs.Gpp), z)


def jacobian_u(gs: GluingSystem, z: ShapeVector):
    _check_size(gs, z)
    k = gs.k
    return _jacobian_rows((gs.C[:k], gs.Cp[:k], gs.Cpp[:k]), z)


def default_drop_rows(gs: GluingSystem) -> list[int]:
    return list(range(gs.N - gs.k, gs.N))


def _retained(gs: GluingSystem, drop_rows: Sequence[int]) -> list[int]:
    if len(drop_rows) != gs.k or len(set(drop_rows)) != gs.k or any(not 0 <= r < gs.N for r in drop_rows):
        raise IntegrityError(f"drop_rows must list {gs.k} distinct edge indices in 0..{gs.N - 1}")
    return [i for i in range(gs.N) if i not in drop_rows]


def check_row_choice(gs: GluingSystem, drop_rows: Sequence[int], z: ShapeVector, tol: float = 1e-8):
    """Raise when the retained edge rows of the Jacobian are rank deficient at z."""
    keep = _retained(gs, drop_rows)
    J = np.asarray(jacobian_g(gs, z))
    if _num_rank(J[keep], tol) == len(keep):
        return
    for alt in itertools.combinations(range(gs.N), gs.k):
        others = [i for i in range(gs.N) if i not in alt]
        if _num_rank(J[others], tol) == len(others):
            raise IntegrityError(f"bad row choice {list(drop_rows)}: retained edge rows are dependent; try {list(alt)}")
    raise IntegrityError(f"bad row choice {list(drop_rows)}: no admissible choice exists at this point")


def _num_rank(m: np.ndarray, tol: float) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def hat_matrices(gs: GluingSystem, drop_rows: Sequence[int] | None = None, z: ShapeVector | None = None):
    """Edge matrices with the dropped rows removed and the first k curve rows appended last.

    When z is given the retained rows are checked for full rank there."""
    drop_rows = default_drop_rows(gs) if drop_rows is None else list(drop_rows)
    keep = _retained(gs, drop_rows)
    if z is not None and not z.symbolic:
        check_row_choice(gs, drop_rows, z)
    out = []
    for g, c in ((gs.G, gs.C), (gs.Gp, gs.Cp), (gs.Gpp, gs.Cpp)):
        out.append([list(g[i]) for i in keep] + [list(c[l]) for l in range(gs.k)])
    return tuple(out)


def big_g(gs: GluingSystem, z: ShapeVector, drop_rows: Sequence[int] | None = None):
    """The matrix hat G diag(zeta) + hat G' diag(zeta') + hat G'' diag(zeta'')."""
    return _jacobian_rows(hat_matrices(gs, drop_rows), z)


def jacobian_rank(gs: GluingSystem, z: ShapeVector, tol: float = 1e-8) -> int:
    return _num_rank(np.asarray(jacobian_g(gs, z)), tol)


# ----------------------------------------------------------------------------
# Newton continuation


def _residual_vector(gs, keep, offsets, u_target, z: np.ndarray) -> np.ndarray:
    edges = _log_rows([np.asarray(m, dtype=float)[keep] for m in (gs.G, gs.Gp, gs.Gpp)], z) - TWO_PI_I * offsets
    k = gs.k
    curves = _log_rows([np.asarray(m, dtype=float).reshape(len(gs.C), gs.N)[:k] for m in (gs.C, gs.Cp, gs.Cpp)], z)
    return np.concatenate([edges, curves - u_target])


def _system_jacobian(gs, keep, z: np.ndarray) -> np.ndarray:
    zeta_all = [1 / z, 1 / (1 - z), 1 / (z * (z - 1))]
    k = gs.k
    rows = [np.asarray(m, dtype=float)[keep] for m in (gs.G, gs.Gp, gs.Gpp)]
    crow = [np.asarray(m, dtype=float).reshape(len(gs.C), gs.N)[:k] for m in (gs.C, gs.Cp, gs.Cpp)]
    top = sum(rows[q] * zeta_all[q][None, :] for q in range(3))
    bottom = sum(crow[q] * zeta_all[q][None, :] for q in range(3))
    return np.vstack([top, bottom])


def gluing_residual(gs: GluingSystem, z: ShapeVector, u_target=None) -> tuple[float, float]:
    """(max |g_i(z) - 1|, max |u_l(z) - u_target_l|)."""
    g = np.array(eval_gluing(gs, z), dtype=complex)
    u = log_parameter(gs, z)
    ut = np.zeros(gs.k, dtype=complex) if u_target is None else np.asarray(u_target, dtype=complex).reshape(gs.k)
    return float(np.max(np.abs(g - 1))), float(np.max(np.abs(u - ut)))


def newton_solve(gs: GluingSystem, u_target, z0: ShapeVector | Sequence[complex], *, max_iter: int = 100,
                 tol: float = 1e-12, drop_rows: Sequence[int] | None = None, max_halvings: int = 20) -> ShapeVector:
    """Solve the retained edge equations and the k completeness equations u(z) = u_target.

    The equations are taken in logarithmic form; the 2 pi i multiples of the edge equations are the
    integers nearest to their values at z0 and stay fixed.  Steps are halved when the residual does not
    decrease or a shape would leave the upper half-plane.
    """
    z = np.array(z0.z if isinstance(z0, ShapeVector) else list(z0), dtype=complex)
    if z.shape != (gs.N,):
        raise IntegrityError(f"expected {gs.N} starting shapes")
    if np.any(z.imag <= 0):
        raise SolverError("left positive chamber: starting shapes must lie in the upper half-plane")
    u_target = np.asarray(u_target if u_target is not None else np.zeros(gs.k), dtype=complex).reshape(gs.k)
    drop_rows = default_drop_rows(gs) if drop_rows is None else list(drop_rows)
    keep = _retained(gs, drop_rows)
    raw = _log_rows([np.asarray(m, dtype=float)[keep] for m in (gs.G, gs.Gp, gs.Gpp)], z)
    offsets = np.round(raw.imag / (2 * math.pi))
    F = _residual_vector(gs, keep, offsets, u_target, z)
    norm = float(np.max(np.abs(F)))
    iterations = 0
    while True:
        shapes = ShapeVector(list(z))
        g_res, u_res = gluing_residual(gs, shapes, u_target)
        if g_res < tol and u_res < tol and norm < tol:
            break
        if iterations >= max_iter:
            raise SolverError(f"Newton did not converge in {max_iter} iterations (residual {norm:.3e})")
        J = _system_jacobian(gs, keep, z)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular Jacobian during Newton iteration") from exc
        t = 1.0
        accepted = False
        left = False
        for _ in range(max_halvings + 1):
            cand = z + t * step
            if np.all(cand.imag > 0):
                Fc = _residual_vector(gs, keep, offsets, u_target, cand)
                nc = float(np.max(np.abs(Fc)))
                if nc < norm or nc < tol:
                    accepted = True
                    break
            else:
                left = True
            t /= 2
        if not accepted:
            if left and not np.all((z + step / 2 ** max_halvings).imag > 0):
                raise SolverError("left positive chamber")
            # no decrease at machine precision: stop if already tiny, otherwise fail
            if norm < 1e3 * tol:
                break
            raise SolverError(f"Newton step failed to reduce the residual (residual {norm:.3e})")
        z, F, norm = cand, Fc, nc
        iterations += 1
    g_res, u_res = gluing_residual(gs, ShapeVector(list(z)), u_target)
    warnings = []
    if not all(0 < abs(u) < math.pi for u in u_target):
        warnings.append("log-parameter outside 0 < |u| < pi; local injectivity of the u-chart is not guaranteed")
    return ShapeVector(list(z), info={"iterations": iterations, "edge_residual": g_res, "u_residual": u_res,
                                       "u_target": [complex(u) for u in u_target], "warnings": warnings,
                                       "injectivity_condition": not warnings})


def continuation(gs: GluingSystem, u_values: Sequence, z0: ShapeVector | None = None, **kw) -> list[ShapeVector]:
    """Solve along a sequence of targets, seeding each solve with the previous solution."""
    cur = z0 if z0 is not None else ShapeVector.complete(gs.N)
    out = []
    for u in u_values:
        cur = newton_solve(gs, np.atleast_1d(u), cur, **kw)
        out.append(cur)
    return out


def shape_tangent_along_u(gs: GluingSystem, u, z_seed: ShapeVector, step: float = 1e-5,
                          drop_rows: Sequence[int] | None = None) -> np.ndarray:
    """dz/du at the solution for u (k = 1), by central differences of newton_solve with one
    Richardson extrapolation step."""
    if gs.k != 1:
        raise NotImplementedError("the u-chart tangent is implemented for one cusp")
    u = complex(np.atleast_1d(u)[0])

    def central(h):
        zp = newton_solve(gs, [u + h], z_seed, drop_rows=drop_rows).array()
        zm = newton_solve(gs, [u - h], z_seed, drop_rows=drop_rows).array()
        return (zp - zm) / (2 * h)

    d1 = central(step)
    d2 = central(step / 2)
    return (4 * d2 - d1) / 3


# ----------------------------------------------------------------------------
# exact ideal


def _strip_monomial(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    low = tuple(min(e[i] for e in p.terms) for i in range(p.nvars))
    if not any(low):
        return p
    return MultiPoly(p.nvars, {tuple(a - b for a, b in zip(e, low)): c for e, c in p.terms.items()})


def gluing_ideal(gs: GluingSystem, drop_rows: Sequence[int] | None = None) -> list[MultiPoly]:
    """Numerators of g_i - 1 for the retained edges, made primitive with monomial factors removed."""
    drop_rows = default_drop_rows(gs) if drop_rows is None else list(drop_rows)
    keep = _retained(gs, drop_rows)
    z = ShapeVector.generic(gs.N)
    vals = eval_gluing(gs, z)
    out = []
    for i in keep:
        if not any(gs.G[i]) and not any(gs.Gp[i]) and not any(gs.Gpp[i]):
            raise IntegrityError(f"edge row {i} has no exponents; its equation is degenerate")
        r = vals[i] - 1
        if r.is_zero():
            raise IntegrityError(f"edge equation {i} is identically satisfied")
        _, prim = _strip_monomial(r.num).primitive()
        out.append(prim)
    return out


def principal_gluing_ideal(gs: GluingSystem, drop_rows: Sequence[int] | None = None) -> PrincipalIdeal:
    gens = gluing_ideal(gs, drop_rows)
    if len(gens) != 1:
        raise NotImplementedError(f"the gluing ideal has {len(gens)} generators; only principal ideals are supported")
    return PrincipalIdeal(gens[0])


def same_up_to_unit_and_monomial(p: MultiPoly, q: MultiPoly) -> bool:
    a = _strip_monomial(p).primitive()[1]
    b = _strip_monomial(q).primitive()[1]
    return a == b

