"""1-loop invariant, torsion of the tangential gluing complex and the exact reduced verification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DomainError, IntegrityError, SolverError
from ..exact_algebra import (CC, FieldMatrix, MultiPoly, PivotDegenerate, PrincipalIdeal, QuotientField, RatFunc,
                             RatFuncField, det_fraction_free, rref)
from ..flattening import Flattening, flattening_defects, solve_strong_flattening, zeta_monomial
from ..gluing import (ShapeVector, big_g, default_drop_rows, eval_gluing, jacobian_g,
                      log_parameter, principal_gluing_ideal, shape_tangent_along_u)
from ..torsion_core import BasedComplex
from ..triangulation import GluingSystem, NZData
from .spine import (SpinePresentation, delta0_rows, delta1_rows, develop_spine, edge_axes,
                    weil_columns)


def _det(m, z: ShapeVector):
    if z.symbolic:
        return det_fraction_free(m)
    return complex(np.linalg.det(np.asarray(m, dtype=complex)))


def one_loop(gs: GluingSystem, fl: Flattening, z: ShapeVector, drop_rows: Sequence[int] | None = None,
             tol: float = 1e-9):
    """det(hat G diag zeta + hat G' diag zeta' + hat G'' diag zeta'') / (2^k zeta-monomial), up to sign."""
    defects = flattening_defects(gs, fl)
    if defects:
        raise IntegrityError("invalid flattening: " + "; ".join(defects))
    if not z.symbolic:
        if any(abs(x) < 1e-300 or abs(x - 1) < 1e-300 for x in z.z):
            raise DomainError("shape at a pole")
        res = max(abs(g - 1) for g in eval_gluing(gs, z))
        if res > tol:
            raise DomainError(f"shapes are not on the gluing variety (edge residual {res:.2e})")
    drop_rows = default_drop_rows(gs) if drop_rows is None else list(drop_rows)
    gg = big_g(gs, z, drop_rows)
    return _det(gg, z) / (2 ** gs.k * zeta_monomial(fl, z))


# ----------------------------------------------------------------------------
# tangential gluing complex


@dataclass
class GluingComplexTorsion:
    value: complex
    det_a: list[complex]
    half_det_g: complex
    ratio: complex
    lower_triangular_defect: float
    columns: np.ndarray


def _tangent_w(gs: GluingSystem, z: ShapeVector, drop_rows, u_step: float):
    n = gs.N
    J = np.asarray(jacobian_g(gs, z))
    cols = []
    for i in range(n - 1):
        target = np.zeros(n, dtype=complex)
        target[i] = 1
        target[n - 1] = -1
        w, *_ = np.linalg.lstsq(J, target, rcond=None)
        if np.max(np.abs(J @ w - target)) > 1e-8:
            raise SolverError(f"Dg(w) = e_{i} - e_{n - 1} has no solution; the Jacobian rank is wrong")
        cols.append(w)
    u = log_parameter(gs, z)
    cols.append(shape_tangent_along_u(gs, u, z, step=u_step, drop_rows=drop_rows))
    return np.column_stack(cols)


def gluing_complex_torsion(gs: GluingSystem, z: ShapeVector, fl: Flattening | None = None,
                           drop_rows: Sequence[int] | None = None, u_step: float = 1e-5) -> GluingComplexTorsion:
    """Torsion of 0 -> T_u -> C^N -> C^N -> C -> 0 (maps Dy, Dg, Dp) in the coordinate bases, from the
    change-of-basis matrices A0 = [1], A1 = [w_1 .. w_N], A2 (det 1/2), A3 = [1]."""
    if gs.k != 1:
        raise NotImplementedError("the gluing complex torsion is implemented for one cusp")
    n = gs.N
    drop_rows = default_drop_rows(gs) if drop_rows is None else list(drop_rows)
    A1 = _tangent_w(gs, z, drop_rows, u_step)
    A2 = np.eye(n, dtype=complex)
    A2[n - 1, :] = -1
    A2[n - 1, n - 1] = 0.5
    dets = [1.0 + 0j, complex(np.linalg.det(A1)), complex(np.linalg.det(A2)), 1.0 + 0j]
    value = dets[0] * dets[2] / (dets[1] * dets[3])
    gg = np.asarray(big_g(gs, z, drop_rows))
    half = 0.5 * complex(np.linalg.det(gg))
    prod = gg @ A1
    defect = float(np.max(np.abs(np.triu(prod, 1)))) if n > 1 else 0.0
    defect = max(defect, float(np.max(np.abs(np.abs(np.diag(prod)) - 1))))
    return GluingComplexTorsion(value, dets, half, value / half, defect, A1)


def gluing_complex(gs: GluingSystem, z: ShapeVector, u_step: float = 1e-5) -> BasedComplex:
    """The tangential gluing complex over complex doubles with its coordinate bases."""
    if gs.k != 1:
        raise NotImplementedError("the gluing complex is implemented for one cusp")
    n = gs.N
    u = log_parameter(gs, z)
    dy = shape_tangent_along_u(gs, u, z, step=u_step)
    J = np.asarray(jacobian_g(gs, z))
    dp = np.asarray(gs.K, dtype=complex)
    field_ = type(CC)(tol=1e-7)
    mats = [FieldMatrix(field_, dy.reshape(n, 1).tolist()), FieldMatrix(field_, J.tolist()),
            FieldMatrix(field_, dp.tolist())]
    return BasedComplex(field_, [1, n, n, 1], mats)


# ----------------------------------------------------------------------------
# the middle square


def verify_commutative_square(sp: SpinePresentation, gs: GluingSystem, z: ShapeVector,
                              tangent: Sequence[complex] | None = None, flip_edge: int | None = None) -> float:
    """Max deviation between delta1 applied to the Weil cochain of a tangent vector and the edge-axis
    cochain weighted by the derivative of the gluing map.  Without ``tangent`` every coordinate
    direction is checked."""
    n = gs.N
    D1 = np.asarray(delta1_rows(sp, z, flip_edge=flip_edge), dtype=complex)
    W = np.asarray(weil_columns(sp, z), dtype=complex).T
    axes = [[complex(x.evaluate(z.z)) for x in v] for v in edge_axes(sp, gs)]
    Tm = np.zeros((3 * n, n), dtype=complex)
    for i, v in enumerate(axes):
        Tm[3 * i:3 * i + 3, i] = v
    J = np.asarray(jacobian_g(gs, z))
    tangents = np.eye(n, dtype=complex) if tangent is None else np.asarray(tangent, dtype=complex).reshape(n, 1)
    lhs = D1 @ W @ tangents
    rhs = Tm @ J @ tangents
    return float(np.max(np.abs(lhs - rhs)))


# ----------------------------------------------------------------------------
# exact pipeline


@dataclass
class Certificate:
    det_A: RatFunc
    pi_zeta: RatFunc
    sign: int | None
    quotient_poly: MultiPoly | None
    verdict: bool
    generator: MultiPoly
    difference: MultiPoly | None = None
    lift_pivots: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    words: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "det_A": self.det_A.to_json(),
            "pi_zeta": self.pi_zeta.to_json(),
            "sign": self.sign,
            "quotient_poly": self.quotient_poly.to_json() if self.quotient_poly is not None else None,
            "verdict": self.verdict,
            "generator": self.generator.to_json(),
            "lift_choice": {"free_variables": "zero", "pivot_columns": self.lift_pivots},
            "words": self.words,
        }


def _lift_targets(n_tet: int):
    """Unit 2-cochains valued e and f on each disc (in (e, h, f) coordinates)."""
    for i in range(n_tet):
        for b in (0, 2):
            v = [0] * (3 * n_tet)
            v[3 * i + b] = 1
            yield v


def tor2_pipeline(sp: SpinePresentation, gs: GluingSystem, fl: Flattening,
                  ideal: PrincipalIdeal | None = None) -> Certificate:
    """Exact determinant of A = [delta0 | Weil cochains | lifts of e, f on each disc] and the test of
    det A / zeta-monomial = +-1 modulo the gluing ideal."""
    if gs.k != 1:
        raise NotImplementedError("the exact pipeline is implemented for one cusp")
    timings = {}
    t0 = time.perf_counter()
    ideal = ideal or principal_gluing_ideal(gs)
    g = ideal.generator
    n = sp.n_tet
    n_e = sp.n_edges
    z = ShapeVector.generic(n)
    rf = RatFuncField(n)
    d0 = delta0_rows(sp, z)
    weil = weil_columns(sp, z)
    d1 = delta1_rows(sp, z)
    axes = edge_axes(sp, gs)
    timings["cochains"] = time.perf_counter() - t0

    qf = QuotientField(ideal)
    zero = rf.zero()
    # [delta1 | -T] x = target, where T holds the edge axes; the T-part absorbs the image of alpha
    rows = []
    for i in range(3 * n):
        tcols = [zero] * n
        tcols[i // 3] = -axes[i // 3][i % 3]
        rows.append(d1[i] + tcols)
    try:
        M = FieldMatrix(qf, rows)
    except PivotDegenerate as exc:
        raise SolverError(f"delta1 is not defined on the gluing variety: {exc}") from exc
    targets = list(_lift_targets(n))
    aug = M.hstack(FieldMatrix(qf, [[t[i] for t in targets] for i in range(3 * n)]))
    try:
        red = rref(aug, track=False)
    except PivotDegenerate as exc:
        raise SolverError(f"lifting failed on the gluing variety: {exc}") from exc
    ncols = 3 * n_e + n
    if any(p >= ncols for p in red.pivots):
        raise SolverError("a lift target is not in the image of delta1 + alpha over the gluing variety")
    lifts = []
    for k in range(len(targets)):
        x = [qf.zero() for _ in range(ncols)]
        for r, c in enumerate(red.pivots):
            x[c] = red.reduced.rows[r][ncols + k]
        lifts.append([e.to_ratfunc() for e in x[:3 * n_e]])
    timings["lifts"] = time.perf_counter() - t0

    cols = [[d0[r][c] for r in range(3 * n_e)] for c in range(3 * n)] + weil + lifts
    A = FieldMatrix.from_columns(rf, cols)
    if A.shape[0] != A.shape[1]:
        raise IntegrityError(f"assembled matrix is {A.shape}, not square")
    det_a = det_fraction_free(A)
    timings["determinant"] = time.perf_counter() - t0

    pz = zeta_monomial(fl, z)
    ratio = det_a / pz
    sign = None
    quotient = None
    difference = None
    for s in (1, -1):
        diff = ratio.num - ratio.den.scale(s)
        q, rem = ideal.divmod(diff)
        if rem.is_zero():
            sign, quotient, difference = s, q, diff
            break
    timings["verdict"] = time.perf_counter() - t0
    return Certificate(det_a, pz, sign, quotient, sign is not None, g, difference, red.pivots, timings,
                       [str(w) for w in sp.words])


# ----------------------------------------------------------------------------
# end-to-end verification


@dataclass
class VerificationReport:
    verdict: bool
    certificate: Certificate
    flattening: Flattening
    spine_source: str
    timings: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "certificate": self.certificate.to_json(),
                "flattening": self.flattening.to_json(), "spine": self.spine_source,
                "timings": {k: round(v, 3) for k, v in self.timings.items()}}


def verify_reduced(data: NZData, words: Sequence | None = None, flattening: Flattening | None = None,
                   automatic: bool = False) -> VerificationReport:
    """Run the exact pipeline on a fixture: flattening (given, from the fixture or solved), spine words
    (given, from the fixture or developed automatically), certificate."""
    t0 = time.perf_counter()
    gs = data.gluing
    if data.triangulation is None:
        raise IntegrityError("the exact pipeline needs the triangulation (isosig or gluings)")
    if not data.labels_match:
        raise IntegrityError("fixture matrices are labelled differently from the triangulation")
    if flattening is None and "flattening" in data.extra:
        flattening = Flattening.from_json(data.extra["flattening"])
    if flattening is not None:
        defects = flattening_defects(gs, flattening)
        if defects:
            raise IntegrityError("invalid flattening: " + "; ".join(defects))
    else:
        flattening = solve_strong_flattening(gs)
    ideal = principal_gluing_ideal(gs)
    if words is None and not automatic:
        words = data.extra.get("words")
    sp = develop_spine(data.triangulation, None if automatic else words, ideal=ideal)
    timings = {"setup": time.perf_counter() - t0}
    cert = tor2_pipeline(sp, gs, flattening, ideal)
    timings.update(cert.timings)
    timings["total"] = time.perf_counter() - t0
    return VerificationReport(cert.verdict, cert, flattening, sp.source, timings)
