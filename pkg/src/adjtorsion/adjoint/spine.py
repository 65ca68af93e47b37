"""Cochains of the dual spine with coefficients in the adjoint local system.

Each tetrahedron carries a chart in which its vertices 0, 1, 2, 3 sit at inf, 0, 1 and its shape z.
Dual edge r runs from its tail tetrahedron to its head tetrahedron; its monodromy mu_r maps head-chart
coordinates to tail-chart coordinates, so (delta0 x)_r = Ad(mu_r) x_head - x_tail.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import IntegrityError
from ..exact_algebra import FieldMatrix, PrincipalIdeal, RatFunc, RatFuncField
from ..gluing import ShapeVector, eval_gluing
from ..triangulation import DualGraph, GluingSystem, Triangulation, dual_graph
from .words import (INF, ONE, SHAPE, ZERO, MobiusWord, ad_matrix, chart_word, mat2_identity, mat2_inv, mat2_mul,
                    parse_word, traceless_coords, weil_cocycle, word_matrix)

VERTEX_POINTS = (INF, ZERO, ONE, SHAPE)


@dataclass
class SpinePresentation:
    triangulation: Triangulation
    graph: DualGraph
    words: list[MobiusWord]
    source: str = "automatic"
    notes: dict = field(default_factory=dict)

    @property
    def n_tet(self) -> int:
        return self.triangulation.n_tet

    @property
    def n_edges(self) -> int:
        return len(self.graph.edges)

    def two_cells(self):
        """Per triangulation edge: the signed dual edges of its boundary with the transport words
        (from the chart where each crossing's cochain lives back to the starting chart)."""
        out = []
        for cycle in self.graph.edge_cycles:
            transport = MobiusWord()
            steps = []
            for r, sign in cycle:
                if sign > 0:
                    steps.append((r, sign, transport))
                    transport = (transport + self.words[r]).reduced()
                else:
                    transport = (transport + self.words[r].inverse()).reduced()
                    steps.append((r, sign, transport))
            out.append({"steps": steps, "holonomy": transport})
        return out

    def holonomies(self, z: ShapeVector) -> list:
        """2x2 holonomy around each triangulation edge, starting in the chart of its first corner."""
        mats = [word_matrix(w, z) for w in self.words]
        inv = [mat2_inv(m) for m in mats]
        out = []
        for cycle in self.graph.edge_cycles:
            T = mat2_identity(z)
            for r, sign in cycle:
                T = mat2_mul(T, mats[r] if sign > 0 else inv[r])
            out.append(T)
        return out


def develop_spine(tri: Triangulation, fixture_override: Sequence | None = None,
                  gluing: GluingSystem | None = None, ideal: PrincipalIdeal | None = None) -> SpinePresentation:
    """Monodromy words for every dual edge.

    Without an override the words come from the developed face identifications, after a gauge change
    that makes every edge of a breadth-first spanning tree the identity.  An override is a list of
    ``{"tail": [tet, face], "word": text}`` entries and is used verbatim.  When an ideal is given the
    boundary invariant is checked exactly."""
    tri = tri.oriented()
    graph = dual_graph(tri)
    if fixture_override is not None:
        words: list[MobiusWord | None] = [None] * len(graph.edges)
        for item in fixture_override:
            tail = tuple(item["tail"])
            if tail not in graph.face_to_edge:
                raise IntegrityError(f"word given for unknown face {list(tail)}")
            r, sign = graph.crossing(*tail)
            if sign != 1:
                raise IntegrityError(f"face {list(tail)} is the head side of dual edge {r}; words are keyed by tails")
            words[r] = parse_word(item["word"], tri.n_tet)
        missing = [r for r, w in enumerate(words) if w is None]
        if missing:
            raise IntegrityError(f"no word supplied for dual edges {missing}")
        sp = SpinePresentation(tri, graph, words, source="fixture")
    else:
        raw = []
        for e in graph.edges:
            verts = [v for v in range(4) if v != e.tail_face]
            a = chart_word([VERTEX_POINTS[v] for v in verts], e.tail)
            b = chart_word([VERTEX_POINTS[e.perm[v]] for v in verts], e.head)
            raw.append((a + b.inverse()).reduced())
        # gauge: chart of tetrahedron t is changed by gauge[t]; mu_r becomes gauge[tail]^-1 mu_r gauge[head]
        gauge: list[MobiusWord | None] = [None] * tri.n_tet
        gauge[0] = MobiusWord()
        tree = set()
        queue = deque([0])
        while queue:
            t = queue.popleft()
            for e in graph.edges:
                if e.tail == t and gauge[e.head] is None:
                    gauge[e.head] = (raw[e.index].inverse() + gauge[t]).reduced()
                elif e.head == t and gauge[e.tail] is None:
                    gauge[e.tail] = (raw[e.index] + gauge[t]).reduced()
                else:
                    continue
                tree.add(e.index)
                queue.append(e.head if e.tail == t else e.tail)
        words = []
        for e in graph.edges:
            if e.index in tree:
                words.append(MobiusWord())
            else:
                words.append((gauge[e.tail].inverse() + raw[e.index] + gauge[e.head]).reduced())
        sp = SpinePresentation(tri, graph, words, source="automatic", notes={"tree_edges": sorted(tree)})
    if ideal is not None:
        check_boundary_invariant(sp, ideal)
    return sp


# ----------------------------------------------------------------------------
# invariants and edge axes


def _ratfunc_in_ideal(x: RatFunc, ideal: PrincipalIdeal) -> bool:
    return ideal.contains(x.num)


def check_boundary_invariant(sp: SpinePresentation, ideal: PrincipalIdeal):
    """Ad of the holonomy around every dual 2-cell is the identity modulo the ideal."""
    z = ShapeVector.generic(sp.n_tet)
    for i, hol in enumerate(sp.holonomies(z)):
        ad = ad_matrix(hol)
        for a in range(3):
            for b in range(3):
                d = ad[a][b] - (1 if a == b else 0)
                if not _ratfunc_in_ideal(d, ideal):
                    raise IntegrityError(f"development inconsistent: holonomy around edge {i} is not trivial "
                                         "on the gluing variety")


def edge_axes(sp: SpinePresentation, gs: GluingSystem) -> list[list[RatFunc]]:
    """For each triangulation edge, the element of sl2 (in the starting chart of its 2-cell) that
    generates rotation about the edge, normalised so that exp(log(g_i) t_i) is the holonomy.

    Computed over the generic field: with eigenvalues l1 = g l2 of the holonomy, t = P - 1/2 where P
    projects onto the l1-eigenline."""
    z = ShapeVector.generic(sp.n_tet)
    gvals = eval_gluing(gs, z)
    out = []
    for i, hol in enumerate(sp.holonomies(z)):
        tr = hol[0][0] + hol[1][1]
        det = hol[0][0] * hol[1][1] - hol[0][1] * hol[1][0]
        g = gvals[i]
        l2 = tr / (1 + g)
        l1 = g * l2
        if l1 * l2 != det:
            g = 1 / g
            l2 = tr / (1 + g)
            l1 = g * l2
            if l1 * l2 != det:
                raise IntegrityError(f"holonomy around edge {i} does not have eigenvalue ratio g_{i}")
        scale = 1 / (l1 - l2)
        p = [[(hol[a][b] - (l2 if a == b else 0)) * scale for b in range(2)] for a in range(2)]
        out.append(traceless_coords(p))
    return out


# ----------------------------------------------------------------------------
# coboundary matrices, as nested lists over the shape field


def _zero_like(z: ShapeVector):
    return (RatFunc.constant(len(z), 0) if z.symbolic else 0j)


def delta0_rows(sp: SpinePresentation, z: ShapeVector) -> list[list]:
    zero = _zero_like(z)
    n_e, n_v = sp.n_edges, sp.n_tet
    rows = [[zero] * (3 * n_v) for _ in range(3 * n_e)]
    for e in sp.graph.edges:
        ad = ad_matrix(word_matrix(sp.words[e.index], z))
        for a in range(3):
            for b in range(3):
                rows[3 * e.index + a][3 * e.head + b] = rows[3 * e.index + a][3 * e.head + b] + ad[a][b]
            rows[3 * e.index + a][3 * e.tail + a] = rows[3 * e.index + a][3 * e.tail + a] - 1
    return rows


def delta1_rows(sp: SpinePresentation, z: ShapeVector, flip_edge: int | None = None) -> list[list]:
    """Block row per triangulation edge: the signed, transported sum over the boundary of its 2-cell.

    ``flip_edge`` reverses the sign of one dual edge everywhere (a negative control)."""
    zero = _zero_like(z)
    n_e = sp.n_edges
    mats = [word_matrix(w, z) for w in sp.words]
    inv = [mat2_inv(m) for m in mats]
    rows = [[zero] * (3 * n_e) for _ in range(3 * len(sp.graph.edge_cycles))]
    for i, cycle in enumerate(sp.graph.edge_cycles):
        T = mat2_identity(z)
        for r, sign in cycle:
            s = -sign if r == flip_edge else sign
            if sign > 0:
                ad = ad_matrix(T)
                T = mat2_mul(T, mats[r])
            else:
                T = mat2_mul(T, inv[r])
                ad = ad_matrix(T)
            for a in range(3):
                for b in range(3):
                    rows[3 * i + a][3 * r + b] = rows[3 * i + a][3 * r + b] + ad[a][b] * s
    return rows


def weil_columns(sp: SpinePresentation, z: ShapeVector) -> list[list]:
    """Column j is the 1-cochain r -> weil_cocycle(word_r, j)."""
    cols = []
    for j in range(sp.n_tet):
        col = []
        for w in sp.words:
            col.extend(weil_cocycle(w, j, z))
        cols.append(col)
    return cols


def build_delta0(sp: SpinePresentation, z: ShapeVector | None = None) -> FieldMatrix:
    z = z or ShapeVector.generic(sp.n_tet)
    return _as_matrix(delta0_rows(sp, z), z)


def build_delta1(sp: SpinePresentation, z: ShapeVector | None = None) -> FieldMatrix:
    z = z or ShapeVector.generic(sp.n_tet)
    return _as_matrix(delta1_rows(sp, z), z)


def _as_matrix(rows, z: ShapeVector):
    if z.symbolic:
        return FieldMatrix(RatFuncField(len(z)), rows)
    from ..exact_algebra import CC
    return FieldMatrix(CC, rows)
