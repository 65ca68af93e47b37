"""Combinatorics of ideal triangulations.

Vertex labels are 0..3.  ``gluings[t][f] = (d, perm)`` glues face f of tetrahedron t
(the face opposite vertex f) to face perm[f] of tetrahedron d, sending vertex v of t to
vertex perm[v] of d.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import IntegrityError, ParseError

Perm = tuple[int, int, int, int]

IDENTITY: Perm = (0, 1, 2, 3)
# isosig permutation codes index the lexicographically ordered permutations of {0,1,2,3}
PERM_TABLE: list[Perm] = sorted(itertools.permutations(range(4)))
PERM_CODE = {p: i for i, p in enumerate(PERM_TABLE)}
ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-"
CHAR_VALUE = {c: i for i, c in enumerate(ALPHABET)}

TET_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
# quad type of an edge: 0 for {01,23} (shape z), 1 for {02,13} (z'), 2 for {03,12} (z'')
QUAD_OF_EDGE = {frozenset(e): q for q, pair in enumerate([((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]) for e in pair}


def perm_inverse(p: Sequence[int]) -> Perm:
    out = [0] * 4
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def perm_compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    """a after b."""
    return tuple(a[b[i]] for i in range(4))


def perm_sign(p: Sequence[int]) -> int:
    s = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                s = -s
    return s


@dataclass(frozen=True)
class Triangulation:
    gluings: tuple[tuple[tuple[int, Perm], ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.gluings)
        if n == 0:
            raise IntegrityError("a triangulation needs at least one tetrahedron")
        for t, faces in enumerate(self.gluings):
            if len(faces) != 4:
                raise IntegrityError(f"tetrahedron {t} does not have four faces")
            for f, g in enumerate(faces):
                if g is None:
                    raise IntegrityError(f"face {f} of tetrahedron {t} is not glued")
                d, p = g
                if not 0 <= d < n or sorted(p) != [0, 1, 2, 3]:
                    raise IntegrityError(f"face {f} of tetrahedron {t} has an invalid gluing {g}")
                if d == t and p[f] == f:
                    raise IntegrityError(f"face {f} of tetrahedron {t} is glued to itself")
                back = self.gluings[d][p[f]]
                if back is None or back[0] != t or tuple(back[1]) != perm_inverse(p):
                    raise IntegrityError(f"gluing of face {f} of tetrahedron {t} is not an involution")

    @classmethod
    def from_lists(cls, gluings, labels=None) -> "Triangulation":
        return cls(tuple(tuple((int(d), tuple(int(x) for x in p)) for d, p in faces) for faces in gluings),
                   tuple(labels) if labels else None)

    @property
    def n_tet(self) -> int:
        return len(self.gluings)

    def is_oriented(self) -> bool:
        """True when every gluing reverses the orientation induced by the vertex labels."""
        return all(perm_sign(p) == -1 for faces in self.gluings for _, p in faces)

    def orientation_signs(self) -> list[int] | None:
        o: list[int | None] = [None] * self.n_tet
        o[0] = 1
        stack = [0]
        while stack:
            t = stack.pop()
            for d, p in self.gluings[t]:
                want = -o[t] * perm_sign(p)
                if o[d] is None:
                    o[d] = want
                    stack.append(d)
                elif o[d] != want:
                    return None
        return o

    def is_orientable(self) -> bool:
        return self.orientation_signs() is not None

    def relabel(self, maps: Sequence[Perm]) -> "Triangulation":
        """Apply vertex relabelings maps[t] (old vertex -> new vertex)."""
        new = [[None] * 4 for _ in range(self.n_tet)]
        for t, faces in enumerate(self.gluings):
            for f, (d, p) in enumerate(faces):
                new[t][maps[t][f]] = (d, perm_compose(maps[d], perm_compose(p, perm_inverse(maps[t]))))
        return Triangulation.from_lists(new, self.labels)

    def oriented(self) -> "Triangulation":
        """Relabel (swapping vertices 2 and 3 where needed) so that tetrahedron 0 keeps its orientation
        and all tetrahedra are coherently oriented."""
        signs = self.orientation_signs()
        if signs is None:
            raise IntegrityError("triangulation is not orientable")
        if all(s == 1 for s in signs):
            return self
        return self.relabel([IDENTITY if s == 1 else (0, 1, 3, 2) for s in signs])

    def face_pairs(self) -> list[tuple[int, int, int, Perm]]:
        """One (t, f, d, perm) per glued face pair; the first occurrence in (t, f) order is the tail."""
        seen = set()
        out = []
        for t, faces in enumerate(self.gluings):
            for f, (d, p) in enumerate(faces):
                if (t, f) in seen:
                    continue
                seen.add((t, f))
                seen.add((d, p[f]))
                out.append((t, f, d, p))
        return out


# ----------------------------------------------------------------------------
# isomorphism signatures


def _read_int(sig: str, pos: int, nchars: int) -> int:
    if pos + nchars > len(sig):
        raise ParseError("truncated signature", pos)
    v = 0
    for k in range(nchars):
        c = sig[pos + k]
        if c not in CHAR_VALUE:
            raise ParseError(f"invalid character {c!r}", pos + k)
        v |= CHAR_VALUE[c] << (6 * k)
    return v


def _encode_int(v: int, nchars: int) -> str:
    return "".join(ALPHABET[(v >> (6 * k)) & 63] for k in range(nchars))


def parse_isosig(sig: str, orient: bool = True) -> Triangulation:
    """Decode an isomorphism signature; with ``orient`` the labels are made coherently oriented."""
    if not isinstance(sig, str) or not sig:
        raise ParseError("empty signature", 0)
    for i, c in enumerate(sig):
        if c not in CHAR_VALUE:
            raise ParseError(f"invalid character {c!r}", i)
    first = CHAR_VALUE[sig[0]]
    if first < 63:
        n, nchars, pos = first, 1, 1
    else:
        if len(sig) < 2:
            raise ParseError("truncated signature", 1)
        nchars = CHAR_VALUE[sig[1]]
        n = _read_int(sig, 2, nchars)
        pos = 2 + nchars
    if n == 0:
        raise ParseError("signature encodes no tetrahedra", 0)
    actions = []
    facets = 0
    while facets < 4 * n:
        if pos >= len(sig):
            raise ParseError("truncated face actions", pos)
        v = CHAR_VALUE[sig[pos]]
        for j in range(3):
            a = (v >> (2 * j)) & 3
            if facets == 4 * n:
                if a:
                    raise ParseError("non-zero padding in face actions", pos)
                continue
            if a == 3:
                raise ParseError("invalid face action", pos)
            actions.append(a)
            facets += 1 if a == 0 else 2
        pos += 1
    if facets != 4 * n:
        raise ParseError("face actions overrun the face count", pos)
    njoin = actions.count(2)
    dests = []
    for _ in range(njoin):
        dests.append(_read_int(sig, pos, nchars))
        pos += nchars
    perms = []
    for _ in range(njoin):
        code = _read_int(sig, pos, 1)
        if code >= 24:
            raise ParseError("invalid permutation code", pos)
        perms.append(PERM_TABLE[code])
        pos += 1
    if pos != len(sig):
        raise ParseError("trailing characters after signature", pos)
    if 0 in actions:
        raise ParseError("signature has boundary faces; ideal triangulations must be closed up", None)
    glu: list[list] = [[None] * 4 for _ in range(n)]
    nxt, ai, k = 1, 0, 0
    for t in range(n):
        for f in range(4):
            if glu[t][f] is not None:
                continue
            if ai >= len(actions):
                raise ParseError("face actions exhausted", None)
            a = actions[ai]
            ai += 1
            if a == 1:
                if nxt >= n:
                    raise ParseError("gluing refers to a tetrahedron beyond the count", None)
                glu[t][f] = (nxt, IDENTITY)
                glu[nxt][f] = (t, IDENTITY)
                nxt += 1
            else:
                d, p = dests[k], perms[k]
                k += 1
                if d >= n or glu[d][p[f]] is not None or (d == t and p[f] == f):
                    raise ParseError(f"inconsistent gluing of face {f} of tetrahedron {t}", None)
                glu[t][f] = (d, p)
                glu[d][p[f]] = (t, perm_inverse(p))
    try:
        tri = Triangulation.from_lists(glu)
    except IntegrityError as exc:
        raise ParseError(str(exc), None) from exc
    return tri.oriented() if orient and tri.is_orientable() else tri


def _encode_from(tri: Triangulation, start: int, perm0: Perm) -> str:
    n = tri.n_tet
    image = {start: 0}
    vmap = {start: perm0}  # vmap[t]: old vertex -> new vertex
    order = [start]
    seen = set()
    actions, dests, codes = [], [], []
    i = 0
    while i < len(order):
        src = order[i]
        inv_src = perm_inverse(vmap[src])
        for fi in range(4):
            if (i, fi) in seen:
                continue
            d, p = tri.gluings[src][inv_src[fi]]
            if d not in image:
                image[d] = len(order)
                order.append(d)
                vmap[d] = perm_compose(vmap[src], perm_inverse(p))
                actions.append(1)
                seen.add((i, fi))
                seen.add((image[d], fi))
                continue
            g = perm_compose(vmap[d], perm_compose(p, inv_src))
            actions.append(2)
            dests.append(image[d])
            codes.append(PERM_CODE[g])
            seen.add((i, fi))
            seen.add((image[d], g[fi]))
        i += 1
    if len(order) != n:
        raise IntegrityError("triangulation is disconnected")
    if n < 63:
        nchars = 1
        head = ALPHABET[n]
    else:
        nchars = 1
        while n >> (6 * nchars):
            nchars += 1
        head = ALPHABET[63] + ALPHABET[nchars] + _encode_int(n, nchars)
    body = ""
    for k in range(0, len(actions), 3):
        v = 0
        for j, a in enumerate(actions[k:k + 3]):
            v |= a << (2 * j)
        body += ALPHABET[v]
    return head + body + "".join(_encode_int(d, nchars) for d in dests) + "".join(ALPHABET[c] for c in codes)


def encode_isosig(tri: Triangulation) -> str:
    """Canonical signature: the smallest encoding over all starting tetrahedra and labelings."""
    return min(_encode_from(tri, t, p) for t in range(tri.n_tet) for p in PERM_TABLE)


def canonical_isosig(sig: str) -> str:
    return encode_isosig(parse_isosig(sig, orient=False))


# ----------------------------------------------------------------------------
# edges, cusps, matrices


@dataclass(frozen=True)
class EdgeStep:
    """One corner of an edge: tetrahedron, the edge's endpoints (a, b), and the face the walk exits by."""
    tet: int
    a: int
    b: int
    exit_face: int
    entry_face: int


@dataclass(frozen=True)
class EdgeOrbit:
    id: int
    steps: tuple[EdgeStep, ...]

    @property
    def members(self) -> list[tuple[int, tuple[int, int]]]:
        return [(s.tet, (s.a, s.b)) for s in self.steps]

    @property
    def degree(self) -> int:
        return len(self.steps)


def edge_orbits(tri: Triangulation) -> list[EdgeOrbit]:
    """Edge classes with the corners listed in cyclic order around the edge."""
    seen = set()
    orbits = []
    for t in range(tri.n_tet):
        for a, b in TET_EDGES:
            if (t, frozenset((a, b))) in seen:
                continue
            c, d = [v for v in range(4) if v not in (a, b)]
            start = (t, a, b, c, d)
            cur = start
            steps = []
            while True:
                tt, a1, b1, c1, d1 = cur
                if (tt, frozenset((a1, b1))) in seen and cur != start:
                    raise IntegrityError("edge walk revisits a corner before closing")
                seen.add((tt, frozenset((a1, b1))))
                # leave through the face opposite c1, arriving through the face opposite d1's image
                nt, p = tri.gluings[tt][c1]
                steps.append(EdgeStep(tt, a1, b1, c1, d1))
                cur = (nt, p[a1], p[b1], p[d1], p[c1])
                if cur == start:
                    break
                if len(steps) > 6 * tri.n_tet:
                    raise IntegrityError("edge walk does not close")
            orbits.append(EdgeOrbit(len(orbits), tuple(steps)))
    return orbits


def vertex_classes(tri: Triangulation) -> dict[tuple[int, int], int]:
    """Cusp index of each (tetrahedron, vertex) flag, via union-find."""
    parent = {(t, v): (t, v) for t in range(tri.n_tet) for v in range(4)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, faces in enumerate(tri.gluings):
        for f, (d, p) in enumerate(faces):
            for v in range(4):
                if v != f:
                    ra, rb = find((t, v)), find((d, p[v]))
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
    roots = {}
    out = {}
    for key in sorted(parent):
        r = find(key)
        out[key] = roots.setdefault(r, len(roots))
    return out


def num_cusps(tri: Triangulation) -> int:
    return len(set(vertex_classes(tri).values()))


def gluing_matrices(tri: Triangulation) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """(G, G', G''): entry [i][j] counts corners of tetrahedron j around edge i with shape z, z', z''."""
    tri = tri.oriented()
    orbits = edge_orbits(tri)
    n = tri.n_tet
    mats = [[[0] * n for _ in orbits] for _ in range(3)]
    for o in orbits:
        for s in o.steps:
            mats[QUAD_OF_EDGE[frozenset((s.a, s.b))]][o.id][s.tet] += 1
    return mats[0], mats[1], mats[2]


def cusp_incidence(tri: Triangulation) -> list[list[int]]:
    """K[l][i]: number of ends of edge i at cusp l."""
    tri = tri.oriented()
    cls = vertex_classes(tri)
    k = len(set(cls.values()))
    orbits = edge_orbits(tri)
    K = [[0] * len(orbits) for _ in range(k)]
    for o in orbits:
        s = o.steps[0]
        K[cls[(s.tet, s.a)]][o.id] += 1
        K[cls[(s.tet, s.b)]][o.id] += 1
    return K


@dataclass(frozen=True)
class DualEdge:
    """Dual 1-cell through a glued face pair, oriented from ``tail`` to ``head``."""
    index: int
    tail: int
    tail_face: int
    head: int
    head_face: int
    perm: Perm


@dataclass(frozen=True)
class DualGraph:
    n_vertices: int
    edges: tuple[DualEdge, ...]
    # per edge orbit: the signed dual edges crossed, in the cyclic order of the orbit's steps
    edge_cycles: tuple[tuple[tuple[int, int], ...], ...]
    face_to_edge: dict = field(default_factory=dict, compare=False, hash=False)

    def crossing(self, tet: int, face: int) -> tuple[int, int]:
        """(dual edge index, +1 if leaving tet through face goes tail -> head, else -1)."""
        return self.face_to_edge[(tet, face)]


def dual_graph(tri: Triangulation) -> DualGraph:
    tri = tri.oriented()
    edges = []
    face_to_edge = {}
    for t, f, d, p in tri.face_pairs():
        e = DualEdge(len(edges), t, f, d, p[f], p)
        edges.append(e)
        face_to_edge[(t, f)] = (e.index, 1)
        face_to_edge[(d, p[f])] = (e.index, -1)
    cycles = tuple(tuple(face_to_edge[(s.tet, s.exit_face)] for s in o.steps) for o in edge_orbits(tri))
    return DualGraph(tri.n_tet, tuple(edges), cycles, face_to_edge)


# ----------------------------------------------------------------------------
# Neumann-Zagier data files


@dataclass
class GluingSystem:
    G: list[list[int]]
    Gp: list[list[int]]
    Gpp: list[list[int]]
    C: list[list[int]]
    Cp: list[list[int]]
    Cpp: list[list[int]]
    K: list[list[int]]

    @property
    def N(self) -> int:
        return len(self.G[0]) if self.G else 0

    @property
    def k(self) -> int:
        return len(self.K)

    def __post_init__(self):
        N = len(self.G)
        for name in ("G", "Gp", "Gpp"):
            m = getattr(self, name)
            if len(m) != N or any(len(r) != N for r in m):
                raise IntegrityError(f"{name} must be {N}x{N}")
            for j in range(N):
                s = sum(m[i][j] for i in range(N))
                if s != 2:
                    raise IntegrityError(f"column {j} of {name} sums to {s}, expected 2")
        nc = len(self.C)
        for name in ("C", "Cp", "Cpp"):
            m = getattr(self, name)
            if len(m) != nc or any(len(r) != N for r in m):
                raise IntegrityError(f"{name} must have {nc} rows of length {N}")
        for i, r in enumerate(self.K):
            if len(r) != N or any(x not in (0, 1, 2) for x in r):
                raise IntegrityError(f"row {i} of K has entries outside {{0,1,2}}")
        for j in range(N):
            s = sum(r[j] for r in self.K)
            if self.K and s != 2:
                raise IntegrityError(f"column {j} of K sums to {s}, expected 2")

    def to_json(self) -> dict:
        return {"G": self.G, "Gp": self.Gp, "Gpp": self.Gpp, "C": self.C, "Cp": self.Cp, "Cpp": self.Cpp, "K": self.K}


def _canonical_key(G, Gp, Gpp):
    """Smallest relabeling of the edge-equation matrices under tetrahedron permutations,
    cyclic quad rotations per tetrahedron and edge reordering."""
    N = len(G[0])
    mats = (G, Gp, Gpp)
    best = None
    for perm in itertools.permutations(range(N)):
        for shifts in itertools.product(range(3), repeat=N):
            rows = []
            for i in range(len(G)):
                rows.append(tuple(mats[(q + shifts[j]) % 3][i][perm[j]] for q in range(3) for j in range(N)))
            key = tuple(sorted(rows))
            if best is None or key < best:
                best = key
    return best


def same_up_to_relabeling(a, b) -> bool:
    if len(a[0]) != len(b[0]) or len(a[0][0]) != len(b[0][0]):
        return False
    if len(a[0][0]) > 6:
        return tuple(map(str, a)) == tuple(map(str, b))
    return _canonical_key(*a) == _canonical_key(*b)


@dataclass
class NZData:
    triangulation: Triangulation | None
    gluing: GluingSystem
    isosig: str | None = None
    theta_note: str = ""
    labels_match: bool = True
    extra: dict = field(default_factory=dict)


def _int_matrix(data, name) -> list[list[int]]:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise IntegrityError(f"{name} must be a list of integer rows")
    out = []
    for r in data:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise IntegrityError(f"{name} must contain integers only")
        out.append(list(r))
    return out


def nz_from_dict(doc: dict) -> NZData:
    if not isinstance(doc, dict):
        raise IntegrityError("nzdata document must be a JSON object")
    for key in ("n_tet", "k", "G", "Gp", "Gpp", "C", "Cp", "Cpp"):
        if key not in doc:
            raise IntegrityError(f"missing field {key!r}")
    n = doc["n_tet"]
    k = doc["k"]
    if not isinstance(n, int) or n < 1 or not isinstance(k, int) or k < 1:
        raise IntegrityError("n_tet and k must be positive integers")
    mats = {name: _int_matrix(doc[name], name) for name in ("G", "Gp", "Gpp", "C", "Cp", "Cpp")}
    tri = None
    sig = doc.get("isosig")
    labels_match = True
    if doc.get("gluings") is not None:
        g = doc["gluings"]
        if len(g) == 4 * n and all(len(x) == 2 and isinstance(x[0], int) for x in g):
            g = [g[4 * t:4 * t + 4] for t in range(n)]
        try:
            tri = Triangulation.from_lists(g)
        except (TypeError, ValueError) as exc:
            raise IntegrityError(f"invalid gluings: {exc}") from exc
    elif sig is not None:
        try:
            tri = parse_isosig(sig)
        except ParseError as exc:
            raise IntegrityError(f"invalid isosig: {exc}") from exc
    if tri is not None:
        if tri.n_tet != n:
            raise IntegrityError(f"n_tet is {n} but the triangulation has {tri.n_tet} tetrahedra")
        computed = gluing_matrices(tri)
        given = (mats["G"], mats["Gp"], mats["Gpp"])
        if computed != given:
            if doc.get("gluings") is not None or not same_up_to_relabeling(computed, given):
                for name, a, b in zip(("G", "Gp", "Gpp"), computed, given):
                    for i, (ra, rb) in enumerate(zip(a, b)):
                        for j, (x, y) in enumerate(zip(ra, rb)):
                            if x != y:
                                raise IntegrityError(f"{name}[{i}][{j}] is {y} but the triangulation gives {x}")
                raise IntegrityError("gluing matrices disagree with the triangulation")
            labels_match = False
        K = cusp_incidence(tri)
        if len(K) != k:
            raise IntegrityError(f"k is {k} but the triangulation has {len(K)} cusps")
        if not labels_match:
            K = doc.get("K") or K
    else:
        K = doc.get("K")
        if K is None:
            if k != 1:
                raise IntegrityError("K must be supplied when there are several cusps and no triangulation")
            K = [[2] * n]
    gs = GluingSystem(mats["G"], mats["Gp"], mats["Gpp"], mats["C"], mats["Cp"], mats["Cpp"], _int_matrix(K, "K"))
    if gs.N != n:
        raise IntegrityError(f"matrices have {gs.N} columns but n_tet is {n}")
    known = {"n_tet", "k", "isosig", "gluings", "G", "Gp", "Gpp", "C", "Cp", "Cpp", "K", "theta_note"}
    return NZData(tri, gs, sig, doc.get("theta_note", ""), labels_match, {x: doc[x] for x in doc if x not in known})


def load_nz_json(path: str | Path) -> NZData:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"{path}: not valid JSON ({exc})") from exc
    return nz_from_dict(doc)


def nz_to_dict(data: NZData) -> dict:
    gs = data.gluing
    doc = {"n_tet": gs.N, "k": gs.k}
    if data.isosig:
        doc["isosig"] = data.isosig
    if data.triangulation is not None:
        doc["gluings"] = [[[d, list(p)] for d, p in faces] for faces in data.triangulation.gluings]
    doc.update({"G": gs.G, "Gp": gs.Gp, "Gpp": gs.Gpp, "C": gs.C, "Cp": gs.Cp, "Cpp": gs.Cpp,
                "K": gs.K, "theta_note": data.theta_note})
    doc.update(data.extra)
    return doc


def gluing_system(tri: Triangulation, C, Cp, Cpp) -> GluingSystem:
    G, Gp, Gpp = gluing_matrices(tri)
    return GluingSystem(G, Gp, Gpp, C, Cp, Cpp, cusp_incidence(tri))
