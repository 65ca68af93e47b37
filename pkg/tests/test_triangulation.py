import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adjtorsion.errors import IntegrityError, ParseError
from adjtorsion.triangulation import (PERM_TABLE, GluingSystem, Triangulation, canonical_isosig, cusp_incidence,
                                      dual_graph, edge_orbits, encode_isosig, gluing_matrices, load_nz_json,
                                      nz_from_dict, nz_to_dict, num_cusps, parse_isosig, perm_compose, perm_inverse,
                                      perm_sign, same_up_to_relabeling, vertex_classes)

# census signatures: m003, m004 and two three-tetrahedron examples
SIGS = ["cPcbbbdxm", "cPcbbbiht", "dLQbcccdero", "dLQacccjsnk"]
REFERENCE_G = [[2, 1], [0, 1]]
REFERENCE_GP = [[1, 0], [1, 2]]
REFERENCE_GPP = [[0, 2], [2, 0]]


def random_triangulation(rng: random.Random, n: int) -> Triangulation:
    """Random connected face pairing with random gluing permutations (not necessarily a manifold)."""
    while True:
        faces = [(t, f) for t in range(n) for f in range(4)]
        rng.shuffle(faces)
        glu = [[None] * 4 for _ in range(n)]
        for (t, f), (d, g) in zip(faces[::2], faces[1::2]):
            rest = [x for x in range(4) if x != g]
            rng.shuffle(rest)
            p = [None] * 4
            p[f] = g
            for v, img in zip([x for x in range(4) if x != f], rest):
                p[v] = img
            glu[t][f] = (d, tuple(p))
            glu[d][g] = (t, perm_inverse(p))
        tri = Triangulation.from_lists(glu)
        seen, stack = {0}, [0]
        while stack:
            for d, _ in tri.gluings[stack.pop()]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        if len(seen) == n:
            return tri


def shuffle_labels(rng: random.Random, tri: Triangulation) -> Triangulation:
    """Random tetrahedron permutation plus random vertex relabelings."""
    n = tri.n_tet
    order = list(range(n))
    rng.shuffle(order)
    moved = [None] * n
    for t, faces in enumerate(tri.gluings):
        moved[order[t]] = [(order[d], p) for d, p in faces]
    out = Triangulation.from_lists(moved)
    return out.relabel([rng.choice(PERM_TABLE) for _ in range(n)])


def test_perm_table_is_lexicographic():
    assert PERM_TABLE == sorted(itertools.permutations(range(4)))
    assert len(PERM_TABLE) == 24


@given(st.sampled_from(PERM_TABLE), st.sampled_from(PERM_TABLE))
def test_perm_algebra(a, b):
    assert perm_compose(a, perm_inverse(a)) == (0, 1, 2, 3)
    assert perm_sign(perm_compose(a, b)) == perm_sign(a) * perm_sign(b)


@pytest.mark.parametrize("sig", SIGS)
def test_census_signatures_round_trip(sig):
    tri = parse_isosig(sig, orient=False)
    assert encode_isosig(tri) == sig
    assert canonical_isosig(sig) == sig


@pytest.mark.parametrize("sig", SIGS)
def test_census_manifolds_are_one_cusped_with_n_edges(sig):
    tri = parse_isosig(sig)
    assert tri.is_oriented()
    edges = edge_orbits(tri)
    assert len(edges) == tri.n_tet
    assert sum(e.degree for e in edges) == 6 * tri.n_tet
    assert num_cusps(tri) == 1
    G, Gp, Gpp = gluing_matrices(tri)
    for m in (G, Gp, Gpp):
        assert [sum(col) for col in zip(*m)] == [2] * tri.n_tet


def test_m003_combinatorics():
    tri = parse_isosig("cPcbbbdxm")
    assert tri.n_tet == 2
    assert [e.degree for e in edge_orbits(tri)] == [6, 6]
    assert gluing_matrices(tri) == (REFERENCE_G, REFERENCE_GP, REFERENCE_GPP)
    assert cusp_incidence(tri) == [[2, 2]]


def test_relabeling_group_identifies_rotated_quads():
    rotated = ([r[::-1] for r in REFERENCE_G][::-1], [r[::-1] for r in REFERENCE_GP][::-1], [r[::-1] for r in REFERENCE_GPP][::-1])
    assert same_up_to_relabeling((REFERENCE_G, REFERENCE_GP, REFERENCE_GPP), rotated)
    cyc = (REFERENCE_GP, REFERENCE_GPP, REFERENCE_G)
    assert same_up_to_relabeling((REFERENCE_G, REFERENCE_GP, REFERENCE_GPP), cyc)
    assert not same_up_to_relabeling((REFERENCE_G, REFERENCE_GP, REFERENCE_GPP), ([[2, 2], [0, 0]], REFERENCE_GP, [[0, 0], [2, 2]]))


@given(st.integers(1, 5), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_signature_is_a_relabeling_invariant(n, seed):
    rng = random.Random(seed)
    tri = random_triangulation(rng, n)
    sig = encode_isosig(tri)
    assert encode_isosig(shuffle_labels(rng, tri)) == sig
    assert encode_isosig(parse_isosig(sig, orient=False)) == sig


def test_large_triangulations_use_the_long_header():
    rng = random.Random(7)
    tri = random_triangulation(rng, 64)
    sig = encode_isosig(tri)
    assert sig[0] == "-"  # value 63 announces an explicit size field
    back = parse_isosig(sig, orient=False)
    assert back.n_tet == 64
    assert encode_isosig(back) == sig


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_orientation_makes_every_gluing_odd(n, seed):
    tri = random_triangulation(random.Random(seed), n)
    if tri.is_orientable():
        assert tri.oriented().is_oriented()
    else:
        with pytest.raises(IntegrityError):
            tri.oriented()


@pytest.mark.parametrize("sig", SIGS)
def test_dual_graph_cycles_cover_every_face_pair_three_times(sig):
    tri = parse_isosig(sig)
    g = dual_graph(tri)
    assert len(g.edges) == 2 * tri.n_tet
    counts = [0] * len(g.edges)
    for cycle in g.edge_cycles:
        for r, s in cycle:
            assert s in (1, -1)
            counts[r] += 1
    assert counts == [3] * len(g.edges)  # a face lies on three edges


def test_m003_dual_edges():
    g = dual_graph(parse_isosig("cPcbbbdxm"))
    assert [(e.tail, e.tail_face, e.head, e.head_face) for e in g.edges] == [
        (0, 0, 1, 0), (0, 1, 1, 3), (0, 2, 1, 1), (0, 3, 1, 2)]


def test_vertex_classes_of_m003_form_one_cusp():
    cls = vertex_classes(parse_isosig("cPcbbbdxm"))
    assert len(cls) == 8 and len(set(cls.values())) == 1


@pytest.mark.parametrize("bad, offset", [("", 0), ("c", None), ("cP!bbbdxm", 2), ("cPcbbbdx", None)])
def test_parse_errors(bad, offset):
    with pytest.raises(ParseError) as info:
        parse_isosig(bad)
    if offset is not None:
        assert info.value.offset == offset


def test_non_involutive_gluing_is_rejected():
    with pytest.raises(IntegrityError):
        Triangulation.from_lists([[(0, (1, 0, 2, 3)), (0, (1, 0, 3, 2)), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2))]])


# ----------------------------------------------------------------------------
# NZ fixtures


def test_m003_fixture_loads_and_round_trips(m003, tmp_path):
    assert m003.gluing.N == 2 and m003.gluing.k == 1
    assert m003.labels_match
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(nz_to_dict(m003)))
    again = load_nz_json(path)
    assert again.gluing == m003.gluing
    assert again.extra["words"] == m003.extra["words"]


def test_fixture_with_wrong_matrix_entry_is_rejected(m003):
    doc = nz_to_dict(m003)
    doc.pop("isosig")
    doc["G"] = [[2, 0], [0, 2]]
    doc["Gpp"] = [[0, 2], [2, 0]]
    with pytest.raises(IntegrityError):
        nz_from_dict(doc)


def test_isosig_only_fixture_accepts_relabeled_matrices(m003):
    doc = nz_to_dict(m003)
    doc.pop("gluings")
    doc["G"], doc["Gp"], doc["Gpp"] = REFERENCE_GP, REFERENCE_GPP, REFERENCE_G
    data = nz_from_dict(doc)
    assert not data.labels_match


def test_gluing_system_validates_column_sums():
    with pytest.raises(IntegrityError):
        GluingSystem([[1, 1], [0, 1]], REFERENCE_GP, REFERENCE_GPP, [[0, 0]], [[0, 0]], [[0, 0]], [[2, 2]])


@pytest.mark.parametrize("missing", ["G", "C", "n_tet"])
def test_fixture_missing_fields(m003, missing):
    doc = nz_to_dict(m003)
    del doc[missing]
    with pytest.raises(IntegrityError):
        nz_from_dict(doc)
