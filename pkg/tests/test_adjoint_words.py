import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adjtorsion.errors import ParseError
from adjtorsion.exact_algebra import RatFunc
from adjtorsion.adjoint import (C, H, R, MobiusWord, ad_of_word, chart_word, coords_to_matrix, det3,
                                parse_word, traceless_coords, weil_cocycle, word_matrix)
from adjtorsion.adjoint.words import INF, ONE, SHAPE, ZERO, mat2_mul, mat3_apply
from adjtorsion.gluing import ShapeVector, zeta

REFERENCE_WORDS = ["H(z'1)^-1 C R H(z2)^-1 C R", "R C H(z''1*z'2)^-1", "", "C H(z1) R C H(z''2) C"]
Z_NUM = ShapeVector([0.3 + 0.9j, -0.4 + 0.6j])


def random_word(rng: random.Random, n_tet=2, length=6) -> MobiusWord:
    letters = []
    for _ in range(rng.randint(0, length)):
        kind = rng.choice("CRHH")
        if kind == "H":
            factors = [(rng.randint(0, 2), rng.randrange(n_tet), rng.choice([1, 1, -1, 2]))
                       for _ in range(rng.randint(1, 2))]
            letters.append(H(*factors, power=rng.choice([1, -1])))
        else:
            letters.append(C if kind == "C" else R)
    return MobiusWord(tuple(letters))


def numeric(m):
    return np.array([[complex(x) for x in r] for r in m])


def test_empty_word_acts_trivially():
    z = ShapeVector.generic(2)
    ad = ad_of_word(MobiusWord(), z)
    assert all(ad[i][j] == (1 if i == j else 0) for i in range(3) for j in range(3))


def test_diagonal_letter():
    z = ShapeVector.generic(2)
    ad = ad_of_word(MobiusWord((H((0, 0, 1)),)), z)
    z1 = RatFunc.variable(2, 0)
    assert [ad[i][i] for i in range(3)] == [z1, 1, 1 / z1]
    assert all(ad[i][j] == 0 for i in range(3) for j in range(3) if i != j)


@pytest.mark.parametrize("text", REFERENCE_WORDS)
def test_parse_and_format_round_trip(text):
    w = parse_word(text, 2)
    assert parse_word(w.format(), 2) == w
    assert len(w) == len(text.split())


@pytest.mark.parametrize("bad", ["X", "H(q1)", "H(z1", "C R H(z3)"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_word(bad, 2)


def test_free_reduction():
    w = parse_word("C C R H(z1) H(z1)^-1 R", 2)
    assert w.reduced() == MobiusWord()
    assert (w + w.inverse()).reduced() == MobiusWord()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=50, deadline=None)
def test_adjoint_determinant_is_one(seed):
    w = random_word(random.Random(seed))
    assert det3(ad_of_word(w, ShapeVector.generic(2))) == 1
    assert abs(det3(ad_of_word(w, Z_NUM)) - 1) < 1e-12


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_adjoint_is_conjugation(seed):
    rng = random.Random(seed)
    w = random_word(rng)
    m = numeric(word_matrix(w, Z_NUM))
    v = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
    direct = traceless_coords(m @ numeric(coords_to_matrix(v)) @ np.linalg.inv(m))
    assert np.allclose(mat3_apply(ad_of_word(w, Z_NUM), v), direct, atol=1e-10)


def test_inverse_word_gives_inverse_matrix():
    w = parse_word(REFERENCE_WORDS[0], 2)
    prod = mat2_mul(word_matrix(w, Z_NUM), word_matrix(w.inverse(), Z_NUM))
    assert np.allclose(numeric(prod) / prod[0][0], np.eye(2))


def test_weil_cocycle_of_single_letter():
    z = ShapeVector.generic(2)
    zt = zeta(z)
    assert weil_cocycle(MobiusWord((H((0, 0, 1)),)), 0, z) == [0, zt.zeta[0], 0]
    assert weil_cocycle(MobiusWord((H((0, 0, 1)),)), 1, z) == [0, 0, 0]
    assert weil_cocycle(parse_word("C R C", 2), 0, z) == [0, 0, 0]


def test_weil_cocycle_product_rule_on_random_pairs():
    rng = random.Random(99)
    zs = ShapeVector.generic(2)
    for _ in range(100):
        a, b = random_word(rng, length=4), random_word(rng, length=4)
        for j in range(2):
            for z, exact in ((zs, True), (Z_NUM, False)):
                lhs = weil_cocycle(a + b, j, z)
                rhs = [x + y for x, y in zip(weil_cocycle(a, j, z), mat3_apply(ad_of_word(a, z), weil_cocycle(b, j, z)))]
                if exact:
                    assert all((x - y).is_zero() for x, y in zip(lhs, rhs))
                else:
                    assert max(abs(x - y) for x, y in zip(lhs, rhs)) < 1e-10


@pytest.mark.parametrize("text", REFERENCE_WORDS)
@pytest.mark.parametrize("j", [0, 1])
def test_weil_cocycle_matches_finite_differences(text, j):
    w = parse_word(text, 2)
    h = 1e-6
    zs = list(Z_NUM.z)
    up, dn = list(zs), list(zs)
    up[j] += h
    dn[j] -= h
    dW = (numeric(word_matrix(w, ShapeVector(up))) - numeric(word_matrix(w, ShapeVector(dn)))) / (2 * h)
    fd = traceless_coords(dW @ np.linalg.inv(numeric(word_matrix(w, Z_NUM))))
    ours = weil_cocycle(w, j, Z_NUM)
    scale = max(1.0, max(abs(x) for x in fd))
    assert max(abs(a - b) for a, b in zip(ours, fd)) / scale < 1e-6


def _mobius(m, p):
    a, b = m[0]
    c, d = m[1]
    if p == "inf":
        return a / c if abs(c) > 1e-14 else "inf"
    den = c * p + d
    return (a * p + b) / den if abs(den) > 1e-14 else "inf"


POINTS = (INF, ZERO, ONE, SHAPE)


@pytest.mark.parametrize("chosen", list(itertools.permutations(POINTS, 3)))
def test_chart_words_send_the_standard_triple_to_the_chosen_points(chosen):
    z = ShapeVector([0.3 + 0.7j])
    m = numeric(word_matrix(chart_word(chosen, 0), z))
    value = {INF: "inf", ZERO: 0, ONE: 1, SHAPE: z.z[0]}
    for src, dst in zip(("inf", 0, 1), chosen):
        got = _mobius(m, src)
        want = value[dst]
        if want == "inf" or got == "inf":
            assert got == want
        else:
            assert abs(got - want) < 1e-12
