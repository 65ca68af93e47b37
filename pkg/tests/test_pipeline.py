import numpy as np
import pytest

from adjtorsion.adjoint import (develop_spine, gluing_complex, gluing_complex_torsion, one_loop, tor2_pipeline,
                                verify_commutative_square, verify_reduced)
from adjtorsion.errors import IntegrityError
from adjtorsion.flattening import Flattening
from adjtorsion.gluing import ShapeVector, big_g, newton_solve, principal_gluing_ideal
from adjtorsion.torsion_core import torsion
from adjtorsion.triangulation import nz_from_dict, nz_to_dict

from test_flattening import all_flattenings

REFERENCE = Flattening.of([0, 1], [1, 0], [0, 0])
START = [0.5 + 0.8j] * 2
POINTS = [0, 0.1, 0.3, 0.2j, -0.15 + 0.1j, 0.2 - 0.2j]


@pytest.fixture(scope="module")
def solutions(m003):
    return {u: newton_solve(m003.gluing, [u], START) for u in POINTS}


@pytest.fixture(scope="module")
def report(m003):
    return verify_reduced(m003)


# ----------------------------------------------------------------------------
# 1-loop


def test_one_loop_is_nonzero(m003, solutions):
    for z in solutions.values():
        assert abs(one_loop(m003.gluing, REFERENCE, z)) > 1e-12


def test_one_loop_at_complete_structure(m003, solutions):
    val = one_loop(m003.gluing, REFERENCE, solutions[0])
    assert abs(abs(val) - np.sqrt(3)) < 1e-12


def test_one_loop_symbolic_then_substituted_matches_numeric(m003, solutions):
    exact = one_loop(m003.gluing, REFERENCE, ShapeVector.generic(2))
    for z in solutions.values():
        assert abs(exact.evaluate(z.z) - one_loop(m003.gluing, REFERENCE, z)) < 1e-12


def test_one_loop_is_independent_of_the_flattening(m003, solutions):
    fls = all_flattenings(m003.gluing, radius=1)
    assert len(fls) > 2
    for z in solutions.values():
        ref = one_loop(m003.gluing, REFERENCE, z)
        for fl in fls:
            val = one_loop(m003.gluing, fl, z)
            assert min(abs(val - ref), abs(val + ref)) < 1e-9


def test_one_loop_is_independent_of_the_dropped_row(m003, solutions):
    for z in solutions.values():
        a = one_loop(m003.gluing, REFERENCE, z, [0])
        b = one_loop(m003.gluing, REFERENCE, z, [1])
        assert min(abs(a - b), abs(a + b)) < 1e-9


def test_one_loop_rejects_points_off_the_variety(m003):
    from adjtorsion.errors import DomainError
    with pytest.raises(DomainError):
        one_loop(m003.gluing, REFERENCE, ShapeVector([0.4 + 0.8j, 0.5 + 0.8j]))


def test_one_loop_rejects_invalid_flattening(m003, solutions):
    with pytest.raises(IntegrityError):
        one_loop(m003.gluing, Flattening.of([1, 1], [0, 0], [0, 0]), solutions[0.1])


# ----------------------------------------------------------------------------
# tangential gluing complex


def test_gluing_complex_torsion_is_half_det(m003, solutions):
    for z in solutions.values():
        res = gluing_complex_torsion(m003.gluing, z)
        assert min(abs(res.ratio - 1), abs(res.ratio + 1)) < 1e-8
        assert abs(res.det_a[2] - 0.5) < 1e-15
        assert res.lower_triangular_defect < 1e-8


def test_gluing_complex_torsion_via_generic_torsion(m003, solutions):
    for u in (0.1, 0.2j):
        z = solutions[u]
        generic = torsion(gluing_complex(m003.gluing, z))
        half = 0.5 * np.linalg.det(np.asarray(big_g(m003.gluing, z)))
        assert min(abs(generic / half - 1), abs(generic / half + 1)) < 1e-6


# ----------------------------------------------------------------------------
# commutative square


@pytest.mark.parametrize("source", ["fixture", "automatic"])
def test_commutative_square(m003, solutions, source):
    words = m003.extra["words"] if source == "fixture" else None
    sp = develop_spine(m003.triangulation, words)
    assert verify_commutative_square(sp, m003.gluing, solutions[0.1]) < 1e-8
    assert verify_commutative_square(sp, m003.gluing, solutions[0.1], tangent=[0, 0]) == 0
    assert verify_commutative_square(sp, m003.gluing, solutions[0.1], flip_edge=1) > 1e-2


# ----------------------------------------------------------------------------
# exact verification


def test_verify_reduced_m003(report):
    cert = report.certificate
    assert report.verdict
    assert cert.sign in (1, -1)
    ratio = cert.det_A / cert.pi_zeta
    assert ratio.num - ratio.den.scale(cert.sign) == cert.quotient_poly * cert.generator


def test_certificate_json(report):
    doc = report.to_json()
    assert doc["verdict"] is True
    assert set(doc["certificate"]) >= {"det_A", "pi_zeta", "sign", "quotient_poly", "verdict"}


def test_det_a_is_plus_minus_pi_zeta_on_the_variety(m003, report, solutions):
    cert = report.certificate
    for u, z in solutions.items():
        if u == 0:
            continue
        a = cert.det_A.evaluate(z.z)
        p = cert.pi_zeta.evaluate(z.z)
        assert abs(a / p - cert.sign) < 1e-8


def test_complete_structure_is_a_removable_point_of_the_representative(m003, report, solutions):
    # numerator and denominator of the chosen representative both vanish there; the limit is still +-1
    cert = report.certificate
    ratio = cert.det_A / cert.pi_zeta
    z = solutions[0]
    assert abs(complex(ratio.num.evaluate(z.z))) < 1e-10 and abs(complex(ratio.den.evaluate(z.z))) < 1e-10
    for eps in (1e-3, 1e-3j):
        near = newton_solve(m003.gluing, [eps], START)
        assert abs(ratio.evaluate(near.z) - cert.sign) < 1e-6


def test_automatic_development_gives_the_same_verdict(m003, report):
    auto = verify_reduced(m003, automatic=True)
    assert auto.verdict == report.verdict
    assert auto.certificate.sign == report.certificate.sign


def test_corrupted_word_fails_before_pipeline(m003):
    doc = nz_to_dict(m003)
    doc["words"] = [dict(w) for w in doc["words"]]
    doc["words"][2]["word"] = "C H(z1) R C H(z2) C"
    with pytest.raises(IntegrityError, match="development inconsistent"):
        verify_reduced(nz_from_dict(doc))


def test_wrong_flattening_is_rejected_before_pipeline(m003):
    with pytest.raises(IntegrityError, match="invalid flattening"):
        verify_reduced(m003, flattening=Flattening.of([1, 0], [0, 1], [0, 0]))


def test_pipeline_reports_a_false_verdict_for_a_wrong_monomial(m003):
    # a flattening-like vector that is not strong changes the monomial; bypass the gate on purpose
    sp = develop_spine(m003.triangulation, m003.extra["words"])
    cert = tor2_pipeline(sp, m003.gluing, Flattening.of([1, 0], [0, 1], [0, 0]),
                         principal_gluing_ideal(m003.gluing))
    assert cert.verdict is False and cert.sign is None
