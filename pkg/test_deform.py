import math

import numpy as np
import pytest

from deform import (
    BOLZA_SYSTOLE,
    AffineDeformation,
    Cocycle,
    Representation,
    affine_apply,
    calibrate_genus2,
    coboundary,
    coboundary_basis,
    cocycle_basis,
    cocycle_eval,
    cohomology_complement_basis,
    cohomology_dimensions,
    cyclic_rep,
    random_cocycle,
    relator_constraint_matrix,
    schottky_rep,
    translation_cocycle,
    verify_rep,
)
from errors import DegenerateRepresentation, IndexOutOfRange, NotInSL2
from sl2rep import IDENTITY, displacement_length, rho, rotation
from words import evaluate, invert, multiply, parse_word

WORDS = ["a", "B", "ab", "aBc", "dcBA", "abAB", "cdCDab", "AAbcD"]


def _random_values(rng, rank):
    return Cocycle(rng.normal(size=(rank, 3)))


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def test_representation_validates_generators():
    with pytest.raises(NotInSL2):
        Representation(gens=(np.diag([2.0, 1.0]),))
    with pytest.raises(IndexOutOfRange):
        Representation(gens=(np.eye(2),), relators=(parse_word("ab"),))
    with pytest.raises(ValueError):
        Representation(gens=())


def test_representation_accepts_elliptic_generators():
    rep = Representation(gens=(rotation(1.0),))
    assert rep.rank == 1


def test_cocycle_shape_and_immutability():
    c = Cocycle([[1.0, 2.0, 3.0]])
    assert c.rank == 1
    with pytest.raises(ValueError):
        c.values[0, 0] = 5.0
    with pytest.raises(ValueError):
        Cocycle([[1.0, 2.0]])
    with pytest.raises(ValueError):
        Cocycle([[np.nan, 0.0, 0.0]])


def test_deformation_rank_must_match(schottky):
    with pytest.raises(ValueError):
        AffineDeformation(schottky, Cocycle([[1.0, 0.0, 0.0]]))


# ---------------------------------------------------------------------------
# Cocycle evaluation and affine action
# ---------------------------------------------------------------------------

def test_cocycle_eval_empty_word(schottky_translation):
    assert np.array_equal(cocycle_eval(schottky_translation, ()), np.zeros(3))


def test_cocycle_rule(genus2, rng):
    d = AffineDeformation(genus2, _random_values(rng, 4))
    for s in WORDS:
        for t in WORDS:
            w1, w2 = parse_word(s), parse_word(t)
            lhs = cocycle_eval(d, multiply(w1, w2))
            rhs = cocycle_eval(d, w1) + rho(evaluate(w1, genus2.gens)) @ cocycle_eval(d, w2)
            assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * max(1.0, np.abs(rhs).max()))


def test_cocycle_of_inverse(genus2, rng):
    d = AffineDeformation(genus2, _random_values(rng, 4))
    for s in WORDS:
        w = parse_word(s)
        expected = -np.linalg.solve(rho(evaluate(w, genus2.gens)), cocycle_eval(d, w))
        assert np.allclose(cocycle_eval(d, invert(w)), expected, rtol=1e-8, atol=1e-9 * np.abs(expected).max())


def test_cocycle_eval_is_linear_in_the_cocycle(schottky, rng):
    c1, c2 = _random_values(rng, 2), _random_values(rng, 2)
    w = parse_word("abAAb")
    total = cocycle_eval(AffineDeformation(schottky, c1.scaled(2.0) + c2), w)
    parts = 2.0 * cocycle_eval(AffineDeformation(schottky, c1), w) + cocycle_eval(
        AffineDeformation(schottky, c2), w
    )
    assert np.allclose(total, parts)


def test_coboundary_values(genus2):
    v = np.array([0.2, -0.5, 1.3])
    d = AffineDeformation(genus2, coboundary(genus2, v))
    for s in WORDS:
        w = parse_word(s)
        expected = v - rho(evaluate(w, genus2.gens)) @ v
        assert np.allclose(cocycle_eval(d, w), expected, rtol=1e-9, atol=1e-9)


def test_coboundary_action_fixes_its_vector(genus2):
    v = np.array([0.7, 0.1, -0.4])
    d = AffineDeformation(genus2, coboundary(genus2, v))
    for s in WORDS:
        assert np.allclose(affine_apply(d, parse_word(s), v), v, atol=1e-8)


def test_affine_action_is_a_homomorphism(schottky_translation, rng):
    x = rng.normal(size=3)
    u, v = parse_word("aB"), parse_word("bba")
    lhs = affine_apply(schottky_translation, multiply(u, v), x)
    rhs = affine_apply(schottky_translation, u, affine_apply(schottky_translation, v, x))
    assert np.allclose(lhs, rhs, rtol=1e-10)


def test_cocycle_eval_rejects_letters_beyond_rank(schottky_translation):
    with pytest.raises(IndexOutOfRange):
        cocycle_eval(schottky_translation, parse_word("c"))


# ---------------------------------------------------------------------------
# Cocycle space
# ---------------------------------------------------------------------------

def test_relator_matrix_matches_cocycle_eval(genus2, rng):
    relator = genus2.relators[0]
    a = relator_constraint_matrix(genus2, relator)
    assert a.shape == (3, 12)
    c = _random_values(rng, 4)
    d = AffineDeformation(genus2, c)
    assert np.allclose(a @ c.flat(), cocycle_eval(d, relator), atol=1e-10)


def test_genus2_cocycle_space(genus2):
    basis = cocycle_basis(genus2)
    assert len(basis) == 9
    stacked = np.stack([c.flat() for c in basis])
    assert np.allclose(stacked @ stacked.T, np.eye(9), atol=1e-12)
    for c in basis:
        u = cocycle_eval(AffineDeformation(genus2, c), genus2.relators[0])
        assert np.allclose(u, 0.0, atol=1e-9)


def test_free_group_cocycle_space(schottky):
    assert len(cocycle_basis(schottky)) == 6


def test_coboundaries_are_cocycles(genus2):
    for c in coboundary_basis(genus2):
        u = cocycle_eval(AffineDeformation(genus2, c), genus2.relators[0])
        assert np.allclose(u, 0.0, atol=1e-9)


def test_cohomology_dimensions(genus2, schottky):
    assert cohomology_dimensions(genus2) == (9, 3, 6)
    assert cohomology_dimensions(schottky) == (6, 3, 3)


def test_complement_basis(genus2, genus2_complement):
    assert len(genus2_complement) == 6
    z = np.stack([c.flat() for c in genus2_complement])
    b = np.stack([c.flat() for c in coboundary_basis(genus2)])
    assert np.allclose(z @ z.T, np.eye(6), atol=1e-12)
    assert np.allclose(z @ b.T, 0.0, atol=1e-10)


def test_degenerate_relator_detected():
    # nearly commuting generators leave a singular value in the ambiguous band
    g = np.diag([2.0, 0.5])
    h = np.array([[3.0, 1e-7], [0.0, 1.0 / 3.0]])
    rep = Representation(gens=(g, h), relators=(parse_word("abAB"),))
    with pytest.raises(DegenerateRepresentation):
        cocycle_basis(rep)


def test_random_cocycle_is_seeded_and_normalized(genus2_complement):
    c1 = random_cocycle(genus2_complement, 3)
    c2 = random_cocycle(genus2_complement, 3)
    c3 = random_cocycle(genus2_complement, 4)
    assert np.array_equal(c1.values, c2.values)
    assert not np.array_equal(c1.values, c3.values)
    assert np.linalg.norm(c1.flat()) == pytest.approx(1.0)


def test_random_cocycle_needs_a_basis():
    with pytest.raises(ValueError):
        random_cocycle([], 1)


def test_translation_cocycle(cyclic):
    c = translation_cocycle(cyclic)
    assert np.allclose(c.values, [[math.log(0.5), 0.0, 0.0]])


def test_translation_cocycle_rejects_relators(genus2):
    with pytest.raises(ValueError):
        translation_cocycle(genus2)


# ---------------------------------------------------------------------------
# Verification and presets
# ---------------------------------------------------------------------------

def test_cyclic_preset():
    rep = cyclic_rep(0.5)
    assert np.array_equal(rep.gens[0], [[0.5, 0.0], [0.0, 2.0]])
    with pytest.raises(ValueError):
        cyclic_rep(1.5)
    report = verify_rep(rep, 6)
    assert report.ok
    assert report.min_length == pytest.approx(2 * math.log(2.0))


def test_schottky_preset():
    rep = schottky_rep(1.0)
    assert "not certified discrete" in rep.label
    assert displacement_length(rep.gens[0]) == pytest.approx(2.0)
    assert displacement_length(rep.gens[1]) == pytest.approx(2.0)
    assert verify_rep(rep, 4).ok


def test_elliptic_generator_reported():
    report = verify_rep(Representation(gens=(rotation(1.0),)), 2)
    assert not report.pure_hyperbolic
    assert report.violations


def test_genus2_calibration():
    assert calibrate_genus2() == pytest.approx(BOLZA_SYSTOLE, abs=1e-9)
    assert calibrate_genus2() == pytest.approx(3.0571418389619938, abs=1e-9)


def test_genus2_calibration_needs_a_sign_change():
    with pytest.raises(DegenerateRepresentation):
        calibrate_genus2(bracket=(2.0, 5.0))


def test_genus2_relator_closes(genus2):
    m = evaluate(genus2.relators[0], genus2.gens)
    deviation = min(np.abs(m - IDENTITY).max(), np.abs(m + IDENTITY).max())
    assert deviation < 1e-8
    assert genus2.genus == 2


def test_genus2_preset_passes_verification(genus2):
    report = verify_rep(genus2, 4)
    assert report.ok, report.violations
    assert report.min_length == pytest.approx(BOLZA_SYSTOLE, abs=1e-6)


def test_verify_reports_cap_as_violation(genus2):
    report = verify_rep(genus2, 6, max_words=10)
    assert not report.ok
    assert report.violations
