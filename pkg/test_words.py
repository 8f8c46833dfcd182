import numpy as np
import pytest

from errors import IndexOutOfRange, ParseError, ResourceLimit
from sl2rep import trace
from words import (
    EMPTY,
    MAX_RANK,
    Letter,
    ball_size,
    canonical_rotation,
    cyclic_candidates,
    cyclic_reduce,
    enumerate_ball,
    enumerate_conjugacy_reps,
    evaluate,
    format_word,
    invert,
    multiply,
    parse_word,
    power,
    reduce,
    rotations,
    words_of_length,
)


# ---------------------------------------------------------------------------
# Letters and parsing
# ---------------------------------------------------------------------------

def test_letter_keys():
    assert Letter(0, 1).key == 0
    assert Letter(0, -1).key == 1
    assert Letter(3, -1).key == 7
    assert str(Letter(2, -1)) == "C"


def test_letter_beyond_alphabet_has_no_name():
    assert str(Letter(MAX_RANK - 1, 1)) == "z"
    with pytest.raises(IndexOutOfRange):
        str(Letter(MAX_RANK, 1))


def test_parse_and_format():
    w = parse_word("abAB", 2)
    assert w == (Letter(0, 1), Letter(1, 1), Letter(0, -1), Letter(1, -1))
    assert format_word(w) == "abAB"
    assert str(w) == "abAB"


def test_parse_reduces():
    assert parse_word("abBA") == EMPTY
    assert format_word(parse_word("aabBc")) == "aac"


def test_parse_rejects_bad_characters():
    with pytest.raises(ParseError):
        parse_word("a1b")
    with pytest.raises(ParseError):
        parse_word("a b")


def test_parse_rejects_letters_beyond_rank():
    with pytest.raises(IndexOutOfRange):
        parse_word("abc", 2)
    with pytest.raises(IndexError):
        parse_word("e", 4)


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------

def test_reduce_is_idempotent():
    w = reduce(parse_word("abBAcaC") + parse_word("cb"))
    assert reduce(w) == w


def test_group_axioms():
    for text in ("a", "abAB", "cbaCCa", "bbb"):
        w = parse_word(text)
        assert multiply(w, invert(w)) == EMPTY
        assert multiply(invert(w), w) == EMPTY
        assert invert(invert(w)) == w


def test_power():
    a = parse_word("ab")
    assert format_word(power(a, 3)) == "ababab"
    assert format_word(power(a, -2)) == "BABA"
    assert power(a, 0) == EMPTY


def test_cyclic_reduce():
    assert format_word(cyclic_reduce(parse_word("abA"))) == "b"
    assert format_word(cyclic_reduce(parse_word("abcBA"))) == "c"
    assert format_word(cyclic_reduce(parse_word("abAB"))) == "abAB"


def test_canonical_rotation():
    w = parse_word("bAac")
    assert format_word(canonical_rotation(parse_word("cab"))) == "abc"
    assert format_word(canonical_rotation(parse_word("Bab"))) == "a"
    assert canonical_rotation(w) == canonical_rotation(rotations(w)[1])


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def test_ball_size_closed_form():
    assert ball_size(1, 3) == 6
    assert ball_size(2, 1) == 4
    assert ball_size(2, 2) == 16


@pytest.mark.parametrize("rank", [1, 2, 3])
@pytest.mark.parametrize("radius", [1, 2, 4, 6])
def test_enumerate_ball_counts(rank, radius):
    words = enumerate_ball(rank, radius)
    assert len(words) == ball_size(rank, radius)
    assert len(set(words)) == len(words)


def test_enumerate_ball_order():
    words = enumerate_ball(2, 3)
    keys = [(len(w), w.key) for w in words]
    assert keys == sorted(keys)
    assert all(reduce(w) == w for w in words)


def test_enumerate_ball_respects_cap():
    with pytest.raises(ResourceLimit):
        enumerate_ball(2, 5, max_words=100)


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_cyclic_candidate_formula(rank):
    for k in range(1, 6):
        count = sum(1 for w in words_of_length(rank, k) if cyclic_reduce(w) == w)
        assert count == cyclic_candidates(rank, k)


def test_conjugacy_reps_cover_the_ball():
    radius = 4
    reps = enumerate_conjugacy_reps(2, radius)
    assert len(set(reps)) == len(reps)
    assert all(canonical_rotation(w) == w for w in reps)
    from_ball = {canonical_rotation(w) for w in enumerate_ball(2, radius)}
    from_ball.discard(EMPTY)
    assert from_ball == set(reps)


def test_conjugacy_reps_of_rank_one():
    reps = enumerate_conjugacy_reps(1, 3)
    assert [format_word(w) for w in reps] == ["a", "A", "aa", "AA", "aaa", "AAA"]


def test_conjugacy_reps_cap():
    with pytest.raises(ResourceLimit):
        enumerate_conjugacy_reps(4, 6, max_words=1000)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def test_evaluate_is_a_homomorphism(random_sl2):
    gens = [random_sl2(), random_sl2()]
    for u, v in [("ab", "BA"), ("aab", "bA"), ("B", "aB")]:
        wu, wv = parse_word(u), parse_word(v)
        lhs = evaluate(multiply(wu, wv), gens)
        assert np.allclose(lhs, evaluate(wu, gens) @ evaluate(wv, gens), atol=1e-9)


def test_evaluate_empty_is_identity(random_sl2):
    assert np.array_equal(evaluate(EMPTY, [random_sl2()]), np.eye(2))


def test_rotations_share_trace(random_sl2):
    gens = [random_sl2(), random_sl2(), random_sl2()]
    w = parse_word("abCbaC")
    t = trace(evaluate(w, gens))
    for r in rotations(w):
        assert trace(evaluate(r, gens)) == pytest.approx(t, rel=1e-10, abs=1e-10)


def test_evaluate_rejects_missing_generator(random_sl2):
    with pytest.raises(IndexOutOfRange):
        evaluate(parse_word("ab"), [random_sl2()])
