"""Free-group words.

Generator i is written as the i-th lowercase letter and its inverse as the
matching uppercase letter, so "abAB" is a b a^-1 b^-1.
"""

import string
from collections.abc import Iterable, Iterator, Sequence
from typing import NamedTuple

import numpy as np

from errors import IndexOutOfRange, ParseError, ResourceLimit
from settings import MAX_WORDS
from sl2rep import IDENTITY, sl2_inverse

# one lowercase letter per generator
MAX_RANK = len(string.ascii_lowercase)


class Letter(NamedTuple):
    gen: int
    sign: int

    @property
    def key(self) -> int:
        return 2 * self.gen + (0 if self.sign > 0 else 1)

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.sign)

    def __str__(self) -> str:
        if not 0 <= self.gen < MAX_RANK:
            raise IndexOutOfRange(f"generator {self.gen} has no letter (rank is at most {MAX_RANK})")
        ch = string.ascii_lowercase[self.gen]
        return ch if self.sign > 0 else ch.upper()


def letter_from_key(key: int) -> Letter:
    return Letter(key // 2, 1 if key % 2 == 0 else -1)


class Word(tuple):
    """A freely reduced word; build with `reduce` or `parse_word`."""

    __slots__ = ()

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(letter.key for letter in self)

    def __str__(self) -> str:
        return "".join(str(letter) for letter in self)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


EMPTY = Word()


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------

def reduce(letters: Iterable[Letter]) -> Word:
    stack: list[Letter] = []
    for letter in letters:
        letter = Letter(int(letter[0]), int(letter[1]))
        if stack and stack[-1] == letter.inverse():
            stack.pop()
        else:
            stack.append(letter)
    return Word(stack)


def multiply(w1: Sequence[Letter], w2: Sequence[Letter]) -> Word:
    return reduce(list(w1) + list(w2))


def invert(w: Sequence[Letter]) -> Word:
    return Word(letter.inverse() for letter in reversed(w))


def power(w: Sequence[Letter], n: int) -> Word:
    if n < 0:
        return power(invert(w), -n)
    return reduce(list(w) * n)


def cyclic_reduce(w: Sequence[Letter]) -> Word:
    w = reduce(w)
    start, end = 0, len(w)
    while end - start >= 2 and w[start] == w[end - 1].inverse():
        start += 1
        end -= 1
    return Word(w[start:end])


def rotations(w: Sequence[Letter]) -> list[Word]:
    return [Word(tuple(w[k:]) + tuple(w[:k])) for k in range(max(len(w), 1))]


def canonical_rotation(w: Sequence[Letter]) -> Word:
    """Lexicographically least rotation of the cyclic reduction of w."""
    return min(rotations(cyclic_reduce(w)), key=lambda r: r.key)


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------

def parse_word(text: str, rank: int | None = None) -> Word:
    letters = []
    for ch in text.strip():
        if ch in string.ascii_lowercase:
            letter = Letter(string.ascii_lowercase.index(ch), 1)
        elif ch in string.ascii_uppercase:
            letter = Letter(string.ascii_uppercase.index(ch), -1)
        else:
            raise ParseError(f"invalid character {ch!r} in word {text!r}")
        if rank is not None and letter.gen >= rank:
            raise IndexOutOfRange(f"letter {ch!r} exceeds rank {rank}")
        letters.append(letter)
    return reduce(letters)


def format_word(w: Sequence[Letter]) -> str:
    return "".join(str(letter) for letter in w)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def ball_size(rank: int, radius: int) -> int:
    return sum(2 * rank * (2 * rank - 1) ** (k - 1) for k in range(1, radius + 1))


def cyclic_candidates(rank: int, length: int) -> int:
    """Number of cyclically reduced words of the given length."""
    if length == 0:
        return 0
    return (2 * rank - 1) ** length + 1 + (rank - 1) * (1 + (-1) ** length)


def _check_cap(count: int, max_words: int | None, what: str):
    cap = MAX_WORDS if max_words is None else max_words
    if count > cap:
        raise ResourceLimit(f"{what} needs {count} words, above the cap of {cap}")


def _extend(rank: int, prefix: list[int], length: int, floor: int) -> Iterator[list[int]]:
    if len(prefix) == length:
        yield prefix
        return
    last = prefix[-1]
    for key in range(floor, 2 * rank):
        if key ^ 1 == last:
            continue
        prefix.append(key)
        yield from _extend(rank, prefix, length, floor)
        prefix.pop()


def words_of_length(rank: int, length: int) -> Iterator[Word]:
    for first in range(2 * rank):
        for keys in _extend(rank, [first], length, 0):
            yield Word(letter_from_key(k) for k in keys)


def enumerate_ball(rank: int, radius: int, max_words: int | None = None) -> list[Word]:
    if rank < 1 or radius < 0:
        raise ValueError("rank must be >= 1 and radius >= 0")
    _check_cap(ball_size(rank, radius), max_words, f"ball of radius {radius}")
    out: list[Word] = []
    for k in range(1, radius + 1):
        out.extend(words_of_length(rank, k))
    return out


def conjugacy_reps_of_length(
    rank: int, length: int, first_letters: Iterable[int] | None = None
) -> Iterator[Word]:
    """Cyclically reduced words of this length equal to their least rotation.

    Such a word starts with its smallest letter, which prunes the search.
    `first_letters` restricts the leading letter key (used to partition scans).
    """
    firsts = range(2 * rank) if first_letters is None else first_letters
    for first in firsts:
        for keys in _extend(rank, [first], length, first):
            if length > 1 and keys[-1] == keys[0] ^ 1:
                continue
            if min(keys[k:] + keys[:k] for k in range(length)) != keys:
                continue
            yield Word(letter_from_key(k) for k in keys)


def enumerate_conjugacy_reps(
    rank: int, radius: int, max_words: int | None = None
) -> list[Word]:
    if rank < 1 or radius < 0:
        raise ValueError("rank must be >= 1 and radius >= 0")
    check_conjugacy_cap(rank, radius, max_words)
    out: list[Word] = []
    for k in range(1, radius + 1):
        out.extend(conjugacy_reps_of_length(rank, k))
    return out


def check_conjugacy_cap(rank: int, radius: int, max_words: int | None = None):
    total = sum(cyclic_candidates(rank, k) for k in range(1, radius + 1))
    _check_cap(total, max_words, f"conjugacy scan of radius {radius}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(w: Sequence[Letter], gens: Sequence[np.ndarray]) -> np.ndarray:
    result = IDENTITY.copy()
    for letter in w:
        if not 0 <= letter.gen < len(gens):
            raise IndexOutOfRange(f"letter {letter} needs generator {letter.gen}, have {len(gens)}")
        g = gens[letter.gen]
        result = result @ (g if letter.sign > 0 else sl2_inverse(g))
    return result
