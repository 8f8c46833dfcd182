"""The Margulis invariant, the opposite-sign criterion and deformation paths.

Both formulas for alpha expand u(g) letter by letter. With g = l_1 ... l_n
and r_k = l_k ... l_n l_1 ... l_{k-1} the k-th cyclic rotation,

    B(x0(g), u(g)) = sum_k B(x0(r_k), u(l_k))
    tr(U(g) g)     = sum_k tr(U(l_k) r_k)

so the exponentially large translation part u(g) is never formed.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import repeat

import mpmath
import numpy as np

from deform import AffineDeformation, Representation, affine_apply, letter_values
from errors import NotHyperbolic
from lorentz import bform
from settings import (
    ALPHA_BASE_DPS,
    ALPHA_REFINE_TOL,
    CLASSIFY_TOL,
    LEMMA1_STEP,
    NEAR_PARABOLIC_MARGIN,
    RELATOR_TOL,
    ZERO_TOL_SCALE,
)
from sl2rep import (
    IDENTITY,
    SL2Class,
    classify_sl2,
    conjugate,
    eigenframe,
    exp_sl2,
    neutral_vector,
    psi_inv,
    sl2_inverse,
    trace,
)
from words import (
    Letter,
    Word,
    check_conjugacy_cap,
    conjugacy_reps_of_length,
    enumerate_ball,
    evaluate,
    format_word,
    invert,
    multiply,
    power,
)

logger = logging.getLogger("margulis_lab")

_EPS = float(np.finfo(np.float64).eps)


class Verdict(str, Enum):
    NOT_PROPER = "NotProper"
    CONSISTENT_WITH_PROPER = "ConsistentWithProper"
    ZERO_DETECTED = "ZeroDetected"


class SignClass(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    MIXED = "Mixed"
    ZERO = "Zero"
    EMPTY = "Empty"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _word_order(w: Word) -> tuple[int, tuple[int, ...]]:
    return len(w), w.key


@dataclass
class SignScanReport:
    radius: int
    tol_scale: float = ZERO_TOL_SCALE
    count: int = 0
    excluded: int = 0
    positive: int = 0
    negative: int = 0
    min_alpha: float = math.inf
    max_alpha: float = -math.inf
    argmin_word: Word | None = None
    argmax_word: Word | None = None
    zero_words: list[Word] = field(default_factory=list)

    def zero_tol(self, w: Word) -> float:
        return self.tol_scale * (1 + len(w))

    def add(self, w: Word, alpha: float):
        self.count += 1
        if abs(alpha) <= self.zero_tol(w):
            self.zero_words.append(w)
        elif alpha > 0:
            self.positive += 1
        else:
            self.negative += 1
        order = _word_order(w)
        if alpha < self.min_alpha or (alpha == self.min_alpha and order < _word_order(self.argmin_word)):
            self.min_alpha, self.argmin_word = alpha, w
        if alpha > self.max_alpha or (alpha == self.max_alpha and order < _word_order(self.argmax_word)):
            self.max_alpha, self.argmax_word = alpha, w

    def merge(self, other: "SignScanReport") -> "SignScanReport":
        out = SignScanReport(radius=max(self.radius, other.radius), tol_scale=self.tol_scale)
        out.count = self.count + other.count
        out.excluded = self.excluded + other.excluded
        out.positive = self.positive + other.positive
        out.negative = self.negative + other.negative
        out.zero_words = sorted(self.zero_words + other.zero_words, key=_word_order)
        parts = (self, other)
        lows = [(r.min_alpha, _word_order(r.argmin_word), r.argmin_word) for r in parts if r.argmin_word]
        highs = [(-r.max_alpha, _word_order(r.argmax_word), r.argmax_word) for r in parts if r.argmax_word]
        if lows:
            a, _, w = min(lows)
            out.min_alpha, out.argmin_word = a, w
        if highs:
            a, _, w = min(highs)
            out.max_alpha, out.argmax_word = -a, w
        return out

    @property
    def sign_class(self) -> SignClass:
        if self.positive and self.negative:
            return SignClass.MIXED
        if self.zero_words:
            return SignClass.ZERO
        if self.positive:
            return SignClass.POSITIVE
        if self.negative:
            return SignClass.NEGATIVE
        return SignClass.EMPTY

    @property
    def verdict(self) -> Verdict:
        if self.positive and self.negative:
            return Verdict.NOT_PROPER
        if self.zero_words:
            return Verdict.ZERO_DETECTED
        return Verdict.CONSISTENT_WITH_PROPER


@dataclass(frozen=True)
class PathProbe:
    word: Word
    alpha: float
    tau_prime_fd: float
    length_prime_fd: float
    step: float
    tau_prime_richardson: float
    length_prime_richardson: float
    tau_error_estimate: float
    ratio: float | None
    richardson_ratio: float | None
    signs_agree: bool | None


@dataclass
class PropertyReport:
    radius: int
    checks: int = 0
    skipped: int = 0
    max_error: float = 0.0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# Alpha
# ---------------------------------------------------------------------------

class _LetterData:
    """Per-letter matrices and translation parts for one deformation."""

    def __init__(self, d: AffineDeformation):
        values = letter_values(d)
        self.mats: dict[Letter, np.ndarray] = {}
        self.u: dict[Letter, np.ndarray] = {}
        self.big_u: dict[Letter, np.ndarray] = {}
        self.u_size: dict[Letter, float] = {}
        self.norm: dict[Letter, float] = {}
        for i, g in enumerate(d.rep.gens):
            for letter, m in ((Letter(i, 1), g), (Letter(i, -1), sl2_inverse(g))):
                self.mats[letter] = m
                self.u[letter] = values[letter]
                self.big_u[letter] = psi_inv(values[letter])
                self.u_size[letter] = float(np.abs(self.big_u[letter]).sum())
                self.norm[letter] = float(np.abs(m).sum(axis=1).max())

    def evaluate(self, w: Sequence[Letter]) -> np.ndarray:
        m = IDENTITY
        for letter in w:
            m = m @ self.mats[letter]
        return m

    def rotations(self, w: Sequence[Letter]) -> list[tuple[Letter, np.ndarray]]:
        """(l_k, r_k) for every cyclic rotation r_k = l_k ... l_n l_1 ... l_{k-1}.

        Each r_k is the product of a fresh suffix and prefix, so rounding
        errors do not compound from one rotation to the next.
        """
        n = len(w)
        prefixes = [IDENTITY]
        for letter in w[:-1]:
            prefixes.append(prefixes[-1] @ self.mats[letter])
        suffixes = [IDENTITY] * n
        s = IDENTITY
        for k in range(n - 1, -1, -1):
            s = self.mats[w[k]] @ s
            suffixes[k] = s
        return [(w[k], suffixes[k] @ prefixes[k]) for k in range(n)]

    def trace_alpha(self, w: Sequence[Letter], t: float) -> tuple[float, float]:
        """alpha by the trace formula and a bound on its rounding error."""
        terms = []
        u_total = 0.0
        for letter, r in self.rotations(w):
            terms.append(float(np.trace(self.big_u[letter] @ r)))
            u_total += self.u_size[letter]
        # every entry of every |suffix| |prefix| product is at most prod |l|_inf
        bound = u_total * math.prod(self.norm[letter] for letter in w)
        scale = 1.0 / math.sqrt(t * t - 4.0)
        alpha = math.copysign(1.0, t) * math.fsum(terms) * scale
        return alpha, 4.0 * (len(w) + 2) * _EPS * bound * scale

    def trace_alpha_mp(self, w: Sequence[Letter], bound: float) -> float:
        """The trace formula in mpmath, with enough digits to absorb `bound`."""
        lost = max(0.0, math.log10(bound / _EPS)) if bound > 0 else 0.0
        with mpmath.workdps(ALPHA_BASE_DPS + int(lost)):
            mats = {letter: mpmath.matrix(self.mats[letter].tolist()) for letter in set(w)}
            n = len(w)
            prefixes = [mpmath.eye(2)]
            for letter in w[:-1]:
                prefixes.append(prefixes[-1] * mats[letter])
            terms = []
            s = mpmath.eye(2)
            for k in range(n - 1, -1, -1):
                s = mats[w[k]] * s
                r = s * prefixes[k]
                big_u = mpmath.matrix(self.big_u[w[k]].tolist())
                prod = big_u * r
                terms.append(prod[0, 0] + prod[1, 1])
            t = s[0, 0] + s[1, 1]
            alpha = mpmath.fsum(terms) / mpmath.sqrt(t * t - 4)
            if t < 0:
                alpha = -alpha
            return float(alpha)


def _hyperbolic_word(data: _LetterData, w: Sequence[Letter]) -> float:
    t = trace(data.evaluate(w))
    if not abs(t) > 2.0 + CLASSIFY_TOL:
        raise NotHyperbolic(f"word {format_word(w)} has |tr| = {abs(t)!r}", trace=t)
    return t


def alpha_trace(d: AffineDeformation, w: Sequence[Letter]) -> float:
    """sgn(tr g) tr(u(g) g) / sqrt(tr(g)^2 - 4)."""
    data = _LetterData(d)
    t = _hyperbolic_word(data, w)
    alpha, bound = data.trace_alpha(w, t)
    if bound > ALPHA_REFINE_TOL * max(1.0, abs(alpha)):
        logger.debug("Refining alpha(%s): rounding bound %.3g", format_word(w), bound)
        alpha = data.trace_alpha_mp(w, bound)
    return alpha


def alpha_eig(d: AffineDeformation, w: Sequence[Letter]) -> float:
    """B(x0(g), u(g)) with x0 taken from the eigenframe."""
    data = _LetterData(d)
    _hyperbolic_word(data, w)
    return math.fsum(bform(eigenframe(r).xzero, data.u[letter]) for letter, r in data.rotations(w))


def alpha_at_point(d: AffineDeformation, w: Sequence[Letter], x) -> float:
    """B(x0(g), phi(g)x - x); independent of x."""
    g = evaluate(w, d.rep.gens)
    return bform(neutral_vector(g), affine_apply(d, w, x) - np.asarray(x, dtype=np.float64))


def alpha_properties_check(d: AffineDeformation, radius: int, tol: float = 1e-9) -> PropertyReport:
    """Class function, power homogeneity and inversion symmetry over a ball."""
    if radius < 2:
        raise ValueError("radius must be >= 2")
    report = PropertyReport(radius=radius)
    conjugators = [Word((Letter(i, s),)) for i in range(d.rep.rank) for s in (1, -1)]

    def record(what: str, w: Word, expected: float, got: float):
        err = abs(got - expected) / max(1.0, abs(expected))
        report.checks += 1
        report.max_error = max(report.max_error, err)
        if err > tol:
            report.violations.append(f"{what} at {format_word(w)}: {got!r} vs {expected!r}")

    for w in enumerate_ball(d.rep.rank, radius):
        g = evaluate(w, d.rep.gens)
        if abs(trace(g)) - 2.0 < NEAR_PARABOLIC_MARGIN:
            report.skipped += 1
            continue
        a = alpha_trace(d, w)
        for h in conjugators:
            record("conjugation", w, a, alpha_trace(d, multiply(multiply(h, w), invert(h))))
        for n in (2, 3):
            record(f"power {n}", w, n * a, alpha_trace(d, power(w, n)))
        record("inverse", w, a, alpha_trace(d, invert(w)))
    return report


# ---------------------------------------------------------------------------
# Sign scans
# ---------------------------------------------------------------------------

def _excluded(g: np.ndarray, t: float) -> bool:
    if abs(t) - 2.0 < NEAR_PARABOLIC_MARGIN:
        return True
    return classify_sl2(g, RELATOR_TOL) is SL2Class.PLUS_MINUS_IDENTITY


def _scan_partition(
    d: AffineDeformation, lengths: tuple[int, ...], first: int, tol_scale: float
) -> SignScanReport:
    data = _LetterData(d)
    report = SignScanReport(radius=max(lengths, default=0), tol_scale=tol_scale)
    for k in lengths:
        for w in conjugacy_reps_of_length(d.rep.rank, k, (first,)):
            g = data.evaluate(w)
            t = trace(g)
            if _excluded(g, t):
                report.excluded += 1
                continue
            alpha, bound = data.trace_alpha(w, t)
            if abs(abs(alpha) - report.zero_tol(w)) <= bound:
                alpha = data.trace_alpha_mp(w, bound)
            report.add(w, alpha)
    return report


def _scan_lengths(
    d: AffineDeformation, lengths: tuple[int, ...], tol_scale: float, workers: int
) -> SignScanReport:
    firsts = range(2 * d.rep.rank)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_partition, repeat(d), repeat(lengths), firsts, repeat(tol_scale)))
    else:
        parts = [_scan_partition(d, lengths, f, tol_scale) for f in firsts]
    report = SignScanReport(radius=max(lengths, default=0), tol_scale=tol_scale)
    for part in parts:
        report = report.merge(part)
    return report


def sign_scan(
    d: AffineDeformation,
    radius: int,
    tol_scale: float = ZERO_TOL_SCALE,
    workers: int = 1,
    max_words: int | None = None,
) -> SignScanReport:
    """alpha over one representative per conjugacy class up to `radius`."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    check_conjugacy_cap(d.rep.rank, radius, max_words)
    report = _scan_lengths(d, tuple(range(1, radius + 1)), tol_scale, workers)
    logger.debug("Scan radius %d: %d words, verdict %s", radius, report.count, report.verdict.value)
    return report


def first_mixed_radius(
    d: AffineDeformation,
    max_radius: int,
    tol_scale: float = ZERO_TOL_SCALE,
    workers: int = 1,
    max_words: int | None = None,
) -> tuple[SignScanReport, int | None]:
    """Scan length by length; stop as soon as both signs have appeared."""
    report = SignScanReport(radius=0, tol_scale=tol_scale)
    for k in range(1, max_radius + 1):
        check_conjugacy_cap(d.rep.rank, k, max_words)
        report = report.merge(_scan_lengths(d, (k,), tol_scale, workers))
        logger.debug("Radius %d: min %.6g max %.6g", k, report.min_alpha, report.max_alpha)
        if report.verdict is Verdict.NOT_PROPER:
            return report, k
    return report, None


# ---------------------------------------------------------------------------
# Deformation paths
# ---------------------------------------------------------------------------

def path_representation(d: AffineDeformation, t: float) -> Representation:
    """Generators g_i exp(t Ad(g_i^-1) U_i), i.e. exp(t U_i) g_i."""
    gens = []
    for g, u in zip(d.rep.gens, d.cocycle.values):
        tangent = conjugate(sl2_inverse(g), psi_inv(u))
        gens.append(g @ exp_sl2(t * tangent))
    return Representation(
        gens=tuple(gens), relators=d.rep.relators, label=d.rep.label, genus=d.rep.genus
    )


def tau_and_length(rep_t: Representation, w: Sequence[Letter]) -> tuple[float, float]:
    g = evaluate(w, rep_t.gens)
    tau = abs(trace(g))
    if not tau > 2.0 + CLASSIFY_TOL:
        raise NotHyperbolic(f"word {format_word(w)} left the hyperbolic locus (|tr| = {tau!r})", trace=tau)
    return tau, 2.0 * math.acosh(tau / 2.0)


def _central_differences(d: AffineDeformation, w: Sequence[Letter], h: float) -> tuple[float, float]:
    tau_p, len_p = tau_and_length(path_representation(d, h), w)
    tau_m, len_m = tau_and_length(path_representation(d, -h), w)
    return (tau_p - tau_m) / (2.0 * h), (len_p - len_m) / (2.0 * h)


def lemma1_probe(d: AffineDeformation, w: Sequence[Letter], h: float = LEMMA1_STEP) -> PathProbe:
    """Finite-difference derivatives of |tr| and length along the path tangent to u."""
    if h <= 0:
        raise ValueError("step must be positive")
    tau_and_length(d.rep, w)
    alpha = alpha_trace(d, w)
    tau1, len1 = _central_differences(d, w, h)
    tau2, len2 = _central_differences(d, w, h / 2.0)
    tau_r = (4.0 * tau2 - tau1) / 3.0
    len_r = (4.0 * len2 - len1) / 3.0
    significant = abs(alpha) > 10.0 * h * h
    return PathProbe(
        word=Word(w),
        alpha=alpha,
        tau_prime_fd=tau1,
        length_prime_fd=len1,
        step=h,
        tau_prime_richardson=tau_r,
        length_prime_richardson=len_r,
        tau_error_estimate=abs(tau1 - tau2),
        ratio=len1 / alpha if significant else None,
        richardson_ratio=len_r / alpha if significant else None,
        signs_agree=(tau1 > 0) == (alpha > 0) if significant else None,
    )


# ---------------------------------------------------------------------------
# Systole
# ---------------------------------------------------------------------------

@dataclass
class SystoleReport:
    radius: int
    genus: int | None
    systole: float = math.inf
    shortest_word: Word | None = None
    checked: int = 0
    skipped: int = 0
    bound: float | None = None
    below_bound: int = 0

    @property
    def violates_bound(self) -> bool:
        return self.bound is not None and self.systole > self.bound


def buser_bound(genus: int) -> float:
    """2 log(2 - 2 chi) = 2 log(4g - 2)."""
    if genus < 2:
        raise ValueError("genus must be >= 2")
    return 2.0 * math.log(4.0 * genus - 2.0)


def systole_scan(rep: Representation, radius: int, max_words: int | None = None) -> SystoleReport:
    """Shortest displacement length over conjugacy representatives."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    check_conjugacy_cap(rep.rank, radius, max_words)
    report = SystoleReport(radius=radius, genus=rep.genus)
    if rep.genus is not None:
        report.bound = buser_bound(rep.genus)
    for k in range(1, radius + 1):
        for w in conjugacy_reps_of_length(rep.rank, k):
            g = evaluate(w, rep.gens)
            t = trace(g)
            if _excluded(g, t):
                report.skipped += 1
                continue
            report.checked += 1
            length = 2.0 * math.acosh(abs(t) / 2.0)
            if report.bound is not None and length < report.bound:
                report.below_bound += 1
            if length < report.systole:
                report.systole, report.shortest_word = length, w
    logger.info("Systole over radius %d: %.10f", radius, report.systole)
    return report
