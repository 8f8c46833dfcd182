"""Representations into SL(2,R), cocycles, coboundaries and affine actions.

Cocycles follow u(g1 g2) = u(g1) + rho(g1) u(g2); a generator acts on R^{2,1}
through rho, and inverse letters use u(g^-1) = -rho(g)^-1 u(g).
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from errors import DegenerateRepresentation, IndexOutOfRange, ResourceLimit
from lorentz import as_vec21
from settings import RANK_AMBIGUOUS_TOL, RANK_TOL, RELATOR_TOL
from sl2rep import (
    IDENTITY,
    SL2Class,
    as_sl2,
    axis_translation,
    classify_sl2,
    displacement_length,
    log_hyperbolic,
    psi,
    rho,
    rotation,
    sl2_inverse,
    trace,
    translation_along,
)
from words import (
    Letter,
    Word,
    check_conjugacy_cap,
    conjugacy_reps_of_length,
    evaluate,
    format_word,
    parse_word,
)

logger = logging.getLogger("margulis_lab")

GENUS2_RELATOR = "abcdABCD"
# Axis angle of generator k is 3k*pi/4: the octagon side pairings read around
# one vertex cycle spell out abcdABCD in this order.
GENUS2_ANGLE_STEP = 3.0 * math.pi / 4.0
# The relator defect has a second root between 2.0 and 2.5; this bracket
# isolates the regular-octagon one.
GENUS2_BRACKET = (3.0, 3.2)
BOLZA_SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Representation:
    gens: tuple[np.ndarray, ...]
    relators: tuple[Word, ...] = ()
    label: str = ""
    genus: int | None = None

    def __post_init__(self):
        gens = tuple(as_sl2(g) for g in self.gens)
        if not gens:
            raise ValueError("a representation needs at least one generator")
        relators = tuple(Word(r) for r in self.relators)
        for r in relators:
            if not r:
                raise ValueError("relators must be nonempty")
            for letter in r:
                if letter.gen >= len(gens):
                    raise IndexOutOfRange(f"relator {format_word(r)} exceeds rank {len(gens)}")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "relators", relators)

    @property
    def rank(self) -> int:
        return len(self.gens)


@dataclass(frozen=True)
class Cocycle:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"cocycle values must have shape (rank, 3), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("cocycle values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def rank(self) -> int:
        return self.values.shape[0]

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.values + other.values)

    def __neg__(self) -> "Cocycle":
        return Cocycle(-self.values)

    def scaled(self, s: float) -> "Cocycle":
        return Cocycle(s * self.values)


@dataclass(frozen=True)
class AffineDeformation:
    rep: Representation
    cocycle: Cocycle

    def __post_init__(self):
        if self.rep.rank != self.cocycle.rank:
            raise ValueError(
                f"cocycle has {self.cocycle.rank} values for {self.rep.rank} generators"
            )


@dataclass
class RepReport:
    radius: int
    dets_ok: bool = True
    relators_ok: bool = True
    pure_hyperbolic: bool = True
    min_trace_margin: float = math.inf
    min_length: float = math.inf
    shortest_word: str = ""
    checked: int = 0
    trivial: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.dets_ok and self.relators_ok and self.pure_hyperbolic


# ---------------------------------------------------------------------------
# Cocycles and affine action
# ---------------------------------------------------------------------------

def _letter_matrices(rep: Representation) -> dict[Letter, np.ndarray]:
    out = {}
    for i, g in enumerate(rep.gens):
        out[Letter(i, 1)] = rho(g)
        out[Letter(i, -1)] = rho(sl2_inverse(g))
    return out


def letter_values(d: AffineDeformation) -> dict[Letter, np.ndarray]:
    """u on each generator and each inverse generator."""
    out = {}
    for i, g in enumerate(d.rep.gens):
        u = d.cocycle.values[i]
        out[Letter(i, 1)] = u
        out[Letter(i, -1)] = -(rho(sl2_inverse(g)) @ u)
    return out


def _check_letters(w: Sequence[Letter], rank: int):
    for letter in w:
        if not 0 <= letter.gen < rank:
            raise IndexOutOfRange(f"letter {letter} exceeds rank {rank}")


def cocycle_eval(d: AffineDeformation, w: Sequence[Letter]) -> np.ndarray:
    _check_letters(w, d.rep.rank)
    mats = _letter_matrices(d.rep)
    values = letter_values(d)
    acc = np.zeros(3)
    prefix = np.eye(3)
    for letter in w:
        acc = acc + prefix @ values[letter]
        prefix = prefix @ mats[letter]
    return acc


def coboundary(rep: Representation, v) -> Cocycle:
    v = as_vec21(v)
    return Cocycle(np.array([v - rho(g) @ v for g in rep.gens]))


def coboundary_basis(rep: Representation) -> list[Cocycle]:
    return [coboundary(rep, e) for e in np.eye(3)]


def affine_apply(d: AffineDeformation, w: Sequence[Letter], x) -> np.ndarray:
    x = as_vec21(x)
    return rho(evaluate(w, d.rep.gens)) @ x + cocycle_eval(d, w)


# ---------------------------------------------------------------------------
# Cocycle space
# ---------------------------------------------------------------------------

def relator_constraint_matrix(rep: Representation, relator: Sequence[Letter]) -> np.ndarray:
    """3 x 3r matrix sending generator values to u(relator)."""
    if not relator:
        raise ValueError("relator must be nonempty")
    _check_letters(relator, rep.rank)
    mats = _letter_matrices(rep)
    out = np.zeros((3, 3 * rep.rank))
    prefix = np.eye(3)
    for letter in relator:
        block = slice(3 * letter.gen, 3 * letter.gen + 3)
        if letter.sign > 0:
            out[:, block] += prefix
            prefix = prefix @ mats[letter]
        else:
            prefix = prefix @ mats[letter]
            out[:, block] -= prefix
    return out


def relator_defect(d: AffineDeformation) -> float:
    """Largest |u(relator)| entry, relative to the size of the cocycle values."""
    scale = max(1.0, float(np.max(np.abs(d.cocycle.values))))
    worst = 0.0
    for r in d.rep.relators:
        u = relator_constraint_matrix(d.rep, r) @ d.cocycle.flat()
        worst = max(worst, float(np.max(np.abs(u))) / scale)
    return worst


def _numerical_kernel(a: np.ndarray) -> np.ndarray:
    """Orthonormal kernel basis (as rows) with a singular-value gap check."""
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(a)
    smax = float(s[0]) if s.size else 0.0
    if smax == 0.0:
        return np.eye(n)
    rel = s / smax
    ambiguous = rel[(rel >= RANK_AMBIGUOUS_TOL) & (rel <= RANK_TOL)]
    if ambiguous.size:
        raise DegenerateRepresentation(
            f"singular values {ambiguous.tolist()} (relative) fall in the ambiguous band"
        )
    rank = int(np.count_nonzero(rel > RANK_TOL))
    return vt[rank:]


def cocycle_basis(rep: Representation) -> list[Cocycle]:
    if not rep.relators:
        return [Cocycle(row.reshape(rep.rank, 3)) for row in np.eye(3 * rep.rank)]
    a = np.vstack([relator_constraint_matrix(rep, r) for r in rep.relators])
    kernel = _numerical_kernel(a)
    logger.info("Cocycle space of %s has dimension %d", rep.label or "group", kernel.shape[0])
    return [Cocycle(row.reshape(rep.rank, 3)) for row in kernel]


def _column_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.count_nonzero(s > RANK_TOL * s[0])) if s[0] > 0 else 0


def cohomology_dimensions(rep: Representation) -> tuple[int, int, int]:
    """(dim Z^1, dim B^1, dim H^1), with B^1 measured rather than assumed."""
    z = len(cocycle_basis(rep))
    b = _column_rank(np.column_stack([c.flat() for c in coboundary_basis(rep)]))
    return z, b, z - b


def cohomology_complement_basis(rep: Representation) -> list[Cocycle]:
    """Orthonormal cocycles orthogonal to every coboundary."""
    z = np.column_stack([c.flat() for c in cocycle_basis(rep)])
    b = np.column_stack([c.flat() for c in coboundary_basis(rep)])
    q, _ = np.linalg.qr(b)
    q = q[:, : _column_rank(b)]
    projected = z - q @ (q.T @ z)
    u, s, _ = np.linalg.svd(projected, full_matrices=False)
    keep = int(np.count_nonzero(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return [Cocycle(u[:, k].reshape(rep.rank, 3)) for k in range(keep)]


def random_cocycle(basis: Sequence[Cocycle], seed: int) -> Cocycle:
    """Unit-norm random combination; numpy Generator(PCG64(seed)) coefficients."""
    if not basis:
        raise ValueError("basis must be nonempty")
    rng = np.random.Generator(np.random.PCG64(seed))
    stacked = np.stack([c.flat() for c in basis])
    while True:
        coeffs = rng.standard_normal(len(basis))
        combo = coeffs @ stacked
        norm = float(np.linalg.norm(combo))
        if norm > 1e-12:
            break
    return Cocycle((combo / norm).reshape(basis[0].values.shape))


def translation_cocycle(rep: Representation) -> Cocycle:
    """u_i = psi(log g_i), lengthening every generator axis to first order."""
    if rep.relators:
        raise ValueError("translation cocycles are only defined for free presentations")
    values = []
    for g in rep.gens:
        lift = g if trace(g) > 0 else -g
        values.append(psi(log_hyperbolic(lift)))
    return Cocycle(np.array(values))


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def verify_rep(rep: Representation, radius: int, max_words: int | None = None) -> RepReport:
    if radius < 1:
        raise ValueError("radius must be >= 1")
    report = RepReport(radius=radius)
    for i, g in enumerate(rep.gens):
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if abs(det - 1.0) > RELATOR_TOL:
            report.dets_ok = False
            report.violations.append(f"generator {i} has det {det!r}")
    for r in rep.relators:
        m = evaluate(r, rep.gens)
        dev = min(np.max(np.abs(m - IDENTITY)), np.max(np.abs(m + IDENTITY)))
        if dev > RELATOR_TOL:
            report.relators_ok = False
            report.violations.append(f"relator {format_word(r)} is {dev:.3g} away from +-I")
    try:
        check_conjugacy_cap(rep.rank, radius, max_words)
    except ResourceLimit as e:
        report.violations.append(e.detail)
        report.pure_hyperbolic = False
        return report
    for k in range(1, radius + 1):
        for w in conjugacy_reps_of_length(rep.rank, k):
            m = evaluate(w, rep.gens)
            report.checked += 1
            kind = classify_sl2(m, RELATOR_TOL)
            if kind is SL2Class.PLUS_MINUS_IDENTITY:
                report.trivial += 1
                continue
            if kind is not SL2Class.HYPERBOLIC:
                report.pure_hyperbolic = False
                report.violations.append(f"word {format_word(w)} is {kind.value.lower()}")
                continue
            margin = abs(trace(m)) - 2.0
            if margin < report.min_trace_margin:
                report.min_trace_margin = margin
            length = displacement_length(m)
            if length < report.min_length:
                report.min_length = length
                report.shortest_word = format_word(w)
    return report


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def cyclic_rep(mu: float) -> Representation:
    if not 0.0 < mu < 1.0:
        raise ValueError("mu must lie in (0, 1)")
    return Representation(gens=(np.diag([mu, 1.0 / mu]),), label=f"cyclic mu={mu!r}")


def schottky_rep(s: float) -> Representation:
    """Boost along the imaginary axis and its conjugate by a quarter turn.

    Free and discrete only for s large enough; nothing here certifies it.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    a = axis_translation(2.0 * s)
    r = rotation(math.pi / 2.0)
    b = r @ a @ sl2_inverse(r)
    return Representation(gens=(a, b), label=f"schottky s={s!r} (not certified discrete)")


def _genus2_gens(length: float) -> tuple[np.ndarray, ...]:
    return tuple(translation_along(k * GENUS2_ANGLE_STEP, length) for k in range(4))


def _relator_defect(length: float, relator: Word) -> float:
    """Timelike coordinate of psi(traceless part of the relator).

    The relator is a rotation about an octagon vertex; this coordinate is
    proportional to the sine of half the rotation angle and vanishes exactly
    when the relator is +-I.
    """
    m = evaluate(relator, _genus2_gens(length))
    t = trace(m)
    return float(psi(m - (t / 2.0) * IDENTITY)[2])


def calibrate_genus2(
    relator: str = GENUS2_RELATOR,
    bracket: tuple[float, float] = GENUS2_BRACKET,
    tol: float = 1e-14,
    max_steps: int = 200,
) -> float:
    word = parse_word(relator, 4)
    lo, hi = bracket
    f_lo = _relator_defect(lo, word)
    f_hi = _relator_defect(hi, word)
    if f_lo == 0.0:
        return lo
    if f_lo * f_hi > 0:
        raise DegenerateRepresentation(
            f"relator {relator} does not close up anywhere in [{lo}, {hi}]"
        )
    steps = 0
    while hi - lo > tol and steps < max_steps:
        mid = 0.5 * (lo + hi)
        f_mid = _relator_defect(mid, word)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        steps += 1
    length = 0.5 * (lo + hi)
    logger.info("Calibrated genus-2 translation length %.12f after %d bisection steps", length, steps)
    return length


def genus2_rep(relator: str = GENUS2_RELATOR) -> Representation:
    length = calibrate_genus2(relator)
    return Representation(
        gens=_genus2_gens(length),
        relators=(parse_word(relator, 4),),
        label="genus2 octagon",
        genus=2,
    )
