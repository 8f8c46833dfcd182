"""SL(2,R), its Lie algebra, and the local isomorphism rho: SL(2,R) -> SO(2,1).

Group elements are float ndarrays of shape (2, 2) with unit determinant
(build them with ``as_sl2``). Lie algebra elements are traceless (2, 2)
ndarrays [[v1, v2], [v3, -v1]].
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import NegativeTrace, NonFiniteInput, NotHyperbolic, NotInSL2
from lorentz import as_vec21, bform, lorentz_cross, orientation
from settings import CLASSIFY_TOL, DET_TOL

IDENTITY = np.eye(2)


class SL2Class(str, Enum):
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"
    PLUS_MINUS_IDENTITY = "PlusMinusIdentity"


@dataclass(frozen=True)
class Eigenframe:
    xminus: np.ndarray
    xplus: np.ndarray
    xzero: np.ndarray
    lam: float
    mu: float


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def as_mat2(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.shape == (4,):
        a = a.reshape(2, 2)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("matrix has non-finite entries")
    return a


def as_sl2(m, tol: float = DET_TOL) -> np.ndarray:
    a = as_mat2(m)
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det - 1.0) > tol:
        raise NotInSL2(f"determinant {det!r} differs from 1 by more than {tol:g}")
    return a


def sl2_vec(v1: float, v2: float, v3: float) -> np.ndarray:
    return np.array([[v1, v2], [v3, -v1]], dtype=np.float64)


def sl2_coords(x: np.ndarray) -> tuple[float, float, float]:
    return float(x[0, 0]), float(x[0, 1]), float(x[1, 0])


def sl2_inverse(g: np.ndarray) -> np.ndarray:
    """Exact inverse of a unit-determinant matrix."""
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])


def conjugate(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ad(g) x = g x g^-1."""
    return g @ x @ sl2_inverse(g)


def rotation(theta: float) -> np.ndarray:
    """Elliptic element rotating the upper half-plane by theta about i."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, s], [-s, c]])


def axis_translation(length: float) -> np.ndarray:
    """Translation by `length` along the imaginary axis."""
    e = math.exp(length / 2.0)
    return np.array([[e, 0.0], [0.0, 1.0 / e]])


def translation_along(theta: float, length: float) -> np.ndarray:
    """Translation by `length` along the geodesic through i at angle theta."""
    r = rotation(theta)
    return r @ axis_translation(length) @ sl2_inverse(r)


# ---------------------------------------------------------------------------
# Trace form, psi and rho
# ---------------------------------------------------------------------------

def bform_sl2(x: np.ndarray, y: np.ndarray) -> float:
    return 0.5 * float(np.trace(x @ y))


def psi(x: np.ndarray) -> np.ndarray:
    v1, v2, v3 = sl2_coords(x)
    return np.array([v1, (v2 + v3) / 2.0, (-v2 + v3) / 2.0])


def psi_inv(x) -> np.ndarray:
    x1, x2, x3 = as_vec21(x)
    return sl2_vec(x1, x2 - x3, x2 + x3)


def rho(g: np.ndarray) -> np.ndarray:
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    aa, bb, cc, dd = a * a, b * b, c * c, d * d
    return np.array([
        [1.0 + 2.0 * b * c, -a * c + b * d, a * c + b * d],
        [-a * b + c * d, (aa - bb - cc + dd) / 2.0, (-aa - bb + cc + dd) / 2.0],
        [a * b + c * d, (-aa + bb - cc + dd) / 2.0, (aa + bb + cc + dd) / 2.0],
    ])


def rho_star(x: np.ndarray) -> np.ndarray:
    """Derivative of rho at the identity, sl(2,R) -> o(2,1).

    rho_star(x) psi(y) = psi([x, y]).
    """
    v1, v2, v3 = sl2_coords(x)
    return np.array([
        [0.0, v2 - v3, v2 + v3],
        [v3 - v2, 0.0, -2.0 * v1],
        [v2 + v3, -2.0 * v1, 0.0],
    ])


# ---------------------------------------------------------------------------
# Classification and lengths
# ---------------------------------------------------------------------------

def trace(g: np.ndarray) -> float:
    return float(g[0, 0] + g[1, 1])


def classify_sl2(g: np.ndarray, tol: float = CLASSIFY_TOL) -> SL2Class:
    if np.max(np.abs(g - IDENTITY)) <= tol or np.max(np.abs(g + IDENTITY)) <= tol:
        return SL2Class.PLUS_MINUS_IDENTITY
    t = abs(trace(g))
    if t > 2.0 + tol:
        return SL2Class.HYPERBOLIC
    if t < 2.0 - tol:
        return SL2Class.ELLIPTIC
    return SL2Class.PARABOLIC


def _require_hyperbolic(g: np.ndarray) -> float:
    t = trace(g)
    if not abs(t) > 2.0 + CLASSIFY_TOL:
        raise NotHyperbolic(f"|tr| = {abs(t)!r} is not above 2", trace=t)
    return t


def mu_of(g: np.ndarray) -> float:
    t = abs(_require_hyperbolic(g))
    return 2.0 / (t + math.sqrt(t * t - 4.0))


def displacement_length(g: np.ndarray) -> float:
    t = abs(_require_hyperbolic(g))
    return 2.0 * math.acosh(t / 2.0)


# ---------------------------------------------------------------------------
# Exponential and logarithm
# ---------------------------------------------------------------------------

def _cosh_sinhc(k2: float) -> tuple[float, float]:
    """(cosh k, sinh(k)/k) for k^2 = k2, continued analytically to k2 <= 0."""
    if abs(k2) < 1e-12:
        return 1.0 + k2 / 2.0, 1.0 + k2 / 6.0
    if k2 > 0:
        k = math.sqrt(k2)
        return math.cosh(k), math.sinh(k) / k
    k = math.sqrt(-k2)
    return math.cos(k), math.sin(k) / k


def exp_sl2(x: np.ndarray) -> np.ndarray:
    k2 = float(x[0, 0] * x[0, 0] + x[0, 1] * x[1, 0])
    c, s = _cosh_sinhc(k2)
    return c * IDENTITY + s * x


def log_hyperbolic(g: np.ndarray) -> np.ndarray:
    t = _require_hyperbolic(g)
    if t < 0:
        raise NegativeTrace("trace below -2; take the logarithm of -g")
    h = t / 2.0
    coef = math.acosh(h) / math.sqrt(h * h - 1.0)
    return coef * (g - h * IDENTITY)


# ---------------------------------------------------------------------------
# Eigenvectors
# ---------------------------------------------------------------------------

def neutral_vector(g: np.ndarray) -> np.ndarray:
    """x^0(g): the unit spacelike fixed vector completing x^-(g), x^+(g)."""
    t = _require_hyperbolic(g)
    scale = math.copysign(1.0, t) / (math.sqrt(t * t - 4.0) / 2.0)
    return psi(scale * (g - (t / 2.0) * IDENTITY))


def _eigenvector(g: np.ndarray, m: float) -> np.ndarray:
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    v1 = np.array([b, m - a])
    v2 = np.array([m - d, c])
    return v1 if np.dot(v1, v1) >= np.dot(v2, v2) else v2


def _null_direction(v: np.ndarray) -> np.ndarray:
    """psi of the rank-one nilpotent built on v, scaled to third coordinate 1."""
    p, q = v
    n = p * p + q * q
    return np.array([2.0 * p * q / n, (q * q - p * p) / n, 1.0])


def eigenframe(g: np.ndarray) -> Eigenframe:
    t = _require_hyperbolic(g)
    mu = mu_of(g)
    sign = math.copysign(1.0, t)
    xminus = _null_direction(_eigenvector(g, sign * mu))
    xplus = _null_direction(_eigenvector(g, sign / mu))
    n = lorentz_cross(xminus, xplus)
    xzero = n / math.sqrt(bform(n, n))
    if orientation(xminus, xplus, xzero) < 0:
        xzero = -xzero
    return Eigenframe(xminus=xminus, xplus=xplus, xzero=xzero, lam=mu * mu, mu=mu)
