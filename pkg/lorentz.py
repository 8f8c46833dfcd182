"""Lorentzian linear algebra on R^{2,1}.

Vectors are float ndarrays of shape (3,) with x3 the timelike coordinate;
linear maps are (3, 3) ndarrays acting on column vectors.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import NonFiniteInput
from settings import CLASSIFY_TOL

J = np.diag([1.0, 1.0, -1.0])


class CausalKind(str, Enum):
    ZERO = "Zero"
    NULL = "Null"
    TIMELIKE = "Timelike"
    SPACELIKE = "Spacelike"


@dataclass(frozen=True)
class CausalClass:
    kind: CausalKind
    future: bool = False


def as_vec21(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("vector has non-finite entries")
    return v


def as_mat3(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("matrix has non-finite entries")
    return a


def minkowski_metric() -> np.ndarray:
    return J.copy()


def bform(x, y) -> float:
    x = as_vec21(x)
    y = as_vec21(y)
    return float(x[0] * y[0] + x[1] * y[1] - x[2] * y[2])


def causal_class(x, tol: float = CLASSIFY_TOL) -> CausalClass:
    x = as_vec21(x)
    scale = float(np.max(np.abs(x)))
    if scale <= tol:
        return CausalClass(CausalKind.ZERO)
    q = bform(x, x)
    future = bool(x[2] > 0)
    if abs(q) <= tol * scale * scale:
        return CausalClass(CausalKind.NULL, future)
    if q < 0:
        return CausalClass(CausalKind.TIMELIKE, future)
    return CausalClass(CausalKind.SPACELIKE)


def orientation(a, b, c, tol: float = CLASSIFY_TOL) -> int:
    """Sign of det[a b c] with a, b, c as columns; 0 when degenerate."""
    cols = np.column_stack([as_vec21(a), as_vec21(b), as_vec21(c)])
    det = float(np.linalg.det(cols))
    scale = float(np.prod(np.linalg.norm(cols, axis=0)))
    if abs(det) <= tol * scale:
        return 0
    return 1 if det > 0 else -1


def is_lorentz_isometry(m, tol: float = CLASSIFY_TOL) -> bool:
    m = as_mat3(m)
    return bool(np.allclose(m.T @ J @ m, J, rtol=0.0, atol=tol))


def lorentz_cross(a, b) -> np.ndarray:
    """The vector B-orthogonal to both a and b: J (a x b)."""
    return J @ np.cross(as_vec21(a), as_vec21(b))
