"""Linear algebra of the Minkowski space R^{2,1}.

Vectors are plain numpy arrays whose last axis has length 3, ordered
``(x0, x1, x2)`` with the timelike coordinate first.  Every function
broadcasts over leading axes, so a whole grid of vectors can be passed
where a single vector is expected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

#: Signature matrix diag(-1, 1, 1).
ETA = np.diag([-1.0, 1.0, 1.0])

#: Default tolerance for nullity tests on unit-scale vectors.
NULL_TOL = 1e-9

#: Default tolerance for the isometry condition A^T eta A = eta.
ISOMETRY_TOL = 1e-12

MVector = NDArray[np.float64]


class InvalidIsometryError(ValueError):
    """Raised when a matrix does not preserve the Minkowski inner product."""


def mvec(x0: float, x1: float, x2: float) -> MVector:
    """Build a single finite vector of R^{2,1}."""
    v = np.array([x0, x1, x2], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector components: {v}")
    return v


def inner(v: ArrayLike, w: ArrayLike) -> NDArray[np.float64] | float:
    """Minkowski inner product ``-v0 w0 + v1 w1 + v2 w2``."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return -v[..., 0] * w[..., 0] + v[..., 1] * w[..., 1] + v[..., 2] * w[..., 2]


def norm_sq(v: ArrayLike):
    return inner(v, v)


class CausalClass(enum.Enum):
    SPACELIKE = "Spacelike"
    TIMELIKE = "Timelike"
    NULL = "Null"
    ZERO = "Zero"


def causal_class(v: ArrayLike, tol: float = NULL_TOL) -> CausalClass:
    """Classify a single vector by the sign of its squared norm.

    The zero test uses the max-norm of ``v``; the null test uses
    ``|<v, v>| < tol`` without rescaling, so callers comparing vectors of
    very different sizes should normalize first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v)) < tol:
        return CausalClass.ZERO
    q = float(inner(v, v))
    if abs(q) < tol:
        return CausalClass.NULL
    return CausalClass.SPACELIKE if q > 0 else CausalClass.TIMELIKE


def isometry_defect(A: ArrayLike) -> float:
    """Max-norm of ``A^T eta A - eta``."""
    A = np.asarray(A, dtype=float)
    return float(np.max(np.abs(A.T @ ETA @ A - ETA)))


@dataclass(frozen=True)
class Isometry:
    """The Minkowski isometry ``x -> A x + b`` with ``A`` in O(2,1)."""

    A: NDArray[np.float64]
    b: NDArray[np.float64] = field(default_factory=lambda: np.zeros(3))
    tol: float = ISOMETRY_TOL

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.shape != (3, 3) or b.shape != (3,):
            raise InvalidIsometryError("expected a 3x3 matrix and a 3-vector")
        defect = isometry_defect(A)
        if not defect <= self.tol:
            raise InvalidIsometryError(f"A^T eta A differs from eta by {defect:.3e}")
        A.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def linear(self, v: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(v, dtype=float) @ self.A.T

    def __call__(self, x: ArrayLike) -> NDArray[np.float64]:
        return self.linear(x) + self.b

    def compose(self, other: "Isometry") -> "Isometry":
        """Return ``self o other``."""
        return Isometry(self.A @ other.A, self.A @ other.b + self.b, tol=max(self.tol, other.tol) * 4)

    @property
    def is_proper(self) -> bool:
        return bool(np.linalg.det(self.A) > 0)

    @property
    def is_orthochronous(self) -> bool:
        return bool(self.A[0, 0] > 0)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, b: ArrayLike) -> "Isometry":
        return cls(np.eye(3), np.asarray(b, dtype=float))


def apply_isometry(T: Isometry, x: ArrayLike) -> NDArray[np.float64]:
    """Apply ``T`` to points ``x``; re-checks the isometry condition."""
    defect = isometry_defect(T.A)
    if not defect <= T.tol:
        raise InvalidIsometryError(f"A^T eta A differs from eta by {defect:.3e}")
    return T(x)


def boost(rapidity: float, axis: int = 1) -> NDArray[np.float64]:
    """Boost along spatial axis 1 or 2."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    A = np.eye(3)
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    A[0, 0] = A[axis, axis] = c
    A[0, axis] = A[axis, 0] = s
    return A


def rotation(angle: float) -> NDArray[np.float64]:
    """Spatial rotation in the (x1, x2) plane."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def random_isometry(
    rng: np.random.Generator,
    max_rapidity: float = 0.5,
    max_shift: float = 1.0,
    proper: bool = True,
) -> Isometry:
    """Random element of the identity component times a translation.

    With ``proper=False`` a spatial reflection is composed in half the time.
    """
    A = rotation(rng.uniform(0, 2 * np.pi)) @ boost(rng.uniform(-max_rapidity, max_rapidity)) @ rotation(
        rng.uniform(0, 2 * np.pi)
    )
    if not proper and rng.random() < 0.5:
        A = A @ np.diag([1.0, 1.0, -1.0])
    b = rng.uniform(-max_shift, max_shift, size=3)
    return Isometry(A, b, tol=1e-10)
