"""Null frames adapted to lightlike surfaces.

A frame ``(e0, e1, e2)`` is adapted when ``e0, e2`` are null with
``<e0, e2> = 1``, ``e1`` is a unit spacelike vector, and ``e1`` is orthogonal
to both.  The frame vectors may carry leading batch axes, which is how
frame *fields* sampled on a grid are represented.

Orientation: the reference frame returned by :func:`standard_frame` has
``det[e0 e1 e2] = -1``.  A frame is called positively oriented when it has
the same handedness, i.e. when that determinant is negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .minkowski import inner

SQRT2 = np.sqrt(2.0)

RELATIONS = ("<e0,e0>", "<e0,e1>", "<e1,e2>", "<e2,e2>", "<e0,e2>", "<e1,e1>")


class FrameError(ValueError):
    """Input vectors cannot be completed to, or do not form, an adapted frame."""


class FrameLevel(enum.IntEnum):
    ZERO = 0
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class AdaptedFrame:
    e0: NDArray[np.float64]
    e1: NDArray[np.float64]
    e2: NDArray[np.float64]
    level: FrameLevel = FrameLevel.ZERO

    def __post_init__(self):
        for name in ("e0", "e1", "e2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def matrix(self) -> NDArray[np.float64]:
        """Frame vectors as the columns of a (..., 3, 3) array."""
        return np.stack([self.e0, self.e1, self.e2], axis=-1)

    def orientation(self) -> NDArray[np.float64]:
        """+1 where the frame has the standard frame's handedness, else -1."""
        return -np.sign(np.linalg.det(self.matrix()))

    def __getitem__(self, idx) -> "AdaptedFrame":
        return AdaptedFrame(self.e0[idx], self.e1[idx], self.e2[idx], self.level)


@dataclass(frozen=True)
class GaugeParameters:
    """Parameters (mu, lambda) of the structure group of 0-adapted frames.

    Either may be an array for a position-dependent gauge.
    """

    mu: ArrayLike
    lam: ArrayLike = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.mu) == 0):
            raise ValueError("mu must be nonzero")

    def matrix(self) -> NDArray[np.float64]:
        mu = np.asarray(self.mu, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        mu, lam = np.broadcast_arrays(mu, lam)
        M = np.zeros(mu.shape + (3, 3))
        M[..., 0, 0] = mu
        M[..., 0, 1] = lam
        M[..., 0, 2] = -(lam**2) / (2 * mu)
        M[..., 1, 1] = 1.0
        M[..., 1, 2] = -lam / mu
        M[..., 2, 2] = 1.0 / mu
        return M

    def then(self, other: "GaugeParameters") -> "GaugeParameters":
        """Parameters of applying ``self`` first and ``other`` second."""
        mu1, lam1 = np.asarray(self.mu, float), np.asarray(self.lam, float)
        mu2, lam2 = np.asarray(other.mu, float), np.asarray(other.lam, float)
        return GaugeParameters(mu1 * mu2, lam1 + mu1 * lam2)


@dataclass(frozen=True)
class FrameReport:
    residuals: dict[str, float]
    min_orientation: float
    min_abs_det: float
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def oriented(self) -> bool:
        return self.min_orientation > 0

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol and self.oriented and self.min_abs_det > self.tol


def standard_frame() -> AdaptedFrame:
    """The frame at the origin of the non-conical normal form."""
    return AdaptedFrame(
        np.array([1.0, 1.0, 0.0]) / SQRT2,
        np.array([0.0, 0.0, 1.0]),
        np.array([-1.0, 1.0, 0.0]) / SQRT2,
        FrameLevel.TWO,
    )


def relation_residuals(F: AdaptedFrame) -> dict[str, NDArray[np.float64]]:
    """Pointwise deviations of the six adapted inner products from their targets."""
    e0, e1, e2 = F.e0, F.e1, F.e2
    return {
        "<e0,e0>": np.abs(inner(e0, e0)),
        "<e0,e1>": np.abs(inner(e0, e1)),
        "<e1,e2>": np.abs(inner(e1, e2)),
        "<e2,e2>": np.abs(inner(e2, e2)),
        "<e0,e2>": np.abs(inner(e0, e2) - 1.0),
        "<e1,e1>": np.abs(inner(e1, e1) - 1.0),
    }


def verify_frame(F: AdaptedFrame, tol: float = 1e-9) -> FrameReport:
    res = {k: float(np.max(v)) for k, v in relation_residuals(F).items()}
    det = np.linalg.det(F.matrix())
    return FrameReport(
        residuals=res,
        min_orientation=float(np.min(-np.sign(det))),
        min_abs_det=float(np.min(np.abs(det))),
        tol=tol,
    )


def complete_null_frame(e0: ArrayLike, e1: ArrayLike, tol: float = 1e-8) -> NDArray[np.float64]:
    """Return the unique ``e2`` making ``(e0, e1, e2)`` an adapted frame.

    ``e2`` is the second null direction of the timelike plane ``e1^perp``,
    scaled so that ``<e0, e2> = 1``.  It is built by projecting the time axis
    onto ``e1^perp`` and adding the multiple of ``e0`` that makes it null.
    Note that ``e2`` is fixed by ``(e0, e1)``, so the orientation of the
    result is decided by the inputs.
    """
    e0 = np.asarray(e0, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    scale = np.sum(e0**2, axis=-1)
    if np.any(scale < tol**2):
        raise FrameError("e0 is zero")
    if np.any(np.abs(inner(e0, e0)) > tol * scale):
        raise FrameError("e0 is not null")
    if np.any(np.abs(inner(e1, e1) - 1.0) > tol):
        raise FrameError("e1 is not a unit spacelike vector")
    if np.any(np.abs(inner(e0, e1)) > tol * np.sqrt(scale)):
        raise FrameError("e1 is not orthogonal to e0")
    t = np.zeros_like(e0)
    t[..., 0] = 1.0
    c = t - inner(t, e1)[..., None] * e1
    c = c / inner(c, e0)[..., None]
    return c - 0.5 * inner(c, c)[..., None] * e0


def gauge_transform(F: AdaptedFrame, g: GaugeParameters, tol: float = 1e-7) -> AdaptedFrame:
    """Act on ``F`` by the structure-group element with parameters ``g``.

    ``e0 -> mu e0``, ``e1 -> e1 + lam e0``,
    ``e2 -> e2/mu - (lam/mu) e1 - (lam^2 / 2mu) e0``.
    """
    if not verify_frame(F, tol).passed:
        raise FrameError("input is not a positively oriented adapted frame")
    mu = np.asarray(g.mu, dtype=float)[..., None]
    lam = np.asarray(g.lam, dtype=float)[..., None]
    e0 = mu * F.e0
    e1 = F.e1 + lam * F.e0
    e2 = F.e2 / mu - (lam / mu) * F.e1 - (lam**2 / (2 * mu)) * F.e0
    identity_mu = np.all(mu == 1.0)
    if identity_mu and np.all(lam == 0.0):
        level = F.level
    elif identity_mu:
        level = min(F.level, FrameLevel.ONE)
    else:
        level = FrameLevel.ZERO
    return AdaptedFrame(e0, e1, e2, level)


def frame_decompose(w: ArrayLike, F: AdaptedFrame) -> NDArray[np.float64]:
    """Coefficients ``(c0, c1, c2)`` with ``w = c0 e0 + c1 e1 + c2 e2``."""
    w = np.asarray(w, dtype=float)
    return np.stack([inner(w, F.e2), inner(w, F.e1), inner(w, F.e0)], axis=-1)


def frame_reconstruct(c: ArrayLike, F: AdaptedFrame) -> NDArray[np.float64]:
    c = np.asarray(c, dtype=float)
    return c[..., 0:1] * F.e0 + c[..., 1:2] * F.e1 + c[..., 2:3] * F.e2
