"""Parametrized lightlike surfaces.

Every model is a callable ``S(u, v) -> (..., 3)`` that broadcasts over its
arguments and carries a nominal ``domain = (u_range, v_range)``.
``eval_range`` bounds where the sampler may actually be evaluated; it is
wider than ``domain`` for ODE-backed models so that finite-difference
stencils centred on the nominal domain stay inside the integrated range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .frames import AdaptedFrame, FrameLevel, complete_null_frame
from .minkowski import Isometry, inner
from .ode import (
    DEFAULT_STEP,
    FrameCoefficients,
    ProfileFunction,
    integrate_frame_coefficients,
)

SQRT2 = math.sqrt(2.0)
INF = (-math.inf, math.inf)
MIRROR = np.diag([1.0, 1.0, -1.0])

Range = tuple[float, float]
Domain = tuple[Range, Range]


def _grid(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.broadcast_arrays(u, v)


def _oriented(e0, e1, e2, level=FrameLevel.ZERO) -> AdaptedFrame:
    """Flip e1 where needed so the frame has the standard handedness."""
    det = np.linalg.det(np.stack([e0, e1, e2], axis=-1))
    sign = np.where(det > 0, -1.0, 1.0)[..., None]
    return AdaptedFrame(e0, sign * e1, e2, level)


class SurfaceModel:
    kind: str = "surface"
    domain: Domain
    eval_range: Domain = (INF, INF)

    def __call__(self, u: ArrayLike, v: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def frame(self, u: ArrayLike, v: ArrayLike) -> AdaptedFrame:
        raise NotImplementedError(f"{self.kind} has no analytic frame field")

    def sample(self, us: ArrayLike, vs: ArrayLike) -> NDArray[np.float64]:
        """Points on the tensor grid ``us x vs`` as an (nu, nv, 3) array."""
        U, V = np.meshgrid(np.asarray(us, float), np.asarray(vs, float), indexing="ij")
        return self(U, V)


@dataclass(frozen=True)
class Plane(SurfaceModel):
    """``x(u, v) = point + u * null_dir + v * spacelike_dir``."""

    point: NDArray[np.float64]
    null_dir: NDArray[np.float64]
    spacelike_dir: NDArray[np.float64]
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0))
    kind = "plane"

    def __call__(self, u, v):
        u, v = _grid(u, v)
        return self.point + u[..., None] * self.null_dir + v[..., None] * self.spacelike_dir

    def frame(self, u, v):
        u, v = _grid(u, v)
        shape = u.shape + (3,)
        e0 = np.broadcast_to(self.null_dir, shape).copy()
        e1 = np.broadcast_to(self.spacelike_dir, shape).copy()
        return _oriented(e0, e1, complete_null_frame(e0, e1))


@dataclass(frozen=True)
class Cone(SurfaceModel):
    """``x(s, v) = vertex + e^s (1, cos v, sin v)``."""

    vertex: NDArray[np.float64]
    domain: Domain = ((-0.5, 0.5), (0.0, 2.0))
    kind = "cone"

    def __call__(self, s, v):
        s, v = _grid(s, v)
        r = np.exp(s)
        return self.vertex + np.stack([r, r * np.cos(v), r * np.sin(v)], axis=-1)

    def frame(self, s, v):
        s, v = _grid(s, v)
        e0 = np.stack([np.ones_like(v), np.cos(v), np.sin(v)], axis=-1)
        e1 = np.stack([np.zeros_like(v), -np.sin(v), np.cos(v)], axis=-1)
        return _oriented(e0, e1, complete_null_frame(e0, e1))


@dataclass(frozen=True)
class SpacelikeGraph(SurfaceModel):
    """``x = (a (u^2 + v^2), u, v)``; spacelike for small ``a``, never lightlike."""

    a: float = 0.3
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0))
    kind = "graph"

    def __call__(self, u, v):
        u, v = _grid(u, v)
        return np.stack([self.a * (u**2 + v**2), u, v], axis=-1)


@dataclass(frozen=True)
class NonConical(SurfaceModel):
    """``x(u, v) = e^u G0(v) - int_0^v G0 - G0(0)`` from integrated coefficients.

    ``orientation = -1`` gives the mirror image under ``x2 -> -x2``, the
    normal form with the opposite sign of the invariant a2.
    """

    profile: ProfileFunction
    coeffs: FrameCoefficients
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0))
    orientation: int = 1
    kind = "nonconical"

    @property
    def eval_range(self) -> Domain:
        return (INF, self.coeffs.v_range)

    def _check(self, v):
        lo, hi = self.coeffs.v_range
        if np.any(v < lo) or np.any(v > hi):
            raise ValueError(f"v outside integrated range [{lo}, {hi}]")

    def __call__(self, u, v):
        u, v = _grid(u, v)
        self._check(v)
        G0, _, _, I = self.coeffs.evaluate(v)
        x = np.exp(u)[..., None] * G0 - I - self.coeffs.G0[self._origin]
        return x @ MIRROR if self.orientation < 0 else x

    @property
    def _origin(self) -> int:
        return int(np.argmin(np.abs(self.coeffs.v)))

    def frame(self, u, v):
        u, v = _grid(u, v)
        (ulo, uhi), (vlo, vhi) = self.domain
        if np.any(u < ulo) or np.any(u > uhi) or np.any(v < vlo) or np.any(v > vhi):
            raise ValueError("point outside the surface domain")
        self._check(v)
        G0, G1, G2, _ = self.coeffs.evaluate(v)
        eu = np.exp(u)[..., None]
        e0 = eu * G0
        e1 = -G0 / eu + G1
        e2 = -0.5 * G0 / eu**3 + G1 / eu**2 + G2 / eu
        if self.orientation < 0:
            return AdaptedFrame(e0 @ MIRROR, -(e1 @ MIRROR), e2 @ MIRROR, FrameLevel.TWO)
        return AdaptedFrame(e0, e1, e2, FrameLevel.TWO)


@dataclass(frozen=True)
class Transformed(SurfaceModel):
    """Image of ``base`` under a Minkowski isometry."""

    base: SurfaceModel
    isometry: Isometry
    kind = "transformed"

    @property
    def domain(self):
        return self.base.domain

    @property
    def eval_range(self):
        return self.base.eval_range

    def __call__(self, u, v):
        return self.isometry(self.base(u, v))

    def frame(self, u, v):
        F = self.base.frame(u, v)
        L = self.isometry.linear
        sign = 1.0 if self.isometry.is_proper else -1.0
        return AdaptedFrame(L(F.e0), sign * L(F.e1), L(F.e2), F.level)


@dataclass(frozen=True)
class Reparametrized(SurfaceModel):
    """``x~(u, v) = x(u + r, e^{-r} v + s)``: the residual coordinate freedom."""

    base: SurfaceModel
    r: float
    s: float
    kind = "reparametrized"

    def _to_base(self, u, v):
        u, v = _grid(u, v)
        return u + self.r, math.exp(-self.r) * v + self.s

    def _from_base(self, rng: Domain) -> Domain:
        (ulo, uhi), (vlo, vhi) = rng
        k = math.exp(self.r)
        return (ulo - self.r, uhi - self.r), (k * (vlo - self.s), k * (vhi - self.s))

    @property
    def domain(self):
        return self._from_base(self.base.domain)

    @property
    def eval_range(self):
        return self._from_base(self.base.eval_range)

    def __call__(self, u, v):
        return self.base(*self._to_base(u, v))

    def frame(self, u, v):
        return self.base.frame(*self._to_base(u, v))


# ---------------------------------------------------------------- constructors


def parametrize_nonconical(
    f: ProfileFunction,
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0)),
    step: float = DEFAULT_STEP,
    margin: float = 0.25,
    orientation: int = 1,
) -> NonConical:
    """Integrate the coefficient system for ``f`` and wrap it as a surface.

    The ODE is integrated over the v-range of ``domain`` widened by
    ``margin`` on both sides.
    """
    (ulo, uhi), (vlo, vhi) = domain
    if not (ulo <= 0.0 <= uhi and vlo <= 0.0 <= vhi):
        raise ValueError("domain must contain (0, 0)")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    coeffs = integrate_frame_coefficients(f, (vlo - margin, vhi + margin), step=step)
    return NonConical(f, coeffs, domain, orientation)


def make_plane(
    point: ArrayLike = (0.0, 0.0, 0.0),
    null_dir: ArrayLike = (1 / SQRT2, 1 / SQRT2, 0.0),
    spacelike_dir: ArrayLike = (0.0, 0.0, 1.0),
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0)),
    tol: float = 1e-10,
) -> Plane:
    p = np.asarray(point, dtype=float)
    n = np.asarray(null_dir, dtype=float)
    s = np.asarray(spacelike_dir, dtype=float)
    scale = float(np.sum(n**2))
    if scale == 0 or abs(inner(n, n)) > tol * scale:
        raise ValueError("null_dir must be a nonzero null vector")
    if abs(inner(s, s) - 1.0) > tol:
        raise ValueError("spacelike_dir must be unit spacelike")
    if abs(inner(n, s)) > tol * math.sqrt(scale):
        raise ValueError("spacelike_dir must be orthogonal to null_dir")
    return Plane(p, n, s, domain)


def make_cone(vertex: ArrayLike = (0.0, 0.0, 0.0), domain: Domain = ((-0.5, 0.5), (0.0, 2.0))) -> Cone:
    return Cone(np.asarray(vertex, dtype=float), domain)


def reparametrize(S: SurfaceModel, r: float, s: float) -> Reparametrized:
    return Reparametrized(S, float(r), float(s))


def transform(S: SurfaceModel, T: Isometry) -> Transformed:
    return Transformed(S, T)


def frame_field(S: SurfaceModel, u: ArrayLike, v: ArrayLike) -> AdaptedFrame:
    return S.frame(u, v)


# ---------------------------------------------------------------- closed forms


def _x_f0(u, v):
    eu = np.exp(u)
    return np.stack(
        [
            (eu * (3 * v**2 + 4 * v + 4) - (v**3 + 2 * v**2 + 4 * v + 4)) / (4 * SQRT2),
            (eu * (-3 * v**2 + 12 * v + 12) + (v**3 - 6 * v**2 - 12 * v - 12)) / (12 * SQRT2),
            (eu * (3 * v**2 + 6 * v) - (v**3 + 3 * v**2)) / 6,
        ],
        axis=-1,
    )


def _x_f1(u, v):
    eu = np.exp(u)
    ep = np.exp(SQRT2 * v)
    em = np.exp(-SQRT2 * v)
    r = SQRT2
    return np.stack(
        [
            (
                ep * ((5 * r + 4) * eu - 5 - 2 * r)
                + em * ((5 * r - 4) * eu + 5 - 2 * r)
                + 2 * r * (v - eu - 2)
            )
            / 16,
            (
                ep * ((r + 4) * eu - 1 - 2 * r)
                + em * ((r - 4) * eu + 1 - 2 * r)
                + 2 * r * (-3 * v + 3 * eu - 2)
            )
            / 16,
            (
                ep * ((2 * r + 2) * eu - 2 - r)
                + em * ((-2 * r + 2) * eu - 2 + r)
                + 4 * (v - eu + 1)
            )
            / 8,
        ],
        axis=-1,
    )


def _x_fm1(u, v):
    eu = np.exp(u)
    c = np.cos(SQRT2 * v)
    s = np.sin(SQRT2 * v)
    r = SQRT2
    return np.stack(
        [
            (r * (2 - eu) * c + (1 + 4 * eu) * s - r * (5 * v - 5 * eu + 6)) / 8,
            (r * (2 + 3 * eu) * c + (-3 + 4 * eu) * s - r * (v - eu + 6)) / 8,
            ((2 - 2 * eu) * c + r * (1 + 2 * eu) * s - (2 * v - 2 * eu + 2)) / 4,
        ],
        axis=-1,
    )


CLOSED_FORMS = {"f0": (_x_f0, 0.0), "f1": (_x_f1, 1.0), "fm1": (_x_fm1, -1.0)}


def closed_form_example(example: str, u: ArrayLike, v: ArrayLike) -> NDArray[np.float64]:
    """Evaluate the explicit parametrization for f = 0 (``f0``), 1 (``f1``), -1 (``fm1``)."""
    try:
        fn, _ = CLOSED_FORMS[example]
    except KeyError:
        raise ValueError(f"unknown example {example!r}; expected one of {sorted(CLOSED_FORMS)}") from None
    u, v = _grid(u, v)
    return fn(u, v)


@dataclass(frozen=True)
class ClosedForm(SurfaceModel):
    example: str
    domain: Domain = ((-1.0, 1.0), (-1.0, 1.0))
    kind = "closed_form"

    def __post_init__(self):
        if self.example not in CLOSED_FORMS:
            raise ValueError(f"unknown example {self.example!r}")

    @property
    def f_value(self) -> float:
        return CLOSED_FORMS[self.example][1]

    def __call__(self, u, v):
        return closed_form_example(self.example, u, v)
