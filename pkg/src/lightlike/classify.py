"""Numerical equivalence method for lightlike surfaces.

From a sampled surface the module builds a 0-adapted frame field, extracts
the invariants a1 ... a5 by successive frame adaptations, and sorts the
surface into plane / cone / non-conical, recovering the profile function
f = (a4 + a2^2 / 2) / a2 in the last case.

Two differentiation regimes are used:

* Point-wise diagnostics (:func:`induced_metric`,
  :func:`connection_coefficient`, :func:`verify_structure_equations`) use
  second-order centred differences of the sampler with a small step ``h``.
* The invariant chain differentiates the surface five to six times in
  succession.  It runs on a uniform lattice with high-order stencils
  (default sixth order, spacing ~0.02), because nested second-order
  differences at ``h ~ 1e-3`` are swamped by rounding error.

1-forms on the parameter domain are stored as arrays with a trailing axis
of length 2 holding their ``du`` and ``dv`` coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_simpson

from .fd import central, diff
from .frames import AdaptedFrame, FrameLevel, complete_null_frame, frame_decompose, relation_residuals
from .minkowski import inner

FrameFn = Callable[[NDArray, NDArray], AdaptedFrame]
Sampler = Callable[[NDArray, NDArray], NDArray]

DEFAULT_FD_STEP = 1e-3
DEFAULT_LATTICE_STEP = 0.02
DEFAULT_ORDER = 6


class NotRegularError(ValueError):
    """The tangent vectors x_u, x_v are (numerically) dependent."""


class NotLightlikeError(ValueError):
    """The induced metric is not degenerate within tolerance."""


class InconsistentConeError(ValueError):
    """The points x - e0 do not coincide, so there is no common vertex."""


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds of the classifier.

    ``plane`` bounds ``|a1| L`` and ``cone`` bounds ``|a2| L^2``, where ``L``
    is the RMS distance of the sampled points from their centroid; this
    makes both tests scale-free.  ``degeneracy`` bounds
    ``|det g| / (tr g)^2``.
    """

    plane: float = 1e-5
    cone: float = 1e-5
    degeneracy: float = 1e-6
    vertex: float = 1e-6
    canonical: float = 1e-3

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in ("plane", "cone", "degeneracy", "vertex", "canonical")}


# ---------------------------------------------------------------- point-wise diagnostics


@dataclass(frozen=True)
class MetricSample:
    g: NDArray[np.float64]  # (..., 2, 2)
    eigenvalues: NDArray[np.float64]  # (..., 2) ascending
    det_rel: NDArray[np.float64]  # |det g| / (tr g)^2

    @property
    def rank(self) -> NDArray[np.int_]:
        scale = np.max(np.abs(self.eigenvalues), axis=-1)
        return np.sum(np.abs(self.eigenvalues) > 1e-6 * scale[..., None], axis=-1)


def _metric(xu: NDArray, xv: NDArray) -> NDArray:
    E = inner(xu, xu)
    F = inner(xu, xv)
    G = inner(xv, xv)
    return np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)


def _check_regular(xu: NDArray, xv: NDArray, tol: float = 1e-8):
    cross = np.linalg.norm(np.cross(xu, xv), axis=-1)
    scale = np.linalg.norm(xu, axis=-1) * np.linalg.norm(xv, axis=-1)
    if np.any(~(cross > tol * scale)):
        raise NotRegularError("x_u and x_v are linearly dependent")


def metric_from_tangents(xu: NDArray, xv: NDArray) -> MetricSample:
    _check_regular(xu, xv)
    g = _metric(xu, xv)
    ev = np.linalg.eigvalsh(g)
    tr = g[..., 0, 0] + g[..., 1, 1]
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        det_rel = np.abs(det) / tr**2
    return MetricSample(g, ev, det_rel)


def tangents(S: Sampler, u: ArrayLike, v: ArrayLike, h: float = DEFAULT_FD_STEP):
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    xu = central(S(u + h, v), S(u - h, v), h)
    xv = central(S(u, v + h), S(u, v - h), h)
    return xu, xv


def induced_metric(S: Sampler, u: ArrayLike, v: ArrayLike, h: float = DEFAULT_FD_STEP) -> MetricSample:
    """First fundamental form ``[[E, F], [F, G]]`` by centred differences."""
    return metric_from_tangents(*tangents(S, u, v, h))


def null_frame_from_tangents(xu: NDArray, xv: NDArray) -> AdaptedFrame:
    """0-adapted frame from the tangent vectors of a lightlike surface.

    ``e0`` spans the kernel of the induced metric, scaled to unit time
    component (future pointing); ``e1`` is the normalized tangent along
    the parameter direction orthogonal to the kernel, with its sign chosen
    for positive orientation.
    """
    g = _metric(xu, xv)
    _, vecs = np.linalg.eigh(g)
    # eigenvalue closest to zero: on a semi-definite metric that is the smaller one
    k = vecs[..., :, 0]
    e0 = k[..., 0:1] * xu + k[..., 1:2] * xv
    e0 = e0 / e0[..., 0:1]
    t = -k[..., 1:2] * xu + k[..., 0:1] * xv
    e1 = t / np.sqrt(inner(t, t))[..., None]
    e2 = complete_null_frame(e0, e1, tol=1e-5)
    det = np.linalg.det(np.stack([e0, e1, e2], axis=-1))
    sign = np.where(det > 0, -1.0, 1.0)[..., None]
    return AdaptedFrame(e0, sign * e1, e2, FrameLevel.ZERO)


def tangent_frame_0adapted(
    S: Sampler,
    u: ArrayLike,
    v: ArrayLike,
    h: float = DEFAULT_FD_STEP,
    degeneracy_tol: float = 1e-6,
) -> AdaptedFrame:
    xu, xv = tangents(S, u, v, h)
    m = metric_from_tangents(xu, xv)
    if np.any(~(m.det_rel < degeneracy_tol)):
        raise NotLightlikeError(f"induced metric not degenerate: |det g|/tr^2 = {np.max(m.det_rel):.3e}")
    return null_frame_from_tangents(xu, xv)


FORM_NAMES = ("omega^1_0", "omega^0_0", "omega^0_1", "omega^0", "omega^1")


def _direction(direction) -> tuple[float, float]:
    if direction == "u":
        return 1.0, 0.0
    if direction == "v":
        return 0.0, 1.0
    a, b = direction
    return float(a), float(b)


def connection_coefficient(
    S: Sampler,
    frame: FrameFn,
    which: str,
    u: ArrayLike,
    v: ArrayLike,
    direction="u",
    h: float = DEFAULT_FD_STEP,
) -> NDArray[np.float64]:
    """Evaluate a Maurer-Cartan form of ``frame`` on the vector ``direction``.

    ``which`` is one of ``omega^1_0 = <d e0, e1>``, ``omega^0_0 = <d e0, e2>``,
    ``omega^0_1 = <d e1, e2>``, ``omega^0 = <dx, e2>``, ``omega^1 = <dx, e1>``.
    """
    if which not in FORM_NAMES:
        raise ValueError(f"unknown form {which!r}")
    a, b = _direction(direction)
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    up, vp, um, vm = u + h * a, v + h * b, u - h * a, v - h * b
    F = frame(u, v)
    if which in ("omega^0", "omega^1"):
        d = central(S(up, vp), S(um, vm), h)
        return inner(d, F.e2 if which == "omega^0" else F.e1)
    Fp, Fm = frame(up, vp), frame(um, vm)
    if which == "omega^1_0":
        return inner(central(Fp.e0, Fm.e0, h), F.e1)
    if which == "omega^0_0":
        return inner(central(Fp.e0, Fm.e0, h), F.e2)
    return inner(central(Fp.e1, Fm.e1, h), F.e2)


# ---------------------------------------------------------------- structure equations


def _wedge(a: NDArray, b: NDArray) -> NDArray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _forms_from_derivatives(F: AdaptedFrame, xd: tuple[NDArray, NDArray], ed: list[tuple[NDArray, NDArray]]):
    """Solder forms (..., 3, 2) and connection matrix (..., 3, 3, 2).

    ``xd`` holds (x_u, x_v) and ``ed[b]`` holds the derivatives of e_b.
    ``theta[..., a, :]`` is omega^a and ``omega[..., a, b, :]`` is omega^a_b.
    """
    theta = np.stack([frame_decompose(xd[0], F), frame_decompose(xd[1], F)], axis=-1)
    omega = np.stack(
        [np.stack([frame_decompose(ed[b][0], F), frame_decompose(ed[b][1], F)], axis=-1) for b in range(3)],
        axis=-2,
    )
    return theta, omega


def structure_residuals(theta: NDArray, omega: NDArray, dtheta: NDArray, domega: NDArray) -> dict[str, NDArray]:
    """Pointwise residuals of ``d omega^a + omega^a_b ^ omega^b`` and
    ``d omega^a_b + omega^a_c ^ omega^c_b`` given exterior derivatives
    (coefficients of du ^ dv)."""
    out = {}
    for a in range(3):
        r = dtheta[..., a] + sum(_wedge(omega[..., a, b, :], theta[..., b, :]) for b in range(3))
        out[f"d omega^{a}"] = np.abs(r)
    for a in range(3):
        for b in range(3):
            r = domega[..., a, b] + sum(_wedge(omega[..., a, c, :], omega[..., c, b, :]) for c in range(3))
            out[f"d omega^{a}_{b}"] = np.abs(r)
    return out




def verify_structure_equations(
    S: Sampler,
    frame: FrameFn,
    us: ArrayLike,
    vs: ArrayLike,
    h: float = DEFAULT_FD_STEP,
) -> dict[str, float]:
    """Max residual of each Maurer-Cartan structure equation on a grid.

    Forms are centred differences of the frame field and of ``S`` at
    offsets ``+-h``; their exterior derivatives are centred differences of
    the forms, so each grid point uses a 5 x 5 patch of samples.
    """
    U, V = np.meshgrid(np.asarray(us, float), np.asarray(vs, float), indexing="ij")
    off = np.arange(-2, 3) * h
    # patch axes lead: (5, 5, nu, nv)
    PU = off[:, None, None, None] + U
    PV = off[None, :, None, None] + V
    PU, PV = np.broadcast_arrays(PU, PV)
    X = S(PU, PV)
    F = frame(PU, PV)

    def du(a):
        return (a[2:, 1:-1] - a[:-2, 1:-1]) / (2 * h)

    def dv(a):
        return (a[1:-1, 2:] - a[1:-1, :-2]) / (2 * h)

    theta, omega = _forms_from_derivatives(
        F[1:-1, 1:-1], (du(X), dv(X)), [(du(e), dv(e)) for e in (F.e0, F.e1, F.e2)]
    )

    def ext(form):
        # d(P du + Q dv) = (Q_u - P_v) du ^ dv at the patch centre
        return (form[2, 1, ..., 1] - form[0, 1, ..., 1]) / (2 * h) - (form[1, 2, ..., 0] - form[1, 0, ..., 0]) / (2 * h)

    res = structure_residuals(theta[1, 1], omega[1, 1], ext(theta), ext(omega))
    out = {k: float(np.max(v)) for k, v in res.items()}
    out["max"] = max(out.values())
    return out


# ---------------------------------------------------------------- lattice


@dataclass(frozen=True)
class Lattice:
    """Surface samples on a uniform tensor lattice.

    ``grid_iu``/``grid_iv`` locate the requested grid inside the lattice;
    ``band`` is the number of edge rows whose values use one-sided
    stencils in the nested differences and are therefore excluded from
    statistics.
    """

    u: NDArray[np.float64]
    v: NDArray[np.float64]
    X: NDArray[np.float64]
    order: int = DEFAULT_ORDER
    grid_iu: NDArray[np.int_] | None = None
    grid_iv: NDArray[np.int_] | None = None
    band: int = DEFAULT_ORDER + 2

    def __post_init__(self):
        if self.grid_iu is None:
            object.__setattr__(self, "grid_iu", np.arange(self.u.size))
        if self.grid_iv is None:
            object.__setattr__(self, "grid_iv", np.arange(self.v.size))

    @property
    def hu(self) -> float:
        return float(self.u[1] - self.u[0])

    @property
    def hv(self) -> float:
        return float(self.v[1] - self.v[0])

    def d(self, a: NDArray) -> tuple[NDArray, NDArray]:
        return diff(a, self.hu, 0, self.order), diff(a, self.hv, 1, self.order)

    def grad(self, a: NDArray) -> NDArray:
        """Differential of a scalar field as a 1-form array (..., 2)."""
        au, av = self.d(a)
        return np.stack([au, av], axis=-1)

    def interior(self) -> NDArray[np.bool_]:
        iu = np.arange(self.u.size)
        iv = np.arange(self.v.size)
        ok_u = (iu >= self.band) & (iu < self.u.size - self.band)
        ok_v = (iv >= self.band) & (iv < self.v.size - self.band)
        return ok_u[:, None] & ok_v[None, :]

    def on_grid(self, a: NDArray) -> NDArray:
        return a[np.ix_(self.grid_iu, self.grid_iv)]

    @property
    def U(self) -> NDArray:
        return np.broadcast_to(self.u[:, None], (self.u.size, self.v.size))

    @property
    def V(self) -> NDArray:
        return np.broadcast_to(self.v[None, :], (self.u.size, self.v.size))

    @property
    def tangents(self) -> tuple[NDArray, NDArray]:
        return self.d(self.X)


def _uniform_spacing(axis: NDArray, name: str) -> float:
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} grid needs at least 2 points")
    steps = np.diff(axis)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(steps[0])):
        raise ValueError(f"{name} grid must be uniform and increasing")
    return float(steps.mean())


def _lattice_axis(axis: NDArray, h: float, pad: int, bounds: tuple[float, float], name: str):
    spacing = _uniform_spacing(axis, name)
    m = max(1, round(spacing / h))
    H = spacing / m
    lo, hi = bounds
    eps = 1e-9 * max(1.0, abs(H))
    n_lo = pad if not math.isfinite(lo) else min(pad, int(math.floor((axis[0] - lo) / H + eps)))
    n_hi = pad if not math.isfinite(hi) else min(pad, int(math.floor((hi - axis[-1]) / H + eps)))
    if n_lo < 0 or n_hi < 0:
        raise ValueError(f"{name} grid extends beyond the sampler's range {bounds}")
    k = np.arange(-n_lo, (axis.size - 1) * m + n_hi + 1)
    lat = axis[0] + k * H
    idx = n_lo + np.arange(axis.size) * m
    return lat, idx


def build_lattice(
    S: Sampler,
    us: ArrayLike,
    vs: ArrayLike,
    h: float = DEFAULT_LATTICE_STEP,
    order: int = DEFAULT_ORDER,
    pad: int | None = None,
) -> Lattice:
    """Sample ``S`` on a lattice that refines the grid ``us x vs``.

    The lattice spacing divides the grid spacing and is as close to ``h``
    as possible; the lattice extends ``pad`` nodes past the grid on each
    side where the sampler's ``eval_range`` allows.
    """
    band = order + 2
    pad = band + 2 if pad is None else pad
    (ur, vr) = getattr(S, "eval_range", ((-math.inf, math.inf), (-math.inf, math.inf)))
    lu, iu = _lattice_axis(np.asarray(us, float), h, pad, ur, "u")
    lv, iv = _lattice_axis(np.asarray(vs, float), h, pad, vr, "v")
    U, V = np.meshgrid(lu, lv, indexing="ij")
    return Lattice(lu, lv, S(U, V), order, iu, iv, band)


def lattice_from_samples(us: ArrayLike, vs: ArrayLike, X: ArrayLike, order: int = DEFAULT_ORDER) -> Lattice:
    us = np.asarray(us, float)
    vs = np.asarray(vs, float)
    X = np.asarray(X, float)
    _uniform_spacing(us, "u")
    _uniform_spacing(vs, "v")
    if X.shape != (us.size, vs.size, 3):
        raise ValueError(f"samples have shape {X.shape}, expected {(us.size, vs.size, 3)}")
    return Lattice(us, vs, X, order, band=order + 2)


# ---------------------------------------------------------------- reduction chain


def zero_adapted_frame(lat: Lattice) -> AdaptedFrame:
    xu, xv = lat.tangents
    return null_frame_from_tangents(xu, xv)


def lattice_forms(lat: Lattice, F: AdaptedFrame) -> tuple[NDArray, NDArray]:
    """Solder forms (nu, nv, 3, 2) and connection forms (nu, nv, 3, 3, 2) of ``F``."""
    return _forms_from_derivatives(F, lat.tangents, [lat.d(e) for e in (F.e0, F.e1, F.e2)])


def cartan_coefficient(theta: NDArray, w: NDArray) -> tuple[NDArray, NDArray]:
    """Least-squares ``a`` with ``theta = a w``, and the residual ``|theta - a w|``."""
    a = np.sum(theta * w, axis=-1) / np.sum(w * w, axis=-1)
    return a, np.linalg.norm(theta - a[..., None] * w, axis=-1)


def first_invariant(lat: Lattice, F: AdaptedFrame) -> NDArray:
    """a1 defined by ``omega^1_0 = a1 omega^1`` for the frame field ``F``."""
    theta, omega = lattice_forms(lat, F)
    return cartan_coefficient(omega[..., 1, 0, :], theta[..., 1, :])[0]


def second_invariant(lat: Lattice, F: AdaptedFrame) -> NDArray:
    """a2 defined by ``omega^0_0 - omega^0 = a2 omega^1`` for a 1-adapted field ``F``."""
    theta, omega = lattice_forms(lat, F)
    return cartan_coefficient(omega[..., 0, 0, :] - theta[..., 0, :], theta[..., 1, :])[0]


def one_adapt(lat: Lattice, F: AdaptedFrame) -> AdaptedFrame:
    """Rescale ``F`` by ``mu = 1 / a1`` so that a1 becomes 1."""
    return _rescale(F, 1.0 / first_invariant(lat, F))


def _rescale(F: AdaptedFrame, mu: NDArray) -> AdaptedFrame:
    m = mu[..., None]
    return AdaptedFrame(m * F.e0, F.e1, F.e2 / m, FrameLevel.ONE)


def _shift(F: AdaptedFrame, lam: NDArray) -> AdaptedFrame:
    l = lam[..., None]
    return AdaptedFrame(F.e0, F.e1 + l * F.e0, F.e2 - l * F.e1 - 0.5 * l**2 * F.e0, FrameLevel.TWO)


@dataclass
class Verdict:
    kind: str
    reason: str = ""
    vertex: NDArray[np.float64] | None = None
    vertex_deviation: float | None = None
    plane_normal: NDArray[np.float64] | None = None
    f_table: NDArray[np.float64] | None = None  # columns: v, f, spread
    f_coordinate: str | None = None  # "v" (sampler's own) or "v_canonical"

    def as_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.reason:
            out["reason"] = self.reason
        if self.plane_normal is not None:
            out["null_normal"] = [float(x) for x in self.plane_normal]
        if self.f_coordinate is not None:
            out["f_coordinate"] = self.f_coordinate
        return out


@dataclass
class InvariantReport:
    """Invariants on the requested grid plus residual diagnostics."""

    u: NDArray[np.float64]
    v: NDArray[np.float64]
    x: NDArray[np.float64]
    det_rel: NDArray[np.float64]
    interior: NDArray[np.bool_]
    length_scale: float
    thresholds: Thresholds
    verdict: Verdict
    a1: NDArray[np.float64] = None
    a2: NDArray[np.float64] = None
    a3_raw: NDArray[np.float64] = None
    a4: NDArray[np.float64] = None
    a5: NDArray[np.float64] = None
    f_rec: NDArray[np.float64] = None
    u_canonical: NDArray[np.float64] = None
    v_canonical: NDArray[np.float64] = None
    residuals: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        nan = np.full(self.det_rel.shape, np.nan)
        for name in ("a1", "a2", "a3_raw", "a4", "a5", "f_rec", "u_canonical", "v_canonical"):
            if getattr(self, name) is None:
                setattr(self, name, nan.copy())


def _imax(a: NDArray, mask: NDArray) -> float:
    vals = np.abs(a[mask])
    return float(np.max(vals)) if vals.size else float("nan")


def _constant_sign(a: NDArray, mask: NDArray) -> bool:
    vals = a[mask]
    return bool(np.all(vals > 0) or np.all(vals < 0))


def _f_table(rep: "InvariantReport", canonical: bool) -> NDArray:
    m = rep.interior
    rows = []
    if canonical:
        for j in range(rep.v.size):
            col = rep.f_rec[:, j][m[:, j]]
            if col.size:
                rows.append((rep.v[j], col.mean(), np.ptp(col)))
    else:
        vc = rep.v_canonical[m]
        fr = rep.f_rec[m]
        edges = np.linspace(vc.min(), vc.max(), rep.v.size + 1)
        which = np.clip(np.searchsorted(edges, vc, side="right") - 1, 0, rep.v.size - 1)
        for b in range(rep.v.size):
            sel = which == b
            if np.any(sel):
                rows.append((vc[sel].mean(), fr[sel].mean(), np.ptp(fr[sel])))
    return np.array(rows, dtype=float).reshape(-1, 3)


def cone_vertex(x: NDArray, e0_one_adapted: NDArray, tol: float | None = None) -> tuple[NDArray, float]:
    """Common point ``p = x - e0`` of a conical surface.

    ``e0_one_adapted`` is the null frame vector normalized so that a1 = 1.
    Returns the mean of ``x - e0`` and its max deviation from that mean;
    raises :class:`InconsistentConeError` if the deviation exceeds ``tol``.
    """
    p = (np.asarray(x) - np.asarray(e0_one_adapted)).reshape(-1, 3)
    mean = p.mean(axis=0)
    dev = float(np.max(np.abs(p - mean)))
    if tol is not None and dev > tol:
        raise InconsistentConeError(f"vertex estimates spread by {dev:.3e}")
    return mean, dev


def _canonical_v(lat: Lattice, a2: NDArray, w1: NDArray, base: tuple[int, int]) -> NDArray:
    """Integrate ``dv_c = sqrt(a2) omega^1`` over the lattice from ``base``."""
    form = np.sqrt(np.abs(a2))[..., None] * w1
    i0, j0 = base
    along_v = cumulative_simpson(form[i0, :, 1], x=lat.v, initial=0.0)
    along_v -= along_v[j0]
    vc = np.empty(a2.shape)
    for j in range(lat.v.size):
        col = cumulative_simpson(form[:, j, 0], x=lat.u, initial=0.0)
        vc[:, j] = col - col[i0] + along_v[j]
    return vc + lat.v[j0]


def analyze_lattice(lat: Lattice, thresholds: Thresholds = Thresholds()) -> InvariantReport:
    """Run the reduction chain on a sampled lattice and classify."""
    th = thresholds
    xu, xv = lat.tangents
    metric = metric_from_tangents(xu, xv)
    interior_lat = lat.interior()
    g_int = lat.on_grid(interior_lat)
    X = lat.X
    pts = lat.on_grid(X)[g_int]
    L = float(np.sqrt(np.mean(np.sum((pts - pts.mean(axis=0)) ** 2, axis=-1)))) if pts.size else 1.0
    if not L > 0:
        L = 1.0
    residuals: dict[str, float] = {}
    det_rel = lat.on_grid(metric.det_rel)
    residuals["degeneracy"] = _imax(det_rel, g_int)

    def report(verdict, **fields):
        return InvariantReport(
            lat.u[lat.grid_iu], lat.v[lat.grid_iv], lat.on_grid(X), det_rel, g_int, L, th, verdict,
            residuals=residuals, **{k: lat.on_grid(v) for k, v in fields.items()},
        )

    if not residuals["degeneracy"] < th.degeneracy:
        return report(Verdict("NotLightlike", reason=f"|det g|/tr^2 up to {residuals['degeneracy']:.3e}"))

    F0 = null_frame_from_tangents(xu, xv)
    residuals["frame_relations"] = max(_imax(r, interior_lat) for r in relation_residuals(F0).values())
    theta, omega = lattice_forms(lat, F0)
    residuals["omega^2"] = _imax(np.linalg.norm(theta[..., 2, :], axis=-1), interior_lat)
    a1, r1 = cartan_coefficient(omega[..., 1, 0, :], theta[..., 1, :])
    residuals["cartan_a1"] = _imax(r1, interior_lat)
    a1_scaled = lat.on_grid(a1) * L
    if _imax(a1_scaled, g_int) < th.plane:
        normal = F0.e0[interior_lat].mean(axis=0)
        return report(Verdict("Plane", plane_normal=normal / np.linalg.norm(normal)), a1=a1)
    if not (_constant_sign(a1, interior_lat) and np.min(np.abs(a1_scaled[g_int])) >= th.plane):
        return report(Verdict("MixedType", reason="a1 vanishes or changes sign"), a1=a1)

    # 1-adapted: a1 -> 1
    F1 = _rescale(F0, 1.0 / a1)
    theta, omega = lattice_forms(lat, F1)
    residuals["a1_normalized"] = _imax(
        np.linalg.norm(omega[..., 1, 0, :] - theta[..., 1, :], axis=-1), interior_lat
    )
    a2, r2 = cartan_coefficient(omega[..., 0, 0, :] - theta[..., 0, :], theta[..., 1, :])
    residuals["cartan_a2"] = _imax(r2, interior_lat)
    a2_scaled = lat.on_grid(a2) * L**2
    if _imax(a2_scaled, g_int) < th.cone:
        p, dev = cone_vertex(lat.on_grid(X)[g_int], lat.on_grid(F1.e0)[g_int], tol=th.vertex * max(1.0, L))
        residuals["vertex_deviation"] = dev
        return report(Verdict("Cone", vertex=p, vertex_deviation=dev), a1=a1, a2=a2)
    if not (_constant_sign(a2, interior_lat) and np.min(np.abs(a2_scaled[g_int])) >= th.cone):
        return report(Verdict("MixedType", reason="a2 vanishes or changes sign"), a1=a1, a2=a2)

    if np.median(a2[interior_lat]) < 0:
        # reverse orientation so that a2 > 0
        F1 = AdaptedFrame(F1.e0, -F1.e1, F1.e2, FrameLevel.ONE)
        theta, omega = lattice_forms(lat, F1)
        a2 = -a2
    w0 = theta[..., 0, :]
    w1 = theta[..., 1, :]
    da2 = lat.grad(a2)
    a3, r3 = cartan_coefficient(da2 + 2 * a2[..., None] * w0, w1)
    residuals["cartan_a3"] = _imax(r3, interior_lat)

    # 2-adapted: a3 -> 0
    F2 = _shift(F1, a3 / (2 * a2))
    theta, omega = lattice_forms(lat, F2)
    w0 = theta[..., 0, :]
    w1 = theta[..., 1, :]
    residuals["da2_law"] = _imax(np.linalg.norm(da2 + 2 * a2[..., None] * w0, axis=-1), interior_lat)
    a4, r4 = cartan_coefficient(omega[..., 0, 1, :] - a2[..., None] * w0, w1)
    residuals["cartan_a4"] = _imax(r4, interior_lat)
    da4 = lat.grad(a4)
    a5, r5 = cartan_coefficient(da4 - (a2**2 - 2 * a4)[..., None] * w0, w1)
    residuals["cartan_a5"] = _imax(r5, interior_lat)
    f_rec = (a4 + 0.5 * a2**2) / a2
    with np.errstate(invalid="ignore"):
        # edge-band values may be garbage on coarse lattices; they stay out of statistics
        u_c = -0.5 * np.log(a2)

    ig = np.argwhere(g_int)
    base = (lat.grid_iu[ig[0][0]], lat.grid_iv[ig[0][1]]) if ig.size else (lat.band, lat.band)
    v_c = _canonical_v(lat, a2, w1, base)
    rep = report(Verdict("NonConical"), a1=a1, a2=a2, a3_raw=a3, a4=a4, a5=a5, f_rec=f_rec,
                 u_canonical=u_c, v_canonical=v_c)
    U = lat.on_grid(lat.U)
    V = lat.on_grid(lat.V)
    off = max(_imax(rep.u_canonical - U, g_int), _imax(rep.v_canonical - V, g_int))
    residuals["canonical_offset"] = off
    canonical = off < th.canonical
    rep.verdict.f_coordinate = "v" if canonical else "v_canonical"
    rep.verdict.f_table = _f_table(rep, canonical)
    return rep


def compute_invariants(
    S: Sampler,
    us: ArrayLike,
    vs: ArrayLike,
    h: float = DEFAULT_LATTICE_STEP,
    order: int = DEFAULT_ORDER,
    thresholds: Thresholds = Thresholds(),
) -> InvariantReport:
    """Invariants of the sampler ``S`` on the tensor grid ``us x vs``.

    ``h`` is the target lattice spacing for the nested differences; the
    actual spacing divides the grid spacing.
    """
    return analyze_lattice(build_lattice(S, us, vs, h, order), thresholds)


def classify(
    S: Sampler,
    us: ArrayLike,
    vs: ArrayLike,
    thresholds: Thresholds = Thresholds(),
    h: float = DEFAULT_LATTICE_STEP,
    order: int = DEFAULT_ORDER,
) -> Verdict:
    return compute_invariants(S, us, vs, h, order, thresholds).verdict


# ---------------------------------------------------------------- rulings


@dataclass(frozen=True)
class RulingReport:
    collinearity: float  # max distance of u-samples from their chord line, relative to the sample scale
    nullity: float  # max |<d, d>| of the unit (Euclidean) ruling direction
    origins: NDArray[np.float64]  # one point on each ruling
    directions: NDArray[np.float64]

    def distance_to(self, p: ArrayLike) -> float:
        """Max Euclidean distance from ``p`` to the ruling lines."""
        rel = np.asarray(p, float) - self.origins
        d = self.directions
        perp = rel - np.sum(rel * d, axis=-1, keepdims=True) * d
        return float(np.max(np.linalg.norm(perp, axis=-1)))


def check_ruled(S: Sampler, us: ArrayLike, vs: ArrayLike) -> RulingReport:
    """Test that every u-parameter curve of ``S`` is a straight null line."""
    U, V = np.meshgrid(np.asarray(us, float), np.asarray(vs, float), indexing="ij")
    X = S(U, V)
    # rulings are the columns X[:, j]
    chord = X[-1] - X[0]
    d = chord / np.linalg.norm(chord, axis=-1, keepdims=True)
    rel = X - X[0]
    perp = rel - np.sum(rel * d, axis=-1, keepdims=True) * d
    scale = max(1.0, float(np.max(np.abs(X))))
    return RulingReport(
        collinearity=float(np.max(np.linalg.norm(perp, axis=-1))) / scale,
        nullity=float(np.max(np.abs(inner(d, d)))),
        origins=X[0],
        directions=d,
    )
