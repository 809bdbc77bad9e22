"""Profile functions and the ODEs that generate non-conical surfaces.

Two routes produce the R^{2,1}-valued coefficient functions G0, G1, G2 of a
non-conical surface:

* direct integration of the first-order system
  ``G0' = G1, G1' = f G0 - G2, G2' = -f G1``;
* the squared-solution construction, where each component of G0 is a
  combination of ``h1^2, h1 h2, h2^2`` for a basis ``h1, h2`` of solutions
  of ``h'' = f h / 2``.

Both use a fixed-step classical RK4 sweep outward from ``v = 0`` on the
nodes ``k * step`` with cubic Hermite dense output.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .minkowski import inner

SQRT2 = math.sqrt(2.0)
DEFAULT_STEP = 1e-3
DEFAULT_V_RANGE = (-2.0, 2.0)
BLOWUP = 1e150


class IntegrationError(RuntimeError):
    def __init__(self, v: float, message: str = "solution blew up"):
        super().__init__(f"{message} at v = {v:.6g}")
        self.v = v


# ---------------------------------------------------------------- profiles


class ProfileFunction:
    """The free function f(v) of a non-conical surface."""

    spec: str = ""

    def __call__(self, v: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def deriv(self, v: ArrayLike) -> NDArray[np.float64]:
        raise NotImplementedError

    def domain(self) -> tuple[float, float]:
        return (-math.inf, math.inf)


@dataclass(frozen=True)
class Constant(ProfileFunction):
    k: float

    @property
    def spec(self) -> str:
        return f"const:{self.k:g}"

    def __call__(self, v):
        return np.full_like(np.asarray(v, dtype=float), self.k)

    def deriv(self, v):
        return np.zeros_like(np.asarray(v, dtype=float))


@dataclass(frozen=True)
class Identity(ProfileFunction):
    spec = "id"

    def __call__(self, v):
        return np.asarray(v, dtype=float) * 1.0

    def deriv(self, v):
        return np.ones_like(np.asarray(v, dtype=float))


@dataclass(frozen=True)
class Sinusoid(ProfileFunction):
    """``amplitude * sin(frequency * v + phase)``."""

    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0

    @property
    def spec(self) -> str:
        return f"sin:{self.amplitude:g}:{self.frequency:g}:{self.phase:g}"

    def __call__(self, v):
        return self.amplitude * np.sin(self.frequency * np.asarray(v, dtype=float) + self.phase)

    def deriv(self, v):
        return self.amplitude * self.frequency * np.cos(self.frequency * np.asarray(v, dtype=float) + self.phase)


@dataclass(frozen=True, eq=False)
class Table(ProfileFunction):
    """Cubic-spline interpolation of tabulated values.

    The derivative is taken by centered differences on the table grid and
    interpolated linearly; it only feeds diagnostics.
    """

    grid: NDArray[np.float64]
    values: NDArray[np.float64]
    source: str = ""
    _spline: CubicSpline = field(init=False, repr=False)
    _dvals: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 4:
            raise ValueError("table needs matching 1-D grid and values with at least 4 rows")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("table grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", CubicSpline(grid, values))
        object.__setattr__(self, "_dvals", np.gradient(values, grid, edge_order=2))

    @property
    def spec(self) -> str:
        return f"table:{self.source}"

    def domain(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        lo, hi = self.domain()
        span = hi - lo
        if np.any(v < lo - 1e-9 * span) or np.any(v > hi + 1e-9 * span):
            raise ValueError(f"v outside table domain [{lo}, {hi}]")
        return v

    def __call__(self, v):
        return self._spline(self._check(v))

    def deriv(self, v):
        return np.interp(self._check(v), self.grid, self._dvals)

    @classmethod
    def from_file(cls, path: str | Path) -> "Table":
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] < 2:
            raise ValueError(f"{path}: expected rows 'v,f'")
        return cls(data[:, 0], data[:, 1], source=str(path))


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_profile(spec: str) -> ProfileFunction:
    """Parse ``const:<k> | id | sin[:amp[:freq[:phase]]] | table:<path>``."""
    spec = spec.strip()
    if m := re.fullmatch(rf"const:({_NUM})", spec):
        return Constant(float(m.group(1)))
    if spec == "id":
        return Identity()
    if m := re.fullmatch(rf"sin((?::{_NUM}){{0,3}})", spec):
        args = [float(a) for a in m.group(1).split(":")[1:]]
        return Sinusoid(*args)
    if spec.startswith("table:") and len(spec) > 6:
        return Table.from_file(spec[6:])
    raise ValueError(f"unrecognized profile spec {spec!r}")


# ---------------------------------------------------------------- integrator


@dataclass(frozen=True)
class Trajectory:
    """Nodal values of an ODE solution with cubic Hermite dense output."""

    v: NDArray[np.float64]
    y: NDArray[np.float64]
    dy: NDArray[np.float64]
    step: float

    def interpolant(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.v, self.y, self.dy, axis=0, extrapolate=False)


def _nodes(v_range, step) -> tuple[int, int]:
    lo, hi = v_range
    if not lo <= 0.0 <= hi:
        raise ValueError(f"v_range {v_range} must contain 0")
    if step <= 0:
        raise ValueError("step must be positive")
    n_minus = math.ceil(-lo / step - 1e-9)
    n_plus = math.ceil(hi / step - 1e-9)
    return n_minus, n_plus


def rk4(
    rhs: Callable[[float, NDArray], NDArray],
    y0: ArrayLike,
    v_range: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> Trajectory:
    """Classical RK4 on the nodes ``k * step`` covering ``v_range``."""
    n_minus, n_plus = _nodes(v_range, step)
    y0 = np.asarray(y0, dtype=float)
    ys = np.empty((n_minus + n_plus + 1,) + y0.shape)
    ys[n_minus] = y0
    for sign, count in ((1, n_plus), (-1, n_minus)):
        hstep = sign * step
        y = y0
        for k in range(count):
            v = sign * k * step
            k1 = rhs(v, y)
            k2 = rhs(v + 0.5 * hstep, y + 0.5 * hstep * k1)
            k3 = rhs(v + 0.5 * hstep, y + 0.5 * hstep * k2)
            k4 = rhs(v + hstep, y + hstep * k3)
            y = y + (hstep / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP:
                raise IntegrationError(v + hstep)
            ys[n_minus + sign * (k + 1)] = y
    v = np.arange(-n_minus, n_plus + 1) * step
    dy = np.stack([rhs(vi, yi) for vi, yi in zip(v, ys)])
    return Trajectory(v, ys, dy, step)


# ---------------------------------------------------------------- Sturm-Liouville


def _sl_rhs(f: ProfileFunction):
    def rhs(v, y):
        # y = (h, h') for any number of solutions stacked along axis 0
        fv = 0.5 * float(f(v))
        return np.stack([y[..., 1], fv * y[..., 0]], axis=-1)

    return rhs


@dataclass(frozen=True)
class SLSolution:
    v: NDArray[np.float64]
    h: NDArray[np.float64]
    hp: NDArray[np.float64]
    error_estimate: float | None = None
    _dense: CubicHermiteSpline | None = field(default=None, repr=False)

    def __call__(self, v: ArrayLike) -> tuple[NDArray, NDArray]:
        out = self._dense(np.asarray(v, dtype=float))
        return out[..., 0], out[..., 1]


def solve_sturm_liouville(
    f: ProfileFunction,
    v_range: tuple[float, float] = DEFAULT_V_RANGE,
    h0: float = 0.0,
    hp0: float = 1.0,
    step: float = DEFAULT_STEP,
    estimate_error: bool = False,
) -> SLSolution:
    """Solve ``h'' - f h / 2 = 0`` with ``h(0) = h0, h'(0) = hp0``.

    With ``estimate_error`` the solve is repeated at half step and the
    maximum nodal discrepancy is stored as ``error_estimate``.
    """
    rhs = _sl_rhs(f)
    traj = rk4(rhs, [h0, hp0], v_range, step)
    err = None
    if estimate_error:
        fine = rk4(rhs, [h0, hp0], v_range, step / 2)
        err = float(np.max(np.abs(fine.y[::2] - traj.y)))
    return SLSolution(traj.v, traj.y[:, 0], traj.y[:, 1], err, traj.interpolant())


@dataclass(frozen=True)
class SLBasis:
    """Fundamental solutions with ``h1(0)=1, h1'(0)=0, h2(0)=0, h2'(0)=1``.

    ``J`` holds the running integrals from 0 of ``h1^2, h1 h2, h2^2``.
    """

    v: NDArray[np.float64]
    h1: NDArray[np.float64]
    h1p: NDArray[np.float64]
    h2: NDArray[np.float64]
    h2p: NDArray[np.float64]
    J: NDArray[np.float64]

    def wronskian(self) -> NDArray[np.float64]:
        return self.h1 * self.h2p - self.h2 * self.h1p

    def squares(self) -> NDArray[np.float64]:
        """The three products ``h1^2, h1 h2, h2^2`` as columns."""
        return np.stack([self.h1**2, self.h1 * self.h2, self.h2**2], axis=-1)


def sl_basis(f: ProfileFunction, v_range=DEFAULT_V_RANGE, step: float = DEFAULT_STEP) -> SLBasis:
    def rhs(v, y):
        h1, h1p, h2, h2p = y[0], y[1], y[2], y[3]
        half_f = 0.5 * float(f(v))
        return np.array([h1p, half_f * h1, h2p, half_f * h2, h1 * h1, h1 * h2, h2 * h2])

    traj = rk4(rhs, [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], v_range, step)
    y = traj.y
    return SLBasis(traj.v, y[:, 0], y[:, 1], y[:, 2], y[:, 3], y[:, 4:7])


# ---------------------------------------------------------------- frame coefficients


def frame_system(f: ProfileFunction):
    """Right-hand side of the system for (G0, G1, G2, I) packed as 12 reals."""

    def rhs(v, y):
        fv = float(f(v))
        G0, G1, G2 = y[0:3], y[3:6], y[6:9]
        return np.concatenate([G1, fv * G0 - G2, -fv * G1, G0])

    return rhs


@dataclass(frozen=True)
class FrameCoefficients:
    """Sampled G0, G1, G2 and ``I(v) = int_0^v G0`` with dense output."""

    v: NDArray[np.float64]
    G0: NDArray[np.float64]
    G1: NDArray[np.float64]
    G2: NDArray[np.float64]
    I: NDArray[np.float64]
    step: float
    error_estimate: float | None = None
    _dense: CubicHermiteSpline | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_nodes(cls, f: ProfileFunction, v, G0, G1, G2, I, step, error_estimate=None):
        y = np.concatenate([G0, G1, G2, I], axis=1)
        rhs = frame_system(f)
        dy = np.stack([rhs(vi, yi) for vi, yi in zip(v, y)])
        dense = CubicHermiteSpline(v, y, dy, axis=0, extrapolate=False)
        return cls(v, G0, G1, G2, I, step, error_estimate, dense)

    @property
    def v_range(self) -> tuple[float, float]:
        return float(self.v[0]), float(self.v[-1])

    def state(self, v: ArrayLike) -> NDArray[np.float64]:
        """Interpolated (..., 12) state; NaN outside the integrated range."""
        return self._dense(np.asarray(v, dtype=float))

    def evaluate(self, v: ArrayLike) -> tuple[NDArray, NDArray, NDArray, NDArray]:
        s = self.state(v)
        return s[..., 0:3], s[..., 3:6], s[..., 6:9], s[..., 9:12]

    def relations(self) -> dict[str, NDArray[np.float64]]:
        """Deviations of the conserved inner products from their values.

        The triple (G0, G1, G2) itself satisfies the adapted-frame relations
        for the canonical initial data; these are first integrals of the
        system, so the drift measures integration error.
        """
        G0, G1, G2 = self.G0, self.G1, self.G2
        return {
            "<G0,G0>": np.abs(inner(G0, G0)),
            "<G0,G1>": np.abs(inner(G0, G1)),
            "<G1,G2>": np.abs(inner(G1, G2)),
            "<G2,G2>": np.abs(inner(G2, G2)),
            "<G0,G2>": np.abs(inner(G0, G2) - 1.0),
            "<G1,G1>": np.abs(inner(G1, G1) - 1.0),
        }


def canonical_G0_jets(f: ProfileFunction) -> tuple[NDArray, NDArray, NDArray]:
    """G0(0), G0'(0), G0''(0) placing the standard frame at the origin."""
    f0 = float(f(0.0))
    a = 1.0 / SQRT2
    G0 = np.array([a, a, 0.0])
    G0p = np.array([a, a, 1.0])
    G0pp = np.array([a * (f0 + 1.5), a * (f0 - 0.5), 1.0])
    return G0, G0p, G0pp


def canonical_initial_conditions(f: ProfileFunction) -> tuple[NDArray, NDArray, NDArray]:
    """(G0, G1, G2) at v = 0 for the canonical normalization."""
    G0, G0p, G0pp = canonical_G0_jets(f)
    return G0, G0p, float(f(0.0)) * G0 - G0pp


def integrate_frame_coefficients(
    f: ProfileFunction,
    v_range=DEFAULT_V_RANGE,
    G0_0: ArrayLike | None = None,
    G1_0: ArrayLike | None = None,
    G2_0: ArrayLike | None = None,
    step: float = DEFAULT_STEP,
    estimate_error: bool = False,
) -> FrameCoefficients:
    """Integrate the G-system directly; initial data default to canonical."""
    if G0_0 is None:
        G0_0, G1_0, G2_0 = canonical_initial_conditions(f)
    y0 = np.concatenate([np.asarray(G0_0, float), np.asarray(G1_0, float), np.asarray(G2_0, float), np.zeros(3)])
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial conditions must be finite")
    rhs = frame_system(f)
    traj = rk4(rhs, y0, v_range, step)
    err = None
    if estimate_error:
        fine = rk4(rhs, y0, v_range, step / 2)
        err = float(np.max(np.abs(fine.y[::2] - traj.y)))
    y = traj.y
    dense = traj.interpolant()
    return FrameCoefficients(traj.v, y[:, 0:3], y[:, 3:6], y[:, 6:9], y[:, 9:12], step, err, dense)


class SingularBasisError(np.linalg.LinAlgError):
    pass


def build_G0_via_SL(
    f: ProfileFunction,
    v_range=DEFAULT_V_RANGE,
    G0_0: ArrayLike | None = None,
    G0p_0: ArrayLike | None = None,
    G0pp_0: ArrayLike | None = None,
    step: float = DEFAULT_STEP,
) -> FrameCoefficients:
    """Assemble G0 from squared Sturm-Liouville solutions.

    Each component of G0 is ``c1 h1^2 + c2 h1 h2 + c3 h2^2``; the
    coefficients come from matching value, first and second derivative at
    ``v = 0``.  G1 = G0' and G2 = f G0 - G0'' follow from the products'
    derivatives, and I from the integrated products.
    """
    if G0_0 is None:
        G0_0, G0p_0, G0pp_0 = canonical_G0_jets(f)
    basis = sl_basis(f, v_range, step)
    i0 = int(np.argmin(np.abs(basis.v)))
    h1, h1p, h2, h2p = basis.h1[i0], basis.h1p[i0], basis.h2[i0], basis.h2p[i0]
    f0 = float(f(0.0))
    # rows: basis products; columns: value, first, second derivative at v = 0
    M = np.array(
        [
            [h1 * h1, 2 * h1 * h1p, 2 * h1p * h1p + f0 * h1 * h1],
            [h1 * h2, h1p * h2 + h1 * h2p, 2 * h1p * h2p + f0 * h1 * h2],
            [h2 * h2, 2 * h2 * h2p, 2 * h2p * h2p + f0 * h2 * h2],
        ]
    )
    if np.linalg.cond(M) > 1e12:
        raise SingularBasisError("squared-solution basis is singular at v = 0")
    rhs = np.stack([np.asarray(G0_0, float), np.asarray(G0p_0, float), np.asarray(G0pp_0, float)])
    C = np.linalg.solve(M.T, rhs)  # (3 products, 3 components)
    sq = basis.squares()
    dsq = np.stack([2 * basis.h1 * basis.h1p, basis.h1p * basis.h2 + basis.h1 * basis.h2p, 2 * basis.h2 * basis.h2p], -1)
    # f (product) - (product)'' collapses to -2 * (products of derivatives)
    g2 = -2 * np.stack([basis.h1p**2, basis.h1p * basis.h2p, basis.h2p**2], axis=-1)
    G0 = sq @ C
    G1 = dsq @ C
    G2 = g2 @ C
    I = basis.J @ C
    return FrameCoefficients.from_nodes(f, basis.v, G0, G1, G2, I, step)


# ---------------------------------------------------------------- residuals


def _d4(y: NDArray, step: float) -> NDArray:
    """Fourth-order centered derivative along axis 0 on interior nodes 2..n-3."""
    return (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * step)


def third_order_residual(G: FrameCoefficients, f: ProfileFunction) -> float:
    """Max of ``|G0''' - 2 f G0' - f' G0|`` over interior nodes.

    G0' = G1 and G0'' = f G0 - G2 are taken from the solution; G0''' is a
    fourth-order finite difference of G0''.
    """
    v = G.v
    fv = f(v)[:, None]
    second = fv * G.G0 - G.G2
    third = _d4(second, G.step)
    sl = slice(2, -2)
    res = third - 2 * fv[sl] * G.G1[sl] - f.deriv(v)[sl, None] * G.G0[sl]
    return float(np.max(np.abs(res)))


def squared_solution_residual(sol: SLSolution, f: ProfileFunction, step: float) -> float:
    """Third-order ODE residual of ``g = h^2`` for a sampled SL solution."""
    v, h, hp = sol.v, sol.h, sol.hp
    fv = f(v)
    g = h * h
    g1 = 2 * h * hp
    g2 = 2 * hp * hp + fv * g
    g3 = _d4(g2, step)
    sl = slice(2, -2)
    res = g3 - 2 * fv[sl] * g1[sl] - f.deriv(v)[sl] * g[sl]
    return float(np.max(np.abs(res)))
