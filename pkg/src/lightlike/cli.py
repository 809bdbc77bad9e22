"""Command line interface: ``python3 -m lightlike {generate,classify,verify}``.

* ``generate`` integrates the surface for a profile ``--f`` and writes an
  OBJ mesh, a CSV sample table and a JSON summary.
* ``classify`` runs the invariant chain on a builtin surface or on a CSV
  sample grid (as written by ``generate``) and writes the verdict.
* ``verify`` runs the residual suites and exits nonzero if any fails.

All data files are written atomically and contain no timestamps or paths,
so identical configurations give byte-identical output.

Exit status: 0 on success (including NotLightlike / MixedType verdicts),
1 if a verification suite fails, 2 on malformed input or integration
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .classify import (
    InvariantReport,
    Thresholds,
    analyze_lattice,
    check_ruled,
    compute_invariants,
    induced_metric,
    lattice_from_samples,
    verify_structure_equations,
)
from .frames import relation_residuals
from .ode import Constant, IntegrationError, build_G0_via_SL, parse_profile
from .surface import (
    CLOSED_FORMS,
    ClosedForm,
    SpacelikeGraph,
    SurfaceModel,
    make_cone,
    make_plane,
    parametrize_nonconical,
)

CSV_HEADER = ("u", "v", "x0", "x1", "x2", "a1", "a2", "a4", "f_rec", "det_g")
FORMATS = ("obj", "csv", "json")
BUILTINS = ("plane", "cone", "graph", *CLOSED_FORMS)

# acceptance thresholds of the verification suites
VERIFY_LIMITS = {
    "degeneracy": 1e-6,
    "ruling_collinearity": 1e-9,
    "ruling_nullity": 1e-8,
    "frame_relations": 1e-7,
    "structure_equations": 1e-4,
    "sturm_liouville": 1e-8,
    "closed_form": 1e-7,
    "f_recovery": 1e-3,
}


class InputError(ValueError):
    """Malformed command line or input file."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile: str = "const:0"
    surface: str | None = None
    u_range: tuple[float, float] = (-0.5, 0.5)
    v_range: tuple[float, float] = (-1.0, 1.0)
    nu: int = 101
    nv: int = 101
    step: float = 1e-3
    fd_step: float = 1e-3
    lattice_step: float = 0.02
    thresholds: Thresholds = field(default_factory=Thresholds)
    out: Path = Path(".")
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        if self.nu < 2 or self.nv < 2:
            raise InputError("nu and nv must be at least 2")
        for name in ("u_range", "v_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise InputError(f"{name} must be a nondegenerate finite interval")
        for name in ("step", "fd_step", "lattice_step"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise InputError(f"unknown output format(s): {', '.join(sorted(bad))}")

    @property
    def us(self) -> np.ndarray:
        return np.linspace(*self.u_range, self.nu)

    @property
    def vs(self) -> np.ndarray:
        return np.linspace(*self.v_range, self.nv)

    @property
    def domain(self):
        return (self.u_range, self.v_range)


# ---------------------------------------------------------------- output helpers


def _clean(obj):
    """Make ``obj`` strict-JSON serializable (NaN/inf become null)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def obj_text(X: np.ndarray) -> str:
    """Wavefront OBJ of an (nu, nv, 3) grid with x0 as the last (vertical) axis."""
    nu, nv, _ = X.shape
    lines = [f"v {x[1]:.17g} {x[2]:.17g} {x[0]:.17g}" for x in X.reshape(-1, 3)]
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            lines.append(f"f {a} {a + nv} {a + nv + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def csv_text(rep: InvariantReport) -> str:
    U, V = np.meshgrid(rep.u, rep.v, indexing="ij")
    cols = [U, V, rep.x[..., 0], rep.x[..., 1], rep.x[..., 2], rep.a1, rep.a2, rep.a4, rep.f_rec, rep.det_rel]
    table = np.stack([c.reshape(-1) for c in cols], axis=-1)
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    np.savetxt(buf, table, fmt="%.17g", delimiter=",")
    return buf.getvalue()


def json_text(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def report_payload(rep: InvariantReport) -> dict:
    verdict = rep.verdict
    payload = {
        "verdict": verdict.as_dict(),
        "thresholds": rep.thresholds.as_dict(),
        "residuals": dict(rep.residuals),
    }
    if verdict.kind == "Cone":
        payload["vertex"] = {"point": verdict.vertex, "max_deviation": verdict.vertex_deviation}
    if verdict.kind == "NonConical":
        payload["f_table"] = [
            {verdict.f_coordinate: row[0], "f": row[1], "spread": row[2]} for row in verdict.f_table
        ]
    return payload


def _write_outputs(cfg: RunConfig, stem: str, rep: InvariantReport | None, payload: dict, X=None) -> list[Path]:
    written = []
    if "obj" in cfg.formats and X is not None:
        written.append(cfg.out / f"{stem}.obj")
        write_atomic(written[-1], obj_text(X))
    if "csv" in cfg.formats and rep is not None:
        written.append(cfg.out / f"{stem}.csv")
        write_atomic(written[-1], csv_text(rep))
    if "json" in cfg.formats:
        written.append(cfg.out / f"{stem}.json")
        write_atomic(written[-1], json_text(payload))
    return written


# ---------------------------------------------------------------- inputs


def builtin_surface(name: str, cfg: RunConfig) -> SurfaceModel:
    base, _, arg = name.partition(":")
    if base == "plane":
        return make_plane(domain=cfg.domain)
    if base == "cone":
        vertex = (0.0, 0.0, 0.0)
        if arg:
            try:
                vertex = tuple(float(t) for t in arg.split(","))
            except ValueError:
                raise InputError(f"bad cone vertex {arg!r}") from None
            if len(vertex) != 3:
                raise InputError("cone vertex needs three coordinates")
        return make_cone(vertex, domain=cfg.domain)
    if base == "graph":
        return SpacelikeGraph()
    if base in CLOSED_FORMS:
        return ClosedForm(base, domain=cfg.domain)
    raise InputError(f"unknown builtin surface {name!r}; expected one of {', '.join(BUILTINS)} or a CSV path")


def read_samples(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a CSV sample grid with at least the columns u, v, x0, x1, x2."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    need = ("u", "v", "x0", "x1", "x2")
    missing = [c for c in need if c not in header]
    if missing:
        raise InputError(f"{path}: missing column(s) {', '.join(missing)}")
    idx = [header.index(c) for c in need]
    try:
        data = np.array([[float(r[i]) for i in idx] for r in rows[1:] if r], dtype=float)
    except (ValueError, IndexError):
        raise InputError(f"{path}: non-numeric or short row") from None
    if data.size == 0 or not np.all(np.isfinite(data)):
        raise InputError(f"{path}: no data or non-finite values")
    us = np.unique(data[:, 0])
    vs = np.unique(data[:, 1])
    if us.size * vs.size != len(data):
        raise InputError(f"{path}: samples do not form a full (u, v) tensor grid")
    X = np.full((us.size, vs.size, 3), np.nan)
    X[np.searchsorted(us, data[:, 0]), np.searchsorted(vs, data[:, 1])] = data[:, 2:]
    if np.isnan(X).any():
        raise InputError(f"{path}: duplicate (u, v) samples")
    return us, vs, X


def _nonconical(cfg: RunConfig):
    f = parse_profile(cfg.profile)
    return f, parametrize_nonconical(f, domain=cfg.domain, step=cfg.step)


# ---------------------------------------------------------------- commands


def cmd_generate(cfg: RunConfig) -> int:
    _, S = _nonconical(cfg)
    rep = compute_invariants(S, cfg.us, cfg.vs, h=cfg.lattice_step, thresholds=cfg.thresholds)
    ruling = check_ruled(S, cfg.us, cfg.vs)
    payload = report_payload(rep)
    payload["residuals"].update(ruling_collinearity=ruling.collinearity, ruling_nullity=ruling.nullity)
    for p in _write_outputs(cfg, "surface", rep, payload, X=rep.x):
        print(p)
    return 0


def cmd_classify(cfg: RunConfig) -> int:
    if cfg.surface is None:
        raise InputError("classify needs --surface (builtin name or CSV path)")
    if cfg.surface.lower().endswith(".csv") or Path(cfg.surface).is_file():
        us, vs, X = read_samples(Path(cfg.surface))
        try:
            lat = lattice_from_samples(us, vs, X)
        except ValueError as exc:
            raise InputError(f"{cfg.surface}: {exc}") from None
        rep = analyze_lattice(lat, cfg.thresholds)
    else:
        S = builtin_surface(cfg.surface, cfg)
        rep = compute_invariants(S, cfg.us, cfg.vs, h=cfg.lattice_step, thresholds=cfg.thresholds)
    payload = report_payload(rep)
    for p in _write_outputs(cfg, "classify", rep, payload):
        print(p)
    print(f"verdict: {rep.verdict.kind}")
    return 0


def _suite(value: float, limit: float) -> dict:
    return {"value": value, "threshold": limit, "passed": bool(value < limit)}


def run_suites(cfg: RunConfig) -> dict[str, dict]:
    """Residual suites for the configured surface, keyed by suite name."""
    us, vs = cfg.us, cfg.vs
    U, V = np.meshgrid(us, vs, indexing="ij")
    f = None
    if cfg.surface is not None:
        S = builtin_surface(cfg.surface, cfg)
    else:
        f, S = _nonconical(cfg)
    suites: dict[str, dict] = {}
    try:
        m = induced_metric(S, U, V, cfg.fd_step)
        deg = float(np.max(m.det_rel))
    except ValueError:
        deg = math.inf
    suites["degeneracy"] = _suite(deg, VERIFY_LIMITS["degeneracy"])
    ruling = check_ruled(S, us, vs)
    suites["ruling_collinearity"] = _suite(ruling.collinearity, VERIFY_LIMITS["ruling_collinearity"])
    suites["ruling_nullity"] = _suite(ruling.nullity, VERIFY_LIMITS["ruling_nullity"])
    try:
        S.frame(U, V)
        has_frame = True
    except NotImplementedError:
        has_frame = False
    if has_frame:
        rel = max(float(np.max(r)) for r in relation_residuals(S.frame(U, V)).values())
        suites["frame_relations"] = _suite(rel, VERIFY_LIMITS["frame_relations"])
        # boundary rows are excluded: their difference stencils leave the domain
        inner_u, inner_v = us[1:-1], vs[1:-1]
        if inner_u.size == 0 or inner_v.size == 0:
            raise InputError("verify needs nu, nv >= 3")
        coarse = verify_structure_equations(S, S.frame, inner_u, inner_v, cfg.fd_step)["max"]
        fine = verify_structure_equations(S, S.frame, inner_u, inner_v, cfg.fd_step / 2)["max"]
        suites["structure_equations"] = _suite(coarse, VERIFY_LIMITS["structure_equations"])
        suites["structure_equations"].update(
            halved_step_value=fine, halving_ratio=coarse / fine if fine > 0 else math.inf
        )
    if f is not None:
        G0_sl = build_G0_via_SL(f, S.coeffs.v_range, step=cfg.step)
        suites["sturm_liouville"] = _suite(
            float(np.max(np.abs(G0_sl.G0 - S.coeffs.G0))), VERIFY_LIMITS["sturm_liouville"]
        )
        for name, (fn, k) in CLOSED_FORMS.items():
            if isinstance(f, Constant) and f.k == k:
                err = float(np.max(np.abs(S(U, V) - fn(U, V))))
                suites["closed_form"] = _suite(err, VERIFY_LIMITS["closed_form"]) | {"example": name}
        rep = compute_invariants(S, us, vs, h=cfg.lattice_step, thresholds=cfg.thresholds)
        ok = rep.verdict.kind == "NonConical"
        err = float(np.max(np.abs(rep.f_rec - f(V))[rep.interior])) if ok else math.inf
        suites["f_recovery"] = _suite(err, VERIFY_LIMITS["f_recovery"]) | {"verdict": rep.verdict.kind}
    return suites


def cmd_verify(cfg: RunConfig) -> int:
    suites = run_suites(cfg)
    failed = [k for k, s in suites.items() if not s["passed"]]
    payload = {
        "verdict": {"passed": not failed, "failed": failed},
        "thresholds": dict(VERIFY_LIMITS),
        "residuals": suites,
    }
    for p in _write_outputs(replace(cfg, formats=tuple(x for x in cfg.formats if x == "json")), "verify", None, payload):
        print(p)
    for name, s in suites.items():
        print(f"{'PASS' if s['passed'] else 'FAIL'} {name}: {s['value']:.3e} (< {s['threshold']:.0e})")
    return 1 if failed else 0


COMMANDS = {"generate": cmd_generate, "classify": cmd_classify, "verify": cmd_verify}


# ---------------------------------------------------------------- argument parsing


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None


def _formats(text: str) -> tuple[str, ...]:
    items = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [t for t in items if t not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must be drawn from {','.join(FORMATS)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lightlike", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--f", dest="profile", default="const:0", help="profile: const:k | id | sin[:a[:w[:p]]] | table:path")
    parser.add_argument("--surface", help=f"classify/verify input: {', '.join(BUILTINS)}, cone:p0,p1,p2, or a CSV path")
    parser.add_argument("--u-range", type=_range, default=(-0.5, 0.5), metavar="A:B")
    parser.add_argument("--v-range", type=_range, default=(-1.0, 1.0), metavar="A:B")
    parser.add_argument("--nu", type=int, default=101)
    parser.add_argument("--nv", type=int, default=101)
    parser.add_argument("--step", type=float, default=1e-3, help="ODE step")
    parser.add_argument("--fd-step", type=float, default=1e-3, help="step of point-wise finite differences")
    parser.add_argument("--lattice-step", type=float, default=0.02, help="target spacing of the invariant lattice")
    parser.add_argument("--tol-plane", type=float, default=Thresholds.plane)
    parser.add_argument("--tol-cone", type=float, default=Thresholds.cone)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--format", dest="formats", type=_formats, default=FORMATS, metavar="obj,csv,json")
    return parser


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        profile=args.profile,
        surface=args.surface,
        u_range=args.u_range,
        v_range=args.v_range,
        nu=args.nu,
        nv=args.nv,
        step=args.step,
        fd_step=args.fd_step,
        lattice_step=args.lattice_step,
        thresholds=Thresholds(plane=args.tol_plane, cone=args.tol_cone),
        out=args.out,
        formats=args.formats,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
        return COMMANDS[cfg.command](cfg)
    except (InputError, IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
