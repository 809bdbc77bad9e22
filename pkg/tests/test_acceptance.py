"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured value
and its tolerance; the lines are repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from lightlike import classify as C
from lightlike.frames import GaugeParameters, gauge_transform, relation_residuals, standard_frame
from lightlike.minkowski import random_isometry
from lightlike.ode import build_G0_via_SL, integrate_frame_coefficients, parse_profile, third_order_residual
from lightlike.surface import closed_form_example, make_cone, make_plane, parametrize_nonconical, transform

from conftest import ACCEPTANCE_LINES, PROFILES, US, VS

SUITE_BUDGET = 60.0
FULL = np.meshgrid(np.linspace(-1, 1, 41), np.linspace(-1, 1, 41), indexing="ij")


def record(number: int, title: str, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_closed_forms():
    U, V = FULL
    worst_err, worst_time = 0.0, 0.0
    for spec, example in (("const:0", "f0"), ("const:1", "f1"), ("const:-1", "fm1")):
        t = time.perf_counter()
        X = parametrize_nonconical(parse_profile(spec))(U, V)
        worst_time = max(worst_time, time.perf_counter() - t)
        worst_err = max(worst_err, float(np.max(np.abs(X - closed_form_example(example, U, V)))))
    record(
        1,
        "closed-form reproduction f in {0,1,-1}, 41x41 on [-1,1]^2",
        worst_err < 1e-7 and worst_time < 1.0,
        f"max error {worst_err:.2e} (< 1e-7), slowest surface {worst_time:.3f} s (< 1 s)",
    )


def test_criterion_02_initial_data(surfaces):
    std = standard_frame()
    exact = all(np.all(S(0.0, 0.0) == 0.0) for S in surfaces.values())
    frame_err = max(
        float(np.max(np.abs(a - b)))
        for S in surfaces.values()
        for a, b in zip((S.frame(0.0, 0.0).e0, S.frame(0.0, 0.0).e1, S.frame(0.0, 0.0).e2), (std.e0, std.e1, std.e2))
    )
    record(2, "initial data x(0,0)=0, standard frame", exact and frame_err < 1e-12, f"x(0,0) exactly 0: {exact}, frame error {frame_err:.1e} (< 1e-12)")


def test_criterion_03_degeneracy(surfaces):
    U, V = FULL
    worst = max(float(np.max(C.induced_metric(S, U, V).det_rel)) for S in surfaces.values())
    record(3, "degeneracy |det g|/tr^2 on every grid point, 5 profiles", worst < 1e-6, f"max {worst:.2e} (< 1e-6)")


def test_criterion_04_null_ruling(surfaces):
    reps = [C.check_ruled(S, np.linspace(-1, 1, 41), np.linspace(-1, 1, 41)) for S in surfaces.values()]
    col = max(r.collinearity for r in reps)
    nul = max(r.nullity for r in reps)
    record(4, "null rulings, 5 profiles", col < 1e-9 and nul < 1e-8, f"collinearity {col:.1e} (< 1e-9), nullity {nul:.1e} (< 1e-8)")


def test_criterion_05_sturm_liouville():
    diff, third = 0.0, 0.0
    for spec in PROFILES:
        f = parse_profile(spec)
        direct = integrate_frame_coefficients(f, (-2, 2))
        diff = max(diff, float(np.max(np.abs(build_G0_via_SL(f, (-2, 2)).G0 - direct.G0))))
        third = max(third, third_order_residual(direct, f))
    record(5, "squared-SL G0 vs direct integration, |v|<=2", diff < 1e-8 and third < 1e-6, f"max difference {diff:.1e} (< 1e-8), third-order residual {third:.1e} (< 1e-6)")


def test_criterion_06_frame_relations(surfaces):
    U, V = FULL
    worst = max(float(np.max(r)) for S in surfaces.values() for r in relation_residuals(S.frame(U, V)).values())
    record(6, "frame relations along frame_field on [-1,1]^2", worst < 1e-7, f"max drift {worst:.1e} (< 1e-7)")


def test_criterion_07_structure_equations(surfaces):
    # window u in [-0.5, 0.5], v in (-1, 1); boundary rows excluded
    us, vs = US, VS[1:-1]
    worst, ratios = 0.0, []
    for S in surfaces.values():
        coarse = C.verify_structure_equations(S, S.frame, us, vs, 1e-3)["max"]
        fine = C.verify_structure_equations(S, S.frame, us, vs, 5e-4)["max"]
        worst = max(worst, coarse)
        ratios.append(coarse / fine)
    ok = worst < 1e-4 and all(3.5 < r < 4.5 for r in ratios)
    record(7, "structure equations at h=1e-3, halved step", ok, f"max residual {worst:.1e} (< 1e-4), halving ratios {min(ratios):.3f}..{max(ratios):.3f} (~4)")


def test_criterion_08_trichotomy(surfaces):
    plane = C.compute_invariants(make_plane(), US, VS)
    a1 = float(np.max(np.abs(plane.a1)))
    cone = C.classify(make_cone((1, 2, 3)), np.linspace(-0.4, 0.4, 9), np.linspace(0.2, 1.8, 17))
    vertex_err = float(np.max(np.abs(cone.vertex - [1, 2, 3]))) if cone.kind == "Cone" else np.inf
    _, V = np.meshgrid(US, VS, indexing="ij")
    kinds, f_err = [], 0.0
    for spec, S in surfaces.items():
        rep = C.compute_invariants(S, US, VS)
        kinds.append(rep.verdict.kind)
        f_err = max(f_err, float(np.max(np.abs(rep.f_rec - parse_profile(spec)(V))[rep.interior])))
    ok = plane.verdict.kind == "Plane" and a1 < 1e-6 and vertex_err < 1e-6 and set(kinds) == {"NonConical"} and f_err < 1e-3
    record(
        8,
        "classifier trichotomy",
        ok,
        f"plane -> {plane.verdict.kind} (max|a1| {a1:.1e}), cone -> {cone.kind} (vertex error {vertex_err:.1e}), "
        f"profiles -> {sorted(set(kinds))} (max|f_rec-f| {f_err:.1e} < 1e-3)",
    )


def test_criterion_09_invariance(surfaces):
    rng = np.random.default_rng(9)
    S = surfaces["sin"]
    base = C.compute_invariants(S, US, VS)
    iso = 0.0
    for k in range(10):
        rep = C.compute_invariants(transform(S, random_isometry(rng, proper=k % 2 == 0)), US, VS)
        iso = max(iso, *(float(np.max(np.abs(getattr(rep, n) - getattr(base, n)))) for n in ("a2", "a4", "f_rec")))
    lat = C.build_lattice(S, US, VS)
    F0 = C.zero_adapted_frame(lat)
    a1 = C.first_invariant(lat, F0)
    m = lat.interior()
    gauge = 0.0
    for _ in range(5):
        a, b, c, d = rng.uniform(-1, 1, 4)
        mu = np.exp(0.4 * np.sin(a * lat.U + b * lat.V + c))
        lam = d * np.cos(b * lat.U - a * lat.V)
        a1_g = C.first_invariant(lat, gauge_transform(F0, GaugeParameters(mu, lam)))
        gauge = max(gauge, float(np.max(np.abs(a1_g / a1 - mu)[m])))
    record(9, "invariance under isometries and gauges", iso < 1e-3 and gauge < 1e-3, f"isometry change {iso:.1e} (< 1e-3), |a1~/a1 - mu| {gauge:.1e} (< 1e-3)")


def test_criterion_10_suite_wall_clock(request):
    elapsed = time.perf_counter() - request.config.lightlike_t0
    n = len(request.session.items)
    record(10, f"suite wall clock ({n} tests)", elapsed < SUITE_BUDGET, f"{elapsed:.1f} s (< {SUITE_BUDGET:.0f} s)")
