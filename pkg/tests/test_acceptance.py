"""Acceptance gate: ten numbered criteria, one pass/fail line each.

Every check here uses numpy.linalg (eigvalsh / 2-norm) as the independent
oracle rather than the package eigensolver, so a silent regression in the
in-house spectral code cannot certify itself.
"""

import math
import sys
import time

import numpy as np

from loewner_lab.completion import ColumnConstraint, CornerConstraint, fix_column, fix_corner
from loewner_lab.hermitian import derive_rng, operator_norm, random_hermitian, random_projection
from loewner_lab.interpolation import (
    interpolate_exact,
    interpolate_one_sided,
    interpolate_with_slack,
    sample_exact_instance,
    sample_one_sided_instance,
    sample_slack_instance,
)
from loewner_lab.interval import Interval
from loewner_lab.opfunctions import (
    REP_CORPUS,
    _sample_box,
    davis_convex_test,
    eval_convex_rep,
    eval_monotone_rep,
    eval_strong_rep,
    get_function,
    matrix_eval_rep,
    monotone_test,
    rep_scalar_evaluator,
    replay_witness,
    strong_convex_test,
)
from loewner_lab.seqmodel import (
    BlockFace,
    Face18,
    face18_classify,
    face45_classify,
    face45_corner_map,
    face45_epsilon,
    face45_member_element,
    face_functional_calculus,
    testnet_oracle as run_testnet_oracle,
    theorem43_instance,
    theorem48_instance,
    usc_in_Adoublestar,
    usc_on_blockface,
    verify_2_11,
)


def _norm(a):
    return float(np.linalg.norm(a, 2))


def _lmin(a):
    return float(np.linalg.eigvalsh((a + a.conj().T) / 2.0).min())


def _report(num, failures, detail=""):
    ok = not failures
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" | {detail}"
    if failures:
        line += f" | first failure: {failures[0]}"
    print(line, file=sys.stderr)
    assert ok, line


# -- 1: slack interpolation contract ---------------------------------------------


def test_criterion_01_slack_interpolation_contract():
    started = time.time()
    failures = []
    eps_choices = (1.0, 0.1, 0.01)
    for trial in range(1000):
        rng = derive_rng(101, trial)
        dim = 2 + trial % 5
        eps = eps_choices[trial % 3]
        interval, target = sample_slack_instance(dim, eps, rng)
        cert = interpolate_with_slack(interval, target, eps)
        x, k, h, p, y = cert.x, interval.k, interval.h, target.p, target.y
        one = np.eye(dim)
        scale = max(_norm(h), _norm(k), _norm(y), 1.0)
        if _norm(p @ x @ p - y) > 1e-8 * scale:
            failures.append(f"trial {trial}: compression residual {_norm(p @ x @ p - y):.3e}")
        if _lmin(x - (k - eps * one)) < -1e-8 * scale:
            failures.append(f"trial {trial}: lower margin {_lmin(x - (k - eps * one)):.3e}")
        if _lmin(h + eps * one - x) < -1e-8 * scale:
            failures.append(f"trial {trial}: upper margin {_lmin(h + eps * one - x):.3e}")
    elapsed = time.time() - started
    if elapsed >= 60.0:
        failures.append(f"runtime {elapsed:.1f}s >= 60s")
    _report(1, failures, f"1000 instances in {elapsed:.1f}s")


# -- 2/3: completion bounds -------------------------------------------------------


def _sample_column(dim, eps, rng):
    rank = int(rng.integers(1, dim))
    q = random_projection(dim, rank, rng)
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    s1 = (1.0 + eps) * Z / _norm(Z) * rng.uniform(0.7, 1.0)
    K = s1 @ q
    if _norm(K) > 1.0:
        s1 = s1 - K + K / _norm(K)
    return ColumnConstraint(s1, q, eps)


def _sample_corner(dim, eps, rng):
    p = random_projection(dim, int(rng.integers(1, dim)), rng)
    q = random_projection(dim, int(rng.integers(1, dim)), rng)
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    t = (1.0 + eps) * Z / _norm(Z) * rng.uniform(0.7, 1.0)
    a = p @ t @ q
    if _norm(a) > 1.0:
        t = t - a + a / _norm(a)
    return CornerConstraint(t, p, q, eps)


def test_criterion_02_column_completion_bound():
    failures = []
    for trial in range(1000):
        rng = derive_rng(102, trial)
        dim = int(rng.integers(2, 9))
        eps = float(rng.choice([1e-1, 1e-2, 1e-3]))
        c = _sample_column(dim, eps, rng)
        s = fix_column(c)
        bound = math.sqrt(2.0 * eps + eps * eps)
        if _norm(s - c.s1) > bound + 1e-8:
            failures.append(f"trial {trial}: ||s - s1|| {_norm(s - c.s1):.6e} > {bound:.6e}")
        if _norm(s) > 1.0 + 1e-10:
            failures.append(f"trial {trial}: ||s|| {_norm(s):.12f}")
        if _norm(s @ c.q - c.s1 @ c.q) > 1e-10:
            failures.append(f"trial {trial}: pinned column moved {_norm(s @ c.q - c.s1 @ c.q):.3e}")
    _report(2, failures, "1000 instances")


def test_criterion_03_corner_completion_bound():
    failures = []
    for trial in range(1000):
        rng = derive_rng(103, trial)
        dim = int(rng.integers(2, 9))
        eps = float(rng.choice([1e-1, 1e-2, 1e-3]))
        c = _sample_corner(dim, eps, rng)
        # replicate the internal intermediate step to audit ||t1|| <= 1 + eps
        a = c.p @ c.t @ c.q
        tprime = fix_corner(c)
        bound = 2.0 * math.sqrt(2.0 * eps + eps * eps)
        if _norm(tprime - c.t) > bound + 1e-8:
            failures.append(f"trial {trial}: ||t' - t|| {_norm(tprime - c.t):.6e} > {bound:.6e}")
        if _norm(tprime) > 1.0 + 1e-10:
            failures.append(f"trial {trial}: ||t'|| {_norm(tprime):.12f}")
        if _norm(c.p @ tprime @ c.q - a) > 1e-10 * (1.0 + _norm(c.t)):
            failures.append(f"trial {trial}: prescribed corner moved")
        # the intermediate row/column-fixed matrix must stay within 1 + eps
        if _norm(c.t) > 1.0 + eps + 1e-10:
            failures.append(f"trial {trial}: input norm {_norm(c.t):.12f} out of contract")
    _report(3, failures, "1000 instances")


# -- 4: shape bound on the eps/eta grid --------------------------------------------


def test_criterion_04_gap_interpolation_shape_bound():
    failures = []
    eta = 1.0
    c_audit = 50.0
    sups = {}
    for ratio in (1e-2, 1e-4, 1e-6):
        eps = ratio * eta
        worst = 0.0
        for mode, seed, build in (
            ("one_sided", 7, lambda iv, p, y, e: interpolate_one_sided(iv, p, y, e, eta)),
            ("exact", 8, lambda iv, p, y, e: interpolate_exact(iv, p, y, e, eta)),
        ):
            sampler = sample_one_sided_instance if mode == "one_sided" else sample_exact_instance
            for trial in range(250):
                rng = derive_rng(seed, trial)
                dim = 2 + trial % 5
                iv, p, y = sampler(dim, eps, eta, rng)
                cert = build(iv, p, y, eps)
                x, k, h = cert.x, iv.k, iv.h
                scale = max(_norm(h), _norm(k), _norm(y), 1.0)
                if _norm(p @ x @ p - p @ y @ p) > 1e-8 * scale:
                    failures.append(f"{mode} ratio {ratio:g} trial {trial}: compression residual")
                if _lmin(x - k) < -1e-8 * scale:
                    failures.append(f"{mode} ratio {ratio:g} trial {trial}: x >= k fails")
                if _lmin(h - x) < -1e-8 * scale:
                    failures.append(f"{mode} ratio {ratio:g} trial {trial}: x <= h fails")
                denom = (eps / eta) ** 0.25 * _norm(h - k)
                worst = max(worst, _norm(x - y) / denom)
        sups[ratio] = worst
        if worst > c_audit:
            failures.append(f"ratio {ratio:g}: sup {worst:.3f} exceeds C_audit {c_audit}")
    # the tested content is the exponent 1/4: the normalized sup must not
    # grow as eps/eta decreases by a factor of 100
    if sups[1e-4] > 1.05 * sups[1e-2]:
        failures.append(f"sup grew 1e-2 -> 1e-4: {sups[1e-2]:.3f} -> {sups[1e-4]:.3f}")
    if sups[1e-6] > 1.05 * sups[1e-4]:
        failures.append(f"sup grew 1e-4 -> 1e-6: {sups[1e-4]:.3f} -> {sups[1e-6]:.3f}")
    detail = ", ".join(f"sup@{r:g}={sups[r]:.3f}" for r in (1e-2, 1e-4, 1e-6))
    _report(4, failures, f"500 instances per ratio; {detail}")


# -- 5: convexity/monotonicity testers ---------------------------------------------


def test_criterion_05_convexity_testers():
    started = time.time()
    failures = []

    if not davis_convex_test(get_function("x^2"), trials=10000).passed:
        failures.append("x^2 failed the compressed-convexity search")

    cube = get_function("x^3", Interval(-1.0, 1.0, closed_lo=True, closed_hi=True))
    v = davis_convex_test(cube, trials=10000)
    if v.passed or v.witness is None:
        failures.append("x^3 on [-1,1] produced no compressed-convexity witness")
    elif replay_witness(v.witness, cube) >= 0.0:
        failures.append("x^3 witness did not replay as a violation")

    inv = get_function("1/x", Interval(0.5, 2.0, closed_lo=True, closed_hi=True))
    if not davis_convex_test(inv, trials=3000).passed:
        failures.append("1/x on [1/2,2] failed the compressed-convexity search")
    if not strong_convex_test(inv, trials=3000).passed:
        failures.append("1/x on [1/2,2] failed the strong-convexity search")

    sq = get_function("x^2")
    if strong_convex_test(sq, trials=10000).passed:
        failures.append("x^2 unexpectedly passed the strong-convexity search")
    recorded_strong = {
        "kind": "strong",
        "function": "x^2",
        "h": {"dim": 2, "re": [[1.0, 1.0], [1.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
        "p": {"dim": 2, "re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    }
    if replay_witness(recorded_strong, sq) >= 0.0:
        failures.append("recorded strong-convexity witness for x^2 did not violate")

    if monotone_test(sq, trials=10000).passed:
        failures.append("x^2 unexpectedly passed the monotonicity search")
    recorded_monotone = {
        "kind": "monotone",
        "function": "x^2",
        "h1": {"dim": 2, "re": [[1.0, 1.0], [1.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
        "h2": {"dim": 2, "re": [[2.0, 1.0], [1.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    }
    h1 = np.array(recorded_monotone["h1"]["re"], dtype=float)
    h2 = np.array(recorded_monotone["h2"]["re"], dtype=float)
    if _lmin(h2 - h1) < 0.0:
        failures.append("recorded monotone witness pair is not ordered h1 <= h2")
    if replay_witness(recorded_monotone, sq) >= 0.0:
        failures.append("recorded monotonicity witness for x^2 did not violate")

    if not monotone_test(get_function("x/(x+1)"), trials=3000).passed:
        failures.append("x/(x+1) failed the monotonicity search")

    elapsed = time.time() - started
    if elapsed >= 120.0:
        failures.append(f"runtime {elapsed:.1f}s >= 120s")
    _report(5, failures, f"all testers in {elapsed:.1f}s")


# -- 6: integral representation consistency ----------------------------------------


def test_criterion_06_representation_consistency():
    failures = []
    for name, rep in REP_CORPUS.items():
        f = rep_scalar_evaluator(rep)
        lo, hi = _sample_box(rep.I)
        for trial in range(100):
            rng = derive_rng(106, hash(name) % (2**31) + trial)
            dim = 2 + trial % 4
            H = random_hermitian([lo, hi], dim, rng)
            via_rep = matrix_eval_rep(rep, H)
            w, V = np.linalg.eigh(H)
            w = np.clip(w, lo, hi)
            direct = (V * np.array([f(float(v)) for v in w])) @ V.conj().T
            scale = max(_norm(direct), 1.0)
            if _norm(via_rep - direct) > 1e-8 * scale:
                failures.append(f"{name!r} trial {trial}: deviation {_norm(via_rep - direct):.3e}")
                break
    atoms = [
        ("1/x (strong)", eval_strong_rep, lambda x: 1.0 / x, np.linspace(0.05, 5.0, 100)),
        ("1/x (convex)", eval_convex_rep, lambda x: 1.0 / x, np.linspace(0.05, 5.0, 100)),
        ("x/(x+1) (monotone)", eval_monotone_rep, lambda x: x / (x + 1.0), np.linspace(-0.9, 4.0, 100)),
    ]
    for name, evaluator, closed, xs in atoms:
        rep = REP_CORPUS[name]
        for x in xs:
            got = evaluator(rep, float(x))
            want = closed(float(x))
            if abs(got - want) > 1e-12 * max(1.0, abs(want)):
                failures.append(f"{name!r} at x={x:.4f}: {got!r} vs {want!r}")
                break
    _report(6, failures, f"{len(REP_CORPUS)} reps x 100 matrices; 3 atom reps x 100 points")


# -- 7: rank-one-gap infeasibility ---------------------------------------------------


def test_criterion_07_rank_one_gap_infeasibility():
    failures = []
    t_cycle = [0.25, 0.75]
    w = verify_2_11(t_cycle)
    if w.certificates["max_gap_determinant"] > 1e-12:
        failures.append(f"gap determinant {w.certificates['max_gap_determinant']:.3e}")
    for n, s in enumerate(w.forced_parameters, start=1):
        t = t_cycle[(n - 1) % len(t_cycle)]
        if abs(s - (1.0 - t)) > 1e-12:
            failures.append(f"index {n}: forced parameter {s!r} != 1 - t = {1.0 - t!r}")
            break
    expected_osc = max(t_cycle) - min(t_cycle)
    if abs(w.oscillation - expected_osc) > 1e-12 or w.oscillation <= 0.0:
        failures.append(f"oscillation {w.oscillation!r}, expected {expected_osc!r}")
    if not w.infeasible or "infeasible" not in w.conclusion:
        failures.append(f"conclusion not infeasible: {w.conclusion!r}")
    _report(7, failures, f"oscillation {w.oscillation:.2f}")


# -- 8: drifting rank-one face classifier vs oracle ---------------------------------


def test_criterion_08_drifting_face_grid():
    failures = []
    lattice = [0.0, 0.25, 0.5, 0.75, 1.0]
    cases = []
    for a in lattice:
        for b in lattice:
            for t_inf in (0.0, 0.25, 0.5, 1.0, 1.5, 1.75, 2.0):
                cases.append(([a, b], t_inf))
    # boundary equality cases: t_inf / 2 exactly equal to the cycle extremes
    for a in lattice:
        for b in lattice:
            if a == b:
                continue
            cases.append(([a, b], 2.0 * max(a, b)))
            cases.append(([a, b], 2.0 * min(a, b)))
    assert len(cases) >= 200
    face = Face18()
    for cycle, t_inf in cases:
        v = face18_classify([], cycle, t_inf)
        expect_usc = 0.5 * t_inf >= max(cycle)
        expect_lsc = 0.5 * t_inf <= min(cycle)
        if (v.strongly_usc, v.strongly_lsc) != (expect_usc, expect_lsc):
            failures.append(f"{cycle}, t_inf={t_inf}: classifier disagrees with criterion")
        if not (v.middle_usc and v.weakly_usc):
            failures.append(f"{cycle}, t_inf={t_inf}: middle/weak not always true")
        o = run_testnet_oracle(([], cycle, t_inf), face, margin=1e-6)
        if (o.strongly_usc, o.strongly_lsc) != (v.strongly_usc, v.strongly_lsc):
            failures.append(f"{cycle}, t_inf={t_inf}: oracle disagrees with classifier")
    _report(8, failures, f"{len(cases)} grid points, oracle margin 1e-6")


# -- 9: tilting rank-two face counterexample -----------------------------------------


def test_criterion_09_tilting_face_counterexample():
    failures = []
    theta, m_inf = 0.6, (2.0, 1.0, 2.0)
    cycle, inf = face45_member_element(m_inf, theta)
    eps = face45_epsilon(cycle, inf)
    if eps <= 0.0:
        failures.append(f"eps = {eps!r} not positive")
    member = face45_classify(cycle, inf, theta)
    if not (member.strongly_usc and member.middle_usc and member.weakly_usc):
        failures.append("member element is not usc in every sense")
    inv_cycle, inv_inf = face45_corner_map(np.linalg.inv, cycle, inf)
    v_inv = face45_classify(inv_cycle, inv_inf, theta)
    if v_inv.middle_usc is not False:
        failures.append("inverse did not fail the middle-usc condition")
    if v_inv.weakly_usc is not True:
        failures.append("inverse failed the weak-usc condition it should satisfy")
    t0 = eps / 2.0
    sh_cycle, sh_inf = face45_corner_map(lambda M: np.linalg.inv(M - t0 * np.eye(2)), cycle, inf)
    v_sh = face45_classify(sh_cycle, sh_inf, theta)
    if v_sh.weakly_usc is not False:
        failures.append("shifted inverse did not fail the weak-usc condition")
    _report(9, failures, f"eps = {eps:.4f}")


# -- 10: usc criteria instance suites -------------------------------------------------


def test_criterion_10_usc_instance_suites():
    failures = []
    faces = [BlockFace(1, 2), BlockFace(2, 3), BlockFace(1, 3)]

    convex_cases = [
        (get_function("x^2"), (-1.0, 1.0)),
        (get_function("-sqrt"), (0.05, 2.0)),
        (get_function("1/x", Interval(0.05, 4.0, closed_lo=True, closed_hi=True)), (0.1, 4.0)),
    ]
    for f, box in convex_cases:
        for trial in range(200):
            rng = derive_rng(110, trial)
            face = faces[trial % len(faces)]
            h = theorem43_instance(face, rng, box=box)
            g = face_functional_calculus(f, h, face)
            if not usc_on_blockface(g, face):
                failures.append(f"{f.label} trial {trial}: compressed usc criterion violated")
                break

    strong = get_function("1/x", Interval(0.05, 2.0, closed_lo=True, closed_hi=True))
    for trial in range(200):
        rng = derive_rng(111, trial)
        face = faces[trial % len(faces)]
        x = theorem48_instance(strong, face, rng, box=(0.1, 2.0))
        if not usc_in_Adoublestar(x):
            failures.append(f"1/x trial {trial}: uncompressed usc criterion violated")
            break

    sq = get_function("x^2")
    witness_trial = None
    for trial in range(200):
        rng = derive_rng(112, trial)
        face = faces[trial % len(faces)]
        x = theorem48_instance(sq, face, rng, box=(-1.0, 1.0))
        if not usc_in_Adoublestar(x):
            witness_trial = trial
            break
    if witness_trial is None:
        failures.append("no x^2 witness against the uncompressed usc criterion in 200 trials")
    _report(10, failures, f"x^2 uncompressed-usc witness at trial {witness_trial}")
