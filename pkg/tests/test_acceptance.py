"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import functools
import itertools
import time

import numpy as np

from sagecert.algebra import make_polynomial, make_signomial
from sagecert.decompose import cancellation_free, circuit_decompose, is_cancellation_free
from sagecert.geometry import barycentric
from sagecert.instances import CASES, EXPECTED, EX61_GAP, case, motzkin
from sagecert.optimize import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    exactness_report,
    reference_minimize,
    sage_bound,
    sage_bound_dual,
    verify_farkas,
)
from sagecert.polyform import (
    circuit_nonneg_oracle,
    gf2_solve,
    orthant_dominated,
    poly_bound,
    poly_sage_membership,
)
from sagecert.sage import Refusal, exact_kernel_point, sage_membership, validate_certificate
from sagecert.solver import OPTIMAL, solve

from helpers import (
    BOTTOM,
    GRID,
    GRID_INTERIOR,
    LINE,
    LINE_INTERIOR,
    SQUARE_EDGES,
    TOP,
    age_sum,
    entropy_unit_program,
    exp_unit_program,
    lp_unit_program,
    simplicial_instance,
)

# every bound computed in this module, checked for strong duality by criterion 7
BOUNDS: list = []


def report(capsys, number, title, failures, detail=""):
    ok = not failures
    line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {title}"
    if detail:
        line += f" [{detail}]"
    with capsys.disabled():
        print("\n" + line)
        for msg in failures[:10]:
            print("    " + msg)
    assert ok, "; ".join(failures[:10])


def record(label, res):
    BOUNDS.append((label, res))
    return res


@functools.lru_cache(maxsize=None)
def timed_bound(name, level):
    t = time.perf_counter()
    res = sage_bound(case(name), level)
    return record(f"{name} level {level}", res), time.perf_counter() - t


def close(value, expected, tol):
    return value is not None and abs(value - expected) <= tol


def test_criterion_01_square_example(capsys):
    fails = []
    r0, t0 = timed_bound("ex6.1", 0)
    r1, t1 = timed_bound("ex6.1", 1)
    r2, t2 = timed_bound("ex6.1", 2)
    exp0, tol0 = EXPECTED["ex6.1"][0]
    exp1, tol1 = EXPECTED["ex6.1"][1]
    if not close(r0.value, exp0, tol0):
        fails.append(f"level 0 = {r0.value}, expected {exp0} +- {tol0}")
    if not (close(r1.value, exp1, tol1) or close(r2.value, exp1, tol1)):
        fails.append(f"levels 1, 2 = {r1.value}, {r2.value}; expected {exp1} +- {tol1}")
    minimum = reference_minimize(case("ex6.1")).value
    gap = abs(r0.value - minimum)
    if abs(gap - EX61_GAP) > 2e-4:
        fails.append(f"gap {gap} differs from {EX61_GAP}")
    if t0 + t1 >= 10.0:
        fails.append(f"runtime {t0 + t1:.2f}s")
    report(capsys, 1, "ex6.1 hierarchy values, gap and runtime", fails,
           f"l0={r0.value:.6f} l1={r1.value:.9f} gap={gap:.5f} time={t0 + t1:.2f}s")


def test_criterion_02_infeasible_level_zero(capsys):
    fails = []
    f = case("ex6.2")
    r0, t0 = timed_bound("ex6.2", 0)
    r1, t1 = timed_bound("ex6.2", 1)
    if r0.status != STATUS_INFEASIBLE or r0.farkas is None:
        fails.append(f"level 0 status {r0.status}")
        check = {"ok": False, "messages": ["no ray"]}
    else:
        check = verify_farkas(f, 0, r0.farkas)
        if not check["ok"]:
            fails.append("Farkas ray rejected: " + "; ".join(check["messages"]))
    exp1, tol1 = EXPECTED["ex6.2"][1]
    if not close(r1.value, exp1, tol1):
        fails.append(f"level 1 = {r1.value}, expected {exp1} +- {tol1}")
    if t0 + t1 >= 30.0:
        fails.append(f"runtime {t0 + t1:.2f}s")
    report(capsys, 2, "ex6.2 infeasible level 0 with verified ray, level 1 value", fails,
           f"ray_ok={check['ok']} l1={r1.value:.9f} time={t0 + t1:.2f}s")


def test_criterion_03_univariate_example(capsys):
    fails = []
    r0, t0 = timed_bound("ex6.3", 0)
    r1, t1 = timed_bound("ex6.3", 1)
    for level, res in ((0, r0), (1, r1)):
        exp, tol = EXPECTED["ex6.3"][level]
        if not close(res.value, exp, tol):
            fails.append(f"level {level} = {res.value}, expected {exp} +- {tol}")
    if t0 + t1 >= 10.0:
        fails.append(f"runtime {t0 + t1:.2f}s")
    report(capsys, 3, "ex6.3 level 0 and level 1 values", fails,
           f"l0={r0.value:.8f} l1={r1.value:.10f} time={t0 + t1:.2f}s")


def test_criterion_04_fractional_exponent_examples(capsys):
    fails = []
    values = []
    for name in ("sec6.2a", "sec6.2b"):
        for level in (0, 1):
            res, _ = timed_bound(name, level)
            exp, tol = EXPECTED[name][level]
            values.append(f"{name}/l{level}={res.value:.8f}")
            if not close(res.value, exp, tol):
                fails.append(f"{name} level {level} = {res.value}, expected {exp} +- {tol}")
    report(capsys, 4, "fractional-exponent instances at levels 0 and 1", fails, " ".join(values))


def test_criterion_05_motzkin(capsys):
    fails = []
    if isinstance(poly_sage_membership(motzkin()), Refusal):
        fails.append("Motzkin form refused")
    if not isinstance(poly_sage_membership(motzkin(-3.001)), Refusal):
        fails.append("perturbed Motzkin form accepted")
    outer = [(2, 4, 0), (4, 2, 0), (0, 0, 6)]
    lam = barycentric((2, 2, 2), outer)
    theta = float(np.prod([(1.0 / float(l)) ** float(l) for l in lam]))
    if abs(theta - 3.0) > 1e-12:
        fails.append(f"Theta = {theta}, expected 3")
    if not circuit_nonneg_oracle(outer, (2, 2, 2), [1, 1, 1], -3.0):
        fails.append("circuit oracle rejects -3")
    if circuit_nonneg_oracle(outer, (2, 2, 2), [1, 1, 1], -3.001):
        fails.append("circuit oracle accepts -3.001")
    report(capsys, 5, "Motzkin accepted, -3.001 refused, circuit oracle agrees", fails,
           f"Theta={theta:.12f}")


def test_criterion_06_simplicial_exactness(capsys):
    fails = []
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(50):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(n + 2, 9))
        f = simplicial_instance(rng, n, m)
        if not exactness_report(f.exponents, f.coeffs, compute_window=False).simplicial_exact:
            fails.append(f"instance {i} is not in the simplicial class")
            continue
        res = record(f"simplicial instance {i}", sage_bound(f, 0))
        oracle = reference_minimize(f).value
        err = abs(res.value - oracle)
        worst = max(worst, err)
        if not err <= 1e-4:
            fails.append(f"instance {i} (n={n}, m={m}): bound {res.value}, oracle {oracle}")
    report(capsys, 6, "simplicial instances: level-0 bound equals the global minimum", fails,
           f"50 instances, worst error {worst:.2e}")


def test_criterion_08_decomposition_invariants(capsys):
    fails = []
    rng = np.random.default_rng(8)
    circuits = 0
    with_cancellation = 0
    for i in range(200):
        cols, interior = (LINE, LINE_INTERIOR) if i % 2 == 0 else (GRID, GRID_INTERIOR)
        c, parts, N = age_sum(rng, cols, interior)
        with_cancellation += any(p.cvec[j] > 0 for p in parts for j in N if j != p.k)
        try:
            cert = cancellation_free(cols, c, parts)
        except ValueError as exc:
            fails.append(f"instance {i}: {exc}")
            continue
        if not is_cancellation_free(c, cert, tol=0.0):
            fails.append(f"instance {i}: nonzero cross entries")
        verdict = validate_certificate(cols, c, cert)
        if not verdict:
            fails.append(f"instance {i}: {verdict.messages}")
        for part in cert.parts:
            pieces, _ = circuit_decompose(cols, part)
            circuits += len(pieces)
            kinds = {p.kind for p in pieces}
            if not kinds <= {"singleton", "simplicial_circuit"}:
                fails.append(f"instance {i} part {part.k}: kinds {sorted(kinds)}")
            target = exact_kernel_point(cols, part.k, part.nu)
            total = [sum(p.theta * p.nu_exact[t] for p in pieces) for t in range(len(target))]
            if total != target:
                fails.append(f"instance {i} part {part.k}: rational sum differs")
    report(capsys, 8, "cancellation-free and circuit decompositions of random sums", fails,
           f"200 instances, {with_cancellation} with cancellation, {circuits} circuit parts")


def test_criterion_09_face_partition(capsys):
    fails = []
    rng = np.random.default_rng(9)
    accepted = 0
    for i in range(100):
        c = rng.uniform(0.2, 2.0, size=6)
        c[2] = -rng.uniform(0.3, 3.0)
        c[5] = -rng.uniform(0.3, 3.0)
        joint = not isinstance(sage_membership(SQUARE_EDGES, c), Refusal)
        block = all(
            not isinstance(sage_membership([SQUARE_EDGES[j] for j in blk], c[blk]), Refusal)
            for blk in (BOTTOM, TOP)
        )
        accepted += joint
        if joint != block:
            fails.append(f"vector {i}: joint {joint}, blockwise {block}, c={np.round(c, 6).tolist()}")
    report(capsys, 9, "two-edge square: blockwise and joint membership agree", fails,
           f"100 vectors, {accepted} accepted")


def test_criterion_10_monotone_hierarchy(capsys):
    fails = []
    rows = []
    for name in CASES:
        vals = [timed_bound(name, level)[0].value for level in range(3)]
        rows.append(f"{name}: " + ", ".join(f"{v:.7f}" for v in vals))
        for a, b in zip(vals, vals[1:]):
            if not b >= a - 1e-7:
                fails.append(f"{name}: {vals}")
    report(capsys, 10, "hierarchy levels 0..2 are nondecreasing", fails, "; ".join(rows))


def test_criterion_11_solver_units(capsys):
    fails = []
    prog, blk = exp_unit_program()
    sol = solve(prog)
    if sol.status != OPTIMAL or abs(sol.x[blk[2]] - np.e) > 1e-8:
        fails.append(f"exp cone unit: {sol.status} {sol.x[blk[2]]}")
    prog, x = lp_unit_program()
    sol = solve(prog)
    if sol.status != OPTIMAL or abs(sol.x[x] - 1.0) > 1e-8:
        fails.append(f"LP unit: {sol.status} {sol.x[x]}")
    prog, t = entropy_unit_program()
    sol = solve(prog)
    if sol.status != OPTIMAL or abs(sol.x[t]) > 1e-8:
        fails.append(f"relative entropy unit: {sol.status} {sol.x[t]}")
    report(capsys, 11, "solver unit programs (exp cone, LP, relative entropy)", fails)


def _parity(rows, rhs, s):
    mask = sum(b << t for t, b in enumerate(s))
    return all(bin(r & mask).count("1") % 2 == h for r, h in zip(rows, rhs))


def test_criterion_12_orthant_dominance(capsys):
    fails = []
    res = orthant_dominated(make_polynomial([[0], [1], [3], [4]], [1, 1, -1, 1]))
    if not isinstance(res, Refusal):
        fails.append("1 + x - x^3 + x^4 reported orthant-dominated")
    rng = np.random.default_rng(12)
    for i in range(20):
        n = int(rng.integers(1, 5))
        cols = {tuple(2 * int(v) for v in rng.integers(0, 4, size=n)) for _ in range(6)}
        p = make_polynomial(sorted(cols), rng.normal(size=len(cols)))
        w = orthant_dominated(p)
        if isinstance(w, Refusal) or any(w.s):
            fails.append(f"all-even polynomial {i}: {w}")
    consistent = 0
    for i in range(100):
        n = int(rng.integers(1, 11))
        k = int(rng.integers(1, 13))
        rows = [int(v) for v in rng.integers(0, 2**n, size=k)]
        rhs = [int(v) for v in rng.integers(0, 2, size=k)]
        sol, proof = gf2_solve(rows, rhs, n)
        brute = any(_parity(rows, rhs, s) for s in itertools.product((0, 1), repeat=n))
        consistent += brute
        if brute != (sol is not None):
            fails.append(f"system {i}: solver {sol is not None}, brute force {brute}")
        elif sol is not None and not _parity(rows, rhs, sol):
            fails.append(f"system {i}: returned vector does not solve the system")
        elif sol is None:
            acc_r = acc_b = 0
            for t in proof:
                acc_r ^= rows[t]
                acc_b ^= rhs[t]
            if acc_r != 0 or acc_b != 1:
                fails.append(f"system {i}: inconsistency proof does not sum to 0 = 1")
    report(capsys, 12, "orthant dominance and GF(2) solver against brute force", fails,
           f"100 systems, {consistent} consistent")


def _median_time(p, repeats=5):
    runs = []
    for _ in range(repeats):
        t = time.perf_counter()
        res = poly_bound(p)
        runs.append(time.perf_counter() - t)
    return float(np.median(runs)), res


def test_criterion_13_degree_independence(capsys):
    fails = []

    def pattern(d):
        return make_polynomial([(0, 0), (2 * d, 0), (0, 2 * d), (d, d), (1, 1)], [1, 1, 1, -1.5, -0.3])

    t8, r8 = _median_time(pattern(4))
    t800, r800 = _median_time(pattern(400))
    for res in (r8, r800):
        record("degree pattern", res)
        if res.status != STATUS_OPTIMAL:
            fails.append(f"status {res.status}")
    if r8.num_exp != r800.num_exp:
        fails.append(f"program sizes differ: {r8.num_exp} vs {r800.num_exp} exp blocks")
    ratio = max(t8, t800) / min(t8, t800)
    if ratio > 2.0:
        fails.append(f"wall-clock ratio {ratio:.2f}")
    # program size: at most m (m - 1) exponential blocks at level 0
    rng = np.random.default_rng(13)
    sizes = []
    for m in (4, 8, 12, 16, 20):
        cols = {tuple(int(v) for v in rng.integers(0, 6, size=2)) for _ in range(4 * m)}
        cols = sorted(cols)[:m]
        c = rng.uniform(0.5, 2.0, size=len(cols))
        c[rng.random(len(cols)) < 0.5] *= -1
        res = record(f"size instance m={len(cols)}", sage_bound(make_signomial(cols, c), 0))
        mm = len(cols)
        sizes.append(f"m={mm}:{res.num_exp}")
        if res.num_exp > mm * (mm - 1):
            fails.append(f"m={mm}: {res.num_exp} exponential blocks")
    report(capsys, 13, "degree 8 vs 800 timing and O(m^2) program size", fails,
           f"median {t8:.3f}s vs {t800:.3f}s, ratio {ratio:.2f}; " + " ".join(sizes))


# runs last so that it sees every bound recorded above
def test_criterion_07_strong_duality(capsys):
    fails = []
    # the benchmark hierarchy is always part of the suite
    for name in CASES:
        for level in range(3):
            timed_bound(name, level)
    worst = 0.0
    for label, res in BOUNDS:
        if res.status == STATUS_OPTIMAL:
            gap = abs(res.value - res.dual_value)
            worst = max(worst, gap / (1 + abs(res.value)))
            if gap > 1e-6 * (1 + abs(res.value)):
                fails.append(f"{label}: primal {res.value}, dual {res.dual_value}")
        elif res.status != STATUS_INFEASIBLE:
            fails.append(f"{label}: status {res.status}")
    # independent route: the dual SAGE program solved on its own
    for name in CASES:
        for level in range(3):
            primal = timed_bound(name, level)[0]
            dual = record(f"{name} level {level} dual form", sage_bound_dual(case(name), level))
            if primal.status == STATUS_INFEASIBLE:
                if dual.status != STATUS_INFEASIBLE:
                    fails.append(f"{name} level {level}: dual form status {dual.status}")
                continue
            gap = abs(primal.value - dual.value)
            worst = max(worst, gap / (1 + abs(primal.value)))
            if dual.status != STATUS_OPTIMAL or gap > 1e-6 * (1 + abs(primal.value)):
                fails.append(f"{name} level {level}: primal {primal.value}, dual form {dual.value} "
                             f"({dual.status})")
    report(capsys, 7, "strong duality on every bound in the suite", fails,
           f"{len(BOUNDS)} bounds, worst relative gap {worst:.2e}")
