"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np

from conftest import record_acceptance
from rigidlab import bounds, linalg
from rigidlab import optimizer as O
from rigidlab.graph import algebraic_connectivity, complete, laplacian, path
from rigidlab.rigidity import Framework, rigidity_matrix, stiffness_matrix
from rigidlab.sampling import (
    degenerate_witness_framework,
    random_configuration,
    random_framework,
    random_graph,
    random_rotation,
    random_unit,
)


def _corpus(seed, count):
    """Connected and disconnected graphs, d in 1..4, n up to 10."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        out.append(random_framework(rng, max_n=10, max_d=4, connected=k % 4 != 3))
    return out


def test_criterion_1_collinear_identity():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst_identity = worst_spectrum = 0.0
    coincident_cases = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, 5))
        g = random_graph(rng, n)
        fw = Framework(g, random_configuration(rng, n, d, "collinear"))
        rep = bounds.lemma1_check(fw)
        assert rep.holds is not None
        worst_identity = max(worst_identity, rep.context["identity_deviation"])
        worst_spectrum = max(worst_spectrum, rep.context["spectrum_deviation"])
        coincident_cases += any(fw.coincident(i, j) for i, j in g.edges)
    elapsed = time.perf_counter() - start
    passed = worst_identity <= 1e-10 and worst_spectrum <= 1e-9 and elapsed < 5 and coincident_cases > 0
    record_acceptance(
        1, passed,
        f"identity={worst_identity:.2e} spectrum={worst_spectrum:.2e} "
        f"coincident_edges_in={coincident_cases} time={elapsed:.2f}s",
    )
    assert passed


def _aligned_predicate(fw, x, v):
    # every edge with distinct endpoint values has direction +x or -x
    for (i, j), delta in zip(fw.graph.edges, fw.directions):
        if abs(v[i] - v[j]) > 1e-12 * (1 + np.max(np.abs(v))):
            if not (np.allclose(delta, x, atol=1e-9) or np.allclose(delta, -x, atol=1e-9)):
                return False
    return True


def test_criterion_2_quadratic_form_inequality():
    rng = np.random.default_rng(202)
    worst_excess = -math.inf
    worst_equality = 0.0
    mismatches = equal_count = 0
    for k in range(500):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, 5))
        g = random_graph(rng, n)
        x = random_unit(rng, d)
        kind = k % 3
        if kind == 0:
            # collinear along x
            pts = rng.standard_normal(d) + np.outer(rng.standard_normal(n), x)
        elif kind == 1:
            pts = random_configuration(rng, n, d, "generic").points
        else:
            # some points on the line along x, the rest generic
            pts = rng.standard_normal(d) + np.outer(rng.standard_normal(n), x)
            moved = rng.random(n) < 0.3
            pts[moved] += rng.standard_normal((int(moved.sum()), d))
        fw = Framework(g, pts)
        v = rng.standard_normal(n)
        if rng.random() < 0.2:
            v[rng.random(n) < 0.5] = v[0]
        rep = bounds.lemma2_check(fw, x, v)
        worst_excess = max(worst_excess, rep.lhs - rep.rhs)
        if kind == 0:
            worst_equality = max(worst_equality, abs(rep.lhs - rep.rhs))
        mismatches += rep.context["equality"] != _aligned_predicate(fw, x, v)
        equal_count += rep.context["equality"]
    passed = worst_excess <= 1e-10 and worst_equality <= 1e-9 and mismatches == 0
    record_acceptance(
        2, passed,
        f"max(lhs-rhs)={worst_excess:.2e} collinear_gap={worst_equality:.2e} "
        f"flag_mismatches={mismatches} equalities={equal_count}",
    )
    assert passed


def test_criterion_3_main_inequality():
    corpus = _corpus(303, 1000)
    start = time.perf_counter()
    reports = [bounds.theorem_check(fw) for fw in corpus]
    elapsed = time.perf_counter() - start
    worst = max(r.lhs - r.rhs for r in reports)
    dims = sorted({fw.d for fw in corpus})
    split = sum(not fw.graph.is_connected() for fw in corpus)
    passed = worst <= 1e-9 and all(r.holds for r in reports) and elapsed < 60
    record_acceptance(
        3, passed,
        f"max(lhs-rhs)={worst:.2e} d={dims} disconnected={split} time={elapsed:.2f}s",
    )
    assert passed


def test_criterion_4_interlacing_and_ceiling_index():
    corpus = _corpus(303, 1000)
    worst = -math.inf
    for fw in corpus:
        for rep in bounds.jordan_bound_check(fw):
            worst = max(worst, rep.lhs - rep.rhs)
    wrong = [
        (d, m)
        for d in range(1, 7)
        for m in range(1, d + 1)
        if (bounds.ceiling_index(d, m) == 2) != (d <= 2 or m == 1)
    ]
    passed = worst <= 1e-9 and not wrong
    record_acceptance(4, passed, f"max(lhs-rhs)={worst:.2e} ceiling_index_mismatches={wrong}")
    assert passed


def test_criterion_5_witness():
    rng = np.random.default_rng(505)
    worst = {}
    failures = degenerate = 0
    for k in range(300):
        if k % 20 == 0:
            n = int(rng.integers(3, 11))
            fw = degenerate_witness_framework(rng, random_graph(rng, n, connected=True),
                                              int(rng.integers(2, 5)))
        else:
            fw = random_framework(rng, max_n=10, max_d=4, connected=True)
        reports = bounds.witness_verify(fw)
        degenerate += reports[0].context["degenerate"]
        failures += sum(not r.holds for r in reports)
        for r in reports:
            worst[r.name] = max(worst.get(r.name, -math.inf), r.lhs - r.rhs)
    passed = failures == 0 and degenerate >= 10 and max(worst.values()) <= 1e-9
    record_acceptance(
        5, passed,
        f"failed_subchecks={failures} degenerate={degenerate} "
        + " ".join(f"{k}={v:.2e}" for k, v in worst.items()),
    )
    assert passed


def test_criterion_6_known_values(triangle):
    # unit edge vectors at 0, 60 and 120 degrees; rows of R have norm^2 = 2
    # and pairwise products +-1/2, so R R^T = (3/2) I + (1/2) J up to signs
    gram = 1.5 * np.eye(3) + 0.5 * np.ones((3, 3))
    oracle = np.linalg.eigvalsh(gram)
    R = rigidity_matrix(triangle)
    gram_ok = np.allclose(np.abs(R @ R.T), gram, atol=1e-12) and np.allclose(oracle, [1.5, 1.5, 3.0])
    spec = linalg.eigvalsh(stiffness_matrix(triangle))
    tri_dev = float(np.max(np.abs(spec - [0, 0, 0, *oracle])))
    kn_dev = 0.0
    for n in range(1, 11):
        expected = np.array([0.0] + [float(n)] * (n - 1))
        kn_dev = max(kn_dev, float(np.max(np.abs(linalg.eigvalsh(laplacian(complete(n))) - expected))))
    passed = gram_ok and tri_dev <= 1e-9 and kn_dev <= 1e-10
    record_acceptance(6, passed, f"gram_oracle={gram_ok} triangle={tri_dev:.2e} complete={kn_dev:.2e}")
    assert passed


def test_criterion_7_optimizer():
    start = time.perf_counter()
    notes = []
    ok = True

    tri = O.estimate_ad(complete(3), 2, O.OptimizerConfig(restarts=20, seed=1)).best_value
    ok &= 1.499 <= tri <= 3 + 1e-8
    notes.append(f"K3={tri:.6f}")

    rng = np.random.default_rng(707)
    line_dev = 0.0
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(2, 9)))
        got = O.estimate_ad(g, 1, O.OptimizerConfig(restarts=2, seed=1)).best_value
        line_dev = max(line_dev, abs(got - algebraic_connectivity(g)[0]))
    ok &= line_dev <= 1e-10
    notes.append(f"d1_dev={line_dev:.1e}")

    p3 = O.estimate_ad(path(3), 2, O.OptimizerConfig(restarts=20, seed=1)).best_value
    ok &= p3 <= 1e-6
    notes.append(f"P3={p3:.1e}")

    worst = -math.inf
    for d in (2, 3):
        for n in range(max(4, 2 * d), 9):
            est = O.estimate_ad(complete(n), d, O.OptimizerConfig(restarts=4, seed=1)).best_value
            _, upper = bounds.lew_bounds(n, d)
            worst = max(worst, est - upper)
            if (n, d) == (4, 2):
                notes.append(f"K4,d2={est:.4f}")
    ok &= worst <= 1e-8
    notes.append(f"max(est-lew)={worst:.3f}")

    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    notes.append(f"time={elapsed:.1f}s")
    record_acceptance(7, bool(ok), " ".join(notes))
    assert ok


def test_criterion_8_gradient_consistency():
    rng = np.random.default_rng(808)
    worst = 0.0
    points = 0
    while points < 100:
        fw = random_framework(rng, max_n=8, max_d=3, min_n=3, connected=True, kind="generic")
        p = fw.config.stacked
        values = linalg.eigvalsh(stiffness_matrix(fw))
        D = fw.D
        lam = values[D]
        if lam < 1e-6 or min(values[D + 1 :] - lam, default=np.inf) < 1e-4 * (1 + lam):
            continue
        w = rng.standard_normal(p.size)
        analytic = O.gradient(fw.graph, p, fw.d, "analytic") @ w
        h = 1e-6
        fd = (O.objective(fw.graph, p + h * w, fw.d) - O.objective(fw.graph, p - h * w, fw.d)) / (2 * h)
        scale = max(abs(analytic), abs(fd))
        worst = max(worst, abs(analytic - fd) / scale if scale else 0.0)
        points += 1
    passed = worst <= 1e-5
    record_acceptance(8, passed, f"points={points} max_relative_diff={worst:.2e}")
    assert passed


def test_criterion_9_invariance():
    rng = np.random.default_rng(909)
    worst = 0.0
    for _ in range(200):
        fw = random_framework(rng)
        base = linalg.eigvalsh(stiffness_matrix(fw))
        for cfg in (
            fw.config.transformed(shift=rng.standard_normal(fw.d) * 10),
            fw.config.transformed(scale=rng.uniform(0.01, 100)),
            fw.config.transformed(rotation=random_rotation(rng, fw.d)),
        ):
            other = linalg.eigvalsh(stiffness_matrix(fw.with_config(cfg)))
            worst = max(worst, float(np.max(np.abs(base - other))))
    passed = worst <= 1e-9
    record_acceptance(9, passed, f"max_spectrum_change={worst:.2e}")
    assert passed
