"""Acceptance criteria, one check per criterion at the stated tolerance and time bound.

Run with pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly: ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from harmonia.graph import FiniteGraph, GridPoint, diamond_boundary, slab_neighbors
from harmonia.grid import GrowthSchedule, base_state, build_grid_labeling, grid_violations
from harmonia.labeling import check_harmonic, covers_interval, full_interior
from harmonia.slab import (
    ap_cover,
    ladder_function,
    ladder_growth_demo,
    ladder_injective,
    scan_ladder_params,
    spectral_pairing,
    verdict,
)
from harmonia.trees import TreeSpec, grow_tree, tree_violations

RESULTS: dict[int, tuple[bool, str]] = {}


def _timed(limit: float, fn) -> tuple[bool, str]:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    fast = dt < limit
    return ok and fast, f"{detail}; {dt:.2f}s (limit {limit:g}s)" + ("" if fast else " TOO SLOW")


def criterion_1():
    # 10! is exact; the towers above it cannot be written down, so distinct
    # stand-ins of increasing size play their role
    v1 = math.factorial(10)
    bases = [(v1, 10**100 + 3, 10**1000 + 7, 10**10000 + 9)]
    rng = random.Random(1)
    for _ in range(20):
        vs = set()
        while len(vs) < 4:
            vs.add(rng.randrange(10**6, 10**30))
        bases.append(tuple(sorted(vs)))
    bad = 0
    for v1, v2, v3, v4 in bases:
        lab = base_state(SimpleNamespace(base=(v1, v2, v3, v4))).labeling
        got = [lab[diamond_boundary(1, s)[1]] for s in ("UL", "UR", "LL", "LR")]
        want = [4 * v1 - v2 - v3, 4 * v3 - v1 - v4 - 1, -v1, 4 - v3 - 2]
        bad += got != want
    return bad == 0, f"{len(bases)} bases, {bad} mismatches"


def criterion_2():
    state = build_grid_labeling(GrowthSchedule(), 20)
    viol = grid_violations(state)
    injective = state.labeling.is_consistent() and len(state.labeling) == 2 * 21 * 22
    covered = covers_interval(state.labeling, -20, 21)
    dominance = len(state.dominance) == 19 and all(d.holds for d in state.dominance)
    ok = not viol and injective and covered and dominance and state.retries == 0
    return ok, (f"{len(viol)} violations, injective={injective}, [-20,21] covered={covered}, "
                f"dominance={dominance}, retries={state.retries}")


def criterion_3():
    parts, ok = [], True
    for d in (4, 3):
        state = grow_tree(TreeSpec.regular(d), 300)
        N = state.fill_count // 2
        viol = tree_violations(state)
        inj = state.labeling.is_consistent()
        cov = covers_interval(state.labeling, -N, N)
        ok &= not viol and inj and cov
        parts.append(f"d={d}: {len(state.labeling)} vertices, {len(viol)} violations, [-{N},{N}] covered={cov}")
    return ok, "; ".join(parts)


def criterion_4():
    seeds = [s for s in itertools.product(range(-5, 6), repeat=4) if len(set(s)) == 4]
    failures = 0
    for s in seeds:
        try:
            trace = ladder_growth_demo(s, 50)
        except AssertionError:
            failures += 1
            continue
        maxima = [t.running_max for t in trace[1:]]
        failures += any(b < a + 3 for a, b in zip(maxima, maxima[1:]))
    return failures == 0, f"{len(seeds)} seeds, {failures} failures"


def criterion_5():
    tol = 1e-9
    rep = spectral_pairing(FiniteGraph.complete(2))
    want = sorted([1.0, 1.0, 2 + math.sqrt(3), 2 - math.sqrt(3)])
    k2_err = max(abs(a - b) for a, b in zip(rep.eigenvalues, want))
    ok = k2_err < tol and all(b.identity_holds for b in rep.jordan)
    rng = random.Random(5)
    worst = 0.0
    for _ in range(20):
        n = rng.randint(1, 8)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        r = spectral_pairing(FiniteGraph.from_edges(n, edges))
        for p in r.pairs:
            worst = max(worst, abs(p.lam * p.lam_inv - 1), abs(p.lam + p.lam_inv - 2 - p.mu))
        ok &= all(b.identity_holds for b in r.jordan) and len(r.jordan) >= 1
    ok &= worst < tol
    return ok, f"K2 max error {k2_err:.1e}, pairing max error {worst:.1e}, Jordan identities exact"


def criterion_6():
    rng = random.Random(6)
    W = 10**5
    mismatches, worst_gap = 0, 0.0
    for _ in range(100):
        aps = [(rng.randint(-40, 40), rng.randint(1, 20)) for _ in range(rng.randint(1, 4))]
        r = ap_cover(aps)
        D = r.lcm
        hit = [k for k in range(1, D + 1) if any((k - a) % d == 0 for a, d in aps)]
        brute_ok = r.covers == (len(hit) == D) and r.density == Fraction(len(hit), D)
        if not r.covers:
            brute_ok &= r.witness == min(set(range(1, D + 1)) - set(hit))
            brute_ok &= r.density <= 1 - Fraction(1, D)
        ks = np.arange(-W, W + 1)
        inside = np.zeros(ks.size, dtype=bool)
        for a, d in aps:
            inside |= (ks - a) % d == 0
        windowed = int(inside.sum()) / (2 * W + 1)
        # a window of length L differs from L*density by less than one period
        gap = abs(windowed - float(r.density))
        worst_gap = max(worst_gap, gap * (2 * W + 1) / D)
        mismatches += not brute_ok or gap >= D / (2 * W + 1)
    return mismatches == 0, f"100 instances, {mismatches} mismatches, worst window gap {worst_gap:.2f} periods"


def criterion_7():
    params = scan_ladder_params(30, 2)
    lab = ladder_injective(params, 30)  # raises on a collision, asserts harmonicity
    values = dict(lab.items())
    nb = slab_neighbors(FiniteGraph.complete(2))
    viol = check_harmonic(values, full_interior(values, nb), nb)
    target = 2 + math.sqrt(3)
    worst = max(abs(abs(values[(0, k + 1)] / values[(0, k)]) - target) / target for k in range(15, 30))
    ok = not viol and len(set(values.values())) == len(values) == 122 and worst < 0.05
    return ok, f"params {params}, {len(viol)} violations, ratio worst rel. error {worst:.1e}"


def criterion_8():
    ok = not verdict(FiniteGraph.complete(2)).exists
    for d in range(1, 7):
        v = verdict(FiniteGraph.edgeless(d), 5)
        lab = v.labeling
        nb = slab_neighbors(FiniteGraph.edgeless(d))
        ok &= v.exists and lab is not None
        ok &= all(x == a + d * z for (a, z), x in lab.items())
        ok &= not check_harmonic(lab, full_interior(lab, nb), nb) and lab.is_consistent()
        ok &= covers_interval(lab, -5 * d, 5 * d + d - 1)
    return ok, "K2 not-exists; edgeless d=1..6 exists, harmonic, injective, covering"


CRITERIA = {
    1: ("level-1 base values", 1, criterion_1),
    2: ("grid S_20", 120, criterion_2),
    3: ("tree constructions", 10, criterion_3),
    4: ("ladder dynamics", 30, criterion_4),
    5: ("spectral pairing", 5, criterion_5),
    6: ("AP covering", 10, criterion_6),
    7: ("injective ladder", 1, criterion_7),
    8: ("verdict consistency", 1, criterion_8),
}


def run_criterion(i: int) -> tuple[bool, str]:
    _, limit, fn = CRITERIA[i]
    RESULTS[i] = _timed(limit, fn)
    return RESULTS[i]


def summary_lines() -> list[str]:
    return [
        f"criterion {i} ({CRITERIA[i][0]}): {'PASS' if ok else 'FAIL'} - {detail}"
        for i, (ok, detail) in sorted(RESULTS.items())
    ]


@pytest.mark.parametrize("i", sorted(CRITERIA))
def test_criterion(i):
    ok, detail = run_criterion(i)
    print(f"criterion {i}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


if __name__ == "__main__":
    for i in CRITERIA:
        run_criterion(i)
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
