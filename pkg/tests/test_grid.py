from __future__ import annotations

from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonia.graph import DiamondRegion, GridPoint, diamond_boundary, grid_neighbors, spanning_rows
from harmonia.grid import (
    BaseCollision,
    DigitBudgetExceeded,
    GrowthSchedule,
    MissingDependency,
    TowerSchedule,
    RetriesExhausted,
    base_state,
    build_grid_labeling,
    check_edge_estimates,
    dependencies,
    extend_point,
    extend_region,
    factorial_digits,
    grid_violations,
    harmonic_extension_dfs,
    heatmap_csv,
    induction_step,
    iterated_factorial,
    signed_log_magnitude,
)
from harmonia.labeling import PartialLabeling, check_harmonic, covers_interval

big = st.integers(-10**60, 10**60)


def _step_one(v1, v2, v3, v4):
    return base_state(SimpleNamespace(base=(v1, v2, v3, v4))).labeling


class TestExtension:
    def test_zero_rows(self):
        vals = {p: 0 for p in spanning_rows(1)}
        assert harmonic_extension_dfs(vals, 1)[GridPoint(0, 1)] == 0

    def test_linear_rows(self):
        vals = {p: p.x for p in spanning_rows(3)}
        ext = harmonic_extension_dfs(vals, 3)
        assert all(v == p.x for p, v in ext.items())

    def test_dependencies(self):
        assert dependencies(GridPoint(2, 1)) == [(2, 0), (1, 0), (3, 0), (2, -1)]
        assert dependencies(GridPoint(0, -2)) == [(0, -1), (-1, -1), (1, -1), (0, 0)]
        with pytest.raises(ValueError):
            dependencies(GridPoint(0, 0))

    def test_missing_dependency(self):
        lab = PartialLabeling([(GridPoint(0, 0), 1)])
        with pytest.raises(MissingDependency):
            extend_point(lab, GridPoint(0, 1))
        with pytest.raises(MissingDependency):
            extend_region(PartialLabeling(), 1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 8), st.data())
    def test_order_independence(self, n, data):
        rows = spanning_rows(n)
        vals = data.draw(st.lists(big, min_size=len(rows), max_size=len(rows)))
        spanning = dict(zip(rows, vals))
        dfs = harmonic_extension_dfs(spanning, n)
        # row-by-row order through a plain mapping: labels may repeat here
        rowwise = dict(spanning)
        region = DiamondRegion(n)
        for h in range(1, n + 1):
            for y in (h, -1 - h):
                for x in region.row_range(y):
                    p = GridPoint(x, y)
                    c, left, right, far = dependencies(p)
                    rowwise[p] = 4 * rowwise[c] - rowwise[left] - rowwise[right] - rowwise[far]
        assert dfs == rowwise
        assert check_harmonic(dfs, region.interior(), grid_neighbors) == []


class TestStepOne:
    def test_symbolic_step_one(self):
        v1, v2, v3, v4 = 3628800, 10**20 + 7, 10**40 + 11, 10**80 + 13
        lab = _step_one(v1, v2, v3, v4)
        assert lab[diamond_boundary(1, "UL")[1]] == 4 * v1 - v2 - v3
        assert lab[diamond_boundary(1, "UR")[1]] == 4 * v3 - v1 - v4 - 1
        assert lab[diamond_boundary(1, "LL")[1]] == -v1
        assert lab[diamond_boundary(1, "LR")[1]] == 4 - v3 - 2
        assert len(lab) == 12

    @given(st.lists(st.integers(10**6, 10**100), min_size=4, max_size=4, unique=True).map(sorted))
    def test_step_one_formulas_hold_for_any_base(self, vs):
        v1, v2, v3, v4 = vs
        lab = _step_one(v1, v2, v3, v4)
        assert lab[GridPoint(0, 1)] == 4 * v1 - v2 - v3
        assert lab[GridPoint(1, 1)] == 4 * v3 - v1 - v4 - 1
        assert lab[GridPoint(0, -2)] == -v1
        assert lab[GridPoint(1, -2)] == 4 - v3 - 2

    def test_colliding_base(self):
        with pytest.raises(BaseCollision):
            base_state(GrowthSchedule((3, 4, 5, 6)))
        with pytest.raises(BaseCollision):
            base_state(GrowthSchedule((1, 10**9, 10**10, 10**11)))

    def test_cursors_after_base(self):
        state = base_state()
        assert (state.n1, state.n2) == (-2, 3)


class TestSchedules:
    def test_growth_schedule_validation(self):
        with pytest.raises(ValueError):
            GrowthSchedule((1, 1, 2, 3))
        with pytest.raises(ValueError):
            GrowthSchedule(factor=1)
        with pytest.raises(ValueError):
            GrowthSchedule((0, 1, 2, 3))

    def test_factorial_digits_matches_exact(self):
        import math

        for k in (0, 1, 5, 10, 25, 100, 450):
            assert factorial_digits(k) == len(str(math.factorial(k)))

    def test_tower_schedule_exceeds_budget(self):
        assert iterated_factorial(10, 1, 10**6) == 3628800
        with pytest.raises(DigitBudgetExceeded):
            TowerSchedule(10**6).base
        with pytest.raises(DigitBudgetExceeded):
            build_grid_labeling(TowerSchedule(10**6), 2)
        # (10!)! has about 22 million digits
        assert 22_000_000 < factorial_digits(3628800) < 23_000_000

    def test_retries_exhausted(self):
        with pytest.raises(RetriesExhausted):
            build_grid_labeling(_CollidingSchedule(max_retries=0), 3)

    def test_retry_recovers(self):
        state = build_grid_labeling(_CollidingSchedule(max_retries=2), 4)
        assert state.retries == 3  # one failed first attempt per level 2..4
        assert grid_violations(state) == []
        assert all(d.holds for d in state.dominance)

    def test_weak_escapes_fail_dominance(self):
        with pytest.raises(RetriesExhausted):
            build_grid_labeling(_WeakSchedule(max_retries=1), 2)


class _CollidingSchedule(GrowthSchedule):
    """First attempt reuses an existing label (the level-1 value v1)."""

    def escapes(self, total, n1, n2, attempt):
        if attempt == 0:
            return self.base[0], super().escapes(total, n1, n2, 0)[1]
        return super().escapes(total, n1, n2, attempt)


class _WeakSchedule(GrowthSchedule):
    """Fresh but small escapes: injective, yet no dominance over the prior ring."""

    def escapes(self, total, n1, n2, attempt):
        return 10**6 + 17 + attempt, 10**6 + 91 + attempt


class TestConstruction:
    def test_steps_zero_and_one(self):
        assert build_grid_labeling(None, 0).n == build_grid_labeling(None, 1).n == 1
        with pytest.raises(ValueError):
            build_grid_labeling(None, -1)

    @pytest.mark.parametrize("n", [2, 5, 12])
    def test_levels(self, n):
        state = build_grid_labeling(GrowthSchedule(), n)
        assert len(state.labeling) == 2 * (n + 1) * (n + 2)
        assert grid_violations(state) == []
        assert state.labeling.is_consistent()
        for k in range(1, n + 1):
            assert covers_interval(state.labeling, -k, k + 1)
        for rec in state.dominance:
            assert rec.new_min > 2 * rec.prior_max

    def test_step_matches_independent_extension(self):
        state = build_grid_labeling(GrowthSchedule(), 6)
        spanning = {p: state.labeling[p] for p in spanning_rows(6)}
        assert harmonic_extension_dfs(spanning, 6) == dict(state.labeling.items())

    def test_new_spanning_values(self):
        state = build_grid_labeling(GrowthSchedule(), 3)
        before = base_state()
        n1, n2 = before.n1, before.n2
        induction_step(before)
        assert before.value(diamond_boundary(2, "LL")[0]) == n1
        assert before.value(diamond_boundary(2, "LR")[0]) == n2
        assert state.escapes[2] == before.escapes[2]


class TestEstimates:
    def test_vacuous_at_level_one(self):
        assert check_edge_estimates(base_state()) == []

    def test_cone_form_with_separated_schedule(self):
        sched = GrowthSchedule((10**7, 10**40, 10**80, 10**120), 10**60)
        state = build_grid_labeling(sched, 8)
        for level in range(4, 9):
            assert all(c.holds for c in check_edge_estimates(state, level))

    def test_default_schedule_report(self):
        state = build_grid_labeling(GrowthSchedule(), 5)
        report = check_edge_estimates(state)
        assert len(report) == 2 * 5 + 2 * 4
        assert all(c.holds for c in report)

    def test_variant_form_is_reported(self):
        state = build_grid_labeling(GrowthSchedule(), 5)
        variant = check_edge_estimates(state, form="variant")
        assert len(variant) == 18 and not all(c.holds for c in variant)
        with pytest.raises(ValueError):
            check_edge_estimates(state, form="other")
        with pytest.raises(ValueError):
            check_edge_estimates(state, 9)


class TestOutput:
    def test_signed_log(self):
        assert signed_log_magnitude(0) == 0.0
        assert signed_log_magnitude(-9) == -1.0
        assert signed_log_magnitude(10**400 - 1) == pytest.approx(400.0)

    def test_heatmap(self):
        state = build_grid_labeling(GrowthSchedule(), 2)
        rows = heatmap_csv(state).splitlines()
        assert rows[0] == "x,y,signed_log10" and len(rows) == 1 + 24
