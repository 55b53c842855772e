"""Profile arithmetic and the one-step workload recursion."""

import math

import pytest
from hypothesis import given, strategies as st

from jswsim.profiles import (
    Mark,
    kw_step,
    offered_wait,
    pad,
    pth_step,
    sort_ascending,
    total_workload,
    zero_profile,
)

# Small strategy toolkit. Workloads stay in a modest range; what matters
# for the recursion is ordering and clamping, not magnitude.
coords = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)
profiles = st.lists(coords, min_size=1, max_size=9).map(lambda xs: tuple(sorted(xs)))
marks = st.tuples(
    st.floats(min_value=0.0, max_value=20.0),
    st.floats(min_value=1e-3, max_value=20.0),
).map(lambda t: Mark(*t))


class TestStepExamples:
    # hand-computed single steps
    def test_two_servers_from_empty(self):
        assert kw_step((0.0, 0.0), Mark(1.0, 0.4)) == (0.0, 0.6)

    def test_three_servers_interior(self):
        assert kw_step((1.0, 2.0, 3.0), Mark(2.0, 1.0)) == (1.0, 2.0, 2.0)

    def test_clamp_dominates(self):
        assert kw_step((5.0,), Mark(0.0, 10.0)) == (0.0,)

    def test_ranked_step(self):
        assert pth_step((1.0, 2.0, 3.0), Mark(2.0, 1.0), 2) == (0.0, 2.0, 3.0)

    def test_rank_one_is_shortest(self):
        u = (0.5, 1.25, 4.0)
        m = Mark(2.0, 0.75)
        assert pth_step(u, m, 1) == kw_step(u, m)

    def test_two_step_trajectory(self):
        u = zero_profile(2)
        u = kw_step(u, Mark(1.0, 0.4))
        assert u == (0.0, 0.6)
        u = kw_step(u, Mark(1.0, 0.4))
        assert u == pytest.approx((0.2, 0.6), abs=1e-12)

    def test_rank_bounds(self):
        with pytest.raises(ValueError):
            pth_step((0.0, 0.0), Mark(1.0, 1.0), 0)
        with pytest.raises(ValueError):
            pth_step((0.0, 0.0), Mark(1.0, 1.0), 3)
        with pytest.raises(ValueError):
            pth_step((), Mark(1.0, 1.0), 1)


class TestHelpers:
    def test_pad_prepends_zeros(self):
        assert pad((1.0, 3.0), 4) == (0.0, 0.0, 1.0, 3.0)
        assert pad((1.0, 3.0), 2) == (1.0, 3.0)

    def test_pad_rejects_shrinking(self):
        with pytest.raises(ValueError):
            pad((1.0, 3.0), 1)

    def test_zero_profile(self):
        assert zero_profile(3) == (0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            zero_profile(0)

    def test_sort_ascending_validates(self):
        assert sort_ascending([2.0, 0.0, 1.0]) == (0.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            sort_ascending([-1.0, 2.0])
        with pytest.raises(ValueError):
            sort_ascending([])
        with pytest.raises(ValueError):
            sort_ascending([math.nan])

    def test_totals_and_wait(self):
        assert total_workload((0.25, 0.5, 1.0)) == 1.75
        assert offered_wait((0.25, 0.5, 1.0)) == 0.25


class TestStepProperties:
    @given(profiles, marks)
    def test_output_sorted_nonnegative(self, u, m):
        out = kw_step(u, m)
        assert len(out) == len(u)
        assert all(x >= 0.0 for x in out)
        assert list(out) == sorted(out)
        # clamping never produces a negative zero
        assert all(math.copysign(1.0, x) > 0 for x in out)

    @given(profiles, marks, st.integers(min_value=1, max_value=9))
    def test_ranked_output_sorted_nonnegative(self, u, m, rank):
        if rank > len(u):
            rank = len(u)
        out = pth_step(u, m, rank)
        assert all(x >= 0.0 for x in out)
        assert list(out) == sorted(out)

    @given(profiles, marks)
    def test_monotone_in_state(self, u, m):
        # coordinatewise monotonicity of the one-step map
        v = tuple(x + 0.5 for x in u)
        a, b = kw_step(u, m), kw_step(v, m)
        assert all(x <= y for x, y in zip(a, b))

    @given(profiles, marks)
    def test_sup_norm_contraction_in_state(self, u, m):
        # the map is 1-Lipschitz for the sup norm
        v = tuple(x + 0.25 for x in u)
        a, b = kw_step(u, m), kw_step(v, m)
        assert max(abs(x - y) for x, y in zip(a, b)) <= 0.25 + 1e-12

    @given(profiles, marks, st.integers(min_value=1, max_value=9))
    def test_padding_commutes_with_ranked_step(self, u, m, rank):
        # an always-idle extra server leaves a zero at the front, so the
        # rank+1 step on the padded profile is the rank step on the original
        if rank > len(u):
            rank = len(u)
        wide = pth_step(pad(u, len(u) + 1), m, rank + 1)
        assert wide == pad(pth_step(u, m, rank), len(u) + 1)

    @given(profiles, st.floats(min_value=0.0, max_value=20.0))
    def test_zero_interarrival_adds_exactly(self, u, sigma):
        out = pth_step(u, Mark(sigma, 1e-309), len(u))
        assert total_workload(out) == pytest.approx(
            total_workload(u) + sigma, rel=1e-12
        )
