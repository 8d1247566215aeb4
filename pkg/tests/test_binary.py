import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdrf.binary import (
    allocate_binary,
    allocate_binary_asym,
    binary_ceo_bound,
    binary_mdrf,
    binary_mdrf_asym,
    llr_spec,
    mismatch_sum_rate,
    test_channel_distortion as channel_distortion,
)
from mdrf.infomath import binary_entropy
from mdrf.models import BinaryModel, CapacityError
from mdrf.oracles import grid_search_allocation

H_INV_HALF = 0.11002786443835955  # brentq on h(x) = 1/2


def enumerate_error(q, alpha=0.5):
    """Bayes error of the MAP vote by listing every outcome of (X, votes)."""
    c = [math.log2((1 - x) / x) for x in q]
    t = math.log2((1 - alpha) / alpha)
    err = 0.0
    for x in (0, 1):
        px = alpha if x else 1 - alpha
        for flips in itertools.product((0, 1), repeat=len(q)):
            w = px * math.prod(qi if f else 1 - qi for qi, f in zip(q, flips))
            y = [x ^ f for f in flips]
            s = sum(cl * (2 * yl - 1) for cl, yl in zip(c, y))
            if abs(s - t) <= 1e-12:
                err += 0.5 * w
            elif (s > t) != bool(x):
                err += w
    return err


class TestModel:
    def test_sorted_ascending(self):
        assert BinaryModel([0.3, 0.1]).ps == (0.1, 0.3)

    @pytest.mark.parametrize("ps,alpha", [([0.6], 0.5), ([-0.1], 0.5), ([0.2], 0.0), ([0.2], 0.7)])
    def test_rejects(self, ps, alpha):
        with pytest.raises(ValueError):
            BinaryModel(ps, alpha)


class TestLlrSpec:
    def test_channel_distortion(self):
        assert channel_distortion(1, 1) == 0.0
        assert channel_distortion(0, 1) == 0.5
        assert channel_distortion(0.5, 1) == pytest.approx(H_INV_HALF, abs=1e-12)
        assert channel_distortion(2.0, 0.7) == 0.0

    def test_full_rate(self):
        spec = llr_spec(BinaryModel([0.2]), [1.0])
        assert spec.q == (0.2,)
        assert spec.c[0] == pytest.approx(2.0, abs=1e-15)
        assert spec.threshold == 0.0

    def test_half_rate(self):
        q = llr_spec(BinaryModel([0.2]), [0.5]).q[0]
        assert q == pytest.approx(0.2 * (1 - H_INV_HALF) + 0.8 * H_INV_HALF, abs=1e-12)
        assert q == pytest.approx(0.266, abs=1e-3)

    def test_zero_rate(self):
        spec = llr_spec(BinaryModel([0.2]), [0.0])
        assert spec.q == (0.5,)
        assert spec.c == (0.0,)

    def test_noiseless_sentinel(self):
        spec = llr_spec(BinaryModel([0.0, 0.2]), [1.0, 1.0])
        assert spec.c[0] == math.inf
        assert binary_mdrf(BinaryModel([0.0, 0.2]), [1.0, 1.0]) == 0.0


class TestMdrf:
    def test_anchor_points(self):
        m = BinaryModel([0.2])
        assert binary_mdrf(m, [1.0]) == 0.2
        assert binary_mdrf(m, [0.0]) == 0.5
        assert binary_mdrf(BinaryModel([0.2, 0.2]), [1.0, 0.5]) == pytest.approx(0.2, abs=1e-15)

    def test_strict_rule_drops_ties(self):
        assert binary_mdrf(BinaryModel([0.2]), [0.0], tie_rule="strict") == 0.0

    @pytest.mark.parametrize("L", [1, 2, 3, 4, 6])
    def test_matches_outcome_enumeration(self, L):
        rng = np.random.default_rng(100 + L)
        for _ in range(5):
            model = BinaryModel(rng.uniform(0, 0.5, L))
            rates = rng.uniform(0, 1, L)
            q = llr_spec(model, rates).q
            assert binary_mdrf(model, rates) == pytest.approx(enumerate_error(q), abs=1e-13)

    def test_equal_sensors_tie_exactly(self):
        # four identical votes: ties when two say each way
        model = BinaryModel([0.1] * 4)
        rates = [0.3] * 4
        q = llr_spec(model, rates).q[0]
        expected = sum(math.comb(4, k) * q**k * (1 - q) ** (4 - k) for k in (3, 4)) \
            + 0.5 * math.comb(4, 2) * q**2 * (1 - q) ** 2
        assert binary_mdrf(model, rates) == pytest.approx(expected, abs=1e-15)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            ps = rng.uniform(0, 0.5, 3)
            rates = rng.uniform(0, 1, 3)
            perm = rng.permutation(3)
            # models sort ps, so pair each rate with its p before sorting
            d1 = enumerate_error(llr_spec(BinaryModel([ps[0]]), [rates[0]]).q
                                 + llr_spec(BinaryModel([ps[1]]), [rates[1]]).q
                                 + llr_spec(BinaryModel([ps[2]]), [rates[2]]).q)
            order = np.argsort(ps[perm], kind="stable")
            model = BinaryModel(ps[perm])
            d2 = binary_mdrf(model, rates[perm][order])
            assert d1 == pytest.approx(d2, abs=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.0, 0.5), min_size=1, max_size=4), st.data())
    def test_non_increasing_in_each_rate(self, ps, data):
        model = BinaryModel(ps)
        rates = np.array(data.draw(st.lists(st.floats(0.0, 0.999), min_size=model.L,
                                            max_size=model.L)))
        base = binary_mdrf(model, rates)
        for l in range(model.L):
            bumped = rates.copy()
            bumped[l] += 1e-3
            assert binary_mdrf(model, bumped) <= base + 1e-12

    def test_needs_uniform_source(self):
        with pytest.raises(ValueError):
            binary_mdrf(BinaryModel([0.2], 0.3), [0.5])

    def test_capacity(self):
        with pytest.raises(CapacityError):
            binary_mdrf(BinaryModel([0.1] * 25), [0.0] * 25)

    def test_largest_enumeration(self):
        model = BinaryModel(np.linspace(0.05, 0.45, 24))
        d = binary_mdrf(model, [0.5] * 24)
        assert 0.0 < d < 0.5


class TestAllocate:
    def test_greedy_examples(self):
        assert allocate_binary(BinaryModel([0.1, 0.2, 0.3]), 1.5).rates == (1.0, 0.5, 0.0)
        assert allocate_binary(BinaryModel([0.1, 0.2]), 0.0).rates == (0.0, 0.0)
        assert allocate_binary(BinaryModel([0.1, 0.2]), 2.0).rates == (1.0, 1.0)
        assert allocate_binary(BinaryModel([0.1, 0.2]), 3.5).rates == (1.0, 1.0)

    def test_active_count(self):
        model = BinaryModel([0.1, 0.15, 0.2, 0.25])
        for budget in (0.3, 1.0 + 1e-6, 1.7, 2.0 + 1e-6, 3.4):
            active = sum(r > 0 for r in allocate_binary(model, budget).rates)
            assert active == math.ceil(budget)
        # an integer budget fills exactly R sensors; one more once it grows
        assert sum(r > 0 for r in allocate_binary(model, 2.0).rates) == 2
        assert sum(r > 0 for r in allocate_binary(model, 2.0 + 1e-6).rates) == 3

    def test_grid_dominance(self):
        model = BinaryModel([0.1, 0.3, 0.4])
        alloc = allocate_binary(model, 1.5)
        grid = grid_search_allocation(model, 1.5, 0.05)
        assert alloc.distortion <= grid.best_distortion + 1e-9
        assert alloc.distortion == pytest.approx(0.1, abs=1e-15)

    def test_even_split_beats_greedy_for_three_equal_sensors(self):
        # three equal votes form a majority; the greedy split leaves one voter deciding
        model = BinaryModel([0.25] * 3)
        q = 0.25 * (1 - H_INV_HALF) + 0.75 * H_INV_HALF
        majority = 3 * q * q * (1 - q) + q**3
        assert binary_mdrf(model, [0.5] * 3) == pytest.approx(majority, abs=1e-14)
        assert allocate_binary(model, 1.5).distortion == pytest.approx(0.25, abs=1e-15)
        assert majority < 0.25 - 0.02


class TestAsymmetric:
    def test_reduces_to_symmetric(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            L = int(rng.integers(1, 6))
            model = BinaryModel(rng.uniform(0, 0.5, L))
            rates = rng.uniform(0, 1.2, L)
            assert abs(binary_mdrf_asym(model, rates) - binary_mdrf(model, rates)) <= 1e-12

    @pytest.mark.parametrize("alpha", [0.05, 0.2, 0.3, 0.45])
    def test_matches_joint_enumeration(self, alpha):
        model = BinaryModel([0.1, 0.25, 0.3], alpha)
        rates = [0.4, 0.7, 0.2]
        q = llr_spec(model, rates).q
        assert binary_mdrf_asym(model, rates) == pytest.approx(enumerate_error(q, alpha), abs=1e-13)

    def test_zero_rates_give_prior_guess(self):
        for alpha in (0.01, 0.3, 0.5):
            d = binary_mdrf_asym(BinaryModel([0.1, 0.3], alpha), [0.0, 0.0])
            assert d == pytest.approx(min(alpha, 1 - alpha), abs=1e-12)

    def test_first_interval_error_is_q1(self):
        # c1 > c2 and a threshold between 0 and c1 - c2: sensor 1 decides alone
        model = BinaryModel([0.05, 0.3], 0.4)
        rates = [1.0, 0.5]
        spec = llr_spec(model, rates, "symmetric")
        c1, c2 = spec.c
        assert 0 < spec.threshold < c1 - c2
        d = binary_mdrf_asym(model, rates, "symmetric")
        assert d == pytest.approx(spec.q[0], abs=1e-15)
        # and the second sensor's rate is irrelevant there
        assert binary_mdrf_asym(model, [1.0, 0.1], "symmetric") == pytest.approx(d, abs=1e-15)

    def test_allocation_matches_greedy_at_half(self):
        alloc = allocate_binary_asym(BinaryModel([0.2, 1 / 3]), 0.5)
        assert alloc.rates == (0.5, 0.0)

    def test_vanishing_bias_is_a_full_tie(self):
        alloc = allocate_binary_asym(BinaryModel([0.2, 1 / 3], 1e-6), 0.5)
        assert alloc.rates[0] == 0.5
        assert alloc.distortion == pytest.approx(1e-6, abs=1e-12)

    def test_interior_optimum_exists(self):
        # for moderate bias the optimum keeps some rate on the second sensor
        alloc = allocate_binary_asym(BinaryModel([0.2, 1 / 3], 0.25), 0.5)
        assert 0.0 < alloc.rates[0] < 0.5
        ends = [binary_mdrf_asym(BinaryModel([0.2, 1 / 3], 0.25), r) for r in ([0.5, 0.0], [0.0, 0.5])]
        assert alloc.distortion < min(ends)

    def test_requires_two_sensors(self):
        with pytest.raises(ValueError):
            allocate_binary_asym(BinaryModel([0.1, 0.2, 0.3], 0.3), 0.5)


class TestCeo:
    def test_sum_bound(self):
        assert binary_ceo_bound(0.2, 0.2, 0.5, 0.5)[2] == 0.0
        for d in (0.05, 0.2, 0.3):
            expected = 1 + binary_entropy(0.32) - 2 * binary_entropy(d)
            assert binary_ceo_bound(0.2, 0.2, d, d)[2] == pytest.approx(max(0.0, expected), abs=1e-15)
        assert binary_ceo_bound(0.2, 0.2, 0.0, 0.0)[2] == pytest.approx(1 + binary_entropy(0.32), abs=1e-15)

    def test_rate_dependent_bounds_tighten(self):
        loose = binary_ceo_bound(0.1, 0.2, 0.1, 0.1)
        tight = binary_ceo_bound(0.1, 0.2, 0.1, 0.1, rates=(0.3, 0.3))
        assert tight[0] >= loose[0] and tight[1] >= loose[1]

    def test_mismatch_rate_single_sensor_form(self):
        # with L=2 equal sensors the second never changes the vote, so the
        # rate needed is that of one sensor: D = p * D1
        model = BinaryModel([0.2, 0.2])
        for d in (0.25, 0.3, 0.4):
            expected = 1 - binary_entropy((d - 0.2) / 0.6)
            assert mismatch_sum_rate(model, d) == pytest.approx(expected, abs=1e-8)
        assert mismatch_sum_rate(model, 0.1) == math.inf
        assert mismatch_sum_rate(model, 0.5) == 0.0
