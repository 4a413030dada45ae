import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import random_hypergraph
from hypersearch import BoundParams, ScoreParams, RelaxationParams, bound_fn, bound_ft, bound_ft_safe, build_incidence
from hypersearch.bounds import total_relaxed_support
from hypersearch.scoring import score_final

THIRD = Fraction(1, 3)


def test_fn_zero_counts_supersets(toy):
    assert bound_fn(toy, {1, 2}, BoundParams(0)) == 3
    assert bound_fn(toy, {1, 2}, BoundParams(0)) == oracles.max_support_size(toy, (1, 2), 0, 1, 1, include_disjoint=True)


def test_fn_empty_pool():
    h = build_incidence([[0, 1]], 3)
    assert bound_fn(h, {2}, BoundParams(0)) == 0


def test_ft_toy_third(toy):
    edges, misses = total_relaxed_support(toy, {1, 2, 3}, THIRD)
    assert misses == [0, 1, 1, 2]
    assert bound_ft(toy, {1, 2, 3}, BoundParams(THIRD)) == 4


def test_ft_zero_counts_supersets(toy):
    assert bound_ft(toy, {1, 2}, BoundParams(0)) == 3


def test_ft_empty_pool():
    h = build_incidence([[0, 1]], 3)
    assert bound_ft(h, {2}, BoundParams(THIRD)) == 0


def test_disjoint_edges_fill_leftover_budget():
    # {0} is covered by one edge; {1} misses it. With eps_v = 1/2 the
    # node-budget support of {0} may include the disjoint edge, so the
    # total-budget bound must too.
    h = build_incidence([[0], [1]], 2)
    half = Fraction(1, 2)
    assert bound_fn(h, {0}, BoundParams(half)) == 2
    assert bound_ft(h, {0}, BoundParams(half)) == 2
    assert bound_fn(h, {0, 1}, BoundParams(half)) <= bound_fn(h, {0}, BoundParams(half))


grid = st.sampled_from([Fraction(0), Fraction(1, 5), Fraction(1, 4), Fraction(1, 3)])


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), ev=grid, ee=grid, et=grid)
def test_untimed_chain(seed, ev, ee, et):
    rng = random.Random(seed)
    h = random_hypergraph(rng, max_nodes=8, max_edges=10)
    big = tuple(sorted(rng.sample(range(h.num_nodes), rng.randint(1, min(5, h.num_nodes)))))
    small = tuple(sorted(rng.sample(big, rng.randint(1, len(big)))))
    sp = ScoreParams(RelaxationParams(ev, ee, et))
    bp = BoundParams.from_score_params(sp)
    assert bound_fn(h, big, bp) <= bound_fn(h, small, bp)
    assert score_final(h, small, sp) <= bound_fn(h, small, bp)
    assert bound_fn(h, small, bp) <= bound_ft(h, small, bp)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 10**6), ev=grid, tau=st.sampled_from([0.1, 1.0, 10.0]))
def test_safe_bound_covers_supersets(seed, ev, tau):
    rng = random.Random(seed)
    h = random_hypergraph(rng, max_nodes=8, max_edges=10, timed=True)
    big = tuple(sorted(rng.sample(range(h.num_nodes), rng.randint(1, min(5, h.num_nodes)))))
    small = tuple(sorted(rng.sample(big, rng.randint(1, len(big)))))
    sp = ScoreParams(RelaxationParams(ev, rng.choice([0, THIRD]), rng.choice([0, THIRD])), tau=tau, use_time=True)
    bp = BoundParams.from_score_params(sp)
    safe = bound_ft_safe(h, small, bp)
    assert score_final(h, small, sp) <= safe + 1e-9
    assert score_final(h, big, sp) <= safe + 1e-9
    assert bound_fn(h, big, bp) <= safe + 1e-9


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), ev=grid)
def test_prefix_is_max_total_feasible(seed, ev):
    rng = random.Random(seed)
    h = random_hypergraph(rng, max_nodes=8, max_edges=12)
    cand = tuple(sorted(rng.sample(range(h.num_nodes), rng.randint(1, min(4, h.num_nodes)))))
    edges, misses = total_relaxed_support(h, cand, ev)
    all_misses = [len(set(cand) - set(e)) for e in h.edges]
    assert len(edges) == oracles.max_total_only(all_misses, ev, len(cand))
    assert misses == sorted(misses)
