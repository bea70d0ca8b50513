import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from friable.decomp import (
    ADDITIVE,
    BUDGET_EXCEEDED,
    CASE1,
    CASE2,
    COMPLETE,
    EXHAUSTED,
    MULTIPLICATIVE,
    OUT_OF_HYPOTHESIS,
    DecompositionCertificate,
    SearchLimits,
    WindowSet,
    case_classifier,
    combine,
    contradiction_threshold,
    growth_scales,
    search_decompositions,
    theorem1_pipeline,
    theorem2_pipeline,
    verify_certificate,
)
from friable.errors import ArgumentError, CapacityError
from friable.psi import psi_exact
from friable.smooth_core import UINT64_MAX, SortedIntSet, counting, prime_count
from friable.sunit import smooth_pair_difference


def cert(B, C, mode, lo, hi):
    return DecompositionCertificate(SortedIntSet(B), SortedIntSet(C), mode, lo, hi)


def pairs_of(result):
    return [(tuple(c.B), tuple(c.C)) for c in result.certificates]


# -- combine ----------------------------------------------------------------

def test_combine_examples():
    assert list(combine({0, 1}, {0, 2}, ADDITIVE)) == [0, 1, 2, 3]
    assert list(combine({1, 2}, {1, 3}, MULTIPLICATIVE)) == [1, 2, 3, 6]
    assert list(combine({1, 2}, {1, 2}, MULTIPLICATIVE)) == [1, 2, 4]
    assert list(combine([], {1}, ADDITIVE)) == []


def test_combine_errors():
    with pytest.raises(ArgumentError):
        combine({0, 1}, {1, 2}, MULTIPLICATIVE)
    with pytest.raises(ArgumentError):
        combine({1}, {2}, "xor")
    with pytest.raises(CapacityError):
        combine({1, UINT64_MAX}, {0, 1}, ADDITIVE)
    with pytest.raises(CapacityError):
        combine({1, 2**40}, {1, 2**40}, MULTIPLICATIVE)


# -- windows and verification -----------------------------------------------

def test_window_set_validation():
    w = WindowSet.full([3, 1, 2])
    assert (w.n0, w.N, list(w.elements)) == (1, 3, [1, 2, 3])
    assert list(WindowSet.clip(range(20), 5, 8).elements) == [5, 6, 7, 8]
    with pytest.raises(ArgumentError):
        WindowSet(SortedIntSet([1, 9]), 2, 10)
    with pytest.raises(ArgumentError):
        WindowSet(SortedIntSet(), 5, 4)
    with pytest.raises(ArgumentError):
        WindowSet.full([])


def test_verify_examples():
    t = WindowSet(SortedIntSet([0, 1, 2, 3]), 0, 3)
    assert verify_certificate(t, cert({0, 1}, {0, 2}, ADDITIVE, 0, 3))
    t = WindowSet(SortedIntSet([1, 2, 3, 6]), 1, 6)
    assert verify_certificate(t, cert({1, 2}, {1, 3}, MULTIPLICATIVE, 1, 6))


def test_verify_target_013_window_semantics():
    # Sums above the verification window are ignored, so {0,1,3} on [0,3]
    # is matched by certificates whose combination overshoots 3.  None of
    # them is an exact decomposition; the exact search finds nothing.
    t = WindowSet(SortedIntSet([0, 1, 3]), 0, 3)
    universe = range(0, 4)
    subsets = [s for r in range(2, 5) for s in itertools.combinations(universe, r)]
    accepted = [(B, C) for B in subsets for C in subsets
                if verify_certificate(t, cert(B, C, ADDITIVE, 0, 3))]
    assert ((0, 1), (0, 3)) in accepted
    assert all(max(combine(B, C, ADDITIVE)) > 3 for B, C in accepted)
    assert not any(list(combine(B, C, ADDITIVE)) == [0, 1, 3] for B, C in accepted)
    assert oracles.all_decompositions_naive({0, 1, 3}, ADDITIVE, list(universe)) == set()
    assert search_decompositions(t, ADDITIVE).status == EXHAUSTED


def test_verify_errors_and_size_rule():
    t = WindowSet(SortedIntSet([0, 1, 2, 3]), 0, 3)
    with pytest.raises(ArgumentError):
        verify_certificate(t, cert({0, 1}, {0, 2}, ADDITIVE, 3, 0))
    with pytest.raises(ArgumentError):
        verify_certificate(t, cert({0, 1}, {0, 2}, ADDITIVE, 0, 4))
    assert not verify_certificate(t, cert({0}, {0, 1, 2, 3}, ADDITIVE, 0, 3))


def test_verify_ignores_outside_window():
    # only [5, 9] is authoritative; the low segment may differ freely
    t = WindowSet(SortedIntSet([5, 6, 7, 8, 9]), 5, 9)
    assert verify_certificate(t, cert({0, 1}, range(0, 9), ADDITIVE, 5, 9))
    assert not verify_certificate(t, cert({0, 2}, range(0, 9, 2), ADDITIVE, 5, 9))


def test_certificate_dict_round_trip():
    c = cert({1, 2}, {1, 3}, MULTIPLICATIVE, 1, 6)
    assert DecompositionCertificate.from_dict(c.to_dict()) == c
    assert c.swapped().swapped() == c


# -- search -----------------------------------------------------------------

def test_search_examples():
    res = search_decompositions(WindowSet.full([0, 1, 2, 3]), ADDITIVE)
    assert res.status == COMPLETE
    got = pairs_of(res)
    assert ((0, 1), (0, 2)) in got and ((0, 1), (0, 1, 2)) in got
    res = search_decompositions(WindowSet.full([0, 1, 3]), ADDITIVE)
    assert res.status == EXHAUSTED and res.certificates == []
    assert res.searched["semantics"] == "exact"
    res = search_decompositions(WindowSet.full([1, 2, 3, 6]), MULTIPLICATIVE)
    assert pairs_of(res) == [((1, 2), (1, 3))]


def test_search_matches_naive_all_pairs():
    for A in ([0, 1, 2, 3], [0, 1, 2, 3, 4, 5], [2, 3, 4, 5, 6], [0, 2, 3, 5, 6, 8], [1, 2, 3, 4, 6]):
        expect = oracles.all_decompositions_naive(A, ADDITIVE, list(range(max(A) + 1)))
        got = set(pairs_of(search_decompositions(WindowSet.full(A), ADDITIVE)))
        assert got == expect, A
    for A in ([1, 2, 3, 6], [1, 2, 4, 8], [2, 4, 6, 12], [1, 2, 3, 4, 6, 12]):
        # every factor divides some target element
        divisors = sorted({d for a in A for d in range(1, a + 1) if a % d == 0})
        expect = oracles.all_decompositions_naive(A, MULTIPLICATIVE, divisors)
        got = set(pairs_of(search_decompositions(WindowSet.full(A), MULTIPLICATIVE)))
        assert got == expect, A


def test_search_canonical_order_and_uniqueness():
    res = search_decompositions(WindowSet.full(range(0, 7)), ADDITIVE)
    keys = [(len(B), B, len(C), C) for B, C in pairs_of(res)]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    assert all(B <= C for B, C in pairs_of(res))


def test_search_budget_is_distinct_from_exhausted():
    target = WindowSet.full(range(0, 40))
    res = search_decompositions(target, ADDITIVE, limits=SearchLimits(max_nodes=5))
    assert res.status == BUDGET_EXCEEDED and not res.complete
    res = search_decompositions(target, ADDITIVE, limits=SearchLimits(max_certificates=1))
    assert res.status == BUDGET_EXCEEDED and len(res.certificates) == 1


def test_search_max_element_and_errors():
    res = search_decompositions(WindowSet.full([0, 1, 2, 3]), ADDITIVE, max_element=2)
    assert all(max(c.B) <= 2 and max(c.C) <= 2 for c in res.certificates)
    with pytest.raises(ArgumentError):
        search_decompositions(WindowSet.full([0, 1, 2]), MULTIPLICATIVE)
    with pytest.raises(ArgumentError):
        SearchLimits(max_nodes=0)


def test_search_workers_do_not_change_output():
    target = WindowSet.full([0, 1, 2, 3, 4, 5, 6, 7])
    one = search_decompositions(target, ADDITIVE, workers=1)
    many = search_decompositions(target, ADDITIVE, workers=3)
    assert one.to_dict() == many.to_dict()


sets = st.lists(st.integers(0, 20), min_size=2, max_size=4, unique=True)
psets = st.lists(st.integers(1, 20), min_size=2, max_size=4, unique=True)


@settings(max_examples=60, deadline=None)
@given(sets, sets)
def test_additive_round_trip_sound_and_symmetric(B, C):
    target = WindowSet.full(combine(B, C, ADDITIVE))
    res = search_decompositions(target, ADDITIVE, limits=SearchLimits(max_certificates=50))
    assert res.certificates
    for c in res.certificates:
        assert verify_certificate(target, c)
        assert verify_certificate(target, c.swapped())
        assert combine(c.B, c.C, ADDITIVE) == target.elements
    if res.status == COMPLETE:
        canon = tuple(sorted((tuple(sorted(B)), tuple(sorted(C)))))
        assert canon in pairs_of(res)


@settings(max_examples=60, deadline=None)
@given(psets, psets)
def test_multiplicative_round_trip(B, C):
    target = WindowSet.full(combine(B, C, MULTIPLICATIVE))
    res = search_decompositions(target, MULTIPLICATIVE, limits=SearchLimits(max_certificates=50))
    assert res.certificates
    assert all(verify_certificate(target, c) for c in res.certificates)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 18), min_size=2, max_size=7, unique=True))
def test_exhausted_agrees_with_naive(A):
    res = search_decompositions(WindowSet.full(A), ADDITIVE)
    assert res.status != BUDGET_EXCEEDED
    assert (res.status == EXHAUSTED) == (not oracles.has_decomposition_naive(A, ADDITIVE))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 24), min_size=2, max_size=6, unique=True))
def test_exhausted_agrees_with_naive_multiplicative(A):
    res = search_decompositions(WindowSet.full(A), MULTIPLICATIVE)
    assert (res.status == EXHAUSTED) == (not oracles.has_decomposition_naive(A, MULTIPLICATIVE))


# -- growth scales ----------------------------------------------------------

def test_growth_scales_examples():
    full = range(1, 1001)
    assert growth_scales(full, full, 2, 100) == list(range(1, 101))
    powers = [2**k for k in range(21)]
    assert growth_scales(powers, powers, 2, 1000) == list(range(1, 1001))
    assert growth_scales([], [], 3, 50) == []
    with pytest.raises(ArgumentError):
        growth_scales([1], [1], 0, 10)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(1, 300), max_size=30),
    st.lists(st.integers(1, 300), max_size=30),
    st.integers(1, 4),
    st.integers(1, 300),
)
def test_growth_lemma_instantiation(A, B, m, D_max):
    if growth_scales(A, B, m, D_max):
        return
    A, B = SortedIntSet(A), SortedIntSet(B)
    for D0 in range(1, D_max + 1):
        k, D = 0, D0
        while D <= D_max:
            assert counting(A, D) * counting(B, D) >= (m * m + 1) ** k * counting(A, D0) * counting(B, D0)
            k, D = k + 1, D * m
            if m == 1:
                break


# -- case split -------------------------------------------------------------

def test_case_classifier_examples():
    assert case_classifier(math.log(10.0) * 100, 3) == CASE1
    assert case_classifier(2.0**45, 1000) == CASE2
    assert case_classifier(100.0, 10) == OUT_OF_HYPOTHESIS
    assert case_classifier(2.0**45, 1.5) == OUT_OF_HYPOTHESIS
    assert case_classifier(2.0**45, 8192) == OUT_OF_HYPOTHESIS
    with pytest.raises(ArgumentError):
        case_classifier(2.0, 3)


@given(st.floats(3.0, 1e15), st.floats(0.5, 1e6))
def test_case_classifier_partition(log_N, y):
    label = case_classifier(log_N, y)
    ll = math.log(log_N)
    if label == CASE1:
        assert 2 <= y <= ll
    elif label == CASE2:
        assert ll < y < 2.0**-32 * log_N
    else:
        assert y < 2 or y >= max(ll, 2.0**-32 * log_N) or (ll < y and y >= 2.0**-32 * log_N)


# -- pipelines --------------------------------------------------------------

def test_contradiction_threshold_is_exact():
    for s in (0, 1, 2, 5):
        for m in (1, 2, 7):
            t = contradiction_threshold(s, m)
            E = 8 * (2 * s + 2)
            assert math.isqrt(t) == 3 * m * 2**E and math.isqrt(t) ** 2 == t


def test_theorem1_examples(table_1e6):
    rep = theorem1_pipeline(3, 1, 2, 1, 10**6, table_1e6)
    psi = psi_exact(10**6, 3)
    assert (rep.M, rep.s, rep.rhs_exponent, rep.psi) == (4, 2, 48, psi)
    assert rep.lhs == pytest.approx(math.sqrt(psi) / 3)
    assert not rep.contradiction_reached and rep.bound_respected
    assert rep.b_values == [0, 1, 2, 7]
    assert rep.log2_gap > 40

    rep = theorem1_pipeline(2, 1, 4, 1, 100, table_1e6)
    assert rep.M == 1 and rep.b_values == [0] and rep.pairs == [(4, 1)]

    rep = theorem1_pipeline(2, 1, 6, 1, 100, table_1e6)
    assert rep.M == 0 and rep.b_values == [] and rep.rhs_exponent == 32


def test_theorem2_examples(table_1e5):
    rep = theorem2_pipeline(3, 1, 2, 2, 20, 2, table_1e5)
    assert rep.M == 1 and rep.b_values == [5]
    assert rep.psi == oracles.brute_psi(20, 3)
    assert rep.lhs == pytest.approx(math.sqrt(rep.psi) / 6)
    rep = theorem2_pipeline(5, 2, 3, 1, 10, 3, table_1e5)
    assert rep.M == 3 and rep.b_values == [1, 2, 3] and rep.rhs_exponent == 8 * (2 * 3 + 2)
    rep = theorem2_pipeline(2, 1, 2, 2, 40, 1, table_1e5)
    assert rep.M == 0
    with pytest.raises(ArgumentError):
        theorem2_pipeline(5, 2, 3, 1, 10, 0, table_1e5)


def test_pipeline_errors(table_1e5):
    with pytest.raises(ArgumentError):
        theorem1_pipeline(3, 2, 2, 1, 100, table_1e5)
    with pytest.raises(ArgumentError):
        theorem1_pipeline(3, 1, 2, 50, 10, table_1e5)


@settings(max_examples=40, deadline=None)
@given(y=st.sampled_from([2, 3, 5, 7, 11]), a1=st.integers(0, 12), gap=st.integers(1, 12),
       n0=st.integers(0, 300), span=st.integers(1, 3000))
def test_theorem1_consistency(table_1e5, y, a1, gap, n0, span):
    a2 = a1 + gap
    N = n0 + span
    rep = theorem1_pipeline(y, a1, a2, n0, N, table_1e5)
    brute = [b for b in range(max(n0 - a1, 0, 1 - a1), N - a2 + 1)
             if oracles.largest_prime_factor(a1 + b) <= y and oracles.largest_prime_factor(a2 + b) <= y]
    assert rep.b_values == brute
    assert rep.rhs_exponent == 8 * (2 * prime_count(y) + 2)
    assert rep.lhs >= 0
    lo = max(n0, a1, 1)
    if lo + gap <= N:
        sol = smooth_pair_difference(y, gap, lo, N, table_1e5)
        assert rep.M == sol.M
        assert rep.b_values == [Y - a1 for _, Y in sol.int_pairs() if n0 - a1 <= Y - a1 <= N - a2]


def test_report_dict_fields(table_1e5):
    d = theorem1_pipeline(3, 1, 2, 1, 1000, table_1e5).to_dict()
    for key in ("y_value", "s", "psi", "lhs", "rhs_exponent", "M", "case_label", "contradiction_reached"):
        assert key in d
