from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schottky_spectral.congruence import (
    CongruenceContext,
    _bucket_index,
    audit_ptau,
    build_context,
    count_Nn,
    count_Nn_bruteforce,
    decompose_pair,
    divisor_count,
    in_gamma_n,
    min_offdiagonal_norm_squared,
    new_eig_threshold,
    omega,
    sl2_order,
    sl2_order_bruteforce,
    trace_sigma,
)
from schottky_spectral.errors import EnumerationCapError, InfeasibleParameters
from schottky_spectral.moebius import Mat2
from schottky_spectral.schottky import (
    build_tau_block,
    gamma_of_word,
    interval_length,
    is_reduced,
    load_schottky,
)

G1 = Mat2(3, 8, 1, 3)


def test_index_mod_two(gamma_ex):
    ctx = build_context(gamma_ex, 2)
    assert ctx.index == 6 and ctx.surjective
    assert {(1, 0, 1, 1), (0, 1, 1, 0)} <= set(ctx.elements)
    assert ctx.is_closed()


def test_trivial_level(gamma_ex, thick_ex):
    ctx = build_context(gamma_ex, 1)
    assert ctx.index == 1 and ctx.surjective
    assert build_context(thick_ex, 1).index == 1
    with pytest.raises(InfeasibleParameters):
        build_context(thick_ex, 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_image_is_a_subgroup(gamma_ex, n):
    ctx = build_context(gamma_ex, n)
    assert ctx.is_closed()
    assert sl2_order(n) % ctx.index == 0
    assert ctx.surjective == (ctx.index == sl2_order(n))


def test_level_three_not_surjective(gamma_ex):
    # both generators reduce to the same element mod 3
    ctx = build_context(gamma_ex, 3)
    assert not ctx.surjective
    assert ctx.index < sl2_order(3)


@pytest.mark.parametrize("n, order", [(2, 6), (3, 24), (4, 48), (5, 120)])
def test_sl2_order_formula(n, order):
    assert sl2_order(n) == order == sl2_order_bruteforce(n)
    assert order < n**3


def test_surjective_order_matches_product_formula():
    for n in (2, 3, 4, 5, 6, 12):
        prod = n**3
        for p in {2, 3, 5}:
            if n % p == 0:
                prod *= Fraction(p * p - 1, p * p)
        assert sl2_order(n) == prod


def test_membership_and_trace(gamma_ex):
    ctx = build_context(gamma_ex, 2)
    sq = G1 @ G1
    assert sq == Mat2(17, 48, 6, 17)
    assert in_gamma_n(ctx, sq) and not in_gamma_n(ctx, G1)
    assert in_gamma_n(ctx, Mat2.identity())
    assert trace_sigma(ctx, sq) == 6
    assert trace_sigma(ctx, G1) == 0
    assert trace_sigma(ctx, Mat2.identity()) == ctx.index


@given(st.lists(st.integers(1, 4), max_size=7).filter(lambda w: is_reduced(w, 2)),
       st.sampled_from([2, 3, 4]))
def test_trace_is_zero_or_index(letters, n):
    data = load_schottky("gamma_ex")
    ctx = build_context(data, n)
    m = gamma_of_word(data, letters)
    tr = trace_sigma(ctx, m)
    assert tr in (0, ctx.index)
    assert (tr == ctx.index) == in_gamma_n(ctx, m)
    # the permutation character agrees with counting fixed cosets
    perm = ctx.right_permutation(m)
    assert int((perm == list(range(ctx.index))).sum()) == tr


def test_count_examples():
    count, witnesses = count_Nn(1, 1.5)
    assert count == count_Nn_bruteforce(1, 1.5) == 2
    assert sorted(witnesses) == [(0, -1, 1, 0), (0, 1, -1, 0)]
    count, witnesses = count_Nn(2, 2)
    assert count == count_Nn_bruteforce(2, 2)
    assert all(a % 2 == 1 and b % 2 == 0 and c % 2 == 0 and d % 2 == 1 for a, b, c, d in witnesses)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
@pytest.mark.parametrize("R", [2.5, 5, 9.5])
def test_count_matches_bruteforce(n, R):
    assert count_Nn(n, R)[0] == count_Nn_bruteforce(n, R)


def test_count_is_monotone_and_respects_minimum_norm():
    for n in (2, 3, 5):
        counts = [count_Nn(n, R)[0] for R in (3, 5, 8, 13, 21)]
        assert counts == sorted(counts)
        _, witnesses = count_Nn(n, 21)
        assert min_offdiagonal_norm_squared(witnesses) >= 2 + 2 * n * n - 2 * n


def test_count_guards(monkeypatch):
    with pytest.raises(EnumerationCapError):
        count_Nn(1, 500)
    monkeypatch.setenv("SCHOTTKY_SPECTRAL_COUNT_CAP", "10")
    with pytest.raises(EnumerationCapError):
        count_Nn(1, 20)
    with pytest.raises(InfeasibleParameters):
        count_Nn(0, 5)


def test_divisor_statistics():
    assert divisor_count(6) == 8
    assert divisor_count(1) == 2
    assert divisor_count(-12) == 12
    assert omega(12) == 2
    assert new_eig_threshold(12) == Fraction(4, 3)
    with pytest.raises(InfeasibleParameters):
        divisor_count(0)


@given(st.integers(1, 2000))
def test_divisor_count_matches_direct_enumeration(k):
    assert divisor_count(k) == 2 * sum(1 for d in range(1, k + 1) if k % d == 0)


@given(st.floats(min_value=1e-12, max_value=0.999, allow_nan=False))
def test_bucket_index_brackets(x):
    a = _bucket_index(x, 1.0)
    assert 2.0 ** -(a + 1) <= x < 2.0**-a


def test_bucket_index_at_powers_of_two():
    assert _bucket_index(0.5, 1.0) == 0
    assert _bucket_index(0.25, 1.0) == 1
    assert _bucket_index(0.125, 2.0) == 3


def test_decomposition_examples():
    assert decompose_pair((1, 2, 1), (1, 4, 1)) == ((1,), (2,), (4,), (1,))
    assert decompose_pair((1, 2, 2, 1), (1, 1)) == ((1,), (2, 2), (), (1,))
    with pytest.raises(InfeasibleParameters):
        decompose_pair((1, 2), (1, 2))


def test_ptau_level_one_contains_diagonal(gamma_ex):
    block = build_tau_block(gamma_ex, 0.05)
    audit = audit_ptau(gamma_ex, build_context(gamma_ex, 1), 0.05, delta=0.33)
    assert audit.diagonal == len(block.words)
    assert audit.size >= len(block.words)


def test_ptau_large_level_is_diagonal(gamma_ex):
    block = build_tau_block(gamma_ex, 0.02)
    mats = [gamma_of_word(gamma_ex, w) for w in block.words]
    gap = 0
    for p in mats:
        for q in mats:
            r = p @ q.inverse()
            gap = max(gap, abs(r.a - 1), abs(r.b), abs(r.c), abs(r.d - 1))
    # above the largest entry gap, congruence to I forces equality; the audit
    # only needs the modulus, so a membership-only context avoids enumerating SL(2, Z/n)
    ctx = CongruenceContext(gap + 1, [], {}, False)
    audit = audit_ptau(gamma_ex, ctx, 0.02, delta=0.33)
    assert audit.size == audit.diagonal == len(block.words)
    assert not audit.buckets


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ptau_pair_invariants(gamma_ex, n):
    ctx = build_context(gamma_ex, n)
    audit = audit_ptau(gamma_ex, ctx, 0.02, delta=0.33)
    G = 2 * gamma_ex.max_boundary_length
    for w1, w2 in audit.pairs:
        assert w1[0] == w2[0] and w1[-1] == w2[-1]
        assert in_gamma_n(ctx, gamma_of_word(gamma_ex, w1) @ gamma_of_word(gamma_ex, w2).inverse())
    for (w1, w2), dec in audit.decompositions.items():
        assert dec.prefix + dec.middle1 + dec.suffix == w1
        assert dec.prefix + dec.middle2 + dec.suffix == w2
        assert dec.prefix and dec.suffix
        assert dec.middle1[:1] != dec.middle2[:1] and dec.middle1[-1:] != dec.middle2[-1:]
        a, c = dec.bucket
        for part, idx in ((dec.prefix, a), (dec.suffix, c)):
            x = interval_length(gamma_ex, part) / G
            assert 2.0 ** -(idx + 1) <= x < 2.0**-idx
    for a, c, count, scaled in audit.bucket_rows():
        assert count > 0 and scaled <= audit.bucket_constant


def test_ptau_rejects_large_tau(gamma_ex):
    with pytest.raises(InfeasibleParameters):
        audit_ptau(gamma_ex, build_context(gamma_ex, 1), 1.5, delta=0.33)
