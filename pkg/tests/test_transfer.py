import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schottky_spectral.congruence import build_context
from schottky_spectral.errors import BranchCutError, InfeasibleParameters
from schottky_spectral.moebius import Disk, translation_length
from schottky_spectral.schottky import build_tau_block, gamma_of_word, mirror
from schottky_spectral.spectral import estimate_delta, fixed_vector
from schottky_spectral.transfer import (
    BergmanBasis,
    ClassicalDeterminant,
    RepDescriptor,
    TransferFamily,
    ZetaTauN,
    assemble,
    bergman_kernel,
    classical_words,
    disk_quadrature,
    fredholm_det,
    hs_norm,
    hs_norm_formula,
    power_s,
    primitive_classes,
    selberg_zeta_euler,
    zeta_tau_n,
)


def test_power_examples():
    assert power_s(1, 3.7 - 2j) == 1
    assert power_s(math.e, 2) == pytest.approx(math.e**2)
    assert power_s(1j, 0.5) == pytest.approx(cmath.exp(1j * math.pi / 4))
    with pytest.raises(BranchCutError):
        power_s(-2.0, 0.5)


def test_bergman_kernel_examples():
    assert bergman_kernel(Disk(0, 1), 0, 0) == pytest.approx(1 / math.pi)
    assert bergman_kernel(Disk(3, 0.5), 3, 3) == pytest.approx(1 / (math.pi * 0.25))


def test_bergman_kernel_reproduces_identity():
    D = Disk(0, 1)
    pts, wts = disk_quadrature(D, 40, 80)
    w = 0.3
    value = np.sum(np.array([bergman_kernel(D, w, z) for z in pts]) * pts * wts)
    assert abs(value - w) < 1e-8


def test_basis_is_orthonormal():
    basis = BergmanBasis((Disk(6, 1), Disk(-1.2, 0.7)), 6)
    for i, D in enumerate(basis.disks):
        pts, wts = disk_quadrature(D, 20, 40)
        vals = np.array([basis.evaluate(i, k, pts) for k in range(7)])
        gram = (vals * wts) @ vals.conj().T
        assert np.allclose(gram, np.eye(7), atol=1e-12)


def test_constant_function_at_zero(gamma_ex):
    T = assemble(gamma_ex, "classical", 0.0)
    basis = BergmanBasis(gamma_ex.disks, T.metadata["M"])
    one = basis.coefficients_of_constant()
    # each disk receives one term per allowed move, three of them for N = 2
    assert np.allclose(T.matrix @ one, 3 * one, atol=1e-12)


def test_trivial_and_level_one_regular_agree(gamma_ex):
    words = build_tau_block(gamma_ex, 0.05).words
    a = assemble(gamma_ex, words, 0.7 + 0.4j).matrix
    b = assemble(gamma_ex, words, 0.7 + 0.4j, RepDescriptor.regular(build_context(gamma_ex, 1))).matrix
    assert np.array_equal(a, b)


def test_block_sparsity(gamma_ex):
    words = build_tau_block(gamma_ex, 0.05).words
    T = assemble(gamma_ex, words, 1.0, M=8)
    for target in gamma_ex.letters:
        for source in gamma_ex.letters:
            used = any(w[-1] == target and w[0] == source for w in words)
            if not used:
                assert not T.block(target, source).any()


def test_empty_word_set_has_unit_determinant(gamma_ex):
    assert fredholm_det(assemble(gamma_ex, [], 0.5)) == 1


def test_determinant_near_one_for_large_s(gamma_ex):
    assert abs(ClassicalDeterminant(gamma_ex)(20.0) - 1) < 1e-8


def test_truncation_stability(gamma_ex):
    assert abs(ClassicalDeterminant(gamma_ex, 16)(1.0) - ClassicalDeterminant(gamma_ex, 21)(1.0)) < 1e-10


def test_metadata_records_discretisation(gamma_ex):
    T = assemble(gamma_ex, "classical", 1.5, M=10, rho=0.6)
    assert T.metadata["M"] == 10 and T.metadata["rho"] == 0.6
    assert T.metadata["quad_points"] == 44
    assert T.dimension == 4 * 11


def test_dimension_cap(gamma_ex, monkeypatch):
    monkeypatch.setenv("SCHOTTKY_SPECTRAL_MAX_DIM", "50")
    with pytest.raises(InfeasibleParameters):
        TransferFamily(gamma_ex, classical_words(gamma_ex), None, 24)


@pytest.mark.parametrize("s", [0.4, 1.3 - 0.7j, 2.5 + 3j])
def test_level_one_zeta_factorises(gamma_ex, s):
    zeta = ZetaTauN(gamma_ex, build_context(gamma_ex, 1), 0.05)
    L = zeta.operator(s)
    product = np.linalg.det(np.eye(len(L)) - L) * np.linalg.det(np.eye(len(L)) + L)
    assert abs(zeta(s) - product) < 1e-10 * max(1, abs(product))
    assert abs(zeta(s) - zeta.squared_route(s)) < 1e-10 * max(1, abs(product))


def test_zeta_is_deterministic(gamma_ex):
    ctx = build_context(gamma_ex, 2)
    assert zeta_tau_n(gamma_ex, ctx, 0.05, 2.0) == zeta_tau_n(gamma_ex, ctx, 0.05, 2.0)


def test_zeta_vanishes_with_linear_factor(gamma_ex):
    from scipy.optimize import brentq

    zeta = ZetaTauN(gamma_ex, build_context(gamma_ex, 1), 0.1)
    root = brentq(lambda s: zeta.linear_factor(s).real, 0.2, 0.5, xtol=1e-14)
    assert abs(zeta(root)) < 1e-10


def test_fixed_point_transport(gamma_ex):
    # the eigenfunction for eigenvalue one is also fixed by the block operator
    delta = estimate_delta(gamma_ex)
    f = fixed_vector(gamma_ex, delta)
    for tau in (0.1, 0.02):
        L = TransferFamily(gamma_ex, build_tau_block(gamma_ex, tau).words).matrix(delta)
        assert np.linalg.norm(L @ f - f) / np.linalg.norm(f) < 1e-6


def test_hs_single_word_reduction(gamma_ex):
    w = (1, 2)
    formula = hs_norm_formula(gamma_ex, [w], 0.0)
    L = TransferFamily(gamma_ex, [w], None, 24).matrix(0.0)
    assert formula == pytest.approx(np.linalg.norm(L) ** 2, rel=1e-2)
    # the same integral evaluated directly from the kernel on the diagonal
    from schottky_spectral.moebius import apply_complex

    g = gamma_of_word(gamma_ex, w[:-1])
    pts, wts = disk_quadrature(gamma_ex.disk(2), 24, 48)
    direct = sum(wt * bergman_kernel(gamma_ex.disk(1), apply_complex(g, z), apply_complex(g, z)).real
                 for z, wt in zip(pts, wts))
    assert formula == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_hs_methods_agree(gamma_ex, n):
    res = hs_norm(gamma_ex, build_context(gamma_ex, n), 0.05, 1.0 + 0.5j)
    assert res.relative_gap < 0.02


def test_hs_level_bookkeeping(gamma_ex):
    ctx1, ctx2 = build_context(gamma_ex, 1), build_context(gamma_ex, 2)
    words = build_tau_block(gamma_ex, 0.05).words

    def in_level_two(w1, w2):
        return (gamma_of_word(gamma_ex, w1) @ gamma_of_word(gamma_ex, w2).inverse()).mod(2) == (1, 0, 0, 1)

    lhs = hs_norm_formula(gamma_ex, words, 1.0, ctx2)
    rhs = ctx2.index * hs_norm_formula(gamma_ex, words, 1.0, ctx1, pair_filter=in_level_two)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_euler_product_conventions(gamma_ex):
    classes = dict(primitive_classes(gamma_ex, 12.0))
    assert (1, 2) in classes and (2, 1) not in classes
    assert classes[(1,)] == pytest.approx(translation_length(gamma_of_word(gamma_ex, (1,))))
    assert classes[(1,)] == pytest.approx(2 * math.acosh(3))
    # a class and its inverse are distinct oriented classes
    assert (3,) in classes


def test_euler_matches_determinant_far_right(gamma_ex):
    euler = selberg_zeta_euler(gamma_ex, 10.0)
    assert abs(euler.value - 1) < 1e-10 + 4 * math.exp(-10 * 2 * math.acosh(3))
    assert abs(euler.value - ClassicalDeterminant(gamma_ex)(10.0)) < 1e-8


@given(st.lists(st.integers(1, 4), min_size=2, max_size=5))
def test_mirror_words_give_inverse_matrices(letters):
    from schottky_spectral.schottky import is_reduced, load_schottky

    data = load_schottky("gamma_ex")
    if not is_reduced(letters, 2):
        return
    w = tuple(letters)
    assert gamma_of_word(data, mirror(w, 2)) @ gamma_of_word(data, w) == gamma_of_word(data, ())
