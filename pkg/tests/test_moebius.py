import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from schottky_spectral.errors import InfeasibleParameters, PoleError, ValidationError
from schottky_spectral.moebius import (
    INF,
    Disk,
    Mat2,
    RInterval,
    apply_complex,
    isometric_circle,
    mobius_apply,
    mobius_derivative,
    pole,
    translation_length,
)

G1 = Mat2(3, 8, 1, 3)
G2 = Mat2(6, 35, 1, 6)
ROT = Mat2(0, -1, 1, 0)


def test_apply_examples():
    assert mobius_apply(Mat2.identity(), 2 + 1j) == 2 + 1j
    assert mobius_apply(ROT, 1j) == 1j
    assert mobius_apply(G1, INF) == 3


def test_apply_is_exact_on_rationals():
    assert mobius_apply(G1, 5) == Fraction(23, 8)
    assert isinstance(mobius_apply(G1, Fraction(1, 3)), Fraction)
    assert mobius_apply(G1, -3) is INF
    assert mobius_apply(Mat2(1, 1, 0, 1), INF) is INF


def test_derivative_examples():
    assert mobius_derivative(Mat2.identity(), 5) == 1
    assert mobius_derivative(G1, 0) == Fraction(1, 9)
    assert mobius_derivative(G2, 1) == Fraction(1, 49)


def test_derivative_matches_central_difference():
    h = 1e-6
    fd = (apply_complex(G2, 1 + h) - apply_complex(G2, 1 - h)) / (2 * h)
    assert abs(fd - 1 / 49) / (1 / 49) < 1e-8


def test_derivative_at_pole_raises():
    with pytest.raises(PoleError):
        mobius_derivative(G1, -3)


def test_isometric_circle_examples():
    assert isometric_circle(G1) == Disk(-3, 1)
    assert isometric_circle(G2) == Disk(-6, 1)
    with pytest.raises(InfeasibleParameters):
        isometric_circle(Mat2(1, 1, 0, 1))


def test_isometric_circle_maps_exterior_into_inverse_circle():
    target = isometric_circle(G1.inverse())
    for z in (Fraction(-5), Fraction(-1, 2), Fraction(10)):
        assert target.contains(mobius_apply(G1, z))


def test_translation_length_examples():
    ell = translation_length(G1)
    assert ell == pytest.approx(2 * math.acosh(3))
    assert ell == pytest.approx(3.52549, abs=1e-5)
    assert math.exp(ell / 2) + math.exp(-ell / 2) == pytest.approx(6)
    assert translation_length(G1.inverse()) == ell
    with pytest.raises(InfeasibleParameters):
        translation_length(Mat2(1, 1, 0, 1))


def test_determinant_checked():
    with pytest.raises(ValidationError):
        Mat2(1, 2, 3, 4)
    with pytest.raises(ValidationError):
        Mat2(1.0, 0.0, 0.0, 1.001)


def test_products_stay_exact():
    m = G1 @ G2
    assert m == Mat2(26, 153, 9, 53)
    assert m.integral and m.det == 1
    assert (m @ m.inverse()) == Mat2.identity()


def test_pole_and_interval_helpers():
    assert pole(G1) == -3
    assert pole(Mat2(1, 1, 0, 1)) is INF
    iv = RInterval(2, 4)
    assert iv.length == 2 and iv.contains(3) and not iv.contains(5)
    assert iv.disjoint(RInterval(4, 5)) and not iv.disjoint(RInterval(3, 5))
    with pytest.raises(ValidationError):
        RInterval(1, 1)
    with pytest.raises(ValidationError):
        Disk(0, 0)


letters = st.sampled_from([G1, G2, G1.inverse(), G2.inverse()])
words = st.lists(letters, min_size=1, max_size=6)
points = st.complex_numbers(min_magnitude=0.0, max_magnitude=2.0, allow_nan=False,
                            allow_infinity=False)


def _product(ms):
    out = Mat2.identity()
    for m in ms:
        out = out @ m
    return out


@given(words, st.fractions(min_value=-20, max_value=20, max_denominator=1000))
def test_inverse_round_trip_exact(ms, z):
    m = _product(ms)
    assert mobius_apply(m, mobius_apply(m.inverse(), z)) == z


@given(letters, points)
def test_inverse_round_trip_float(m, z):
    assert abs(apply_complex(m, apply_complex(m.inverse(), z)) - z) < 1e-12 * max(1.0, abs(z))


@given(words, st.floats(min_value=-0.9, max_value=0.9))
def test_chain_rule_along_orbit(ms, x):
    # points in (-1, 1) stay away from every pole of the generators
    z = Fraction(x).limit_denominator(10**6)
    total = mobius_derivative(_product(ms), z)
    step = Fraction(1)
    w = z
    for m in reversed(ms):
        step *= mobius_derivative(m, w)
        w = mobius_apply(m, w)
    assert total == step
    assert abs(float(total) - float(step)) <= 1e-10 * abs(float(step))


@given(st.fractions(min_value=-50, max_value=50, max_denominator=100))
def test_isometric_pairing_is_exact(x):
    for g in (G1, G2, G1.inverse(), G2.inverse()):
        own = isometric_circle(g)
        assume(abs(x - own.center) > own.radius)
        image = mobius_apply(g, x)
        target = isometric_circle(g.inverse())
        assert isinstance(image, Fraction)
        assert abs(image - target.center) < target.radius
