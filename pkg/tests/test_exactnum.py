import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bialg.exactnum import (
    FieldMismatchError,
    QuadElem,
    convergents,
    in_integer_span,
    integer_kernel,
    is_squarefree,
    lll_reduce,
    quad_sqrt,
    recognize_rational,
    squarefree_decomposition,
)

SQUAREFREE = [d for d in range(-30, 31) if d not in (0, 1) and is_squarefree(d)]
rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def quad(draw, d=None):
    d = d if d is not None else draw(st.sampled_from(SQUAREFREE))
    return QuadElem(draw(rats), draw(rats), d)


def test_conj_example():
    assert QuadElem(1, 2, -1).conj() == QuadElem(1, -2, -1)


def test_norm_example():
    assert QuadElem(Fraction(1, 2), Fraction(1, 2), -7).norm() == 2


def test_inverse_example():
    assert QuadElem(0, 1, 2).inv() == QuadElem(0, Fraction(1, 2), 2)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        QuadElem(0, 0, -3).inv()


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatchError):
        QuadElem(0, 1, 2) + QuadElem(0, 1, 3)


def test_rational_mixes_with_any_field():
    assert QuadElem(3, 0, 5) + QuadElem(1, 1, 2) == QuadElem(4, 1, 2)
    assert 2 * QuadElem(1, 1, -1) == QuadElem(2, 2, -1)


def test_non_squarefree_d_rejected():
    with pytest.raises(ValueError):
        QuadElem(1, 1, 8)


def test_is_rational():
    assert QuadElem(5, 0, -1).is_rational
    assert not QuadElem(5, 1, -1).is_rational


@given(st.data())
def test_inverse_property(data):
    u = data.draw(quad())
    assume(u)
    assert u * u.inv() == 1


@given(st.data())
def test_norm_multiplicative_and_conj_invariant(data):
    d = data.draw(st.sampled_from(SQUAREFREE))
    u, v = data.draw(quad(d)), data.draw(quad(d))
    assert (u * v).norm() == u.norm() * v.norm()
    assert u.norm() == u.conj().norm()
    assert (u * u.conj()).is_rational


@given(st.data())
def test_numeric_value_matches_arithmetic(data):
    d = data.draw(st.sampled_from(SQUAREFREE))
    u, v = data.draw(quad(d)), data.draw(quad(d))
    with mpmath.workdps(30):
        assert abs((u * v).to_mp() - u.to_mp() * v.to_mp()) < 1e-25 * (1 + abs(u.to_mp() * v.to_mp()))


@given(st.integers(min_value=-10 ** 6, max_value=10 ** 6).filter(lambda n: n != 0))
def test_squarefree_decomposition(n):
    f, m = squarefree_decomposition(n)
    assert f * f * m == n and is_squarefree(m)


def test_quad_sqrt():
    assert quad_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert quad_sqrt(-7) == QuadElem(0, 1, -7)
    assert quad_sqrt(Fraction(1, 2)) == QuadElem(0, Fraction(1, 2), 2)


# integer kernels -------------------------------------------------------------

def _brute(coeffs, bound):
    sols = []
    for v in itertools.product(range(-bound, bound + 1), repeat=len(coeffs)):
        if any(v) and sum((c * x for c, x in zip(coeffs, v)), Fraction(0)) == 0:
            sols.append(v)
    return sols


def test_kernel_tau_i():
    assert integer_kernel([-1, 1, 0]).rows == ((0, 0, 1), (1, 1, 0))


def test_kernel_tau_sqrt_minus_7():
    ker = integer_kernel([-1, 2, 1])
    assert ker.rank == 2
    # the spec basis {(2,1,0), (1,0,1)} spans the same lattice
    for v in ((2, 1, 0), (1, 0, 1)):
        assert ker.contains(v)
    for v in ker.rows:
        assert in_integer_span([(2, 1, 0), (1, 0, 1)], v)


def test_kernel_sqrt2():
    ker = integer_kernel([-1, QuadElem(0, 1, 2), 0])
    assert ker.rank == 1 and ker.rows == ((0, 0, 1),)


def test_kernel_rank_zero():
    assert integer_kernel([-1, QuadElem(0, 1, 2), QuadElem(1, 1, 2) * QuadElem(1, 1, 2)]).rank == 1
    assert integer_kernel([1, QuadElem(0, 1, 5), QuadElem(0, 1, 5) * 0 + QuadElem(1, 3, 5)]).rank == 1


def test_kernel_field_mismatch():
    with pytest.raises(FieldMismatchError):
        integer_kernel([-1, QuadElem(0, 1, 2), QuadElem(0, 1, 3)])


@given(st.integers(-10, 10), st.integers(1, 10), st.integers(1, 10), st.sampled_from([-1, -2, -3, -5, -7, -11]))
def test_kernel_brute_force_oracle_exact_tau(p, q, den, d):
    # tau = p/den + (q/den) sqrt(d): s = |tau|^2 and 2x are rational, rank 2
    tau = QuadElem(Fraction(p, den), Fraction(q, den), d)
    s, two_x = tau.norm(), tau.trace()
    ker = integer_kernel([-1, s, two_x])
    assert ker.rank == 2
    for b, c, dd in ker.rows:
        assert c * s + dd * two_x - b == 0
    # b is forced by (c, d), so brute force over entries <= 20 is a 2-d scan
    for c, dd in itertools.product(range(-20, 21), repeat=2):
        b = c * s + dd * two_x
        if b.denominator == 1 and abs(b) <= 20 and (b, c, dd) != (0, 0, 0):
            assert ker.contains((int(b), c, dd))


@given(st.sampled_from([2, 3, 5, 7]), rats, rats)
def test_kernel_brute_force_oracle_real_quadratic(d, a, b):
    assume(b != 0)
    w = QuadElem(a, b, d)
    coeffs = [Fraction(-1), w, Fraction(1)]
    ker = integer_kernel(coeffs)
    for v in _brute(coeffs, 5):
        assert ker.contains(v)
    for row in ker.rows:
        assert sum((c * x for c, x in zip(coeffs, row)), QuadElem(0, 0, d)) == 0


def test_lll_reduces_classic_example():
    red = lll_reduce([[1, 1, 1], [-1, 0, 2], [3, 5, 6]])
    assert red == [[0, 1, 0], [1, 0, 1], [-1, 0, 2]]
    assert sorted(sum(x * x for x in r) for r in red) == [1, 2, 5]


# rational recognition ------------------------------------------------------

def test_recognize_examples():
    assert recognize_rational(0.5, 100) == Fraction(1, 2)
    assert recognize_rational(0.3333333333333333, 100) == Fraction(1, 3)
    assert recognize_rational(0.7320508075688772, 100) is None


def test_recognize_rejects_bad_input():
    with pytest.raises(ValueError):
        recognize_rational(float("nan"), 10)
    with pytest.raises(ValueError):
        recognize_rational(0.5, 0)


@given(st.integers(-1000, 1000), st.integers(1, 1000), st.floats(-0.99, 0.99))
def test_recognize_perturbed(p, q, t):
    eps = t * 1e-8 / (q * q)
    with mpmath.workdps(40):
        x = mpmath.mpf(p) / q + mpmath.mpf(eps)
        assert recognize_rational(x, 1000) == Fraction(p, q)


def test_convergents_of_golden_ratio_are_fibonacci():
    with mpmath.workdps(40):
        phi = (1 + mpmath.sqrt(5)) / 2
        from bialg.exactnum import _exact_fraction

        cs = list(itertools.islice(convergents(_exact_fraction(phi)), 8))
    assert [c.denominator for c in cs] == [1, 1, 2, 3, 5, 8, 13, 21]
