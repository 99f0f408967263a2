import itertools
import json
import warnings
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from bialg.exactnum import QuadElem
from bialg.lattice import (
    EndpointClass,
    GeodesicKind,
    Lattice,
    TauSpec,
    UndecidableFromFloats,
    geodesic_through,
    is_cm,
    isog_conj_set,
    lattice_membership,
    mobius,
    normalize_tau,
    rational_abs_witness,
)

TAU_I = TauSpec.exact_quadratic(0, 1, -1)
TAU_SQRT7 = TauSpec.exact_quadratic(Fraction(1, 2), Fraction(1, 2), -7)
CIRCLE_1 = TauSpec.geodesic(1, 1, 0, "1.9")
CIRCLE_2 = TauSpec.geodesic(2, 1, 0, "0.7")
VERTICAL = TauSpec.geodesic(0, 0, 1, "1.2599210498948732")


def _in_span(basis, v):
    (r1, r2) = basis
    # solve v = a*r1 + b*r2 over Q and ask for integrality
    for i, j in itertools.combinations(range(3), 2):
        det = r1[i] * r2[j] - r1[j] * r2[i]
        if det:
            a = Fraction(v[i] * r2[j] - v[j] * r2[i], det)
            b = Fraction(r1[i] * v[j] - r1[j] * v[i], det)
            ok = all(a * x + b * y == z for x, y, z in zip(r1, r2, v))
            return ok and a.denominator == 1 and b.denominator == 1
    raise AssertionError("dependent basis")


# normalize_tau ---------------------------------------------------------------

def test_normalize_translation():
    t, m = normalize_tau(mpmath.mpc(5, 1))
    assert abs(t - 1j) < 1e-30 and m == ((1, -5), (0, 1))


def test_normalize_inversion():
    with mp.workdps(40):
        t, m = normalize_tau(mpmath.mpc(0, "0.1"))
        assert abs(t - 10j) < mpmath.mpf(10) ** -35
    assert m == ((0, -1), (1, 0))


def test_normalize_general_point():
    with mp.workdps(50):
        tau = mpmath.mpc("0.4", "0.2")
        t, m = normalize_tau(tau)
        assert abs(mobius(m, tau) - t) < mpmath.mpf(10) ** -30
        assert abs(t.real) <= 0.5 and abs(t) >= 1
    (a, b), (c, d) = m
    assert a * d - b * c == 1


@given(st.floats(-50, 50), st.floats(1e-3, 50))
def test_normalize_lands_in_fundamental_domain(x, y):
    with mp.workdps(30):
        tau = mpmath.mpc(x, y)
        t, m = normalize_tau(tau)
        eps = mpmath.mpf(10) ** -20
        assert abs(t.real) <= 0.5 + eps and abs(t) >= 1 - eps
        assert abs(mobius(m, tau) - t) < mpmath.mpf(10) ** -15 * (1 + abs(t))
    (a, b), (c, d) = m
    assert a * d - b * c == 1


def test_normalize_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        normalize_tau(mpmath.mpc(0, -1))


# isogenies --------------------------------------------------------------------

def test_isog_tau_i():
    iso = isog_conj_set(TAU_I)
    assert iso.rank == 2
    gammas = sorted((complex(g) for g in iso.gammas), key=lambda z: (z.real, z.imag))
    # gammas span Z[i]: c*(-i) + d for the two basis rows
    assert {round(g.real) + 1j * round(g.imag) for g in gammas} == {1, -1j}


def test_isog_sqrt_minus_7():
    iso = isog_conj_set(TAU_SQRT7)
    assert iso.rank == 2
    assert iso.exact_s == 2 and iso.exact_x == Fraction(1, 2)
    for v in [(1, 0, 1), (2, 1, 0)]:
        assert _in_span(iso.basis.rows, v)


@mp.workdps(60)
def test_isog_circle_of_radius_sqrt2():
    iso = isog_conj_set(CIRCLE_2)
    assert iso.rank == 1 and iso.basis.rows == ((2, 1, 0),)
    assert iso.abs_sq == (2,)
    assert abs(iso.gammas[0] - mpmath.conj(iso.tau)) < 1e-35


@mp.workdps(60)
def test_isog_unit_circle():
    iso = isog_conj_set(CIRCLE_1)
    assert iso.rank == 1 and iso.abs_sq == (1,)
    assert abs(iso.gammas[0] - mpmath.conj(iso.tau)) < 1e-35


def test_numeric_without_certificate_is_refused():
    with pytest.raises(UndecidableFromFloats):
        isog_conj_set(TauSpec.numeric("0.37", "1.21"))
    with pytest.raises(UndecidableFromFloats):
        is_cm(TauSpec.numeric("0.37", "1.21"))


def test_numeric_certificate_must_hold():
    with pytest.raises(ValueError):
        TauSpec.numeric("0.37", "1.21", certificate=[[1, 1, 0]])


def test_non_generic_geodesic_is_refused():
    spec = TauSpec.geodesic(1, 1, 0, "1.9", generic=False)
    with pytest.raises(UndecidableFromFloats):
        isog_conj_set(spec)


@pytest.mark.parametrize("spec", [TAU_I, TAU_SQRT7, CIRCLE_1, CIRCLE_2, VERTICAL,
                                  TauSpec.exact_quadratic(Fraction(3, 7), Fraction(2, 5), -3)])
@pytest.mark.parametrize("digits", [30, 60])
def test_gamma_maps_lattice_into_conjugate(spec, digits):
    with mp.workdps(digits):
        iso = isog_conj_set(spec, digits)
        for res in iso.residuals():
            assert res < mpmath.mpf(10) ** -(digits - 10)


@pytest.mark.parametrize("spec", [TAU_I, TAU_SQRT7, CIRCLE_1, CIRCLE_2, VERTICAL])
def test_matrix_trace_zero_negative_det(spec):
    iso = isog_conj_set(spec)
    for (a, b), (c, d) in iso.matrices:
        assert a + d == 0
    for ((a, b), (c, d)), n in zip(iso.matrices, iso.abs_sq):
        det = a * d - b * c
        assert det < 0 and abs(det) == n


@given(st.integers(-10, 10), st.integers(1, 10), st.integers(1, 10), st.sampled_from([-1, -2, -3, -7, -15]))
def test_rank2_implies_cm_and_witness(p, q, den, d):
    from bialg.exactnum import is_squarefree

    if not is_squarefree(d):
        return
    spec = TauSpec.exact_quadratic(Fraction(p, den), Fraction(q, den), d)
    iso = isog_conj_set(spec, 30)
    assert iso.rank == 2
    info = is_cm(spec, 30)
    assert info.cm and info.disc < 0
    A, B, C = info.minpoly
    t = QuadElem(Fraction(p, den), Fraction(q, den), d)
    assert A * t * t + B * t + C == 0
    assert rational_abs_witness(iso) is not None


def test_rank0_has_no_geodesic():
    spec = TauSpec.numeric("0.2718281828459045", "1.5707963267948966", certificate=[])
    assert isog_conj_set(spec).rank == 0
    assert geodesic_through(spec) is None
    assert rational_abs_witness(isog_conj_set(spec)) is None


# CM ---------------------------------------------------------------------------

def test_cm_examples():
    info = is_cm(TAU_I)
    assert info.cm and info.minpoly == (1, 0, 1) and info.disc == -4
    info = is_cm(TauSpec.exact_quadratic(0, 1, -2))
    assert info.minpoly == (1, 0, 2) and info.disc == -8
    assert not is_cm(CIRCLE_1).cm


# geodesics --------------------------------------------------------------------

def test_geodesic_imaginary_axis():
    g = geodesic_through(VERTICAL)
    assert g.kind is GeodesicKind.VERTICAL and g.triple == (0, 0, 1)
    assert g.endpoints == (Fraction(0), "oo") and g.endpoint_class is EndpointClass.RATIONAL


def test_geodesic_circle_radius_sqrt2():
    g = geodesic_through(CIRCLE_2)
    assert g.kind is GeodesicKind.CIRCLE and g.center == 0 and g.radius_sq == 2
    assert g.endpoints == (QuadElem(0, -1, 2), QuadElem(0, 1, 2))
    assert g.endpoint_class is EndpointClass.CONJ_REAL_QUADRATIC


def test_geodesic_cm_point_is_vertical():
    g = geodesic_through(TAU_SQRT7)
    assert g.kind is GeodesicKind.VERTICAL and g.endpoints[0] == Fraction(1, 2)
    assert g.endpoint_class is EndpointClass.RATIONAL


def test_unit_circle_endpoints_rational():
    g = geodesic_through(CIRCLE_1)
    assert g.endpoint_class is EndpointClass.RATIONAL
    assert set(g.endpoints) == {Fraction(-1), Fraction(1)}


@mp.workdps(60)
def test_position_lies_on_geodesic():
    for spec in (CIRCLE_1, CIRCLE_2, VERTICAL, TauSpec.geodesic(5, 2, 3, "1.1")):
        b, c, d = spec.triple
        assert abs(c * spec.s() + 2 * d * spec.x() - b) < 1e-35


def test_geodesic_rejects_bad_triples():
    with pytest.raises(ValueError):
        TauSpec.geodesic(0, 0, 0, 1)
    with pytest.raises(ValueError):
        TauSpec.geodesic(-1, 1, 0, 1)  # x^2 + y^2 = -1
    with pytest.raises(ValueError):
        TauSpec.geodesic(1, 1, 0, 4)


def test_cm_looking_position_warns():
    with pytest.warns(UserWarning):
        TauSpec.geodesic(1, 1, 0, mpmath.pi / 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        TauSpec.geodesic(1, 1, 0, "1.9")


# witness ----------------------------------------------------------------------

@mp.workdps(60)
def test_witness_examples():
    w = rational_abs_witness(isog_conj_set(CIRCLE_1))
    assert w.abs == 1 and abs(w.gamma - mpmath.conj(CIRCLE_1.tau())) < 1e-30
    assert rational_abs_witness(isog_conj_set(CIRCLE_2)) is None
    w = rational_abs_witness(isog_conj_set(TAU_I))
    assert w.abs == 1 and w.gamma == 1


# membership -------------------------------------------------------------------

def test_membership_examples():
    lat = Lattice.from_tau(mpmath.mpc(0, 1))
    assert lattice_membership(3 + 2 * lat.tau, lat, 1e-20)
    assert not lattice_membership(mpmath.mpf("0.5"), lat, 1e-20)
    half = (lat.omega1 + lat.omega2) / 2
    assert not lattice_membership(half, lat, 0.24)
    with pytest.raises(ValueError):
        lattice_membership(0, lat, 0)


def test_lattice_rejects_degenerate_basis():
    with pytest.raises(ValueError):
        Lattice(mpmath.mpc(1), mpmath.mpc(2))


def test_conjugate_lattice_is_exact():
    with mp.workdps(60):
        lat = Lattice.from_tau(TAU_SQRT7.tau(60))
        bar = lat.conj()
        assert bar.distance(mpmath.conj(lat.tau)) < mpmath.mpf(10) ** -55
        assert bar.conj().distance(lat.tau) < mpmath.mpf(10) ** -55


def test_index_in():
    with mp.workdps(30):
        z = Lattice.from_tau(mpmath.mpc(0, 1))
        two = Lattice(mpmath.mpc(2), mpmath.mpc(0, 2))
        assert two.index_in(z) == 4
        assert z.index_in(two) is None


# serialization ----------------------------------------------------------------

@pytest.mark.parametrize("spec", [TAU_I, TAU_SQRT7, CIRCLE_1, CIRCLE_2,
                                  TauSpec.numeric("0.5", "0.8660254037844386", certificate=[[1, 1, 0], [1, 0, 1]])])
def test_tauspec_json_round_trip(spec):
    data = json.loads(json.dumps(spec.to_json()))
    again = TauSpec.from_json(data)
    assert again.to_json() == spec.to_json()
    assert abs(again.tau(40) - spec.tau(40)) < 1e-45


def test_tauspec_unknown_mode():
    with pytest.raises(ValueError):
        TauSpec.from_json({"mode": "polar"})
