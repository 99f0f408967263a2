import warnings
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from bialg.classify import (
    Branch,
    NotComplexLine,
    NotLatticePoint,
    NotSublattice,
    SingletonReason,
    bialgebraic_lines,
    classify,
    complex_bialgebraic_line,
    line_from_rho,
    line_with_direction,
    pushforward_line,
    rescaled_lattice,
    rho_from_lattice_direction,
)
from bialg.lattice import Lattice, TauSpec, UndecidableFromFloats

TAU_I = TauSpec.exact_quadratic(0, 1, -1)
CIRCLE_1 = TauSpec.geodesic(1, 1, 0, "1.9")
CIRCLE_2 = TauSpec.geodesic(2, 1, 0, "0.7")
VERTICAL = TauSpec.geodesic(0, 0, 1, "1.2599210498948732")
TWO_LINE_SPECS = [CIRCLE_1, VERTICAL, TauSpec.geodesic(3, 0, 2, "0.91421356237309515"), TauSpec.geodesic(3, 1, 1, "1.3"),
                  TauSpec.geodesic(8, 1, 1, "2.2")]
EPS = mpmath.mpf(10) ** -30


def _angle_gap(a, b):
    d = abs(a - b) % mp.pi
    return min(d, mp.pi - d)


# branches ----------------------------------------------------------------------

def test_not_isogenous():
    spec = TauSpec.numeric("0.2718281828459045", "1.5707963267948966", certificate=[])
    c = classify(spec)
    assert c.branch is Branch.ONLY_SINGLETONS and c.reason is SingletonReason.NOT_ISOGENOUS
    assert not c.isogenous_to_self_conjugate


def test_irrational_abs_gamma():
    c = classify(CIRCLE_2)
    assert c.branch is Branch.ONLY_SINGLETONS and c.reason is SingletonReason.ABS_GAMMA_IRRATIONAL
    assert c.isogeny.abs_sq == (2,)


@mp.workdps(60)
def test_vertical_axis_gives_coordinate_axes():
    c = classify(VERTICAL)
    assert c.branch is Branch.TWO_LINE_FAMILY
    assert abs(c.gamma - 1) < EPS
    assert _angle_gap(c.L1.angle, 0) < EPS
    assert _angle_gap(c.L2.angle, mp.pi / 2) < EPS


def test_tau_i_is_cm():
    c = classify(TAU_I)
    assert c.branch is Branch.CM_FAMILY and c.minpoly == (1, 0, 1)
    assert c.isogenous_to_self_conjugate and c.translate_closure


def test_numeric_float_refused():
    with pytest.raises(UndecidableFromFloats):
        classify(TauSpec.numeric(0.37, 1.21))


@mp.workdps(60)
def test_unit_circle_lines():
    theta = mpmath.mpf("1.9")
    c = classify(CIRCLE_1)
    assert _angle_gap(c.L1.angle, theta / 2) < EPS
    assert _angle_gap(c.L2.angle, theta / 2 + mp.pi / 2) < EPS


# bialgebraic_lines ---------------------------------------------------------------

@mp.workdps(50)
def test_cm_lines_tau_i_bound_1():
    lines = bialgebraic_lines(TAU_I, height_bound=1)
    assert len(lines) == 4
    got = sorted(float(line.angle) for line in lines)
    want = sorted(float(a) for a in (0, mp.pi / 2, mp.pi / 4, 3 * mp.pi / 4))
    assert got == pytest.approx(want, abs=1e-25)


def test_singleton_lines_warn():
    with pytest.warns(UserWarning):
        assert bialgebraic_lines(CIRCLE_2) == []


def test_two_line_family_returns_pair():
    c = classify(VERTICAL)
    assert bialgebraic_lines(VERTICAL, classification=c) == [c.L1, c.L2]


@pytest.mark.parametrize("spec", [TAU_I, TauSpec.exact_quadratic(Fraction(1, 2), Fraction(1, 2), -7)])
@mp.workdps(50)
def test_cm_lines_contain_lattice_points(spec):
    bound = 4
    lat = Lattice.from_spec(spec, 50)
    for line in bialgebraic_lines(spec, height_bound=bound):
        hit = any(lat.distance(N / line.rho) < 1e-30 * N for N in range(1, 4 * bound * bound + 1)) or \
            lat.distance(line.direction * abs(line.lattice_direction[0] + line.lattice_direction[1] * lat.tau)) < 1e-30
        assert hit


@mp.workdps(50)
def test_cm_lines_are_distinct():
    lines = bialgebraic_lines(TAU_I, height_bound=3)
    angles = [line.angle for line in lines]
    for i in range(len(angles)):
        for j in range(i):
            assert _angle_gap(angles[i], angles[j]) > 1e-6


# line constructors ------------------------------------------------------------------

@mp.workdps(40)
def test_line_from_rho_examples():
    x = line_from_rho(1)
    assert abs(x.r - 1) < EPS and _angle_gap(x.angle, 0) < EPS
    y = line_from_rho(1j)
    assert abs(y.r + 1) < EPS and _angle_gap(y.angle, mp.pi / 2) < EPS


@mp.workdps(40)
def test_rho_from_lattice_direction_example():
    line = rho_from_lattice_direction(1, 1, TAU_I)
    assert abs(line.r + 1j) < EPS
    assert _angle_gap(line.angle, mp.pi / 4) < EPS
    with pytest.raises(ValueError):
        rho_from_lattice_direction(0, 0, TAU_I)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-5, 5), st.floats(-5, 5))
def test_slope_relation_holds_on_any_line(a, b, ox, oy):
    if abs(a) + abs(b) < 1e-3:
        return
    with mp.workdps(30):
        line = line_with_direction(mpmath.mpc(a, b), (ox, oy))
        assert abs(abs(line.r) - 1) < 1e-25
        assert line.satisfies_slope_relation()


def test_zero_rho_rejected():
    with pytest.raises(ValueError):
        line_from_rho(0)


# invariants -------------------------------------------------------------------------

@given(st.floats(-100, 100), st.floats(-100, 100))
def test_translate_closure(c1, c2):
    for spec in (VERTICAL, TAU_I):
        cls = classify(spec)
        for line in bialgebraic_lines(spec, height_bound=2, classification=cls):
            assert cls.contains_line(line.translate(c1, c2))


@pytest.mark.parametrize("spec", TWO_LINE_SPECS)
@mp.workdps(60)
def test_pair_independent_of_sqrt_sign(spec):
    c = classify(spec)
    for root in (c.sqrt_gamma, -c.sqrt_gamma):
        pair = (line_from_rho(root).angle, line_from_rho(-1j * root).angle)
        ref = (c.L1.angle, c.L2.angle)
        assert {round(float(a), 25) for a in pair} == {round(float(a), 25) for a in ref}


@pytest.mark.parametrize("spec", TWO_LINE_SPECS)
@mp.workdps(60)
def test_r_of_l1_is_unit_gamma(spec):
    c = classify(spec)
    u = c.gamma / abs(c.gamma)
    assert min(abs(c.L1.r - u), abs(c.L1.r + u)) < EPS
    assert min(abs(c.L2.r - u), abs(c.L2.r + u)) < EPS


@pytest.mark.parametrize("spec", TWO_LINE_SPECS)
@mp.workdps(60)
def test_rescaling_sends_lines_to_axes(spec):
    c = classify(spec)
    lat = rescaled_lattice(c)
    # M = sqrt(gamma) * L satisfies |gamma| M inside conj(M), so M is commensurable with its conjugate
    k = abs(c.gamma)
    assert lat.scaled(k).index_in(lat.conj(), tol=1e-25) == round(float(k)) ** 2
    for line, target in ((c.L1, 0), (c.L2, mp.pi / 2)):
        image = line.direction * c.sqrt_gamma
        assert _angle_gap(mpmath.arg(image), target) < EPS


def test_contains_line_rejects_generic_direction():
    c = classify(VERTICAL)
    assert not c.contains_line(line_with_direction(mpmath.mpc(1, 1)))
    cm = classify(TAU_I)
    with mp.workdps(40):
        assert not cm.contains_line(line_with_direction(mpmath.mpc(1, mpmath.sqrt(2))))
        assert cm.contains_line(line_with_direction(mpmath.mpc(3, -7)))


# complex lines ----------------------------------------------------------------------

def test_complex_diagonal_and_antidiagonal():
    lat = Lattice.from_tau(1j)
    d = complex_bialgebraic_line((1, 1), (1j, 1j), (0, 0), lat)
    assert abs(d.r - 1) < 1e-10 and abs(d.t + 1j) < 1e-10
    a = complex_bialgebraic_line((-1, 1), (-1j, 1j), (0, 0), lat)
    assert abs(a.r + 1) < 1e-10


def test_complex_line_errors():
    lat = Lattice.from_tau(1j)
    with pytest.raises(NotComplexLine):
        complex_bialgebraic_line((1, 1), (2, 2), (0, 0), lat)
    with pytest.raises(NotLatticePoint):
        complex_bialgebraic_line((0.5, 1), (0.5j, 1j), (0, 0), lat)
    with pytest.raises(NotComplexLine):
        complex_bialgebraic_line((1, 1), (1j, -1j), (0, 0), lat)


# push-forward ----------------------------------------------------------------------

@mp.workdps(40)
def test_pushforward_examples():
    z = Lattice.from_tau(1j)
    two = Lattice(mpmath.mpc(2), mpmath.mpc(0, 2))
    x_axis = line_from_rho(1)
    line, idx = pushforward_line(x_axis, two, z)
    assert line == x_axis and idx == 4
    with pytest.raises(NotSublattice):
        pushforward_line(x_axis, z, two)


@mp.workdps(40)
def test_pushforward_from_intersection_with_conjugate():
    # tau = 1/3 + i: L cap conj(L) = <1, 3 tau>, index 3 in L
    tau = mpmath.mpf(1) / 3 + 1j
    lat = Lattice.from_tau(tau)
    sub = Lattice(mpmath.mpc(1), 3 * tau)
    assert lat.conj().index_in(sub) is None  # sub is not a basis of conj(L)
    for k in range(-3, 4):
        assert lat.conj().distance(k + 3 * tau) < 1e-30
    line, idx = pushforward_line(line_from_rho(1), sub, lat)
    assert idx == 3 and _angle_gap(line.angle, 0) < EPS


def test_classification_json_shape():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        data = classify(CIRCLE_1).to_json()
    assert data["branch"] == "TWO_LINE_FAMILY" and len(data["lines"]) == 2
    assert data["geodesic"]["kind"] == "circle"
    assert classify(TAU_I).to_json()["minpoly"] == [1, 0, 1]
