import cmath
import math
from fractions import Fraction
from itertools import product

import pytest

from app.models.matrix_models import Mat2Z, mat_pow
from app.models.oracle_models import GridSet, TrigPoly, gaussian
from app.services.oracle_service import (
    char_correlation, grid_fourier, lattice_correlation, lattice_error_bound,
    limit_two_unipotents, rectangle_series, trig_correlation, trig_projection
)
from app.utils.errors import (
    CommutingUnipotents, NotUnipotent, ParseError, ResolutionMismatch
)
from tests.conftest import CAT, LOWER_SHEAR, SHEAR

QUARTER = GridSet.rect(0, Fraction(1, 2), 0, Fraction(1, 2), 2)


def _brute_force_correlation(functions, matrices):
    """Expande o produto termo a termo e soma os coeficientes de frequência total nula."""
    matrices = list(matrices) + [Mat2Z.identity()]
    total = gaussian(0)
    for terms in product(*(f.items() for f in functions)):
        frequency = [0, 0]
        coefficient = gaussian(1)
        for (x, c), M in zip(terms, matrices):
            image = M.transpose().apply(x)
            frequency[0] += image[0]
            frequency[1] += image[1]
            coefficient = coefficient * c
        if frequency == [0, 0]:
            total = total + coefficient
    return total


def test_char_correlation():
    assert char_correlation([(1, 0)], (-2, -1), [CAT]) == 1
    assert char_correlation([(1, 0)], (0, 0), [CAT]) == 0
    with pytest.raises(ValueError):
        char_correlation([(1, 0)], (0, 0), [CAT, CAT])


def test_trig_correlation_matches_brute_force():
    f = TrigPoly.from_terms([((1, 0), 1), ((0, 1), (0, 1)), ((-2, -1), Fraction(1, 2))])
    g = TrigPoly.from_terms([((2, 1), 3), ((-1, 0), 1), ((0, 0), 2)])
    h = TrigPoly.from_terms([((-3, -2), 1), ((1, 1), (1, -1)), ((0, 0), 1)])
    for k in range(-2, 3):
        matrices = [mat_pow(CAT, k), mat_pow(SHEAR, k)]
        assert trig_correlation([f, g, h], matrices) == _brute_force_correlation([f, g, h], matrices)


def test_trig_correlation_of_characters():
    f = TrigPoly.character((1, 0))
    g = TrigPoly.character((-2, -1))
    assert trig_correlation([f, g], [CAT]) == gaussian(1)
    assert trig_correlation([f, g], [CAT @ CAT]) == gaussian(0)
    with pytest.raises(ValueError):
        trig_correlation([f], [CAT])


def test_trig_projection():
    f = TrigPoly.character((1, 0)) + TrigPoly.character((0, 1))
    assert trig_projection(f, SHEAR) == TrigPoly.character((0, 1))
    rotation = trig_projection(TrigPoly.character((1, 0)), Mat2Z(0, -1, 1, 0))
    assert len(rotation) == 4
    assert rotation.coefficient((0, 1)) == gaussian(Fraction(1, 4))


PROJECTION_MATRICES = [CAT, SHEAR, LOWER_SHEAR, -SHEAR, Mat2Z(0, -1, 1, 0), Mat2Z(0, 1, -1, -1),
                       -Mat2Z.identity()]


def _random_trig_poly(rng):
    terms = []
    for _ in range(rng.randrange(1, 7)):
        freq = (rng.randint(-3, 3), rng.randint(-3, 3))
        value = (Fraction(rng.randint(-4, 4), rng.randint(1, 3)), rng.randint(-2, 2))
        terms.append((freq, value))
    return TrigPoly.from_terms(terms)


def test_trig_projection_is_idempotent_contraction(rng):
    for _ in range(60):
        f = _random_trig_poly(rng)
        T = rng.choice(PROJECTION_MATRICES)
        projected = trig_projection(f, T)
        assert trig_projection(projected, T) == projected
        assert projected.norm2() <= f.norm2()


def test_grid_set_basics():
    assert QUARTER.measure == Fraction(1, 4)
    assert QUARTER.boundary_counts() == (2, 2)
    assert QUARTER.negated().cells == frozenset({(1, 1)})
    assert QUARTER.intersection(QUARTER.negated()).measure == 0
    assert QUARTER.refined(4).measure == Fraction(1, 4)
    assert QUARTER.factor() == ([0], [0])
    assert GridSet(2, frozenset({(0, 0), (1, 1)})).factor() is None
    with pytest.raises(ResolutionMismatch):
        QUARTER.refined(3)
    with pytest.raises(ParseError):
        GridSet.rect(0, Fraction(1, 3), 0, 1, 2)


def test_grid_fourier_of_quarter():
    assert grid_fourier(QUARTER, (0, 0)) == pytest.approx(0.25)
    assert cmath.isclose(grid_fourier(QUARTER, (1, 0)), -1j / (2 * math.pi), abs_tol=1e-12)
    assert abs(grid_fourier(QUARTER, (2, 0))) < 1e-12


def test_lattice_identity_is_exact():
    estimate = lattice_correlation([QUARTER, QUARTER], [Mat2Z.identity()], 8)
    assert estimate.value == Fraction(1, 4)
    assert estimate.error_bound == 0


def test_lattice_counts_are_measure_preserving():
    full = GridSet.full()
    estimate = lattice_correlation([full, QUARTER], [CAT], 64)
    assert estimate.value == Fraction(1, 4)


def test_lattice_workers_agree():
    grids = [QUARTER, QUARTER, QUARTER]
    matrices = [mat_pow(LOWER_SHEAR, -3), mat_pow(CAT, -3)]
    assert lattice_correlation(grids, matrices, 256) == lattice_correlation(grids, matrices, 256, workers=3)


def test_lattice_error_bound_formula():
    matrices = [mat_pow(LOWER_SHEAR, -5), mat_pow(CAT, -5)]
    assert lattice_error_bound([QUARTER] * 3, matrices, 4096) == Fraction(252, 4096)
    assert lattice_error_bound([QUARTER] * 3, matrices, 2048) == 2 * lattice_error_bound([QUARTER] * 3, matrices, 4096)


def test_lattice_rejects_incompatible_resolution():
    with pytest.raises(ResolutionMismatch):
        lattice_correlation([QUARTER, GridSet.full(4)], [CAT], 6)
    with pytest.raises(ValueError):
        lattice_correlation([QUARTER], [CAT], 8)


def test_two_unipotent_limit_of_characters():
    f = TrigPoly.character((-1, -1))
    g = TrigPoly.character((1, 0))
    h = TrigPoly.character((0, 1))
    series = limit_two_unipotents(f, g, h, LOWER_SHEAR, SHEAR, 5)
    assert cmath.isclose(series.value, 1, abs_tol=1e-12)
    assert series.tail_bound == 0


def test_two_unipotent_limit_matches_rectangle_series():
    R = 200
    series = limit_two_unipotents(QUARTER, QUARTER, QUARTER, LOWER_SHEAR, SHEAR, R)
    reduced = rectangle_series(QUARTER, LOWER_SHEAR, SHEAR, R)
    assert abs(series.value.imag) < 1e-12
    assert abs(series.value.real - reduced) < 1e-9
    assert reduced > 1 / 64 and series.value.real > 1 / 64
    assert abs(reduced - 1 / 16) < 1e-3


def test_two_unipotent_limit_errors():
    with pytest.raises(CommutingUnipotents):
        limit_two_unipotents(QUARTER, QUARTER, QUARTER, SHEAR, Mat2Z(1, 2, 0, 1), 10)
    with pytest.raises(NotUnipotent):
        limit_two_unipotents(QUARTER, QUARTER, QUARTER, CAT, SHEAR, 10)
    with pytest.raises(ValueError):
        limit_two_unipotents(QUARTER, QUARTER, QUARTER, LOWER_SHEAR, SHEAR, 0)
