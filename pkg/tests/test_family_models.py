import pytest

from app.models.family_models import (
    PolyMatFamily, PowerFamily, evaluate, expand_unipotent_products, family_power,
    int_poly, n
)
from app.models.matrix_models import Mat2Z, mat_pow
from app.utils.errors import NonUnimodular, NotPolynomial, ParseError
from app.utils.parsing import parse_family, parse_grid, parse_poly, parse_range
from tests.conftest import CAT, LOWER_SHEAR, SHEAR


def test_family_requires_unit_determinant():
    with pytest.raises(NonUnimodular):
        PolyMatFamily(n, 1, 1, 1)


def test_family_evaluation():
    F = PolyMatFamily(n, n - 1, 1, 1)
    assert evaluate(F, 4) == Mat2Z(4, 3, 1, 1)
    assert F.degree == 1
    assert str(F) == '[[n,n - 1],[1,1]]'


def test_power_family_and_plain_matrix_evaluation():
    assert evaluate(PowerFamily(CAT, n ** 2), 3) == mat_pow(CAT, 9)
    assert evaluate(CAT, 4) == mat_pow(CAT, 4)


def test_expand_noncommuting_shears():
    F = expand_unipotent_products([PowerFamily(SHEAR, -n), PowerFamily(LOWER_SHEAR, n)])
    assert F == PolyMatFamily(1 - n ** 2, -n, n, 1)
    for value in (1, 2, 3, 7):
        assert F.at(value) == mat_pow(SHEAR, -value) @ mat_pow(LOWER_SHEAR, value)


def test_expand_negative_unipotent_with_constant_parity():
    F = expand_unipotent_products([PowerFamily(-SHEAR, 2 * n)])
    assert F == PolyMatFamily(1, 2 * n, 0, 1)
    G = expand_unipotent_products([PowerFamily(-Mat2Z.identity(), 2 * n + 1)])
    assert G == PolyMatFamily.constant(-Mat2Z.identity())
    for value in range(1, 6):
        assert F.at(value) == mat_pow(-SHEAR, 2 * value)


@pytest.mark.parametrize('base, exponent', [
    (CAT, n),
    (Mat2Z(0, -1, 1, 0), n),
    (-SHEAR, n),
])
def test_expand_rejects_non_polynomial_factors(base, exponent):
    with pytest.raises(NotPolynomial):
        expand_unipotent_products([PowerFamily(base, exponent)])


def test_family_power_square():
    F = PolyMatFamily(n, n ** 2 - 1, 1, n)
    F2 = family_power(F, 2)
    assert F2 == PolyMatFamily(2 * n ** 2 - 1, 2 * n * (n ** 2 - 1), 2 * n, 2 * n ** 2 - 1)
    assert F2.at(2) == mat_pow(F.at(2), 2)
    with pytest.raises(ValueError):
        family_power(F, 0)


@pytest.mark.parametrize('F', [
    PolyMatFamily(n, n ** 2 - 1, 1, n),
    PolyMatFamily(n ** 2, n ** 3 - 1, 1, n),
    expand_unipotent_products([PowerFamily(SHEAR, -n), PowerFamily(LOWER_SHEAR, n ** 2)]),
])
def test_family_power_matches_pointwise_matrix_power(F):
    for k in range(1, 5):
        power = family_power(F, k)
        for value in range(-5, 6):
            M = evaluate(power, value)
            assert M.det == 1
            assert M == mat_pow(evaluate(F, value), k)
            assert M == power.at(value)


def test_parse_poly_syntaxes():
    assert parse_poly('n^2 - 1') == int_poly(n ** 2 - 1)
    assert parse_poly('[-1, 0, 1]') == int_poly(n ** 2 - 1)
    assert parse_poly('2*n + 3') == int_poly([3, 2])
    for bad in ('n/2', 'sqrt(n)', 'x + 1', '[1.5, 2]', ''):
        with pytest.raises(ParseError):
            parse_poly(bad)


def test_parse_family_syntaxes():
    expected = PolyMatFamily(n, n ** 2 - 1, 1, n)
    assert parse_family('[[n, n^2-1], [1, n]]') == expected
    assert parse_family('[[[0,1], [-1,0,1]], [[1], [0,1]]]') == expected
    with pytest.raises(ParseError):
        parse_family('[[n,1],[1]]')
    with pytest.raises(NonUnimodular):
        parse_family('[[[1], [0]], [[0], [2]]]')
    with pytest.raises(NonUnimodular):
        parse_family('[[n, 1], [1, 1]]')
    with pytest.raises(ParseError):
        parse_family(5)


def test_parse_range_and_grid():
    assert list(parse_range('1..6')) == [1, 2, 3, 4, 5, 6]
    with pytest.raises(ParseError):
        parse_range('6..1')
    assert parse_grid('0 1/2 0 1/2 @ 2') == parse_grid('rect 0 1/2 0 1/2 @ 2')
    assert parse_grid('{"q": 2, "cells": [[0, 0]]}').measure == parse_grid('rect 0 1/2 0 1/2 @ 2').measure
    with pytest.raises(ParseError):
        parse_grid('rect 0 1/3 0 1 @ 2')
