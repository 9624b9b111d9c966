from dataclasses import dataclass

from sympy import Poly, ZZ, symbols

from app.models.matrix_models import Mat2Z, MatKind, classify, mat_pow
from app.utils.errors import NonUnimodular, NotPolynomial

n = symbols('n')


def int_poly(value):
    """Converte int, lista de coeficientes [c0, c1, ...], expressão sympy ou Poly."""
    if isinstance(value, Poly):
        return Poly(value.as_expr(), n, domain=ZZ)
    if isinstance(value, (list, tuple)):
        return Poly(sum(int(c) * n ** i for i, c in enumerate(value)), n, domain=ZZ)
    return Poly(value, n, domain=ZZ)


def coefficients(poly, length=None):
    """Coeficientes do grau 0 para cima, completados com zeros até `length`."""
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    if poly.is_zero:
        coeffs = [0]
    if length is not None:
        coeffs += [0] * (length - len(coeffs))
    return coeffs


def poly_value(poly, at):
    return int(poly.eval(at))


def poly_str(poly):
    return str(poly.as_expr())


@dataclass(frozen=True)
class PolyMatFamily:
    """Família n -> [[a(n), b(n)], [c(n), d(n)]] com det identicamente 1."""
    a: Poly
    b: Poly
    c: Poly
    d: Poly

    def __post_init__(self):
        for field in ('a', 'b', 'c', 'd'):
            object.__setattr__(self, field, int_poly(getattr(self, field)))
        det = self.a * self.d - self.b * self.c
        if det != int_poly(1):
            raise NonUnimodular(f'det da família = {poly_str(det)}, esperado 1')

    @classmethod
    def constant(cls, M):
        return cls(M.a, M.b, M.c, M.d)

    @classmethod
    def from_rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def degree(self):
        return max(max(p.degree(), 0) for p in self.entries())

    def transpose(self):
        return PolyMatFamily(self.a, self.c, self.b, self.d)

    def __matmul__(self, other):
        return PolyMatFamily(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def at(self, value):
        return Mat2Z(*(poly_value(p, value) for p in self.entries()))

    def rows(self):
        return [[poly_str(self.a), poly_str(self.b)], [poly_str(self.c), poly_str(self.d)]]

    def __str__(self):
        (a, b), (c, d) = self.rows()
        return f'[[{a},{b}],[{c},{d}]]'


@dataclass(frozen=True)
class PowerFamily:
    base: Mat2Z
    exponent: Poly

    def __post_init__(self):
        if self.base.det != 1:
            raise NonUnimodular(f'det {self.base} = {self.base.det}, esperado 1')
        object.__setattr__(self, 'exponent', int_poly(self.exponent))

    def at(self, value):
        return mat_pow(self.base, poly_value(self.exponent, value))

    def __str__(self):
        return f'{self.base}^({poly_str(self.exponent)})'


@dataclass(frozen=True)
class FamilyTuple:
    families: tuple

    def __post_init__(self):
        object.__setattr__(self, 'families', tuple(self.families))
        if not self.families:
            raise ValueError('tupla de famílias vazia')

    @property
    def k(self):
        return len(self.families)

    def at(self, value):
        return [evaluate(F, value) for F in self.families]


def evaluate(F, value):
    if isinstance(F, Mat2Z):
        return mat_pow(F, value)
    return F.at(value)


def _unipotent_power(base, exponent):
    """B^a(n) como família polinomial, para B = +-U unipotente ou B = +-I."""
    cls = classify(base)
    if cls.kind is MatKind.HYPERBOLIC or (cls.kind is MatKind.FINITE_ORDER and not base.is_scalar()):
        raise NotPolynomial(f'{base} ({cls.label}) gera entradas exponenciais em n')
    sign = 1
    unipotent = base
    if base.trace < 0:
        if poly_value(exponent, 0) % 2 != poly_value(exponent, 1) % 2:
            raise NotPolynomial(f'{base}^({poly_str(exponent)}) troca de sinal com a paridade de n')
        sign = -1 if poly_value(exponent, 0) % 2 else 1
        unipotent = -base
    # U^a = I + a (U - I)
    return PolyMatFamily(
        sign * (1 + exponent * (unipotent.a - 1)),
        sign * exponent * unipotent.b,
        sign * exponent * unipotent.c,
        sign * (1 + exponent * (unipotent.d - 1)),
    )


def expand_unipotent_products(factors):
    product = PolyMatFamily.constant(Mat2Z.identity())
    for factor in factors:
        product = product @ _unipotent_power(factor.base, factor.exponent)
    return product


def family_power(F, k):
    if k < 1:
        raise ValueError('k deve ser >= 1')
    result = F
    for _ in range(k - 1):
        result = result @ F
    return result
