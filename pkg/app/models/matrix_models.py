from dataclasses import dataclass
from enum import Enum
from math import gcd
import re

from app.utils.errors import (
    IdentityHasNoDistinguishedVector, NonUnimodular, NotUnipotent, ParseError
)


_MATRIX_RE = re.compile(
    r'^\[\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*,\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\]$'
)


@dataclass(frozen=True)
class Mat2Z:
    """Matriz 2x2 inteira [[a, b], [c, d]] (inteiros de precisão arbitrária)."""
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    @classmethod
    def parse(cls, text):
        match = _MATRIX_RE.match(text.replace('−', '-').strip())
        if match is None:
            raise ParseError(f'Matriz inválida: {text!r} (formato esperado [[a,b],[c,d]])')
        return cls(*(int(g) for g in match.groups()))

    @property
    def trace(self):
        return self.a + self.d

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def norm(self):
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def transpose(self):
        return Mat2Z(self.a, self.c, self.b, self.d)

    def inverse(self):
        if self.det != 1:
            raise NonUnimodular(f'det {self} = {self.det}, esperado 1')
        return Mat2Z(self.d, -self.b, -self.c, self.a)

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def is_identity(self):
        return self == Mat2Z.identity()

    def is_scalar(self):
        """True para I e -I."""
        return self.b == 0 and self.c == 0 and self.a == self.d and abs(self.a) == 1

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __neg__(self):
        return Mat2Z(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, other):
        return Mat2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __str__(self):
        return f'[[{self.a},{self.b}],[{self.c},{self.d}]]'


class MatKind(Enum):
    HYPERBOLIC = "Hyperbolic"
    UNIPOTENT = "Unipotent"
    FINITE_ORDER = "FiniteOrder"


@dataclass(frozen=True)
class MatClass:
    kind: MatKind
    sign: int = 1
    order: int = None

    @property
    def label(self):
        if self.kind is MatKind.FINITE_ORDER:
            return f'FiniteOrder({self.order})'
        return f"{self.kind.value}({'+' if self.sign > 0 else '-'})"

    def to_dict(self):
        return {'kind': self.kind.value, 'sign': self.sign, 'order': self.order,
                'label': self.label}


# ordem de um elemento elíptico em função do traço
_ELLIPTIC_ORDER = {0: 4, 1: 6, -1: 3}


def classify(T):
    if T.det != 1:
        raise NonUnimodular(f'det {T} = {T.det}, esperado 1')
    t = T.trace
    if abs(t) > 2:
        return MatClass(MatKind.HYPERBOLIC, sign=1 if t > 0 else -1)
    if T.is_identity():
        return MatClass(MatKind.FINITE_ORDER, order=1)
    if T == -Mat2Z.identity():
        return MatClass(MatKind.FINITE_ORDER, order=2)
    if abs(t) == 2:
        return MatClass(MatKind.UNIPOTENT, sign=1 if t > 0 else -1)
    return MatClass(MatKind.FINITE_ORDER, order=_ELLIPTIC_ORDER[t])


def mat_pow(T, k):
    if k < 0:
        T, k = T.inverse(), -k
    result = Mat2Z.identity()
    base = T
    while k:
        if k & 1:
            result = result @ base
        base = base @ base
        k >>= 1
    return result


@dataclass(frozen=True)
class ChebPair:
    alpha: int
    beta: int


def chebyshev_coeffs(t, k):
    """(alpha_k, beta_k) com T^k = alpha_k T + beta_k I para qualquer T de traço t.

    Potência da matriz companheira [[t,-1],[1,0]]^k = [[a_{k+1}, -a_k], [a_k, -a_{k-1}]].
    """
    if k < 0:
        raise ValueError('k deve ser >= 0')
    companion = mat_pow(Mat2Z(t, -1, 1, 0), k)
    return ChebPair(alpha=companion.c, beta=companion.d)


def primitive(v):
    g = gcd(*v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def positive_first(v):
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def fixed_vector(M):
    """Vetor primitivo v com Rv = v, R o representante unipotente de +-M."""
    cls = classify(M)
    if cls.kind is not MatKind.UNIPOTENT:
        if M.is_scalar():
            raise IdentityHasNoDistinguishedVector(f'{M} fixa todos os vetores')
        raise NotUnipotent(f'{M} não é unipotente ({cls.label})')
    R = M if cls.sign > 0 else -M
    # R - I tem posto 1; o núcleo é ortogonal a uma linha não nula
    rows = [(R.a - 1, R.b), (R.c, R.d - 1)]
    p, q = next(row for row in rows if row != (0, 0))
    return positive_first(primitive((q, -p)))
