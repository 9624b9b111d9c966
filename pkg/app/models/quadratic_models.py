from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from sympy import factorint

from app.models.matrix_models import MatKind, classify
from app.utils.errors import NotHyperbolic


def square_free_part(n):
    if n <= 0:
        raise ValueError('n deve ser positivo')
    part = 1
    for prime, exponent in factorint(n).items():
        if exponent % 2:
            part *= prime
    return part


@dataclass(frozen=True)
class QuadVal:
    """Elemento p + q*sqrt(d) de Q(sqrt(d)), p e q racionais, d livre de quadrados."""
    p: Fraction
    q: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'p', Fraction(self.p))
        object.__setattr__(self, 'q', Fraction(self.q))
        if self.d == 1 and self.q:
            # caso racional: sqrt(1) = 1
            object.__setattr__(self, 'p', self.p + self.q)
            object.__setattr__(self, 'q', Fraction(0))

    @classmethod
    def rational(cls, value, d):
        return cls(Fraction(value), Fraction(0), d)

    def _coerce(self, other):
        if isinstance(other, QuadVal):
            if other.d != self.d and other.q and self.q:
                raise ValueError(f'corpos diferentes: d={self.d} e d={other.d}')
            return other
        return QuadVal(Fraction(other), Fraction(0), self.d)

    def _field(self, other):
        return self.d if self.q or other.d == 1 else other.d

    def __add__(self, other):
        other = self._coerce(other)
        return QuadVal(self.p + other.p, self.q + other.q, self._field(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadVal(-self.p, -self.q, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        d = self._field(other)
        return QuadVal(self.p * other.p + d * self.q * other.q,
                       self.p * other.q + self.q * other.p, d)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadVal(self.p, -self.q, self.d)

    def norm(self):
        return self.p * self.p - self.d * self.q * self.q

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError('inverso de zero em Q(sqrt(d))')
        return QuadVal(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** -k
        result = QuadVal(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self):
        return self.p == 0 and self.q == 0

    def sign(self):
        """Sinal exato de p + q*sqrt(d) (sem ponto flutuante)."""
        sp = (self.p > 0) - (self.p < 0)
        sq = (self.q > 0) - (self.q < 0)
        if sq == 0 or sp == sq:
            return sp or sq
        if sp == 0:
            return sq
        return sp if self.p * self.p > self.d * self.q * self.q else sq

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.p) + float(self.q) * self.d ** 0.5

    def __str__(self):
        if not self.q:
            return str(self.p)
        return f'{self.p} + {self.q}*sqrt({self.d})'


@dataclass(frozen=True)
class QuadMat:
    a: QuadVal
    b: QuadVal
    c: QuadVal
    d: QuadVal

    @classmethod
    def from_int(cls, M, d):
        return cls(*(QuadVal.rational(x, d) for x in (M.a, M.b, M.c, M.d)))

    @classmethod
    def identity(cls, d):
        one, zero = QuadVal.rational(1, d), QuadVal.rational(0, d)
        return cls(one, zero, zero, one)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other):
        return QuadMat(*(x + y for x, y in zip(self.entries(), other.entries())))

    def __sub__(self, other):
        return QuadMat(*(x - y for x, y in zip(self.entries(), other.entries())))

    def scale(self, s):
        return QuadMat(*(s * x for x in self.entries()))

    def __matmul__(self, other):
        return QuadMat(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def conjugate(self):
        return QuadMat(*(x.conjugate() for x in self.entries()))

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def is_zero(self):
        return all(x.is_zero() for x in self.entries())


@dataclass(frozen=True)
class EigenData:
    matrix: object
    d: int
    lam: QuadVal
    lam_inv: QuadVal
    p_plus: QuadMat
    p_minus: QuadMat

    def reconstruct(self):
        return self.p_plus.scale(self.lam) + self.p_minus.scale(self.lam_inv)


def eigen_data(M):
    cls = classify(M)
    if cls.kind is not MatKind.HYPERBOLIC:
        raise NotHyperbolic(f'{M} não é hiperbólica ({cls.label})')
    t = M.trace
    disc = t * t - 4
    d = square_free_part(disc)
    assert d != 1, 't^2 - 4 nunca é quadrado perfeito para |t| > 2'
    k = isqrt(disc // d)
    sign = 1 if t > 0 else -1
    lam = QuadVal(Fraction(t, 2), Fraction(sign * k, 2), d)
    lam_inv = lam.conjugate()
    identity = QuadMat.identity(d)
    p_plus = (QuadMat.from_int(M, d) - identity.scale(lam_inv)).scale((lam - lam_inv).inverse())
    p_minus = identity - p_plus
    return EigenData(matrix=M, d=d, lam=lam, lam_inv=lam_inv, p_plus=p_plus, p_minus=p_minus)
