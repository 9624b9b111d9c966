from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np
from sympy import QQ, QQ_I

from app.utils.errors import ParseError, ResolutionMismatch


def _rational(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def gaussian(value):
    """Coeficiente complexo exato (partes real e imaginária racionais) em QQ_I."""
    if QQ_I.of_type(value):
        return value
    if isinstance(value, tuple):
        re, im = value
        return QQ_I(_rational(re), _rational(im))
    return QQ_I(_rational(value), QQ(0))


def gaussian_parts(c):
    return (Fraction(int(c.x.numerator), int(c.x.denominator)),
            Fraction(int(c.y.numerator), int(c.y.denominator)))


def gaussian_complex(c):
    re, im = gaussian_parts(c)
    return complex(float(re), float(im))


def gaussian_abs2(c):
    re, im = gaussian_parts(c)
    return re * re + im * im


def is_zero(c):
    return c == gaussian(0)


def gaussian_str(c):
    re, im = gaussian_parts(c)
    if not im:
        return str(re)
    return f'{re}{"+" if im > 0 else "-"}{abs(im)}i'


class TrigPoly:
    """Polinômio trigonométrico f = sum f^(x) chi_x com suporte finito."""

    def __init__(self, coeffs=None):
        self._coeffs = {}
        for freq, value in (coeffs or {}).items():
            self._accumulate(freq, gaussian(value))

    def _accumulate(self, freq, c):
        freq = (int(freq[0]), int(freq[1]))
        total = self._coeffs.get(freq, gaussian(0)) + c
        if is_zero(total):
            self._coeffs.pop(freq, None)
        else:
            self._coeffs[freq] = total

    @classmethod
    def from_terms(cls, terms):
        poly = cls()
        for freq, value in terms:
            poly._accumulate(freq, gaussian(value))
        return poly

    @classmethod
    def character(cls, x, value=1):
        return cls({tuple(x): value})

    @classmethod
    def constant(cls, value):
        return cls({(0, 0): value})

    def coefficient(self, x):
        return self._coeffs.get(tuple(x), gaussian(0))

    def items(self):
        return sorted(self._coeffs.items())

    def support(self):
        return sorted(self._coeffs)

    def mean(self):
        return self.coefficient((0, 0))

    def conjugate(self):
        return TrigPoly({(-x1, -x2): QQ_I(c.x, -c.y) for (x1, x2), c in self._coeffs.items()})

    def norm2(self):
        return sum((gaussian_abs2(c) for c in self._coeffs.values()), Fraction(0))

    def radius(self):
        return max((max(abs(x1), abs(x2)) for x1, x2 in self._coeffs), default=0)

    def __add__(self, other):
        return TrigPoly.from_terms(self.items() + other.items())

    def __len__(self):
        return len(self._coeffs)

    def __eq__(self, other):
        return isinstance(other, TrigPoly) and self._coeffs == other._coeffs

    def to_dict(self):
        return {f'{x1},{x2}': gaussian_str(c) for (x1, x2), c in self.items()}


@dataclass(frozen=True)
class GridSet:
    """União de células [i/q, (i+1)/q) x [j/q, (j+1)/q) do toro; i indexa a primeira coordenada."""
    q: int
    cells: frozenset

    def __post_init__(self):
        if self.q < 1:
            raise ValueError('q deve ser >= 1')
        cells = frozenset((int(i), int(j)) for i, j in self.cells)
        for i, j in cells:
            if not (0 <= i < self.q and 0 <= j < self.q):
                raise ValueError(f'célula ({i},{j}) fora de [0,{self.q})')
        object.__setattr__(self, 'cells', cells)

    @classmethod
    def rect(cls, x0, x1, y0, y1, q):
        bounds = [Fraction(v) * q for v in (x0, x1, y0, y1)]
        if any(b.denominator != 1 for b in bounds):
            raise ParseError(f'retângulo não alinhado à grade 1/{q}')
        i0, i1, j0, j1 = (int(b) for b in bounds)
        if not (0 <= i0 <= i1 <= q and 0 <= j0 <= j1 <= q):
            raise ParseError('retângulo fora de [0,1]^2')
        return cls(q, frozenset((i, j) for i in range(i0, i1) for j in range(j0, j1)))

    @classmethod
    def full(cls, q=1):
        return cls.rect(0, 1, 0, 1, q)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(int(data['q']), frozenset(tuple(cell) for cell in data['cells']))
        except (KeyError, TypeError) as e:
            raise ParseError(f'GridSet inválido: {e}') from e

    def to_dict(self):
        return {'q': self.q, 'cells': [list(cell) for cell in sorted(self.cells)]}

    @property
    def measure(self):
        return Fraction(len(self.cells), self.q * self.q)

    def table(self):
        tab = np.zeros((self.q, self.q), dtype=bool)
        for i, j in self.cells:
            tab[i, j] = True
        return tab

    def boundary_counts(self):
        """(H, V): arestas horizontais e verticais da fronteira (comprimento 1/q cada)."""
        tab = self.table()
        horizontal = int(np.count_nonzero(tab != np.roll(tab, -1, axis=1)))
        vertical = int(np.count_nonzero(tab != np.roll(tab, -1, axis=0)))
        return horizontal, vertical

    def column_counts(self):
        return self.table().sum(axis=1)

    def row_counts(self):
        return self.table().sum(axis=0)

    def refined(self, Q):
        if Q % self.q:
            raise ResolutionMismatch(f'{Q} não é múltiplo de q={self.q}')
        r = Q // self.q
        return GridSet(Q, frozenset(
            (i * r + di, j * r + dj) for i, j in self.cells for di in range(r) for dj in range(r)
        ))

    def negated(self):
        q = self.q
        return GridSet(q, frozenset(((-i - 1) % q, (-j - 1) % q) for i, j in self.cells))

    def intersection(self, other):
        q = lcm(self.q, other.q)
        return GridSet(q, self.refined(q).cells & other.refined(q).cells)

    def factor(self):
        """(colunas, linhas) se o conjunto é um produto D1 x D2, senão None."""
        columns = sorted({i for i, _ in self.cells})
        rows = sorted({j for _, j in self.cells})
        if len(self.cells) != len(columns) * len(rows):
            return None
        return columns, rows
