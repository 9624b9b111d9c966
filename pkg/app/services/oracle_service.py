"""Oráculo de correlações: caracteres, polinômios trigonométricos e conjuntos de grade.

Cota de erro de `lattice_correlation` (pontos p em (1/Q)Z^2, amostrados no canto
inferior esquerdo de cada quadrado de lado 1/Q):

    erro <= (1/Q) * sum_{i: M_i != I} (stretch_i + 3 L_i)

com stretch_i = (H_i (|c_i| + |d_i|) + V_i (|a_i| + |b_i|)) / q_i o comprimento L1
da pré-imagem por M_i da fronteira de G_i, H_i e V_i as contagens de arestas
horizontais e verticais de G_i, L_i = (H_i + V_i) / q_i e M_i = [[a_i, b_i], [c_i, d_i]].
G_0 não é transportado e é exato na grade; matrizes identidade não contribuem.
"""
import logging
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from app.models.matrix_models import Mat2Z, MatKind, classify, fixed_vector
from app.models.oracle_models import (
    GridSet, TrigPoly, gaussian, gaussian_abs2, gaussian_complex
)
from app.utils.errors import CommutingUnipotents, NotUnipotent, ResolutionMismatch

logger = logging.getLogger(__name__)

Estimate = namedtuple('Estimate', ['value', 'error_bound'])
SeriesValue = namedtuple('SeriesValue', ['value', 'tail_bound'])

# órbitas finitas de tT em SL(2,Z) têm tamanho 1, 2, 3, 4 ou 6
_ORBIT_LIMIT = 12


def _transport(M, x):
    return M.transpose().apply(x)


def char_correlation(xs, y, matrices):
    if len(xs) != len(matrices):
        raise ValueError('xs e matrizes com tamanhos diferentes')
    total = list(y)
    for x, M in zip(xs, matrices):
        image = _transport(M, x)
        total[0] += image[0]
        total[1] += image[1]
    return 1 if total == [0, 0] else 0


def _partial_sums(functions, matrices):
    table = {(0, 0): gaussian(1)}
    for f, M in zip(functions, matrices):
        nxt = {}
        for s, c in table.items():
            for x, coef in f.items():
                image = _transport(M, x)
                key = (s[0] + image[0], s[1] + image[1])
                nxt[key] = nxt.get(key, gaussian(0)) + c * coef
        table = nxt
    return table


def trig_correlation(functions, matrices):
    """Integral de f_1(M_1 xi) ... f_k(M_k xi) f_{k+1}(xi), exata em QQ_I.

    Os termos são divididos em duas metades; as somas parciais de cada metade
    ficam numa tabela e o resultado casa s com -s.
    """
    functions = list(functions)
    matrices = list(matrices) + [Mat2Z.identity()]
    if len(functions) != len(matrices):
        raise ValueError('são necessárias k+1 funções para k matrizes')
    half = (len(functions) + 1) // 2
    left = _partial_sums(functions[:half], matrices[:half])
    right = _partial_sums(functions[half:], matrices[half:])
    total = gaussian(0)
    for s, c in left.items():
        other = right.get((-s[0], -s[1]))
        if other is not None:
            total = total + c * other
    return total


def _orbit(M, x):
    orbit = [x]
    current = _transport(M, x)
    while current != x:
        if len(orbit) >= _ORBIT_LIMIT:
            return None
        orbit.append(current)
        current = _transport(M, current)
    return orbit


def trig_projection(f, T):
    """Projeção nas funções T-invariantes: média de f^ sobre cada órbita finita de tT."""
    classify(T)
    projected = {}
    for x, _ in f.items():
        if x in projected:
            continue
        orbit = _orbit(T, x)
        if orbit is None:
            continue
        average = gaussian(0)
        for z in orbit:
            average = average + f.coefficient(z)
        average = average * gaussian(Fraction(1, len(orbit)))
        for z in orbit:
            projected[z] = average
    return TrigPoly(projected)


# --- coeficientes de Fourier de conjuntos de grade ---------------------------

def _interval_coefficients(q, ks):
    """Matriz (len(ks), q): integral de e^{-2 pi i k s} sobre [i/q, (i+1)/q)."""
    ks = np.asarray(ks, dtype=np.int64).reshape(-1, 1)
    cells = np.arange(q, dtype=np.int64).reshape(1, -1)
    # fases reduzidas mod q antes de passar para ponto flutuante
    start = np.exp(-2j * np.pi * ((ks * cells) % q) / q)
    end = np.exp(-2j * np.pi * ((ks * (cells + 1)) % q) / q)
    safe = np.where(ks == 0, 1, ks)
    out = (start - end) / (2j * np.pi * safe)
    return np.where(ks == 0, 1.0 / q, out)


def _weighted_fourier(weights, xs):
    q = weights.shape[0]
    xs = np.asarray(xs, dtype=np.int64).reshape(-1, 2)
    e1 = _interval_coefficients(q, xs[:, 0])
    e2 = _interval_coefficients(q, xs[:, 1])
    return np.einsum('ni,ij,nj->n', e1, weights, e2)


def grid_fourier_many(G, xs):
    return _weighted_fourier(G.table().astype(float), [tuple(x) for x in xs])


def grid_fourier(G, x):
    return complex(grid_fourier_many(G, [x])[0])


# --- estimativa em rede -------------------------------------------------------

def lattice_error_bound(grids, matrices, Q):
    total = Fraction(0)
    for G, M in zip(grids[1:], matrices):
        if M.is_identity():
            continue
        horizontal, vertical = G.boundary_counts()
        stretch = Fraction(horizontal * (abs(M.c) + abs(M.d)) + vertical * (abs(M.a) + abs(M.b)), G.q)
        length = Fraction(horizontal + vertical, G.q)
        total += stretch + 3 * length
    return total / Q


def _count_rows(rows, Q, tables, reduced):
    u = np.repeat(rows, Q).astype(np.int64)
    w = np.tile(np.arange(Q, dtype=np.int64), len(rows))
    base_q, base_table = tables[0]
    inside = base_table[u * base_q // Q, w * base_q // Q]
    for (q, table), (a, b, c, d) in zip(tables[1:], reduced):
        s1 = (a * u + b * w) % Q
        s2 = (c * u + d * w) % Q
        inside &= table[s1 * q // Q, s2 * q // Q]
    return int(np.count_nonzero(inside))


def lattice_correlation(grids, matrices, Q, workers=1):
    """(1/Q^2) #{p em G_0 : M_i p em G_i para todo i}, com a cota do módulo."""
    grids, matrices = list(grids), list(matrices)
    if len(grids) != len(matrices) + 1:
        raise ValueError('são necessários k+1 conjuntos para k matrizes')
    for G in grids:
        if Q % G.q:
            raise ResolutionMismatch(f'Q={Q} não é múltiplo de q={G.q}')
    tables = [(G.q, G.table()) for G in grids]
    reduced = [tuple(x % Q for x in (M.a, M.b, M.c, M.d)) for M in matrices]
    chunk = max(1, (1 << 20) // Q)
    batches = [np.arange(start, min(start + chunk, Q), dtype=np.int64) for start in range(0, Q, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda rows: _count_rows(rows, Q, tables, reduced), batches))
    else:
        counts = [_count_rows(rows, Q, tables, reduced) for rows in batches]
    count = sum(counts)
    logger.debug('rede Q=%d: %d pontos em %d lotes', Q, count, len(batches))
    return Estimate(Fraction(count, Q * Q), lattice_error_bound(grids, matrices, Q))


# --- limite para dois unipotentes ------------------------------------------------

def _norm(f):
    if isinstance(f, GridSet):
        return math.sqrt(f.measure)
    return math.sqrt(f.norm2())


def _line_coefficients(f, v, indices):
    points = [(i * v[0], i * v[1]) for i in indices]
    if isinstance(f, GridSet):
        return grid_fourier_many(f, points)
    return np.array([gaussian_complex(f.coefficient(p)) for p in points])


def _line_tail(f, v, R):
    """(sum_{|i|>R} |f^(iv)|^2)^(1/2)."""
    if isinstance(f, GridSet):
        # |f^(x)| <= N / (q pi |i|) sobre a reta x = iv
        return len(f.cells) / (f.q * math.pi) * math.sqrt(2.0 / R)
    total = Fraction(0)
    for x, c in f.items():
        i = _line_index(x, v)
        if i is not None and abs(i) > R:
            total += gaussian_abs2(c)
    return math.sqrt(total)


def _line_index(x, v):
    if v[0]:
        i, r = divmod(x[0], v[0])
        return i if r == 0 and i * v[1] == x[1] else None
    i, r = divmod(x[1], v[1])
    return i if r == 0 and x[0] == 0 else None


def _projected_weights(g, axis, q):
    """Pesos de P g (média na coordenada complementar ao eixo fixo), na grade q."""
    table = g.refined(q).table().astype(float)
    if axis == 0:
        marginal = table.mean(axis=1, keepdims=True)
    else:
        marginal = table.mean(axis=0, keepdims=True)
    return np.broadcast_to(marginal, table.shape)


def _axis(v):
    if v == (1, 0):
        return 0
    if v == (0, 1):
        return 1
    return None


def _check_unipotent_pair(T, S):
    for M in (T, S):
        cls = classify(M)
        if cls.kind is not MatKind.UNIPOTENT or cls.sign < 0:
            raise NotUnipotent(f'{M} não é unipotente de traço 2')
    if T @ S == S @ T:
        raise CommutingUnipotents(f'{T} e {S} comutam')


def _inner_exact(f, g, v, w, h, R):
    """Soma em i fechada: sum_i f^(-iv - c) g^(iv) = (f . P g)^(-c)."""
    q = math.lcm(f.q, g.q)
    weights = f.refined(q).table().astype(float) * _projected_weights(g, _axis(v), q)
    js = np.arange(-R, R + 1)
    outer = _weighted_fourier(weights, [(-j * w[0], -j * w[1]) for j in js])
    value = complex(np.sum(outer * _line_coefficients(h, w, js)))
    weight_norm = math.sqrt(float(np.sum(weights * weights))) / q
    return SeriesValue(value, weight_norm * _line_tail(h, w, R))


def limit_two_unipotents(f, g, h, T, S, R):
    """Limite de integral f(xi) g(T^n xi) h(S^n xi): sum_{i,j} f^(-iv-jw) g^(iv) h^(jw)."""
    if R < 1:
        raise ValueError('R deve ser >= 1')
    _check_unipotent_pair(T, S)
    v, w = fixed_vector(T.transpose()), fixed_vector(S.transpose())
    grids = all(isinstance(u, GridSet) for u in (f, g, h))
    if grids and _axis(v) is not None:
        return _inner_exact(f, g, v, w, h, R)
    if grids and _axis(w) is not None:
        return _inner_exact(f, h, w, v, g, R)

    indices = np.arange(-R, R + 1)
    gv = _line_coefficients(g, v, indices)
    hw = _line_coefficients(h, w, indices)
    points = [(-i * v[0] - j * w[0], -i * v[1] - j * w[1]) for i in indices for j in indices]
    if isinstance(f, GridSet):
        fc = grid_fourier_many(f, points)
    else:
        fc = np.array([gaussian_complex(f.coefficient(p)) for p in points])
    value = complex(np.sum(fc.reshape(len(indices), len(indices)) * np.outer(gv, hw)))
    tail = _norm(f) * (_norm(g) * _line_tail(h, w, R) + _norm(h) * _line_tail(g, v, R))
    return SeriesValue(value, tail)


def rectangle_series(D, T, S, R):
    """mu(D_2) sum_{|j|<=R} |f_1^(aj)|^2 |f_2^(bj)|^2 para D = D_1 x D_2 e T triangular inferior."""
    factors = D.factor()
    if factors is None:
        raise ValueError('D não é um produto de conjuntos')
    _check_unipotent_pair(T, S)
    if fixed_vector(T.transpose()) != (1, 0):
        raise ValueError('T deve fixar a frequência (1, 0)')
    a, b = fixed_vector(S.transpose())
    columns, rows = factors
    js = np.arange(-R, R + 1)
    first = _interval_coefficients(D.q, a * js)[:, columns].sum(axis=1)
    second = _interval_coefficients(D.q, b * js)[:, rows].sum(axis=1)
    mu2 = len(rows) / D.q
    return float(mu2 * np.sum(np.abs(first) ** 2 * np.abs(second) ** 2))


# --- estabilização de caracteres -------------------------------------------------

def _has_nontrivial_solution(matrices, box):
    frequencies = [(x1, x2) for x1 in range(-box, box + 1) for x2 in range(-box, box + 1)]
    sums = {(0, 0): False}
    for M in matrices:
        nxt = {}
        for s, nonzero in sums.items():
            for x in frequencies:
                image = _transport(M, x)
                key = (s[0] + image[0], s[1] + image[1])
                nxt[key] = nxt.get(key, False) or nonzero or x != (0, 0)
        sums = nxt
    for (s1, s2), nonzero in sums.items():
        # y = -s precisa caber na caixa
        if abs(s1) <= box and abs(s2) <= box and (nonzero or (s1, s2) != (0, 0)):
            return True
    return False


def correlation_stabilization(sequence, box=3, n_max=60):
    """Menor n0 tal que, para n0 <= n <= n_max, nenhuma tupla não nula em [-box, box]
    tem correlação 1. None se a tupla persiste até n_max."""
    n0 = None
    for value in range(1, n_max + 1):
        if _has_nontrivial_solution(sequence(value), box):
            n0 = None
        elif n0 is None:
            n0 = value
    return n0
